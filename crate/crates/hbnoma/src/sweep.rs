//! Parameter sweeps and the two figure presets.

use hbnoma_core::{DesignedSystem, System64};
use serde::{Deserialize, Serialize};

use crate::config::{AngleField, ScenarioConfig};
use crate::error::{HarnessError, Result};
use crate::sim::{self, realize, run_point, sub_seed};

/// Swept quantity. `RhoTarget` places the target user's AoD where its
/// correlation with the cluster anchor equals the requested value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    AodOfUser,
    SnrDb,
    RhoTarget,
}

/// Inclusive arithmetic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let r = Self { start, stop, step };
        r.values()?;
        Ok(r)
    }

    /// Grid points `start + i * step` up to `stop`, with a half-step slack
    /// against rounding.
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(HarnessError::Config("sweep bounds must be finite".into()));
        }
        if !(self.step > 0.0) {
            return Err(HarnessError::Config(format!(
                "sweep step must be positive, got {}",
                self.step
            )));
        }
        if self.stop < self.start {
            return Err(HarnessError::Config(format!(
                "empty sweep range {}..{}",
                self.start, self.stop
            )));
        }
        let count = ((self.stop - self.start) / self.step + 0.5).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// Target user MU-(n, m) is 1-based. The config user at that index is the
/// one moved by AoD and ρ sweeps; reported figures come from the user at
/// SIC position m of cluster n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub target_user: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub aod_deg: f64,
    pub snr_db: f64,
    pub rho: f64,
    pub rate_sim_bps_hz: f64,
    pub rate_bound_bps_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub aod_deg: f64,
    pub rho: f64,
    pub rate_sim_bps_hz: f64,
    pub rate_bound_bps_hz: f64,
    pub snr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub aod_deg: f64,
    pub rho: f64,
}

fn target_index(config: &ScenarioConfig, (n, m): (usize, usize)) -> Result<(usize, usize)> {
    if n == 0 || m == 0 || config.user(n - 1, m - 1).is_none() {
        return Err(HarnessError::Config(format!(
            "target user MU-({n},{m}) does not exist in a {}x{} scenario",
            config.num_clusters(),
            config.users_per_cluster()
        )));
    }
    Ok((n - 1, m - 1))
}

fn set_aod(config: &mut ScenarioConfig, (n, m): (usize, usize), aod_deg: f64) {
    config.user_mut(n, m).expect("target checked").aod_deg = AngleField::Degrees(aod_deg);
}

/// Correlation of config user `(n, m)` (0-based) with its cluster anchor in
/// the first realisation of `config`.
pub fn target_correlation(config: &ScenarioConfig, (n, m): (usize, usize)) -> Result<f64> {
    let system = design_first_trial(config)?;
    let u = config.clusters[..n].iter().map(|c| c.users.len()).sum::<usize>() + m;
    let anchor = system.plan.first_users()[n];
    if u == anchor {
        return Ok(1.0);
    }
    if !(system.effective.norm(u) > 0.0) {
        return Ok(0.0);
    }
    Ok(system.correlation(u)?.rho)
}

/// Designs trial 0 at the first SNR point, without redraws.
pub fn design_first_trial(config: &ScenarioConfig) -> Result<System64> {
    config.validate()?;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(sub_seed(config.seed, 0, 0));
    let (channels, clusters) = realize(config, &mut rng)?;
    let snr = config.snr_values()[0];
    Ok(DesignedSystem::design(
        channels,
        &clusters,
        10f64.powf(snr / 10.0),
        &config.fractions(),
    )?)
}

/// AoD of config user `target` (0-based) at which its correlation with the
/// anchor equals `rho`, searched by bisection between the anchor's AoD and
/// the first null of the anchor beam on the side of the user's configured
/// AoD.
pub fn aod_for_rho(config: &ScenarioConfig, target: (usize, usize), rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(HarnessError::Config(format!("rho target {rho} outside [0, 1]")));
    }
    let (n, m) = target;
    let anchor_deg = config.clusters[n]
        .users
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != m)
        .find_map(|(_, u)| u.aod_deg.fixed())
        .ok_or_else(|| HarnessError::Config("rho sweeps need a fixed AoD for another user of the cluster".into()))?;
    let user_deg = config
        .user(n, m)
        .and_then(|u| u.aod_deg.fixed())
        .unwrap_or(anchor_deg + 1.0);
    let side = if user_deg >= anchor_deg { 1.0 } else { -1.0 };
    let v0 = anchor_deg.to_radians().sin() / (2.0 * config.spacing_ratio);
    let null = (v0 + side * 2.0 / config.bs_antennas as f64).clamp(-1.0, 1.0);
    let to_deg = |v: f64| (v * 2.0 * config.spacing_ratio).clamp(-1.0, 1.0).asin().to_degrees();
    let eval = |deg: f64| {
        let mut c = config.clone();
        set_aod(&mut c, target, deg);
        target_correlation(&c, target)
    };
    let (mut lo, mut hi) = (v0, null);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eval(to_deg(mid))? >= rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(to_deg(0.5 * (lo + hi)))
}

/// Runs `spec` over `config`, one row per grid point.
pub fn sweep(config: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let target = target_index(config, spec.target_user)?;
    let values = spec.range.values()?;
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let mut c = config.clone();
        let snr = match spec.variable {
            SweepVariable::SnrDb => value,
            _ => config.snr_values()[0],
        };
        match spec.variable {
            SweepVariable::AodOfUser => set_aod(&mut c, target, value),
            SweepVariable::RhoTarget => {
                let aod = aod_for_rho(config, target, value)?;
                set_aod(&mut c, target, aod);
            }
            SweepVariable::SnrDb => {}
        }
        c.validate()?;
        let (point, _) = run_point(&c, snr)?;
        let agg = point
            .user(spec.target_user.0, spec.target_user.1)
            .expect("aggregate for every position");
        rows.push(SweepRow {
            value,
            aod_deg: c
                .user(target.0, target.1)
                .and_then(|u| u.aod_deg.fixed())
                .unwrap_or(f64::NAN),
            snr_db: snr,
            rho: agg.rho_mean,
            rate_sim_bps_hz: agg.rate_mean,
            rate_bound_bps_hz: agg.rate_bound_mean,
        });
    }
    Ok(rows)
}

/// Default fig2 sweep: MU-(1,2) from 50° to 60°.
pub fn fig2_spec(step_deg: f64) -> Result<SweepSpec> {
    Ok(SweepSpec {
        variable: SweepVariable::AodOfUser,
        range: SweepRange::new(50.0, 60.0, step_deg)?,
        target_user: (1, 2),
    })
}

/// Rate and bound of MU-(1,2) versus its AoD, block by SNR in the order
/// given.
pub fn sweep_fig2(config: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<Fig2Row>> {
    let mut rows = Vec::new();
    for snr in config.snr_values() {
        let mut c = config.clone();
        c.snr_db = crate::config::SnrSpec::One(snr);
        for r in sweep(&c, spec)? {
            rows.push(Fig2Row {
                aod_deg: r.aod_deg,
                rho: r.rho,
                rate_sim_bps_hz: r.rate_sim_bps_hz,
                rate_bound_bps_hz: r.rate_bound_bps_hz,
                snr_db: r.snr_db,
            });
        }
    }
    Ok(rows)
}

/// Default fig3 grid: -90° to 90°.
pub fn fig3_range(step_deg: f64) -> Result<SweepRange> {
    SweepRange::new(-90.0, 90.0, step_deg)
}

/// ρ of MU-(1,2) against MU-(1,1) over the AoD grid. No rate evaluation,
/// so a single realisation suffices.
pub fn sweep_fig3(config: &ScenarioConfig, range: &SweepRange) -> Result<Vec<Fig3Row>> {
    let target = target_index(config, (1, 2))?;
    range
        .values()?
        .into_iter()
        .map(|aod| {
            let mut c = config.clone();
            set_aod(&mut c, target, aod);
            Ok(Fig3Row {
                aod_deg: aod,
                rho: target_correlation(&c, target)?,
            })
        })
        .collect()
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. `None` when a
/// sample is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Trend statistics of one SNR block of a fig2 table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Trend {
    pub snr_db: f64,
    pub spearman_rho_rate: Option<f64>,
    /// Largest `bound - rate` over the block.
    pub max_bound_excess_bps_hz: f64,
}

pub fn fig2_trends(rows: &[Fig2Row]) -> Vec<Fig2Trend> {
    let mut snrs: Vec<f64> = Vec::new();
    for r in rows {
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    snrs.into_iter()
        .map(|snr| {
            let block: Vec<&Fig2Row> = rows.iter().filter(|r| r.snr_db == snr).collect();
            let rho: Vec<f64> = block.iter().map(|r| r.rho).collect();
            let rate: Vec<f64> = block.iter().map(|r| r.rate_sim_bps_hz).collect();
            Fig2Trend {
                snr_db: snr,
                spearman_rho_rate: spearman(&rho, &rate),
                max_bound_excess_bps_hz: block
                    .iter()
                    .map(|r| r.rate_bound_bps_hz - r.rate_sim_bps_hz)
                    .fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

/// JSON form of a fig2 run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Manifest {
    pub version: String,
    pub config: ScenarioConfig,
    pub sweep: SweepSpec,
    pub rows: Vec<Fig2Row>,
    pub trends: Vec<Fig2Trend>,
}

/// JSON form of a fig3 run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Manifest {
    pub version: String,
    pub config: ScenarioConfig,
    pub range: SweepRange,
    pub rows: Vec<Fig3Row>,
}

pub fn fig2_manifest(config: &ScenarioConfig, spec: &SweepSpec) -> Result<Fig2Manifest> {
    let rows = sweep_fig2(config, spec)?;
    Ok(Fig2Manifest {
        version: sim::version_tag(),
        config: config.clone(),
        sweep: *spec,
        trends: fig2_trends(&rows),
        rows,
    })
}

pub fn fig3_manifest(config: &ScenarioConfig, range: &SweepRange) -> Result<Fig3Manifest> {
    Ok(Fig3Manifest {
        version: sim::version_tag(),
        config: config.clone(),
        range: *range,
        rows: sweep_fig3(config, range)?,
    })
}
