//! Seeded Monte Carlo over channel realisations.
//!
//! Every trial draws its random angles and gains from its own ChaCha stream,
//! seeded with `seed ^ hash(trial, attempt)`, so a trial's outcome does not
//! depend on which thread ran it. Results are reduced in trial order.

use hbnoma_core::{AngleSpec, ArrayGeometry, DesignedSystem, PathGain, SinglePathChannel64};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, UserSpec};
use crate::error::{HarnessError, Result};

/// Bound excess above which a sample counts against the tolerance.
pub const BOUND_TOLERANCE_BPS_HZ: f64 = 0.1;

pub fn version_tag() -> String {
    format!("hbnoma {}", env!("CARGO_PKG_VERSION"))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the RNG stream for one attempt of one trial.
pub fn sub_seed(seed: u64, trial: u64, attempt: u64) -> u64 {
    seed ^ splitmix64(splitmix64(trial).wrapping_add(attempt))
}

fn draw_angle(rng: &mut ChaCha8Rng, field: crate::config::AngleField) -> f64 {
    match field.fixed() {
        Some(d) => d,
        None => rng.random_range(-90.0..=90.0),
    }
}

fn draw_gain(rng: &mut ChaCha8Rng, user: &UserSpec) -> Complex64 {
    match user.gain {
        Some([re, im]) => Complex64::new(re, im),
        None => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) / 2f64.sqrt()
        }
    }
}

/// One channel realisation: users numbered cluster by cluster in config
/// order.
pub fn realize(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<(Vec<SinglePathChannel64>, Vec<Vec<usize>>)> {
    let cfg_err = |e: hbnoma_core::Error| HarnessError::Config(e.to_string());
    let bs = ArrayGeometry::new(config.bs_antennas, config.spacing_ratio).map_err(cfg_err)?;
    let mu = ArrayGeometry::new(config.mu_antennas, config.spacing_ratio).map_err(cfg_err)?;
    let mut channels = Vec::new();
    let mut clusters = Vec::new();
    for cluster in &config.clusters {
        let mut ids = Vec::with_capacity(cluster.users.len());
        for user in &cluster.users {
            let aod = draw_angle(rng, user.aod_deg);
            let aoa = draw_angle(rng, user.aoa_deg);
            let g = draw_gain(rng, user);
            ids.push(channels.len());
            channels.push(SinglePathChannel64::new(
                AngleSpec::from_degrees(aoa, config.spacing_ratio).map_err(cfg_err)?,
                AngleSpec::from_degrees(aod, config.spacing_ratio).map_err(cfg_err)?,
                PathGain::new(g, user.large_scale_db),
                bs,
                mu,
            ));
        }
        clusters.push(ids);
    }
    Ok((channels, clusters))
}

/// Outcome for the user at SIC position `position` of `cluster`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSample {
    /// Flat config index of the user occupying this position.
    pub user: usize,
    pub rho: f64,
    pub rate: f64,
    pub bound: f64,
    pub intra: f64,
    pub inter: f64,
    /// Whether the bound formula (rather than the exact rate) was used.
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// `users[n][m]`, by SIC position.
    pub users: Vec<Vec<UserSample>>,
    pub redraws: usize,
    pub demotions: usize,
}

/// Designs and evaluates one realisation.
pub fn evaluate_system(system: &DesignedSystem<f64>) -> Result<Vec<Vec<UserSample>>> {
    Ok(system
        .evaluate()?
        .into_iter()
        .map(|cluster| {
            cluster
                .into_iter()
                .map(|u| UserSample {
                    user: u.user,
                    rho: u.rho,
                    rate: u.breakdown.rate_bps_hz,
                    bound: u.breakdown.lower_bound_bps_hz.unwrap_or(u.breakdown.rate_bps_hz),
                    intra: u.breakdown.intra_interference,
                    inter: u.breakdown.inter_interference,
                    bounded: u.bound.is_some(),
                })
                .collect()
        })
        .collect())
}

/// Runs trial `trial`, redrawing up to `max_redraws` times on singular
/// clusterings.
pub fn run_trial(config: &ScenarioConfig, snr_db: f64, trial: u64, max_redraws: usize) -> Result<TrialResult> {
    let total_power = 10f64.powf(snr_db / 10.0);
    let fractions = config.fractions();
    let mut attempt = 0usize;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(config.seed, trial, attempt as u64));
        let (channels, clusters) = realize(config, &mut rng)?;
        match DesignedSystem::design(channels, &clusters, total_power, &fractions) {
            Ok(system) => {
                return Ok(TrialResult {
                    users: evaluate_system(&system)?,
                    redraws: attempt,
                    demotions: system.plan.demoted_anchors().len(),
                })
            }
            Err(hbnoma_core::Error::SingularClustering {
                first,
                second,
                condition,
            }) => {
                if attempt >= max_redraws {
                    return Err(HarnessError::Numerical(format!(
                        "trial {trial}: clusters {} and {} are not separable (condition {condition:.3e}) \
                         and the redraw budget of {max_redraws} is exhausted",
                        first + 1,
                        second + 1
                    )));
                }
                attempt += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Means for MU-(n, m), 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserAggregate {
    pub user_n: usize,
    pub user_m: usize,
    pub rate_mean: f64,
    pub rate_bound_mean: f64,
    pub rho_mean: f64,
    pub intra_mean: f64,
    pub inter_mean: f64,
}

/// How often the bound exceeded the exact rate of the same user and trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// Samples where the bound formula was evaluated.
    pub samples: usize,
    pub violations: usize,
    /// Violations larger than [`BOUND_TOLERANCE_BPS_HZ`].
    pub violations_over_tolerance: usize,
    pub violation_rate: f64,
    pub max_excess_bps_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub snr_db: f64,
    pub users: Vec<UserAggregate>,
    pub sum_rate_mean: f64,
    /// Singular-clustering redraws spent at this point.
    pub redraws: usize,
    /// (trial, cluster) pairs whose anchor was not first in SIC order.
    pub demotions: usize,
    pub bound_check: BoundCheck,
}

impl PointSummary {
    pub fn user(&self, n: usize, m: usize) -> Option<&UserAggregate> {
        self.users.iter().find(|u| u.user_n == n && u.user_m == m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub trials: usize,
    pub config: ScenarioConfig,
    pub points: Vec<PointSummary>,
}

/// Redraw budget for a run of `trials` trials: 1% rounded up.
pub fn redraw_cap(trials: usize) -> usize {
    trials.div_ceil(100)
}

/// All trials at one SNR, reduced in trial order.
pub fn run_point(config: &ScenarioConfig, snr_db: f64) -> Result<(PointSummary, Vec<TrialResult>)> {
    let cap = redraw_cap(config.trials);
    let results: Vec<TrialResult> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, snr_db, t, cap))
        .collect::<Result<_>>()?;
    let redraws: usize = results.iter().map(|r| r.redraws).sum();
    if redraws > cap {
        return Err(HarnessError::Numerical(format!(
            "{redraws} singular-clustering redraws at {snr_db} dB exceed the cap of {cap}"
        )));
    }
    Ok((summarize(snr_db, &results), results))
}

fn summarize(snr_db: f64, results: &[TrialResult]) -> PointSummary {
    let trials = results.len() as f64;
    let shape: Vec<usize> = results[0].users.iter().map(Vec::len).collect();
    let mut users = Vec::new();
    for (n, &m_count) in shape.iter().enumerate() {
        for m in 0..m_count {
            let mut acc = [0.0f64; 5];
            for r in results {
                let s = &r.users[n][m];
                acc[0] += s.rate;
                acc[1] += s.bound;
                acc[2] += s.rho;
                acc[3] += s.intra;
                acc[4] += s.inter;
            }
            users.push(UserAggregate {
                user_n: n + 1,
                user_m: m + 1,
                rate_mean: acc[0] / trials,
                rate_bound_mean: acc[1] / trials,
                rho_mean: acc[2] / trials,
                intra_mean: acc[3] / trials,
                inter_mean: acc[4] / trials,
            });
        }
    }
    let mut sum_rate = 0.0;
    let mut check = BoundCheck {
        samples: 0,
        violations: 0,
        violations_over_tolerance: 0,
        violation_rate: 0.0,
        max_excess_bps_hz: None,
    };
    for r in results {
        for s in r.users.iter().flatten() {
            sum_rate += s.rate;
            if s.bounded {
                check.samples += 1;
                let excess = s.bound - s.rate;
                if excess > 0.0 {
                    check.violations += 1;
                }
                if excess > BOUND_TOLERANCE_BPS_HZ {
                    check.violations_over_tolerance += 1;
                }
                check.max_excess_bps_hz = Some(check.max_excess_bps_hz.map_or(excess, |m: f64| m.max(excess)));
            }
        }
    }
    if check.samples > 0 {
        check.violation_rate = check.violations as f64 / check.samples as f64;
    }
    PointSummary {
        snr_db,
        users,
        sum_rate_mean: sum_rate / trials,
        redraws: results.iter().map(|r| r.redraws).sum(),
        demotions: results.iter().map(|r| r.demotions).sum(),
        bound_check: check,
    }
}

/// Every SNR point of the scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunManifest> {
    config.validate()?;
    let points = config
        .snr_values()
        .into_iter()
        .map(|snr| run_point(config, snr).map(|(p, _)| p))
        .collect::<Result<_>>()?;
    Ok(RunManifest {
        version: version_tag(),
        seed: config.seed,
        trials: config.trials,
        config: config.clone(),
        points,
    })
}
