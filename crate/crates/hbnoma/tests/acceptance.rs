//! Exit criteria. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hbnoma::config::{ScenarioConfig, SnrSpec};
use hbnoma::sweep;
use hbnoma_core::{design_analog_stage, effective_channels, hermitian_correlation, ClusterPlan, System64};
use num_complex::Complex64;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn separated_angles(rng: &mut impl Rng, n: usize, min_sep: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-90.0..=90.0)).collect();
        if (0..n).all(|i| (i + 1..n).all(|j| (v[i] - v[j]).abs() >= min_sep)) {
            return v;
        }
    }
}

/// `|row · f^l|` computed here rather than through the library.
fn projection(row: &[Complex64], column: &[Complex64]) -> f64 {
    row.iter().zip(column).map(|(a, b)| a * b).sum::<Complex64>().norm()
}

fn baseband_columns(sys: &System64) -> Vec<Vec<Complex64>> {
    let m = sys.baseband.matrix();
    (0..m.ncols()).map(|c| m.column(c).to_vec()).collect()
}

fn zf_orthogonality() -> Outcome {
    let start = Instant::now();
    let mut rng = support::rng(0xA11);
    let mut worst: f64 = 0.0;
    let (mut evaluated, mut aliased) = (0usize, 0usize);
    while evaluated < 500 {
        let n = rng.random_range(2..=4);
        let t_bs = [16, 32, 64][rng.random_range(0..3)];
        let aods = separated_angles(&mut rng, n, 10.0);
        let channels = aods
            .iter()
            .map(|&a| {
                let aoa = rng.random_range(-90.0..=90.0);
                support::channel(t_bs, 4, aoa, a, support::complex_normal(&mut rng), 0.0)
            })
            .collect();
        let clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        // Opposite endfire directions alias at half-wavelength spacing, so a
        // physically separated pair can still be a singular clustering.
        let sys = match System64::design(channels, &clusters, 1.0, &[1.0]) {
            Ok(s) => s,
            Err(hbnoma_core::Error::SingularClustering { .. }) => {
                aliased += 1;
                continue;
            }
            Err(e) => panic!("{e}"),
        };
        evaluated += 1;
        let cols = baseband_columns(&sys);
        for (k, &u) in sys.plan.first_users().iter().enumerate() {
            let row = sys.effective.row(u).to_vec();
            let h = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for (l, col) in cols.iter().enumerate() {
                if l != k {
                    worst = worst.max(projection(&row, col) / h);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-9 && within(elapsed, 10.0),
        detail: format!(
            "max relative leakage {worst:.3e} (<= 1e-9) over {evaluated} scenarios \
             ({aliased} endfire-aliased draws rejected as singular), {:.2}s (< 10s)",
            elapsed.as_secs_f64()
        ),
    }
}

/// Fejér kernel from its closed form.
fn fejer(delta: f64, t: usize) -> f64 {
    let s = (std::f64::consts::PI * delta / 2.0).sin();
    if s.abs() < 1e-12 {
        return 1.0;
    }
    let num = (std::f64::consts::PI * t as f64 * delta / 2.0).sin();
    (num * num) / ((t * t) as f64 * s * s)
}

fn closed_form_norm() -> Outcome {
    let start = Instant::now();
    let mut rng = support::rng(0xB22);
    let (mut worst, mut worst_kernel): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let t_bs = [4, 8, 16, 32, 64][rng.random_range(0..5)];
        let n = rng.random_range(1..=4);
        let anchors = separated_angles(&mut rng, n, 3.0);
        let aod = rng.random_range(-90.0..=90.0);
        let aoa = rng.random_range(-90.0..=90.0);
        let mut channels: Vec<_> = anchors
            .iter()
            .map(|&a| support::channel(t_bs, 4, 0.0, a, Complex64::new(10.0, 0.0), 0.0))
            .collect();
        let g = support::complex_normal(&mut rng);
        let db = rng.random_range(-20.0..=0.0);
        channels.push(support::channel(t_bs, 4, aoa, aod, g, db));
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        clusters[0].push(n);
        let Ok(plan) = ClusterPlan::by_gain(&clusters, &channels) else {
            continue;
        };
        if plan.first_users()[0] != 0 {
            continue;
        }
        let (analog, combiners) = design_analog_stage(&channels, &plan).unwrap();
        let effective = effective_channels(&channels, &analog, &combiners).unwrap();
        let direct = effective.norm(n).powi(2);
        let v = |deg: f64| deg.to_radians().sin();
        let beta2 = g.norm_sqr() * 10f64.powf(db / 10.0);
        let closed = (t_bs * 4) as f64 * beta2 * anchors.iter().map(|&a| fejer(v(aod) - v(a), t_bs)).sum::<f64>();
        let rel = (direct - closed).abs() / closed.max(1e-300);
        if rel > worst {
            worst = rel;
            worst_kernel = closed / ((t_bs * 4) as f64 * beta2);
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-10 && within(elapsed, 5.0),
        detail: format!(
            "max relative error {worst:.3e} (<= 1e-10) where the kernel sum is {worst_kernel:.3e}, {:.2}s (< 5s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn fig3_shape() -> Outcome {
    let start = Instant::now();
    let rows = sweep::sweep_fig3(&ScenarioConfig::fig3_preset(), &sweep::fig3_range(0.5).unwrap()).unwrap();
    let at_zero = rows.iter().find(|r| r.aod_deg == 0.0).unwrap().rho;
    let near = rows.iter().filter(|r| (-7.0..=7.0).contains(&r.aod_deg));
    let (min_deg, min_rho) = near.fold((0.0, f64::INFINITY), |acc, r| {
        if r.rho < acc.1 {
            (r.aod_deg, r.rho)
        } else {
            acc
        }
    });
    let mut minima: Vec<(f64, f64)> = rows
        .windows(3)
        .filter(|w| w[1].rho < w[0].rho && w[1].rho <= w[2].rho)
        .map(|w| (w[1].aod_deg, w[1].rho))
        .collect();
    minima.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut lowest: Vec<f64> = minima.iter().take(2).map(|m| m.0).collect();
    lowest.sort_by(f64::total_cmp);
    let minima_ok = lowest.len() == 2 && (lowest[0] + 40.0).abs() <= 3.0 && (lowest[1] - 40.0).abs() <= 3.0;
    let elapsed = start.elapsed();
    Outcome {
        pass: at_zero >= 1.0 - 1e-9 && min_rho > 0.95 && minima_ok && within(elapsed, 5.0),
        detail: format!(
            "rho(0) = {at_zero:.12}, min rho on [-7, 7] = {min_rho:.4} at {min_deg} deg (> 0.95), \
             two lowest minima at {lowest:?} deg (+-3 of -40/40), {:.2}s (< 5s)",
            elapsed.as_secs_f64()
        ),
    }
}

/// Spearman correlation with average ranks.
fn rank_correlation(x: &[f64], y: &[f64]) -> f64 {
    let ranks = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let below = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (ranks(x), ranks(y));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&rx), mean(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn fig2_trend() -> Outcome {
    let start = Instant::now();
    let mut c = ScenarioConfig::fig2_preset();
    c.snr_db = SnrSpec::One(5.0);
    c.trials = 1000;
    let rows = sweep::sweep_fig2(&c, &sweep::fig2_spec(0.25).unwrap()).unwrap();
    let excess = rows
        .iter()
        .map(|r| r.rate_bound_bps_hz - r.rate_sim_bps_hz)
        .fold(f64::NEG_INFINITY, f64::max);
    let top = rows.iter().max_by(|a, b| a.rho.total_cmp(&b.rho)).unwrap();
    let probe = rows
        .iter()
        .min_by(|a, b| (a.rho - 0.92).abs().total_cmp(&(b.rho - 0.92).abs()))
        .unwrap();
    let drop = top.rate_sim_bps_hz - probe.rate_sim_bps_hz;
    let rho: Vec<f64> = rows.iter().map(|r| r.rho).collect();
    let rate: Vec<f64> = rows.iter().map(|r| r.rate_sim_bps_hz).collect();
    let spearman = rank_correlation(&rho, &rate);
    let elapsed = start.elapsed();
    Outcome {
        pass: excess <= 0.1
            && (top.rho - 1.0).abs() <= 1e-9
            && (drop - 1.0).abs() <= 0.5
            && spearman >= 0.9
            && within(elapsed, 120.0),
        detail: format!(
            "(a) max bound - rate {excess:.4} (<= 0.1); (b) drop {drop:.4} at rho {:.4} vs rho {:.6} (1.0 +- 0.5); \
             (c) spearman {spearman:.4} (>= 0.9); {:.2}s (< 120s)",
            probe.rho,
            top.rho,
            elapsed.as_secs_f64()
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = support::rng(0xC55);
    let (mut worst, mut checked): (f64, usize) = (0.0, 0);
    while checked < 1000 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=3);
        let t_bs = [2, 4, 8, 16][rng.random_range(0..4)];
        let t_mu = rng.random_range(1..=4);
        let snr: f64 = rng.random_range(-5.0..20.0);
        let s = support::random_scenario(&mut rng, n, m, t_bs, t_mu);
        let pt = 10f64.powf(snr / 10.0);
        let fractions = hbnoma_core::default_fractions(m);
        let Ok(sys) = System64::design(s.channels.clone(), &s.clusters, pt, &fractions) else {
            continue;
        };
        let Some(oracle) = support::oracle_rates(
            t_bs,
            t_mu,
            &s.aoas_deg,
            &s.aods_deg,
            &s.betas,
            &s.clusters,
            pt,
            &fractions,
        ) else {
            continue;
        };
        let ctx = sys.rate_context();
        for o in oracle {
            let (cn, pos) = sys.plan.position(o.user).unwrap();
            let r = ctx.user_rate(cn, pos);
            worst = worst.max((r.rate_bps_hz - o.rate).abs() / o.rate.max(1.0));
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-10 && within(elapsed, 30.0),
        detail: format!(
            "{checked} scenarios, max relative deviation {worst:.3e} (<= 1e-10), {:.2}s (< 30s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn decomposition() -> Outcome {
    let mut rng = support::rng(0xD66);
    let mut residual: f64 = 0.0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=6);
        let hm: Vec<Complex64> = (0..n).map(|_| support::complex_normal(&mut rng)).collect();
        let h1: Vec<Complex64> = (0..n).map(|_| support::complex_normal(&mut rng)).collect();
        let r = hermitian_correlation(ndarray_view(&hm).view(), ndarray_view(&h1).view()).unwrap();
        let unit = |v: &[Complex64]| {
            let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter().map(|z| z / s).collect::<Vec<_>>()
        };
        let (hm_t, h1_t) = (unit(&hm), unit(&h1));
        let along = Complex64::from_polar(r.rho, -r.pseudo_angle);
        let across = Complex64::from_polar((1.0 - r.rho * r.rho).max(0.0).sqrt(), r.residual_phase);
        let err = (0..n)
            .map(|i| {
                let w = r.residual.as_ref().map_or(Complex64::new(0.0, 0.0), |w| w[i]);
                (hm_t[i] - along * h1_t[i] - across * w).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        residual = residual.max(err);
    }

    let mut worst_leak: f64 = 0.0;
    let mut cases = 0usize;
    for _ in 0..500 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(2..=3);
        let s = support::random_scenario(&mut rng, n, m, 16, 4);
        let Ok(sys) = System64::design(s.channels.clone(), &s.clusters, 5.0, &hbnoma_core::default_fractions(m)) else {
            continue;
        };
        let cols = baseband_columns(&sys);
        for (cn, cluster) in sys.plan.assignments().iter().enumerate() {
            let anchor = sys.plan.first_users()[cn];
            for &u in cluster {
                if u == anchor || sys.effective.norm(u) == 0.0 {
                    continue;
                }
                let r = sys.correlation(u).unwrap();
                if r.rho >= 1.0 - 1e-6 {
                    continue;
                }
                let w_row: Vec<Complex64> = r.residual.as_ref().unwrap().iter().map(|z| z.conj()).collect();
                let row = sys.effective.row(u).to_vec();
                let h2 = sys.effective.norm(u).powi(2);
                for (l, col) in cols.iter().enumerate() {
                    if l == cn {
                        continue;
                    }
                    let direct = projection(&row, col).powi(2);
                    let predicted = (1.0 - r.rho * r.rho) * h2 * projection(&w_row, col).powi(2);
                    worst_leak = worst_leak.max((direct - predicted).abs() / direct.max(1e-12 * h2));
                    cases += 1;
                }
            }
        }
    }
    Outcome {
        pass: residual <= 1e-10 && worst_leak <= 1e-8,
        detail: format!(
            "reconstruction residual {residual:.3e} (<= 1e-10) over 10000 pairs; \
             leakage identity max relative error {worst_leak:.3e} (<= 1e-8) over {cases} beams"
        ),
    }
}

fn ndarray_view(v: &[Complex64]) -> hbnoma_core::CVector<f64> {
    hbnoma_core::CVector::from(v.to_vec())
}

fn bound_statistics() -> Outcome {
    let mut rng = support::rng(0xE77);
    let (mut scenarios, mut samples, mut violations, mut over): (usize, usize, usize, usize) = (0, 0, 0, 0);
    let mut max_excess = f64::NEG_INFINITY;
    while scenarios < 2000 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(2..=3);
        let snr: f64 = rng.random_range(0.0..=10.0);
        let s = support::random_scenario(&mut rng, n, m, 16, 4);
        let fractions = hbnoma_core::default_fractions(m);
        let Ok(sys) = System64::design(s.channels, &s.clusters, 10f64.powf(snr / 10.0), &fractions) else {
            continue;
        };
        scenarios += 1;
        for u in sys.evaluate().unwrap().into_iter().flatten() {
            if u.bound.is_none() {
                continue;
            }
            samples += 1;
            let excess = u.breakdown.lower_bound_bps_hz.unwrap() - u.breakdown.rate_bps_hz;
            max_excess = max_excess.max(excess);
            if excess > 0.0 {
                violations += 1;
            }
            if excess > 0.1 {
                over += 1;
            }
        }
    }
    let rate = violations as f64 / samples as f64;
    Outcome {
        pass: rate <= 0.05 && over == 0,
        detail: format!(
            "{scenarios} scenarios, {samples} bounded users: violation rate {:.2}% (<= 5%), \
             {over} above 0.1 bit (== 0), max excess {max_excess:.4}",
            100.0 * rate
        ),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_hbnoma"))
            .args(["fig3", "--seed", "42", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    Outcome {
        pass: a == b && !a.is_empty(),
        detail: format!("{} and {} bytes, identical: {}", a.len(), b.len(), a == b),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("zero-forcing orthogonality", zf_orthogonality),
        ("closed-form effective norm", closed_form_norm),
        ("correlation versus AoD shape", fig3_shape),
        ("rate versus correlation trend", fig2_trend),
        ("rate engine versus brute force", oracle_equivalence),
        ("correlation decomposition and leakage identity", decomposition),
        ("bound validity statistics", bound_statistics),
        ("fig3 output determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .map(String::as_str)
                    .or(e.downcast_ref::<&str>().copied())
                    .unwrap_or("?")
            ),
        });
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name}: {}", i + 1, outcome.detail);
        if !outcome.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 8 pass, failing: {failed:?}", 8 - failed.len());
        ExitCode::FAILURE
    }
}
