//! Test-side scenario generation and a brute-force rate evaluator that
//! shares no code with the library.
#![allow(dead_code, clippy::needless_range_loop, clippy::too_many_arguments)]

use hbnoma_core::{AngleSpec, ArrayGeometry, PathGain, SinglePathChannel64};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Zero-mean unit-variance circular complex Gaussian via Box-Muller.
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-u1.ln()).sqrt();
    Complex64::from_polar(r, 2.0 * PI * u2)
}

pub fn channel(t_bs: usize, t_mu: usize, aoa_deg: f64, aod_deg: f64, g: Complex64, db: f64) -> SinglePathChannel64 {
    SinglePathChannel64::new(
        AngleSpec::from_degrees(aoa_deg, 0.5).unwrap(),
        AngleSpec::from_degrees(aod_deg, 0.5).unwrap(),
        PathGain::new(g, db),
        ArrayGeometry::half_wavelength(t_bs).unwrap(),
        ArrayGeometry::half_wavelength(t_mu).unwrap(),
    )
}

/// Random deployment: `n` clusters of `m` users with uniform physical
/// angles, Gaussian small-scale gains and large-scale levels in [-10, 0] dB.
pub struct Scenario {
    pub channels: Vec<SinglePathChannel64>,
    pub clusters: Vec<Vec<usize>>,
    pub aods_deg: Vec<f64>,
    pub aoas_deg: Vec<f64>,
    /// `g · 10^(dB/20)` computed on the test side.
    pub betas: Vec<Complex64>,
    pub t_bs: usize,
    pub t_mu: usize,
}

pub fn random_scenario(rng: &mut impl Rng, n: usize, m: usize, t_bs: usize, t_mu: usize) -> Scenario {
    let mut channels = Vec::new();
    let mut clusters = Vec::new();
    let mut aods = Vec::new();
    let mut aoas = Vec::new();
    let mut betas = Vec::new();
    for _ in 0..n {
        let mut ids = Vec::new();
        for _ in 0..m {
            let aoa = rng.random_range(-90.0..=90.0);
            let aod = rng.random_range(-90.0..=90.0);
            let db = rng.random_range(-10.0..=0.0);
            ids.push(channels.len());
            let g = complex_normal(rng);
            aods.push(aod);
            aoas.push(aoa);
            betas.push(g * 10f64.powf(db / 20.0));
            channels.push(channel(t_bs, t_mu, aoa, aod, g, db));
        }
        clusters.push(ids);
    }
    Scenario {
        channels,
        clusters,
        aods_deg: aods,
        aoas_deg: aoas,
        betas,
        t_bs,
        t_mu,
    }
}

// ---------------------------------------------------------------------------
// Brute-force evaluator written straight from the model on Vec<Complex64>.

fn ula(t: usize, deg: f64) -> Vec<Complex64> {
    let v = deg.to_radians().sin();
    (0..t)
        .map(|k| Complex64::from_polar(1.0 / (t as f64).sqrt(), -PI * k as f64 * v))
        .collect()
}

fn gauss_jordan_inverse(mut a: Vec<Vec<Complex64>>) -> Option<Vec<Vec<Complex64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap())?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                for j in 0..n {
                    let (x, y) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * x;
                    inv[r][j] -= f * y;
                }
            }
        }
    }
    Some(inv)
}

pub struct OracleUser {
    pub user: usize,
    pub rate: f64,
    pub desired: f64,
    pub intra: f64,
    pub inter: f64,
}

/// Per-user exact rates, or `None` when the anchor matrix is singular.
///
/// `aoa_deg`, `aod_deg` and `beta` are per user; `clusters` lists users.
pub fn oracle_rates(
    t_bs: usize,
    t_mu: usize,
    aoa_deg: &[f64],
    aod_deg: &[f64],
    beta: &[Complex64],
    clusters: &[Vec<usize>],
    total_power: f64,
    fractions: &[f64],
) -> Option<Vec<OracleUser>> {
    let n = clusters.len();
    let users = beta.len();
    // Channel matrices H_u = sqrt(T_BS T_MU) beta a_MU a_BS^H.
    let h: Vec<Vec<Vec<Complex64>>> = (0..users)
        .map(|u| {
            let amu = ula(t_mu, aoa_deg[u]);
            let abs = ula(t_bs, aod_deg[u]);
            let s = ((t_bs * t_mu) as f64).sqrt() * beta[u];
            amu.iter()
                .map(|x| abs.iter().map(|y| s * x * y.conj()).collect())
                .collect()
        })
        .collect();
    let anchor: Vec<usize> = clusters
        .iter()
        .map(|c| {
            let mut best = c[0];
            for &u in c {
                if beta[u].norm() > beta[best].norm() || (beta[u].norm() == beta[best].norm() && u < best) {
                    best = u;
                }
            }
            best
        })
        .collect();
    let f_rf: Vec<Vec<Complex64>> = anchor.iter().map(|&u| ula(t_bs, aod_deg[u])).collect(); // columns
    let eff = |u: usize| -> Vec<Complex64> {
        let w = ula(t_mu, aoa_deg[u]);
        let wh: Vec<Complex64> = (0..t_bs)
            .map(|j| (0..t_mu).map(|i| w[i].conj() * h[u][i][j]).sum())
            .collect();
        f_rf.iter()
            .map(|col| wh.iter().zip(col).map(|(a, b)| a * b).sum())
            .collect()
    };
    let rows: Vec<Vec<Complex64>> = (0..users).map(eff).collect();
    let g: Vec<Vec<Complex64>> = anchor.iter().map(|&u| rows[u].clone()).collect();
    let mut fbb = gauss_jordan_inverse(g)?;
    for col in 0..n {
        let mut p = 0.0;
        for t in 0..t_bs {
            let x: Complex64 = (0..n).map(|k| f_rf[k][t] * fbb[k][col]).sum();
            p += x.norm_sqr();
        }
        let p = p.sqrt();
        for k in 0..n {
            fbb[k][col] /= p;
        }
    }
    let gain = |u: usize, l: usize| -> f64 { (0..n).map(|k| rows[u][k] * fbb[k][l]).sum::<Complex64>().norm_sqr() };
    let norm = |u: usize| -> f64 { rows[u].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() };
    let pc = total_power / n as f64;
    let mut order = Vec::new();
    for c in clusters {
        let mut o = c.clone();
        o.sort_by(|&a, &b| norm(b).partial_cmp(&norm(a)).unwrap().then(a.cmp(&b)));
        order.push(o);
    }
    let mut out = Vec::new();
    for cn in 0..n {
        for (m, &u) in order[cn].iter().enumerate() {
            let own = gain(u, cn);
            let desired = fractions[m] * pc * own;
            let intra: f64 = (0..m).map(|k| fractions[k] * pc * own).sum();
            let mut inter = 0.0;
            for l in 0..n {
                if l != cn {
                    for q in 0..order[l].len() {
                        inter += fractions[q] * pc * gain(u, l);
                    }
                }
            }
            out.push(OracleUser {
                user: u,
                rate: (1.0 + desired / (intra + inter + 1.0)).log2(),
                desired,
                intra,
                inter,
            });
        }
    }
    Some(out)
}

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration on
/// repeated squares `M^(2^k)`, which separates nearly equal eigenvalues in
/// `squarings` steps, followed by the Rayleigh quotient with `M`.
pub fn power_iteration(m: &[Vec<Complex64>], squarings: usize) -> f64 {
    let n = m.len();
    let mul = |a: &[Vec<Complex64>], b: &[Vec<Complex64>]| -> Vec<Vec<Complex64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    };
    let mut p = m.to_vec();
    for _ in 0..squarings {
        let q = mul(&p, &p);
        let scale = q.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if scale == 0.0 {
            return 0.0;
        }
        p = q
            .into_iter()
            .map(|r| r.into_iter().map(|z| z / scale).collect())
            .collect();
    }
    // The dominant column of the projector-like power spans the top eigenspace.
    let v: Vec<Complex64> = (0..n)
        .map(|j| (j, (0..n).map(|i| p[i][j].norm_sqr()).sum::<f64>()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(j, _)| (0..n).map(|i| p[i][j]).collect())
        .unwrap();
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if nrm == 0.0 {
        return 0.0;
    }
    let w: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect();
    v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<Complex64>().re / nrm
}
