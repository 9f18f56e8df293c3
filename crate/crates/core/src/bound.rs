//! Correlation between a user's effective channel and its cluster anchor's,
//! and the rate lower bound built on it.

use ndarray::ArrayView1;
use num_complex::Complex;

use crate::channel::fejer_correlation;
use crate::error::{Error, Result};
use crate::linalg::{adjoint, gram, hermitian_eigenvalues, inner, norm, CVector};
use crate::precoding::{AnalogPrecoder, BasebandPrecoder};
use crate::scalar::Real;

/// Hermitian-angle decomposition of `h̃_m` against the anchor's `h̃_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport<T: Real> {
    /// `|h̃_m* h̃_1|`, in `[0, 1]`.
    pub rho: T,
    /// `arg(h̃_m* h̃_1)`. Not used by the bound.
    pub pseudo_angle: T,
    /// `arg(ϖ* h̃_m)`; zero up to rounding because `ϖ` is taken along the
    /// residual itself.
    pub residual_phase: T,
    /// Unit vector orthogonal to `h̃_1`; `None` when `rho` is one.
    pub residual: Option<CVector<T>>,
}

impl<T: Real> CorrelationReport<T> {
    /// `1 - rho²`, exactly zero when there is no residual direction.
    pub fn orthogonal_weight(&self) -> T {
        match self.residual {
            Some(_) => T::one() - self.rho * self.rho,
            None => T::zero(),
        }
    }
}

fn normalized<T: Real>(v: ArrayView1<'_, Complex<T>>, what: &str) -> Result<CVector<T>> {
    let n = norm(v);
    if !(n > T::zero()) || !n.is_finite() {
        return Err(Error::Domain(format!("{what} effective channel has zero norm")));
    }
    Ok(v.mapv(|z| z / n))
}

fn project_out<T: Real>(v: &mut CVector<T>, unit: &CVector<T>) {
    let c = inner(unit.view(), v.view());
    v.zip_mut_with(unit, |x, u| *x -= c * *u);
}

/// Correlation of `hm` with the anchor channel `h1` (both column vectors).
pub fn hermitian_correlation<T: Real>(
    hm: ArrayView1<'_, Complex<T>>,
    h1: ArrayView1<'_, Complex<T>>,
) -> Result<CorrelationReport<T>> {
    if hm.len() != h1.len() {
        return Err(Error::Dimension {
            context: "correlated effective channels",
            expected: h1.len(),
            found: hm.len(),
        });
    }
    let hm_t = normalized(hm, "user")?;
    let h1_t = normalized(h1, "anchor")?;
    let coefficient = inner(h1_t.view(), hm_t.view());
    let rho = coefficient.norm().min(T::one());
    let pseudo_angle = coefficient.conj().arg();
    if T::one() - rho <= T::lit(T::UNIT_TOLERANCE) {
        return Ok(CorrelationReport {
            rho,
            pseudo_angle,
            residual_phase: T::zero(),
            residual: None,
        });
    }
    let mut r = hm_t.clone();
    project_out(&mut r, &h1_t);
    project_out(&mut r, &h1_t);
    let r_norm = norm(r.view());
    if !(r_norm > T::zero()) {
        return Ok(CorrelationReport {
            rho,
            pseudo_angle,
            residual_phase: T::zero(),
            residual: None,
        });
    }
    r.mapv_inplace(|z| z / r_norm);
    let residual_phase = inner(r.view(), hm_t.view()).arg();
    Ok(CorrelationReport {
        rho,
        pseudo_angle,
        residual_phase,
        residual: Some(r),
    })
}

/// `‖h̃_m − ρ e^{-jω} h̃_1 − sqrt(1−ρ²) e^{jχ} ϖ‖`: the error of rebuilding
/// `h̃_m` from the report with its computed phases.
pub fn decompose_effective_channel<T: Real>(
    report: &CorrelationReport<T>,
    hm: ArrayView1<'_, Complex<T>>,
    h1: ArrayView1<'_, Complex<T>>,
) -> Result<T> {
    let hm_t = normalized(hm, "user")?;
    let h1_t = normalized(h1, "anchor")?;
    let along = Complex::from_polar(report.rho, -report.pseudo_angle);
    let across = Complex::from_polar(report.orthogonal_weight().sqrt(), report.residual_phase);
    let mut diff = hm_t;
    diff.zip_mut_with(&h1_t, |x, u| *x -= along * *u);
    if let Some(w) = &report.residual {
        diff.zip_mut_with(w, |x, u| *x -= across * *u);
    }
    Ok(norm(diff.view()))
}

/// Kantorovich factor `(κ + 1/κ + 2) / 4` of the RF Gram matrix, with `κ`
/// its eigenvalue spread.
pub fn eta_factor<T: Real>(analog: &AnalogPrecoder<T>) -> Result<T> {
    let values = hermitian_eigenvalues(gram(analog.matrix().view()).view())?;
    let (lo, hi) = match (values.first(), values.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::Domain("RF precoder has no columns".into())),
    };
    let floor = hi * T::epsilon() * T::lit(16.0 * values.len() as f64);
    if !(lo > floor) {
        return Err(Error::Domain(
            "RF precoder is rank deficient (coincident anchor beams)".into(),
        ));
    }
    let kappa = hi / lo;
    Ok((kappa + kappa.recip() + T::lit(2.0)) / T::lit(4.0))
}

/// `Σ_ℓ K_T(φ_ℓ1 − φ)` over the anchor AoDs.
pub fn kernel_sum<T: Real>(anchor_aods: &[T], user_aod: T, t: usize) -> T {
    anchor_aods.iter().map(|&a| fejer_correlation(a - user_aod, t)).sum()
}

/// Largest eigenvalue of `S = F_BB^{-n} F_BB^{-n}*`, where `F_BB^{-n}` is
/// the baseband precoder without column `n`. Zero for a single beam.
pub fn lambda_max_s<T: Real>(baseband: &BasebandPrecoder<T>, n: usize) -> Result<T> {
    let reduced = baseband.without_column(n);
    if reduced.ncols() == 0 {
        return Ok(T::zero());
    }
    let s = reduced.dot(&adjoint(reduced.view()));
    let values = hermitian_eigenvalues(s.view())?;
    Ok(values.last().copied().unwrap_or(T::zero()).max(T::zero()))
}

/// Scalars entering the bound for one non-anchor user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs<T: Real> {
    pub rho: T,
    /// `P_{n,m}`.
    pub user_power: T,
    /// `Σ_{k<m} P_{n,k}`.
    pub predecessor_power: T,
    /// `P_c`.
    pub cluster_power: T,
    /// `T_BS T_MU |β_{n,m}|²`.
    pub array_gain_sqr: T,
    pub eta: T,
    pub lambda_max_s: T,
    /// `K_{T,Σ1}`: kernel sum at the anchor's AoD.
    pub kernel_sum_first: T,
    /// `K_{T,Σm}`: kernel sum at the user's AoD.
    pub kernel_sum_user: T,
}

/// The three denominator terms and the quantities they were built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundComponents<T: Real> {
    pub zeta_intra: T,
    pub zeta_inter: T,
    pub zeta_noise: T,
    pub eta: T,
    pub kernel_sum_first: T,
    pub kernel_sum_user: T,
    pub lambda_max_s: T,
}

pub fn bound_components<T: Real>(inputs: &BoundInputs<T>) -> Result<BoundComponents<T>> {
    let rho = inputs.rho;
    if !(rho >= T::zero() && rho <= T::one()) {
        return Err(Error::Domain(format!("correlation {rho} outside [0, 1]")));
    }
    let rho2 = rho * rho;
    let gain = inputs.array_gain_sqr;
    Ok(BoundComponents {
        zeta_intra: inputs.predecessor_power * rho2 * gain,
        zeta_inter: inputs.cluster_power
            * (T::one() - rho2)
            * gain
            * inputs.lambda_max_s
            * inputs.eta
            * inputs.kernel_sum_first,
        zeta_noise: inputs.eta * inputs.kernel_sum_first / inputs.kernel_sum_user,
        eta: inputs.eta,
        kernel_sum_first: inputs.kernel_sum_first,
        kernel_sum_user: inputs.kernel_sum_user,
        lambda_max_s: inputs.lambda_max_s,
    })
}

/// `log2(1 + P ρ² T_BS T_MU |β|² / (ζ_intra + ζ_inter + ζ_noise))`.
///
/// A user sitting on Fejér zeros of every beam (`K_{T,Σm} = 0`) gets zero.
pub fn lower_bound_rate<T: Real>(inputs: &BoundInputs<T>) -> Result<(T, BoundComponents<T>)> {
    let parts = bound_components(inputs)?;
    if !(inputs.kernel_sum_user > T::zero()) {
        return Ok((T::zero(), parts));
    }
    let signal = inputs.user_power * inputs.rho * inputs.rho * inputs.array_gain_sqr;
    let denom = parts.zeta_intra + parts.zeta_inter + parts.zeta_noise;
    Ok(((T::one() + signal / denom).log2(), parts))
}
