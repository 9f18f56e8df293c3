//! Analog beam steering, effective channels and the zero-forcing baseband
//! stage.
//!
//! Users are addressed by their index into the channel slice. The analog
//! precoder has one column per cluster, steered at the cluster's anchor
//! (its strongest user by path gain).

use ndarray::{ArrayView1, Axis};
use num_complex::Complex;
use num_traits::Zero;

use crate::channel::{fejer_correlation, steering_vector, SinglePathChannel};
use crate::error::{Error, Result};
use crate::linalg::{gram, hermitian_condition, inner, norm, CMatrix, CVector, Lu};
use crate::power::ClusterPlan;
use crate::scalar::Real;

/// `T_BS x N` analog precoder whose column `n` is the BS steering vector of
/// cluster `n`'s anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogPrecoder<T: Real> {
    matrix: CMatrix<T>,
    anchor_aods: Vec<T>,
}

impl<T: Real> AnalogPrecoder<T> {
    /// Wraps an arbitrary matrix; `anchor_aods` are the normalised AoDs the
    /// columns are meant to point at. No modulus check is made here, see
    /// [`power_constraint_check`].
    pub fn from_matrix(matrix: CMatrix<T>, anchor_aods: Vec<T>) -> Result<Self> {
        if matrix.ncols() != anchor_aods.len() {
            return Err(Error::Dimension {
                context: "analog precoder columns vs anchor angles",
                expected: matrix.ncols(),
                found: anchor_aods.len(),
            });
        }
        Ok(Self { matrix, anchor_aods })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn num_antennas(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_beams(&self) -> usize {
        self.matrix.ncols()
    }

    /// Normalised AoDs of the cluster anchors, in cluster order.
    pub fn anchor_aods(&self) -> &[T] {
        &self.anchor_aods
    }

    pub fn column(&self, n: usize) -> ArrayView1<'_, Complex<T>> {
        self.matrix.column(n)
    }
}

/// Receive combiner `w = a_MU(aoa)` of one user.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogCombiner<T: Real> {
    pub vector: CVector<T>,
}

/// Matched combiners for every user and the anchor-steered RF precoder.
pub fn design_analog_stage<T: Real>(
    channels: &[SinglePathChannel<T>],
    plan: &ClusterPlan,
) -> Result<(AnalogPrecoder<T>, Vec<AnalogCombiner<T>>)> {
    let anchors = plan.first_users();
    if anchors.is_empty() {
        return Err(Error::Config("at least one cluster is required".into()));
    }
    for (n, cluster) in plan.assignments().iter().enumerate() {
        if cluster.is_empty() {
            return Err(Error::Config(format!("cluster {n} has no users")));
        }
    }
    if let Some(&bad) = plan.assignments().iter().flatten().find(|&&u| u >= channels.len()) {
        return Err(Error::Config(format!(
            "user {bad} referenced by the cluster plan but only {} channels exist",
            channels.len()
        )));
    }
    let bs = channels[anchors[0]].bs_array;
    if let Some(ch) = channels.iter().find(|c| c.bs_array.num_elements() != bs.num_elements()) {
        return Err(Error::Dimension {
            context: "BS array size shared by every channel",
            expected: bs.num_elements(),
            found: ch.bs_array.num_elements(),
        });
    }
    let mut matrix = CMatrix::<T>::zeros((bs.num_elements(), anchors.len()));
    for (n, &u) in anchors.iter().enumerate() {
        matrix.column_mut(n).assign(&steering_vector(&channels[u].aod, &bs));
    }
    let anchor_aods = anchors.iter().map(|&u| channels[u].aod.normalized()).collect();
    let combiners = channels
        .iter()
        .map(|ch| AnalogCombiner {
            vector: ch.mu_steering(),
        })
        .collect();
    Ok((AnalogPrecoder { matrix, anchor_aods }, combiners))
}

/// Per-user effective channels `h̄* = w* H F_RF`, stored as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannelSet<T: Real> {
    rows: Vec<CVector<T>>,
    norms: Vec<T>,
}

impl<T: Real> EffectiveChannelSet<T> {
    pub fn from_rows(rows: Vec<CVector<T>>) -> Self {
        let norms = rows.iter().map(|r| norm(r.view())).collect();
        Self { rows, norms }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The row vector `h̄*` of user `u`.
    pub fn row(&self, u: usize) -> ArrayView1<'_, Complex<T>> {
        self.rows[u].view()
    }

    /// The column vector `h̄` of user `u`.
    pub fn vector(&self, u: usize) -> CVector<T> {
        self.rows[u].mapv(|z| z.conj())
    }

    pub fn norm(&self, u: usize) -> T {
        self.norms[u]
    }

    pub fn norms(&self) -> &[T] {
        &self.norms
    }
}

/// Computes `w* H F_RF` for every user.
pub fn effective_channels<T: Real>(
    channels: &[SinglePathChannel<T>],
    precoder: &AnalogPrecoder<T>,
    combiners: &[AnalogCombiner<T>],
) -> Result<EffectiveChannelSet<T>> {
    if combiners.len() != channels.len() {
        return Err(Error::Dimension {
            context: "one combiner per user",
            expected: channels.len(),
            found: combiners.len(),
        });
    }
    let mut rows = Vec::with_capacity(channels.len());
    for (ch, w) in channels.iter().zip(combiners) {
        let h = ch.channel_matrix();
        if h.ncols() != precoder.num_antennas() {
            return Err(Error::Dimension {
                context: "channel columns vs RF precoder rows",
                expected: precoder.num_antennas(),
                found: h.ncols(),
            });
        }
        if h.nrows() != w.vector.len() {
            return Err(Error::Dimension {
                context: "channel rows vs combiner length",
                expected: h.nrows(),
                found: w.vector.len(),
            });
        }
        let w_h = w.vector.mapv(|z| z.conj());
        rows.push(w_h.dot(&h).dot(precoder.matrix()));
    }
    Ok(EffectiveChannelSet::from_rows(rows))
}

/// Closed-form `‖h̄‖² = T_BS T_MU |β|² Σ_ℓ K(φ_ℓ1 − φ)` for a matched combiner.
pub fn effective_norm_sqr_closed_form<T: Real>(channel: &SinglePathChannel<T>, anchor_aods: &[T]) -> T {
    let t_bs = channel.bs_array.num_elements();
    let t_mu = channel.mu_array.num_elements();
    let phi = channel.aod.normalized();
    let kernel: T = anchor_aods.iter().map(|&a| fejer_correlation(a - phi, t_bs)).sum();
    T::lit((t_bs * t_mu) as f64) * channel.beta().norm_sqr() * kernel
}

/// Zero-forcing baseband precoder `F_BB` (`N x N`) and the analytic `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandPrecoder<T: Real> {
    matrix: CMatrix<T>,
    lambda_diag: Vec<T>,
}

impl<T: Real> BasebandPrecoder<T> {
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// `Λ_nn = sqrt(T_BS T_MU / (F_RF* F_RF)^{-1}_nn) |β_n1|`, the gain each
    /// anchor sees through its own normalised ZF column.
    pub fn lambda_diag(&self) -> &[T] {
        &self.lambda_diag
    }

    pub fn column(&self, n: usize) -> ArrayView1<'_, Complex<T>> {
        self.matrix.column(n)
    }

    /// `F_BB` with column `n` removed.
    pub fn without_column(&self, n: usize) -> CMatrix<T> {
        let keep: Vec<usize> = (0..self.matrix.ncols()).filter(|&j| j != n).collect();
        self.matrix.select(Axis(1), &keep)
    }
}

/// Inverts the anchors' effective-channel matrix and normalises every
/// column so that `‖F_RF f^n‖ = 1`.
///
/// `anchors[n]` is the user steering beam `n`. Fails with
/// [`Error::SingularClustering`] when `cond(H̄ H̄*)` exceeds the precision's
/// threshold.
pub fn zero_forcing_precoder<T: Real>(
    effective: &EffectiveChannelSet<T>,
    analog: &AnalogPrecoder<T>,
    anchors: &[usize],
    channels: &[SinglePathChannel<T>],
) -> Result<BasebandPrecoder<T>> {
    let n = analog.num_beams();
    if anchors.len() != n {
        return Err(Error::Dimension {
            context: "one anchor per RF beam",
            expected: n,
            found: anchors.len(),
        });
    }
    let mut g = CMatrix::<T>::zeros((n, n));
    for (i, &u) in anchors.iter().enumerate() {
        let row = effective.row(u);
        if row.len() != n {
            return Err(Error::Dimension {
                context: "effective channel length vs number of beams",
                expected: n,
                found: row.len(),
            });
        }
        g.row_mut(i).assign(&row);
    }
    let ggh = g.dot(&crate::linalg::adjoint(g.view()));
    let condition = hermitian_condition(ggh.view())?;
    let singular = |condition: T| {
        let (first, second) = most_correlated_pair(&g);
        Error::SingularClustering {
            first,
            second,
            condition: condition.to_f64().unwrap_or(f64::INFINITY),
        }
    };
    if !(condition <= T::lit(T::MAX_CONDITION)) {
        return Err(singular(condition));
    }
    let mut matrix = Lu::new(g.view()).map_err(|_| singular(T::infinity()))?.inverse()?;
    for j in 0..n {
        let power = norm(analog.matrix().dot(&matrix.column(j)).view());
        if !(power > T::zero()) || !power.is_finite() {
            return Err(singular(T::infinity()));
        }
        matrix.column_mut(j).mapv_inplace(|z| z / power);
    }
    let inv_gram = Lu::new(gram(analog.matrix().view()).view())
        .map_err(|_| singular(T::infinity()))?
        .inverse()?;
    let lambda_diag = anchors
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let ch = &channels[u];
            let tt = T::lit((ch.bs_array.num_elements() * ch.mu_array.num_elements()) as f64);
            (tt / inv_gram[[i, i]].re).sqrt() * ch.beta().norm()
        })
        .collect();
    Ok(BasebandPrecoder { matrix, lambda_diag })
}

/// Cluster pair whose anchor effective channels have the largest normalised
/// correlation; ties resolve to the lexicographically smallest pair.
fn most_correlated_pair<T: Real>(g: &CMatrix<T>) -> (usize, usize) {
    let n = g.nrows();
    let mut best = (0, n.min(2).saturating_sub(1), -T::one());
    for i in 0..n {
        for j in (i + 1)..n {
            let (ri, rj) = (g.row(i), g.row(j));
            let (ni, nj) = (norm(ri), norm(rj));
            let c = if ni > T::zero() && nj > T::zero() {
                inner(ri, rj).norm() / (ni * nj)
            } else {
                T::one()
            };
            if c > best.2 {
                best = (i, j, c);
            }
        }
    }
    (best.0, best.1)
}

/// Transmit-side constraint diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport<T: Real> {
    /// `‖F_RF F_BB‖_F²`; equals `N` for a correctly normalised precoder.
    pub frobenius_sqr: T,
    /// Largest `| |F_RF(i, j)| - 1/sqrt(T_BS) |`.
    pub max_modulus_deviation: T,
    /// `‖F_RF f^n‖` per beam.
    pub column_norms: Vec<T>,
}

impl<T: Real> PowerReport<T> {
    pub fn satisfied(&self, tolerance: T) -> bool {
        let n = T::lit(self.column_norms.len() as f64);
        (self.frobenius_sqr - n).abs() <= tolerance * n.max(T::one())
            && self.max_modulus_deviation <= tolerance
            && self.column_norms.iter().all(|&c| (c - T::one()).abs() <= tolerance)
    }
}

pub fn power_constraint_check<T: Real>(analog: &AnalogPrecoder<T>, baseband: &BasebandPrecoder<T>) -> PowerReport<T> {
    let product = analog.matrix().dot(baseband.matrix());
    let target = T::one() / T::lit(analog.num_antennas() as f64).sqrt();
    let max_modulus_deviation = analog
        .matrix()
        .iter()
        .map(|z| (z.norm() - target).abs())
        .fold(T::zero(), T::max);
    let column_norms: Vec<T> = product.axis_iter(Axis(1)).map(norm).collect();
    PowerReport {
        frobenius_sqr: column_norms.iter().map(|&c| c * c).sum(),
        max_modulus_deviation,
        column_norms,
    }
}

/// `|h̄* f^ℓ|²` for every beam `ℓ`.
pub fn beam_gains<T: Real>(row: ArrayView1<'_, Complex<T>>, baseband: &BasebandPrecoder<T>) -> Vec<T> {
    baseband
        .matrix()
        .axis_iter(Axis(1))
        .map(|f| {
            row.iter()
                .zip(f.iter())
                .fold(Complex::<T>::zero(), |acc, (h, x)| acc + *h * *x)
                .norm_sqr()
        })
        .collect()
}
