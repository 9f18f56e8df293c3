//! Dense complex linear algebra for the small matrices the precoder needs.
//!
//! Everything here works on `ndarray` containers of `Complex<T>`. Matrices
//! are at most `T_BS x N` with `N` the number of clusters, so plain
//! O(n^3) kernels are adequate.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type CVector<T> = Array1<Complex<T>>;
pub type CMatrix<T> = Array2<Complex<T>>;

/// Hermitian inner product `a^H b`.
pub fn inner<T: Real>(a: ArrayView1<'_, Complex<T>>, b: ArrayView1<'_, Complex<T>>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

/// Euclidean norm of a complex vector.
pub fn norm<T: Real>(v: ArrayView1<'_, Complex<T>>) -> T {
    norm_sqr(v).sqrt()
}

pub fn norm_sqr<T: Real>(v: ArrayView1<'_, Complex<T>>) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Squared Frobenius norm.
pub fn frobenius_sqr<T: Real>(m: ArrayView2<'_, Complex<T>>) -> T {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Conjugate transpose `M^H`.
pub fn adjoint<T: Real>(m: ArrayView2<'_, Complex<T>>) -> CMatrix<T> {
    m.t().mapv(|z| z.conj())
}

/// Gram matrix `M^H M`.
pub fn gram<T: Real>(m: ArrayView2<'_, Complex<T>>) -> CMatrix<T> {
    adjoint(m).dot(&m)
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    Array2::from_diag_elem(n, Complex::one())
}

/// LU factorisation with partial (row) pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    factors: CMatrix<T>,
    pivots: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Factors a square matrix. Fails when a pivot vanishes exactly.
    pub fn new(a: ArrayView2<'_, Complex<T>>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension {
                context: "LU factorisation (square matrix)",
                expected: n,
                found: a.ncols(),
            });
        }
        let mut lu = a.to_owned();
        let mut pivots: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) =
                (k..n)
                    .map(|i| (i, lu[[i, k]].norm()))
                    .fold((k, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best == T::zero() {
                return Err(Error::Domain(format!("matrix is singular at column {k}")));
            }
            if p != k {
                for j in 0..n {
                    lu.swap([k, j], [p, j]);
                }
                pivots.swap(k, p);
            }
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let factor = lu[[i, k]] / pivot;
                lu[[i, k]] = factor;
                for j in (k + 1)..n {
                    let u = lu[[k, j]];
                    lu[[i, j]] -= factor * u;
                }
            }
        }
        Ok(Self { factors: lu, pivots })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, rhs: ArrayView2<'_, Complex<T>>) -> Result<CMatrix<T>> {
        let n = self.dim();
        if rhs.nrows() != n {
            return Err(Error::Dimension {
                context: "LU solve (right-hand side rows)",
                expected: n,
                found: rhs.nrows(),
            });
        }
        let mut x = CMatrix::<T>::zeros(rhs.raw_dim());
        for (col, mut out) in rhs.axis_iter(Axis(1)).zip(x.axis_iter_mut(Axis(1))) {
            let mut y: Vec<Complex<T>> = self.pivots.iter().map(|&p| col[p]).collect();
            for i in 0..n {
                for j in 0..i {
                    let l = self.factors[[i, j]];
                    let yj = y[j];
                    y[i] -= l * yj;
                }
            }
            for i in (0..n).rev() {
                for j in (i + 1)..n {
                    let u = self.factors[[i, j]];
                    let yj = y[j];
                    y[i] -= u * yj;
                }
                y[i] /= self.factors[[i, i]];
            }
            for (o, v) in out.iter_mut().zip(y) {
                *o = v;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix<T>> {
        self.solve(identity::<T>(self.dim()).view())
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Cyclic Jacobi: each rotation first removes the phase of the pivot
/// element, then applies the real symmetric rotation that annihilates it.
/// Only the Hermitian part of the input is used.
pub fn hermitian_eigenvalues<T: Real>(m: ArrayView2<'_, Complex<T>>) -> Result<Vec<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension {
            context: "Hermitian eigenvalues (square matrix)",
            expected: n,
            found: m.ncols(),
        });
    }
    let half = T::lit(0.5);
    let mut a = CMatrix::<T>::from_shape_fn((n, n), |(i, j)| (m[[i, j]] + m[[j, i]].conj()) * half);
    let scale = frobenius_sqr(a.view());
    let eps = T::epsilon();
    for _sweep in 0..64 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]].norm_sqr())
            .sum();
        if off <= eps * eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let magnitude = apq.norm();
                if magnitude == T::zero() {
                    continue;
                }
                let phase = apq / magnitude;
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let theta = (aqq - app) / (magnitude + magnitude);
                let t = if theta == T::zero() {
                    T::one()
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                let u_pp = Complex::new(c, T::zero());
                let u_pq = Complex::new(s, T::zero());
                let u_qp = phase.conj() * (-s);
                let u_qq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * u_pp + akq * u_qp;
                    a[[k, q]] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[[q, k]] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[[p, q]] = Complex::zero();
                a[[q, p]] = Complex::zero();
                a[[p, p]] = Complex::new(a[[p, p]].re, T::zero());
                a[[q, q]] = Complex::new(a[[q, q]].re, T::zero());
            }
        }
    }
    let mut values: Vec<T> = (0..n).map(|i| a[[i, i]].re).collect();
    values.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(values)
}

/// Ratio of the extreme eigenvalues of a Hermitian positive semidefinite
/// matrix; infinite when the smallest eigenvalue is not positive.
pub fn hermitian_condition<T: Real>(m: ArrayView2<'_, Complex<T>>) -> Result<T> {
    let values = hermitian_eigenvalues(m)?;
    match (values.first(), values.last()) {
        (Some(&lo), Some(&hi)) if lo > T::zero() => Ok(hi / lo),
        (Some(_), Some(_)) => Ok(T::infinity()),
        _ => Ok(T::one()),
    }
}
