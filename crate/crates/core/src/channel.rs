//! Uniform linear arrays, single-path mmWave channels and the Fejér kernel.
//!
//! Angles enter either as physical radians in `[-pi/2, pi/2]` or in the
//! normalised form `2 (d / lambda) sin(theta)`, which is what the array
//! response depends on. With half-wavelength spacing the normalised angle
//! covers exactly `[-1, 1]`.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::scalar::Real;

/// Element count and spacing (in wavelengths) of a uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry<T: Real> {
    num_elements: usize,
    spacing_ratio: T,
}

impl<T: Real> ArrayGeometry<T> {
    pub fn new(num_elements: usize, spacing_ratio: T) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::Domain("array needs at least one element".into()));
        }
        if !(spacing_ratio > T::zero()) || !spacing_ratio.is_finite() {
            return Err(Error::Domain(format!(
                "antenna spacing ratio must be positive, got {spacing_ratio}"
            )));
        }
        Ok(Self {
            num_elements,
            spacing_ratio,
        })
    }

    /// Half-wavelength ULA.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, T::lit(0.5))
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_ratio(&self) -> T {
        self.spacing_ratio
    }
}

/// `2 * spacing_ratio * sin(physical_rad)`.
pub fn normalized_angle<T: Real>(physical_rad: T, spacing_ratio: T) -> Result<T> {
    let limit = T::FRAC_PI_2() * (T::one() + T::lit(4.0) * T::epsilon());
    if !physical_rad.is_finite() || physical_rad.abs() > limit {
        return Err(Error::Domain(format!(
            "physical angle {physical_rad} rad outside [-pi/2, pi/2]"
        )));
    }
    Ok((spacing_ratio + spacing_ratio) * physical_rad.sin())
}

/// An angle of arrival or departure in both parameterisations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSpec<T: Real> {
    physical_rad: T,
    normalized: T,
}

impl<T: Real> AngleSpec<T> {
    pub fn from_physical(physical_rad: T, spacing_ratio: T) -> Result<Self> {
        let normalized = normalized_angle(physical_rad, spacing_ratio)?;
        if normalized.abs() > T::one() + T::lit(4.0) * T::epsilon() {
            return Err(Error::Domain(format!(
                "normalised angle {normalized} outside [-1, 1] (spacing ratio {spacing_ratio})"
            )));
        }
        Ok(Self {
            physical_rad,
            normalized: normalized.max(-T::one()).min(T::one()),
        })
    }

    pub fn from_degrees(degrees: T, spacing_ratio: T) -> Result<Self> {
        Self::from_physical(degrees.to_radians(), spacing_ratio)
    }

    /// From a normalised angle; the physical angle assumes half-wavelength
    /// spacing.
    pub fn from_normalized(normalized: T) -> Result<Self> {
        if !normalized.is_finite() || normalized.abs() > T::one() {
            return Err(Error::Domain(format!("normalised angle {normalized} outside [-1, 1]")));
        }
        Ok(Self {
            physical_rad: normalized.asin(),
            normalized,
        })
    }

    pub fn physical_rad(&self) -> T {
        self.physical_rad
    }

    pub fn normalized(&self) -> T {
        self.normalized
    }
}

/// ULA response `(1/sqrt(T)) [1, e^{-j pi v}, ..., e^{-j pi (T-1) v}]` for
/// the normalised angle `v`.
pub fn steering_vector_normalized<T: Real>(normalized: T, num_elements: usize) -> CVector<T> {
    let amplitude = T::one() / T::lit(num_elements as f64).sqrt();
    CVector::from_shape_fn(num_elements, |k| {
        let phase = -T::PI() * T::lit(k as f64) * normalized;
        Complex::from_polar(amplitude, phase)
    })
}

pub fn steering_vector<T: Real>(angle: &AngleSpec<T>, geometry: &ArrayGeometry<T>) -> CVector<T> {
    steering_vector_normalized(angle.normalized(), geometry.num_elements())
}

/// Fejér kernel of order `t`: `|a^H(v) a(v + delta)|^2`.
///
/// `(1/t^2) sin^2(pi t delta / 2) / sin^2(pi delta / 2)`; equal to one at
/// multiples of 2.
pub fn fejer_correlation<T: Real>(delta: T, t: usize) -> T {
    assert!(t >= 1, "Fejér kernel order must be positive");
    let half = T::FRAC_PI_2() * delta;
    let denom = half.sin();
    if denom.abs() < T::lit(T::KERNEL_SINGULARITY) {
        return T::one();
    }
    let order = T::lit(t as f64);
    let ratio = (order * half).sin() / (order * denom);
    (ratio * ratio).min(T::one())
}

/// Complex path gain `beta = g * 10^(large_scale_db / 20)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGain<T: Real> {
    small_scale: Complex<T>,
    large_scale_db: T,
}

impl<T: Real> PathGain<T> {
    pub fn new(small_scale: Complex<T>, large_scale_db: T) -> Self {
        Self {
            small_scale,
            large_scale_db,
        }
    }

    /// Large-scale term `D^{-nu}` from a distance in meters and a path-loss
    /// exponent.
    pub fn from_distance(small_scale: Complex<T>, distance_m: T, exponent: T) -> Result<Self> {
        if !(distance_m > T::zero()) {
            return Err(Error::Domain(format!("distance must be positive, got {distance_m}")));
        }
        let db = -T::lit(10.0) * exponent * distance_m.log10();
        Ok(Self::new(small_scale, db))
    }

    pub fn small_scale(&self) -> Complex<T> {
        self.small_scale
    }

    pub fn large_scale_db(&self) -> T {
        self.large_scale_db
    }

    /// Amplitude factor `10^(dB / 20)`.
    pub fn large_scale_amplitude(&self) -> T {
        T::lit(10.0).powf(self.large_scale_db / T::lit(20.0))
    }

    pub fn beta(&self) -> Complex<T> {
        self.small_scale * self.large_scale_amplitude()
    }

    pub fn magnitude(&self) -> T {
        self.beta().norm()
    }
}

/// Rank-one channel `sqrt(T_BS T_MU) beta a_MU(aoa) a_BS(aod)^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePathChannel<T: Real> {
    pub aoa: AngleSpec<T>,
    pub aod: AngleSpec<T>,
    pub gain: PathGain<T>,
    pub bs_array: ArrayGeometry<T>,
    pub mu_array: ArrayGeometry<T>,
}

impl<T: Real> SinglePathChannel<T> {
    pub fn new(
        aoa: AngleSpec<T>,
        aod: AngleSpec<T>,
        gain: PathGain<T>,
        bs_array: ArrayGeometry<T>,
        mu_array: ArrayGeometry<T>,
    ) -> Self {
        Self {
            aoa,
            aod,
            gain,
            bs_array,
            mu_array,
        }
    }

    pub fn beta(&self) -> Complex<T> {
        self.gain.beta()
    }

    /// `sqrt(T_BS * T_MU)`, the full array gain of a matched link.
    pub fn array_gain(&self) -> T {
        T::lit((self.bs_array.num_elements() * self.mu_array.num_elements()) as f64).sqrt()
    }

    /// BS-side steering vector `a_BS(aod)`.
    pub fn bs_steering(&self) -> CVector<T> {
        steering_vector(&self.aod, &self.bs_array)
    }

    /// MU-side steering vector `a_MU(aoa)`.
    pub fn mu_steering(&self) -> CVector<T> {
        steering_vector(&self.aoa, &self.mu_array)
    }

    /// The `T_MU x T_BS` channel matrix.
    pub fn channel_matrix(&self) -> CMatrix<T> {
        let scale = self.beta() * self.array_gain();
        let a_mu = self.mu_steering();
        let a_bs = self.bs_steering();
        Array2::from_shape_fn((a_mu.len(), a_bs.len()), |(i, j)| scale * a_mu[i] * a_bs[j].conj())
    }
}
