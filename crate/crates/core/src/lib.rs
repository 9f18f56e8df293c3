//! Hybrid-beamforming NOMA downlink for mmWave ULAs.
//!
//! One analog beam per cluster is steered at the cluster's strongest user,
//! a zero-forcing baseband stage removes inter-cluster interference at those
//! users, and the remaining users of each cluster share the beam through
//! power-domain superposition with successive interference cancellation.
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the scalar type.
//!
//! ```
//! use hbnoma_core::{AngleSpec, ArrayGeometry, PathGain, SinglePathChannel64, System64};
//! use num_complex::Complex;
//!
//! let bs = ArrayGeometry::half_wavelength(16).unwrap();
//! let mu = ArrayGeometry::half_wavelength(4).unwrap();
//! let user = |aod: f64, db: f64| {
//!     SinglePathChannel64::new(
//!         AngleSpec::from_degrees(0.0, 0.5).unwrap(),
//!         AngleSpec::from_degrees(aod, 0.5).unwrap(),
//!         PathGain::new(Complex::new(1.0, 0.0), db),
//!         bs,
//!         mu,
//!     )
//! };
//! let channels = vec![user(60.0, 0.0), user(55.0, -10.0), user(20.0, 0.0), user(10.0, -10.0)];
//! let system = System64::design(channels, &[vec![0, 1], vec![2, 3]], 10f64.powf(0.5), &[0.25, 0.75]).unwrap();
//! let users = system.evaluate().unwrap();
//! assert!(users[0][1].rho < 1.0);
//! assert!(users[0][0].breakdown.inter_interference < 1e-20);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod power;
pub mod precoding;
pub mod rate;
pub mod scalar;
pub mod system;

pub use bound::{
    bound_components, decompose_effective_channel, eta_factor, hermitian_correlation, kernel_sum, lambda_max_s,
    lower_bound_rate, BoundComponents, BoundInputs, CorrelationReport,
};
pub use channel::{
    fejer_correlation, normalized_angle, steering_vector, steering_vector_normalized, AngleSpec, ArrayGeometry,
    PathGain, SinglePathChannel,
};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use power::{
    allocate_power, default_fractions, order_by_gain, reorder_by_effective_norm, validate_fractions, ClusterPlan,
    OrderingBasis, PowerPlan,
};
pub use precoding::{
    beam_gains, design_analog_stage, effective_channels, effective_norm_sqr_closed_form, power_constraint_check,
    zero_forcing_precoder, AnalogCombiner, AnalogPrecoder, BasebandPrecoder, EffectiveChannelSet, PowerReport,
};
pub use rate::{rate_from_terms, sum_rate, RateBreakdown, RateContext};
pub use scalar::Real;
pub use system::{DesignedSystem, UserReport};

pub type SinglePathChannel64 = SinglePathChannel<f64>;
pub type AnalogPrecoder64 = AnalogPrecoder<f64>;
pub type BasebandPrecoder64 = BasebandPrecoder<f64>;
pub type EffectiveChannels64 = EffectiveChannelSet<f64>;
pub type PowerPlan64 = PowerPlan<f64>;
pub type RateBreakdown64 = RateBreakdown<f64>;
pub type System64 = DesignedSystem<f64>;

pub type SinglePathChannel32 = SinglePathChannel<f32>;
pub type AnalogPrecoder32 = AnalogPrecoder<f32>;
pub type BasebandPrecoder32 = BasebandPrecoder<f32>;
pub type EffectiveChannels32 = EffectiveChannelSet<f32>;
pub type PowerPlan32 = PowerPlan<f32>;
pub type RateBreakdown32 = RateBreakdown<f32>;
pub type System32 = DesignedSystem<f32>;
