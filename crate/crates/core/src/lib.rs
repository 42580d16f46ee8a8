//! Cumulative residual extropy (CREX) for simple random sampling and minimum
//! ranked set sampling with unequal set sizes (MinRSSU): theoretical measures,
//! samplers, empirical estimators and discrimination functionals.
//!
//! The crate is `no_std` and needs only `alloc`. Randomness comes from any
//! [`rand_core::RngCore`].
//!
//! ```
//! use crexlab_core::{crex, ParametricDistribution};
//!
//! let d: ParametricDistribution = "exp:rate=2".parse().unwrap();
//! assert!((crex(&d).unwrap().value + 0.125).abs() < 1e-15);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod discrimination;
pub mod distributions;
pub mod estimators;
pub mod integrals;
pub mod measures;
pub mod quadrature;
pub mod sampling;

pub use discrimination::{d_designs, d_min_vs_parent, Discrimination, DiscriminationValue};
pub use distributions::{
    mean_residual_life, min_order_statistic_mean, unit_interval, ContinuousDistribution, Family,
    ParametricDistribution, Support,
};
pub use error::{Error, Result};
pub use estimators::{
    asymptotic_variance_minrssu, asymptotic_variance_srs, lstat, lstat_adjusted, lstat_with_offset, psi, rmn, rn, vn,
    EmpiricalSurvival, EstimatorKind, EstimatorSpec, PsiFamily,
};
pub use integrals::{Evaluated, Evaluation, Method};
pub use math::CompensatedSum;
pub use measures::{
    crex, crex_min_order_stat, crex_minrssu_design, crex_srs_design, cumulative_extropy, dynamic_crex,
    dynamic_crex_designs, extropy, CrexValue, Measures,
};
pub use quadrature::{AdaptiveQuadrature, GaussLegendre, Integral};
pub use sampling::{draw_minrssu, draw_srs, pooled_order_statistics, MinRssuSample, OrderStatistics};
