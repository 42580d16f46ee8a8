//! Survival-power integrals shared by the measures, the discrimination
//! functionals and the order-statistic means.

use crate::distributions::ContinuousDistribution;
use crate::error::{divergence, domain, parameter, Result};
use crate::math::powi;
use crate::quadrature::AdaptiveQuadrature;

/// Upper-tail probability at which unbounded supports are truncated.
pub const TAIL_TRUNCATION: f64 = 1e-12;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    /// `Quadrature` if either side used quadrature.
    pub fn combine(self, other: Method) -> Method {
        if self == Method::Quadrature || other == Method::Quadrature {
            Method::Quadrature
        } else {
            Method::ClosedForm
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
        }
    }
}

/// Which evaluation route to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// Closed form when the distribution supplies one, quadrature otherwise.
    #[default]
    Auto,
    /// Always integrate numerically.
    Quadrature,
}

/// A number with its provenance and an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub method: Method,
    pub abs_error: f64,
}

impl Evaluated {
    pub fn closed_form(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            abs_error: 0.0,
        }
    }
}

/// `∫ₜ^∞ (F̄(x)/F̄(t))ᵏ dx` with `t` clamped up to the lower support endpoint.
///
/// With `t` at or below the support this is the plain `∫ F̄ᵏ` over the
/// support. Unbounded supports are truncated where the ratio falls to
/// [`TAIL_TRUNCATION`] and the distribution's tail bound is added to the
/// error estimate.
pub fn residual_power_integral<D: ContinuousDistribution + ?Sized>(
    d: &D,
    k: u32,
    t: f64,
    evaluation: Evaluation,
    quad: &AdaptiveQuadrature,
) -> Result<Evaluated> {
    if k == 0 {
        return Err(parameter!("survival power must be >= 1"));
    }
    if !t.is_finite() {
        return Err(domain!("t must be finite, got {t}"));
    }
    let support = d.support();
    let t = t.max(support.lower);
    let base = d.survival(t);
    if base <= 0.0 {
        return Err(domain!("survival at t={t} is zero"));
    }

    if evaluation == Evaluation::Auto {
        if let Some(v) = d.residual_power_closed_form(k, t) {
            return Ok(Evaluated::closed_form(v));
        }
    }

    let (upper, tail) = if support.is_bounded() {
        (support.upper, 0.0)
    } else {
        let x = d.inverse_survival(TAIL_TRUNCATION * base)?;
        let tail = d.residual_tail_bound(k, t, x);
        if !x.is_finite() || !tail.is_finite() {
            return Err(divergence!(
                "cannot bound the tail of the survival-power integral (k={k}, t={t})"
            ));
        }
        (x, tail)
    };
    let r = quad.integrate(|x| powi(d.survival(x) / base, k), t, upper)?;
    Ok(Evaluated {
        value: r.value,
        method: Method::Quadrature,
        abs_error: r.abs_error + tail,
    })
}

/// Support interval used for quadrature of functionals dominated by the
/// survival function: `[lower, upper]`, or `[lower, F̄⁻¹(1e-12)]` when the
/// support is unbounded.
pub fn truncated_support<D: ContinuousDistribution + ?Sized>(d: &D) -> Result<(f64, f64)> {
    let s = d.support();
    if s.is_bounded() {
        Ok((s.lower, s.upper))
    } else {
        let x = d.inverse_survival(TAIL_TRUNCATION)?;
        if !x.is_finite() {
            return Err(divergence!("cannot truncate unbounded support"));
        }
        Ok((s.lower, x))
    }
}
