//! Survival-based discrimination between the minimum of `i` draws and the
//! parent, and between the MinRSSU and SRS designs.
//!
//! ```text
//! D(F̄₍₁₎ᵢ : F̄) = −½ ∫ F̄ⁱ (F̄ⁱ − F̄) dx = −½ [∫ F̄²ⁱ − ∫ F̄ⁱ⁺¹]
//! D(MinRSSU : SRS) = −½ [∏ᵢ ∫ F̄²ⁱ − ∏ᵢ ∫ F̄ⁱ⁺¹]
//! ```
//!
//! For a support starting at zero, `∫ F̄ʲ = E X₍₁₎ⱼ`, the mean of the minimum
//! of `j` draws. The single-minimum form is invariant to the support origin;
//! the design form is evaluated with the survival integrals.

use crate::distributions::ContinuousDistribution;
use crate::error::{parameter, Result};
use crate::integrals::{residual_power_integral, truncated_support, Evaluated, Evaluation, Method};
use crate::math::powi;
use crate::quadrature::AdaptiveQuadrature;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminationValue {
    pub value: f64,
    /// Set size `i` or design size `m`.
    pub i_or_m: u32,
    pub method: Method,
}

/// Evaluator with a chosen evaluation route.
#[derive(Debug, Clone, Copy, Default)]
pub struct Discrimination {
    pub evaluation: Evaluation,
    pub quadrature: AdaptiveQuadrature,
}

impl Discrimination {
    pub fn quadrature_only() -> Self {
        Self {
            evaluation: Evaluation::Quadrature,
            quadrature: AdaptiveQuadrature::default(),
        }
    }

    fn power<D: ContinuousDistribution + ?Sized>(&self, d: &D, k: u32) -> Result<Evaluated> {
        residual_power_integral(d, k, d.support().lower, self.evaluation, &self.quadrature)
    }

    /// `−½ [∫ F̄²ⁱ − ∫ F̄ⁱ⁺¹]`.
    pub fn min_vs_parent<D: ContinuousDistribution + ?Sized>(&self, d: &D, i: u32) -> Result<DiscriminationValue> {
        if i == 0 {
            return Err(parameter!("set size i must be >= 1"));
        }
        let a = self.power(d, 2 * i)?;
        let b = self.power(d, i + 1)?;
        Ok(DiscriminationValue {
            value: -0.5 * (a.value - b.value),
            i_or_m: i,
            method: a.method.combine(b.method),
        })
    }

    /// `−½ [∏ᵢ ∫ F̄²ⁱ − ∏ᵢ ∫ F̄ⁱ⁺¹]`, `i = 1..m`.
    pub fn designs<D: ContinuousDistribution + ?Sized>(&self, d: &D, m: u32) -> Result<DiscriminationValue> {
        if m == 0 {
            return Err(parameter!("design size m must be >= 1"));
        }
        let mut method = Method::ClosedForm;
        let mut minrssu = 1.0;
        let mut srs = 1.0;
        for i in 1..=m {
            let a = self.power(d, 2 * i)?;
            let b = self.power(d, i + 1)?;
            method = method.combine(a.method).combine(b.method);
            minrssu *= a.value;
            srs *= b.value;
        }
        Ok(DiscriminationValue {
            value: -0.5 * (minrssu - srs),
            i_or_m: m,
            method,
        })
    }

    /// Direct quadrature of `−½ ∫ F̄ⁱ (F̄ⁱ − F̄)`, the defining integral.
    pub fn min_vs_parent_integral<D: ContinuousDistribution + ?Sized>(
        &self,
        d: &D,
        i: u32,
    ) -> Result<DiscriminationValue> {
        if i == 0 {
            return Err(parameter!("set size i must be >= 1"));
        }
        let (lo, hi) = truncated_support(d)?;
        let r = self.quadrature.integrate(
            |x| {
                let s = d.survival(x);
                let si = powi(s, i);
                si * (si - s)
            },
            lo,
            hi,
        )?;
        Ok(DiscriminationValue {
            value: -0.5 * r.value,
            i_or_m: i,
            method: Method::Quadrature,
        })
    }
}

pub fn d_min_vs_parent<D: ContinuousDistribution + ?Sized>(d: &D, i: u32) -> Result<DiscriminationValue> {
    Discrimination::default().min_vs_parent(d, i)
}

pub fn d_designs<D: ContinuousDistribution + ?Sized>(d: &D, m: u32) -> Result<DiscriminationValue> {
    Discrimination::default().designs(d, m)
}
