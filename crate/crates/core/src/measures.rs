//! Theoretical information measures: extropy, cumulative residual extropy
//! (CREX), cumulative extropy, the dynamic (residual-life) CREX, and the
//! design-level CREX of simple random sampling (SRS) and minimum ranked set
//! sampling with unequal samples (MinRSSU).
//!
//! Every CREX-type quantity is `-½` times an integral of a power of the
//! survival function taken over the support of the variable, so all of them
//! reduce to [`residual_power_integral`]. For a distribution with survival
//! `F̄`:
//!
//! | measure                         | value                                   |
//! |---------------------------------|-----------------------------------------|
//! | `crex`                          | `-½ ∫ F̄²`                               |
//! | `crex_min_order_stat(i)`        | `-½ ∫ F̄²ⁱ`                              |
//! | `crex_minrssu_design(m)`        | `-½ ∏ᵢ₌₁..ₘ ∫ F̄²ⁱ`                      |
//! | `crex_srs_design(m)`            | `-½ (∫ F̄²)ᵐ`                            |
//! | `dynamic_crex(t)`               | `-½ ∫ₜ (F̄/F̄(t))²`                       |
//! | `dynamic_crex_designs(m, t)`    | the two design values with `∫ₜ (F̄/F̄(t))ᵏ` |
//!
//! Note the direction that falls out of these formulas: since `F̄²ⁱ ≤ F̄²`,
//! every MinRSSU factor is at most the SRS factor, so the MinRSSU design value
//! is never below the SRS one (e.g. uniform, m = 2: −1/30 ≥ −1/18).

use crate::distributions::ContinuousDistribution;
use crate::error::{divergence, parameter, Result};
use crate::integrals::{residual_power_integral, truncated_support, Evaluated, Evaluation, Method};
use crate::math::{exp, ln, powi};
use crate::quadrature::AdaptiveQuadrature;

/// Above this many factors design products are accumulated in log space.
const LOG_SPACE_FACTORS: u32 = 20;

/// A nonpositive information measure value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrexValue {
    pub value: f64,
    pub method: Method,
    pub abs_error_bound: f64,
}

impl CrexValue {
    fn neg_half(e: Evaluated) -> Self {
        Self {
            value: -0.5 * e.value,
            method: e.method,
            abs_error_bound: 0.5 * e.abs_error,
        }
    }
}

/// Evaluator for the measures with a chosen evaluation route.
#[derive(Debug, Clone, Copy, Default)]
pub struct Measures {
    pub evaluation: Evaluation,
    pub quadrature: AdaptiveQuadrature,
}

impl Measures {
    /// Evaluator that ignores closed forms and integrates everything.
    pub fn quadrature_only() -> Self {
        Self {
            evaluation: Evaluation::Quadrature,
            quadrature: AdaptiveQuadrature::default(),
        }
    }

    fn power<D: ContinuousDistribution + ?Sized>(&self, d: &D, k: u32, t: f64) -> Result<Evaluated> {
        residual_power_integral(d, k, t, self.evaluation, &self.quadrature)
    }

    /// Extropy `-½ ∫ f²`.
    pub fn extropy<D: ContinuousDistribution + ?Sized>(&self, d: &D) -> Result<CrexValue> {
        if self.evaluation == Evaluation::Auto {
            if let Some(cf) = d.squared_density_closed_form() {
                return cf.map(|v| CrexValue::neg_half(Evaluated::closed_form(v)));
            }
        }
        let (lo, hi) = truncated_support(d)?;
        let r = self.quadrature.integrate(
            |x| {
                let f = d.pdf(x);
                f * f
            },
            lo,
            hi,
        )?;
        // Tail past the truncation point, bounded by f(x_T)·F̄(x_T) for a
        // density that is nonincreasing in the upper tail.
        let tail = if d.support().is_bounded() {
            0.0
        } else {
            d.pdf(hi) * d.survival(hi)
        };
        Ok(CrexValue::neg_half(Evaluated {
            value: r.value,
            method: Method::Quadrature,
            abs_error: r.abs_error + tail,
        }))
    }

    /// Cumulative residual extropy `-½ ∫ F̄²`.
    pub fn crex<D: ContinuousDistribution + ?Sized>(&self, d: &D) -> Result<CrexValue> {
        self.crex_min_order_stat(d, 1)
    }

    /// Cumulative extropy `-½ ∫ F²` over the support; diverges unless the
    /// support is bounded above.
    pub fn cumulative_extropy<D: ContinuousDistribution + ?Sized>(&self, d: &D) -> Result<CrexValue> {
        if self.evaluation == Evaluation::Auto {
            if let Some(cf) = d.squared_cdf_closed_form() {
                return cf.map(|v| CrexValue::neg_half(Evaluated::closed_form(v)));
            }
        }
        let s = d.support();
        if !s.is_bounded() {
            return Err(divergence!("cumulative extropy diverges on an unbounded support"));
        }
        let r = self.quadrature.integrate(
            |x| {
                let c = d.cdf(x);
                c * c
            },
            s.lower,
            s.upper,
        )?;
        Ok(CrexValue::neg_half(Evaluated {
            value: r.value,
            method: Method::Quadrature,
            abs_error: r.abs_error,
        }))
    }

    /// Dynamic CREX `-½ ∫ₜ (F̄(x)/F̄(t))² dx`, the CREX of the residual life at `t`.
    pub fn dynamic_crex<D: ContinuousDistribution + ?Sized>(&self, d: &D, t: f64) -> Result<CrexValue> {
        self.power(d, 2, t).map(CrexValue::neg_half)
    }

    /// CREX of the minimum of `i` draws, `-½ ∫ F̄²ⁱ`.
    pub fn crex_min_order_stat<D: ContinuousDistribution + ?Sized>(&self, d: &D, i: u32) -> Result<CrexValue> {
        if i == 0 {
            return Err(parameter!("set size i must be >= 1"));
        }
        self.power(d, 2 * i, d.support().lower).map(CrexValue::neg_half)
    }

    /// MinRSSU design CREX `-½ ∏ᵢ₌₁..ₘ ∫ F̄²ⁱ`.
    pub fn crex_minrssu_design<D: ContinuousDistribution + ?Sized>(&self, d: &D, m: u32) -> Result<CrexValue> {
        self.minrssu_product(d, m, d.support().lower)
    }

    /// SRS design CREX `-½ (∫ F̄²)ᵐ`.
    pub fn crex_srs_design<D: ContinuousDistribution + ?Sized>(&self, d: &D, m: u32) -> Result<CrexValue> {
        self.srs_power(d, m, d.support().lower)
    }

    /// Dynamic design values at age `t`, returned as `(MinRSSU, SRS)`.
    ///
    /// The MinRSSU factor for set size `i` is `∫ₜ (F̄(x)/F̄(t))²ⁱ dx`, the
    /// residual CREX of the set minimum.
    pub fn dynamic_crex_designs<D: ContinuousDistribution + ?Sized>(
        &self,
        d: &D,
        m: u32,
        t: f64,
    ) -> Result<(CrexValue, CrexValue)> {
        Ok((self.minrssu_product(d, m, t)?, self.srs_power(d, m, t)?))
    }

    fn minrssu_product<D: ContinuousDistribution + ?Sized>(&self, d: &D, m: u32, t: f64) -> Result<CrexValue> {
        if m == 0 {
            return Err(parameter!("design size m must be >= 1"));
        }
        let factors = (1..=m).map(|i| self.power(d, 2 * i, t));
        product(factors, m > LOG_SPACE_FACTORS)
    }

    fn srs_power<D: ContinuousDistribution + ?Sized>(&self, d: &D, m: u32, t: f64) -> Result<CrexValue> {
        if m == 0 {
            return Err(parameter!("design size m must be >= 1"));
        }
        let base = self.power(d, 2, t)?;
        let mf = f64::from(m);
        let value = if m > LOG_SPACE_FACTORS {
            exp(mf * ln(base.value))
        } else {
            powi(base.value, m)
        };
        // d(Iᵐ) = m Iᵐ⁻¹ dI
        let err = if base.value > 0.0 {
            mf * value / base.value * base.abs_error
        } else {
            0.0
        };
        Ok(CrexValue {
            value: -0.5 * value,
            method: base.method,
            abs_error_bound: 0.5 * err,
        })
    }
}

/// `-½ ∏ factors`, with the relative errors of the factors summed.
fn product<I: Iterator<Item = Result<Evaluated>>>(factors: I, log_space: bool) -> Result<CrexValue> {
    let mut method = Method::ClosedForm;
    let mut log_sum = 0.0;
    let mut prod = 1.0;
    let mut rel_err = 0.0;
    let mut zero = false;
    for f in factors {
        let f = f?;
        method = method.combine(f.method);
        if f.value <= 0.0 {
            zero = true;
            continue;
        }
        rel_err += f.abs_error / f.value;
        if log_space {
            log_sum += ln(f.value);
        } else {
            prod *= f.value;
        }
    }
    let value = if zero {
        0.0
    } else if log_space {
        exp(log_sum)
    } else {
        prod
    };
    Ok(CrexValue {
        value: -0.5 * value,
        method,
        abs_error_bound: 0.5 * value * rel_err,
    })
}

pub fn extropy<D: ContinuousDistribution + ?Sized>(d: &D) -> Result<f64> {
    Measures::default().extropy(d).map(|v| v.value)
}

pub fn crex<D: ContinuousDistribution + ?Sized>(d: &D) -> Result<CrexValue> {
    Measures::default().crex(d)
}

pub fn cumulative_extropy<D: ContinuousDistribution + ?Sized>(d: &D) -> Result<f64> {
    Measures::default().cumulative_extropy(d).map(|v| v.value)
}

pub fn dynamic_crex<D: ContinuousDistribution + ?Sized>(d: &D, t: f64) -> Result<CrexValue> {
    Measures::default().dynamic_crex(d, t)
}

pub fn crex_min_order_stat<D: ContinuousDistribution + ?Sized>(d: &D, i: u32) -> Result<CrexValue> {
    Measures::default().crex_min_order_stat(d, i)
}

pub fn crex_minrssu_design<D: ContinuousDistribution + ?Sized>(d: &D, m: u32) -> Result<CrexValue> {
    Measures::default().crex_minrssu_design(d, m)
}

pub fn crex_srs_design<D: ContinuousDistribution + ?Sized>(d: &D, m: u32) -> Result<CrexValue> {
    Measures::default().crex_srs_design(d, m)
}

pub fn dynamic_crex_designs<D: ContinuousDistribution + ?Sized>(
    d: &D,
    m: u32,
    t: f64,
) -> Result<(CrexValue, CrexValue)> {
    Measures::default().dynamic_crex_designs(d, m, t)
}
