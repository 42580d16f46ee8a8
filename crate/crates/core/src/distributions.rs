//! Continuous lifetime distributions with exact analytic kernels.
//!
//! [`ContinuousDistribution`] is the interface the measures and estimators
//! consume. [`ParametricDistribution`] implements it for the four families
//! used throughout the crate and supplies closed forms for the residual
//! survival-power integrals `∫ₜ (F̄(x)/F̄(t))ᵏ dx` wherever one exists; every
//! other quantity falls back to quadrature.
//!
//! Distributions parse from a short textual form:
//!
//! ```text
//! spec   := family [":" param ("," param)*]
//! param  := key "=" number
//! family := "exp" | "unif" | "finite" | "powerbeta"
//! ```
//!
//! | family      | keys (default)        | survival on the support          |
//! |-------------|-----------------------|----------------------------------|
//! | `exp`       | `rate` (1)            | `exp(-rate·x)`, x ≥ 0            |
//! | `unif`      | `a` (0), `b` (1)      | `(b-x)/(b-a)`, a ≤ x ≤ b         |
//! | `finite`    | `a` (1), `b` (1)      | `(1-a·x)^b`, 0 ≤ x ≤ 1/a         |
//! | `powerbeta` | `alpha` (2)           | `1-x^alpha`, 0 ≤ x ≤ 1           |
//!
//! `exponential`, `uniform`, `finite-range` and `beta` are accepted as family
//! aliases and `lambda` as an alias for `rate`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_core::RngCore;

use crate::error::{domain, parse_err, Error, Result};
use crate::integrals::{residual_power_integral, Evaluation};
use crate::math::{exp, expm1, ln, ln_1p, powf, powi};
use crate::quadrature::AdaptiveQuadrature;

/// Closed interval `[lower, upper]` carrying the probability mass; `upper`
/// may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: f64,
    pub upper: f64,
}

impl Support {
    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// A continuous distribution on the real line.
///
/// Only `pdf`, `cdf`, `quantile` and `support` are required. The remaining
/// methods have generic defaults; override them to supply closed forms or
/// tail bounds so that quadrature on unbounded supports can be certified.
pub trait ContinuousDistribution {
    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// `inf{x : F(x) ≥ u}` for `u ∈ [0, 1]`.
    fn quantile(&self, u: f64) -> Result<f64>;

    /// `inf{x : F̄(x) ≤ p}`; accurate for tiny `p` when overridden.
    fn inverse_survival(&self, p: f64) -> Result<f64> {
        self.quantile(1.0 - p)
    }

    fn support(&self) -> Support;

    /// Closed form of `∫ₜ^∞ (F̄(x)/F̄(t))ᵏ dx` for `t` inside the support.
    fn residual_power_closed_form(&self, _k: u32, _t: f64) -> Option<f64> {
        None
    }

    /// Closed form of `∫ f(x)² dx`; `Some(Err(..))` when it is known to diverge.
    fn squared_density_closed_form(&self) -> Option<Result<f64>> {
        None
    }

    /// Closed form of `∫ F(x)² dx` over the support; `Some(Err(..))` when it
    /// is known to diverge.
    fn squared_cdf_closed_form(&self) -> Option<Result<f64>> {
        None
    }

    /// Upper bound on `∫ₓ^∞ (F̄(y)/F̄(t))ᵏ dy` for `x ≥ t`. Used to certify
    /// truncated quadrature on unbounded supports; `∞` means no bound is known.
    fn residual_tail_bound(&self, _k: u32, _t: f64, x: f64) -> f64 {
        if x >= self.support().upper {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Parametric family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Exponential with the given rate.
    Exponential { rate: f64 },
    /// Uniform on `[lower, upper]`.
    Uniform { lower: f64, upper: f64 },
    /// Survival `(1 - scale·x)^shape` on `[0, 1/scale]`.
    FiniteRange { scale: f64, shape: f64 },
    /// `Beta(alpha, 1)`: cdf `x^alpha` on `[0, 1]`.
    PowerBeta { alpha: f64 },
}

/// A validated member of one of the four parametric families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricDistribution {
    family: Family,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Parameter(alloc::format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl ParametricDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self {
            family: Family::Exponential {
                rate: positive("rate", rate)?,
            },
        })
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(Error::Parameter(alloc::format!(
                "uniform needs finite a < b, got a={lower}, b={upper}"
            )));
        }
        Ok(Self {
            family: Family::Uniform { lower, upper },
        })
    }

    pub fn finite_range(scale: f64, shape: f64) -> Result<Self> {
        Ok(Self {
            family: Family::FiniteRange {
                scale: positive("a", scale)?,
                shape: positive("b", shape)?,
            },
        })
    }

    pub fn power_beta(alpha: f64) -> Result<Self> {
        Ok(Self {
            family: Family::PowerBeta {
                alpha: positive("alpha", alpha)?,
            },
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Short family tag used in the textual form (`exp`, `unif`, ...).
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Exponential { .. } => "exp",
            Family::Uniform { .. } => "unif",
            Family::FiniteRange { .. } => "finite",
            Family::PowerBeta { .. } => "powerbeta",
        }
    }

    /// Parameter list in canonical `key=value` form, comma separated.
    pub fn params_string(&self) -> String {
        match self.family {
            Family::Exponential { rate } => alloc::format!("rate={rate}"),
            Family::Uniform { lower, upper } => alloc::format!("a={lower},b={upper}"),
            Family::FiniteRange { scale, shape } => alloc::format!("a={scale},b={shape}"),
            Family::PowerBeta { alpha } => alloc::format!("alpha={alpha}"),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Exponential { rate } => 1.0 / rate,
            Family::Uniform { lower, upper } => 0.5 * (lower + upper),
            Family::FiniteRange { scale, shape } => 1.0 / (scale * (shape + 1.0)),
            Family::PowerBeta { alpha } => alpha / (alpha + 1.0),
        }
    }

    /// Inverse-transform draws from a uniform stream.
    ///
    /// Each draw consumes exactly one `u64` from `rng`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }

    /// One inverse-transform draw.
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = unit_interval(rng);
        self.quantile_unchecked(u)
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        match self.family {
            Family::Exponential { rate } => {
                if u >= 1.0 {
                    f64::INFINITY
                } else {
                    -ln_1p(-u) / rate
                }
            }
            Family::Uniform { lower, upper } => lower + u * (upper - lower),
            Family::FiniteRange { scale, shape } => (1.0 - powf(1.0 - u, 1.0 / shape)) / scale,
            Family::PowerBeta { alpha } => powf(u, 1.0 / alpha),
        }
    }
}

/// A uniform variate on `[0, 1)` with 53 random bits.
pub fn unit_interval<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl ContinuousDistribution for ParametricDistribution {
    fn pdf(&self, x: f64) -> f64 {
        match self.family {
            Family::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * exp(-rate * x)
                }
            }
            Family::Uniform { lower, upper } => {
                if x < lower || x > upper {
                    0.0
                } else {
                    1.0 / (upper - lower)
                }
            }
            Family::FiniteRange { scale, shape } => {
                if x < 0.0 || x >= 1.0 / scale {
                    0.0
                } else {
                    scale * shape * powf(1.0 - scale * x, shape - 1.0)
                }
            }
            Family::PowerBeta { alpha } => {
                if x <= 0.0 || x > 1.0 {
                    if x == 0.0 && alpha == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    alpha * powf(x, alpha - 1.0)
                }
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.family {
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -expm1(-rate * x)
                }
            }
            Family::Uniform { lower, upper } => ((x - lower) / (upper - lower)).clamp(0.0, 1.0),
            Family::FiniteRange { .. } => 1.0 - self.survival(x),
            Family::PowerBeta { alpha } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    powf(x, alpha)
                }
            }
        }
    }

    fn survival(&self, x: f64) -> f64 {
        match self.family {
            Family::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    exp(-rate * x)
                }
            }
            Family::Uniform { lower, upper } => ((upper - x) / (upper - lower)).clamp(0.0, 1.0),
            Family::FiniteRange { scale, shape } => {
                if x <= 0.0 {
                    1.0
                } else if x >= 1.0 / scale {
                    0.0
                } else {
                    powf(1.0 - scale * x, shape)
                }
            }
            Family::PowerBeta { .. } => 1.0 - self.cdf(x),
        }
    }

    fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(domain!("quantile level must lie in [0, 1], got {u}"));
        }
        Ok(self.quantile_unchecked(u))
    }

    fn inverse_survival(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain!("survival level must lie in [0, 1], got {p}"));
        }
        Ok(match self.family {
            Family::Exponential { rate } => {
                if p == 0.0 {
                    f64::INFINITY
                } else {
                    -ln(p) / rate
                }
            }
            Family::Uniform { lower, upper } => upper - p * (upper - lower),
            Family::FiniteRange { scale, shape } => (1.0 - powf(p, 1.0 / shape)) / scale,
            Family::PowerBeta { alpha } => powf(1.0 - p, 1.0 / alpha),
        })
    }

    fn support(&self) -> Support {
        match self.family {
            Family::Exponential { .. } => Support {
                lower: 0.0,
                upper: f64::INFINITY,
            },
            Family::Uniform { lower, upper } => Support { lower, upper },
            Family::FiniteRange { scale, .. } => Support {
                lower: 0.0,
                upper: 1.0 / scale,
            },
            Family::PowerBeta { .. } => Support { lower: 0.0, upper: 1.0 },
        }
    }

    fn residual_power_closed_form(&self, k: u32, t: f64) -> Option<f64> {
        if k == 0 {
            return None;
        }
        let kf = f64::from(k);
        let support = self.support();
        let t = t.max(support.lower);
        if t >= support.upper {
            return None;
        }
        match self.family {
            Family::Exponential { rate } => Some(1.0 / (kf * rate)),
            Family::Uniform { upper, .. } => Some((upper - t) / (kf + 1.0)),
            Family::FiniteRange { scale, shape } => Some((1.0 - scale * t) / (scale * (kf * shape + 1.0))),
            // ∫₀¹ (1-x^α)^k dx = ∏_{j=1}^k jα/(jα+1); no elementary form for t > 0.
            Family::PowerBeta { alpha } => (t == 0.0).then(|| {
                (1..=k)
                    .map(|j| {
                        let ja = f64::from(j) * alpha;
                        ja / (ja + 1.0)
                    })
                    .product()
            }),
        }
    }

    fn squared_density_closed_form(&self) -> Option<Result<f64>> {
        Some(match self.family {
            Family::Exponential { rate } => Ok(0.5 * rate),
            Family::Uniform { lower, upper } => Ok(1.0 / (upper - lower)),
            Family::FiniteRange { scale, shape } => {
                if shape > 0.5 {
                    Ok(scale * shape * shape / (2.0 * shape - 1.0))
                } else {
                    Err(Error::Divergence(alloc::format!(
                        "finite-range density is not square integrable for b={shape} <= 1/2"
                    )))
                }
            }
            Family::PowerBeta { alpha } => {
                if alpha > 0.5 {
                    Ok(alpha * alpha / (2.0 * alpha - 1.0))
                } else {
                    Err(Error::Divergence(alloc::format!(
                        "power-beta density is not square integrable for alpha={alpha} <= 1/2"
                    )))
                }
            }
        })
    }

    fn squared_cdf_closed_form(&self) -> Option<Result<f64>> {
        Some(match self.family {
            Family::Exponential { .. } => Err(Error::Divergence(
                "cumulative extropy diverges on an unbounded support".to_string(),
            )),
            Family::Uniform { lower, upper } => Ok((upper - lower) / 3.0),
            Family::FiniteRange { scale, shape } => Ok((1.0 - 2.0 / (shape + 1.0) + 1.0 / (2.0 * shape + 1.0)) / scale),
            Family::PowerBeta { alpha } => Ok(1.0 / (2.0 * alpha + 1.0)),
        })
    }

    fn residual_tail_bound(&self, k: u32, t: f64, x: f64) -> f64 {
        match self.family {
            Family::Exponential { rate } => {
                let t = t.max(0.0);
                if x <= t {
                    return 1.0 / (f64::from(k) * rate);
                }
                powi(exp(-rate * (x - t)), k) / (f64::from(k) * rate)
            }
            _ => {
                if x >= self.support().upper {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// `E[X_(1)j]`, the mean of the minimum of `j` independent draws.
///
/// Computed as `lower + ∫ F̄(x)ʲ dx` over the support, so for supports starting
/// at zero this is the plain survival-power integral.
pub fn min_order_statistic_mean<D: ContinuousDistribution + ?Sized>(d: &D, j: u32) -> Result<f64> {
    min_order_statistic_mean_with(d, j, Evaluation::Auto, &AdaptiveQuadrature::default()).map(|e| e.value)
}

pub(crate) fn min_order_statistic_mean_with<D: ContinuousDistribution + ?Sized>(
    d: &D,
    j: u32,
    evaluation: Evaluation,
    quad: &AdaptiveQuadrature,
) -> Result<crate::integrals::Evaluated> {
    if j == 0 {
        return Err(Error::Parameter("sample size j must be >= 1".to_string()));
    }
    let lower = d.support().lower;
    let mut e = residual_power_integral(d, j, lower, evaluation, quad)?;
    e.value += lower;
    Ok(e)
}

/// Mean residual life `μ(t) = (1/F̄(t)) ∫ₜ^∞ F̄(x) dx`.
pub fn mean_residual_life<D: ContinuousDistribution + ?Sized>(d: &D, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(domain!("t must be finite, got {t}"));
    }
    let support = d.support();
    let head = (support.lower - t).max(0.0);
    let e = residual_power_integral(d, 1, t, Evaluation::Auto, &AdaptiveQuadrature::default())?;
    Ok(head + e.value)
}

impl fmt::Display for ParametricDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family_name(), self.params_string())
    }
}

impl FromStr for ParametricDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, params) = match s.split_once(':') {
            Some((f, p)) => (f.trim(), p.trim()),
            None => (s, ""),
        };
        let mut pairs: Vec<(String, f64)> = Vec::new();
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| parse_err!("expected key=value, got `{item}`"))?;
            let key = key.trim().to_ascii_lowercase();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| parse_err!("`{}` is not a number", value.trim()))?;
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(parse_err!("parameter `{key}` given twice"));
            }
            pairs.push((key, value));
        }

        let mut take = |names: &[&str], default: f64| -> f64 {
            match pairs.iter().position(|(k, _)| names.contains(&k.as_str())) {
                Some(i) => pairs.remove(i).1,
                None => default,
            }
        };

        let dist = match family.to_ascii_lowercase().as_str() {
            "exp" | "exponential" => {
                let rate = take(&["rate", "lambda"], 1.0);
                Self::exponential(rate)
            }
            "unif" | "uniform" => {
                let a = take(&["a"], 0.0);
                let b = take(&["b"], 1.0);
                Self::uniform(a, b)
            }
            "finite" | "finite-range" => {
                let a = take(&["a"], 1.0);
                let b = take(&["b"], 1.0);
                Self::finite_range(a, b)
            }
            "powerbeta" | "beta" => {
                let alpha = take(&["alpha"], 2.0);
                Self::power_beta(alpha)
            }
            other => return Err(parse_err!("unknown distribution family `{other}`")),
        }
        .map_err(|e| parse_err!("{s}: {e}"))?;

        if let Some((key, _)) = pairs.first() {
            return Err(parse_err!("unknown parameter `{key}` for family `{family}`"));
        }
        Ok(dist)
    }
}
