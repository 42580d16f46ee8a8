//! Empirical CREX estimators and the asymptotic variance functionals of the
//! L-statistic estimator.
//!
//! Two constructions are provided, each with an adjusted variant:
//!
//! * spacing estimators, `-½ Σₖ (X₍ₖ₊₁₎ − X₍ₖ₎)(1 − k/D)²` for `k = 1..n−1`, which
//!   integrate the squared empirical survival exactly when `D = n` (`V_n` on an
//!   SRS, `R_n` on pooled MinRSSU data) and use `D = n + m + w` for the
//!   adjusted `R_{m,n}`;
//! * L-statistics, `−(1/n) Σᵢ (1 − i/D) X₍ᵢ₎`, the plug-in of
//!   `ξJ(X) = −∫ x F̄(x) dF(x)`, with `D = n` or `D = n + ψ(m, w)`.
//!
//! Estimator choices parse from short strings:
//!
//! ```text
//! vn | rn | lstat
//! rmn:w=<int>
//! lstat_adj:family=<exp|unif|beta>,w=<int>
//! ```

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::distributions::ContinuousDistribution;
use crate::error::{domain, parameter, parse_err, Error, Result};
use crate::integrals::truncated_support;
use crate::math::{powi, CompensatedSum};
use crate::quadrature::{GaussLegendre, Integral};
use crate::sampling::{MinRssuSample, OrderStatistics};

/// Right-continuous empirical survival function, `1 − k/n` on `[X₍ₖ₎, X₍ₖ₊₁₎)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSurvival {
    order_stats: OrderStatistics,
}

impl EmpiricalSurvival {
    pub fn new(order_stats: OrderStatistics) -> Self {
        Self { order_stats }
    }

    pub fn order_statistics(&self) -> &OrderStatistics {
        &self.order_stats
    }

    /// `1 − #{X₍ₖ₎ ≤ x}/n`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.order_stats.len();
        if n == 0 {
            return f64::NAN;
        }
        let at_or_below = self.order_stats.partition_point(|&v| v <= x);
        1.0 - at_or_below as f64 / n as f64
    }

    /// `∫ F̂̄ₙ(x)ᵏ dx` from the smallest observation upward, by evaluating the
    /// step function on each gap.
    pub fn integrate_power(&self, k: u32) -> f64 {
        self.order_stats
            .windows(2)
            .map(|w| {
                let width = w[1] - w[0];
                if width == 0.0 {
                    0.0
                } else {
                    width * powi(self.eval(0.5 * (w[0] + w[1])), k)
                }
            })
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Which estimator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Spacing estimator on a simple random sample.
    Vn,
    /// Spacing estimator on pooled MinRSSU values.
    Rn,
    /// Spacing estimator with denominator `n + m + w`.
    Rmn,
    /// L-statistic `−(1/n) Σ (1 − i/n) Y₍ᵢ₎`.
    LStat,
    /// L-statistic with denominator `n + ψ(m, w)`.
    LStatAdjusted,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Vn => "vn",
            EstimatorKind::Rn => "rn",
            EstimatorKind::Rmn => "rmn",
            EstimatorKind::LStat => "lstat",
            EstimatorKind::LStatAdjusted => "lstat_adj",
        }
    }

    /// Whether the estimator is fed a simple random sample rather than MinRSSU data.
    pub fn uses_srs(&self) -> bool {
        matches!(self, EstimatorKind::Vn)
    }
}

/// Distribution-specific form of the L-statistic offset `ψ(m, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsiFamily {
    /// `5m − 4kₘ + w` with `(k₂, k₃, k₄, k₅) = (3, 2, 1, 0)`.
    ExponentialForm,
    /// `3m − (2kₘ + 1) + w` with `(k₂, k₃, k₄, k₅) = (−1, 0, 1, 2)`.
    UniformForm,
    /// `m − w`.
    BetaForm,
}

impl PsiFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PsiFamily::ExponentialForm => "exp",
            PsiFamily::UniformForm => "unif",
            PsiFamily::BetaForm => "beta",
        }
    }
}

impl FromStr for PsiFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exp" | "exponential" => Ok(PsiFamily::ExponentialForm),
            "unif" | "uniform" => Ok(PsiFamily::UniformForm),
            "beta" | "powerbeta" => Ok(PsiFamily::BetaForm),
            other => Err(parse_err!("unknown psi family `{other}` (expected exp, unif or beta)")),
        }
    }
}

/// The offset `ψ(m, w)` of the adjusted L-statistic.
pub fn psi(family: PsiFamily, m: usize, w: i64) -> Result<i64> {
    let k_m = |table: [i64; 4]| -> Result<i64> {
        if (2..=5).contains(&m) {
            Ok(table[m - 2])
        } else {
            Err(domain!(
                "psi family {} is defined for 2 <= m <= 5, got m={m}",
                family.name()
            ))
        }
    };
    let m_i = m as i64;
    match family {
        PsiFamily::ExponentialForm => Ok(5 * m_i - 4 * k_m([3, 2, 1, 0])? + w),
        PsiFamily::UniformForm => Ok(3 * m_i - (2 * k_m([-1, 0, 1, 2])? + 1) + w),
        PsiFamily::BetaForm => Ok(m_i - w),
    }
}

/// A fully specified estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EstimatorSpec {
    kind: EstimatorKind,
    w: Option<i64>,
    psi_family: Option<PsiFamily>,
}

impl EstimatorSpec {
    pub const VN: Self = Self::bare(EstimatorKind::Vn);
    pub const RN: Self = Self::bare(EstimatorKind::Rn);
    pub const LSTAT: Self = Self::bare(EstimatorKind::LStat);

    const fn bare(kind: EstimatorKind) -> Self {
        Self {
            kind,
            w: None,
            psi_family: None,
        }
    }

    pub fn rmn(w: i64) -> Self {
        Self {
            kind: EstimatorKind::Rmn,
            w: Some(w),
            psi_family: None,
        }
    }

    pub fn lstat_adjusted(family: PsiFamily, w: i64) -> Self {
        Self {
            kind: EstimatorKind::LStatAdjusted,
            w: Some(w),
            psi_family: Some(family),
        }
    }

    /// Checks the `w`/`ψ` requirements for `kind`.
    pub fn new(kind: EstimatorKind, w: Option<i64>, psi_family: Option<PsiFamily>) -> Result<Self> {
        let needs_w = matches!(kind, EstimatorKind::Rmn | EstimatorKind::LStatAdjusted);
        let needs_psi = kind == EstimatorKind::LStatAdjusted;
        if needs_w != w.is_some() {
            return Err(parameter!(
                "estimator {} {} a w value",
                kind.name(),
                if needs_w { "requires" } else { "does not take" }
            ));
        }
        if needs_psi != psi_family.is_some() {
            return Err(parameter!(
                "estimator {} {} a psi family",
                kind.name(),
                if needs_psi { "requires" } else { "does not take" }
            ));
        }
        Ok(Self { kind, w, psi_family })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn w(&self) -> Option<i64> {
        self.w
    }

    pub fn psi_family(&self) -> Option<PsiFamily> {
        self.psi_family
    }

    /// Estimator name without `w`, e.g. `rmn` or `lstat_adj:family=exp`.
    pub fn label(&self) -> String {
        match self.psi_family {
            Some(f) => alloc::format!("{}:family={}", self.kind.name(), f.name()),
            None => self.kind.name().to_string(),
        }
    }

    /// Inverse of [`label`](Self::label) plus a separate `w`.
    pub fn from_label(label: &str, w: Option<i64>) -> Result<Self> {
        let spec = match w {
            None => label.to_string(),
            Some(w) if label.contains(':') => alloc::format!("{label},w={w}"),
            Some(w) => alloc::format!("{label}:w={w}"),
        };
        spec.parse()
    }

    /// Evaluates the estimator on ascending observations drawn with `m` sets
    /// per cycle (`m` is ignored by the unadjusted estimators).
    pub fn evaluate(&self, order_stats: &OrderStatistics, m: usize) -> Result<f64> {
        let n = order_stats.len();
        match self.kind {
            EstimatorKind::Vn | EstimatorKind::Rn => vn(order_stats),
            EstimatorKind::Rmn => {
                let w = self.w.expect("validated");
                spacing_estimator(order_stats, n as i64 + m as i64 + w)
            }
            EstimatorKind::LStat => lstat(order_stats),
            EstimatorKind::LStatAdjusted => {
                let psi = psi(self.psi_family.expect("validated"), m, self.w.expect("validated"))?;
                lstat_with_offset(order_stats, psi)
            }
        }
    }

    /// Evaluates on a MinRSSU sample through its pooled order statistics.
    pub fn evaluate_minrssu(&self, sample: &MinRssuSample) -> Result<f64> {
        self.evaluate(&sample.pooled_order_statistics(), sample.m())
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.psi_family, self.w) {
            (Some(fam), Some(w)) => write!(f, "{}:family={},w={w}", self.kind.name(), fam.name()),
            (None, Some(w)) => write!(f, "{}:w={w}", self.kind.name()),
            _ => f.write_str(self.kind.name()),
        }
    }
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s, ""),
        };
        let kind = match name.to_ascii_lowercase().as_str() {
            "vn" => EstimatorKind::Vn,
            "rn" => EstimatorKind::Rn,
            "rmn" => EstimatorKind::Rmn,
            "lstat" => EstimatorKind::LStat,
            "lstat_adj" | "lstat-adj" => EstimatorKind::LStatAdjusted,
            other => return Err(parse_err!("unknown estimator `{other}`")),
        };
        let mut w = None;
        let mut family = None;
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| parse_err!("expected key=value, got `{item}`"))?;
            match key.trim().to_ascii_lowercase().as_str() {
                "w" if w.is_none() => {
                    w = Some(
                        value
                            .trim()
                            .parse::<i64>()
                            .map_err(|_| parse_err!("w must be an integer, got `{}`", value.trim()))?,
                    )
                }
                "family" | "psi" if family.is_none() => family = Some(value.parse::<PsiFamily>()?),
                other => return Err(parse_err!("unexpected or repeated parameter `{other}` in `{s}`")),
            }
        }
        Self::new(kind, w, family).map_err(|e| parse_err!("{s}: {e}"))
    }
}

fn spacing_estimator(os: &[f64], denominator: i64) -> Result<f64> {
    let n = os.len();
    if n < 2 {
        return Err(Error::SampleSize { needed: 2, got: n });
    }
    if denominator < n as i64 {
        return Err(parameter!(
            "denominator {denominator} makes the weight 1 - k/D nonpositive for k = n-1 = {}",
            n - 1
        ));
    }
    let d = denominator as f64;
    let sum = os
        .windows(2)
        .enumerate()
        .map(|(idx, w)| {
            let k = (idx + 1) as f64;
            let weight = 1.0 - k / d;
            (w[1] - w[0]) * weight * weight
        })
        .collect::<CompensatedSum>()
        .value();
    Ok(-0.5 * sum)
}

/// `V_n = −½ Σₖ₌₁..ₙ₋₁ (X₍ₖ₊₁₎ − X₍ₖ₎)(1 − k/n)²`, equal to `−½ ∫ F̂̄ₙ²`.
pub fn vn(sample: &OrderStatistics) -> Result<f64> {
    spacing_estimator(sample, sample.len() as i64)
}

/// `R_n`: [`vn`] applied to the pooled MinRSSU order statistics.
pub fn rn(s: &MinRssuSample) -> Result<f64> {
    vn(&s.pooled_order_statistics())
}

/// `R_{m,n}`: spacing estimator with weights `(1 − k/(n + m + w))²`.
pub fn rmn(s: &MinRssuSample, w: i64) -> Result<f64> {
    spacing_estimator(&s.pooled_order_statistics(), s.n() as i64 + s.m() as i64 + w)
}

/// L-statistic plug-in `−(1/n) Σᵢ (1 − i/n) X₍ᵢ₎` for nonnegative data.
pub fn lstat(sample: &OrderStatistics) -> Result<f64> {
    lstat_with_offset(sample, 0)
}

/// `−(1/n) Σᵢ (1 − i/(n + offset)) X₍ᵢ₎`.
///
/// Rejects `n + offset ≤ 0` and negative offsets, which would give negative
/// weights to the largest observations.
pub fn lstat_with_offset(sample: &OrderStatistics, offset: i64) -> Result<f64> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::SampleSize { needed: 1, got: 0 });
    }
    if sample[0] < 0.0 {
        return Err(domain!("L-statistic estimator needs nonnegative observations"));
    }
    let denominator = n as i64 + offset;
    if denominator <= 0 {
        return Err(parameter!("n + psi = {denominator} must be positive"));
    }
    if offset < 0 {
        return Err(parameter!(
            "psi = {offset} < 0 gives negative weights to the top {} order statistics",
            -offset
        ));
    }
    let d = denominator as f64;
    let sum = sample
        .iter()
        .enumerate()
        .map(|(idx, &y)| (1.0 - (idx + 1) as f64 / d) * y)
        .collect::<CompensatedSum>()
        .value();
    Ok(-sum / n as f64)
}

/// Adjusted L-statistic with offset `ψ(m, w)` on pooled MinRSSU data.
pub fn lstat_adjusted(s: &MinRssuSample, family: PsiFamily, w: i64) -> Result<f64> {
    let offset = psi(family, s.m(), w)?;
    lstat_with_offset(&s.pooled_order_statistics(), offset)
}

/// Nodes per axis for the variance double integrals; the half rule gives
/// the refinement check.
const VARIANCE_NODES: usize = 256;

/// Asymptotic variance of `√n(ξĴ − ξJ)` on an SRS:
/// `σ² = ∫∫ J(F(x))J(F(y))[F(x∧y) − F(x)F(y)] dx dy` with `J(u) = 1 − u`.
pub fn asymptotic_variance_srs<D: ContinuousDistribution + ?Sized>(d: &D) -> Result<Integral> {
    asymptotic_variance_minrssu(d, 1)
}

/// Asymptotic variance of the L-statistic on pooled MinRSSU data:
/// `∫∫ J(F̃(x))J(F̃(y))K(x, y) dx dy`, with `F̃ = (1/m) Σᵢ F₍₁₎ᵢ` and
/// `K(x, y) = (1/m) Σᵢ [F₍₁₎ᵢ(x∧y) − F₍₁₎ᵢ(x)F₍₁₎ᵢ(y)]`, `F₍₁₎ᵢ = 1 − F̄ⁱ`.
///
/// The kernel is symmetric and, for `x < y`, equals
/// `(1/m) Σᵢ F₍₁₎ᵢ(x) F̄ⁱ(y)`, so the integral is twice the integral over the
/// triangle `x < y`. That triangle is covered by a collapsed product
/// Gauss–Legendre grid (inner rule on `[x, upper]`), evaluated with
/// 256 and 128 nodes per axis; their difference is the error estimate.
pub fn asymptotic_variance_minrssu<D: ContinuousDistribution + ?Sized>(d: &D, m: usize) -> Result<Integral> {
    if m == 0 {
        return Err(parameter!("design size m must be >= 1"));
    }
    let (lo, hi) = truncated_support(d)?;
    let fine = triangle_rule(d, m, lo, hi, &GaussLegendre::new(VARIANCE_NODES));
    let coarse = triangle_rule(d, m, lo, hi, &GaussLegendre::new(VARIANCE_NODES / 2));
    if !fine.is_finite() {
        return Err(Error::Divergence("variance integrand is not finite".into()));
    }
    Ok(Integral {
        value: fine,
        abs_error: (fine - coarse).abs(),
    })
}

fn triangle_rule<D: ContinuousDistribution + ?Sized>(d: &D, m: usize, lo: f64, hi: f64, rule: &GaussLegendre) -> f64 {
    let mf = m as f64;
    // mixture survival J(F̃) = (1/m) Σ F̄ⁱ, plus the individual powers F̄ⁱ
    let powers = |x: f64| -> (Vec<f64>, f64) {
        let s = d.survival(x);
        let mut p = Vec::with_capacity(m);
        let mut acc = 1.0;
        for _ in 0..m {
            acc *= s;
            p.push(acc);
        }
        let mix = p.iter().sum::<f64>() / mf;
        (p, mix)
    };
    let mut outer = CompensatedSum::new();
    for (x, wx) in rule.mapped(lo, hi) {
        let (px, mix_x) = powers(x);
        let mut inner = CompensatedSum::new();
        for (y, wy) in rule.mapped(x, hi) {
            let (py, mix_y) = powers(y);
            let kernel: f64 = px.iter().zip(py.iter()).map(|(sx, sy)| (1.0 - sx) * sy).sum::<f64>() / mf;
            inner.add(wy * mix_y * kernel);
        }
        outer.add(wx * mix_x * inner.value());
    }
    2.0 * outer.value()
}
