//! Parametric loss laws and empirical samples.
//!
//! Every law is driven by its quantile function. The catalog families all
//! have closed-form quantiles; cdfs, densities and tail integrals are written
//! out analytically per family. The log families are `exp` of the Normal and
//! Logistic laws.
//!
//! | family | parameters | quantile `F⁻¹(p)` |
//! |---|---|---|
//! | Pareto | shape a, scale k | `k (1-p)^(-1/a)` |
//! | Weibull | scale λ, shape β | `λ (-ln(1-p))^(1/β)` |
//! | Normal | μ, σ | `μ + σ Φ⁻¹(p)` |
//! | Logistic | μ, s | `μ + s ln(p/(1-p))` |
//! | LogNormal | μ, σ | `exp(μ + σ Φ⁻¹(p))` |
//! | LogLogistic | μ, s | `e^μ (p/(1-p))^s` |

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability_open, Error, Result};
use crate::special::{
    gamma_fn, pi_s_over_sin, std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf,
    upper_incomplete_beta, upper_incomplete_gamma,
};

/// How fast the right tail of a law decays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailBehavior {
    /// Support bounded above.
    Bounded,
    /// Every moment is finite.
    Light,
    /// Survival regularly varying with this index; moments of order < index exist.
    Power(f64),
}

impl TailBehavior {
    pub fn has_finite_mean(self) -> bool {
        match self {
            TailBehavior::Bounded | TailBehavior::Light => true,
            TailBehavior::Power(index) => index > 1.0,
        }
    }
}

/// A univariate loss law driven by its quantile function.
///
/// The trait is object safe; the order checks work on `&dyn RiskLaw`.
pub trait RiskLaw: Send + Sync + fmt::Debug {
    fn label(&self) -> String;

    /// Left-continuous generalized inverse `inf{x: F(x) >= p}` for `p ∈ (0,1)`.
    fn quantile(&self, p: f64) -> Result<f64>;

    /// `F⁻¹(1-q)` for a tail probability `q ∈ (0,1)`, accurate when `1-q`
    /// would round to 1.
    fn quantile_upper(&self, q: f64) -> Result<f64> {
        self.quantile(1.0 - q)
    }

    fn cdf(&self, x: f64) -> f64;

    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    fn density(&self, _x: f64) -> Result<f64> {
        Err(Error::Unsupported(format!(
            "{} has no density",
            self.label()
        )))
    }

    /// Limits of the quantile function at 0⁺ and 1⁻.
    fn support(&self) -> (f64, f64);

    fn tail(&self) -> TailBehavior;

    fn is_continuous(&self) -> bool {
        true
    }

    fn has_finite_mean(&self) -> bool {
        self.tail().has_finite_mean()
    }

    /// Closed-form mean, if the law has one.
    fn mean_closed(&self) -> Option<f64> {
        None
    }

    /// Closed-form `∫_p^1 F⁻¹(u) du`, if the law has one.
    fn upper_tail_integral_closed(&self, _p: f64) -> Option<Result<f64>> {
        None
    }

    /// Closed-form stop-loss transform `E[(X-x)+]`, if the law has one.
    fn stop_loss_closed(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Analytic value of `∫_c^∞ F̄(t) dt` used to close the integrated-survival
    /// quadrature at a far-tail cutoff `c`.
    fn survival_remainder(&self, _c: f64) -> Option<f64> {
        None
    }

    /// Sorted atoms of a step-function law.
    fn atoms(&self) -> Option<&[f64]> {
        None
    }

    /// The catalog member behind this law, when there is one.
    fn as_distribution(&self) -> Option<&Distribution> {
        None
    }
}

macro_rules! forward_risk_law {
    ($ty:ty) => {
        impl<T: RiskLaw + ?Sized> RiskLaw for $ty {
            fn label(&self) -> String {
                (**self).label()
            }
            fn quantile(&self, p: f64) -> Result<f64> {
                (**self).quantile(p)
            }
            fn quantile_upper(&self, q: f64) -> Result<f64> {
                (**self).quantile_upper(q)
            }
            fn cdf(&self, x: f64) -> f64 {
                (**self).cdf(x)
            }
            fn survival(&self, x: f64) -> f64 {
                (**self).survival(x)
            }
            fn density(&self, x: f64) -> Result<f64> {
                (**self).density(x)
            }
            fn support(&self) -> (f64, f64) {
                (**self).support()
            }
            fn tail(&self) -> TailBehavior {
                (**self).tail()
            }
            fn is_continuous(&self) -> bool {
                (**self).is_continuous()
            }
            fn has_finite_mean(&self) -> bool {
                (**self).has_finite_mean()
            }
            fn mean_closed(&self) -> Option<f64> {
                (**self).mean_closed()
            }
            fn upper_tail_integral_closed(&self, p: f64) -> Option<Result<f64>> {
                (**self).upper_tail_integral_closed(p)
            }
            fn stop_loss_closed(&self, x: f64) -> Option<f64> {
                (**self).stop_loss_closed(x)
            }
            fn survival_remainder(&self, c: f64) -> Option<f64> {
                (**self).survival_remainder(c)
            }
            fn atoms(&self) -> Option<&[f64]> {
                (**self).atoms()
            }
            fn as_distribution(&self) -> Option<&Distribution> {
                (**self).as_distribution()
            }
        }
    };
}

forward_risk_law!(&T);
forward_risk_law!(Box<T>);
forward_risk_law!(Arc<T>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pareto,
    Weibull,
    Normal,
    Logistic,
    LogNormal,
    LogLogistic,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Pareto,
        Family::Weibull,
        Family::Normal,
        Family::Logistic,
        Family::LogNormal,
        Family::LogLogistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Pareto => "pareto",
            Family::Weibull => "weibull",
            Family::Normal => "normal",
            Family::Logistic => "logistic",
            Family::LogNormal => "lognormal",
            Family::LogLogistic => "loglogistic",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name.trim()))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated member of the parametric catalog.
///
/// Parameter order follows the usual notation of each family:
/// Pareto `(shape a, scale k)`, Weibull `(scale λ, shape β)`, and
/// `(location, scale)` for the Normal, Logistic and log families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distribution {
    family: Family,
    first: f64,
    second: f64,
}

impl Distribution {
    pub fn new(family: Family, first: f64, second: f64) -> Result<Self> {
        if !first.is_finite() || !second.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{family} parameters must be finite, got ({first}, {second})"
            )));
        }
        let positive = |v: f64, what: &str| {
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{family} {what} must be > 0, got {v}"
                )))
            }
        };
        match family {
            Family::Pareto => {
                positive(first, "shape")?;
                positive(second, "scale")?;
            }
            Family::Weibull => {
                positive(first, "scale")?;
                positive(second, "shape")?;
            }
            _ => positive(second, "scale")?,
        }
        Ok(Self {
            family,
            first,
            second,
        })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Pareto, shape, scale)
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self> {
        Self::new(Family::Weibull, scale, shape)
    }

    pub fn normal(location: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Normal, location, scale)
    }

    pub fn logistic(location: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Logistic, location, scale)
    }

    pub fn lognormal(location: f64, scale: f64) -> Result<Self> {
        Self::new(Family::LogNormal, location, scale)
    }

    pub fn loglogistic(location: f64, scale: f64) -> Result<Self> {
        Self::new(Family::LogLogistic, location, scale)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Parameters in the family's constructor order.
    pub fn params(&self) -> (f64, f64) {
        (self.first, self.second)
    }

    /// Same family with new parameters, validated.
    pub fn with_params(&self, first: f64, second: f64) -> Result<Self> {
        Self::new(self.family, first, second)
    }

    fn infinite_mean(&self) -> Error {
        Error::InfiniteMean(format!("{} has no finite mean", self.label()))
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.family, self.first, self.second)
    }
}

/// `-ln(1-p)` without cancellation for small p.
fn neg_log1m(p: f64) -> f64 {
    -(-p).ln_1p()
}

/// Binary entropy in nats, `-p ln p - (1-p) ln(1-p)`.
fn binary_entropy(p: f64) -> f64 {
    let a = if p > 0.0 { -p * p.ln() } else { 0.0 };
    let b = if p < 1.0 { -(1.0 - p) * (-p).ln_1p() } else { 0.0 };
    a + b
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic_sf_std(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

impl RiskLaw for Distribution {
    fn label(&self) -> String {
        self.to_string()
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability_open(p)?;
        let (a, b) = (self.first, self.second);
        Ok(match self.family {
            Family::Pareto => b * (-(-p).ln_1p() / a).exp(),
            Family::Weibull => a * neg_log1m(p).powf(1.0 / b),
            Family::Normal => a + b * std_normal_quantile(p),
            Family::Logistic => a + b * (p.ln() - (-p).ln_1p()),
            Family::LogNormal => (a + b * std_normal_quantile(p)).exp(),
            Family::LogLogistic => (a + b * (p.ln() - (-p).ln_1p())).exp(),
        })
    }

    fn quantile_upper(&self, q: f64) -> Result<f64> {
        check_probability_open(q)?;
        let (a, b) = (self.first, self.second);
        let logit_upper = (-q).ln_1p() - q.ln();
        Ok(match self.family {
            Family::Pareto => b * (-q.ln() / a).exp(),
            Family::Weibull => a * (-q.ln()).powf(1.0 / b),
            Family::Normal => a - b * std_normal_quantile(q),
            Family::Logistic => a + b * logit_upper,
            Family::LogNormal => (a - b * std_normal_quantile(q)).exp(),
            Family::LogLogistic => (a + b * logit_upper).exp(),
        })
    }

    fn cdf(&self, x: f64) -> f64 {
        let (a, b) = (self.first, self.second);
        match self.family {
            Family::Pareto => {
                if x <= b {
                    0.0
                } else {
                    -(a * (b / x).ln()).exp_m1()
                }
            }
            Family::Weibull => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-(x / a).powf(b)).exp_m1()
                }
            }
            Family::Normal => std_normal_cdf((x - a) / b),
            Family::Logistic => logistic_sf_std(-(x - a) / b),
            Family::LogNormal => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_cdf((x.ln() - a) / b)
                }
            }
            Family::LogLogistic => {
                if x <= 0.0 {
                    0.0
                } else {
                    logistic_sf_std(-(x.ln() - a) / b)
                }
            }
        }
    }

    fn survival(&self, x: f64) -> f64 {
        let (a, b) = (self.first, self.second);
        match self.family {
            Family::Pareto => {
                if x <= b {
                    1.0
                } else {
                    (b / x).powf(a)
                }
            }
            Family::Weibull => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-(x / a).powf(b)).exp()
                }
            }
            Family::Normal => std_normal_sf((x - a) / b),
            Family::Logistic => logistic_sf_std((x - a) / b),
            Family::LogNormal => {
                if x <= 0.0 {
                    1.0
                } else {
                    std_normal_sf((x.ln() - a) / b)
                }
            }
            Family::LogLogistic => {
                if x <= 0.0 {
                    1.0
                } else {
                    logistic_sf_std((x.ln() - a) / b)
                }
            }
        }
    }

    fn density(&self, x: f64) -> Result<f64> {
        let (a, b) = (self.first, self.second);
        let logistic_pdf_std = |z: f64| {
            let e = (-z.abs()).exp();
            e / ((1.0 + e) * (1.0 + e))
        };
        Ok(match self.family {
            Family::Pareto => {
                if x < b {
                    0.0
                } else {
                    a / x * (b / x).powf(a)
                }
            }
            Family::Weibull => {
                if x < 0.0 {
                    0.0
                } else {
                    let r = x / a;
                    b / a * r.powf(b - 1.0) * (-r.powf(b)).exp()
                }
            }
            Family::Normal => std_normal_pdf((x - a) / b) / b,
            Family::Logistic => logistic_pdf_std((x - a) / b) / b,
            Family::LogNormal => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_pdf((x.ln() - a) / b) / (b * x)
                }
            }
            Family::LogLogistic => {
                if x <= 0.0 {
                    0.0
                } else {
                    logistic_pdf_std((x.ln() - a) / b) / (b * x)
                }
            }
        })
    }

    fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Pareto => (self.second, f64::INFINITY),
            Family::Weibull | Family::LogNormal | Family::LogLogistic => (0.0, f64::INFINITY),
            Family::Normal | Family::Logistic => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn tail(&self) -> TailBehavior {
        match self.family {
            Family::Pareto => TailBehavior::Power(self.first),
            Family::LogLogistic => TailBehavior::Power(1.0 / self.second),
            _ => TailBehavior::Light,
        }
    }

    fn mean_closed(&self) -> Option<f64> {
        if !self.has_finite_mean() {
            return None;
        }
        let (a, b) = (self.first, self.second);
        Some(match self.family {
            Family::Pareto => a * b / (a - 1.0),
            Family::Weibull => a * gamma_fn(1.0 + 1.0 / b),
            Family::Normal | Family::Logistic => a,
            Family::LogNormal => (a + 0.5 * b * b).exp(),
            Family::LogLogistic => a.exp() * pi_s_over_sin(b),
        })
    }

    fn upper_tail_integral_closed(&self, p: f64) -> Option<Result<f64>> {
        if !self.has_finite_mean() {
            return Some(Err(self.infinite_mean()));
        }
        if !(0.0..1.0).contains(&p) {
            return Some(Err(Error::Domain(format!("level {p} must lie in [0,1)"))));
        }
        let (a, b) = (self.first, self.second);
        let q = 1.0 - p;
        let value = match self.family {
            // a k/(a-1) (1-p)^(1-1/a)
            Family::Pareto => a * b / (a - 1.0) * ((1.0 - 1.0 / a) * (-p).ln_1p()).exp(),
            // λ Γ(1+1/β, -ln(1-p))
            Family::Weibull => a * upper_incomplete_gamma(1.0 + 1.0 / b, neg_log1m(p)),
            // (1-p) μ + σ φ(z_p)
            Family::Normal => {
                let tail = if p == 0.0 {
                    0.0
                } else {
                    std_normal_pdf(std_normal_quantile(p))
                };
                q * a + b * tail
            }
            // (1-p) μ + s H(p)
            Family::Logistic => q * a + b * binary_entropy(p),
            // e^(μ+σ²/2) Φ̄(z_p - σ)
            Family::LogNormal => {
                let tail = if p == 0.0 {
                    1.0
                } else {
                    std_normal_sf(std_normal_quantile(p) - b)
                };
                (a + 0.5 * b * b).exp() * tail
            }
            // e^μ ∫_p^1 u^s (1-u)^(-s) du
            Family::LogLogistic => a.exp() * upper_incomplete_beta(1.0 + b, 1.0 - b, p),
        };
        Some(Ok(value))
    }

    fn stop_loss_closed(&self, x: f64) -> Option<f64> {
        let mean = self.mean_closed()?;
        let (a, b) = (self.first, self.second);
        match self.family {
            Family::Pareto => Some(if x <= b {
                mean - x
            } else {
                b / (a - 1.0) * (b / x).powf(a - 1.0)
            }),
            Family::Normal => {
                let d = (x - a) / b;
                Some(b * std_normal_pdf(d) - (x - a) * std_normal_sf(d))
            }
            Family::Logistic => Some(b * softplus(-(x - a) / b)),
            Family::LogNormal => Some(if x <= 0.0 {
                mean - x
            } else {
                let d = (x.ln() - a) / b;
                mean * std_normal_sf(d - b) - x * std_normal_sf(d)
            }),
            // λ Γ(1+1/β, z) - x e^(-z), z = (x/λ)^β
            Family::Weibull => Some(if x <= 0.0 {
                mean - x
            } else {
                let z = (x / a).powf(b);
                a * upper_incomplete_gamma(1.0 + 1.0 / b, z) - x * (-z).exp()
            }),
            Family::LogLogistic => None,
        }
    }

    fn survival_remainder(&self, c: f64) -> Option<f64> {
        if !self.has_finite_mean() {
            return None;
        }
        let (a, b) = (self.first, self.second);
        Some(match self.family {
            Family::Pareto => {
                let c = c.max(b);
                c / (a - 1.0) * (b / c).powf(a)
            }
            // (λ/β) Γ(1/β, (c/λ)^β)
            Family::Weibull => {
                let c = c.max(0.0);
                a / b * upper_incomplete_gamma(1.0 / b, (c / a).powf(b))
            }
            // σ (φ(d) - d Φ̄(d))
            Family::Normal => {
                let d = (c - a) / b;
                b * (std_normal_pdf(d) - d * std_normal_sf(d))
            }
            Family::Logistic => b * softplus(-(c - a) / b),
            Family::LogNormal => {
                let c = c.max(f64::MIN_POSITIVE);
                let d = (c.ln() - a) / b;
                (a + 0.5 * b * b).exp() * std_normal_sf(d - b) - c * std_normal_sf(d)
            }
            Family::LogLogistic => {
                let c = c.max(0.0);
                let u = self.cdf(c);
                a.exp() * upper_incomplete_beta(1.0 + b, 1.0 - b, u) - c * self.survival(c)
            }
        })
    }

    fn as_distribution(&self) -> Option<&Distribution> {
        Some(self)
    }
}

/// A finite sample treated as a step-function law.
///
/// The quantile is the order statistic `x_(⌈np⌉)`, so tail integrals are
/// exact finite sums. Interpolating quantile conventions are not offered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    /// `suffix[i]` is the sum of `values[i..]`.
    #[serde(skip)]
    suffix: Vec<f64>,
    name: String,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "empirical sample needs at least one value".into(),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "empirical sample contains non-finite value {bad}"
            )));
        }
        values.sort_by(f64::total_cmp);
        let mut suffix = vec![0.0; values.len() + 1];
        for i in (0..values.len()).rev() {
            suffix[i] = suffix[i + 1] + values[i];
        }
        Ok(Self {
            values,
            suffix,
            name: "empirical".into(),
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based rank `⌈np⌉`, clamped to `[1, n]`. A relative slack of a few
    /// ulps keeps `n*p` that is an integer in exact arithmetic from rounding up.
    fn rank(&self, p: f64) -> usize {
        let n = self.values.len() as f64;
        let np = n * p;
        let r = (np - 4.0 * f64::EPSILON * np.max(1.0)).ceil();
        (r.max(1.0) as usize).min(self.values.len())
    }

    fn count_at_most(&self, x: f64) -> usize {
        self.values.partition_point(|v| *v <= x)
    }
}

impl RiskLaw for EmpiricalSample {
    fn label(&self) -> String {
        format!("{}[n={}]", self.name, self.values.len())
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!("probability {p} must lie in (0,1]")));
        }
        Ok(self.values[self.rank(p) - 1])
    }

    fn cdf(&self, x: f64) -> f64 {
        self.count_at_most(x) as f64 / self.values.len() as f64
    }

    fn survival(&self, x: f64) -> f64 {
        let n = self.values.len();
        (n - self.count_at_most(x)) as f64 / n as f64
    }

    fn support(&self) -> (f64, f64) {
        (self.values[0], self.values[self.values.len() - 1])
    }

    fn tail(&self) -> TailBehavior {
        TailBehavior::Bounded
    }

    fn is_continuous(&self) -> bool {
        false
    }

    fn mean_closed(&self) -> Option<f64> {
        Some(self.suffix[0] / self.values.len() as f64)
    }

    fn upper_tail_integral_closed(&self, p: f64) -> Option<Result<f64>> {
        if !(0.0..1.0).contains(&p) {
            return Some(Err(Error::Domain(format!("level {p} must lie in [0,1)"))));
        }
        let n = self.values.len();
        let nf = n as f64;
        if p == 0.0 {
            return self.mean_closed().map(Ok);
        }
        let j = self.rank(p);
        // Q(u) = x_(j) on ((j-1)/n, j/n]; the partial cell runs from p to j/n.
        let partial = (j as f64 / nf - p).max(0.0) * self.values[j - 1];
        let rest = self.suffix[j] / nf;
        Some(Ok(partial + rest))
    }

    fn stop_loss_closed(&self, x: f64) -> Option<f64> {
        let start = self.count_at_most(x);
        let above = (self.values.len() - start) as f64;
        Some(((self.suffix[start] - x * above) / self.values.len() as f64).max(0.0))
    }

    fn atoms(&self) -> Option<&[f64]> {
        Some(&self.values)
    }
}
