//! Risk measures built on the quantile function: TVaR, the stop-loss
//! transform, the integrated survival function, censored variables
//! `max{X, F⁻¹(p₀)}` and concave distortions.

use serde::Serialize;

use crate::distributions::{RiskLaw, TailBehavior};
use crate::error::{check_level, check_probability_open, Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadConfig};

/// Tail probability at which the integrated-survival quadrature is closed
/// off by the law's analytic remainder.
const SURVIVAL_CUTOFF_TAIL: f64 = 1e-12;

fn require_finite_mean<L: RiskLaw + ?Sized>(law: &L) -> Result<()> {
    if law.has_finite_mean() {
        Ok(())
    } else {
        Err(Error::InfiniteMean(format!(
            "{} has no finite mean",
            law.label()
        )))
    }
}

/// `∫_p^1 F⁻¹(u) du` by adaptive quadrature, ignoring any closed form.
///
/// The upper half is integrated in `t = -ln(1-u)` and the lower half in
/// `t = -ln u`, which removes the endpoint singularities of unbounded laws.
pub fn upper_tail_integral_quadrature<L: RiskLaw + ?Sized>(
    law: &L,
    p: f64,
    cfg: QuadConfig,
) -> Result<f64> {
    require_finite_mean(law)?;
    check_level(p)?;
    let failure = std::cell::Cell::new(None);
    let record = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let split = p.max(0.5);
    // ∫_split^1 Q(u) du with u = 1 - e^{-t}
    let t0 = -(-split).ln_1p();
    let upper = integrate_to_infinity(
        |t| {
            let q = (-t).exp();
            if q <= 0.0 {
                return 0.0;
            }
            record(law.quantile_upper(q)) * q
        },
        t0,
        cfg,
    )?;
    let mut total = upper;
    if p < 0.5 {
        // ∫_p^{1/2} Q(u) du with u = e^{-t}
        let lo_t = std::f64::consts::LN_2;
        let integrand = |t: f64| {
            let u = (-t).exp();
            if u <= 0.0 {
                return 0.0;
            }
            record(law.quantile(u)) * u
        };
        let lower = if p == 0.0 {
            integrate_to_infinity(integrand, lo_t, cfg)?
        } else {
            integrate(integrand, lo_t, -p.ln(), cfg)?
        };
        total += lower;
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(total)
}

/// `∫_p^1 F⁻¹(u) du`, in closed form when the law provides one.
pub fn upper_tail_integral<L: RiskLaw + ?Sized>(law: &L, p: f64) -> Result<f64> {
    require_finite_mean(law)?;
    check_level(p)?;
    match law.upper_tail_integral_closed(p) {
        Some(v) => v,
        None => upper_tail_integral_quadrature(law, p, QuadConfig::default()),
    }
}

/// Tail value at risk `TVaR_p = (1/(1-p)) ∫_p^1 F⁻¹(u) du` for `p ∈ [0,1)`.
pub fn tvar<L: RiskLaw + ?Sized>(law: &L, p: f64) -> Result<f64> {
    Ok(upper_tail_integral(law, p)? / (1.0 - p))
}

/// TVaR computed only by quadrature of the quantile.
pub fn tvar_quadrature<L: RiskLaw + ?Sized>(law: &L, p: f64, cfg: QuadConfig) -> Result<f64> {
    Ok(upper_tail_integral_quadrature(law, p, cfg)? / (1.0 - p))
}

pub fn mean<L: RiskLaw + ?Sized>(law: &L) -> Result<f64> {
    require_finite_mean(law)?;
    match law.mean_closed() {
        Some(m) => Ok(m),
        None => upper_tail_integral(law, 0.0),
    }
}

/// Value at risk, extended to `p = 0` by the lower support endpoint.
pub fn var<L: RiskLaw + ?Sized>(law: &L, p: f64) -> Result<f64> {
    if p == 0.0 {
        return Ok(law.support().0);
    }
    law.quantile(p)
}

/// Stop-loss transform `E[(X-x)+]`.
///
/// Uses the law's closed form when it has one and otherwise the quantile
/// route `∫_{F(x)}^1 F⁻¹(u) du - x F̄(x)`.
pub fn stop_loss<L: RiskLaw + ?Sized>(law: &L, x: f64) -> Result<f64> {
    require_finite_mean(law)?;
    if let Some(v) = law.stop_loss_closed(x) {
        return Ok(v.max(0.0));
    }
    let (lo, hi) = law.support();
    if x >= hi {
        return Ok(0.0);
    }
    if x <= lo {
        return Ok(mean(law)? - x);
    }
    let u = law.cdf(x);
    if u >= 1.0 {
        return Ok(0.0);
    }
    let value = upper_tail_integral(law, u)? - x * law.survival(x);
    Ok(value.max(0.0))
}

/// Integrated survival function `∫_x^∞ F̄(t) dt`.
///
/// Computed independently of [`stop_loss`]: step laws are summed segment by
/// segment, continuous laws are integrated numerically up to
/// `F⁻¹(1 - 1e-12)` and closed with the law's analytic tail remainder.
pub fn integrated_survival<L: RiskLaw + ?Sized>(law: &L, x: f64) -> Result<f64> {
    require_finite_mean(law)?;
    if let Some(atoms) = law.atoms() {
        return Ok(step_integrated_survival(atoms, x));
    }
    let (lo, hi) = law.support();
    if x >= hi {
        return Ok(0.0);
    }
    let start = x.max(lo);
    let below_support = start - x;
    let cutoff = if hi.is_finite() {
        hi
    } else {
        law.quantile_upper(SURVIVAL_CUTOFF_TAIL)?
    };
    let remainder = |c: f64| -> Result<f64> {
        if c >= hi {
            return Ok(0.0);
        }
        match law.survival_remainder(c) {
            Some(r) => Ok(r.max(0.0)),
            None => integrate_to_infinity(|t| law.survival(t), c, QuadConfig::tight()),
        }
    };
    if start >= cutoff {
        return Ok(below_support + remainder(start)?);
    }
    let mut knots = vec![start];
    let lower_levels = [1e-12, 1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999];
    let upper_tails = [1e-4, 1e-6, 1e-8, 1e-10];
    let candidates = lower_levels
        .iter()
        .map(|&p| law.quantile(p))
        .chain(upper_tails.iter().map(|&q| law.quantile_upper(q)));
    for k in candidates {
        let k = k?;
        if k > start && k < cutoff {
            knots.push(k);
        }
    }
    knots.push(cutoff);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let cfg = QuadConfig::tight();
    let mut body = 0.0;
    for w in knots.windows(2) {
        body += integrate(|t| law.survival(t), w[0], w[1], cfg)?;
    }
    Ok(below_support + body + remainder(cutoff)?)
}

fn step_integrated_survival(atoms: &[f64], x: f64) -> f64 {
    let n = atoms.len() as f64;
    let mut idx = atoms.partition_point(|v| *v <= x);
    let mut left = x;
    let mut total = 0.0;
    while idx < atoms.len() {
        let value = atoms[idx];
        let remaining = (atoms.len() - idx) as f64;
        total += (value - left) * remaining / n;
        left = value;
        while idx < atoms.len() && atoms[idx] == value {
            idx += 1;
        }
    }
    total
}

/// TVaR evaluated along a grid of levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub source: String,
}

pub fn risk_curve<L: RiskLaw + ?Sized>(law: &L, grid: &[f64]) -> Result<RiskCurve> {
    if grid.is_empty() {
        return Err(Error::Domain("risk curve grid is empty".into()));
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain(format!(
                "risk curve grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let values = grid
        .iter()
        .map(|&p| tvar(law, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(RiskCurve {
        grid: grid.to_vec(),
        values,
        source: law.label(),
    })
}

/// The variable `max{X, F⁻¹(p₀)}`, represented by its quantile function.
#[derive(Debug, Clone)]
pub struct Censored<L> {
    base: L,
    level: f64,
    floor: f64,
}

/// Censor `law` from below at its `p0`-quantile.
pub fn censor_at<L: RiskLaw>(law: L, p0: f64) -> Result<Censored<L>> {
    check_probability_open(p0)?;
    let floor = law.quantile(p0)?;
    Ok(Censored {
        base: law,
        level: p0,
        floor,
    })
}

impl<L: RiskLaw> Censored<L> {
    pub fn level(&self) -> f64 {
        self.level
    }

    /// `F⁻¹(p₀)`
    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn base(&self) -> &L {
        &self.base
    }

    fn base_tail_from_level(&self) -> Result<f64> {
        upper_tail_integral(&self.base, self.level)
    }
}

impl<L: RiskLaw> RiskLaw for Censored<L> {
    fn label(&self) -> String {
        format!("max({}, F^-1({}))", self.base.label(), self.level)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability_open(p)?;
        if p < self.level {
            Ok(self.floor)
        } else {
            self.base.quantile(p)
        }
    }

    fn quantile_upper(&self, q: f64) -> Result<f64> {
        check_probability_open(q)?;
        if 1.0 - q < self.level {
            Ok(self.floor)
        } else {
            self.base.quantile_upper(q)
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < self.floor {
            0.0
        } else {
            self.base.cdf(x)
        }
    }

    fn survival(&self, x: f64) -> f64 {
        if x < self.floor {
            1.0
        } else {
            self.base.survival(x)
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.floor, self.base.support().1)
    }

    fn tail(&self) -> TailBehavior {
        self.base.tail()
    }

    fn is_continuous(&self) -> bool {
        false
    }

    fn mean_closed(&self) -> Option<f64> {
        let tail = self.base_tail_from_level().ok()?;
        Some(tail + self.floor * self.level)
    }

    /// Two branches: `∫_{p₀}^1 F⁻¹ + F⁻¹(p₀)(p₀ - p)` below `p₀`, the base
    /// law's tail integral above.
    fn upper_tail_integral_closed(&self, p: f64) -> Option<Result<f64>> {
        if let Err(e) = check_level(p) {
            return Some(Err(e));
        }
        Some(if p >= self.level {
            upper_tail_integral(&self.base, p)
        } else {
            self.base_tail_from_level()
                .map(|tail| tail + self.floor * (self.level - p))
        })
    }

    fn stop_loss_closed(&self, x: f64) -> Option<f64> {
        if x >= self.floor {
            stop_loss(&self.base, x).ok()
        } else {
            self.mean_closed().map(|m| m - x)
        }
    }

    fn survival_remainder(&self, c: f64) -> Option<f64> {
        if c >= self.floor {
            self.base.survival_remainder(c)
        } else {
            None
        }
    }
}

/// A concave distortion `h: [0,1] → [0,1]` with `h(0)=0`, `h(1)=1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Distortion {
    /// `h(u) = u^α`, α ∈ (0,1]
    ProportionalHazard(f64),
    /// `h(u) = 1 - (1-u)^k`, k ≥ 1
    DualPower(f64),
    /// `h(u) = min(u/(1-level), 1)`; distorting by it yields TVaR at `level`.
    TvarLevel(f64),
}

impl Distortion {
    pub fn proportional_hazard(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Distortion::ProportionalHazard(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "proportional hazard exponent must lie in (0,1], got {alpha}"
            )))
        }
    }

    pub fn dual_power(k: f64) -> Result<Self> {
        if k >= 1.0 && k.is_finite() {
            Ok(Distortion::DualPower(k))
        } else {
            Err(Error::InvalidParameter(format!(
                "dual power exponent must be >= 1, got {k}"
            )))
        }
    }

    pub fn tvar_level(level: f64) -> Result<Self> {
        check_level(level)?;
        Ok(Distortion::TvarLevel(level))
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match *self {
            Distortion::ProportionalHazard(a) => u.powf(a),
            Distortion::DualPower(k) => -(k * (-u).ln_1p()).exp_m1(),
            Distortion::TvarLevel(level) => (u / (1.0 - level)).min(1.0),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Distortion::ProportionalHazard(a) => a * u.powf(a - 1.0),
            Distortion::DualPower(k) => k * (1.0 - u).powf(k - 1.0),
            Distortion::TvarLevel(level) => {
                if u < 1.0 - level {
                    1.0 / (1.0 - level)
                } else {
                    0.0
                }
            }
        }
    }

    /// Generalized inverse `inf{u: h(u) >= v}`.
    pub fn inverse(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, 1.0);
        match *self {
            Distortion::ProportionalHazard(a) => v.powf(1.0 / a),
            Distortion::DualPower(k) => -((-v).ln_1p() / k).exp_m1(),
            Distortion::TvarLevel(level) => v * (1.0 - level),
        }
    }

    /// Generalized inverse by bisection, to `1e-10`.
    pub fn inverse_by_bisection(&self, v: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) >= v {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Checks `h(0)=0`, `h(1)=1`, monotonicity and concavity on a grid.
    pub fn validate(&self, points: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.eval(0.0).abs() > 1e-15 || (self.eval(1.0) - 1.0).abs() > 1e-15 {
            return fail(format!("{self:?} does not fix the endpoints"));
        }
        let step = 1.0 / points as f64;
        let values: Vec<f64> = (0..=points).map(|i| self.eval(i as f64 * step)).collect();
        for (i, w) in values.windows(2).enumerate() {
            if w[1] < w[0] - 1e-15 {
                return fail(format!("{self:?} decreases near u={}", i as f64 * step));
            }
        }
        for (i, w) in values.windows(3).enumerate() {
            if w[2] - 2.0 * w[1] + w[0] > 1e-12 {
                return fail(format!("{self:?} is not concave near u={}", (i + 1) as f64 * step));
            }
        }
        Ok(())
    }
}

/// The distorted variable with survival `h(F̄(x))`.
#[derive(Debug, Clone)]
pub struct Distorted<L> {
    base: L,
    h: Distortion,
}

pub fn distort<L: RiskLaw>(law: L, h: Distortion) -> Result<Distorted<L>> {
    h.validate(10_000)?;
    let distorted = Distorted { base: law, h };
    require_finite_mean(&distorted)?;
    Ok(distorted)
}

impl<L: RiskLaw> Distorted<L> {
    pub fn distortion(&self) -> Distortion {
        self.h
    }

    pub fn base(&self) -> &L {
        &self.base
    }
}

impl<L: RiskLaw> RiskLaw for Distorted<L> {
    fn label(&self) -> String {
        format!("{:?}[{}]", self.h, self.base.label())
    }

    /// `F_h⁻¹(p) = F⁻¹(1 - h⁻¹(1-p))`
    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability_open(p)?;
        self.quantile_upper(1.0 - p)
    }

    fn quantile_upper(&self, q: f64) -> Result<f64> {
        // q = 1 arises from 1 - p rounding for tiny p.
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain(format!("tail probability {q} must lie in (0,1]")));
        }
        let base_q = self.h.inverse(q);
        if base_q <= 0.0 {
            return Ok(self.base.support().1);
        }
        if base_q >= 1.0 {
            return Ok(self.base.support().0);
        }
        self.base.quantile_upper(base_q)
    }

    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    fn survival(&self, x: f64) -> f64 {
        self.h.eval(self.base.survival(x))
    }

    fn density(&self, x: f64) -> Result<f64> {
        let f = self.base.density(x)?;
        Ok(self.h.derivative(self.base.survival(x)) * f)
    }

    fn support(&self) -> (f64, f64) {
        self.base.support()
    }

    fn tail(&self) -> TailBehavior {
        match (self.h, self.base.tail()) {
            (Distortion::ProportionalHazard(a), TailBehavior::Power(index)) => {
                TailBehavior::Power(index * a)
            }
            (_, tail) => tail,
        }
    }

    fn is_continuous(&self) -> bool {
        self.base.is_continuous()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Distribution, EmpiricalSample, Family};
    use approx::assert_relative_eq;

    fn pareto(a: f64, k: f64) -> Distribution {
        Distribution::pareto(a, k).unwrap()
    }

    #[test]
    fn tvar_at_zero_is_mean() {
        assert_eq!(tvar(&pareto(7.0, 3.0), 0.0).unwrap(), 3.5);
        let w = Distribution::weibull(3.0, 1.0).unwrap();
        assert_relative_eq!(tvar(&w, 0.0).unwrap(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn tvar_errors() {
        assert!(matches!(
            tvar(&pareto(0.5, 1.0), 0.5),
            Err(Error::InfiniteMean(_))
        ));
        assert!(matches!(
            tvar(&pareto(3.0, 1.0), 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            stop_loss(&pareto(1.0, 1.0), 2.0),
            Err(Error::InfiniteMean(_))
        ));
    }

    #[test]
    fn golden_pareto_tvars_meet() {
        let p = 0.55482;
        let x = tvar(&pareto(7.0, 3.0), p).unwrap();
        let y = tvar(&pareto(3.0, 2.0), p).unwrap();
        // mpmath: 3.9289566575614, 3.9289458174926
        assert_relative_eq!(x, 3.928_956_657_561_437, max_relative = 1e-12);
        assert_relative_eq!(y, 3.928_945_817_492_599, max_relative = 1e-12);
        assert!((x - y).abs() < 2e-4);
    }

    #[test]
    fn weibull_stop_loss_values() {
        let w = Distribution::weibull(3.0, 1.0).unwrap();
        assert_relative_eq!(stop_loss(&w, 0.0).unwrap(), 3.0, max_relative = 1e-13);
        assert_relative_eq!(
            stop_loss(&w, 3.0).unwrap(),
            3.0 * (-1.0f64).exp(),
            max_relative = 1e-12
        );
        assert!(stop_loss(&w, 1e4).unwrap() < 1e-300);
    }

    #[test]
    fn integrated_survival_reference_values() {
        assert_relative_eq!(
            integrated_survival(&pareto(3.0, 2.0), 2.0).unwrap(),
            1.0,
            max_relative = 1e-10
        );
        let n = Distribution::normal(0.0, 1.0).unwrap();
        assert_relative_eq!(
            integrated_survival(&n, 0.0).unwrap(),
            crate::special::INV_SQRT_2PI,
            max_relative = 1e-10
        );
        // below the support the survival is 1
        assert_relative_eq!(
            integrated_survival(&pareto(3.0, 2.0), 0.0).unwrap(),
            3.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn empirical_stop_loss_routes_agree() {
        let s = EmpiricalSample::new(vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        for &x in &[-1.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 9.0] {
            let a = stop_loss(&s, x).unwrap();
            let b = integrated_survival(&s, x).unwrap();
            assert!((a - b).abs() < 1e-14, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn censored_quantile_and_tvar() {
        let w = Distribution::weibull(3.0, 1.0).unwrap();
        let c = censor_at(w, 0.5).unwrap();
        assert_eq!(c.quantile(0.25).unwrap(), w.quantile(0.5).unwrap());
        assert_eq!(c.quantile(0.75).unwrap(), w.quantile(0.75).unwrap());
        // ∫_{0.5}^1 F⁻¹ + F⁻¹(0.5)·0.5 = 3·0.5(1+ln2) + 1.5 ln 2
        let expected = 1.5 * (1.0 + std::f64::consts::LN_2) + 1.5 * std::f64::consts::LN_2;
        assert_relative_eq!(tvar(&c, 0.0).unwrap(), expected, max_relative = 1e-12);
        for &p in &[0.5, 0.6, 0.9, 0.999] {
            assert_eq!(tvar(&c, p).unwrap(), tvar(&w, p).unwrap());
        }
        assert!(censor_at(w, 0.0).is_err());
        assert!(censor_at(w, 1.0).is_err());
    }

    #[test]
    fn distortion_validation() {
        assert!(Distortion::proportional_hazard(0.0).is_err());
        assert!(Distortion::proportional_hazard(1.5).is_err());
        assert!(Distortion::dual_power(0.5).is_err());
        for h in [
            Distortion::proportional_hazard(0.4).unwrap(),
            Distortion::dual_power(3.0).unwrap(),
            Distortion::tvar_level(0.9).unwrap(),
        ] {
            h.validate(10_000).unwrap();
            for i in 1..100 {
                let v = i as f64 / 100.0;
                assert!((h.inverse(v) - h.inverse_by_bisection(v)).abs() < 2e-10);
            }
        }
    }

    #[test]
    fn proportional_hazard_on_pareto_is_pareto() {
        let base = pareto(4.0, 2.0);
        let d = distort(base, Distortion::proportional_hazard(0.5).unwrap()).unwrap();
        let target = pareto(2.0, 2.0);
        for i in 1..100 {
            let p = i as f64 / 100.0;
            assert_relative_eq!(
                d.quantile(p).unwrap(),
                target.quantile(p).unwrap(),
                max_relative = 1e-12
            );
        }
        assert!(matches!(
            distort(pareto(1.5, 1.0), Distortion::proportional_hazard(0.5).unwrap()),
            Err(Error::InfiniteMean(_))
        ));
    }

    #[test]
    fn identity_distortion_preserves_quantiles() {
        let n = Distribution::new(Family::Logistic, 1.0, 2.0).unwrap();
        for h in [
            Distortion::proportional_hazard(1.0).unwrap(),
            Distortion::dual_power(1.0).unwrap(),
        ] {
            let d = distort(n, h).unwrap();
            for i in 1..1000 {
                let p = i as f64 / 1000.0;
                let a = d.quantile(p).unwrap();
                let b = n.quantile(p).unwrap();
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "p={p}");
            }
        }
    }

    #[test]
    fn dual_power_survival_on_empirical_tail() {
        let s = EmpiricalSample::new((1..=20).map(f64::from).collect()).unwrap();
        let d = distort(s.clone(), Distortion::dual_power(2.0).unwrap()).unwrap();
        for i in 0..=22 {
            let x = i as f64 - 0.5;
            let sf = s.survival(x);
            let direct = 1.0 - (1.0 - sf) * (1.0 - sf);
            assert!((d.survival(x) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn tvar_distortion_reproduces_tvar() {
        let base = Distribution::normal(1.0, 2.0).unwrap();
        let level = 0.9;
        let d = distort(base, Distortion::tvar_level(level).unwrap()).unwrap();
        let m = mean(&d).unwrap();
        assert_relative_eq!(m, tvar(&base, level).unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn risk_curve_validation() {
        let d = pareto(3.0, 1.0);
        assert!(risk_curve(&d, &[0.1, 0.1]).is_err());
        let c = risk_curve(&d, &[0.0, 0.5, 0.9]).unwrap();
        assert_eq!(c.values[0], 1.5);
        assert!(c.values.windows(2).all(|w| w[1] >= w[0]));
    }
}
