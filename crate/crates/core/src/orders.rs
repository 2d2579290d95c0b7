//! Stochastic-order verdicts between two risks.
//!
//! All checks evaluate the defining inequality on a deterministic grid,
//! refine around local minima of the gap, and report the outcome as an
//! [`OrderCertificate`] that records the grid size and tolerance used. A
//! `Fails` verdict always carries the witness point where the gap is most
//! negative.

use serde::{Serialize, Serializer};

use crate::distributions::{Distribution, Family, RiskLaw};
use crate::error::{check_level, check_probability_open, Error, Result};
use crate::risk::{integrated_survival, mean, stop_loss, tvar};
use crate::roots::bisect_predicate;
use crate::special::std_normal_cdf;

/// Highest level examined when looking at `p → 1`.
pub const TOP_LEVEL: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderConfig {
    /// Absolute slack allowed on each gap before it counts as a violation.
    pub tolerance: f64,
    /// Base number of grid points; refinements are added on top.
    pub grid_points: usize,
}

impl Default for OrderConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            grid_points: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "order", rename_all = "snake_case")]
pub enum OrderKind {
    P0Tvar { p0: f64 },
    Icx,
    Tcx { x0: f64 },
    /// `∫_x^∞ F̄ ≤ ∫_x^∞ Ḡ` for all `x ≥ x0`, without the equal-means requirement.
    IntegratedSurvival { x0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCertificate {
    #[serde(flatten)]
    pub kind: OrderKind,
    pub verdict: Verdict,
    /// Level (TVaR orders) or retention (stop-loss orders) of the worst violation.
    pub witness: Option<f64>,
    /// Gap `Y - X` at the witness.
    pub witness_gap: Option<f64>,
    /// Smallest gap seen anywhere on the grid.
    pub min_gap: f64,
    pub grid_resolution: usize,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl OrderCertificate {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Re-evaluates the defining inequality at the witness; true when the
    /// violation is reproduced.
    pub fn recheck(&self, x: &dyn RiskLaw, y: &dyn RiskLaw) -> Result<bool> {
        let Some(w) = self.witness else {
            return Ok(false);
        };
        let gap = match self.kind {
            OrderKind::P0Tvar { .. } => tvar_gap(x, y, w)?,
            OrderKind::Icx | OrderKind::Tcx { .. } => stop_loss_gap(x, y, w)?,
            OrderKind::IntegratedSurvival { .. } => isf_gap(x, y, w)?,
        };
        Ok(gap < -self.tolerance)
    }

    fn inconclusive(kind: OrderKind, cfg: &OrderConfig, err: &Error) -> Self {
        Self {
            kind,
            verdict: Verdict::Inconclusive,
            witness: None,
            witness_gap: None,
            min_gap: f64::NAN,
            grid_resolution: 0,
            tolerance: cfg.tolerance,
            note: Some(err.to_string()),
        }
    }
}

/// Smallest `p₀` with `X ≤_{p₀-tvar} Y`, or no such level below `1 - 1e-9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinP0 {
    Ordered(f64),
    NotOrdered,
}

impl MinP0 {
    pub fn level(self) -> Option<f64> {
        match self {
            MinP0::Ordered(p) => Some(p),
            MinP0::NotOrdered => None,
        }
    }
}

impl Serialize for MinP0 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MinP0::Ordered(p) => s.serialize_f64(*p),
            MinP0::NotOrdered => s.serialize_str("not_ordered"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingDirection {
    MinusToPlus,
    PlusToMinus,
    None,
}

/// Sign changes of `G⁻¹ - F⁻¹` over `(0,1)`, zero runs discarded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub sign_changes: usize,
    pub crossings: Vec<f64>,
    pub last_change_direction: CrossingDirection,
    pub closed_form: bool,
}

pub(crate) fn tvar_gap(x: &dyn RiskLaw, y: &dyn RiskLaw, p: f64) -> Result<f64> {
    Ok(tvar(y, p)? - tvar(x, p)?)
}

fn stop_loss_gap(x: &dyn RiskLaw, y: &dyn RiskLaw, t: f64) -> Result<f64> {
    Ok(stop_loss(y, t)? - stop_loss(x, t)?)
}

fn isf_gap(x: &dyn RiskLaw, y: &dyn RiskLaw, t: f64) -> Result<f64> {
    Ok(integrated_survival(y, t)? - integrated_survival(x, t)?)
}

fn require_means(x: &dyn RiskLaw, y: &dyn RiskLaw) -> Result<()> {
    for law in [x, y] {
        if !law.has_finite_mean() {
            return Err(Error::InfiniteMean(format!(
                "{} has no finite mean",
                law.label()
            )));
        }
    }
    Ok(())
}

fn sort_dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|p| p.is_finite());
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Levels on `[p0, top]`: uniform, geometric towards 1 and geometric away from `p0`.
fn level_grid(p0: f64, top: f64, n: usize) -> Vec<f64> {
    let n = n.max(8);
    let half = n / 2;
    let quarter = (n / 4).max(2);
    let span = top - p0;
    let mut pts = Vec::with_capacity(n + quarter + 2);
    for i in 0..half {
        pts.push(p0 + span * i as f64 / (half - 1) as f64);
    }
    let head = 1.0 - p0;
    let tail_end = 1.0 - top;
    for i in 0..quarter {
        let frac = i as f64 / (quarter - 1) as f64;
        pts.push(1.0 - head * (tail_end / head).powf(frac));
    }
    for i in 0..quarter {
        let frac = i as f64 / (quarter - 1) as f64;
        pts.push(p0 + head * 1e-9 * (0.5e9f64).powf(frac));
    }
    pts.retain(|p| *p >= p0 && *p <= top);
    pts.push(p0);
    pts.push(top);
    sort_dedup(pts)
}

/// Retentions covering both laws from `from` to their far tails.
fn retention_grid(x: &dyn RiskLaw, y: &dyn RiskLaw, from: Option<f64>, n: usize) -> Result<Vec<f64>> {
    let n = n.max(8);
    let lower_of = |law: &dyn RiskLaw| -> Result<f64> {
        let lo = law.support().0;
        if lo.is_finite() {
            Ok(lo)
        } else {
            law.quantile(1e-9)
        }
    };
    let upper_of = |law: &dyn RiskLaw| -> Result<f64> {
        let hi = law.support().1;
        if hi.is_finite() {
            Ok(hi)
        } else {
            law.quantile_upper(1e-9)
        }
    };
    let lo = match from {
        Some(x0) => x0,
        None => lower_of(x)?.min(lower_of(y)?),
    };
    let mut hi = upper_of(x)?.max(upper_of(y)?);
    if hi <= lo {
        hi = lo + 1.0 + lo.abs();
    }
    let mut pts = Vec::with_capacity(2 * n);
    let half = n / 2;
    for i in 0..half {
        pts.push(lo + (hi - lo) * i as f64 / (half - 1) as f64);
    }
    let quarter = (n / 4).max(2);
    for law in [x, y] {
        for i in 1..quarter {
            let p = i as f64 / quarter as f64;
            pts.push(law.quantile(p)?);
            let q = 10f64.powf(-9.0 * i as f64 / quarter as f64);
            pts.push(law.quantile_upper(q)?);
        }
    }
    pts.retain(|t| *t >= lo && *t <= hi);
    pts.push(lo);
    pts.push(hi);
    Ok(sort_dedup(pts))
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
fn golden_min<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..60 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

struct Scan {
    points: Vec<f64>,
    gaps: Vec<f64>,
}

/// Evaluates `gap` on `points` and adds golden-section refinements around
/// every interior local minimum.
fn scan<F: Fn(f64) -> Result<f64>>(points: Vec<f64>, gap: F) -> Result<Scan> {
    let gaps = points.iter().map(|&p| gap(p)).collect::<Result<Vec<_>>>()?;
    let mut extra = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        if gaps[i] <= gaps[i - 1] && gaps[i] <= gaps[i + 1] && gaps[i] < gaps[i - 1].max(gaps[i + 1]) {
            extra.push(golden_min(&gap, points[i - 1], points[i + 1])?);
        }
    }
    let mut pairs: Vec<(f64, f64)> = points.into_iter().zip(gaps).chain(extra).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.dedup_by(|a, b| a.0 == b.0);
    let (points, gaps) = pairs.into_iter().unzip();
    Ok(Scan { points, gaps })
}

fn certificate_from_scan(kind: OrderKind, scan: &Scan, cfg: &OrderConfig) -> OrderCertificate {
    let (idx, min_gap) = scan
        .gaps
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    let fails = min_gap < -cfg.tolerance;
    OrderCertificate {
        kind,
        verdict: if fails { Verdict::Fails } else { Verdict::Holds },
        witness: fails.then(|| scan.points[idx]),
        witness_gap: fails.then_some(min_gap),
        min_gap,
        grid_resolution: scan.points.len(),
        tolerance: cfg.tolerance,
        note: None,
    }
}

/// Checks `TVaR_p(X) ≤ TVaR_p(Y)` for every `p ∈ [p0, 1)`.
///
/// `p0 = 0` is the increasing convex order.
pub fn check_p0_tvar(
    x: &dyn RiskLaw,
    y: &dyn RiskLaw,
    p0: f64,
    cfg: &OrderConfig,
) -> Result<OrderCertificate> {
    require_means(x, y)?;
    check_level(p0)?;
    let kind = OrderKind::P0Tvar { p0 };
    let top = TOP_LEVEL.max(p0);
    let points = level_grid(p0, top, cfg.grid_points);
    match scan(points, |p| tvar_gap(x, y, p)) {
        Ok(s) => Ok(certificate_from_scan(kind, &s, cfg)),
        Err(e @ Error::InfiniteMean(_)) => Err(e),
        Err(e) => Ok(OrderCertificate::inconclusive(kind, cfg, &e)),
    }
}

/// `inf{p₀ : TVaR_p(X) ≤ TVaR_p(Y) for all p ≥ p₀}`.
///
/// The last level where the gap is negative beyond tolerance is bracketed
/// on a grid seeded with the quantile crossings and then bisected.
pub fn min_p0(x: &dyn RiskLaw, y: &dyn RiskLaw, cfg: &OrderConfig) -> Result<MinP0> {
    require_means(x, y)?;
    let mut points = level_grid(0.0, TOP_LEVEL, cfg.grid_points.max(200));
    if x.is_continuous() && y.is_continuous() {
        if let Ok(report) = quantile_crossings(x, y) {
            points.extend(report.crossings);
        }
    }
    let points = sort_dedup(points);
    let s = scan(points, |p| tvar_gap(x, y, p))?;
    let n = s.points.len();
    if s.gaps[n - 1] < -cfg.tolerance {
        return Ok(MinP0::NotOrdered);
    }
    let Some(last_bad) = s.gaps.iter().rposition(|g| *g < -cfg.tolerance) else {
        return Ok(MinP0::Ordered(0.0));
    };
    let lo = s.points[last_bad];
    let hi = s.points[last_bad + 1];
    let root = bisect_predicate(|p| Ok(tvar_gap(x, y, p)? < 0.0), lo, hi, 1e-12)?;
    Ok(MinP0::Ordered(root))
}

/// Increasing convex (stop-loss) order: `E[(X-t)+] ≤ E[(Y-t)+]` for all `t`.
pub fn check_icx(x: &dyn RiskLaw, y: &dyn RiskLaw, cfg: &OrderConfig) -> Result<OrderCertificate> {
    require_means(x, y)?;
    let (mx, my) = (mean(x)?, mean(y)?);
    if mx - my > cfg.tolerance {
        // Below both supports the stop-loss gap is the mean gap.
        let below = x.support().0.min(y.support().0);
        let witness = if below.is_finite() {
            below
        } else {
            x.quantile(1e-12)?.min(y.quantile(1e-12)?)
        };
        let gap = stop_loss_gap(x, y, witness)?;
        return Ok(OrderCertificate {
            kind: OrderKind::Icx,
            verdict: Verdict::Fails,
            witness: Some(witness),
            witness_gap: Some(gap),
            min_gap: gap,
            grid_resolution: 1,
            tolerance: cfg.tolerance,
            note: Some(format!("mean of X ({mx}) exceeds mean of Y ({my})")),
        });
    }
    let points = retention_grid(x, y, None, cfg.grid_points)?;
    let s = scan(points, |t| stop_loss_gap(x, y, t))?;
    Ok(certificate_from_scan(OrderKind::Icx, &s, cfg))
}

/// Tail convex order with index `x0`; defined only for equal means.
pub fn check_tcx(
    x: &dyn RiskLaw,
    y: &dyn RiskLaw,
    x0: f64,
    cfg: &OrderConfig,
) -> Result<OrderCertificate> {
    require_means(x, y)?;
    let (mx, my) = (mean(x)?, mean(y)?);
    if (mx - my).abs() > 1e-7 * mx.abs().max(my.abs()).max(1.0) {
        return Err(Error::Precondition(format!(
            "tail convex order needs equal means, got {mx} and {my}"
        )));
    }
    let points = retention_grid(x, y, Some(x0), cfg.grid_points)?;
    let s = scan(points, |t| stop_loss_gap(x, y, t))?;
    Ok(certificate_from_scan(OrderKind::Tcx { x0 }, &s, cfg))
}

/// Integrated-survival dominance on `[x0, ∞)`.
pub fn check_isf_from(
    x: &dyn RiskLaw,
    y: &dyn RiskLaw,
    x0: f64,
    cfg: &OrderConfig,
) -> Result<OrderCertificate> {
    require_means(x, y)?;
    let kind = OrderKind::IntegratedSurvival { x0 };
    let points = retention_grid(x, y, Some(x0), cfg.grid_points)?;
    match scan(points, |t| isf_gap(x, y, t)) {
        Ok(s) => Ok(certificate_from_scan(kind, &s, cfg)),
        Err(e) => Ok(OrderCertificate::inconclusive(kind, cfg, &e)),
    }
}

/// If `X ≤_{p₀-tvar} Y` then the integrated survival of `Y` dominates from
/// `F⁻¹(p₀)` on. Returns the certificate for that conclusion.
pub fn tvar_implies_isf(
    x: &dyn RiskLaw,
    y: &dyn RiskLaw,
    p0: f64,
    cfg: &OrderConfig,
) -> Result<OrderCertificate> {
    check_probability_open(p0)?;
    let x0 = x.quantile(p0)?;
    check_isf_from(x, y, x0, cfg)
}

/// Integrated-survival dominance from `x0` gives `X ≤_{G(x0)-tvar} Y`.
///
/// Returns the p₀-tvar certificate at `G(x0)`. It is marked inconclusive when
/// the premise does not hold, or when `F⁻¹(p₀) ≤ G⁻¹(p₀)` and the two sides
/// of the equivalent integrated-survival condition disagree.
pub fn isf_implies_tvar(
    x: &dyn RiskLaw,
    y: &dyn RiskLaw,
    x0: f64,
    cfg: &OrderConfig,
) -> Result<OrderCertificate> {
    let premise = check_isf_from(x, y, x0, cfg)?;
    let p0 = y.cdf(x0);
    check_level(p0)?;
    let mut conclusion = check_p0_tvar(x, y, p0, cfg)?;
    if !premise.holds() {
        conclusion.verdict = Verdict::Inconclusive;
        conclusion.note = Some(format!(
            "premise failed: integrated survival not dominated from {x0}"
        ));
        return Ok(conclusion);
    }
    if p0 > 0.0 {
        let fx = x.quantile(p0)?;
        let gy = y.quantile(p0)?;
        if fx <= gy {
            let equivalent = check_isf_from(x, y, fx, cfg)?;
            if equivalent.holds() != conclusion.holds() {
                conclusion.verdict = Verdict::Inconclusive;
                conclusion.note = Some(format!(
                    "equivalence broken: tvar order {:?} but integrated survival from {fx} {:?}",
                    conclusion.verdict, equivalent.verdict
                ));
            } else {
                conclusion.note = Some(format!(
                    "equivalent integrated-survival condition from {fx} agrees"
                ));
            }
        }
    }
    Ok(conclusion)
}

fn logistic_cdf_std(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Closed-form crossing of two members of the same family, when the family
/// admits one. `None` means the pair has no closed form.
fn closed_form_crossings(x: &Distribution, y: &Distribution) -> Option<CrossingReport> {
    if x.family() != y.family() {
        return None;
    }
    let (a1, b1) = x.params();
    let (a2, b2) = y.params();
    let none = CrossingReport {
        sign_changes: 0,
        crossings: vec![],
        last_change_direction: CrossingDirection::None,
        closed_form: true,
    };
    let one = |p: f64, up: bool| {
        if p > 0.0 && p < 1.0 {
            CrossingReport {
                sign_changes: 1,
                crossings: vec![p],
                last_change_direction: if up {
                    CrossingDirection::MinusToPlus
                } else {
                    CrossingDirection::PlusToMinus
                },
                closed_form: true,
            }
        } else {
            none.clone()
        }
    };
    Some(match x.family() {
        // G⁻¹ - F⁻¹ = (μ₂-μ₁) + (σ₂-σ₁) z(p), z increasing
        Family::Normal | Family::LogNormal | Family::Logistic | Family::LogLogistic => {
            if b1 == b2 {
                return Some(none);
            }
            let z = (a1 - a2) / (b2 - b1);
            let p = match x.family() {
                Family::Normal | Family::LogNormal => std_normal_cdf(z),
                _ => logistic_cdf_std(z),
            };
            one(p, b2 > b1)
        }
        // λ₂ t^(1/k₂) - λ₁ t^(1/k₁), t = -ln(1-p)
        Family::Weibull => {
            if b1 == b2 {
                return Some(none);
            }
            let t = (a1 / a2).powf(b1 * b2 / (b1 - b2));
            one(-(-t).exp_m1(), b2 < b1)
        }
        // k₂ q^(-1/a₂) - k₁ q^(-1/a₁), q = 1-p
        Family::Pareto => {
            if a1 == a2 {
                return Some(none);
            }
            let q = (b1 / b2).powf(a1 * a2 / (a2 - a1));
            one(1.0 - q, a2 < a1)
        }
    })
}

const MAX_CROSSINGS: usize = 64;

/// Sign changes of `G⁻¹ - F⁻¹`.
///
/// Same-family catalog pairs use the exact crossing; anything else is
/// scanned on a logit-spaced grid and each sign change is bisected. Points
/// where `|G⁻¹ - F⁻¹| < 1e-12 · max(1, |F⁻¹|, |G⁻¹|)` count as zeros and are
/// dropped.
pub fn quantile_crossings(x: &dyn RiskLaw, y: &dyn RiskLaw) -> Result<CrossingReport> {
    if let (Some(dx), Some(dy)) = (x.as_distribution(), y.as_distribution()) {
        if let Some(report) = closed_form_crossings(dx, dy) {
            return Ok(report);
        }
    }
    let sign_at = |p: f64| -> Result<i8> {
        let f = x.quantile(p)?;
        let g = y.quantile(p)?;
        let d = g - f;
        let zero = 1e-12 * f.abs().max(g.abs()).max(1.0);
        Ok(if d.abs() < zero {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        })
    };
    let mut grid = Vec::with_capacity(5000);
    let span = 23.0; // logit(1 - 1e-10)
    for i in 0..=4000 {
        let z = -span + 2.0 * span * i as f64 / 4000.0;
        grid.push(logistic_cdf_std(z));
    }
    for i in 1..1000 {
        grid.push(i as f64 / 1000.0);
    }
    let grid = sort_dedup(grid);
    let mut last: Option<(f64, i8)> = None;
    let mut crossings = Vec::new();
    let mut last_dir = CrossingDirection::None;
    for &p in &grid {
        let s = sign_at(p)?;
        if s == 0 {
            continue;
        }
        if let Some((lp, ls)) = last {
            if ls != s {
                let root = bisect_predicate(|t| Ok(sign_at(t)? == ls), lp, p, 1e-13)?;
                crossings.push(root);
                last_dir = if s > 0 {
                    CrossingDirection::MinusToPlus
                } else {
                    CrossingDirection::PlusToMinus
                };
                if crossings.len() > MAX_CROSSINGS {
                    return Err(Error::Resolution(format!(
                        "more than {MAX_CROSSINGS} quantile crossings"
                    )));
                }
            }
        }
        last = Some((p, s));
    }
    Ok(CrossingReport {
        sign_changes: crossings.len(),
        crossings,
        last_change_direction: last_dir,
        closed_form: false,
    })
}

/// Closed-form crossing level for same-family pairs where `X` has the larger
/// mean and `Y` the heavier spread, an upper bound for [`min_p0`].
///
/// - Normal / LogNormal: `μ₁ > μ₂`, `σ₁ < σ₂`, level `Φ((μ₁-μ₂)/(σ₂-σ₁))`
/// - Logistic / LogLogistic: same conditions, standard logistic cdf
/// - Weibull: `E[X] > E[Y]`, `k₂ < k₁`, level `1 - exp(-(λ₁/λ₂)^(k₁k₂/(k₁-k₂)))`
/// - Pareto: `E[X] > E[Y]`, `a₂ < a₁`, level `1 - (k₁/k₂)^(a₁a₂/(a₂-a₁))`
pub fn parametric_p0(x: &Distribution, y: &Distribution) -> Result<f64> {
    if x.family() != y.family() {
        return Err(Error::NotApplicable(format!(
            "{} and {} belong to different families",
            x, y
        )));
    }
    let (a1, b1) = x.params();
    let (a2, b2) = y.params();
    let not_applicable = |why: &str| Err(Error::NotApplicable(format!("{x} vs {y}: {why}")));
    let means = || -> Option<(f64, f64)> { Some((x.mean_closed()?, y.mean_closed()?)) };
    let level = match x.family() {
        Family::Normal | Family::LogNormal | Family::Logistic | Family::LogLogistic => {
            if !(a1 > a2 && b1 < b2) {
                return not_applicable("needs larger location and smaller scale for X");
            }
            let z = (a1 - a2) / (b2 - b1);
            if matches!(x.family(), Family::Normal | Family::LogNormal) {
                std_normal_cdf(z)
            } else {
                logistic_cdf_std(z)
            }
        }
        Family::Weibull => {
            match means() {
                Some((mx, my)) if mx > my && b2 < b1 => {}
                _ => return not_applicable("needs E[X] > E[Y] and a smaller shape for Y"),
            }
            let t = (a1 / a2).powf(b1 * b2 / (b1 - b2));
            -(-t).exp_m1()
        }
        Family::Pareto => {
            match means() {
                Some((mx, my)) if mx > my && a2 < a1 => {}
                _ => return not_applicable("needs finite E[X] > E[Y] and a heavier tail for Y"),
            }
            1.0 - (b1 / b2).powf(a1 * a2 / (a2 - a1))
        }
    };
    Ok(level)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRatio {
    pub p: f64,
    pub x: f64,
    pub ratio: f64,
}

/// Default levels `0.9, 0.99, …, 1 - 1e-8`.
pub fn default_tail_levels() -> Vec<f64> {
    (1..=8).map(|k| 1.0 - 10f64.powi(-k)).collect()
}

/// Density ratio `f(x)/g(x)` at `x = G⁻¹(p)`.
pub fn rojo_tail_ratio(x: &dyn RiskLaw, y: &dyn RiskLaw, levels: &[f64]) -> Result<Vec<TailRatio>> {
    levels
        .iter()
        .map(|&p| {
            let t = y.quantile(p)?;
            let f = x.density(t)?;
            let g = y.density(t)?;
            Ok(TailRatio {
                p,
                x: t,
                ratio: f / g,
            })
        })
        .collect()
}
