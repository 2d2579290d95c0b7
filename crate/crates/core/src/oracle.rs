//! Brute-force verifiers that share no code path with the closed forms.
//!
//! Sampling is inverse-transform only. Uniforms come from ChaCha20 keyed by
//! the seed, with one stream per fixed-size chunk, so results do not depend
//! on how many threads rayon uses.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::{Distribution, Family, RiskLaw, TailBehavior};
use crate::orders::{min_p0, parametric_p0, MinP0, OrderConfig};
use crate::error::{check_level, Error, Result};

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub sample_size: usize,
    pub seed: u64,
    pub quad_panels: usize,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            sample_size: 1_000_000,
            seed: 20_240_601,
            quad_panels: 1 << 16,
            tolerance: 1e-6,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_size < 1000 {
            return Err(Error::InvalidParameter(format!(
                "sample size {} is below 1000",
                self.sample_size
            )));
        }
        if self.quad_panels == 0 {
            return Err(Error::InvalidParameter("quad_panels must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Uniform on the open interval `(0,1)` from 53 random bits.
fn open_uniform(rng: &mut ChaCha20Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Generator for one stream of `seed`; identical across calls.
fn chunk_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn estimate(self) -> McEstimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        McEstimate {
            estimate: self.mean,
            std_error: (var / self.n).sqrt(),
        }
    }
}

/// Sample moments of `f(q)` with `q` uniform on `(0, 1-p)`, over
/// `cfg.sample_size` draws taken from streams starting at `stream_base`.
fn sample_tail<F>(cfg: &OracleConfig, p: f64, stream_base: u64, f: F) -> Result<McEstimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let chunks = cfg.sample_size.div_ceil(CHUNK);
    let parts: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, stream_base + c as u64);
            let len = CHUNK.min(cfg.sample_size - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                let q = (1.0 - p) * open_uniform(&mut rng);
                m.push(f(q)?);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for part in parts {
        total = total.merge(part?);
    }
    Ok(total.estimate())
}

fn require_finite_mean(law: &dyn RiskLaw) -> Result<()> {
    if law.has_finite_mean() {
        Ok(())
    } else {
        Err(Error::InfiniteMean(format!("{} has no finite mean", law.label())))
    }
}

/// Monte Carlo TVaR: the mean of `F⁻¹(U)` with `U` uniform on `(p, 1)`.
///
/// Laws sampled with the same seed see the same uniforms.
pub fn mc_tvar(law: &dyn RiskLaw, p: f64, cfg: &OracleConfig) -> Result<McEstimate> {
    require_finite_mean(law)?;
    check_level(p)?;
    sample_tail(cfg, p, 0, |q| law.quantile_upper(q))
}

/// Draws `n` variates by inverse transform.
pub fn sample(law: &dyn RiskLaw, n: usize, seed: u64) -> Result<Vec<f64>> {
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len)
                .map(|_| law.quantile_upper(open_uniform(&mut rng)))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePoint {
    pub p: f64,
    pub gap: f64,
    pub std_error: f64,
}

/// Sampled `TVaR_p(Y) - TVaR_p(X)` on `grid`, with common uniforms for both
/// laws and an independent stream family per grid point.
pub fn mc_order_probe(
    x: &dyn RiskLaw,
    y: &dyn RiskLaw,
    grid: &[f64],
    cfg: &OracleConfig,
) -> Result<Vec<ProbePoint>> {
    require_finite_mean(x)?;
    require_finite_mean(y)?;
    grid.iter()
        .enumerate()
        .map(|(i, &p)| {
            check_level(p)?;
            let est = sample_tail(cfg, p, (i as u64 + 1) << 32, |q| {
                Ok(y.quantile_upper(q)? - x.quantile_upper(q)?)
            })?;
            Ok(ProbePoint {
                p,
                gap: est.estimate,
                std_error: est.std_error,
            })
        })
        .collect()
}

/// Fixed-panel midpoint rule for `∫_x^∞ F̄`, after mapping `[x, ∞)` onto
/// `[0, 1)` by `t ↦ x + L·t/(1-t)` with `L` the central 98% range of the law.
/// Survival beyond the `1 - 1e-15` quantile is ignored.
pub fn naive_stop_loss(law: &dyn RiskLaw, x: f64, cfg: &OracleConfig) -> Result<f64> {
    require_finite_mean(law)?;
    cfg.validate()?;
    let cutoff = law.quantile_upper(1e-15)?;
    if x >= cutoff {
        return Ok(0.0);
    }
    let (lo, _) = law.support();
    let mut shift = 0.0;
    let start = if lo.is_finite() && x < lo {
        shift = lo - x;
        lo
    } else {
        x
    };
    let spread = (law.quantile_upper(0.01)? - law.quantile(0.01)?).max(1e-300);
    let n = cfg.quad_panels;
    let h = 1.0 / n as f64;
    let total: f64 = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            let v = start + spread * t / (1.0 - t);
            if v >= cutoff {
                0.0
            } else {
                law.survival(v) * spread / ((1.0 - t) * (1.0 - t))
            }
        })
        .sum();
    Ok(shift + total * h)
}

/// Nondecreasing convex maps used to probe closure of the order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConvexMap {
    /// `a·t + b`, `a > 0`.
    Affine { a: f64, b: f64 },
    /// `max(t, c)`; convex and nondecreasing but flat below `c`.
    Floor { c: f64 },
    /// `t + max(t - c, 0)²`.
    Hinge { c: f64 },
    /// `exp(t / c)`, `c > 0`.
    Exp { c: f64 },
}

impl ConvexMap {
    pub fn apply(&self, t: f64) -> f64 {
        match *self {
            ConvexMap::Affine { a, b } => a * t + b,
            ConvexMap::Floor { c } => t.max(c),
            ConvexMap::Hinge { c } => t + (t - c).max(0.0).powi(2),
            ConvexMap::Exp { c } => (t / c).exp(),
        }
    }

    /// Largest `t` with `φ(t) ≤ y`, so that `P(φ(X) ≤ y) = F(φ⁻¹(y))`.
    pub fn invert(&self, y: f64) -> f64 {
        match *self {
            ConvexMap::Affine { a, b } => (y - b) / a,
            ConvexMap::Floor { c } => {
                if y < c {
                    f64::NEG_INFINITY
                } else {
                    y
                }
            }
            ConvexMap::Hinge { c } => {
                if y <= c {
                    y
                } else {
                    c + 0.5 * (-1.0 + (1.0 + 4.0 * (y - c)).sqrt())
                }
            }
            ConvexMap::Exp { c } => {
                if y <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    c * y.ln()
                }
            }
        }
    }
}

/// The law of `φ(X)` for a convex map `φ`.
#[derive(Debug, Clone)]
pub struct Transformed<L> {
    base: L,
    map: ConvexMap,
    tail: TailBehavior,
}

/// Builds `φ(X)`. The exponential map is only accepted on bounded laws and
/// on Normal laws, where the image keeps a finite mean.
pub fn transform<L: RiskLaw>(base: L, map: ConvexMap) -> Result<Transformed<L>> {
    let tail = match map {
        ConvexMap::Affine { a, .. } => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!("affine slope {a} must be positive")));
            }
            base.tail()
        }
        ConvexMap::Floor { .. } => base.tail(),
        ConvexMap::Hinge { .. } => match base.tail() {
            TailBehavior::Power(i) => TailBehavior::Power(i / 2.0),
            other => other,
        },
        ConvexMap::Exp { c } => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!("exp scale {c} must be positive")));
            }
            let normal = base
                .as_distribution()
                .is_some_and(|d| d.family() == crate::Family::Normal);
            match base.tail() {
                TailBehavior::Bounded => TailBehavior::Bounded,
                TailBehavior::Light if normal => TailBehavior::Light,
                _ => {
                    return Err(Error::NotApplicable(format!(
                        "exp map on {} may lose the finite mean",
                        base.label()
                    )))
                }
            }
        }
    };
    Ok(Transformed { base, map, tail })
}

impl<L: RiskLaw> RiskLaw for Transformed<L> {
    fn label(&self) -> String {
        format!("{:?}({})", self.map, self.base.label())
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.map.apply(self.base.quantile(p)?))
    }

    fn quantile_upper(&self, q: f64) -> Result<f64> {
        Ok(self.map.apply(self.base.quantile_upper(q)?))
    }

    fn cdf(&self, x: f64) -> f64 {
        self.base.cdf(self.map.invert(x))
    }

    fn survival(&self, x: f64) -> f64 {
        self.base.survival(self.map.invert(x))
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        (self.map.apply(lo), self.map.apply(hi))
    }

    fn tail(&self) -> TailBehavior {
        self.tail
    }

    fn is_continuous(&self) -> bool {
        self.base.is_continuous() && !matches!(self.map, ConvexMap::Floor { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Paper,
    Trivial,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fixture {
    pub id: String,
    pub description: String,
    pub inputs: Value,
    pub expected: Value,
    pub provenance: Provenance,
    pub seed: Option<u64>,
    pub config: Value,
}

/// A random catalog member with finite variance.
///
/// Ranges: Pareto shape in [2.5, 8] and scale in [0.5, 5]; Weibull scale in
/// [0.5, 5] and shape in [0.5, 4]; Normal and Logistic location in [-5, 5]
/// and scale in [0.1, 5]; LogNormal location in [-1, 1] and scale in
/// [0.1, 1]; LogLogistic location in [-1, 1] and scale in [0.05, 0.4].
pub fn random_law<R: Rng + ?Sized>(family: Family, rng: &mut R) -> Distribution {
    let (a, b) = match family {
        Family::Pareto => (rng.random_range(2.5..8.0), rng.random_range(0.5..5.0)),
        Family::Weibull => (rng.random_range(0.5..5.0), rng.random_range(0.5..4.0)),
        Family::Normal | Family::Logistic => {
            (rng.random_range(-5.0..5.0), rng.random_range(0.1..5.0))
        }
        Family::LogNormal => (rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0)),
        Family::LogLogistic => (rng.random_range(-1.0..1.0), rng.random_range(0.05..0.4)),
    };
    Distribution::new(family, a, b).expect("sampled parameters are valid")
}

/// A random same-family pair meeting the closed-form crossing conditions,
/// so that `parametric_p0` applies.
pub fn random_parametric_pair<R: Rng + ?Sized>(family: Family, rng: &mut R) -> (Distribution, Distribution) {
    loop {
        let x = random_law(family, rng);
        let y = random_law(family, rng);
        if parametric_p0(&x, &y).is_ok() {
            return (x, y);
        }
    }
}

/// A random pair with `X ≤_{p₀-tvar} Y` for some `p₀ ≤ max_p0`, returned
/// with its minimal `p₀`. Half the draws are same-family pairs meeting the
/// crossing conditions, half are arbitrary catalog pairs.
pub fn random_ordered_pair<R: Rng + ?Sized>(
    rng: &mut R,
    max_p0: f64,
    cfg: &OrderConfig,
) -> Result<(Distribution, Distribution, f64)> {
    for _ in 0..10_000 {
        let fx = Family::ALL[rng.random_range(0..Family::ALL.len())];
        let (x, y) = if rng.random_bool(0.5) {
            random_parametric_pair(fx, rng)
        } else {
            let fy = Family::ALL[rng.random_range(0..Family::ALL.len())];
            (random_law(fx, rng), random_law(fy, rng))
        };
        if let MinP0::Ordered(p0) = min_p0(&x, &y, cfg)? {
            if p0 <= max_p0 {
                return Ok((x, y, p0));
            }
        }
    }
    Err(Error::Numerical("no ordered pair found in 10000 draws".into()))
}

/// Configuration used for the frozen fixture file.
pub fn fixture_config() -> OracleConfig {
    OracleConfig {
        sample_size: 400_000,
        ..OracleConfig::default()
    }
}

fn mc_fixture(id: &str, description: &str, law: &Distribution, p: f64, cfg: &OracleConfig) -> Result<Fixture> {
    let est = mc_tvar(law, p, cfg)?;
    Ok(Fixture {
        id: id.into(),
        description: description.into(),
        inputs: json!({ "law": law.to_string(), "p": p }),
        expected: json!({ "estimate": est.estimate, "std_error": est.std_error }),
        provenance: Provenance::Derived,
        seed: Some(cfg.seed),
        config: serde_json::to_value(cfg).expect("config serializes"),
    })
}

/// Recomputes every oracle-derived fixture. Output is deterministic.
pub fn derived_fixtures() -> Result<Vec<Fixture>> {
    let cfg = fixture_config();
    let p73 = Distribution::pareto(7.0, 3.0)?;
    let p32 = Distribution::pareto(3.0, 2.0)?;
    let w31 = Distribution::weibull(3.0, 1.0)?;
    let p151 = Distribution::pareto(1.5, 1.0)?;
    let mut out = vec![
        mc_fixture("mc_tvar_pareto_7_3_p0", "Monte Carlo mean of Pareto(7,3)", &p73, 0.0, &cfg)?,
        mc_fixture("mc_tvar_pareto_3_2_p0", "Monte Carlo mean of Pareto(3,2)", &p32, 0.0, &cfg)?,
        mc_fixture(
            "mc_tvar_pareto_7_3_crossing",
            "Monte Carlo TVaR of Pareto(7,3) at the golden crossing level",
            &p73,
            0.55482,
            &cfg,
        )?,
        mc_fixture(
            "mc_tvar_weibull_3_1_crossing",
            "Monte Carlo TVaR of Weibull(3,1) at the mixed-pair crossing level",
            &w31,
            0.68147,
            &cfg,
        )?,
        mc_fixture(
            "mc_tvar_pareto_1_5_1_crossing",
            "Monte Carlo TVaR of Pareto(1.5,1) at the mixed-pair crossing level",
            &p151,
            0.68147,
            &cfg,
        )?,
    ];

    let probe = mc_order_probe(&p73, &p32, &[0.3, 0.7], &cfg)?;
    out.push(Fixture {
        id: "mc_probe_golden_pair".into(),
        description: "Sampled TVaR gap of the golden Pareto pair below and above the crossing".into(),
        inputs: json!({ "x": p73.to_string(), "y": p32.to_string(), "grid": [0.3, 0.7] }),
        expected: serde_json::to_value(&probe).expect("probe serializes"),
        provenance: Provenance::Derived,
        seed: Some(cfg.seed),
        config: serde_json::to_value(cfg).expect("config serializes"),
    });

    let quad_cfg = OracleConfig {
        sample_size: 1000,
        ..OracleConfig::default()
    };
    let sl = naive_stop_loss(&p32, 2.0, &quad_cfg)?;
    out.push(Fixture {
        id: "naive_stop_loss_pareto_3_2_at_2".into(),
        description: "Midpoint-rule integrated survival of Pareto(3,2) from 2".into(),
        inputs: json!({ "law": p32.to_string(), "x": 2.0 }),
        expected: json!({ "value": sl }),
        provenance: Provenance::Derived,
        seed: None,
        config: serde_json::to_value(quad_cfg).expect("config serializes"),
    });

    out.push(Fixture {
        id: "golden_pair_min_p0".into(),
        description: "Exact crossing of TVaR curves for Pareto(7,3) vs Pareto(3,2): 1 - (6/7)^(21/4)".into(),
        inputs: json!({ "x": p73.to_string(), "y": p32.to_string() }),
        expected: json!({ "min_p0": 1.0 - (6.0f64 / 7.0).powf(21.0 / 4.0) }),
        provenance: Provenance::Derived,
        seed: None,
        config: json!({ "method": "analytic" }),
    });

    // TVaR curves of W(3,1) and P(1.5,1) touch where e^{2t/3} = 1 + t, t = -ln(1-p).
    let t = crate::roots::brent(|t| (2.0 * t / 3.0).exp() - 1.0 - t, 0.5, 3.0, 1e-15)?;
    let p0 = -(-t).exp_m1();
    out.push(Fixture {
        id: "mixed_pair_min_p0".into(),
        description: "Exact TVaR crossing of Weibull(3,1) vs Pareto(1.5,1), solved from e^(2t/3) = 1 + t".into(),
        inputs: json!({ "x": w31.to_string(), "y": p151.to_string() }),
        expected: json!({ "min_p0": p0, "quantile_at_p0": 3.0 * t }),
        provenance: Provenance::Derived,
        seed: None,
        config: json!({ "method": "brent", "tolerance": 1e-15 }),
    });
    Ok(out)
}

/// Pretty JSON with a trailing newline.
pub fn fixtures_json(fixtures: &[Fixture]) -> String {
    let mut s = serde_json::to_string_pretty(fixtures).expect("fixtures serialize");
    s.push('\n');
    s
}
