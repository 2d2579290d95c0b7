//! From price series to fitted laws.
//!
//! Returns follow the loss convention `r_t = -ln(p_t / p_{t-1})`, so a price
//! drop is a positive return.

use std::f64::consts::PI;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use crate::distributions::{Distribution, Family, RiskLaw};
use crate::error::{Error, OptimizerStep, Result};
use crate::special::std_normal_sf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceRow {
    pub date: NaiveDate,
    pub close: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    /// Date of the later price in each pair.
    pub timestamps: Vec<NaiveDate>,
    pub returns: Vec<f64>,
    pub source_name: String,
}

impl ReturnSeries {
    /// Wraps raw returns, labelling them with consecutive days from 2000-01-01.
    pub fn from_returns(returns: Vec<f64>, source_name: impl Into<String>) -> Result<Self> {
        if let Some(i) = returns.iter().position(|r| !r.is_finite()) {
            return Err(Error::Ingestion {
                row: i,
                message: format!("return {} is not finite", returns[i]),
            });
        }
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let timestamps = start.iter_days().take(returns.len()).collect();
        Ok(Self {
            timestamps,
            returns,
            source_name: source_name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    /// Prices implied by the returns, starting from `initial`.
    pub fn reconstruct_prices(&self, initial: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.returns.len() + 1);
        out.push(initial);
        let mut log_price = initial.ln();
        for r in &self.returns {
            log_price -= r;
            out.push(log_price.exp());
        }
        out
    }
}

/// Forms `-ln(p_t/p_{t-1})`. Errors carry the zero-based row index.
pub fn ingest_prices(rows: &[PriceRow], source_name: impl Into<String>) -> Result<ReturnSeries> {
    if rows.len() < 2 {
        return Err(Error::Ingestion {
            row: rows.len(),
            message: format!("need at least 2 price rows, got {}", rows.len()),
        });
    }
    for (i, row) in rows.iter().enumerate() {
        if !(row.close.is_finite() && row.close > 0.0) {
            return Err(Error::Ingestion {
                row: i,
                message: format!("price {} is not strictly positive", row.close),
            });
        }
        if i > 0 && row.date <= rows[i - 1].date {
            return Err(Error::Ingestion {
                row: i,
                message: format!(
                    "date {} does not follow {}",
                    row.date,
                    rows[i - 1].date
                ),
            });
        }
    }
    let returns = rows
        .windows(2)
        .map(|w| -(w[1].close / w[0].close).ln())
        .collect();
    Ok(ReturnSeries {
        timestamps: rows[1..].iter().map(|r| r.date).collect(),
        returns,
        source_name: source_name.into(),
    })
}

/// Parses a `date,close` CSV. Errors carry the 1-based line number.
pub fn parse_prices_csv<R: std::io::Read>(reader: R) -> Result<Vec<PriceRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Ingestion {
        row: 1,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "close" {
        return Err(Error::Ingestion {
            row: 1,
            message: format!("expected header `date,close`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Ingestion {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let bad = |message: String| Error::Ingestion { row: line, message };
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| bad(format!("bad date `{}`: {e}", &record[0])))?;
        let close: f64 = record[1]
            .parse()
            .map_err(|_| bad(format!("bad price `{}`", &record[1])))?;
        rows.push(PriceRow { date, close });
    }
    Ok(rows)
}

/// Reads a price CSV and forms returns; ingestion errors report file line numbers.
pub fn read_price_file(path: &Path) -> Result<ReturnSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let rows = parse_prices_csv(std::io::BufReader::new(file))?;
    ingest_prices(&rows, path.display().to_string()).map_err(|e| match e {
        // Row i of the data sits on line i + 2.
        Error::Ingestion { row, message } => Error::Ingestion {
            row: row + 2,
            message,
        },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Runs,
    WilcoxonSignedRank,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub test: TestKind,
    pub statistic: f64,
    /// Standardized statistic used for the normal approximation.
    pub z: f64,
    pub p_value: f64,
    /// Observations entering the statistic after ties/zeros are dropped.
    pub effective_n: usize,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Wald–Wolfowitz runs test about the sample median, two-sided.
///
/// Values equal to the median are dropped. The normal approximation uses a
/// continuity correction of 1/2 towards the mean run count.
pub fn runs_test(series: &ReturnSeries) -> Result<TestReport> {
    let n = series.len();
    if n < 20 {
        return Err(Error::Precondition(format!(
            "runs test needs at least 20 observations, got {n}"
        )));
    }
    let m = median(&series.returns);
    let signs: Vec<bool> = series
        .returns
        .iter()
        .filter(|&&r| r != m)
        .map(|&r| r > m)
        .collect();
    let n1 = signs.iter().filter(|s| **s).count() as f64;
    let n2 = signs.len() as f64 - n1;
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::Degenerate(
            "all observations lie on one side of the median".into(),
        ));
    }
    let runs = 1 + signs.windows(2).filter(|w| w[0] != w[1]).count();
    let total = n1 + n2;
    let expected = 2.0 * n1 * n2 / total + 1.0;
    let variance = 2.0 * n1 * n2 * (2.0 * n1 * n2 - total) / (total * total * (total - 1.0));
    let dev = runs as f64 - expected;
    let z = if variance > 0.0 {
        dev.signum() * (dev.abs() - 0.5).max(0.0) / variance.sqrt()
    } else {
        0.0
    };
    Ok(TestReport {
        test: TestKind::Runs,
        statistic: runs as f64,
        z,
        p_value: (2.0 * std_normal_sf(z.abs())).min(1.0),
        effective_n: signs.len(),
    })
}

/// Average ranks (1-based) of `values`, with the tie-group sizes.
fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = 0.5 * ((i + 1) + (j + 1)) as f64;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

/// One-sided Wilcoxon signed-rank test of `median(x - y) > 0`.
///
/// Zero differences are dropped; the variance carries the usual tie
/// correction and no continuity correction is applied.
pub fn wilcoxon_signed_rank(x: &ReturnSeries, y: &ReturnSeries) -> Result<TestReport> {
    if x.len() != y.len() {
        return Err(Error::Precondition(format!(
            "paired samples differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 20 {
        return Err(Error::Precondition(format!(
            "signed-rank test needs at least 20 pairs, got {}",
            x.len()
        )));
    }
    let diffs: Vec<f64> = x
        .returns
        .iter()
        .zip(&y.returns)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::Degenerate("all paired differences are zero".into()));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = diffs.len() as f64;
    let expected = n * (n + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    let z = if variance > 0.0 {
        (w_plus - expected) / variance.sqrt()
    } else {
        0.0
    };
    Ok(TestReport {
        test: TestKind::WilcoxonSignedRank,
        statistic: w_plus,
        z,
        p_value: std_normal_sf(z),
        effective_n: diffs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov tail `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    if lambda < 1.18 {
        // Jacobi-transformed series converges fast for small λ.
        let c = PI * PI / (8.0 * lambda * lambda);
        for k in 1..200 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * c).exp();
            sum += term;
            if term < 1e-12 {
                break;
            }
        }
        (1.0 - (2.0 * PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        for k in 1..200 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-12 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// One-sample Kolmogorov–Smirnov distance against `fitted`, with the
/// asymptotic p-value of `√n·D`.
pub fn ks_test(values: &[f64], fitted: &dyn RiskLaw) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::Precondition("empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let statistic = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = fitted.cdf(x);
            ((i + 1) as f64 / n - f).abs().max((f - i as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_sf(n.sqrt() * statistic),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub family: Family,
    pub location: f64,
    pub scale: f64,
    pub location_std_error: f64,
    pub scale_std_error: f64,
    pub log_likelihood: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    /// Always true: the K-S p-value ignores that the parameters were fitted.
    pub parameters_estimated: bool,
    pub iterations: usize,
    pub n: usize,
}

impl FitReport {
    pub fn distribution(&self) -> Distribution {
        Distribution::new(self.family, self.location, self.scale)
            .expect("fitted parameters are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            gradient_tolerance: 1e-9,
            max_iterations: 200,
        }
    }
}

/// Maximum-likelihood fit of a Normal or Logistic law.
pub fn fit_mle(series: &ReturnSeries, family: Family) -> Result<FitReport> {
    fit_mle_with(series, family, &FitConfig::default())
}

pub fn fit_mle_with(series: &ReturnSeries, family: Family, cfg: &FitConfig) -> Result<FitReport> {
    let x = &series.returns;
    let n = x.len();
    if n < 8 {
        return Err(Error::Precondition(format!(
            "fitting needs at least 8 observations, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
    if !(var > 0.0) {
        return Err(Error::Degenerate("sample has zero variance".into()));
    }
    let sd = var.sqrt();
    let (location, scale, log_likelihood, iterations, se) = match family {
        Family::Normal => {
            let ll = -0.5 * nf * ((2.0 * PI * var).ln() + 1.0);
            (mean, sd, ll, 0, (sd / nf.sqrt(), sd / (2.0 * nf).sqrt()))
        }
        Family::Logistic => {
            let (mu, s, ll, it) = logistic_newton(x, mean, sd * 3f64.sqrt() / PI, cfg)?;
            let se_mu = s * 3f64.sqrt() / nf.sqrt();
            let se_s = 3.0 * s / ((PI * PI + 3.0) * nf).sqrt();
            (mu, s, ll, it, (se_mu, se_s))
        }
        other => {
            return Err(Error::NotApplicable(format!(
                "maximum-likelihood fitting supports normal and logistic, not {other}"
            )))
        }
    };
    let fitted = Distribution::new(family, location, scale)?;
    let ks = ks_test(x, &fitted)?;
    Ok(FitReport {
        family,
        location,
        scale,
        location_std_error: se.0,
        scale_std_error: se.1,
        log_likelihood,
        ks_statistic: ks.statistic,
        ks_p_value: ks.p_value,
        parameters_estimated: true,
        iterations,
        n,
    })
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Logistic log-likelihood at `(μ, ln s)`.
pub fn logistic_log_likelihood(x: &[f64], mu: f64, log_s: f64) -> f64 {
    let s = log_s.exp();
    x.iter()
        .map(|&v| {
            let z = (v - mu) / s;
            -z - log_s - 2.0 * softplus(-z)
        })
        .sum()
}

struct LogisticDerivs {
    ll: f64,
    /// Per-observation gradient in `(μ/s, ln s)`.
    grad: [f64; 2],
    /// Per-observation Hessian in `(μ/s, ln s)`.
    hess: [[f64; 2]; 2],
}

fn logistic_derivs(x: &[f64], mu: f64, log_s: f64) -> LogisticDerivs {
    let s = log_s.exp();
    let n = x.len() as f64;
    let (mut ll, mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &v in x {
        let z = (v - mu) / s;
        let t = (0.5 * z).tanh();
        let w = 0.5 * (1.0 - t * t);
        ll += -z - log_s - 2.0 * softplus(-z);
        g0 += t;
        g1 += z * t - 1.0;
        h00 -= w;
        h01 -= t + w * z;
        h11 -= z * t + z * z * w;
    }
    LogisticDerivs {
        ll,
        grad: [g0 / n, g1 / n],
        hess: [[h00 / n, h01 / n], [h01 / n, h11 / n]],
    }
}

/// Newton ascent on `(μ, ln s)` with backtracking; falls back to a gradient
/// step when the Hessian is not negative definite.
fn logistic_newton(x: &[f64], mu0: f64, s0: f64, cfg: &FitConfig) -> Result<(f64, f64, f64, usize)> {
    let mut mu = mu0;
    let mut log_s = s0.ln();
    let mut trace = Vec::new();
    for iteration in 0..=cfg.max_iterations {
        let d = logistic_derivs(x, mu, log_s);
        let gnorm = d.grad[0].hypot(d.grad[1]);
        trace.push(OptimizerStep {
            iteration,
            location: mu,
            scale: log_s.exp(),
            log_likelihood: d.ll,
            gradient_norm: gnorm,
        });
        if gnorm < cfg.gradient_tolerance {
            return Ok((mu, log_s.exp(), d.ll, iteration));
        }
        if iteration == cfg.max_iterations {
            break;
        }
        let [[a, b], [_, c]] = d.hess;
        let det = a * c - b * b;
        // Step in (μ/s, ln s) coordinates.
        let step = if a < 0.0 && det > 0.0 {
            [-(c * d.grad[0] - b * d.grad[1]) / det, -(a * d.grad[1] - b * d.grad[0]) / det]
        } else {
            d.grad
        };
        let s = log_s.exp();
        let slack = 1e-12 * d.ll.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand_mu = mu + t * step[0] * s;
            let cand_ls = log_s + t * step[1];
            let ll = logistic_log_likelihood(x, cand_mu, cand_ls);
            if ll.is_finite() && ll >= d.ll - slack {
                mu = cand_mu;
                log_s = cand_ls;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::Convergence {
        iterations: trace.len().saturating_sub(1),
        trace,
    })
}
