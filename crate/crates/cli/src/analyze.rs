use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use tailrisk::inference::{
    fit_mle, read_price_file, runs_test, wilcoxon_signed_rank, FitReport, ReturnSeries, TestReport,
};
use tailrisk::orders::{check_icx, min_p0, parametric_p0, MinP0, OrderConfig, Verdict};
use tailrisk::risk::tvar;
use tailrisk::{EmpiricalSample, Error, Family, RiskLaw};

use crate::{emit_json, CliError};

#[derive(Serialize)]
struct SeriesSummary {
    source: String,
    n: usize,
    returns: Vec<f64>,
}

#[derive(Serialize)]
struct Fit {
    series: &'static str,
    family: Family,
    report: Option<FitReport>,
}

#[derive(Serialize)]
struct EmpiricalOrder {
    min_p0: Option<MinP0>,
    icx: Option<Verdict>,
}

#[derive(Serialize)]
struct FittedOrder {
    family: Family,
    min_p0: Option<MinP0>,
    parametric_p0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parametric_note: Option<String>,
}

#[derive(Serialize)]
struct SectionError {
    section: String,
    message: String,
}

#[derive(Serialize)]
struct Report {
    x: SeriesSummary,
    y: SeriesSummary,
    runs_x: Option<TestReport>,
    runs_y: Option<TestReport>,
    wilcoxon: Option<TestReport>,
    fits: Vec<Fit>,
    empirical_order: EmpiricalOrder,
    fitted_orders: Vec<FittedOrder>,
    seed: u64,
    errors: Vec<SectionError>,
}

struct Collector(Vec<SectionError>);

impl Collector {
    fn keep<T>(&mut self, section: &str, r: Result<T, Error>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.0.push(SectionError {
                    section: section.into(),
                    message: e.to_string(),
                });
                None
            }
        }
    }
}

fn parse_families(spec: &str) -> Result<Vec<Family>, CliError> {
    spec.split(',')
        .map(|name| {
            let name = name.trim();
            match Family::parse(name) {
                Some(f @ (Family::Normal | Family::Logistic)) => Ok(f),
                _ => Err(CliError::Parse(format!(
                    "cannot fit `{name}`; choose from normal, logistic"
                ))),
            }
        })
        .collect()
}

fn load(path: &Path) -> Result<ReturnSeries, CliError> {
    read_price_file(path).map_err(|e| match e {
        Error::Ingestion { row, message } => {
            CliError::Parse(format!("{}:{row}: {message}", path.display()))
        }
        other => CliError::Parse(format!("{}: {other}", path.display())),
    })
}

pub fn run(
    prices_x: &Path,
    prices_y: &Path,
    fit: &str,
    plot_dir: Option<&Path>,
    cfg: &OrderConfig,
    seed: u64,
) -> Result<u8, CliError> {
    let families = parse_families(fit)?;
    let sx = load(prices_x)?;
    let sy = load(prices_y)?;
    let mut errors = Collector(Vec::new());

    let runs_x = errors.keep("runs_x", runs_test(&sx));
    let runs_y = errors.keep("runs_y", runs_test(&sy));
    let wilcoxon = errors.keep("wilcoxon", wilcoxon_signed_rank(&sx, &sy));

    let mut fits = Vec::new();
    let mut fitted_orders = Vec::new();
    for &family in &families {
        let fx = errors.keep(&format!("fit_x_{family}"), fit_mle(&sx, family));
        let fy = errors.keep(&format!("fit_y_{family}"), fit_mle(&sy, family));
        if let (Some(a), Some(b)) = (&fx, &fy) {
            let (dx, dy) = (a.distribution(), b.distribution());
            let m = errors.keep(&format!("fitted_min_p0_{family}"), min_p0(&dx, &dy, cfg));
            let (parametric, note) = match parametric_p0(&dx, &dy) {
                Ok(p) => (Some(p), None),
                Err(e) => (None, Some(e.to_string())),
            };
            fitted_orders.push(FittedOrder {
                family,
                min_p0: m,
                parametric_p0: parametric,
                parametric_note: note,
            });
        }
        fits.push(Fit { series: "x", family, report: fx });
        fits.push(Fit { series: "y", family, report: fy });
    }

    let ex = EmpiricalSample::new(sx.returns.clone()).map(|s| s.named("x"));
    let ey = EmpiricalSample::new(sy.returns.clone()).map(|s| s.named("y"));
    let empirical_order = match (ex, ey) {
        (Ok(ex), Ok(ey)) => {
            let min = errors.keep("empirical_min_p0", min_p0(&ex, &ey, cfg));
            let icx = errors.keep("empirical_icx", check_icx(&ex, &ey, cfg)).map(|c| c.verdict);
            if let Some(dir) = plot_dir {
                write_plots(dir, &ex, &ey, &fits).map_err(CliError::Runtime)?;
            }
            EmpiricalOrder { min_p0: min, icx }
        }
        (a, b) => {
            errors.keep("empirical_x", a);
            errors.keep("empirical_y", b);
            EmpiricalOrder { min_p0: None, icx: None }
        }
    };

    let failed = !errors.0.is_empty();
    let report = Report {
        x: SeriesSummary {
            source: sx.source_name.clone(),
            n: sx.len(),
            returns: sx.returns.clone(),
        },
        y: SeriesSummary {
            source: sy.source_name.clone(),
            n: sy.len(),
            returns: sy.returns.clone(),
        },
        runs_x,
        runs_y,
        wilcoxon,
        fits,
        empirical_order,
        fitted_orders,
        seed,
        errors: errors.0,
    };
    emit_json(&report)?;
    for e in &report.errors {
        eprintln!("tailrisk: {}: {}", e.section, e.message);
    }
    Ok(if failed { 4 } else { 0 })
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), String> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))
}

fn ecdf_csv(s: &EmpiricalSample) -> String {
    let n = s.len() as f64;
    let mut out = String::from("value,cdf\n");
    for (i, v) in s.values().iter().enumerate() {
        let _ = writeln!(out, "{v},{}", (i + 1) as f64 / n);
    }
    out
}

fn histogram_csv(s: &EmpiricalSample, fits: &[&FitReport]) -> String {
    let v = s.values();
    let (lo, hi) = (v[0], v[v.len() - 1]);
    let bins = ((v.len() as f64).sqrt().round() as usize).clamp(10, 100);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &x in v {
        let i = (((x - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let mut out = String::from("bin_start,bin_end,density");
    for f in fits {
        let _ = write!(out, ",{}_density", f.family);
    }
    out.push('\n');
    let n = v.len() as f64;
    for (i, c) in counts.iter().enumerate() {
        let a = lo + width * i as f64;
        let b = a + width;
        let _ = write!(out, "{a},{b},{}", *c as f64 / (n * width));
        for f in fits {
            let d = f.distribution().density(0.5 * (a + b)).unwrap_or(f64::NAN);
            let _ = write!(out, ",{d}");
        }
        out.push('\n');
    }
    out
}

fn write_plots(
    dir: &Path,
    ex: &EmpiricalSample,
    ey: &EmpiricalSample,
    fits: &[Fit],
) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    write_file(dir, "ecdf_x.csv", &ecdf_csv(ex))?;
    write_file(dir, "ecdf_y.csv", &ecdf_csv(ey))?;
    let of = |series: &str| -> Vec<&FitReport> {
        fits.iter()
            .filter(|f| f.series == series)
            .filter_map(|f| f.report.as_ref())
            .collect()
    };
    let (fx, fy) = (of("x"), of("y"));
    write_file(dir, "histogram_x.csv", &histogram_csv(ex, &fx))?;
    write_file(dir, "histogram_y.csv", &histogram_csv(ey, &fy))?;

    let mut header = String::from("p,x_empirical,y_empirical");
    for f in &fx {
        let _ = write!(header, ",x_{}", f.family);
    }
    for f in &fy {
        let _ = write!(header, ",y_{}", f.family);
    }
    let mut out = header + "\n";
    for i in 0..200 {
        let p = i as f64 / 200.0;
        let _ = write!(out, "{p}");
        let mut cell = |law: &dyn RiskLaw| {
            let t = tvar(law, p).unwrap_or(f64::NAN);
            let _ = write!(out, ",{t}");
        };
        cell(ex);
        cell(ey);
        for f in fx.iter().chain(&fy) {
            cell(&f.distribution());
        }
        out.push('\n');
    }
    write_file(dir, "tvar_curves.csv", &out)
}
