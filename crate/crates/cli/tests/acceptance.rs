//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so that the summary lines are always printed. The
//! process fails when any criterion outside `KNOWN_RED` fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailrisk::inference::{fit_mle, ReturnSeries};
use tailrisk::oracle::{
    derived_fixtures, fixtures_json, mc_tvar, random_law, random_ordered_pair,
    random_parametric_pair, sample, transform, ConvexMap, OracleConfig,
};
use tailrisk::orders::{
    check_icx, check_isf_from, check_p0_tvar, check_tcx, isf_implies_tvar, min_p0,
    parametric_p0, rojo_tail_ratio, default_tail_levels, tvar_implies_isf, MinP0, OrderConfig,
    Verdict,
};
use tailrisk::quad::QuadConfig;
use tailrisk::risk::{
    censor_at, distort, integrated_survival, mean, stop_loss, tvar, tvar_quadrature, Distortion,
};
use tailrisk::{Distribution, Family, RiskLaw};

/// Criteria that fail for reasons recorded in the project notes.
const KNOWN_RED: &[u8] = &[3];

type Outcome = Result<String, String>;

fn main() {
    let criteria: [(u8, &str, fn() -> Outcome); 9] = [
        (1, "golden Pareto pair min_p0", criterion_1),
        (2, "Weibull/Pareto pair min_p0", criterion_2),
        (3, "tcx thresholds for Weibull/Pareto", criterion_3),
        (4, "Pareto means and icx", criterion_4),
        (5, "closed forms vs quadrature and Monte Carlo", criterion_5),
        (6, "order property suite", criterion_6),
        (7, "integration-by-parts identity", criterion_7),
        (8, "synthetic return pipeline", criterion_8),
        (9, "determinism of fixtures and CLI reports", criterion_9),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS [{name}] {detail} ({secs:.2}s)"),
            Err(detail) => {
                let known = KNOWN_RED.contains(&id);
                let tag = if known { " (known red)" } else { "" };
                println!("criterion {id} FAIL{tag} [{name}] {detail} ({secs:.2}s)");
                if !known {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criterion/criteria failed unexpectedly");
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> OrderConfig {
    OrderConfig::default()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let x = Distribution::pareto(7.0, 3.0).unwrap();
    let y = Distribution::pareto(3.0, 2.0).unwrap();
    let m = min_p0(&x, &y, &cfg()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let p = m.level().ok_or("pair reported as not ordered")?;
    ensure((p - 0.55482).abs() <= 1e-3, || format!("min_p0 = {p}"))?;
    ensure(elapsed < 1.0, || format!("took {elapsed}s"))?;
    Ok(format!("min_p0 = {p:.6}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let x = Distribution::weibull(3.0, 1.0).unwrap();
    let y = Distribution::pareto(1.5, 1.0).unwrap();
    let m = min_p0(&x, &y, &cfg()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let p = m.level().ok_or("pair reported as not ordered")?;
    let q = x.quantile(p).map_err(|e| e.to_string())?;
    ensure((p - 0.68147).abs() <= 1e-3, || format!("min_p0 = {p}"))?;
    ensure((3.432 - 5e-3..=3.437 + 5e-3).contains(&q), || format!("quantile = {q}"))?;
    ensure(elapsed < 1.0, || format!("took {elapsed}s"))?;
    Ok(format!("min_p0 = {p:.6}, quantile = {q:.5}"))
}

fn criterion_3() -> Outcome {
    let x = Distribution::weibull(3.0, 1.0).unwrap();
    let y = Distribution::pareto(1.5, 1.0).unwrap();
    let at = |x0: f64| check_tcx(&x, &y, x0, &cfg()).map(|c| c.verdict);
    let top = at(3.43711).map_err(|e| e.to_string())?;
    let mut report = vec![format!("3.43711: {top:?}")];
    let mut wrong = Vec::new();
    if top != Verdict::Holds {
        wrong.push("3.43711 expected Holds".to_string());
    }
    for x0 in [2.0, 3.0, 3.4] {
        let v = at(x0).map_err(|e| e.to_string())?;
        report.push(format!("{x0}: {v:?}"));
        if v != Verdict::Fails {
            let gap = stop_loss(&y, x0).unwrap() - stop_loss(&x, x0).unwrap();
            wrong.push(format!("{x0} expected Fails (stop-loss gap {gap:.4} > 0)"));
        }
    }
    let summary = report.join(", ");
    if wrong.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", wrong.join("; ")))
    }
}

fn criterion_4() -> Outcome {
    let x = Distribution::pareto(7.0, 3.0).unwrap();
    let y = Distribution::pareto(3.0, 2.0).unwrap();
    let (mx, my) = (mean(&x).unwrap(), mean(&y).unwrap());
    ensure(mx == 3.5 && my == 3.0, || format!("means {mx}, {my}"))?;
    let icx = check_icx(&x, &y, &cfg()).map_err(|e| e.to_string())?;
    ensure(icx.verdict == Verdict::Fails, || format!("icx {:?}", icx.verdict))?;
    Ok(format!("means {mx}, {my}; icx Fails at x = {:?}", icx.witness))
}

fn levels() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

fn sweep_laws() -> Vec<Distribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    Family::ALL
        .iter()
        .flat_map(|&f| (0..50).map(|_| random_law(f, &mut rng)).collect::<Vec<_>>())
        .collect()
}

/// Closed forms are checked against quadrature and against a Monte Carlo
/// oracle driven by one seeded uniform stream shared by every law and level.
/// A second pass with an independent stream per law checks that the 3 SE
/// exceedance rate stays near its nominal 0.27%.
fn criterion_5() -> Outcome {
    let (mut quad_bad, mut mc_bad, mut worst_rel, mut worst_z) = (0, 0, 0.0f64, 0.0f64);
    let (mut independent_checks, mut independent_over) = (0usize, 0usize);
    let mut first = None;
    let laws = sweep_laws();
    let shared = OracleConfig {
        sample_size: 10_000,
        seed: 5,
        ..OracleConfig::default()
    };
    for (i, d) in laws.iter().enumerate() {
        let independent = OracleConfig {
            seed: 500 + i as u64,
            ..shared
        };
        for p in levels() {
            let closed = tvar(d, p).map_err(|e| format!("{d} {p}: {e}"))?;
            let quad =
                tvar_quadrature(d, p, QuadConfig::tight()).map_err(|e| format!("{d} {p}: {e}"))?;
            let rel = (closed - quad).abs() / closed.abs();
            worst_rel = worst_rel.max(rel);
            if !(rel <= 1e-8) {
                quad_bad += 1;
                first.get_or_insert_with(|| format!("{d} p={p}: closed {closed} vs quadrature {quad}"));
            }
            let est = mc_tvar(d, p, &shared).map_err(|e| e.to_string())?;
            let z = (closed - est.estimate).abs() / est.std_error;
            worst_z = worst_z.max(z);
            if !(z <= 3.0) {
                mc_bad += 1;
                first.get_or_insert_with(|| {
                    format!("{d} p={p}: closed {closed} vs MC {} ± {}", est.estimate, est.std_error)
                });
            }
            let est = mc_tvar(d, p, &independent).map_err(|e| e.to_string())?;
            independent_checks += 1;
            if (closed - est.estimate).abs() > 3.0 * est.std_error {
                independent_over += 1;
            }
        }
    }
    let rate = independent_over as f64 / independent_checks as f64;
    let summary = format!(
        "{} laws x 99 levels; worst relative quadrature gap {worst_rel:.2e}, worst shared-stream MC z {worst_z:.2}, independent-stream 3 SE exceedance {:.3}%",
        laws.len(),
        100.0 * rate
    );
    if rate > 2.0 * 0.0027 {
        return Err(format!("{summary}; exceedance rate above twice nominal"));
    }
    if quad_bad + mc_bad == 0 {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; {quad_bad} quadrature and {mc_bad} MC violations, first: {}",
            first.unwrap_or_default()
        ))
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    violations: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, violations: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations.push(msg());
        }
    }
}

fn holds(r: tailrisk::Result<tailrisk::OrderCertificate>) -> Result<bool, String> {
    r.map(|c| c.verdict == Verdict::Holds).map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let c = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pairs = Vec::new();
    while pairs.len() < 100 {
        pairs.push(random_ordered_pair(&mut rng, 0.995, &c).map_err(|e| e.to_string())?);
    }
    let mut tallies = Vec::new();

    let mut t = Tally::new("index monotonicity");
    for (x, y, p0) in &pairs {
        let q = p0 + (1.0 - 1e-6 - p0) * rng.random::<f64>();
        let ok = holds(check_p0_tvar(x, y, q, &c))?;
        t.check(ok, || format!("{x} vs {y}: min_p0 {p0}, fails at {q}"));
    }
    tallies.push(t);

    let mut t = Tally::new("transitivity");
    for (x, y, p0) in &pairs {
        let (z, p1) = loop {
            let f = Family::ALL[rng.random_range(0..Family::ALL.len())];
            let z = random_law(f, &mut rng);
            if let MinP0::Ordered(p1) = min_p0(y, &z, &c).map_err(|e| e.to_string())? {
                if p1 <= 0.995 {
                    break (z, p1);
                }
            }
        };
        let p = p0.max(p1);
        let ok = holds(check_p0_tvar(x, &z, p, &c))?;
        t.check(ok, || format!("{x} <= {y} <= {z} at {p}"));
    }
    tallies.push(t);

    let mut t = Tally::new("convex transforms");
    for (x, y, p0) in &pairs {
        let c0 = x.quantile(0.5).unwrap();
        for map in [ConvexMap::Floor { c: c0 }, ConvexMap::Hinge { c: c0 }] {
            let (tx, ty) = (transform(*x, map).unwrap(), transform(*y, map).unwrap());
            if !(tx.has_finite_mean() && ty.has_finite_mean()) {
                continue;
            }
            let ok = holds(check_p0_tvar(&tx, &ty, *p0, &c))?;
            t.check(ok, || format!("{map:?} on {x} vs {y} at {p0}"));
        }
    }
    let mut normals = 0;
    while normals < 100 {
        let (mut x, mut y) = random_parametric_pair(Family::Normal, &mut rng);
        let mut m = min_p0(&x, &y, &c).map_err(|e| e.to_string())?;
        if m == MinP0::NotOrdered {
            std::mem::swap(&mut x, &mut y);
            m = min_p0(&x, &y, &c).map_err(|e| e.to_string())?;
        }
        let Some(p0) = m.level().filter(|&p| p <= 0.995) else {
            continue;
        };
        let scale = x.params().1.max(y.params().1) * rng.random_range(1.0..3.0);
        let map = ConvexMap::Exp { c: scale };
        let (tx, ty) = (transform(x, map).unwrap(), transform(y, map).unwrap());
        let ok = holds(check_p0_tvar(&tx, &ty, p0, &c))?;
        t.check(ok, || format!("{map:?} on {x} vs {y} at {p0}"));
        normals += 1;
    }
    tallies.push(t);

    let mut t = Tally::new("censoring bridge");
    let mut premises = 0;
    for (x, y, _) in &pairs {
        for _ in 0..3 {
            let p0 = rng.random_range(0.01..0.99);
            let cx = censor_at(*x, p0).unwrap();
            let cy = censor_at(*y, p0).unwrap();
            if holds(check_icx(&cx, &cy, &c))? {
                premises += 1;
                let ok = holds(check_p0_tvar(x, y, p0, &c))?;
                t.check(ok, || format!("{x} vs {y}: censored icx holds at {p0} but tvar order fails"));
            }
        }
    }
    if premises < 100 {
        t.violations.push(format!("only {premises} censored pairs met the premise"));
    }
    tallies.push(t);

    let mut t = Tally::new("tvar to integrated survival");
    let mut u = Tally::new("integrated survival to tvar");
    for (x, y, p0) in &pairs {
        let p = if *p0 > 0.0 { *p0 } else { 0.01 };
        let ok = holds(tvar_implies_isf(x, y, p, &c))?;
        t.check(ok, || format!("{x} vs {y} from F^-1({p})"));
        let x0 = x.quantile(p).unwrap();
        let cert = isf_implies_tvar(x, y, x0, &c).map_err(|e| e.to_string())?;
        u.check(cert.verdict == Verdict::Holds, || {
            format!("{x} vs {y} from {x0}: {:?} {:?}", cert.verdict, cert.note)
        });
    }
    tallies.push(t);

    let mut t = Tally::new("tvar and integrated survival equivalence");
    let mut tested = 0;
    while tested < 100 {
        let (x, y, _) = &pairs[rng.random_range(0..pairs.len())];
        let p0 = rng.random_range(0.01..0.999);
        let (fx, gy) = (x.quantile(p0).unwrap(), y.quantile(p0).unwrap());
        if fx > gy {
            continue;
        }
        tested += 1;
        let a = holds(check_p0_tvar(x, y, p0, &c))?;
        let b = holds(check_isf_from(x, y, fx, &c))?;
        t.check(a == b, || format!("{x} vs {y} at {p0}: tvar {a}, integrated survival {b}"));
    }
    tallies.push(t);
    tallies.push(u);

    let mut t = Tally::new("distortion closure");
    for (x, y, p0) in &pairs {
        let p = if *p0 > 0.0 { *p0 } else { 0.01 };
        let h = if rng.random_bool(0.5) {
            Distortion::proportional_hazard(rng.random_range(0.5..1.0)).unwrap()
        } else {
            Distortion::dual_power(rng.random_range(1.0..4.0)).unwrap()
        };
        let (Ok(dx), Ok(dy)) = (distort(*x, h), distort(*y, h)) else {
            continue;
        };
        let q0 = dy.cdf(x.quantile(p).unwrap());
        if !(0.0..1.0).contains(&q0) {
            continue;
        }
        let ok = holds(check_p0_tvar(&dx, &dy, q0, &c))?;
        t.check(ok, || format!("{h:?} on {x} vs {y}: p0 {p}, q0 {q0}"));
    }
    tallies.push(t);

    let mut t = Tally::new("parametric_p0 >= min_p0");
    for f in Family::ALL {
        for _ in 0..100 {
            let (x, y, pp) = loop {
                let (x, y) = random_parametric_pair(f, &mut rng);
                let pp = parametric_p0(&x, &y).map_err(|e| e.to_string())?;
                if pp <= 0.995 {
                    break (x, y, pp);
                }
            };
            let m = min_p0(&x, &y, &c).map_err(|e| e.to_string())?;
            let ok = matches!(m, MinP0::Ordered(q) if pp >= q - 1e-6);
            t.check(ok, || format!("{x} vs {y}: parametric {pp}, min {m:?}"));
        }
    }
    tallies.push(t);

    let mut t = Tally::new("terminal density ratio");
    for (x, y, _) in &pairs {
        let r = rojo_tail_ratio(x, y, &default_tail_levels()).map_err(|e| e.to_string())?;
        let last = r.last().unwrap().ratio;
        t.check(last <= 1.0 + 1e-3, || format!("{x} vs {y}: last ratio {last}"));
    }
    tallies.push(t);

    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for t in &tallies {
        parts.push(format!("{} {}/{}", t.name, t.cases - t.violations.len(), t.cases));
        if t.cases < 100 {
            failures.push(format!("{}: only {} cases", t.name, t.cases));
        }
        if let Some(v) = t.violations.first() {
            failures.push(format!("{}: {} violations, first: {v}", t.name, t.violations.len()));
        }
    }
    let summary = parts.join(", ");
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for d in sweep_laws() {
        for p in levels() {
            let t = tvar(&d, p).unwrap();
            let q = d.quantile(p).unwrap();
            for (name, tail) in [
                ("stop-loss", stop_loss(&d, q)),
                ("integrated survival", integrated_survival(&d, q)),
            ] {
                let rhs = q + tail.map_err(|e| e.to_string())? / (1.0 - p);
                let rel = (t - rhs).abs() / t.abs();
                worst = worst.max(rel);
                if !(rel <= 1e-7) {
                    bad.push(format!("{d} p={p} via {name}: {t} vs {rhs}"));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("worst relative gap {worst:.2e}"))
    } else {
        Err(format!("{} violations, first: {}", bad.len(), bad[0]))
    }
}

/// Logistic fits reported for the two indices, used as generating laws.
fn generating_pair() -> (Distribution, Distribution) {
    (
        Distribution::logistic(-0.001226663, 0.008706823).unwrap(),
        Distribution::logistic(-0.005402021, 0.011434130).unwrap(),
    )
}

fn criterion_8() -> Outcome {
    let (gx, gy) = generating_pair();
    let truth = parametric_p0(&gx, &gy).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut fits = Vec::new();
    for (name, law, seed) in [("x", gx, 81u64), ("y", gy, 82u64)] {
        let draws = sample(&law, 100_000, seed).map_err(|e| e.to_string())?;
        let series = ReturnSeries::from_returns(draws, name).unwrap();
        let fit = fit_mle(&series, Family::Logistic).map_err(|e| e.to_string())?;
        let (mu, s) = law.params();
        let zmu = (fit.location - mu) / fit.location_std_error;
        let zs = (fit.scale - s) / fit.scale_std_error;
        ensure(zmu.abs() <= 3.0 && zs.abs() <= 3.0, || {
            format!("{name}: fitted ({}, {}) is ({zmu:.2}, {zs:.2}) SE from truth", fit.location, fit.scale)
        })?;
        notes.push(format!("{name} z=({zmu:.2},{zs:.2})"));
        fits.push(fit.distribution());
    }
    let fitted = parametric_p0(&fits[0], &fits[1]).map_err(|e| e.to_string())?;
    ensure((fitted - truth).abs() <= 0.05, || format!("fitted p0 {fitted} vs {truth}"))?;

    let mut passes = [0usize; 2];
    for seed in 0..100u64 {
        for (i, law) in [gx, gy].iter().enumerate() {
            let draws = sample(law, 100, 1000 + 2 * seed + i as u64).map_err(|e| e.to_string())?;
            let series = ReturnSeries::from_returns(draws, "ks").unwrap();
            let fit = fit_mle(&series, Family::Logistic).map_err(|e| e.to_string())?;
            if fit.ks_p_value > 0.05 {
                passes[i] += 1;
            }
        }
    }
    ensure(passes.iter().all(|&k| k >= 95), || format!("K-S acceptance counts {passes:?} of 100"))?;
    Ok(format!(
        "{}; fitted p0 {fitted:.4} vs {truth:.4}; K-S p > 0.05 in {:?} of 100",
        notes.join(", "),
        passes
    ))
}

fn write_prices(path: &Path, returns: &[f64]) {
    let mut out = String::from("date,close\n");
    let mut price = 100.0f64;
    let mut day = 0u32;
    let date = |d: u32| {
        let (y, rem) = (2000 + d / 336, d % 336);
        format!("{y:04}-{:02}-{:02}", rem / 28 + 1, rem % 28 + 1)
    };
    out.push_str(&format!("{},{price}\n", date(day)));
    for r in returns {
        price *= (-r).exp();
        day += 1;
        out.push_str(&format!("{},{price}\n", date(day)));
    }
    std::fs::write(path, out).unwrap();
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_tailrisk"))
        .args(args)
        .output()
        .expect("run tailrisk");
    let mut bytes = out.stdout;
    bytes.extend(format!("exit {:?}", out.status.code()).bytes());
    bytes
}

fn criterion_9() -> Outcome {
    let a = fixtures_json(&derived_fixtures().map_err(|e| e.to_string())?);
    let b = fixtures_json(&derived_fixtures().map_err(|e| e.to_string())?);
    ensure(a == b, || "fixture regeneration differs between runs".into())?;
    let frozen_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/derived.json");
    let frozen = std::fs::read_to_string(&frozen_path).map_err(|e| e.to_string())?;
    ensure(a == frozen, || "regenerated fixtures differ from the frozen file".into())?;

    let dir = std::env::temp_dir().join(format!("tailrisk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (gx, gy) = generating_pair();
    let px = dir.join("x.csv");
    let py = dir.join("y.csv");
    write_prices(&px, &sample(&gx, 500, 91).unwrap());
    write_prices(&py, &sample(&gy, 500, 92).unwrap());
    let commands: Vec<Vec<String>> = vec![
        vec!["tvar".into(), "--dist".into(), "pareto(7,3)".into(), "--p".into(), "0:0.99:25".into()],
        vec!["compare".into(), "--x".into(), "weibull(3,1)".into(), "--y".into(), "pareto(1.5,1)".into()],
        vec![
            "analyze".into(),
            "--prices-x".into(),
            px.display().to_string(),
            "--prices-y".into(),
            py.display().to_string(),
            "--plot-dir".into(),
            dir.join("plots").display().to_string(),
        ],
    ];
    let mut plots = Vec::new();
    for args in &commands {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run_cli(&argv);
        if args[0] == "analyze" {
            plots.push(std::fs::read(dir.join("plots/tvar_curves.csv")).unwrap());
        }
        let second = run_cli(&argv);
        if args[0] == "analyze" {
            plots.push(std::fs::read(dir.join("plots/tvar_curves.csv")).unwrap());
        }
        ensure(first == second, || format!("`{}` output differs between runs", args[0]))?;
    }
    ensure(plots[0] == plots[1], || "plot CSVs differ between runs".into())?;
    std::fs::remove_dir_all(&dir).ok();
    Ok(format!("{} fixture bytes and {} CLI reports identical", a.len(), commands.len()))
}
