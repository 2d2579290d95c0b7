use std::path::Path;

use tailrisk::inference::read_price_file;
use tailrisk::{Distribution, EmpiricalSample, Family, RiskLaw};

use crate::CliError;

/// A risk named on the command line.
#[derive(Debug, Clone)]
pub enum Law {
    Parametric(Distribution),
    Empirical(EmpiricalSample),
}

impl Law {
    pub fn as_law(&self) -> &dyn RiskLaw {
        match self {
            Law::Parametric(d) => d,
            Law::Empirical(e) => e,
        }
    }

    pub fn distribution(&self) -> Option<&Distribution> {
        match self {
            Law::Parametric(d) => Some(d),
            Law::Empirical(_) => None,
        }
    }
}

/// Parses `family(a,b)` or `empirical:<csv>`.
pub fn parse_law(spec: &str) -> Result<Law, CliError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("empirical:") {
        return read_empirical(Path::new(path)).map(Law::Empirical);
    }
    let (name, rest) = spec
        .split_once('(')
        .ok_or_else(|| CliError::Parse(format!("expected `family(a,b)`, got `{spec}`")))?;
    let family = Family::parse(name.trim())
        .ok_or_else(|| CliError::Parse(format!("unknown family `{}`", name.trim())))?;
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| CliError::Parse(format!("missing `)` in `{spec}`")))?;
    let params = args
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| CliError::Parse(format!("bad parameter `{tok}` in `{spec}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let [a, b] = params[..] else {
        return Err(CliError::Parse(format!(
            "{family} takes 2 parameters, got {} in `{spec}`",
            params.len()
        )));
    };
    Distribution::new(family, a, b)
        .map(Law::Parametric)
        .map_err(|e| CliError::Parse(format!("`{spec}`: {e}")))
}

/// A `date,close` price file becomes its returns; any other file is read as
/// one value per line from the first column, with an optional header.
fn read_empirical(path: &Path) -> Result<EmpiricalSample, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let first = text.lines().next().unwrap_or("").trim();
    let name = path.display().to_string();
    let values = if first.replace(' ', "") == "date,close" {
        read_price_file(path)
            .map_err(|e| CliError::Parse(format!("{name}: {e}")))?
            .returns
    } else {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let tok = line.split(',').next().unwrap_or("").trim();
            if tok.is_empty() {
                continue;
            }
            match tok.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) if i == 0 => {}
                Err(_) => {
                    return Err(CliError::Parse(format!(
                        "{name}:{}: bad value `{tok}`",
                        i + 1
                    )))
                }
            }
        }
        values
    };
    EmpiricalSample::new(values)
        .map(|s| s.named(name.clone()))
        .map_err(|e| CliError::Parse(format!("{name}: {e}")))
}

/// Parses `p`, `p1,p2,...` or `a:b:n` (n evenly spaced points, both ends included).
pub fn parse_levels(spec: &str) -> Result<Vec<f64>, CliError> {
    let num = |tok: &str| {
        tok.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Parse(format!("bad level `{}`", tok.trim())))
    };
    let levels = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(CliError::Parse(format!("grid `{spec}` must be `start:end:count`")));
        };
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad grid count `{}`", n.trim())))?;
        match n {
            0 => return Err(CliError::Parse("grid count must be positive".into())),
            1 => vec![a],
            _ => (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    } else {
        spec.split(',').map(num).collect::<Result<_, _>>()?
    };
    if let Some(bad) = levels.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(CliError::Parse(format!("level `{bad}` must lie in [0,1)")));
    }
    Ok(levels)
}
