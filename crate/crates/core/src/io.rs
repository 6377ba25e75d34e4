//! Plain-text formats: density matrices as `row col re im` lines, count
//! records as CSV, `key = value` config files, and the fixed-precision number
//! format used in every CSV.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{complex, Matrix4};
use crate::optimizer::OptimizerConfig;
use crate::states::DensityMatrix;
use crate::tomography::{CountRecord, MeasurementSetting};

/// Significant digits in CSV output.
pub const SIG_DIGITS: usize = 9;

/// `%.9g`-style formatting: fixed notation for decimal exponents in
/// `[-4, 9)`, scientific otherwise, trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Sixteen `row col re im` lines in row-major order, at full precision so
/// that a written state reads back exactly.
pub fn write_density(rho: &Matrix4) -> String {
    let mut out = String::new();
    for i in 0..4 {
        for j in 0..4 {
            let z = rho[(i, j)];
            out.push_str(&format!("{i} {j} {:e} {:e}\n", z.re, z.im));
        }
    }
    out
}

/// Parses the `row col re im` format. Blank lines and `#` comments are
/// skipped; every entry must appear exactly once.
pub fn parse_density_matrix(text: &str) -> Result<Matrix4> {
    let mut m = Matrix4::zeros();
    let mut seen = [[false; 4]; 4];
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let err = |message: String| Error::Parse { line, message };
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        }
        let index = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .ok()
                .filter(|&k| k < 4)
                .ok_or_else(|| err(format!("bad index '{s}'")))
        };
        let value = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| err(format!("bad number '{s}'")))
        };
        let (i, j) = (index(fields[0])?, index(fields[1])?);
        if seen[i][j] {
            return Err(err(format!("duplicate entry ({i}, {j})")));
        }
        seen[i][j] = true;
        m[(i, j)] = complex(value(fields[2])?, value(fields[3])?)?;
    }
    for (i, row) in seen.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if !s {
                return Err(Error::InvalidInput(format!("missing entry ({i}, {j})")));
            }
        }
    }
    Ok(m)
}

/// Parses and validates a density matrix.
pub fn read_density(text: &str) -> Result<DensityMatrix> {
    DensityMatrix::new(parse_density_matrix(text)?)
}

pub const COUNTS_HEADER: &str = "setting_id,shots,observed";

pub fn write_counts(records: &[CountRecord]) -> String {
    let mut out = format!("{COUNTS_HEADER}\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            r.setting.id(),
            r.shots,
            format_sig(r.observed)
        ));
    }
    out
}

pub fn parse_counts(text: &str) -> Result<Vec<CountRecord>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') || content == COUNTS_HEADER {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let setting: MeasurementSetting =
            fields[0].parse().map_err(|e: Error| err(e.to_string()))?;
        let shots: u64 = fields[1]
            .parse()
            .map_err(|_| err(format!("bad shots '{}'", fields[1])))?;
        let observed: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("bad count '{}'", fields[2])))?;
        if !(0.0..=shots as f64).contains(&observed) {
            return Err(err(format!("observed {observed} outside [0, {shots}]")));
        }
        out.push(CountRecord {
            setting,
            shots,
            observed,
        });
    }
    Ok(out)
}

/// `key = value` lines; `#` starts a comment. Later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line: n + 1,
            message: format!("expected key=value, found '{content}'"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: n + 1,
                message: "empty key".into(),
            });
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::InvalidInput(format!("bad value for {key}: '{v}'")))
        })
        .transpose()
}

/// Applies the `starts`, `max_iter`, `tol` and `seed` keys; other keys are
/// left for the caller.
pub fn apply_optimizer_keys(
    map: &BTreeMap<String, String>,
    config: &mut OptimizerConfig,
) -> Result<()> {
    if let Some(v) = parse_value(map, "starts")? {
        config.starts = v;
    }
    if let Some(v) = parse_value(map, "max_iter")? {
        config.max_iter = v;
    }
    if let Some(v) = parse_value::<f64>(map, "tol")? {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tol must be positive, got {v}"
            )));
        }
        config.tol = v;
    }
    if let Some(v) = parse_value(map, "seed")? {
        config.seed = v;
    }
    Ok(())
}

/// Optimizer settings from a config file, defaults for missing keys.
pub fn optimizer_config_from_str(text: &str) -> Result<OptimizerConfig> {
    let mut config = OptimizerConfig::default();
    apply_optimizer_keys(&parse_config(text)?, &mut config)?;
    Ok(config)
}
