//! Grid specifications and fixed-precision number formatting.

use std::fmt;
use std::str::FromStr;

use gkp_crosstalk::Rational;
use serde::{Deserialize, Serialize};

/// Upper limit on grid length, to catch typos such as a zero-ish step.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// A one-dimensional grid, either `start:stop:step` or an explicit list.
///
/// Ranges are expanded in exact rational arithmetic: `0.01:0.99:0.005`
/// contains `0.2` exactly, and the end point is included whenever
/// `start + k·step` hits it for some integer `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range(String),
    List(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let values = match self {
            GridSpec::Range(s) => expand_range(s)?,
            GridSpec::List(v) => v.clone(),
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err("grid contains a non-finite value".into());
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err("grid must be strictly increasing".into());
        }
        Ok(values)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    /// Accepts `a:b:step`, a comma-separated list, or a single number.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.contains(':') {
            expand_range(s)?;
            return Ok(GridSpec::Range(s.to_string()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad grid value {t:?}")))
            .collect::<Result<Vec<_>, _>>()
            .map(GridSpec::List)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Range(s) => f.write_str(s),
            GridSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

fn expand_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("grid range {spec:?} must look like start:stop:step"));
    };
    let parse = |t: &str| t.parse::<Rational>().map_err(|e| format!("grid range {spec:?}: {e}"));
    let (start, stop, step) = (parse(a)?, parse(b)?, parse(step)?);
    if step <= Rational::new(0, 1).expect("zero is a valid rational") {
        return Err(format!("grid range {spec:?} needs a positive step"));
    }
    let mut out = Vec::new();
    let mut k: i64 = 0;
    loop {
        let offset = step
            .checked_mul(&Rational::new(k, 1).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let value = start.checked_add(&offset).map_err(|e| e.to_string())?;
        if value > stop {
            break;
        }
        if out.len() == MAX_GRID_POINTS {
            return Err(format!("grid range {spec:?} has more than {MAX_GRID_POINTS} points"));
        }
        out.push(value.to_f64());
        k += 1;
    }
    Ok(out)
}

/// Formats like C's `%.12g`.
pub fn fmt_g12(x: f64) -> String {
    const PRECISION: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
