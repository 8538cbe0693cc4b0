use std::fs;
use std::path::Path;

use blockortho::measures::MomentTable;
use blockortho::scalar::parse_rational;
use blockortho::{Error, Interval, Measure, Rational};
use serde_json::{json, Value};

use crate::args::{BackendArgs, MeasureArgs, Preset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

impl From<BackendArgs> for Backend {
    fn from(b: BackendArgs) -> Self {
        if b.float {
            Backend::Float
        } else {
            Backend::Exact
        }
    }
}

/// Everything that ends a run early.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unusable inputs; exit code 2.
    Usage(String),
    Core(Error),
    /// A check ran and failed; exit code 1.
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::NonPositiveParameter { .. }
                | Error::InvalidMeasure(_)
                | Error::Moment(_)
                | Error::IndexOutOfRange(_)
                | Error::Dimension(_) => 2,
                _ => 1,
            },
            CliError::CheckFailed(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("UsageError", m.clone()),
            CliError::Core(e) => (e.kind(), e.to_string()),
            CliError::CheckFailed(m) => ("CheckFailed", m.clone()),
        };
        json!({"error": {"kind": kind, "message": message}})
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// The two measures of a run. `reference` is the analytic first measure
/// when a moment file replaces it; constraint checks are judged against it.
#[derive(Debug, Clone)]
pub struct MeasurePair {
    pub first: Measure,
    pub second: Measure,
    pub reference: Option<Measure>,
}

impl MeasurePair {
    pub fn to_json(&self) -> Value {
        json!([self.first.to_json(), self.second.to_json()])
    }
}

pub fn preset(p: Preset, z: &Rational) -> CliResult<(Measure, Measure)> {
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    Ok(match p {
        Preset::Hermite => (Measure::gaussian(one)?, Measure::gaussian(two)?),
        Preset::Laguerre => (
            Measure::gamma(one, z.clone())?,
            Measure::gamma(two, z.clone())?,
        ),
    })
}

fn parse_domain(s: &str) -> CliResult<Interval> {
    let bad = || CliError::Usage(format!("--domain expects `lo,hi`, got {s:?}"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(bad());
    }
    Ok(Interval::new(lo, hi))
}

fn load_table(path: &Path, domain: Interval) -> CliResult<Measure> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(MomentTable::parse(&text)?.into_measure(domain)?)
}

pub fn resolve_measures(args: &MeasureArgs, backend: Backend) -> CliResult<MeasurePair> {
    let z = parse_rational(&args.z)?;
    let presets = args.pair.map(|p| preset(p, &z)).transpose()?;
    let domain = parse_domain(&args.domain)?;
    let tab1 = args.moments_file.as_deref().map(|p| load_table(p, domain)).transpose()?;
    let tab2 = args.moments_file2.as_deref().map(|p| load_table(p, domain)).transpose()?;
    let (p1, p2) = match presets {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    let reference = if tab1.is_some() { p1.clone() } else { None };
    let first = tab1
        .or(p1)
        .ok_or_else(|| CliError::Usage("no first measure: give --pair or --moments-file".into()))?;
    let second = tab2
        .or(p2)
        .ok_or_else(|| CliError::Usage("no second measure: give --pair or --moments-file2".into()))?;
    if backend == Backend::Exact {
        for m in [&first, &second] {
            if !m.has_rational_moments() {
                return Err(CliError::Usage(
                    "the exact backend needs rational moments; use --float".into(),
                ));
            }
        }
    }
    Ok(MeasurePair {
        first,
        second,
        reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use blockortho::Scalar;

    #[test]
    fn domains() {
        assert_eq!(parse_domain("-inf,inf").unwrap(), Interval::real_line());
        assert_eq!(parse_domain("0, inf").unwrap(), Interval::half_line());
        for bad in ["1,1", "2,1", "0", "a,b", "nan,1"] {
            assert_eq!(parse_domain(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn exit_codes_and_error_json() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::CheckFailed("x".into()).exit_code(), 1);
        assert_eq!(CliError::from(Error::NotSymmetric).exit_code(), 1);
        let v = CliError::Usage("bad flag".into()).to_json();
        assert_eq!(v["error"]["message"], "bad flag");
        assert!(v["error"]["kind"].is_string());
    }

    #[test]
    fn presets_rescale_the_second_weight() {
        let one = Rational::from_i64(1);
        let (a, b) = preset(Preset::Hermite, &one).unwrap();
        assert!(a.symmetric() && b.symmetric());
        let (a, _) = preset(Preset::Laguerre, &one).unwrap();
        assert_eq!(a.domain(), Interval::half_line());
        assert!(preset(Preset::Laguerre, &Rational::from_i64(0)).is_err());
    }
}
