//! Fixed-precision rendering shared by every output format.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

/// 17 significant digits in scientific notation. Round-trips every `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float serialized as a fixed-precision string.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_num(self.0))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse::<f64>().map(Num).map_err(serde::de::Error::custom)
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::config(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// One row of a curve or experiment table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub parameter: Num,
    pub eps_a_tilde: Num,
    pub eps_b_tilde: Num,
    pub slack: Num,
}

pub const CSV_HEADER: &str = "parameter,eps_a_tilde,eps_b_tilde,slack";

pub fn render_csv(rows: &[PointRow]) -> String {
    let mut out = String::with_capacity(80 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_num(r.parameter.0),
            fmt_num(r.eps_a_tilde.0),
            fmt_num(r.eps_b_tilde.0),
            fmt_num(r.slack.0)
        );
    }
    out
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

/// Writes `contents` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_round_trips() {
        for x in [0.0, -0.0, 1.0, std::f64::consts::PI, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_has_header() {
        let row = PointRow {
            parameter: Num(0.0),
            eps_a_tilde: Num(0.0),
            eps_b_tilde: Num(1.0),
            slack: Num(0.0),
        };
        let text = render_csv(&[row]);
        assert!(text.starts_with("parameter,eps_a_tilde,eps_b_tilde,slack\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
