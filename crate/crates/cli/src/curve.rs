//! Boundary-curve export and the experimental prediction sweeps.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use errtrade::relations::{boundary_curve, same_spectrum_slack};
use errtrade::{Branch, RelationId, TradeoffCurve};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{emit, render_csv, render_json, Format, Num, PointRow};

/// Contour for the dichotomic relation, the lower branch otherwise.
pub fn default_branch(relation: RelationId) -> Branch {
    if relation == RelationId::SameSpectrum {
        Branch::Contour
    } else {
        Branch::Lower
    }
}

pub fn curve_rows(curve: &TradeoffCurve) -> Vec<PointRow> {
    curve
        .points
        .iter()
        .map(|p| PointRow {
            parameter: Num(p.parameter),
            eps_a_tilde: Num(p.eps_a_tilde),
            eps_b_tilde: Num(p.eps_b_tilde),
            slack: Num(p.slack),
        })
        .collect()
}

#[derive(Serialize)]
struct CurveDocument<'a> {
    relation: RelationId,
    c_tilde: Num,
    branch: Branch,
    points: &'a [PointRow],
}

/// Computes the boundary curve and writes it to `out` (stdout if `None`).
pub fn cmd_curve(
    relation: RelationId,
    c_tilde: f64,
    n_points: usize,
    branch: Option<Branch>,
    format: Format,
    out: Option<&Path>,
) -> CliResult<TradeoffCurve> {
    let branch = branch.unwrap_or_else(|| default_branch(relation));
    let curve = boundary_curve(relation, c_tilde, n_points, branch).map_err(|e| CliError::config(e.to_string()))?;
    let rows = curve_rows(&curve);
    let text = match format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&CurveDocument {
            relation,
            c_tilde: Num(c_tilde),
            branch,
            points: &rows,
        }),
    };
    emit(out, &text)?;
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Neutron spin test: `(2 sin(φ/2), √2 cos φ)`.
    Erhart,
    /// Photon polarization test: the saturating sweep `(2 sin(u/2), 2 sin((π/2 − u)/2))`.
    Rozema,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Erhart => "erhart",
            Experiment::Rozema => "rozema",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "erhart" => Ok(Experiment::Erhart),
            "rozema" => Ok(Experiment::Rozema),
            other => Err(CliError::config(format!(
                "unknown experiment `{other}` (expected erhart or rozema)"
            ))),
        }
    }
}

/// Predicted points at `C = 1` for parameters evenly spaced in `[0, π/2]`.
pub fn experiment_rows(which: Experiment, n_points: usize) -> CliResult<Vec<PointRow>> {
    if n_points < 2 {
        return Err(CliError::config(format!("n_points = {n_points} < 2")));
    }
    Ok((0..n_points)
        .map(|i| {
            let t = FRAC_PI_2 * i as f64 / (n_points - 1) as f64;
            let (eps, eta) = match which {
                Experiment::Erhart => (2.0 * (t / 2.0).sin(), SQRT_2 * t.cos()),
                Experiment::Rozema => (2.0 * (t / 2.0).sin(), 2.0 * ((FRAC_PI_2 - t) / 2.0).sin()),
            };
            PointRow {
                parameter: Num(t),
                eps_a_tilde: Num(eps),
                eps_b_tilde: Num(eta),
                slack: Num(same_spectrum_slack(eps, eta, 1.0)),
            }
        })
        .collect())
}

#[derive(Serialize)]
struct ExperimentDocument<'a> {
    experiment: &'a str,
    c_tilde: Num,
    points: &'a [PointRow],
}

pub fn cmd_experiments(
    which: Experiment,
    n_points: usize,
    format: Format,
    out: Option<&Path>,
) -> CliResult<Vec<PointRow>> {
    let rows = experiment_rows(which, n_points)?;
    let text = match format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&ExperimentDocument {
            experiment: which.name(),
            c_tilde: Num(1.0),
            points: &rows,
        }),
    };
    emit(out, &text)?;
    Ok(rows)
}
