//! Uncertainty, error-trade-off and error-disturbance relations.
//!
//! Every relation is written as `lhs ≥ rhs` and reported with its slack
//! `lhs − rhs`. The `*_slack` functions take plain numbers so that curves and
//! sweeps can evaluate them without building operators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::joint::ErrorPair;
use crate::linalg::{HermitianOperator, Ket};
use crate::stats::{expectation, StateStatistics};
use crate::tol::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationId {
    Robertson,
    Hak,
    OzawaJoint,
    OzawaEd,
    Branciard,
    BranciardDimless,
    SameSpectrum,
    BOnlySpectrum,
}

impl RelationId {
    pub const ALL: [RelationId; 8] = [
        RelationId::Robertson,
        RelationId::Hak,
        RelationId::OzawaJoint,
        RelationId::OzawaEd,
        RelationId::Branciard,
        RelationId::BranciardDimless,
        RelationId::SameSpectrum,
        RelationId::BOnlySpectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationId::Robertson => "robertson",
            RelationId::Hak => "hak",
            RelationId::OzawaJoint => "ozawa_joint",
            RelationId::OzawaEd => "ozawa_ed",
            RelationId::Branciard => "branciard",
            RelationId::BranciardDimless => "branciard_dimless",
            RelationId::SameSpectrum => "same_spectrum",
            RelationId::BOnlySpectrum => "b_only_spectrum",
        }
    }

    /// Whether the relation holds for every quantum strategy. The
    /// Heisenberg–Arthurs–Kelly product form does not.
    pub fn is_universal(self) -> bool {
        self != RelationId::Hak
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "ozawa" => "ozawa_joint",
            "dimless" | "branciard_dimensionless" => "branciard_dimless",
            "b_only" => "b_only_spectrum",
            other => other,
        };
        RelationId::ALL
            .into_iter()
            .find(|r| r.name() == alias)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown relation `{s}`")))
    }
}

/// Regime assumptions of the dichotomic relations, as checked on concrete
/// operators. Reports carry these so a caller can tell an in-regime bound
/// from a formula applied outside its hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegimeFlags {
    /// `A² = 1` and `⟨A⟩ = 0`.
    pub a_dichotomic: bool,
    /// `B² = 1` and `⟨B⟩ = 0`.
    pub b_dichotomic: bool,
    /// `𝒜² = 1`.
    pub approx_a_dichotomic: bool,
    /// `ℬ² = 1`.
    pub approx_b_dichotomic: bool,
}

impl RegimeFlags {
    /// Checks the flags to `τ_num`. `approx` is `(𝒜, ℬ)` on the joint space.
    pub fn detect(
        a: &HermitianOperator,
        b: &HermitianOperator,
        state: &Ket,
        approx: Option<(&HermitianOperator, &HermitianOperator)>,
    ) -> Result<Self> {
        let tau = tolerances().num;
        let dich = |op: &HermitianOperator| -> Result<bool> {
            Ok(op.involution_residual() <= tau && expectation(op, state)?.abs() <= tau)
        };
        let (aa, ab) = match approx {
            Some((x, y)) => (x.involution_residual() <= tau, y.involution_residual() <= tau),
            None => (false, false),
        };
        Ok(Self {
            a_dichotomic: dich(a)?,
            b_dichotomic: dich(b)?,
            approx_a_dichotomic: aa,
            approx_b_dichotomic: ab,
        })
    }

    pub fn same_spectrum(&self) -> bool {
        self.a_dichotomic && self.b_dichotomic && self.approx_a_dichotomic && self.approx_b_dichotomic
    }

    pub fn b_only(&self) -> bool {
        self.b_dichotomic && self.approx_b_dichotomic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: RelationId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// `slack ≥ −τ_num`.
    pub satisfied: bool,
    /// `satisfied` and `|slack| ≤ τ_sat`.
    pub saturated: bool,
    pub universal: bool,
    pub regime: Option<RegimeFlags>,
}

impl RelationReport {
    pub fn new(relation: RelationId, lhs: f64, rhs: f64) -> Self {
        let t = tolerances();
        let slack = lhs - rhs;
        let satisfied = slack >= -t.num;
        Self {
            relation,
            lhs,
            rhs,
            slack,
            satisfied,
            saturated: satisfied && slack.abs() <= t.sat,
            universal: relation.is_universal(),
            regime: None,
        }
    }

    fn with_regime(mut self, regime: Option<RegimeFlags>) -> Self {
        self.regime = regime;
        self
    }

    /// A violation of a universally valid relation.
    pub fn is_counterexample(&self) -> bool {
        self.universal && !self.satisfied
    }
}

fn cross_weight(c_tilde: f64) -> f64 {
    (1.0 - c_tilde * c_tilde).max(0.0).sqrt()
}

/// `x√(1 − x²/4)`, the map taking a dichotomic rms error to the
/// corresponding dimensionless one. Defined on `[0, 2]`.
pub fn dichotomic_reduce(x: f64) -> f64 {
    x * (1.0 - x * x / 4.0).max(0.0).sqrt()
}

/// `ΔA ΔB − |C|`.
pub fn robertson_slack(delta_a: f64, delta_b: f64, c: f64) -> f64 {
    delta_a * delta_b - c.abs()
}

/// `ε_𝒜 ε_ℬ − |C|`.
pub fn hak_slack(eps_a: f64, eps_b: f64, c: f64) -> f64 {
    eps_a * eps_b - c.abs()
}

/// `ε ε' + ΔB ε + ΔA ε' − |C|`.
pub fn ozawa_slack(eps_a: f64, eps_b: f64, delta_a: f64, delta_b: f64, c: f64) -> f64 {
    eps_a * eps_b + delta_b * eps_a + delta_a * eps_b - c.abs()
}

/// `ΔB ε + ΔA ε' − |C|`: the Ozawa form without the product term.
pub fn ozawa_without_product_slack(eps_a: f64, eps_b: f64, delta_a: f64, delta_b: f64, c: f64) -> f64 {
    delta_b * eps_a + delta_a * eps_b - c.abs()
}

/// `ΔB² ε² + ΔA² ε'² + 2√(ΔA²ΔB² − C²) ε ε'`.
pub fn branciard_lhs(eps_a: f64, eps_b: f64, delta_a: f64, delta_b: f64, c: f64) -> f64 {
    let root = (delta_a * delta_a * delta_b * delta_b - c * c).max(0.0).sqrt();
    delta_b * delta_b * eps_a * eps_a + delta_a * delta_a * eps_b * eps_b + 2.0 * root * eps_a * eps_b
}

pub fn branciard_slack(eps_a: f64, eps_b: f64, delta_a: f64, delta_b: f64, c: f64) -> f64 {
    branciard_lhs(eps_a, eps_b, delta_a, delta_b, c) - c * c
}

/// `x² + y² + 2√(1 − C̃²) x y`.
pub fn dimless_lhs(x: f64, y: f64, c_tilde: f64) -> f64 {
    x * x + y * y + 2.0 * cross_weight(c_tilde) * x * y
}

pub fn dimless_slack(eps_a_tilde: f64, eps_b_tilde: f64, c_tilde: f64) -> f64 {
    dimless_lhs(eps_a_tilde, eps_b_tilde, c_tilde) - c_tilde * c_tilde
}

/// Slack of the relation for dichotomic `A`, `B`, `𝒜`, `ℬ`: the
/// dimensionless form evaluated at `ε√(1 − ε²/4)` and `η√(1 − η²/4)`.
pub fn same_spectrum_slack(eps: f64, eta: f64, c: f64) -> f64 {
    dimless_slack(dichotomic_reduce(eps), dichotomic_reduce(eta), c)
}

/// Slack when only `B` and `ℬ` are dichotomic.
pub fn b_only_slack(eps_a_tilde: f64, eta: f64, c_tilde: f64) -> f64 {
    dimless_slack(eps_a_tilde, dichotomic_reduce(eta), c_tilde)
}

fn check_dichotomic_range(what: &str, x: f64) -> Result<f64> {
    let tau = tolerances().num;
    if !(-tau..=2.0 + tau).contains(&x) {
        return Err(Error::Regime(format!(
            "{what} = {x} lies outside [0, 2]; operators are not dichotomic"
        )));
    }
    Ok(x.clamp(0.0, 2.0))
}

fn dimless_inputs(errors: &ErrorPair, stats: &StateStatistics) -> Result<(f64, f64, f64)> {
    let deg = tolerances().deg;
    let degenerate = |value: f64| Error::Degenerate {
        what: "standard deviation",
        value,
    };
    let ea = errors.eps_a_tilde.ok_or_else(|| degenerate(stats.delta_a))?;
    let eb = errors.eps_b_tilde.ok_or_else(|| degenerate(stats.delta_b))?;
    if stats.delta_a <= deg {
        return Err(degenerate(stats.delta_a));
    }
    if stats.delta_b <= deg {
        return Err(degenerate(stats.delta_b));
    }
    let ct = stats.c_tilde().expect("non-degenerate");
    Ok((ea, eb, ct))
}

pub fn eval_robertson(stats: &StateStatistics) -> RelationReport {
    RelationReport::new(RelationId::Robertson, stats.delta_a * stats.delta_b, stats.c_ab.abs())
}

pub fn eval_hak(errors: &ErrorPair, stats: &StateStatistics) -> RelationReport {
    RelationReport::new(RelationId::Hak, errors.eps_a * errors.eps_b, stats.c_ab.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OzawaMode {
    /// Joint measurement: `ε_𝒜`, `ε_ℬ`.
    Joint,
    /// Error-disturbance: `ε_𝒜`, `η_ℬ` (the second error is the disturbance).
    ErrorDisturbance,
}

pub fn eval_ozawa(errors: &ErrorPair, stats: &StateStatistics, mode: OzawaMode) -> RelationReport {
    let id = match mode {
        OzawaMode::Joint => RelationId::OzawaJoint,
        OzawaMode::ErrorDisturbance => RelationId::OzawaEd,
    };
    let (e, f) = (errors.eps_a, errors.eps_b);
    let lhs = e * f + stats.delta_b * e + stats.delta_a * f;
    RelationReport::new(id, lhs, stats.c_ab.abs())
}

pub fn eval_branciard(errors: &ErrorPair, stats: &StateStatistics, dimensionless: bool) -> Result<RelationReport> {
    if dimensionless {
        let (ea, eb, ct) = dimless_inputs(errors, stats)?;
        Ok(RelationReport::new(
            RelationId::BranciardDimless,
            dimless_lhs(ea, eb, ct),
            ct * ct,
        ))
    } else {
        let lhs = branciard_lhs(errors.eps_a, errors.eps_b, stats.delta_a, stats.delta_b, stats.c_ab);
        Ok(RelationReport::new(RelationId::Branciard, lhs, stats.c_ab * stats.c_ab))
    }
}

/// `errors.eps_a` is `ε_𝒜`, `errors.eps_b` is `η_ℬ` (or `ε_ℬ`).
pub fn eval_same_spectrum(
    errors: &ErrorPair,
    stats: &StateStatistics,
    regime: Option<RegimeFlags>,
) -> Result<RelationReport> {
    let eps = check_dichotomic_range("ε", errors.eps_a)?;
    let eta = check_dichotomic_range("η", errors.eps_b)?;
    let c = stats.c_ab.clamp(-1.0, 1.0);
    let lhs = dimless_lhs(dichotomic_reduce(eps), dichotomic_reduce(eta), c);
    Ok(RelationReport::new(RelationId::SameSpectrum, lhs, c * c).with_regime(regime))
}

pub fn eval_b_only(errors: &ErrorPair, stats: &StateStatistics, regime: Option<RegimeFlags>) -> Result<RelationReport> {
    let eta = check_dichotomic_range("η", errors.eps_b)?;
    let (ea, _, ct) = dimless_inputs(errors, stats)?;
    let lhs = dimless_lhs(ea, dichotomic_reduce(eta), ct);
    Ok(RelationReport::new(RelationId::BOnlySpectrum, lhs, ct * ct).with_regime(regime))
}

/// Dispatches on `relation`.
pub fn evaluate(
    relation: RelationId,
    errors: &ErrorPair,
    stats: &StateStatistics,
    regime: Option<RegimeFlags>,
) -> Result<RelationReport> {
    match relation {
        RelationId::Robertson => Ok(eval_robertson(stats)),
        RelationId::Hak => Ok(eval_hak(errors, stats)),
        RelationId::OzawaJoint => Ok(eval_ozawa(errors, stats, OzawaMode::Joint)),
        RelationId::OzawaEd => Ok(eval_ozawa(errors, stats, OzawaMode::ErrorDisturbance)),
        RelationId::Branciard => eval_branciard(errors, stats, false),
        RelationId::BranciardDimless => eval_branciard(errors, stats, true),
        RelationId::SameSpectrum => eval_same_spectrum(errors, stats, regime),
        RelationId::BOnlySpectrum => eval_b_only(errors, stats, regime),
    }
}

/// Checks, link by link, the chain that derives the Ozawa form from the
/// sharper bound:
/// `(εε' + ΔBε + ΔAε')² ≥ (ΔBε + ΔAε')² ≥ ΔB²ε² + ΔA²ε'² + 2√(ΔA²ΔB² − C²)εε' ≥ C²`.
pub fn ozawa_implied_check(errors: &ErrorPair, stats: &StateStatistics) -> bool {
    let tau = tolerances().num;
    let (e, f) = (errors.eps_a, errors.eps_b);
    let (da, db, c) = (stats.delta_a, stats.delta_b, stats.c_ab);
    let without_product = db * e + da * f;
    let full = e * f + without_product;
    let sharp = branciard_lhs(e, f, da, db, c);
    full * full - without_product * without_product >= -tau
        && without_product * without_product - sharp >= -tau
        && sharp - c * c >= -tau
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Boundary of the forbidden region around the origin.
    Lower,
    /// Boundary near `(2, 2)`, reached by flipping both output signs.
    Upper,
    /// All four saturating arcs of the dichotomic region, in order. Consecutive
    /// arcs are joined by straight segments of the square `[0, 2]²`.
    Contour,
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lower" => Ok(Branch::Lower),
            "upper" => Ok(Branch::Upper),
            "contour" => Ok(Branch::Contour),
            other => Err(Error::InvalidParameter(format!("unknown branch `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub parameter: f64,
    pub eps_a_tilde: f64,
    pub eps_b_tilde: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub relation: RelationId,
    pub c_tilde: f64,
    pub branch: Branch,
    pub points: Vec<CurvePoint>,
}

/// Saturating curve of `relation` at `C̃ = c_tilde`, sampled uniformly in
/// the angle `u ∈ [0, φ]` with `sin φ = |c_tilde|`.
pub fn boundary_curve(relation: RelationId, c_tilde: f64, n_points: usize, branch: Branch) -> Result<TradeoffCurve> {
    if !(-1.0..=1.0).contains(&c_tilde) {
        return Err(Error::InvalidParameter(format!("c_tilde = {c_tilde} outside [-1, 1]")));
    }
    if n_points < 2 {
        return Err(Error::InvalidParameter(format!("n_points = {n_points} < 2")));
    }
    let phi = c_tilde.abs().asin();
    let grid = |i: usize| phi * i as f64 / (n_points - 1) as f64;
    let half_sin = |x: f64| 2.0 * (x / 2.0).sin();
    let half_cos = |x: f64| 2.0 * (x / 2.0).cos();
    let unsupported = || {
        Error::Unsupported(format!(
            "no {} branch is defined for {relation}",
            format!("{branch:?}").to_lowercase()
        ))
    };

    // Arcs as maps u ↦ (x, y) together with the traversal direction.
    type Arc<'a> = (Box<dyn Fn(f64) -> (f64, f64) + 'a>, bool);
    let arcs: Vec<Arc> = match (relation, branch) {
        (RelationId::Branciard | RelationId::BranciardDimless, Branch::Lower) => {
            vec![(Box::new(|u: f64| (u.sin(), (phi - u).sin())), true)]
        }
        (RelationId::SameSpectrum, Branch::Lower) => {
            vec![(Box::new(|u: f64| (half_sin(u), half_sin(phi - u))), true)]
        }
        (RelationId::SameSpectrum, Branch::Upper) => {
            vec![(Box::new(|u: f64| (half_cos(u), half_cos(phi - u))), true)]
        }
        (RelationId::SameSpectrum, Branch::Contour) => vec![
            (Box::new(|u: f64| (half_sin(u), half_sin(phi - u))), true),
            (Box::new(|u: f64| (half_cos(u), half_sin(phi - u))), false),
            (Box::new(|u: f64| (half_cos(u), half_cos(phi - u))), true),
            (Box::new(|u: f64| (half_sin(u), half_cos(phi - u))), false),
        ],
        (RelationId::BOnlySpectrum, Branch::Lower) => {
            vec![(Box::new(|u: f64| (u.sin(), half_sin(phi - u))), true)]
        }
        (RelationId::BOnlySpectrum, Branch::Upper) => {
            vec![(Box::new(|u: f64| (u.sin(), half_cos(phi - u))), true)]
        }
        _ => return Err(unsupported()),
    };

    let slack = |x: f64, y: f64| match relation {
        RelationId::SameSpectrum => same_spectrum_slack(x, y, c_tilde),
        RelationId::BOnlySpectrum => b_only_slack(x, y, c_tilde),
        _ => dimless_slack(x, y, c_tilde),
    };
    // At C̃ = 0 every arc collapses to a single point.
    let per_arc = if phi == 0.0 { 1 } else { n_points };
    let mut points = Vec::with_capacity(arcs.len() * per_arc);
    for (k, (arc, forward)) in arcs.iter().enumerate() {
        for i in 0..per_arc {
            let u = if *forward { grid(i) } else { grid(n_points - 1 - i) };
            let (x, y) = arc(u);
            let parameter = if arcs.len() == 1 { u } else { k as f64 * phi + grid(i) };
            points.push(CurvePoint {
                parameter,
                eps_a_tilde: x,
                eps_b_tilde: y,
                slack: slack(x, y),
            });
        }
    }
    Ok(TradeoffCurve {
        relation,
        c_tilde,
        branch,
        points,
    })
}
