//! Global numerical tolerances.
//!
//! Values are fixed for the lifetime of the process. They are read once,
//! either from an explicit [`set_tolerances`] call made before first use or
//! from `ERRTRADE_TAU_*` environment variables layered over the defaults.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Ket normalization.
    pub norm: f64,
    /// Entrywise Hermiticity.
    pub herm: f64,
    /// General numerical comparisons, relation satisfaction.
    pub num: f64,
    /// Standard deviations at or below this are treated as zero.
    pub deg: f64,
    /// Outcome probabilities at or below this are treated as zero.
    pub p: f64,
    /// Saturation detection.
    pub sat: f64,
    /// Singular-value cutoff for rank tests.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            herm: 1e-10,
            num: 1e-9,
            deg: 1e-12,
            p: 1e-12,
            sat: 1e-7,
            rank: 1e-8,
        }
    }
}

pub const ENV_PREFIX: &str = "ERRTRADE_TAU_";

impl Tolerances {
    /// Defaults overridden by `ERRTRADE_TAU_{NORM,HERM,NUM,DEG,P,SAT,RANK}`.
    /// Unparseable values are ignored.
    pub fn from_env() -> Self {
        let mut t = Self::default();
        let fields: [(&str, &mut f64); 7] = [
            ("NORM", &mut t.norm),
            ("HERM", &mut t.herm),
            ("NUM", &mut t.num),
            ("DEG", &mut t.deg),
            ("P", &mut t.p),
            ("SAT", &mut t.sat),
            ("RANK", &mut t.rank),
        ];
        for (name, slot) in fields {
            if let Ok(raw) = std::env::var(format!("{ENV_PREFIX}{name}")) {
                if let Ok(v) = raw.trim().parse::<f64>() {
                    if v.is_finite() && v >= 0.0 {
                        *slot = v;
                    }
                }
            }
        }
        t
    }
}

static GLOBAL: OnceLock<Tolerances> = OnceLock::new();

pub fn tolerances() -> &'static Tolerances {
    GLOBAL.get_or_init(Tolerances::from_env)
}

/// Install process-wide tolerances. Fails (returning the rejected value) if
/// tolerances were already read or installed.
pub fn set_tolerances(t: Tolerances) -> Result<(), Tolerances> {
    GLOBAL.set(t)
}
