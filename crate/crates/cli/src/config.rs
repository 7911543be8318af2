use std::fmt;
use std::path::Path;
use std::str::FromStr;

use errtrade::RelationId;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Random basis with random outputs in the spectral range.
    RandomBasis,
    /// Random basis with weak-value-optimal (or sign) outputs.
    OptimalOutputs,
    /// Closed-form saturating strategies at random parameters.
    Saturating,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::RandomBasis => "random_basis",
            StrategyKind::OptimalOutputs => "optimal_outputs",
            StrategyKind::Saturating => "saturating",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "random_basis" => Ok(StrategyKind::RandomBasis),
            "optimal_outputs" => Ok(StrategyKind::OptimalOutputs),
            "saturating" => Ok(StrategyKind::Saturating),
            other => Err(CliError::config(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub n_instances: usize,
    pub relations: Vec<RelationId>,
    pub strategy: StrategyKind,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            dims: vec![2, 3, 4, 5, 6],
            n_instances: 1000,
            relations: RelationId::ALL.to_vec(),
            strategy: StrategyKind::OptimalOutputs,
        }
    }
}

/// Keys accepted in a config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub dims: Option<Vec<usize>>,
    #[serde(alias = "n_instances")]
    pub n: Option<usize>,
    pub relations: Option<Vec<String>>,
    pub strategy: Option<String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies the keys present in the file on top of `base`.
    pub fn apply(self, mut base: SweepConfig) -> CliResult<SweepConfig> {
        if let Some(s) = self.seed {
            base.seed = s;
        }
        if let Some(d) = self.dims {
            base.dims = d;
        }
        if let Some(n) = self.n {
            base.n_instances = n;
        }
        if let Some(r) = self.relations {
            base.relations = parse_relations(&r)?;
        }
        if let Some(s) = self.strategy {
            base.strategy = s.parse()?;
        }
        Ok(base)
    }
}

pub fn parse_relations<S: AsRef<str>>(names: &[S]) -> CliResult<Vec<RelationId>> {
    let mut out = Vec::new();
    for n in names {
        let n = n.as_ref();
        if n.eq_ignore_ascii_case("all") {
            out.extend(RelationId::ALL);
            continue;
        }
        out.push(n.parse::<RelationId>().map_err(|e| CliError::config(e.to_string()))?);
    }
    let mut seen = Vec::new();
    out.retain(|r| {
        let fresh = !seen.contains(r);
        seen.push(*r);
        fresh
    });
    Ok(out)
}

/// Parses `2,3,5` or ranges such as `3-8`.
pub fn parse_dims(text: &str) -> CliResult<Vec<usize>> {
    let mut dims = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || CliError::config(format!("cannot parse dimension `{part}`"));
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                dims.extend(lo..=hi);
            }
            None => dims.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(dims)
}

pub fn check_dims(dims: &[usize], min: usize) -> CliResult<()> {
    if dims.is_empty() {
        return Err(CliError::config("dims must not be empty"));
    }
    if let Some(d) = dims.iter().find(|&&d| d < min) {
        return Err(CliError::config(format!("dimension {d} is below the minimum {min}")));
    }
    Ok(())
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n_instances == 0 {
            return Err(CliError::config("n_instances must be at least 1"));
        }
        check_dims(&self.dims, 2)?;
        if self.relations.is_empty() {
            return Err(CliError::config("no relations selected"));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form of the config and `command`.
    pub fn hash(&self, command: &str) -> String {
        let canonical = serde_json::to_string(&(command, self)).expect("config serializes");
        hex_digest(canonical.as_bytes())
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
