//! Versioned JSON instance and solution files.

use orienteer_core::PointSet;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Orienteering,
    Ktsp,
    Mktsp,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Orienteering => "orienteering",
            Self::Ktsp => "ktsp",
            Self::Mktsp => "mktsp",
        }
    }
}

/// An orienteering instance uses `root` and `budget`; the path kinds use
/// `pairs` and `k` (k-TSP takes exactly one pair).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u64,
    pub kind: Kind,
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub delta: f64,
}

fn malformed<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Malformed(msg.into()))
}

fn check_version(value: &Value, what: &str) -> CliResult<()> {
    match value.get("version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => Ok(()),
        Some(v) => malformed(format!(
            "unsupported {what} version {v} (expected {FORMAT_VERSION})"
        )),
        None => malformed(format!("{what} has no integer version field")),
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text)?;
        check_version(&value, "instance")?;
        let inst: Self = serde_json::from_value(value)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instances serialize");
        text.push('\n');
        text
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.version != FORMAT_VERSION {
            return malformed(format!("unsupported instance version {}", self.version));
        }
        if self.dimension == 0 {
            return malformed("dimension must be at least 1");
        }
        if self.points.is_empty() {
            return malformed("instance has no points");
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != self.dimension {
                return malformed(format!(
                    "point {i} has {} coordinates, expected {}",
                    p.len(),
                    self.dimension
                ));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return malformed(format!("point {i} has a non-finite coordinate"));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return malformed(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        let n = self.points.len();
        let in_range = |id: usize, what: &str| {
            if id < n {
                Ok(())
            } else {
                malformed(format!("{what} index {id} out of range for {n} points"))
            }
        };
        match self.kind {
            Kind::Orienteering => {
                if self.pairs.is_some() || self.k.is_some() {
                    return malformed(
                        "orienteering instances take root and budget, not pairs or k",
                    );
                }
                let (Some(root), Some(budget)) = (self.root, self.budget) else {
                    return malformed("orienteering instances need root and budget");
                };
                in_range(root, "root")?;
                if !(budget >= 0.0 && budget.is_finite()) {
                    return malformed(format!(
                        "budget must be finite and non-negative, got {budget}"
                    ));
                }
            }
            Kind::Ktsp | Kind::Mktsp => {
                if self.budget.is_some() || self.root.is_some() {
                    return malformed("path instances take pairs and k, not root or budget");
                }
                let (Some(pairs), Some(k)) = (&self.pairs, self.k) else {
                    return malformed("path instances need pairs and k");
                };
                if pairs.is_empty() {
                    return malformed("path instances need at least one pair");
                }
                if self.kind == Kind::Ktsp && pairs.len() != 1 {
                    return malformed("a ktsp instance has exactly one pair");
                }
                for &(s, t) in pairs {
                    in_range(s, "pair")?;
                    in_range(t, "pair")?;
                }
                if k == 0 {
                    return malformed("k must be at least 1");
                }
            }
        }
        Ok(())
    }

    pub fn point_set(&self) -> CliResult<PointSet> {
        Ok(PointSet::from_coords(self.points.iter().cloned())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverEcho {
    pub delta: f64,
    pub seed: u64,
    pub cap: usize,
    pub window_accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateEcho {
    pub k: usize,
    pub skeleton: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub version: u64,
    pub kind: Kind,
    pub paths: Vec<Vec<usize>>,
    pub length: f64,
    pub visited: usize,
    pub config: SolverEcho,
    pub verification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateEcho>,
}

impl SolutionFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text)?;
        check_version(&value, "solution")?;
        Ok(serde_json::from_value(value)?)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("solutions serialize");
        text.push('\n');
        text
    }
}
