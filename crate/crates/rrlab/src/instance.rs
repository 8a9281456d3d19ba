//! Instance files and verification reports: one JSON object per file, UTF-8,
//! canonical (declaration-order) keys, bit-exact for a fixed seed. Colouring
//! payloads are row-major tables over increasing tuples in colex order.

use crate::coloring::{StageColoring, Tournament};
use crate::error::{Error, Result};
use crate::oracles::{LimitFunction, UniformSetSequence};
use crate::tree::DyadicTree;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// The payload, tagged by kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstancePayload {
    StageColoring(StageColoring),
    Tournament(Tournament),
    LimitFunction(LimitFunction),
    Tree(DyadicTree),
    Family(UniformSetSequence),
    Condition {
        universe: u64,
        factor: u64,
        stem: Vec<u64>,
        forbidden_pairs: Vec<(u64, u64)>,
    },
}

impl InstancePayload {
    pub fn kind(&self) -> &'static str {
        match self {
            InstancePayload::StageColoring(_) => "stage_coloring",
            InstancePayload::Tournament(_) => "tournament",
            InstancePayload::LimitFunction(_) => "limit_function",
            InstancePayload::Tree(_) => "tree",
            InstancePayload::Family(_) => "family",
            InstancePayload::Condition { .. } => "condition",
        }
    }

    /// Shape validation for payloads read from files: table sizes must match
    /// the declared bounds so later lookups cannot go out of range.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            InstancePayload::StageColoring(c) => c.is_consistent(),
            InstancePayload::Tournament(t) => t.is_consistent(),
            InstancePayload::LimitFunction(h) => h.is_consistent(),
            InstancePayload::Tree(t) => t.is_consistent(),
            InstancePayload::Family(f) => f.sets.iter().flatten().all(|&x| x < f.domain),
            InstancePayload::Condition { universe, stem, .. } => {
                stem.iter().all(|&x| x < *universe)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Instance(format!(
                "corrupt {} payload: table shape disagrees with its declared bounds",
                self.kind()
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub construction: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deviations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub metadata: Metadata,
    #[serde(flatten)]
    pub payload: InstancePayload,
}

impl InstanceFile {
    pub fn new(payload: InstancePayload, construction: &str, seed: Option<u64>) -> Self {
        InstanceFile {
            metadata: Metadata {
                seed,
                construction: construction.to_string(),
                deviations: Vec::new(),
            },
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(s)?;
        file.payload.validate()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn as_coloring(&self) -> Result<&StageColoring> {
        match &self.payload {
            InstancePayload::StageColoring(c) => Ok(c),
            p => Err(Error::Instance(format!(
                "expected a stage_coloring instance, found {}",
                p.kind()
            ))),
        }
    }

    pub fn as_limit_function(&self) -> Result<&LimitFunction> {
        match &self.payload {
            InstancePayload::LimitFunction(h) => Ok(h),
            p => Err(Error::Instance(format!(
                "expected a limit_function instance, found {}",
                p.kind()
            ))),
        }
    }

    pub fn as_tournament(&self) -> Result<&Tournament> {
        match &self.payload {
            InstancePayload::Tournament(t) => Ok(t),
            p => Err(Error::Instance(format!(
                "expected a tournament instance, found {}",
                p.kind()
            ))),
        }
    }

    pub fn as_tree(&self) -> Result<&DyadicTree> {
        match &self.payload {
            InstancePayload::Tree(t) => Ok(t),
            p => Err(Error::Instance(format!(
                "expected a tree instance, found {}",
                p.kind()
            ))),
        }
    }
}

/// One verified claim inside a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub claim: String,
    /// What was quantified over (seeds, sizes, exhaustive/budgeted).
    pub scope: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Verification run output: machine readable, failures carry witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pipeline: String,
    pub seed: u64,
    pub pass: bool,
    pub millis: u128,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {} ({})\n",
                if c.pass { "pass" } else { "FAIL" },
                c.claim,
                c.scope
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!("         witness: {w}\n"));
            }
        }
        out.push_str(&format!(
            "{}: {} in {} ms\n",
            self.pipeline,
            if self.pass { "pass" } else { "FAIL" },
            self.millis
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_coloring, gen_two_bounded_limit, ColoringClass};

    #[test]
    fn round_trip_identity_per_kind() {
        let files = vec![
            InstanceFile::new(
                InstancePayload::StageColoring(gen_coloring(ColoringClass::Mixed, 12, 4, 3)),
                "mixed",
                Some(3),
            ),
            InstanceFile::new(
                InstancePayload::LimitFunction(gen_two_bounded_limit(8, 8, 2, 1)),
                "two_bounded",
                Some(1),
            ),
            InstanceFile::new(
                InstancePayload::Tree(crate::generate::gen_random_tree(8, 0.25, 5)),
                "random_tree",
                Some(5),
            ),
            InstanceFile::new(
                InstancePayload::Tournament(crate::generate::gen_tournament(10, 2)),
                "random_tournament",
                Some(2),
            ),
            InstanceFile::new(
                InstancePayload::Condition {
                    universe: 24,
                    factor: 2,
                    stem: vec![1, 5],
                    forbidden_pairs: vec![(0, 1), (2, 3)],
                },
                "condition",
                None,
            ),
        ];
        for f in files {
            let json = f.to_json().unwrap();
            let back = InstanceFile::from_json(&json).unwrap();
            assert_eq!(f, back);
            // Canonical serialization: stable bytes.
            assert_eq!(json, back.to_json().unwrap());
        }
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let f = InstanceFile::new(
            InstancePayload::Tournament(crate::generate::gen_tournament(6, 0)),
            "t",
            None,
        );
        assert!(f.as_coloring().is_err());
        assert!(f.as_tournament().is_ok());
    }
}
