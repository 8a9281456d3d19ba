//! Brute-force stand-ins for the limit objects the constructions consume:
//! stage-approximated functions with explicit stabilization, mock halting
//! tables, monotone halt predicates, and uniformly indexed set families.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A total function with stagewise approximations `approx(x, s)` that
/// stabilize below `stage_bound`: for each `x` there is a stage after which
/// the value never moves. The stabilization stage per argument is recorded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitFunction {
    pub arg_bound: u64,
    pub stage_bound: u64,
    /// Row-major: entry for (x, s) at `x * stage_bound + s`.
    table: Vec<u64>,
    /// Least stage from which the value of `x` is constant.
    stabilization: Vec<u64>,
}

impl LimitFunction {
    /// Validates that every row is eventually constant and records the
    /// stabilization stages.
    pub fn new(arg_bound: u64, stage_bound: u64, table: Vec<u64>) -> Result<Self> {
        assert_eq!(table.len() as u64, arg_bound * stage_bound);
        assert!(stage_bound >= 1);
        let mut stabilization = Vec::with_capacity(arg_bound as usize);
        for x in 0..arg_bound {
            let row = &table[(x * stage_bound) as usize..((x + 1) * stage_bound) as usize];
            let last = row[row.len() - 1];
            let stab = row
                .iter()
                .rposition(|&v| v != last)
                .map(|p| p as u64 + 1)
                .unwrap_or(0);
            stabilization.push(stab);
        }
        Ok(LimitFunction {
            arg_bound,
            stage_bound,
            table,
            stabilization,
        })
    }

    /// Constant-in-stage lift of a plain function.
    pub fn constant(arg_bound: u64, stage_bound: u64, mut f: impl FnMut(u64) -> u64) -> Self {
        let mut table = Vec::with_capacity((arg_bound * stage_bound) as usize);
        for x in 0..arg_bound {
            let v = f(x);
            table.extend(std::iter::repeat(v).take(stage_bound as usize));
        }
        LimitFunction::new(arg_bound, stage_bound, table).unwrap()
    }

    /// Shape check for data read from untrusted files: consistent table size
    /// and per-argument stabilization records that match the rows.
    pub fn is_consistent(&self) -> bool {
        self.stage_bound >= 1
            && self.table.len() as u64 == self.arg_bound * self.stage_bound
            && self.stabilization.len() as u64 == self.arg_bound
            && match LimitFunction::new(self.arg_bound, self.stage_bound, self.table.clone()) {
                Ok(rebuilt) => rebuilt.stabilization == self.stabilization,
                Err(_) => false,
            }
    }

    pub fn approx_at(&self, x: u64, s: u64) -> u64 {
        debug_assert!(x < self.arg_bound && s < self.stage_bound);
        self.table[(x * self.stage_bound + s) as usize]
    }

    pub fn limit_value(&self, x: u64) -> u64 {
        self.approx_at(x, self.stage_bound - 1)
    }

    pub fn stabilization_stage(&self, x: u64) -> u64 {
        self.stabilization[x as usize]
    }

    /// Largest stabilization stage over all arguments.
    pub fn stabilization_bound(&self) -> u64 {
        self.stabilization.iter().copied().max().unwrap_or(0)
    }

    /// Requires all rows stable from `bound` on; the tail-window renderings
    /// are only sound under this.
    pub fn check_stabilized_by(&self, bound: u64) -> Result<()> {
        for x in 0..self.arg_bound {
            if self.stabilization[x as usize] > bound {
                return Err(Error::NoStabilization {
                    arg: x,
                    stage: self.stabilization[x as usize],
                });
            }
        }
        Ok(())
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }
}

/// Outcome of a mock machine on its own index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HaltEntry {
    Diverge,
    Converge { value: u64, stage: u64 },
}

/// Finite table of halting behaviours indexed by machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockHaltingTable {
    pub entries: Vec<HaltEntry>,
}

impl MockHaltingTable {
    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// What the stage-s observer sees for machine e: the converged value once
    /// the convergence stage has passed, nothing before.
    pub fn observed(&self, e: u64, s: u64) -> Option<u64> {
        match self.entries[e as usize] {
            HaltEntry::Diverge => None,
            HaltEntry::Converge { value, stage } => (stage <= s).then_some(value),
        }
    }
}

/// Renders a halting table as a limit function: divergent machines keep the
/// supplied default forever (a stabilized default, not a partial value).
pub fn halting_to_limit(
    h: &MockHaltingTable,
    default: impl Fn(u64) -> u64,
    stage_bound: u64,
) -> Result<LimitFunction> {
    let mut table = Vec::with_capacity((h.len() * stage_bound) as usize);
    for e in 0..h.len() {
        for s in 0..stage_bound {
            table.push(h.observed(e, s).unwrap_or_else(|| default(e)));
        }
    }
    LimitFunction::new(h.len(), stage_bound, table)
}

/// A monotone halt predicate on strictly increasing strings together with an
/// output value: once a string halts, all its extensions halt. The variants
/// are upward closed by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MockFunctional {
    /// Halts on every string, including the empty one.
    AlwaysHalts { value: u64 },
    /// Never halts.
    NeverHalts,
    /// Halts exactly on the strings containing the trigger element.
    HaltsOnValue { trigger: u64, value: u64 },
    /// Halts exactly on the strings of at least the given length.
    HaltsOnLength { length: usize, value: u64 },
}

impl MockFunctional {
    pub fn halts(&self, s: &[u64]) -> bool {
        match self {
            MockFunctional::AlwaysHalts { .. } => true,
            MockFunctional::NeverHalts => false,
            MockFunctional::HaltsOnValue { trigger, .. } => s.contains(trigger),
            MockFunctional::HaltsOnLength { length, .. } => s.len() >= *length,
        }
    }

    pub fn output(&self, s: &[u64]) -> Option<u64> {
        if !self.halts(s) {
            return None;
        }
        Some(match self {
            MockFunctional::AlwaysHalts { value } => *value,
            MockFunctional::NeverHalts => unreachable!(),
            MockFunctional::HaltsOnValue { value, .. } => *value,
            MockFunctional::HaltsOnLength { value, .. } => *value,
        })
    }

    /// Can some increasing extension of `s` (values above `s`'s last) halt?
    pub fn can_halt_above(&self, s: &[u64]) -> bool {
        match self {
            MockFunctional::AlwaysHalts { .. } => true,
            MockFunctional::NeverHalts => false,
            MockFunctional::HaltsOnValue { trigger, .. } => {
                s.contains(trigger) || s.last().map_or(true, |&l| l < *trigger)
            }
            MockFunctional::HaltsOnLength { .. } => true,
        }
    }

    /// Upper bound on the values its membership depends on, when one exists:
    /// strings differing only above the bound halt alike.
    pub fn value_reach(&self) -> Option<u64> {
        match self {
            MockFunctional::AlwaysHalts { .. } => Some(0),
            MockFunctional::NeverHalts => Some(0),
            MockFunctional::HaltsOnValue { trigger, .. } => Some(trigger + 1),
            MockFunctional::HaltsOnLength { .. } => None,
        }
    }
}

/// Uniformly indexed finite family of sets over a shared domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformSetSequence {
    pub domain: u64,
    pub sets: Vec<BTreeSet<u64>>,
}

impl UniformSetSequence {
    pub fn new(domain: u64, sets: Vec<BTreeSet<u64>>) -> Result<Self> {
        for set in &sets {
            if let Some(&m) = set.iter().next_back() {
                if m >= domain {
                    return Err(Error::DomainTooSmall { domain, element: m });
                }
            }
        }
        Ok(UniformSetSequence { domain, sets })
    }

    pub fn set(&self, i: u64) -> &BTreeSet<u64> {
        &self.sets[i as usize]
    }

    pub fn contains(&self, i: u64, x: u64) -> bool {
        self.sets[i as usize].contains(&x)
    }
}
