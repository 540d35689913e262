//! Machine-readable scan reports shared by the library verifiers and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::ConditionReport;
use crate::hodge_data::DimensionSet;
use crate::lemma_engine::{MergeEvent, StepTag, Verdict};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One grid point. Which coordinates are present depends on the scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<u64>,
}

impl Cell {
    pub fn nq(n: u64, q: u64) -> Self {
        Cell { q, n: Some(n), a: None, b: None }
    }

    pub fn qa(q: u64, a: u64) -> Self {
        Cell { q, n: None, a: Some(a), b: None }
    }

    pub fn pair(n: u64, q: u64, a: u64, b: u64) -> Self {
        Cell { q, n: Some(n), a: Some(a), b: Some(b) }
    }

    /// Grid order: by `q`, then `n`, then `a`, then `b`.
    fn sort_key(&self) -> (u64, Option<u64>, Option<u64>, Option<u64>) {
        (self.q, self.n, self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detail {
    Dimensions {
        dims: DimensionSet,
        isogeny_sum: u64,
    },
    Conditions(ConditionReport),
    Lemma {
        verdict: Verdict,
        b_max: u64,
        step_tag: Option<StepTag>,
        oracle_agrees: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        counterexample: Option<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        merge_log: Option<Vec<MergeEvent>>,
    },
    Profile {
        violations: Vec<String>,
        h_constant: bool,
    },
    Separation {
        good_pairs: u64,
        unseparated: Vec<(u64, u64)>,
    },
    OrbitCover {
        orbits: u64,
        witnesses: Vec<OrbitWitness>,
        uncovered: Vec<(u64, u64)>,
    },
    Orbits {
        phi: u64,
        good_pairs: u64,
        good_orbits: u64,
        conjugate_orbits: u64,
        cm_types_log2: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitWitness {
    pub representative: (u64, u64),
    pub member: (u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellResult {
    pub cell: Cell,
    pub status: Status,
    pub detail: Detail,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: u64,
    pub passed: u64,
    pub failed: u64,
    pub informational: u64,
    pub step_tags: BTreeMap<String, u64>,
    /// Scan-specific tallies such as converse-direction statistics.
    pub counters: BTreeMap<String, u64>,
    pub overall_status: String,
    /// Excluded from determinism comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invocation {
    pub command: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub invocation: Invocation,
    pub grid: Vec<Cell>,
    pub results: Vec<CellResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(command: &str) -> Self {
        VerificationReport {
            tool_version: TOOL_VERSION.to_string(),
            invocation: Invocation {
                command: command.to_string(),
                params: BTreeMap::new(),
            },
            grid: Vec::new(),
            results: Vec::new(),
            summary: Summary::default(),
        }
        .finalized()
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.invocation.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, result: CellResult) {
        self.grid.push(result.cell);
        self.results.push(result);
    }

    pub fn count(&mut self, counter: &str, by: u64) {
        *self.summary.counters.entry(counter.to_string()).or_default() += by;
    }

    pub fn tag(&mut self, tag: StepTag) {
        *self.summary.step_tags.entry(tag.to_string()).or_default() += 1;
    }

    /// Appends `other`'s cells and tallies. Order-independent once
    /// [`finalized`](Self::finalized) sorts the grid.
    pub fn merge(&mut self, other: VerificationReport) {
        self.results.extend(other.results);
        for (k, v) in other.summary.step_tags {
            *self.summary.step_tags.entry(k).or_default() += v;
        }
        for (k, v) in other.summary.counters {
            *self.summary.counters.entry(k).or_default() += v;
        }
    }

    /// Sorts cells into grid order and recomputes the pass/fail counts.
    pub fn finalized(mut self) -> Self {
        self.results.sort_by_key(|r| r.cell.sort_key());
        self.grid = self.results.iter().map(|r| r.cell).collect();
        let s = &mut self.summary;
        s.cells = self.results.len() as u64;
        s.passed = self.results.iter().filter(|r| r.status == Status::Pass).count() as u64;
        s.failed = self.results.iter().filter(|r| r.status == Status::Fail).count() as u64;
        s.informational = self.results.iter().filter(|r| r.status == Status::Info).count() as u64;
        s.overall_status = if s.failed == 0 { "pass" } else { "fail" }.to_string();
        self
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.results.iter().filter(|r| r.status == Status::Fail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_tracks_cells() {
        let mut r = VerificationReport::new("dims");
        r.push(CellResult {
            cell: Cell::nq(5, 7),
            status: Status::Fail,
            detail: Detail::Profile {
                violations: vec!["x".into()],
                h_constant: false,
            },
        });
        r.push(CellResult {
            cell: Cell::nq(4, 5),
            status: Status::Pass,
            detail: Detail::Profile {
                violations: vec![],
                h_constant: false,
            },
        });
        let r = r.finalized();
        assert_eq!((r.summary.cells, r.summary.passed, r.summary.failed), (2, 1, 1));
        assert_eq!(r.summary.overall_status, "fail");
        assert_eq!(r.grid, vec![Cell::nq(4, 5), Cell::nq(5, 7)]);
    }

    #[test]
    fn empty_report_passes() {
        let r = VerificationReport::new("scan");
        assert!(r.passed());
        assert_eq!(r.summary.overall_status, "pass");
    }
}
