//! Decision procedure for the even-function rigidity lemma: an even function
//! on `(Z/qZ)^*` that is monotone on `[1, q/2]_Z` and invariant under
//! `x -> a x` for some `a != ±1` is constant.
//!
//! [`decide_even_lemma`] computes the orbit/interval closure for `(q, a)` and
//! returns a [`LemmaCertificate`]: either the closure collapses to a single
//! block (a replayable proof that every such function is constant), or it
//! leaves several blocks and a step function that is a concrete
//! counterexample. [`threshold_oracle`] decides the same question by a
//! different route.

mod function;
mod oracle;
mod partition;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use function::{
    invariance_set, is_constant, is_even, is_monotone, is_theta_invariant, Direction,
    FunctionTable,
};
pub use oracle::{invariant_thresholds, threshold_oracle};
pub use partition::{collapse_closure, MergeCause, MergeEvent, Partition, ReplayFailure};

use crate::error::{Error, Result};
use crate::hodge_data::HodgeProfile;
use crate::report::{Cell, CellResult, Detail, Status, VerificationReport};
use crate::unit_group::{prime_powers_in, Unit, UnitGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ConstantForced,
    NotForced,
}

/// Which case of the hand proof covers `a = b_max(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepTag {
    TrivialPM1,
    P2,
    EvenOr3a,
    P3,
    SevenA,
    SmallA,
    P5,
}

impl fmt::Display for StepTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// First matching case, checked in the order: `a = 1`, `p = 2`, `p = 3`,
/// `p = 5`, `a` even or `3a >= q`, `7a >= q`, otherwise the small-`a` case.
pub fn classify_step(group: &UnitGroup, a: Unit) -> Result<StepTag> {
    classify_with_b_max(group, a, group.b_max(a))
}

fn classify_with_b_max(group: &UnitGroup, a: Unit, b: Unit) -> Result<StepTag> {
    if b != a {
        return Err(Error::PreconditionViolated(format!(
            "classify_step needs a = b_max(a), got a={a}, b_max={b} (q={})",
            group.q()
        )));
    }
    let (q, p, a) = (group.q(), group.p(), a.residue());
    Ok(if a == 1 {
        StepTag::TrivialPM1
    } else if p == 2 {
        StepTag::P2
    } else if p == 3 {
        StepTag::P3
    } else if p == 5 {
        StepTag::P5
    } else if a % 2 == 0 || 3 * a >= q {
        StepTag::EvenOr3a
    } else if 7 * a >= q {
        StepTag::SevenA
    } else {
        StepTag::SmallA
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCertificate {
    pub q: u64,
    pub a: u64,
    pub b_max: u64,
    pub direction: Direction,
    pub verdict: Verdict,
    pub trace: Partition,
    /// Values on `[1, q/2]_Z`, present iff the verdict is `NotForced`.
    pub counterexample: Option<Vec<i64>>,
    pub step_tag: Option<StepTag>,
}

pub fn decide_even_lemma(group: &UnitGroup, a: Unit) -> LemmaCertificate {
    decide_even_lemma_with(group, a, Direction::NonIncreasing)
}

pub fn decide_even_lemma_with(group: &UnitGroup, a: Unit, direction: Direction) -> LemmaCertificate {
    let trace = collapse_closure(group, a);
    let b_max = group.b_max(a);
    let step_tag = (b_max == a && a != group.one())
        .then(|| classify_with_b_max(group, a, b_max).ok())
        .flatten();
    let (verdict, counterexample) = if trace.block_count() == 1 {
        (Verdict::ConstantForced, None)
    } else {
        let k = trace.block_count() as i64;
        let mut values = Vec::with_capacity(trace.domain.len());
        for (rank, class) in trace.classes.iter().enumerate() {
            let v = k - rank as i64;
            let v = match direction {
                Direction::NonIncreasing => v,
                Direction::NonDecreasing => -v,
            };
            values.extend(std::iter::repeat(v).take(class.len()));
        }
        (Verdict::NotForced, Some(values))
    };
    LemmaCertificate {
        q: group.q(),
        a: a.residue(),
        b_max: b_max.residue(),
        direction,
        verdict,
        trace,
        counterexample,
        step_tag,
    }
}

impl LemmaCertificate {
    /// Independent re-check of every certificate invariant.
    pub fn check(&self, group: &UnitGroup) -> std::result::Result<(), String> {
        if group.q() != self.q || self.trace.q != self.q || self.trace.a != self.a {
            return Err("certificate belongs to a different (q, a)".into());
        }
        self.trace.replay(group)?;
        let a = group
            .try_unit(self.a)
            .ok_or_else(|| format!("{} is not a unit", self.a))?;
        let one_block = self.trace.block_count() == 1;
        if one_block != (self.verdict == Verdict::ConstantForced) {
            return Err("verdict disagrees with block count".into());
        }
        match (&self.counterexample, self.verdict) {
            (None, Verdict::ConstantForced) => {}
            (Some(values), Verdict::NotForced) => {
                if values.len() != self.trace.domain.len() {
                    return Err("counterexample has the wrong length".into());
                }
                let h = FunctionTable::from_half(group, values);
                if !is_even(group, &h) {
                    return Err("counterexample is not even".into());
                }
                if !is_monotone(group, &h, self.direction) {
                    return Err("counterexample is not monotone".into());
                }
                if !is_theta_invariant(group, &h, a) {
                    return Err("counterexample is not theta_a-invariant".into());
                }
                if is_constant(group, &h) {
                    return Err("counterexample is constant".into());
                }
            }
            _ => return Err("counterexample presence disagrees with verdict".into()),
        }
        let b_max = group.b_max(a);
        if b_max.residue() != self.b_max {
            return Err("wrong b_max".into());
        }
        let expect_tag = b_max == a && a != group.one();
        if self.step_tag.is_some() != expect_tag {
            return Err("step tag presence is wrong".into());
        }
        if let Some(tag) = self.step_tag {
            if classify_with_b_max(group, a, b_max).ok() != Some(tag) {
                return Err("step tag is wrong".into());
            }
        }
        Ok(())
    }
}

/// Smallest `x` with `H(x a) != H(x b)`.
pub fn separation_witness(profile: &HodgeProfile, a: Unit, b: Unit) -> Result<Option<Unit>> {
    let g = profile.group();
    if a == b || a == g.conjugate(b) {
        return Err(Error::BadPair {
            q: g.q(),
            a: a.residue(),
            b: b.residue(),
        });
    }
    Ok(g.units()
        .iter()
        .copied()
        .find(|&x| profile.hquad(g.mul(x, a)) != profile.hquad(g.mul(x, b))))
}

/// Every good ordered pair of `profile` must be separated by some
/// translate. One cell per profile.
pub fn verify_separation(profile: &HodgeProfile) -> VerificationReport {
    let g = profile.group();
    let mut good = 0;
    let mut unseparated = Vec::new();
    for &a in g.units() {
        for &b in g.units() {
            if let Ok(found) = separation_witness(profile, a, b) {
                good += 1;
                if found.is_none() {
                    unseparated.push((a.residue(), b.residue()));
                }
            }
        }
    }
    let mut report = VerificationReport::new("separation")
        .with_param("n", profile.n())
        .with_param("q", g.q());
    report.count("good_pairs", good);
    report.push(CellResult {
        cell: Cell::nq(profile.n(), g.q()),
        status: if unseparated.is_empty() { Status::Pass } else { Status::Fail },
        detail: Detail::Separation {
            good_pairs: good,
            unseparated,
        },
    });
    report.finalized()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LemmaScanOptions {
    pub direction: Direction,
    #[doc(hidden)]
    pub inject_fault: bool,
}

fn lemma_cell(group: &UnitGroup, a: Unit, opts: &LemmaScanOptions, fault: bool) -> (CellResult, Option<StepTag>) {
    let mut cert = decide_even_lemma_with(group, a, opts.direction);
    if fault {
        cert.verdict = Verdict::NotForced;
    }
    let oracle = threshold_oracle(group, a);
    let b = group.b_max(a);
    let tag = classify_with_b_max(group, b, group.b_max(b)).ok();
    let p2_shape = group.p() != 2 || b.residue() == (group.q() / 2) - 1;
    let checked = cert.check(group);
    let forced = cert.verdict == Verdict::ConstantForced;
    let ok = forced && oracle && tag.is_some() && p2_shape && checked.is_ok();
    let detail = Detail::Lemma {
        verdict: cert.verdict,
        b_max: b.residue(),
        step_tag: tag,
        oracle_agrees: oracle == forced,
        counterexample: if ok { None } else { cert.counterexample.clone() },
        merge_log: if ok { None } else { Some(cert.trace.merge_log.clone()) },
    };
    (
        CellResult {
            cell: Cell::qa(group.q(), a.residue()),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        },
        tag,
    )
}

/// Every prime power `q <= q_max` and every unit `a != ±1`: the closure
/// must collapse, the threshold oracle must agree, the certificate must
/// re-check, and `b_max(a)` must fall in one of the proof's cases.
pub fn verify_lemma_exhaustive(q_max: u64) -> VerificationReport {
    verify_lemma_with(q_max, &LemmaScanOptions::default())
}

pub fn verify_lemma_with(q_max: u64, opts: &LemmaScanOptions) -> VerificationReport {
    let qs = prime_powers_in(2, q_max);
    let partial: Vec<VerificationReport> = qs
        .par_iter()
        .map(|&q| {
            let g = UnitGroup::new(q).expect("prime power");
            let cells: Vec<(CellResult, Option<StepTag>)> = g
                .units()
                .par_iter()
                .filter(|&&a| a != g.one() && a != g.minus_one())
                .map(|&a| {
                    let fault = opts.inject_fault && q == qs[qs.len() - 1] && a == g.units()[1];
                    lemma_cell(&g, a, opts, fault)
                })
                .collect();
            let mut rep = VerificationReport::new("verify-lemma");
            for (cell, tag) in cells {
                if let Some(tag) = tag {
                    rep.tag(tag);
                }
                rep.push(cell);
            }
            rep
        })
        .collect();
    let mut report = VerificationReport::new("verify-lemma").with_param("q_max", q_max);
    for p in partial {
        report.merge(p);
    }
    let violations = report.results.iter().filter(|r| r.status == Status::Fail).count();
    report.count("violations", violations as u64);
    report.finalized()
}
