//! Permutation shadow of the Galois action on pairs of embeddings: diagonal
//! translation orbits of ordered unit pairs, good pairs, and CM types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hodge_data::HodgeProfile;
use crate::report::{Cell, CellResult, Detail, OrbitWitness, Status, VerificationReport};
use crate::unit_group::{Unit, UnitGroup};

/// Largest `phi(q)/2` for which [`cm_types`] will enumerate.
pub const DEFAULT_CM_ENUMERATION_BOUND: u64 = 24;

pub fn conjugate(group: &UnitGroup, a: Unit) -> Unit {
    group.conjugate(a)
}

pub fn is_good_pair(group: &UnitGroup, a: Unit, b: Unit) -> bool {
    a != b && a != group.conjugate(b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOrbit {
    pub q: u64,
    pub representative: (Unit, Unit),
    /// Sorted lexicographically; the first member is the representative.
    pub members: Vec<(Unit, Unit)>,
}

impl PairOrbit {
    pub fn is_good(&self, group: &UnitGroup) -> bool {
        let (a, b) = self.representative;
        is_good_pair(group, a, b)
    }
}

/// `{(x a, x b) : x a unit}`.
pub fn pair_orbit(group: &UnitGroup, a: Unit, b: Unit) -> Result<PairOrbit> {
    if a == b {
        return Err(Error::BadPair {
            q: group.q(),
            a: a.residue(),
            b: b.residue(),
        });
    }
    let mut members: Vec<(Unit, Unit)> = group
        .units()
        .iter()
        .map(|&x| (group.mul(x, a), group.mul(x, b)))
        .collect();
    members.sort_unstable();
    members.dedup();
    Ok(PairOrbit {
        q: group.q(),
        representative: members[0],
        members,
    })
}

/// All orbits on ordered pairs with distinct entries. Each orbit contains
/// exactly one pair `(1, c)`, so orbits are indexed by `c != 1`.
pub fn all_pair_orbits(group: &UnitGroup) -> Vec<PairOrbit> {
    group
        .units()
        .iter()
        .filter(|&&c| c != group.one())
        .map(|&c| pair_orbit(group, group.one(), c).expect("c != 1"))
        .collect()
}

/// Good ordered pairs in lexicographic order.
pub fn good_pairs(group: &UnitGroup) -> Vec<(Unit, Unit)> {
    let us = group.units();
    us.iter()
        .flat_map(|&a| us.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| is_good_pair(group, a, b))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmType {
    pub q: u64,
    pub members: Vec<Unit>,
}

impl CmType {
    /// Exactly one of `a`, `q - a` for every unit `a`.
    pub fn is_valid(&self, group: &UnitGroup) -> bool {
        self.members.len() as u64 * 2 == group.phi()
            && group.units().iter().all(|&a| {
                let here = self.members.binary_search(&a).is_ok();
                let there = self.members.binary_search(&group.conjugate(a)).is_ok();
                here != there
            })
    }
}

/// Lazy enumeration of the `2^(phi(q)/2)` CM types. Bit `i` of the counter
/// picks `q - x_i` instead of `x_i`, where `x_i` is the `i`-th element of
/// `[1, q/2]_Z`.
#[derive(Debug, Clone)]
pub struct CmTypes {
    q: u64,
    half: Vec<Unit>,
    conj: Vec<Unit>,
    next: u64,
    end: u64,
}

impl Iterator for CmTypes {
    type Item = CmType;

    fn next(&mut self) -> Option<CmType> {
        if self.next >= self.end {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let mut members: Vec<Unit> = (0..self.half.len())
            .map(|i| if mask >> i & 1 == 0 { self.half[i] } else { self.conj[i] })
            .collect();
        members.sort_unstable();
        Some(CmType { q: self.q, members })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

/// `log2` of the number of CM types, i.e. `phi(q)/2`.
pub fn cm_type_count_log2(group: &UnitGroup) -> u64 {
    group.phi() / 2
}

pub fn cm_type_count(group: &UnitGroup) -> Option<u128> {
    1u128.checked_shl(cm_type_count_log2(group) as u32)
}

pub fn cm_types(group: &UnitGroup) -> Result<CmTypes> {
    cm_types_bounded(group, DEFAULT_CM_ENUMERATION_BOUND)
}

pub fn cm_types_bounded(group: &UnitGroup, bound: u64) -> Result<CmTypes> {
    if group.q() < 3 {
        return Err(Error::InvalidParams("CM types need q >= 3".into()));
    }
    let exponent = cm_type_count_log2(group);
    if exponent > bound.min(63) {
        return Err(Error::DomainTooLarge { exponent, bound });
    }
    let half = group.half_units();
    let conj = half.iter().map(|&x| group.conjugate(x)).collect();
    Ok(CmTypes {
        q: group.q(),
        half,
        conj,
        next: 0,
        end: 1 << exponent,
    })
}

/// For each orbit of good pairs, finds a member `(a0, b0)` with
/// `H(a0) != H(b0)`. One cell per profile.
pub fn orbit_separation_cover(profile: &HodgeProfile) -> VerificationReport {
    let g = profile.group();
    let mut witnesses = Vec::new();
    let mut uncovered = Vec::new();
    let mut orbits = 0;
    for orbit in all_pair_orbits(g).into_iter().filter(|o| o.is_good(g)) {
        orbits += 1;
        let rep = (orbit.representative.0.residue(), orbit.representative.1.residue());
        match orbit
            .members
            .iter()
            .find(|(a, b)| profile.hquad(*a) != profile.hquad(*b))
        {
            Some(&(a, b)) => witnesses.push(OrbitWitness {
                representative: rep,
                member: (a.residue(), b.residue()),
            }),
            None => uncovered.push(rep),
        }
    }
    let mut report = VerificationReport::new("orbit-cover")
        .with_param("n", profile.n())
        .with_param("q", g.q());
    report.count("good_orbits", orbits);
    report.push(CellResult {
        cell: Cell::nq(profile.n(), g.q()),
        status: if uncovered.is_empty() { Status::Pass } else { Status::Fail },
        detail: Detail::OrbitCover {
            orbits,
            witnesses,
            uncovered,
        },
    });
    report.finalized()
}

/// Orbit census for `q`: how many orbits are good and how many consist of
/// conjugate pairs.
pub fn orbit_census(group: &UnitGroup) -> CellResult {
    let orbits = all_pair_orbits(group);
    let good = orbits.iter().filter(|o| o.is_good(group)).count() as u64;
    CellResult {
        cell: Cell {
            q: group.q(),
            n: None,
            a: None,
            b: None,
        },
        status: Status::Info,
        detail: Detail::Orbits {
            phi: group.phi(),
            good_pairs: good_pairs(group).len() as u64,
            good_orbits: good,
            conjugate_orbits: orbits.len() as u64 - good,
            cm_types_log2: cm_type_count_log2(group),
        },
    }
}
