//! Integer-valued functions on the unit group and the four properties the
//! rigidity lemma talks about: evenness, monotonicity on `[1, q/2]_Z`,
//! translation invariance, constancy.

use serde::{Deserialize, Serialize};

use crate::hodge_data::HodgeProfile;
use crate::unit_group::{Unit, UnitGroup};

/// Which way a function is monotone on `[1, q/2]_Z`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    NonIncreasing,
    NonDecreasing,
}

/// A function `(Z/qZ)^* -> Z`, stored by residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    q: u64,
    values: Vec<i64>,
}

impl FunctionTable {
    /// Build from values on every unit, in canonical order.
    pub fn from_units(group: &UnitGroup, values: &[i64]) -> Self {
        assert_eq!(values.len(), group.units().len());
        let mut table = vec![0; group.q() as usize];
        for (&u, &v) in group.units().iter().zip(values) {
            table[u.index()] = v;
        }
        FunctionTable { q: group.q(), values: table }
    }

    /// Even extension of values given on `[1, q/2]_Z` (ascending).
    pub fn from_half(group: &UnitGroup, half_values: &[i64]) -> Self {
        let half = group.half_units();
        assert_eq!(half.len(), half_values.len());
        let mut table = vec![0; group.q() as usize];
        for (&u, &v) in half.iter().zip(half_values) {
            table[u.index()] = v;
            table[group.conjugate(u).index()] = v;
        }
        FunctionTable { q: group.q(), values: table }
    }

    pub fn from_profile(profile: &HodgeProfile) -> Self {
        let g = profile.group();
        let values: Vec<i64> = g.units().iter().map(|&a| profile.hquad(a) as i64).collect();
        Self::from_units(g, &values)
    }

    pub fn constant(group: &UnitGroup, c: i64) -> Self {
        Self::from_units(group, &vec![c; group.units().len()])
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn at(&self, x: Unit) -> i64 {
        self.values[x.index()]
    }

    pub fn half_values(&self, group: &UnitGroup) -> Vec<i64> {
        group.half_units().iter().map(|&u| self.at(u)).collect()
    }

    pub fn negated(&self) -> Self {
        FunctionTable {
            q: self.q,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

pub fn is_even(group: &UnitGroup, h: &FunctionTable) -> bool {
    group
        .units()
        .iter()
        .all(|&x| h.at(x) == h.at(group.conjugate(x)))
}

pub fn is_monotone(group: &UnitGroup, h: &FunctionTable, direction: Direction) -> bool {
    group.half_units().windows(2).all(|w| match direction {
        Direction::NonIncreasing => h.at(w[0]) >= h.at(w[1]),
        Direction::NonDecreasing => h.at(w[0]) <= h.at(w[1]),
    })
}

pub fn is_constant(group: &UnitGroup, h: &FunctionTable) -> bool {
    let first = h.at(group.one());
    group.units().iter().all(|&x| h.at(x) == first)
}

/// `h(a x) = h(x)` for every unit `x`.
pub fn is_theta_invariant(group: &UnitGroup, h: &FunctionTable, a: Unit) -> bool {
    group
        .units()
        .iter()
        .all(|&x| h.at(group.mul(a, x)) == h.at(x))
}

/// All `a` with `h o theta_a = h`, ascending.
pub fn invariance_set(group: &UnitGroup, h: &FunctionTable) -> Vec<Unit> {
    group
        .units()
        .iter()
        .copied()
        .filter(|&a| is_theta_invariant(group, h, a))
        .collect()
}
