//! Arithmetic in the unit group `(Z/qZ)^*` for a prime power `q = p^r`.
//!
//! Units are stored by their canonical representative in `[1, q-1]`, and
//! every set-valued query returns its members in ascending order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the modulus. Products of two residues stay below
/// `2^62`, so `u64` arithmetic never wraps.
pub const DEFAULT_MAX_Q: u64 = 1 << 31;

/// A canonical residue modulo `q`, coprime to `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Unit(u32);

impl Unit {
    #[inline]
    pub fn residue(self) -> u64 {
        self.0 as u64
    }

    #[inline]
    pub(crate) fn from_residue(r: u64) -> Self {
        Unit(r as u32)
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Integers `i` with `lo <= i <= hi` and `gcd(i, p) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfRange {
    pub lo: i64,
    pub hi: i64,
    pub members: Vec<i64>,
}

impl HalfRange {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: i64) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn max(&self) -> Option<i64> {
        self.members.last().copied()
    }
}

/// Factor `q` as `p^r` by trial division. Returns `None` unless `q` is a
/// power of a single prime.
pub fn prime_power_factor(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 0;
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Some((q, 1));
    }
    let mut m = q;
    let mut r = 0;
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power_factor(q).is_some()
}

/// Prime powers in `[lo, hi]`, ascending.
pub fn prime_powers_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&q| is_prime_power(q)).collect()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The group `(Z/qZ)^*` with its factorization and sorted unit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    q: u64,
    p: u64,
    r: u32,
    phi: u64,
    units: Vec<Unit>,
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_cap(q, DEFAULT_MAX_Q)
    }

    pub fn with_cap(q: u64, cap: u64) -> Result<Self> {
        let cap = cap.min(DEFAULT_MAX_Q);
        if q > cap {
            return Err(Error::ModulusTooLarge { q, cap });
        }
        let (p, r) = prime_power_factor(q).ok_or(Error::NotPrimePower(q))?;
        let phi = (p - 1) * p.pow(r - 1);
        let units: Vec<Unit> = (1..q)
            .filter(|a| a % p != 0)
            .map(|a| Unit(a as u32))
            .collect();
        debug_assert_eq!(units.len() as u64, phi);
        Ok(UnitGroup { q, p, r, phi, units })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn one(&self) -> Unit {
        Unit(1)
    }

    /// `-1`, i.e. `q - 1` (which is `1` when `q = 2`).
    pub fn minus_one(&self) -> Unit {
        Unit((self.q - 1) as u32)
    }

    /// Reduce an arbitrary integer modulo `q` and return it as a unit.
    pub fn unit(&self, residue: i64) -> Result<Unit> {
        let r = residue.rem_euclid(self.q as i64) as u64;
        if r == 0 || gcd(r, self.p) != 1 {
            return Err(Error::NotAUnit { q: self.q, residue: r });
        }
        Ok(Unit(r as u32))
    }

    /// Fallible lookup for residues already in canonical range.
    pub fn try_unit(&self, residue: u64) -> Option<Unit> {
        (1..self.q).contains(&residue).then_some(())?;
        (residue % self.p != 0).then_some(Unit(residue as u32))
    }

    pub fn is_unit(&self, residue: u64) -> bool {
        self.try_unit(residue).is_some()
    }

    #[inline]
    pub fn mul(&self, a: Unit, b: Unit) -> Unit {
        Unit(((a.residue() * b.residue()) % self.q) as u32)
    }

    pub fn pow(&self, a: Unit, mut e: u64) -> Unit {
        let mut base = a.residue();
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.q;
            }
            base = base * base % self.q;
            e >>= 1;
        }
        Unit(acc as u32)
    }

    pub fn inv(&self, a: Unit) -> Unit {
        // extended Euclid on (a, q)
        let (mut r0, mut r1) = (self.q as i64, a.residue() as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        debug_assert_eq!(r0, 1);
        let inv = t0.rem_euclid(self.q as i64) as u64;
        Unit(inv as u32)
    }

    /// Least `k >= 1` with `a^k = 1`.
    pub fn order(&self, a: Unit) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x.residue() != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Complex conjugation `a -> q - a`.
    #[inline]
    pub fn conjugate(&self, a: Unit) -> Unit {
        if self.q == 2 {
            a
        } else {
            Unit((self.q - a.residue()) as u32)
        }
    }

    /// Representative of `{x, q - x}` lying in `[1, q/2]`.
    #[inline]
    pub fn fold(&self, x: Unit) -> Unit {
        x.min(self.conjugate(x))
    }

    /// The subgroup generated by `generators`, by breadth-first closure.
    pub fn closure(&self, generators: &[Unit]) -> Vec<Unit> {
        let mut seen = vec![false; self.q as usize];
        let mut frontier = vec![self.one()];
        seen[1] = true;
        while let Some(x) = frontier.pop() {
            for &g in generators {
                let y = self.mul(x, g);
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    frontier.push(y);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| Unit(i as u32))
            .collect()
    }

    /// `<a, -1>`, sorted ascending.
    pub fn subgroup_pm(&self, a: Unit) -> Vec<Unit> {
        if self.q == 2 {
            return vec![self.one()];
        }
        self.closure(&[a, self.minus_one()])
    }

    /// Largest element of `<a, -1> ∩ [1, q/2]_Z`.
    ///
    /// `<a, -1>` is `<a> ∪ -<a>`, so this is the largest fold of a power of
    /// `a`; no subgroup is materialized.
    pub fn b_max(&self, a: Unit) -> Unit {
        let mut best = self.one();
        let mut x = a;
        while x.residue() != 1 {
            best = best.max(self.fold(x));
            x = self.mul(x, a);
        }
        best
    }

    pub fn range_coprime(&self, lo: i64, hi: i64) -> HalfRange {
        let p = self.p as i64;
        let members = if lo <= hi {
            (lo..=hi).filter(|i| i.rem_euclid(p) != 0).collect()
        } else {
            Vec::new()
        };
        HalfRange { lo, hi, members }
    }

    /// `[1, q/2]_Z`.
    pub fn half_range(&self) -> HalfRange {
        self.range_coprime(1, (self.q / 2).max(1) as i64)
    }

    /// The half range as units, in ascending order.
    pub fn half_units(&self) -> Vec<Unit> {
        let half = (self.q / 2).max(1);
        self.units
            .iter()
            .copied()
            .take_while(|u| u.residue() <= half)
            .collect()
    }

    /// Units `u != 1` with `u^2 = 1`.
    pub fn order_two_elements(&self) -> Vec<Unit> {
        self.units
            .iter()
            .copied()
            .filter(|&u| u.residue() != 1 && self.mul(u, u).residue() == 1)
            .collect()
    }
}
