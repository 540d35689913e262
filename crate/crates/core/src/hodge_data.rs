//! Hodge multiplicities `n_a = floor(n a / q)`, the quadratic step function
//! `H(a) = 4 h(a) = (n - 1 - 2 n_a)^2`, and the integer dimension formulas
//! attached to the new part of a superelliptic Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unit_group::{Unit, UnitGroup};

fn check_params(n: u64, group: &UnitGroup) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidParams(format!("degree n={n} must be at least 4")));
    }
    if n % group.p() == 0 {
        return Err(Error::InvalidParams(format!(
            "p={} divides n={n}",
            group.p()
        )));
    }
    Ok(())
}

/// `floor(n a / q)` for the canonical representative of `a`.
pub fn multiplicity(n: u64, group: &UnitGroup, a: Unit) -> Result<u64> {
    check_params(n, group)?;
    let na = n
        .checked_mul(a.residue())
        .ok_or_else(|| Error::Overflow(format!("{n} * {a}")))?;
    Ok(na / group.q())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeProfile {
    n: u64,
    group: UnitGroup,
    // Both tables are indexed by residue; non-unit slots hold 0.
    mult: Vec<u64>,
    hquad: Vec<u64>,
}

/// Outcome of [`HodgeProfile::h_constancy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constancy {
    pub constant: bool,
    pub witness: Option<(Unit, Unit)>,
}

impl HodgeProfile {
    pub fn build(n: u64, group: &UnitGroup) -> Result<Self> {
        check_params(n, group)?;
        let q = group.q() as usize;
        let mut mult = vec![0; q];
        let mut hquad = vec![0; q];
        for &a in group.units() {
            let m = multiplicity(n, group, a)?;
            let centered = (n - 1) as i128 - 2 * m as i128;
            mult[a.index()] = m;
            hquad[a.index()] = (centered * centered) as u64;
        }
        let profile = HodgeProfile {
            n,
            group: group.clone(),
            mult,
            hquad,
        };
        let violations = profile.check_invariants();
        if let Some(first) = violations.first() {
            return Err(Error::InvariantViolated(format!(
                "(n={n}, q={}): {first}",
                group.q()
            )));
        }
        Ok(profile)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    pub fn e_dim(&self) -> u64 {
        self.n - 1
    }

    #[inline]
    pub fn mult(&self, a: Unit) -> u64 {
        self.mult[a.index()]
    }

    #[inline]
    pub fn hquad(&self, a: Unit) -> u64 {
        self.hquad[a.index()]
    }

    /// `H` over the canonical unit list.
    pub fn hquad_table(&self) -> Vec<u64> {
        self.group.units().iter().map(|&a| self.hquad(a)).collect()
    }

    pub fn mult_table(&self) -> Vec<u64> {
        self.group.units().iter().map(|&a| self.mult(a)).collect()
    }

    /// Re-derives every table invariant from scratch and returns a
    /// description of each failure.
    pub fn check_invariants(&self) -> Vec<String> {
        let g = &self.group;
        let mut out = Vec::new();
        for &a in g.units() {
            let expected = self.n as u128 * a.residue() as u128 / g.q() as u128;
            if self.mult(a) as u128 != expected {
                out.push(format!("n_{a} = {} but floor(na/q) = {expected}", self.mult(a)));
            }
            let abar = g.conjugate(a);
            if self.mult(a) + self.mult(abar) != self.n - 1 {
                out.push(format!(
                    "n_{a} + n_{abar} = {} != n - 1",
                    self.mult(a) + self.mult(abar)
                ));
            }
            let c = (self.n - 1) as i128 - 2 * self.mult(a) as i128;
            if self.hquad(a) as i128 != c * c {
                out.push(format!("H({a}) = {} is not (n-1-2n_a)^2", self.hquad(a)));
            }
            if self.hquad(a) != self.hquad(abar) {
                out.push(format!("H({a}) != H({abar})"));
            }
        }
        let half = g.half_units();
        for w in half.windows(2) {
            if self.hquad(w[0]) < self.hquad(w[1]) {
                out.push(format!(
                    "H increases on [1,q/2]: H({}) = {} < H({}) = {}",
                    w[0],
                    self.hquad(w[0]),
                    w[1],
                    self.hquad(w[1])
                ));
            }
        }
        out
    }

    /// Whether `H` takes a single value on `[1, q/2]_Z`.
    pub fn h_constancy(&self) -> Constancy {
        let half = self.group.half_units();
        let first = half[0];
        match half.iter().find(|&&b| self.hquad(b) != self.hquad(first)) {
            Some(&b) => Constancy {
                constant: false,
                witness: Some((first, b)),
            },
            None => Constancy {
                constant: true,
                witness: None,
            },
        }
    }

    pub fn is_h_constant(&self) -> bool {
        self.h_constancy().constant
    }

    /// `(n_a - n_b, (n-1) - n_a - n_b)`, in that orientation. Expanding the
    /// square gives `H(a) - H(b) = -4 * (n_a - n_b) * ((n-1) - n_a - n_b)`.
    pub fn h_difference_factored(&self, a: Unit, b: Unit) -> (i64, i64) {
        let na = self.mult(a) as i64;
        let nb = self.mult(b) as i64;
        (na - nb, (self.n as i64 - 1) - na - nb)
    }

    #[doc(hidden)]
    pub fn corrupt_for_testing(&mut self) {
        let a = *self.group.units().last().unwrap();
        self.hquad[a.index()] += 1;
    }
}

/// Integer dimensions attached to the pair `(n, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSet {
    pub genus: u64,
    pub new_dim: u64,
    pub e_dim: u64,
    pub half_deg: u64,
    pub unitary_dim: u64,
    pub ss_lower_bound: u64,
}

/// Dimensions for `(n, q)`. Requires `q >= 3` so that the cyclotomic field
/// is a CM field with integral `[E:Q]/2`.
pub fn dimension_set(n: u64, group: &UnitGroup) -> Result<DimensionSet> {
    check_params(n, group)?;
    if group.q() < 3 {
        return Err(Error::InvalidParams("dimension formulas need q >= 3".into()));
    }
    let e_dim = n - 1;
    let half_deg = group.phi() / 2;
    let e_sq = e_dim
        .checked_mul(e_dim)
        .ok_or_else(|| Error::Overflow(format!("({e_dim})^2")))?;
    let mul = |x: u64, y: u64| {
        x.checked_mul(y)
            .ok_or_else(|| Error::Overflow(format!("{x} * {y}")))
    };
    Ok(DimensionSet {
        genus: mul(e_dim, group.q() - 1)? / 2,
        new_dim: mul(e_dim, group.phi())? / 2,
        e_dim,
        half_deg,
        unitary_dim: mul(half_deg, e_sq)?,
        ss_lower_bound: mul(half_deg, e_sq - 1)?,
    })
}

/// `sum_{i=1..r} (n-1) phi(p^i) / 2`, the dimension of the product of new
/// parts over the tower `p, p^2, ..., q`.
pub fn isogeny_sum(n: u64, group: &UnitGroup) -> u64 {
    let p = group.p();
    (1..=group.r())
        .map(|i| (n - 1) * (p - 1) * p.pow(i - 1) / 2)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(q: u64) -> UnitGroup {
        UnitGroup::new(q).unwrap()
    }

    #[test]
    fn multiplicity_examples() {
        let g7 = g(7);
        assert_eq!(multiplicity(5, &g7, g7.unit(3).unwrap()), Ok(2));
        assert_eq!(multiplicity(5, &g7, g7.unit(1).unwrap()), Ok(0));
        let g5 = g(5);
        assert_eq!(multiplicity(4, &g5, g5.unit(4).unwrap()), Ok(3));
        assert!(matches!(
            multiplicity(14, &g7, g7.one()),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            multiplicity(3, &g7, g7.one()),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn profile_tables() {
        assert_eq!(HodgeProfile::build(4, &g(5)).unwrap().hquad_table(), vec![9, 1, 1, 9]);
        assert_eq!(
            HodgeProfile::build(5, &g(7)).unwrap().mult_table(),
            vec![0, 1, 2, 2, 3, 4]
        );
        assert_eq!(
            HodgeProfile::build(5, &g(8)).unwrap().hquad_table(),
            vec![16, 4, 4, 16]
        );
        assert!(HodgeProfile::build(10, &g(5)).is_err());
    }

    #[test]
    fn dimension_examples() {
        let d = dimension_set(4, &g(5)).unwrap();
        assert_eq!((d.genus, d.new_dim, d.unitary_dim, d.ss_lower_bound), (6, 6, 18, 16));
        let d = dimension_set(5, &g(7)).unwrap();
        assert_eq!((d.genus, d.new_dim, d.unitary_dim, d.ss_lower_bound), (12, 12, 48, 45));
        let g25 = g(25);
        let d = dimension_set(4, &g25).unwrap();
        assert_eq!((d.new_dim, d.genus), (30, 36));
        assert_eq!(isogeny_sum(4, &g25), 36);
        assert!(dimension_set(5, &g(2)).is_err());
    }

    #[test]
    fn constancy_examples() {
        let c = HodgeProfile::build(4, &g(5)).unwrap().h_constancy();
        assert!(!c.constant);
        let (a, b) = c.witness.unwrap();
        assert_eq!((a.residue(), b.residue()), (1, 2));
        let c = HodgeProfile::build(5, &g(8)).unwrap().h_constancy();
        let (a, b) = c.witness.unwrap();
        assert_eq!((a.residue(), b.residue()), (1, 3));
        assert!(HodgeProfile::build(5, &g(2)).unwrap().is_h_constant());
    }

    #[test]
    fn factored_difference() {
        let g7 = g(7);
        let prof = HodgeProfile::build(5, &g7).unwrap();
        let u = |x| g7.unit(x).unwrap();
        assert_eq!(prof.h_difference_factored(u(2), u(3)), (-1, 1));
        assert_eq!(prof.hquad(u(2)) - prof.hquad(u(3)), 4);
        let (x, y) = prof.h_difference_factored(u(4), u(4));
        assert_eq!((x, y), (0, 4 - 2 * 2));
        let g5 = g(5);
        let prof = HodgeProfile::build(4, &g5).unwrap();
        let (x, y) = prof.h_difference_factored(g5.unit(1).unwrap(), g5.unit(4).unwrap());
        assert_eq!((x, y), (-3, 0));
        assert_eq!(prof.hquad(g5.unit(1).unwrap()), prof.hquad(g5.unit(4).unwrap()));
    }

    #[test]
    fn corruption_is_detected() {
        let mut prof = HodgeProfile::build(5, &g(7)).unwrap();
        assert!(prof.check_invariants().is_empty());
        prof.corrupt_for_testing();
        assert!(!prof.check_invariants().is_empty());
    }
}
