//! Threshold oracle: a second decision procedure for the rigidity lemma.
//!
//! If some even, non-increasing, `theta_a`-invariant function is not
//! constant, one of its level sets `{x : h(x) >= c}` restricted to
//! `[1, q/2]_Z` is a proper initial segment `[1, t]_Z`, and the indicator of
//! that segment is again even, monotone, invariant and non-constant. So it
//! suffices to test the `|[1, q/2]_Z| - 1` proper initial segments.

use crate::unit_group::{Unit, UnitGroup};

/// Proper initial-segment thresholds `t` whose even indicator is
/// `theta_a`-invariant.
pub fn invariant_thresholds(group: &UnitGroup, a: Unit) -> Vec<u64> {
    let dom = group.half_units();
    let Some((_, proper)) = dom.split_last() else {
        return Vec::new();
    };
    proper
        .iter()
        .map(|t| t.residue())
        .filter(|&t| {
            // Evenness reduces the check on all units to the domain:
            // a(q - x) = q - ax, and the indicator only sees fold(.)
            dom.iter().all(|&x| {
                let image = (a.residue() * x.residue()) % group.q();
                let folded = image.min(group.q() - image);
                (folded <= t) == (x.residue() <= t)
            })
        })
        .collect()
}

/// `true` iff no proper threshold indicator is invariant, i.e. every even
/// monotone `theta_a`-invariant function is constant.
pub fn threshold_oracle(group: &UnitGroup, a: Unit) -> bool {
    invariant_thresholds(group, a).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(q: u64, a: i64) -> bool {
        let g = UnitGroup::new(q).unwrap();
        threshold_oracle(&g, g.unit(a).unwrap())
    }

    #[test]
    fn examples() {
        assert!(oracle(8, 3));
        assert!(!oracle(7, 6));
        assert!(oracle(25, 7));
        let g = UnitGroup::new(7).unwrap();
        assert_eq!(invariant_thresholds(&g, g.unit(6).unwrap()), vec![1, 2]);
    }

    #[test]
    fn tiny_moduli_are_vacuous() {
        for q in [2, 3, 4] {
            let g = UnitGroup::new(q).unwrap();
            for &a in g.units() {
                assert!(threshold_oracle(&g, a));
            }
        }
    }
}
