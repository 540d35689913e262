//! Fixpoint closure of `[1, q/2]_Z` under the two equality rules available
//! for an even, monotone, `theta_a`-invariant function:
//!
//! * orbit: `h(x) = h(fold(a x))`, where `fold(y) = min(y, q - y)`;
//! * interval: if `h(x) = h(y)` with `x < y`, then `h` is constant on `[x, y]_Z`.
//!
//! Every effective merge is logged so that the final partition can be
//! replayed independently of the union-find that produced it.

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use super::function::FunctionTable;
use crate::unit_group::{Unit, UnitGroup};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum MergeCause {
    Orbit { x: u64, y: u64 },
    Interval { lo: u64, hi: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub cause: MergeCause,
    /// Minimum elements of the blocks that were merged, ascending.
    pub blocks: SmallVec<[u64; 2]>,
    /// Block count after the merge.
    pub remaining: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub q: u64,
    pub a: u64,
    pub domain: Vec<u64>,
    /// Blocks ordered by minimum element, each ascending.
    pub classes: Vec<Vec<u64>>,
    pub merge_log: Vec<MergeEvent>,
}

impl Partition {
    pub fn block_count(&self) -> usize {
        self.classes.len()
    }

    /// Replays the merge log from singletons, re-justifying each event, and
    /// checks that it ends in `classes`.
    pub fn replay(&self, group: &UnitGroup) -> Result<(), String> {
        let dom: Vec<u64> = group.half_units().iter().map(|u| u.residue()).collect();
        if dom != self.domain {
            return Err("domain is not [1, q/2]_Z".into());
        }
        let a = group
            .try_unit(self.a)
            .ok_or_else(|| format!("{} is not a unit", self.a))?;
        let pos = |x: u64| dom.binary_search(&x).ok();
        // label-per-element; each label keeps an intrusive member list and
        // the smaller block is relabelled into the larger one
        let n = dom.len();
        let mut label: Vec<usize> = (0..n).collect();
        let head: Vec<usize> = (0..n).collect();
        let mut tail: Vec<usize> = (0..n).collect();
        let mut next: Vec<usize> = vec![usize::MAX; n];
        let mut size: Vec<usize> = vec![1; n];
        let mut least: Vec<usize> = (0..n).collect();
        let mut live = n;

        for (k, ev) in self.merge_log.iter().enumerate() {
            let mut touched: Vec<usize> = match ev.cause {
                MergeCause::Orbit { x, y } => {
                    let ix = pos(x).ok_or_else(|| format!("event {k}: {x} outside domain"))?;
                    let iy = pos(y).ok_or_else(|| format!("event {k}: {y} outside domain"))?;
                    let image = group.fold(group.mul(a, Unit::from_residue(x)));
                    if image.residue() != y {
                        return Err(format!("event {k}: fold({}*{x}) is {image}, not {y}", self.a));
                    }
                    vec![label[ix], label[iy]]
                }
                MergeCause::Interval { lo, hi } => {
                    let il = pos(lo).ok_or_else(|| format!("event {k}: {lo} outside domain"))?;
                    let ih = pos(hi).ok_or_else(|| format!("event {k}: {hi} outside domain"))?;
                    if il >= ih || label[il] != label[ih] {
                        return Err(format!("event {k}: {lo} and {hi} are not a known equality"));
                    }
                    (il..=ih).map(|i| label[i]).collect()
                }
            };
            touched.sort_unstable();
            touched.dedup();
            if touched.len() < 2 {
                return Err(format!("event {k} merges nothing"));
            }
            let mut mins: SmallVec<[u64; 2]> = touched.iter().map(|&l| dom[least[l]]).collect();
            mins.sort_unstable();
            if mins != ev.blocks {
                return Err(format!("event {k}: recorded blocks {:?}, actual {mins:?}", ev.blocks));
            }
            let keep = *touched.iter().max_by_key(|&&l| size[l]).unwrap();
            for &l in touched.iter().filter(|&&l| l != keep) {
                let mut i = head[l];
                while i != usize::MAX {
                    label[i] = keep;
                    i = next[i];
                }
                next[tail[keep]] = head[l];
                tail[keep] = tail[l];
                size[keep] += size[l];
                size[l] = 0;
                least[keep] = least[keep].min(least[l]);
            }
            live -= touched.len() - 1;
            if live as u64 != ev.remaining {
                return Err(format!("event {k}: {live} blocks remain, log says {}", ev.remaining));
            }
        }

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &l) in label.iter().enumerate() {
            members[l].push(i);
        }
        let mut classes: Vec<Vec<u64>> = members
            .into_iter()
            .filter(|m| !m.is_empty())
            .map(|m| m.into_iter().map(|i| dom[i]).collect())
            .collect();
        classes.sort_by_key(|c| c[0]);
        if classes != self.classes {
            return Err("replayed blocks differ from recorded blocks".into());
        }
        Ok(())
    }

    /// Walks the log against a concrete even function `h` and checks each
    /// premise: orbit events need `h(x) = h(y)`, interval events need `h`
    /// constant on the interval. If every premise holds, `h` is constant on
    /// every block.
    pub fn replay_on(&self, group: &UnitGroup, h: &FunctionTable) -> Result<(), ReplayFailure> {
        let dom = group.half_units();
        let at = |x: u64| h.at(Unit::from_residue(x));
        for (k, ev) in self.merge_log.iter().enumerate() {
            match ev.cause {
                MergeCause::Orbit { x, y } => {
                    if at(x) != at(y) {
                        return Err(ReplayFailure::NotInvariant { event: k, x, y });
                    }
                }
                MergeCause::Interval { lo, hi } => {
                    if at(lo) != at(hi) {
                        return Err(ReplayFailure::Unjustified { event: k });
                    }
                    let v = at(lo);
                    if let Some(z) = dom
                        .iter()
                        .map(|u| u.residue())
                        .filter(|&z| lo <= z && z <= hi)
                        .find(|&z| at(z) != v)
                    {
                        return Err(ReplayFailure::NotMonotone { event: k, lo, hi, z });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayFailure {
    NotInvariant { event: usize, x: u64, y: u64 },
    NotMonotone { event: usize, lo: u64, hi: u64, z: u64 },
    Unjustified { event: usize },
}

/// Union-find over domain indices, tracking the index span of each block.
struct Blocks {
    parent: Vec<usize>,
    size: Vec<usize>,
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl Blocks {
    fn new(n: usize) -> Self {
        Blocks {
            parent: (0..n).collect(),
            size: vec![1; n],
            lo: (0..n).collect(),
            hi: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Joins two roots, returning the surviving root.
    fn link(&mut self, a: usize, b: usize) -> usize {
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.lo[big] = self.lo[big].min(self.lo[small]);
        self.hi[big] = self.hi[big].max(self.hi[small]);
        big
    }
}

/// Adjacent-index gluing: `run_end(j)` is the first `k >= j` whose boundary
/// `(k, k+1)` has not been glued yet.
struct Glue {
    next: Vec<usize>,
}

impl Glue {
    fn new(n: usize) -> Self {
        Glue { next: (0..n).collect() }
    }

    fn run_end(&mut self, mut j: usize) -> usize {
        let mut end = j;
        while self.next[end] != end {
            end = self.next[end];
        }
        while self.next[j] != end {
            let nx = self.next[j];
            self.next[j] = end;
            j = nx;
        }
        end
    }

    fn glue(&mut self, j: usize) {
        self.next[j] = j + 1;
    }
}

/// Orbit folds then interval merges, repeated until a full round changes
/// nothing.
pub fn collapse_closure(group: &UnitGroup, a: Unit) -> Partition {
    let dom = group.half_units();
    let n = dom.len();
    let mut index = vec![usize::MAX; group.q() as usize];
    for (i, u) in dom.iter().enumerate() {
        index[u.index()] = i;
    }
    let targets: Vec<usize> = dom
        .iter()
        .map(|&x| index[group.fold(group.mul(a, x)).index()])
        .collect();

    let mut blocks = Blocks::new(n);
    let mut glue = Glue::new(n);
    let mut log = Vec::with_capacity(n);
    let mut live = n;
    let value = |i: usize| dom[i].residue();

    loop {
        let before = live;
        for i in 0..n {
            let (ri, rj) = (blocks.find(i), blocks.find(targets[i]));
            if ri != rj {
                let mut mins: SmallVec<[u64; 2]> =
                    smallvec![value(blocks.lo[ri]), value(blocks.lo[rj])];
                mins.sort_unstable();
                blocks.link(ri, rj);
                live -= 1;
                log.push(MergeEvent {
                    cause: MergeCause::Orbit {
                        x: value(i),
                        y: value(targets[i]),
                    },
                    blocks: mins,
                    remaining: live as u64,
                });
            }
        }
        // Sweep left to right. A block whose span is [i, hi] glues every
        // boundary inside its span; when that pulls in blocks reaching past
        // hi, the next event covers [hi, hi'] so logged ranges never overlap.
        for i in 0..n {
            let r = blocks.find(i);
            if blocks.lo[r] != i {
                continue;
            }
            let mut from = i;
            loop {
                let r = blocks.find(i);
                let hi = blocks.hi[r];
                if hi == from {
                    break;
                }
                let mut roots = vec![blocks.find(from)];
                let mut j = from;
                loop {
                    j = glue.run_end(j);
                    if j >= hi {
                        break;
                    }
                    glue.glue(j);
                    roots.push(blocks.find(j + 1));
                    j += 1;
                }
                roots.sort_unstable();
                roots.dedup();
                if roots.len() < 2 {
                    break;
                }
                let mut mins: SmallVec<[u64; 2]> =
                    roots.iter().map(|&r| value(blocks.lo[r])).collect();
                mins.sort_unstable();
                let mut acc = roots[0];
                for &r in &roots[1..] {
                    acc = blocks.link(acc, r);
                }
                live -= roots.len() - 1;
                log.push(MergeEvent {
                    cause: MergeCause::Interval {
                        lo: value(from),
                        hi: value(hi),
                    },
                    blocks: mins,
                    remaining: live as u64,
                });
                from = hi;
            }
        }
        if live == before {
            break;
        }
    }

    let mut by_root: Vec<Vec<u64>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = blocks.find(i);
        by_root[r].push(value(i));
    }
    let mut classes: Vec<Vec<u64>> = by_root.into_iter().filter(|c| !c.is_empty()).collect();
    classes.sort_by_key(|c| c[0]);

    Partition {
        q: group.q(),
        a: a.residue(),
        domain: dom.iter().map(|u| u.residue()).collect(),
        classes,
        merge_log: log,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closure(q: u64, a: i64) -> Partition {
        let g = UnitGroup::new(q).unwrap();
        collapse_closure(&g, g.unit(a).unwrap())
    }

    #[test]
    fn q8_a3_single_block() {
        let p = closure(8, 3);
        assert_eq!(p.classes, vec![vec![1, 3]]);
        assert_eq!(p.merge_log.len(), 1);
        assert_eq!(p.merge_log[0].cause, MergeCause::Orbit { x: 1, y: 3 });
    }

    #[test]
    fn q25_a7_single_block() {
        let p = closure(25, 7);
        assert_eq!(p.classes, vec![vec![1, 2, 3, 4, 6, 7, 8, 9, 11, 12]]);
        let orbit: Vec<(u64, u64)> = p
            .merge_log
            .iter()
            .filter_map(|e| match e.cause {
                MergeCause::Orbit { x, y } => Some((x, y)),
                _ => None,
            })
            .collect();
        // 7*1 = 7, 7*2 = 14 -> 11, 7*3 = 21 -> 4, 7*9 = 63 = 13 -> 12
        for pair in [(1, 7), (2, 11), (3, 4), (9, 12)] {
            assert!(orbit.contains(&pair), "{pair:?} missing from {orbit:?}");
        }
        p.replay(&UnitGroup::new(25).unwrap()).unwrap();
    }

    #[test]
    fn minus_one_gives_singletons() {
        let p = closure(7, 6);
        assert_eq!(p.classes, vec![vec![1], vec![2], vec![3]]);
        assert!(p.merge_log.is_empty());
    }

    #[test]
    fn log_strictly_decreases() {
        for (q, a) in [(25, 7), (49, 19), (64, 31), (101, 10), (27, 8)] {
            let p = closure(q, a);
            let mut prev = p.domain.len() as u64;
            for ev in &p.merge_log {
                assert!(ev.remaining < prev);
                prev = ev.remaining;
            }
            assert_eq!(prev, p.block_count() as u64);
        }
    }

    #[test]
    fn replay_rejects_tampering() {
        let g = UnitGroup::new(25).unwrap();
        let mut p = collapse_closure(&g, g.unit(7).unwrap());
        p.replay(&g).unwrap();
        if let MergeCause::Orbit { y, .. } = &mut p.merge_log[0].cause {
            *y = 9;
        }
        assert!(p.replay(&g).is_err());

        let mut p = collapse_closure(&g, g.unit(7).unwrap());
        p.merge_log.pop();
        assert!(p.replay(&g).is_err());
    }
}
