//! Minimum-cardinality hitting sets by branch and bound.

use crate::index_set::IndexSet;

/// A smallest set meeting every member of `sets`, or `None` when one of
/// them is empty. All sets must share a width. Ties resolve toward lower
/// indices, so the answer is deterministic.
pub fn min_hitting_set(width: usize, sets: &[IndexSet]) -> Option<IndexSet> {
    if sets.iter().any(IndexSet::is_empty) {
        return None;
    }
    if sets.is_empty() {
        return Some(IndexSet::empty(width));
    }
    let greedy = greedy_hitting_set(width, sets);
    let mut search = Search {
        sets,
        best: greedy.to_vec(),
        chosen: Vec::new(),
    };
    let all: Vec<usize> = (0..sets.len()).collect();
    search.branch(&all, &IndexSet::empty(width));
    Some(IndexSet::from_indices(width, search.best))
}

/// Repeatedly takes the element occurring in the most unhit sets.
pub fn greedy_hitting_set(width: usize, sets: &[IndexSet]) -> IndexSet {
    let mut unhit: Vec<&IndexSet> = sets.iter().collect();
    let mut chosen = IndexSet::empty(width);
    while !unhit.is_empty() {
        let counts = occurrences(width, unhit.iter().copied());
        let (e, _) = most_frequent(&counts).expect("unhit sets are nonempty");
        chosen.insert(e);
        unhit.retain(|s| !s.contains(e));
    }
    chosen
}

fn occurrences<'a>(width: usize, sets: impl Iterator<Item = &'a IndexSet>) -> Vec<usize> {
    let mut counts = vec![0usize; width];
    for s in sets {
        for e in s.iter() {
            counts[e] += 1;
        }
    }
    counts
}

/// Highest count, lowest index on ties.
fn most_frequent(counts: &[usize]) -> Option<(usize, usize)> {
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
        .map(|(i, &c)| (i, c))
}

struct Search<'a> {
    sets: &'a [IndexSet],
    best: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    /// `unhit` indexes sets not yet met; `excluded` elements were already
    /// ruled out by earlier sibling branches.
    fn branch(&mut self, unhit: &[usize], excluded: &IndexSet) {
        if unhit.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
                self.best.sort_unstable();
            }
            return;
        }
        let allowed = excluded.complement();
        let available: Vec<IndexSet> = unhit
            .iter()
            .map(|&s| self.sets[s].intersection(&allowed))
            .collect();
        if available.iter().any(IndexSet::is_empty) {
            return;
        }
        if self.chosen.len() + packing_bound(&available) >= self.best.len() {
            return;
        }
        // Branch on the smallest unhit set.
        let pivot = available
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.cmp_canonical(b))
            .map(|(i, _)| i)
            .expect("unhit nonempty");
        let counts = occurrences(excluded.width(), available.iter());
        let mut candidates: Vec<usize> = available[pivot].iter().collect();
        candidates.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));

        let mut excluded = excluded.clone();
        for e in candidates {
            let rest: Vec<usize> = unhit
                .iter()
                .copied()
                .filter(|&s| !self.sets[s].contains(e))
                .collect();
            self.chosen.push(e);
            self.branch(&rest, &excluded);
            self.chosen.pop();
            excluded.insert(e);
        }
    }
}

/// Size of a greedily built family of pairwise disjoint sets; every hitting
/// set needs a distinct element for each.
fn packing_bound(sets: &[IndexSet]) -> usize {
    let mut order: Vec<&IndexSet> = sets.iter().collect();
    order.sort_by(|a, b| a.cmp_canonical(b));
    let mut used: Option<IndexSet> = None;
    let mut count = 0;
    for s in order {
        match &used {
            Some(u) if u.intersects(s) => {}
            Some(u) => {
                used = Some(u.union(s));
                count += 1;
            }
            None => {
                used = Some(s.clone());
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sets(width: usize, lists: &[&[usize]]) -> Vec<IndexSet> {
        lists
            .iter()
            .map(|l| IndexSet::from_indices(width, l.iter().copied()))
            .collect()
    }

    fn brute_min(width: usize, sets: &[IndexSet]) -> usize {
        (0u64..1 << width)
            .filter(|&m| {
                let h = IndexSet::from_mask(width, m);
                sets.iter().all(|s| s.intersects(&h))
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn examples() {
        let s = sets(3, &[&[0], &[1]]);
        assert_eq!(min_hitting_set(3, &s).unwrap().to_vec(), vec![0, 1]);
        let s = sets(3, &[&[0, 1], &[1, 2]]);
        assert_eq!(min_hitting_set(3, &s).unwrap().to_vec(), vec![1]);
        assert!(min_hitting_set(3, &[]).unwrap().is_empty());
        assert!(min_hitting_set(3, &sets(3, &[&[]])).is_none());
    }

    #[test]
    fn fixed_instance_matches_brute_force() {
        let s = sets(
            7,
            &[
                &[0, 1],
                &[0, 2],
                &[0, 3],
                &[1, 4],
                &[2, 5],
                &[3, 6],
                &[4, 5, 6],
            ],
        );
        let exact = min_hitting_set(7, &s).unwrap();
        assert_eq!(exact.len(), brute_min(7, &s));
        assert!(s.iter().all(|x| x.intersects(&exact)));
    }

    proptest! {
        #[test]
        fn matches_brute_force(masks in proptest::collection::vec(1u64..1 << 10, 0..12)) {
            let width = 10;
            let s: Vec<IndexSet> = masks.iter().map(|&m| IndexSet::from_mask(width, m)).collect();
            let h = min_hitting_set(width, &s).unwrap();
            prop_assert!(s.iter().all(|x| x.intersects(&h)));
            prop_assert_eq!(h.len(), brute_min(width, &s));
        }
    }
}
