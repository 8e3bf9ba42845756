//! Exact closed testing over all `2^n - 1` intersection hypotheses.
//!
//! The engine tabulates the local p-value of every nonempty subset once.
//! A closure pass at any level `alpha` then marks a subset rejected when it
//! and all of its supersets are locally rejected, and the minimal rejected
//! subsets are reported as [`DefiningSets`].
//!
//! Restricted combinations enter through a [`CongruenceOracle`]: subsets
//! that cannot equal the set of true hypotheses get local p-value 0, so
//! every local test rejects them.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{AlphaLevel, HypothesisFamily};
use crate::index_set::IndexSet;
use crate::local::LocalTest;

/// Default largest family the exact engine accepts.
pub const DEFAULT_EXACT_CAP: usize = 20;

/// The table is indexed by `u64` masks and holds `2^n` entries; beyond this
/// width it no longer fits in memory on ordinary machines.
pub const HARD_EXACT_LIMIT: usize = 30;

/// Minimal elements of the family of closed-testing rejections.
#[derive(Debug, Clone, PartialEq)]
pub struct DefiningSets {
    width: usize,
    sets: Vec<IndexSet>,
    alpha: AlphaLevel,
    test: LocalTest,
    congruence_used: bool,
}

impl DefiningSets {
    /// Wraps an antichain produced elsewhere. Sets are put in canonical
    /// order; non-minimal members are dropped.
    pub fn from_sets(
        width: usize,
        sets: Vec<IndexSet>,
        alpha: AlphaLevel,
        test: LocalTest,
        congruence_used: bool,
    ) -> Result<Self> {
        if let Some(bad) = sets.iter().find(|s| s.width() != width) {
            return Err(Error::FamilyMismatch {
                expected: width,
                found: bad.width(),
            });
        }
        Ok(Self {
            width,
            sets: minimize(sets),
            alpha,
            test,
            congruence_used,
        })
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn alpha(&self) -> AlphaLevel {
        self.alpha
    }

    pub fn test(&self) -> LocalTest {
        self.test
    }

    pub fn congruence_used(&self) -> bool {
        self.congruence_used
    }

    /// Whether closed testing rejects the intersection hypothesis `set`.
    pub fn is_rejected(&self, set: &IndexSet) -> bool {
        self.sets.iter().any(|d| d.is_subset(set))
    }
}

/// Removes duplicates and non-minimal members; returns canonical order.
pub(crate) fn minimize(mut sets: Vec<IndexSet>) -> Vec<IndexSet> {
    sets.sort_by(|a, b| a.cmp_canonical(b));
    sets.dedup();
    let mut kept: Vec<IndexSet> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CongruenceOrigin {
    /// All pairwise equalities among `groups` group means.
    Pairwise { groups: usize },
    /// A user-asserted predicate.
    Custom(String),
}

impl fmt::Display for CongruenceOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CongruenceOrigin::Pairwise { groups } => write!(f, "pairwise:{groups}"),
            CongruenceOrigin::Custom(desc) => write!(f, "custom:{desc}"),
        }
    }
}

type Predicate = Box<dyn Fn(&IndexSet) -> bool + Send + Sync>;

/// Decides which index sets could be exactly the set of true hypotheses.
pub struct CongruenceOracle {
    width: usize,
    origin: CongruenceOrigin,
    predicate: Predicate,
}

impl fmt::Debug for CongruenceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CongruenceOracle")
            .field("width", &self.width)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

impl CongruenceOracle {
    /// A user-supplied predicate. Its logical soundness is taken on trust,
    /// but the full set must be congruent.
    pub fn from_fn<F>(width: usize, description: impl Into<String>, predicate: F) -> Result<Self>
    where
        F: Fn(&IndexSet) -> bool + Send + Sync + 'static,
    {
        let oracle = Self {
            width,
            origin: CongruenceOrigin::Custom(description.into()),
            predicate: Box::new(predicate),
        };
        oracle.check_full()?;
        Ok(oracle)
    }

    fn check_full(&self) -> Result<()> {
        if !(self.predicate)(&IndexSet::full(self.width)) {
            return Err(Error::Congruence(
                "the set of all hypotheses must be congruent".into(),
            ));
        }
        Ok(())
    }

    /// Equalities `mu_a = mu_b` for all `a < b` among `groups` groups, in
    /// lexicographic pair order `(1,2), (1,3), .., (1,k), (2,3), ..`.
    pub fn pairwise(groups: usize) -> Result<Self> {
        if groups < 2 {
            return Err(Error::Congruence(format!(
                "pairwise comparisons need at least 2 groups, got {groups}"
            )));
        }
        let pairs: Vec<(usize, usize)> = (0..groups)
            .flat_map(|a| (a + 1..groups).map(move |b| (a, b)))
            .collect();
        let width = pairs.len();
        let predicate = move |set: &IndexSet| pairwise_closed(groups, &pairs, set);
        Ok(Self {
            width,
            origin: CongruenceOrigin::Pairwise { groups },
            predicate: Box::new(predicate),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn origin(&self) -> &CongruenceOrigin {
        &self.origin
    }

    pub fn is_congruent(&self, set: &IndexSet) -> bool {
        (self.predicate)(set)
    }
}

/// True iff the equalities in `set` are closed under transitivity.
fn pairwise_closed(groups: usize, pairs: &[(usize, usize)], set: &IndexSet) -> bool {
    let mut parent: Vec<usize> = (0..groups).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in set.iter() {
        let (a, b) = pairs[i];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    pairs
        .iter()
        .enumerate()
        .all(|(i, &(a, b))| set.contains(i) || find(&mut parent, a) != find(&mut parent, b))
}

/// Pairwise-comparison congruence for a family of `k(k-1)/2` hypotheses.
pub fn pairwise_congruence(family: &HypothesisFamily, groups: usize) -> Result<CongruenceOracle> {
    let oracle = CongruenceOracle::pairwise(groups)?;
    if oracle.width() != family.len() {
        return Err(Error::Congruence(format!(
            "{groups} groups give {} pairwise hypotheses, family has {}",
            oracle.width(),
            family.len()
        )));
    }
    Ok(oracle)
}

/// Status of the partitioning hypothesis: all of `I` true and every
/// hypothesis outside `I` false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionCell {
    /// Logically impossible; may always be rejected.
    Empty,
    NonemptyCandidate,
}

pub fn partitioning_view(set: &IndexSet, congruence: Option<&CongruenceOracle>) -> PartitionCell {
    assert!(!set.is_empty(), "partitioning view of the empty set");
    match congruence {
        Some(oracle) if !oracle.is_congruent(set) => PartitionCell::Empty,
        _ => PartitionCell::NonemptyCandidate,
    }
}

/// Local p-values for every nonempty subset of a small family.
#[derive(Debug, Clone)]
pub struct ClosureTable {
    width: usize,
    test: LocalTest,
    congruence_used: bool,
    local_p: Vec<f64>,
}

impl ClosureTable {
    pub fn build(
        family: &HypothesisFamily,
        test: LocalTest,
        congruence: Option<&CongruenceOracle>,
        exact_cap: usize,
    ) -> Result<Self> {
        let n = family.len();
        if n > exact_cap.min(HARD_EXACT_LIMIT) {
            return Err(Error::Capacity {
                n,
                cap: exact_cap.min(HARD_EXACT_LIMIT),
            });
        }
        if let Some(oracle) = congruence {
            if oracle.width() != n {
                return Err(Error::FamilyMismatch {
                    expected: n,
                    found: oracle.width(),
                });
            }
        }
        let p = family.p_values();
        let size = 1usize << n;
        let local_p: Vec<f64> = (0..size)
            .into_par_iter()
            .map_init(
                || Vec::with_capacity(n),
                |buf: &mut Vec<f64>, mask| {
                    if mask == 0 {
                        return 1.0;
                    }
                    if let Some(oracle) = congruence {
                        if !oracle.is_congruent(&IndexSet::from_mask(n, mask as u64)) {
                            return 0.0;
                        }
                    }
                    buf.clear();
                    let mut bits = mask;
                    while bits != 0 {
                        buf.push(p[bits.trailing_zeros() as usize]);
                        bits &= bits - 1;
                    }
                    test.local_p(buf)
                },
            )
            .collect();
        Ok(Self {
            width: n,
            test,
            congruence_used: congruence.is_some(),
            local_p,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn test(&self) -> LocalTest {
        self.test
    }

    pub fn congruence_used(&self) -> bool {
        self.congruence_used
    }

    /// Local p-value of the subset encoded by `mask` (nonzero).
    pub fn local_p(&self, mask: u64) -> f64 {
        assert!(mask != 0, "no local test for the empty set");
        self.local_p[mask as usize]
    }

    /// Closed-testing rejection indicator for every mask; entry 0 is false.
    pub fn rejections(&self, alpha: AlphaLevel) -> Vec<bool> {
        let n = self.width;
        let full = (1usize << n) - 1;
        let a = alpha.value();
        let mut in_x = vec![false; full + 1];
        // Supersets have larger masks, so a descending sweep sees them first.
        for mask in (1..=full).rev() {
            if self.local_p[mask] > a {
                continue;
            }
            let missing = full & !mask;
            let mut bits = missing;
            let mut all = true;
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                if !in_x[mask | low] {
                    all = false;
                    break;
                }
                bits &= bits - 1;
            }
            in_x[mask] = all;
        }
        in_x
    }

    pub fn defining_sets(&self, alpha: AlphaLevel) -> DefiningSets {
        let in_x = self.rejections(alpha);
        let n = self.width;
        let mut minimal: Vec<u64> = Vec::new();
        for (mask, &rejected) in in_x.iter().enumerate().skip(1) {
            if !rejected {
                continue;
            }
            let mut bits = mask;
            let mut is_min = true;
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                if in_x[mask & !low] {
                    is_min = false;
                    break;
                }
                bits &= bits - 1;
            }
            if is_min {
                minimal.push(mask as u64);
            }
        }
        let mut sets: Vec<IndexSet> = minimal
            .into_iter()
            .map(|m| IndexSet::from_mask(n, m))
            .collect();
        sets.sort_by(|a, b| a.cmp_canonical(b));
        DefiningSets {
            width: n,
            sets,
            alpha,
            test: self.test,
            congruence_used: self.congruence_used,
        }
    }

    /// `G(k)` for `k = 0..=|R|`: the largest local p-value over subsets
    /// sharing at least `k` members with `set`, with `G(0) = 1`.
    pub fn breakpoints(&self, set: &IndexSet) -> Vec<f64> {
        assert_eq!(set.width(), self.width, "index set from another family");
        let r_mask = set.to_mask().expect("exact families fit in one word") as usize;
        let r_len = set.len();
        let mut best = vec![0.0f64; r_len + 1];
        for (mask, &lp) in self.local_p.iter().enumerate().skip(1) {
            let c = (mask & r_mask).count_ones() as usize;
            if lp > best[c] {
                best[c] = lp;
            }
        }
        let mut g = vec![0.0f64; r_len + 1];
        let mut running = 0.0f64;
        for k in (1..=r_len).rev() {
            running = running.max(best[k]);
            g[k] = running;
        }
        g[0] = 1.0;
        g
    }
}

/// Runs the closed testing procedure exactly and returns its defining sets.
pub fn enumerate_closure(
    family: &HypothesisFamily,
    test: LocalTest,
    alpha: AlphaLevel,
    congruence: Option<&CongruenceOracle>,
    exact_cap: usize,
) -> Result<DefiningSets> {
    Ok(ClosureTable::build(family, test, congruence, exact_cap)?.defining_sets(alpha))
}
