//! Shortlists: the closed-testing result rewritten as an intersection of
//! unions.
//!
//! The defining sets say "for each defining set `D`, some member of `D` is
//! false". Their minimal transversals say the same thing the other way
//! round: with confidence `1 - alpha`, at least one shortlist set consists
//! entirely of false hypotheses.

use crate::closure::DefiningSets;
use crate::error::{Error, Result};
use crate::index_set::IndexSet;

pub const DEFAULT_SHORTLIST_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Shortlist {
    width: usize,
    sets: Vec<IndexSet>,
    truncated: bool,
}

impl Shortlist {
    /// Members in canonical order.
    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Set when the intermediate collection outgrew the cap. The members
    /// are then the minimal transversals of a prefix of the defining sets:
    /// every true transversal still contains one of them, but some members
    /// may miss later defining sets.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Whether `candidate` contains some shortlist member.
    pub fn covers(&self, candidate: &IndexSet) -> bool {
        self.sets.iter().any(|s| s.is_subset(candidate))
    }
}

/// Shortlist of a closed-testing result.
pub fn minimal_transversals(defining: &DefiningSets, cap: usize) -> Result<Shortlist> {
    transversals(defining.width(), defining.sets(), cap)
}

/// Minimal transversals of an arbitrary family of sets, by incremental
/// dualization: edges are processed in canonical order and each partial
/// transversal that misses the new edge is extended by each of its
/// elements, with non-minimal results absorbed.
pub fn transversals(width: usize, edges: &[IndexSet], cap: usize) -> Result<Shortlist> {
    if cap == 0 {
        return Err(Error::InvalidArgument(
            "shortlist cap must be positive".into(),
        ));
    }
    if let Some(bad) = edges.iter().find(|e| e.width() != width) {
        return Err(Error::FamilyMismatch {
            expected: width,
            found: bad.width(),
        });
    }
    let mut order: Vec<&IndexSet> = edges.iter().collect();
    order.sort_by(|a, b| a.cmp_canonical(b));
    order.dedup();

    let mut current = vec![IndexSet::empty(width)];
    for edge in order {
        let next = extend(&current, edge);
        if next.len() > cap {
            return Ok(Shortlist {
                width,
                sets: current,
                truncated: true,
            });
        }
        current = next;
    }
    Ok(Shortlist {
        width,
        sets: current,
        truncated: false,
    })
}

/// One dualization step. `current` is an antichain; members that already
/// meet `edge` stay minimal, so only the extensions need absorbing.
fn extend(current: &[IndexSet], edge: &IndexSet) -> Vec<IndexSet> {
    let (kept, missed): (Vec<&IndexSet>, Vec<&IndexSet>) =
        current.iter().partition(|t| t.intersects(edge));

    let mut candidates: Vec<IndexSet> = Vec::with_capacity(missed.len() * edge.len());
    for t in &missed {
        for e in edge.iter() {
            let mut c = (*t).clone();
            c.insert(e);
            candidates.push(c);
        }
    }
    candidates.sort_by(|a, b| a.cmp_canonical(b));
    candidates.dedup();

    let mut buckets = Buckets::default();
    for k in &kept {
        buckets.insert((*k).clone());
    }
    for c in candidates {
        if !buckets.has_subset_of(&c) {
            buckets.insert(c);
        }
    }
    let mut out = buckets.into_sets();
    out.sort_by(|a, b| a.cmp_canonical(b));
    out
}

/// Sets grouped by cardinality, so absorption only scans strictly smaller
/// buckets.
#[derive(Default)]
struct Buckets {
    by_len: Vec<Vec<IndexSet>>,
}

impl Buckets {
    fn insert(&mut self, s: IndexSet) {
        let len = s.len();
        if self.by_len.len() <= len {
            self.by_len.resize_with(len + 1, Vec::new);
        }
        self.by_len[len].push(s);
    }

    fn has_subset_of(&self, s: &IndexSet) -> bool {
        let len = s.len();
        self.by_len
            .iter()
            .take(len)
            .flatten()
            .any(|x| x.is_subset(s))
    }

    fn into_sets(self) -> Vec<IndexSet> {
        self.by_len.into_iter().flatten().collect()
    }
}
