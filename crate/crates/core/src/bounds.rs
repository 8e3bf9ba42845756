//! Simultaneous confidence bounds on the number of true hypotheses in a set.
//!
//! `t_alpha(R)` is the largest `|I|` over unrejected `I ⊆ R`; with
//! probability at least `1 - alpha`, simultaneously over all `R`, `R`
//! contains at most `t_alpha(R)` true hypotheses and so at least
//! `f_alpha(R) = |R| - t_alpha(R)` false ones.
//!
//! Two routes are provided: the exact one reads the bound off the defining
//! sets of a full closure (via a minimum hitting set), and the shortcut
//! evaluates polynomially many candidate witnesses.

use std::fmt;

use crate::closure::{CongruenceOracle, DefiningSets};
use crate::error::{Error, Result};
use crate::family::{AlphaLevel, HypothesisFamily};
use crate::hitting::min_hitting_set;
use crate::index_set::IndexSet;
use crate::local::LocalTest;
use crate::shortcut::WitnessView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Shortcut,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Shortcut => "shortcut",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialConjunction {
    Reject,
    Retain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceReport {
    pub set: IndexSet,
    pub alpha: AlphaLevel,
    /// Upper confidence bound on the number of true hypotheses in `set`.
    pub t: usize,
    pub method: Method,
    pub test: LocalTest,
}

impl ConfidenceReport {
    /// Lower confidence bound on the number of false hypotheses in `set`.
    pub fn f(&self) -> usize {
        self.set.len() - self.t
    }

    /// Closed-testing verdict on the partial conjunction `H^{u/R}`, the
    /// union of all intersections of `u` members of `R` ("at least `u`
    /// members are true"). It is rejected exactly when `t < u`.
    pub fn partial_conjunction(&self, u: usize) -> Result<PartialConjunction> {
        check_u(u, self.set.len())?;
        Ok(if self.t < u {
            PartialConjunction::Reject
        } else {
            PartialConjunction::Retain
        })
    }
}

fn check_u(u: usize, r: usize) -> Result<()> {
    if u == 0 || u > r {
        return Err(Error::InvalidArgument(format!(
            "partial conjunction level u = {u} outside 1..={r}"
        )));
    }
    Ok(())
}

/// Exact bound from the defining sets: `|R|` minus the size of a smallest
/// subset of `R` meeting every defining set contained in `R`.
pub fn t_alpha_exact(defining: &DefiningSets, set: &IndexSet) -> Result<ConfidenceReport> {
    if set.width() != defining.width() {
        return Err(Error::FamilyMismatch {
            expected: defining.width(),
            found: set.width(),
        });
    }
    let inside: Vec<IndexSet> = defining
        .sets()
        .iter()
        .filter(|d| d.is_subset(set))
        .cloned()
        .collect();
    let hitting = min_hitting_set(set.width(), &inside).expect("defining sets are nonempty");
    Ok(ConfidenceReport {
        set: set.clone(),
        alpha: defining.alpha(),
        t: set.len() - hitting.len(),
        method: Method::Exact,
        test: defining.test(),
    })
}

pub(crate) fn require_shortcut(
    test: LocalTest,
    congruence: Option<&CongruenceOracle>,
) -> Result<()> {
    if congruence.is_some() {
        return Err(Error::CongruenceInShortcut);
    }
    if let Some(missing) = test.capabilities().shortcut_gap() {
        return Err(Error::MissingCapability {
            test: test.name(),
            missing,
        });
    }
    Ok(())
}

/// Shortcut bound via candidate witnesses. Restricted combinations are not
/// supported here; pass `None` or use the exact engine.
pub fn t_alpha_shortcut(
    family: &HypothesisFamily,
    test: LocalTest,
    alpha: AlphaLevel,
    set: &IndexSet,
    congruence: Option<&CongruenceOracle>,
) -> Result<ConfidenceReport> {
    require_shortcut(test, congruence)?;
    family.check_width(set)?;
    let view = WitnessView::new(family.p_values(), set, test);
    Ok(ConfidenceReport {
        set: set.clone(),
        alpha,
        t: view.upper_bound(alpha.value()),
        method: Method::Shortcut,
        test,
    })
}

/// Tests the partial conjunction `H^{u/R}` through the shortcut bound.
pub fn test_partial_conjunction(
    family: &HypothesisFamily,
    test: LocalTest,
    alpha: AlphaLevel,
    u: usize,
    set: &IndexSet,
) -> Result<PartialConjunction> {
    check_u(u, set.len())?;
    t_alpha_shortcut(family, test, alpha, set, None)?.partial_conjunction(u)
}

/// Closed-testing adjusted p-value of hypothesis `index`: the largest local
/// p-value over intersections containing it.
pub fn adjusted_p_elementary(
    family: &HypothesisFamily,
    test: LocalTest,
    index: usize,
) -> Result<f64> {
    require_shortcut(test, None)?;
    if index >= family.len() {
        return Err(Error::InvalidArgument(format!(
            "hypothesis index {index} out of range for {} hypotheses",
            family.len()
        )));
    }
    let set = IndexSet::from_indices(family.len(), [index]);
    Ok(WitnessView::new(family.p_values(), &set, test).level_max(1))
}
