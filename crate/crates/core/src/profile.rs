//! Confidence profiles: `t_alpha(R)` as a step function of `alpha`.
//!
//! Read as the quantile function of a discrete distribution on
//! `0..=|R|`, the profile yields a mass function whose median is a point
//! estimate of the number of true hypotheses in `R`. The profile is a
//! statistic computed from the data, a random variable, not a probability
//! distribution over the truth, and nothing here should be labeled a
//! posterior.

use crate::bounds::{adjusted_p_elementary, require_shortcut, Method};
use crate::closure::ClosureTable;
use crate::error::Result;
use crate::family::{AlphaLevel, HypothesisFamily};
use crate::index_set::IndexSet;
use crate::local::LocalTest;
use crate::shortcut::WitnessView;

/// Masses below this are shown as 0.
pub const DISPLAY_MASS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceProfile {
    set: IndexSet,
    breakpoints: Vec<f64>,
    test: LocalTest,
    method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSummary {
    pub t_alpha: usize,
    /// `t_{1/2}(R)`.
    pub estimate_median: usize,
    /// Smallest level at which every member of `R` is declared false.
    pub adjusted_p_all_false: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmfRow {
    pub value: usize,
    pub mass: f64,
    pub cumulative: f64,
}

impl ConfidenceProfile {
    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    /// `G(0..=|R|)`: nonincreasing, `G(0) = 1`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn test(&self) -> LocalTest {
        self.test
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `G(k)` with `G(|R| + 1) = 0`.
    fn g(&self, k: usize) -> f64 {
        self.breakpoints.get(k).copied().unwrap_or(0.0)
    }

    /// `t_alpha(R) = max { k : G(k) > alpha }`.
    pub fn t_at(&self, alpha: f64) -> usize {
        // G is nonincreasing, so the qualifying k form a prefix.
        self.breakpoints
            .iter()
            .rposition(|&g| g > alpha)
            .unwrap_or(0)
    }

    /// `mass(v) = G(v) - G(v + 1)`.
    pub fn masses(&self) -> Vec<f64> {
        (0..self.breakpoints.len())
            .map(|v| self.g(v) - self.g(v + 1))
            .collect()
    }

    pub fn summary(&self, alpha: AlphaLevel) -> ProfileSummary {
        ProfileSummary {
            t_alpha: self.t_at(alpha.value()),
            estimate_median: self.t_at(0.5),
            adjusted_p_all_false: self.g(1),
        }
    }

    /// PMF rows for `v = 0..=|R|`. The cumulative column is
    /// `1 - G(v + 1)`, which ends at exactly 1.
    pub fn pmf(&self) -> Vec<PmfRow> {
        self.masses()
            .into_iter()
            .enumerate()
            .map(|(v, mass)| PmfRow {
                value: v,
                mass,
                cumulative: 1.0 - self.g(v + 1),
            })
            .collect()
    }
}

/// Shortcut profile from candidate witnesses.
pub fn confidence_profile(
    family: &HypothesisFamily,
    test: LocalTest,
    set: &IndexSet,
) -> Result<ConfidenceProfile> {
    require_shortcut(test, None)?;
    family.check_width(set)?;
    let view = WitnessView::new(family.p_values(), set, test);
    Ok(ConfidenceProfile {
        set: set.clone(),
        breakpoints: view.breakpoints(),
        test,
        method: Method::Shortcut,
    })
}

/// Exact profile from a tabulated closure; honors restricted combinations
/// when the table was built with them.
pub fn confidence_profile_exact(table: &ClosureTable, set: &IndexSet) -> Result<ConfidenceProfile> {
    if set.width() != table.width() {
        return Err(crate::Error::FamilyMismatch {
            expected: table.width(),
            found: set.width(),
        });
    }
    Ok(ConfidenceProfile {
        set: set.clone(),
        breakpoints: table.breakpoints(set),
        test: table.test(),
        method: Method::Exact,
    })
}

pub fn profile_summary(profile: &ConfidenceProfile, alpha: AlphaLevel) -> ProfileSummary {
    profile.summary(alpha)
}

pub fn emit_pmf(profile: &ConfidenceProfile) -> Vec<PmfRow> {
    profile.pmf()
}

/// The same numbers as [`profile_summary`] without tabulating every
/// breakpoint, for families too large for the quadratic profile.
///
/// `G(1)` is the adjusted p-value of the member of `R` with the largest
/// p-value: any intersection meeting `R` is dominated by one containing
/// that member.
pub fn quick_summary(
    family: &HypothesisFamily,
    test: LocalTest,
    set: &IndexSet,
    alpha: AlphaLevel,
) -> Result<ProfileSummary> {
    require_shortcut(test, None)?;
    family.check_width(set)?;
    let view = WitnessView::new(family.p_values(), set, test);
    let p = family.p_values();
    let top = set
        .iter()
        .max_by(|&a, &b| p[a].total_cmp(&p[b]).then(b.cmp(&a)));
    let adjusted_p_all_false = match top {
        Some(i) => adjusted_p_elementary(family, test, i)?,
        None => 0.0,
    };
    Ok(ProfileSummary {
        t_alpha: view.upper_bound(alpha.value()),
        estimate_median: view.upper_bound(0.5),
        adjusted_p_all_false,
    })
}

/// `value,mass,cumulative` CSV with display rounding.
pub fn pmf_csv(rows: &[PmfRow]) -> String {
    let mut out = String::from("value,mass,cumulative\n");
    for row in rows {
        let mass = if row.mass.abs() < DISPLAY_MASS_FLOOR {
            0.0
        } else {
            row.mass
        };
        let cumulative = if row.cumulative.abs() < DISPLAY_MASS_FLOOR {
            0.0
        } else {
            row.cumulative
        };
        out.push_str(&format!(
            "{},{},{}\n",
            row.value,
            crate::format::sig(mass),
            crate::format::sig(cumulative)
        ));
    }
    out
}
