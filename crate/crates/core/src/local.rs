//! Local tests for intersection hypotheses.
//!
//! Every test is exposed as a local p-value function of the multiset of
//! elementary p-values; the intersection is rejected at level `alpha`
//! exactly when its local p-value is `<= alpha`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Floor applied to p-values before taking logarithms.
pub const P_FLOOR: f64 = 1e-300;

/// Structural properties a closure shortcut can rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    /// Depends only on the multiset of p-values.
    pub symmetric: bool,
    /// Nondecreasing when any input p-value increases.
    pub coordinate_monotone: bool,
    /// The local p-value of a single p-value is that p-value.
    pub singleton_faithful: bool,
}

impl Capabilities {
    pub const ALL: Capabilities = Capabilities {
        symmetric: true,
        coordinate_monotone: true,
        singleton_faithful: true,
    };

    /// Name of the first capability the candidate-witness shortcut needs
    /// but this set lacks.
    pub fn shortcut_gap(self) -> Option<&'static str> {
        if !self.symmetric {
            Some("symmetric")
        } else if !self.coordinate_monotone {
            Some("coordinate-monotone")
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalTest {
    Bonferroni,
    Simes,
    Fisher,
}

impl LocalTest {
    pub const ALL: [LocalTest; 3] = [LocalTest::Bonferroni, LocalTest::Simes, LocalTest::Fisher];

    pub fn name(self) -> &'static str {
        match self {
            LocalTest::Bonferroni => "bonferroni",
            LocalTest::Simes => "simes",
            LocalTest::Fisher => "fisher",
        }
    }

    pub fn capabilities(self) -> Capabilities {
        Capabilities::ALL
    }

    /// Local p-value of the intersection of the hypotheses with p-values
    /// `pvals`. Panics on an empty slice.
    pub fn local_p(self, pvals: &[f64]) -> f64 {
        match self {
            LocalTest::Bonferroni => bonferroni_local_p(pvals),
            LocalTest::Simes => simes_local_p(pvals),
            LocalTest::Fisher => fisher_local_p(pvals),
        }
    }
}

impl fmt::Display for LocalTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LocalTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bonferroni" => Ok(LocalTest::Bonferroni),
            "simes" => Ok(LocalTest::Simes),
            "fisher" => Ok(LocalTest::Fisher),
            other => Err(Error::InvalidArgument(format!(
                "unknown local test {other:?}"
            ))),
        }
    }
}

/// `min(1, m * min(p))`.
pub fn bonferroni_local_p(pvals: &[f64]) -> f64 {
    assert!(!pvals.is_empty(), "local test of an empty intersection");
    let min = pvals.iter().copied().fold(f64::INFINITY, f64::min);
    (pvals.len() as f64 * min).min(1.0)
}

/// `min(1, min_i m * p_(i) / i)` over the ascending order statistics.
pub fn simes_local_p(pvals: &[f64]) -> f64 {
    assert!(!pvals.is_empty(), "local test of an empty intersection");
    let mut sorted = pvals.to_vec();
    sorted.sort_by(f64::total_cmp);
    simes_sorted(&sorted)
}

/// Simes on an ascending slice.
pub(crate) fn simes_sorted(sorted: &[f64]) -> f64 {
    let m = sorted.len() as f64;
    let mut best = 1.0f64;
    for (i, &p) in sorted.iter().enumerate() {
        best = best.min(simes_term(m, p, i + 1));
    }
    best
}

#[inline]
pub(crate) fn simes_term(m: f64, p: f64, rank: usize) -> f64 {
    m * p / rank as f64
}

/// Fisher combination: upper chi-square tail with `2m` degrees of freedom
/// at `-2 * sum(ln p)`.
pub fn fisher_local_p(pvals: &[f64]) -> f64 {
    assert!(!pvals.is_empty(), "local test of an empty intersection");
    let s: f64 = pvals.iter().map(|&p| fisher_term(p)).sum();
    chi2_even_sf(pvals.len(), s)
}

/// `-2 ln p` with `p` floored at [`P_FLOOR`].
#[inline]
pub fn fisher_term(p: f64) -> f64 {
    -2.0 * p.max(P_FLOOR).ln()
}

/// Upper tail of a chi-square distribution with `2m` degrees of freedom:
/// `exp(-s/2) * sum_{i<m} (s/2)^i / i!`.
///
/// Small problems use the running product directly. Once `m > 64` or
/// `exp(-s/2)` would underflow, the sum is evaluated as a Poisson CDF in
/// log space, starting from the boundary term and walking away from the
/// mode with compensated summation until terms become negligible.
pub fn chi2_even_sf(m: usize, s: f64) -> f64 {
    assert!(m >= 1, "chi2_even_sf needs m >= 1");
    assert!(
        s >= 0.0 && !s.is_nan(),
        "chi2_even_sf needs s >= 0, got {s}"
    );
    if s.is_infinite() {
        return 0.0;
    }
    let x = s / 2.0;
    if x == 0.0 {
        return 1.0;
    }
    if m <= 64 && x < 600.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for i in 1..m {
            term *= x / i as f64;
            sum += term;
        }
        return (sum * (-x).exp()).clamp(0.0, 1.0);
    }
    poisson_cdf(m - 1, x).clamp(0.0, 1.0)
}

/// `P(N <= k)` for `N ~ Poisson(x)`, `x > 0`.
fn poisson_cdf(k: usize, x: f64) -> f64 {
    let ln_x = x.ln();
    let ln_term = |i: usize| -x + i as f64 * ln_x - ln_factorial(i);
    if (k as f64) < x {
        // Terms decrease walking down from k.
        let mut acc = Neumaier::default();
        let mut ratio = 1.0;
        let mut i = k;
        acc.add(ratio);
        while i > 0 {
            ratio *= i as f64 / x;
            acc.add(ratio);
            i -= 1;
            if ratio < 1e-18 * acc.total() {
                break;
            }
        }
        (ln_term(k) + acc.total().ln()).exp()
    } else {
        // Complement: terms decrease walking up from k + 1.
        let start = k + 1;
        let mut acc = Neumaier::default();
        let mut ratio = 1.0;
        let mut i = start;
        acc.add(ratio);
        loop {
            i += 1;
            ratio *= x / i as f64;
            acc.add(ratio);
            if ratio < 1e-18 * acc.total() {
                break;
            }
        }
        1.0 - (ln_term(start) + acc.total().ln()).exp()
    }
}

/// `ln(n!)`: exact product for small `n`, Stirling series beyond.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    if n < 16 {
        let mut prod = 1.0f64;
        for i in 2..=n {
            prod *= i as f64;
        }
        return prod.ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use statrs::function::gamma::gamma_ur;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bonferroni_examples() {
        assert!(close(bonferroni_local_p(&[0.01, 0.04]), 0.02, 1e-15));
        assert_eq!(bonferroni_local_p(&[0.6]), 0.6);
        assert_eq!(bonferroni_local_p(&[0.5, 0.9, 0.7]), 1.0);
    }

    #[test]
    fn simes_examples() {
        assert!(close(simes_local_p(&[0.02, 0.04]), 0.04, 1e-15));
        assert!(close(simes_local_p(&[0.01, 0.02, 0.30]), 0.03, 1e-15));
        assert_eq!(simes_local_p(&[0.6]), 0.6);
    }

    #[test]
    fn fisher_examples() {
        for p in [1e-8, 0.003, 0.42, 0.999] {
            assert!(close(fisher_local_p(&[p]), p, 1e-12), "p={p}");
        }
        assert_eq!(fisher_local_p(&[1.0, 1.0]), 1.0);
        // Closed form for m = 2: exp(-x) (1 + x), x = -2 ln 0.05 = 2 ln 20.
        let x = 2.0 * 20f64.ln();
        let oracle = (-x).exp() * (1.0 + x);
        assert!(close(oracle, 0.017_478_661_367, 1e-11));
        assert!(close(fisher_local_p(&[0.05, 0.05]), oracle, 1e-14));
    }

    #[test]
    fn fisher_handles_zero_p() {
        let p = fisher_local_p(&[0.0, 0.5]);
        assert!(p.is_finite() && (0.0..1e-290).contains(&p));
    }

    #[test]
    #[should_panic(expected = "empty intersection")]
    fn empty_multiset_is_contract_violation() {
        simes_local_p(&[]);
    }

    #[test]
    fn chi2_examples() {
        assert_eq!(chi2_even_sf(1, 0.0), 1.0);
        assert!(close(chi2_even_sf(1, 5.9915), (-2.995_75f64).exp(), 1e-15));
        assert!(close(chi2_even_sf(1, 5.9915), 0.0500, 1e-4));
        assert!(close(chi2_even_sf(2, 11.9829), 0.017_479, 1e-5));
    }

    #[test]
    fn chi2_matches_incomplete_gamma_oracle() {
        // Q(m, s/2) from statrs' regularized upper incomplete gamma.
        for &m in &[1usize, 2, 3, 7, 20, 64, 65, 100, 500, 2000, 7129] {
            let mf = m as f64;
            for &z in &[-6.0, -3.0, -1.0, -0.3, 0.0, 0.4, 1.5, 3.0, 6.0] {
                let x = (mf + z * mf.sqrt()).max(0.01);
                let s = 2.0 * x;
                let got = chi2_even_sf(m, s);
                let want = gamma_ur(mf, x);
                let tol = 1e-10 * want.max(1e-300) + 1e-13;
                assert!(
                    (got - want).abs() <= tol.max(1e-9 * want),
                    "m={m} s={s}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn chi2_matches_chisquared_sf() {
        for &m in &[1usize, 5, 30, 80] {
            let dist = ChiSquared::new(2.0 * m as f64).unwrap();
            for &s in &[0.5, 2.0, 10.0, 50.0, 150.0, 400.0] {
                let got = chi2_even_sf(m, s);
                let want = dist.sf(s);
                assert!(
                    (got - want).abs() <= 1e-10 * want + 1e-14,
                    "m={m} s={s}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn chi2_large_statistic_does_not_underflow_to_garbage() {
        let v = chi2_even_sf(10, 2000.0);
        assert!((0.0..1e-300).contains(&v));
        let v = chi2_even_sf(5000, 2000.0);
        assert!(close(v, 1.0, 1e-15));
    }

    #[test]
    fn ln_factorial_matches_product() {
        let mut acc = 0.0f64;
        for n in 1..400usize {
            acc += (n as f64).ln();
            assert!(
                (ln_factorial(n) - acc).abs() <= 1e-12 * acc.max(1.0),
                "n={n}"
            );
        }
    }

    #[test]
    fn builtins_advertise_all_capabilities() {
        for t in LocalTest::ALL {
            assert_eq!(t.capabilities(), Capabilities::ALL);
            assert_eq!(t.capabilities().shortcut_gap(), None);
            assert_eq!(t.name().parse::<LocalTest>().unwrap(), t);
        }
    }

    fn arb_pvals() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(prop_oneof![0.0f64..=1.0, 0.0f64..0.05, Just(1.0)], 1..30)
    }

    proptest! {
        #[test]
        fn singleton_faithful(p in 0.0f64..=1.0) {
            for t in LocalTest::ALL {
                let p = p.max(P_FLOOR);
                prop_assert!((t.local_p(&[p]) - p).abs() <= 1e-12);
            }
        }

        #[test]
        fn coordinate_monotone(ps in arb_pvals(), idx in any::<prop::sample::Index>(), bump in 0.0f64..1.0) {
            let i = idx.index(ps.len());
            let mut up = ps.clone();
            up[i] = (up[i] + bump * (1.0 - up[i])).min(1.0);
            for t in LocalTest::ALL {
                let a = t.local_p(&ps);
                let b = t.local_p(&up);
                prop_assert!(b >= a - 1e-12 * a.max(1e-300), "{t}: {a} -> {b}");
            }
        }

        #[test]
        fn symmetric(ps in arb_pvals(), seed in any::<u64>()) {
            let mut shuffled = ps.clone();
            let len = shuffled.len();
            shuffled.rotate_left((seed as usize) % len);
            shuffled.reverse();
            for t in LocalTest::ALL {
                let a = t.local_p(&ps);
                let b = t.local_p(&shuffled);
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
            }
        }

        #[test]
        fn simes_dominated_by_bonferroni(ps in arb_pvals()) {
            prop_assert!(simes_local_p(&ps) <= bonferroni_local_p(&ps));
        }

        #[test]
        fn chi2_strictly_decreasing(m in 1usize..300, s in 0.0f64..400.0, ds in 0.01f64..5.0) {
            let a = chi2_even_sf(m, s);
            let b = chi2_even_sf(m, s + ds);
            // Rounding noise near 1 is a few ulps.
            prop_assert!(b <= a + 4.0 * f64::EPSILON);
            if a > 1e-250 && a < 1.0 - 1e-9 {
                prop_assert!(b < a);
            }
        }

        #[test]
        fn chi2_m1_is_exp(s in 0.0f64..1000.0) {
            prop_assert_eq!(chi2_even_sf(1, s), (-s / 2.0).exp());
        }
    }
}
