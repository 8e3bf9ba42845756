//! Candidate-witness shortcut for symmetric, coordinate-monotone tests.
//!
//! For a set `R` and `k >= 1`, the witnesses `J*(k, q)` combine the `k`
//! largest p-values inside `R` with the `q - k` largest outside it. Any
//! intersection of size `q` meeting `R` in exactly `k` members is
//! dominated order-statistic-wise by `J*(k, q)`, so its local p-value is no
//! larger. `g(k)` is the largest witness p-value at level `k`, and the
//! breakpoints `G(k) = max_{k' >= k} g(k')` satisfy
//! `t_alpha(R) = max { k : G(k) > alpha }`.

use crate::index_set::IndexSet;
use crate::local::{chi2_even_sf, fisher_term, ln_factorial, simes_term, LocalTest};

/// Sorted views of the p-values inside and outside a set `R`.
#[derive(Debug, Clone)]
pub struct WitnessView {
    test: LocalTest,
    /// p-values in `R`, descending.
    inside: Vec<f64>,
    /// p-values outside `R`, descending.
    outside: Vec<f64>,
    inside_fisher: Vec<f64>,
    outside_fisher: Vec<f64>,
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn fisher_prefix(desc: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(desc.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for &p in desc {
        acc += fisher_term(p);
        out.push(acc);
    }
    out
}

impl WitnessView {
    pub fn new(p: &[f64], set: &IndexSet, test: LocalTest) -> Self {
        assert_eq!(p.len(), set.width(), "index set from another family");
        let mut inside = Vec::with_capacity(set.len());
        let mut outside = Vec::with_capacity(p.len() - set.len());
        for (i, &v) in p.iter().enumerate() {
            if set.contains(i) {
                inside.push(v);
            } else {
                outside.push(v);
            }
        }
        Self::from_parts(test, inside, outside)
    }

    pub fn from_parts(test: LocalTest, inside: Vec<f64>, outside: Vec<f64>) -> Self {
        let inside = sorted_desc(inside);
        let outside = sorted_desc(outside);
        let (inside_fisher, outside_fisher) = if test == LocalTest::Fisher {
            (fisher_prefix(&inside), fisher_prefix(&outside))
        } else {
            (Vec::new(), Vec::new())
        };
        Self {
            test,
            inside,
            outside,
            inside_fisher,
            outside_fisher,
        }
    }

    pub fn test(&self) -> LocalTest {
        self.test
    }

    /// `|R|`.
    pub fn set_len(&self) -> usize {
        self.inside.len()
    }

    pub fn outside_len(&self) -> usize {
        self.outside.len()
    }

    /// Witness sizes available at level `k`.
    pub fn q_range(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        k..=k + self.outside.len()
    }

    /// The multiset `J*(k, q)`, inside members first.
    pub fn members(&self, k: usize, q: usize) -> Vec<f64> {
        self.check(k, q);
        self.inside[..k]
            .iter()
            .chain(&self.outside[..q - k])
            .copied()
            .collect()
    }

    fn check(&self, k: usize, q: usize) {
        assert!(
            k >= 1 && k <= self.inside.len() && q >= k && q - k <= self.outside.len(),
            "no witness J*({k}, {q}) for |R| = {}, {} outside",
            self.inside.len(),
            self.outside.len()
        );
    }

    /// Local p-value of `J*(k, q)` without materializing the multiset.
    pub fn local_p(&self, k: usize, q: usize) -> f64 {
        self.check(k, q);
        let j = q - k;
        match self.test {
            LocalTest::Bonferroni => {
                let mut min = self.inside[k - 1];
                if j > 0 {
                    min = min.min(self.outside[j - 1]);
                }
                (q as f64 * min).min(1.0)
            }
            LocalTest::Fisher => chi2_even_sf(q, self.inside_fisher[k] + self.outside_fisher[j]),
            LocalTest::Simes => {
                // Merge the two prefixes from their smallest elements up.
                let m = q as f64;
                let (mut a, mut b) = (k, j);
                let mut best = 1.0f64;
                let mut rank = 0;
                while a > 0 || b > 0 {
                    let take_inside =
                        b == 0 || (a > 0 && self.inside[a - 1] <= self.outside[b - 1]);
                    let p = if take_inside {
                        a -= 1;
                        self.inside[a]
                    } else {
                        b -= 1;
                        self.outside[b]
                    };
                    rank += 1;
                    best = best.min(simes_term(m, p, rank));
                }
                best
            }
        }
    }

    /// `g(k)`: the largest witness p-value at level `k`.
    pub fn level_max(&self, k: usize) -> f64 {
        self.q_range(k)
            .map(|q| self.local_p(k, q))
            .fold(0.0, f64::max)
    }

    /// `G(0..=|R|)` with `G(0) = 1`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let r = self.set_len();
        let mut g = vec![0.0; r + 1];
        let mut running = 0.0f64;
        for k in (1..=r).rev() {
            running = running.max(self.level_max(k));
            g[k] = running;
        }
        g[0] = 1.0;
        g
    }

    /// `t_alpha(R)` at one level without computing every breakpoint.
    pub fn upper_bound(&self, alpha: f64) -> usize {
        match self.test {
            LocalTest::Simes => self.simes_bound(alpha),
            LocalTest::Fisher => {
                let mut crit = FisherCritical::new(alpha, self.set_len() + self.outside_len());
                self.descending_scan(|k, q| {
                    let s = self.inside_fisher[k] + self.outside_fisher[q - k];
                    crit.accepts(q, s)
                })
            }
            _ => self.descending_scan(|k, q| self.local_p(k, q) > alpha),
        }
    }

    /// Largest `k` with an accepted witness; 0 when there is none.
    fn descending_scan(&self, mut accepts: impl FnMut(usize, usize) -> bool) -> usize {
        for k in (1..=self.set_len()).rev() {
            if self.q_range(k).any(|q| accepts(k, q)) {
                return k;
            }
        }
        0
    }

    /// Simes at a fixed level, all witness sizes at once.
    ///
    /// Simes rejects `J` iff for some rank `i` at least `i` members satisfy
    /// `q p / i <= alpha`. Because witnesses take the largest p-values, the
    /// count in `J*(k, q)` is `max(0, k - a_i) + max(0, q - k - b_i)`,
    /// where `a_i` and `b_i` count members failing the condition inside and
    /// outside `R`. For fixed `q` the accepted `k` form an interval.
    fn simes_bound(&self, alpha: f64) -> usize {
        let r_len = self.inside.len();
        let s_len = self.outside.len();
        let inside_asc: Vec<f64> = self.inside.iter().rev().copied().collect();
        let outside_asc: Vec<f64> = self.outside.iter().rev().copied().collect();
        let mut best = 0usize;
        // Large witnesses first, so that small ones are skipped once they
        // cannot improve the bound.
        for q in (1..=r_len + s_len).rev() {
            let k_lo = 1.max(q.saturating_sub(s_len)) as i64;
            let k_hi = r_len.min(q) as i64;
            if k_lo > k_hi || k_hi as usize <= best {
                continue;
            }
            let m = q as f64;
            let (mut hit_in, mut hit_out) = (0usize, 0usize);
            let mut upper = k_hi;
            let mut lower = k_lo;
            let mut feasible = true;
            for i in 1..=q {
                while hit_in < r_len && simes_term(m, inside_asc[hit_in], i) <= alpha {
                    hit_in += 1;
                }
                while hit_out < s_len && simes_term(m, outside_asc[hit_out], i) <= alpha {
                    hit_out += 1;
                }
                let a = (r_len - hit_in) as i64;
                let b = (s_len - hit_out) as i64;
                let (q, i) = (q as i64, i as i64);
                if q - a - b >= i {
                    feasible = false;
                    break;
                }
                upper = upper.min(a + i - 1);
                lower = lower.max(q - b - i + 1);
                if lower > upper {
                    feasible = false;
                    break;
                }
            }
            if feasible {
                best = best.max(upper as usize);
                if best == r_len {
                    break;
                }
            }
        }
        best
    }
}

/// Per-size critical values for the Fisher statistic at one level.
struct FisherCritical {
    alpha: f64,
    cache: Vec<f64>,
}

impl FisherCritical {
    fn new(alpha: f64, max_q: usize) -> Self {
        Self {
            alpha,
            cache: vec![f64::NAN; max_q + 1],
        }
    }

    /// `chi2_even_sf(q, s) > alpha`, decided by comparing `s` with the
    /// critical value and evaluating the tail only near it.
    fn accepts(&mut self, q: usize, s: f64) -> bool {
        let c = self.critical(q);
        let band = 1e-9 * c + 1e-12;
        if s < c - band {
            true
        } else if s > c + band {
            false
        } else {
            chi2_even_sf(q, s) > self.alpha
        }
    }

    fn critical(&mut self, q: usize) -> f64 {
        if self.cache[q].is_nan() {
            // Critical values grow by about 2 per unit of q.
            let below = q
                .checked_sub(1)
                .map(|b| self.cache[b])
                .filter(|c| !c.is_nan());
            let above = self.cache.get(q + 1).copied().filter(|c| !c.is_nan());
            let guess = below.map(|c| c + 2.0).or(above.map(|c| (c - 2.0).max(0.0)));
            self.cache[q] = fisher_critical(q, self.alpha, guess);
        }
        self.cache[q]
    }
}

/// Density of the chi-square distribution with `2q` degrees of freedom.
fn chi2_even_density(q: usize, s: f64) -> f64 {
    if s <= 0.0 {
        return if q == 1 { 0.5 } else { 0.0 };
    }
    let x = s / 2.0;
    let k = q - 1;
    0.5 * (-x + k as f64 * x.ln() - ln_factorial(k)).exp()
}

/// Statistic value where the `2q`-df tail equals `alpha`, by Newton steps
/// kept inside a shrinking bracket, with bisection whenever a step leaves
/// it.
fn fisher_critical(q: usize, alpha: f64, guess: Option<f64>) -> f64 {
    let mean = 2.0 * q as f64;
    let mut s = guess
        .unwrap_or(mean + 2.0 * mean.sqrt())
        .max(f64::MIN_POSITIVE);
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for _ in 0..200 {
        let tail = chi2_even_sf(q, s);
        if tail > alpha {
            lo = s;
        } else {
            hi = s;
        }
        let density = chi2_even_density(q, s);
        let step = if density > 0.0 {
            (tail - alpha) / density
        } else {
            f64::NAN
        };
        let mut next = s + step;
        if !hi.is_finite() {
            next = next.min(4.0 * s.max(1.0));
        }
        if !(next > lo && next < hi) {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                4.0 * s.max(1.0)
            };
        }
        if (next - s).abs() <= 1e-14 * s || (hi.is_finite() && hi - lo <= 1e-14 * hi) {
            return next;
        }
        s = next;
    }
    s
}
