//! Monte-Carlo power curves and coverage checks.
//!
//! Each replicate draws its own random stream keyed by `(seed, m, rep)`,
//! so results do not depend on scheduling or worker count. Within a
//! replicate every local test sees the same p-values.
//!
//! Power is `E[min(f_alpha(full), s)] / s`: the expected share of the `s`
//! false nulls that the lower bound on false hypotheses in the whole
//! family accounts for. The cap keeps credit for chance rejections among
//! the true nulls from pushing the rate above 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use rayon::prelude::*;

use crate::bounds::t_alpha_shortcut;
use crate::error::{Error, Result};
use crate::family::{AlphaLevel, HypothesisFamily};
use crate::local::LocalTest;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub m_values: Vec<usize>,
    /// False nulls per family.
    pub sparse: usize,
    /// Mean shift of the z-statistics of false nulls.
    pub mu: f64,
    pub alpha: AlphaLevel,
    pub reps: usize,
    pub tests: Vec<LocalTest>,
    pub seed: u64,
}

impl Default for SimConfig {
    /// Sparse, strong signal: two false nulls at `mu = 5`.
    fn default() -> Self {
        Self {
            m_values: vec![8, 32, 128, 512, 1024],
            sparse: 2,
            mu: 5.0,
            alpha: AlphaLevel::new(0.05).expect("valid level"),
            reps: 2000,
            tests: LocalTest::ALL.to_vec(),
            seed: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.m_values.is_empty() {
            return bad("no family sizes given".into());
        }
        if let Some(&m) = self.m_values.iter().find(|&&m| m == 0) {
            return bad(format!("family size {m} must be positive"));
        }
        let min_m = *self.m_values.iter().min().expect("nonempty");
        if self.sparse > min_m {
            return bad(format!(
                "{} false nulls exceed the smallest family size {min_m}",
                self.sparse
            ));
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return bad(format!(
                "mu must be finite and nonnegative, got {}",
                self.mu
            ));
        }
        if self.tests.is_empty() {
            return bad("no local tests selected".into());
        }
        if self.reps >= 1 << 31 {
            return bad("reps must be below 2^31".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub m: usize,
    pub test: LocalTest,
    /// Mean of `min(f_alpha(full), s) / s`; 0 when `s = 0`.
    pub power: f64,
    pub power_se: f64,
    /// Share of complete-null replicates with `t_alpha(full) < m`.
    pub violation_rate: f64,
    pub violation_se: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub seed: u64,
    pub alpha: AlphaLevel,
    pub sparse: usize,
    pub mu: f64,
    /// Ordered by `m`, then by test in configuration order.
    pub rows: Vec<SimRow>,
}

impl SimResult {
    pub fn row(&self, m: usize, test: LocalTest) -> Option<&SimRow> {
        self.rows.iter().find(|r| r.m == m && r.test == test)
    }

    /// `m,test,power,se,reps,seed` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,test,power,se,reps,seed\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.m,
                r.test,
                crate::format::sig(r.power),
                crate::format::sig(r.power_se),
                r.reps,
                self.seed
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub violation_rate: f64,
    pub se: f64,
    pub reps: usize,
}

#[derive(Clone, Copy)]
enum Stream {
    Signal = 0,
    Null = 1,
}

fn replicate_rng(seed: u64, m: usize, rep: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | ((rep as u64) << 1) | stream as u64);
    rng
}

fn uniform_p(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Open01)
}

/// `sparse` signal p-values followed by `m - sparse` uniform ones.
fn draw_family(rng: &mut ChaCha8Rng, m: usize, sparse: usize, mu: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(m);
    for _ in 0..sparse {
        let z: f64 = rng.sample(StandardNormal);
        p.push(standard_normal_tail(z + mu));
    }
    for _ in sparse..m {
        p.push(uniform_p(rng));
    }
    p
}

fn full_bound(p: Vec<f64>, test: LocalTest, alpha: AlphaLevel) -> usize {
    let family = HypothesisFamily::from_p_values(p).expect("simulated p-values are valid");
    let full = family.full_set();
    t_alpha_shortcut(&family, test, alpha, &full, None)
        .expect("built-in tests support the shortcut")
        .t
}

fn mean_se(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn run_power_study(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let mut rows = Vec::new();
    for &m in &config.m_values {
        // One entry per replicate: (f per test, violation per test).
        let per_rep: Vec<(Vec<usize>, Vec<bool>)> = (0..config.reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replicate_rng(config.seed, m, rep, Stream::Signal);
                let signal = draw_family(&mut rng, m, config.sparse, config.mu);
                let mut rng = replicate_rng(config.seed, m, rep, Stream::Null);
                let null: Vec<f64> = (0..m).map(|_| uniform_p(&mut rng)).collect();
                let f = config
                    .tests
                    .iter()
                    .map(|&t| (m - full_bound(signal.clone(), t, config.alpha)).min(config.sparse))
                    .collect();
                let v = config
                    .tests
                    .iter()
                    .map(|&t| full_bound(null.clone(), t, config.alpha) < m)
                    .collect();
                (f, v)
            })
            .collect();
        for (ti, &test) in config.tests.iter().enumerate() {
            let s = config.sparse as f64;
            let (power, power_se) = if config.sparse == 0 {
                (0.0, 0.0)
            } else {
                mean_se(per_rep.iter().map(|(f, _)| f[ti] as f64 / s))
            };
            let (violation_rate, violation_se) =
                mean_se(per_rep.iter().map(|(_, v)| if v[ti] { 1.0 } else { 0.0 }));
            rows.push(SimRow {
                m,
                test,
                power,
                power_se,
                violation_rate,
                violation_se,
                reps: config.reps,
            });
        }
    }
    Ok(SimResult {
        seed: config.seed,
        alpha: config.alpha,
        sparse: config.sparse,
        mu: config.mu,
        rows,
    })
}

/// Empirical rate of `t_alpha(full) < m` when all `m` hypotheses are true.
pub fn run_coverage_check(
    m: usize,
    alpha: AlphaLevel,
    reps: usize,
    test: LocalTest,
    seed: u64,
) -> Result<Coverage> {
    if m == 0 || reps == 0 {
        return Err(Error::InvalidArgument(
            "coverage check needs m >= 1 and reps >= 1".into(),
        ));
    }
    let hits: Vec<bool> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, m, rep, Stream::Null);
            let p: Vec<f64> = (0..m).map(|_| uniform_p(&mut rng)).collect();
            full_bound(p, test, alpha) < m
        })
        .collect();
    let rate = hits.iter().filter(|&&h| h).count() as f64 / reps as f64;
    Ok(Coverage {
        violation_rate: rate,
        se: (rate * (1.0 - rate) / reps as f64).sqrt(),
        reps,
    })
}

/// Upper tail `P(Z > z)` of the standard normal.
pub fn standard_normal_tail(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let x = z.abs() / std::f64::consts::SQRT_2;
    let upper = 0.5 * erfc_nonneg(x);
    if z >= 0.0 {
        upper
    } else {
        1.0 - upper
    }
}

/// `erfc(x)` for `x >= 0`: a positive-term series for `erf` below 2.5, a
/// continued fraction above.
fn erfc_nonneg(x: f64) -> f64 {
    const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
    if x < 2.5 {
        // erf(x) = 2/sqrt(pi) exp(-x^2) sum 2^n x^(2n+1) / (2n+1)!!
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        1.0 - FRAC_2_SQRT_PI * (-x2).exp() * sum
    } else {
        // erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let mut tail = x;
        for n in (1..=120).rev() {
            tail = x + (n as f64 / 2.0) / tail;
        }
        0.5 * FRAC_2_SQRT_PI * (-x * x).exp() / tail
    }
}
