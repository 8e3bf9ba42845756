use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use mtcherry_core::{
    confidence_profile, confidence_profile_exact, minimal_transversals, pairwise_congruence,
    parse_family, profile::pmf_csv, quick_summary, resolve_set, run_power_study, t_alpha_exact,
    t_alpha_shortcut, AlphaLevel, ClosureTable, CongruenceOracle, Error, HypothesisFamily,
    IndexSet, LocalTest, Method, PartialConjunction, ProfileSummary, SimConfig,
    DEFAULT_SHORTLIST_CAP,
};
use serde_json::{json, Value};

use crate::args::{AnalyzeArgs, Command, EngineArg, OracleArgs, ProfileArgs, SimulateArgs};
use crate::report::{self, float};
use crate::svg;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;
pub const EXIT_INCOMPATIBLE: u8 = 4;

/// Largest family the oracle enumerates.
pub const ORACLE_CAP: usize = 20;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn incompatible(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INCOMPATIBLE,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => EXIT_CAPACITY,
            Error::CongruenceInShortcut => EXIT_INCOMPATIBLE,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Analyze(a) => analyze(&a),
        Command::Profile(a) => profile(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Oracle(a) => oracle(&a),
    }
}

fn read_input(path: &Path) -> CliResult<(Vec<u8>, HypothesisFamily)> {
    let raw = fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&raw)
        .map_err(|_| CliError::input(format!("{} is not valid UTF-8", path.display())))?;
    let family = parse_family(text)?;
    Ok((raw, family))
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError {
                    code: EXIT_IO,
                    message: format!("cannot write to stdout: {e}"),
                })
        }
    }
}

fn parse_set(family: &HypothesisFamily, spec: &str) -> CliResult<IndexSet> {
    let labels: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    Ok(resolve_set(family, &labels)?)
}

fn parse_congruence(family: &HypothesisFamily, spec: &str) -> CliResult<CongruenceOracle> {
    let groups = spec
        .strip_prefix("pairwise:")
        .and_then(|k| k.trim().parse::<usize>().ok())
        .ok_or_else(|| {
            CliError::input(format!(
                "congruence {spec:?} is not of the form pairwise:<k>"
            ))
        })?;
    Ok(pairwise_congruence(family, groups)?)
}

fn verdict(pc: PartialConjunction) -> &'static str {
    match pc {
        PartialConjunction::Reject => "reject",
        PartialConjunction::Retain => "retain",
    }
}

fn summary_json(s: &ProfileSummary) -> Value {
    json!({
        "adjusted_p_all_false": float(s.adjusted_p_all_false),
        "estimate_median": s.estimate_median,
        "t_alpha": s.t_alpha,
    })
}

fn analyze(args: &AnalyzeArgs) -> CliResult {
    let (raw, family) = read_input(&args.input)?;
    let alpha = AlphaLevel::new(args.alpha)?;
    let test = LocalTest::from(args.test);
    let n = family.len();

    let sets = if args.sets.is_empty() {
        vec![family.full_set()]
    } else {
        args.sets
            .iter()
            .map(|s| parse_set(&family, s))
            .collect::<CliResult<Vec<_>>>()?
    };
    let congruence = args
        .congruence
        .as_deref()
        .map(|spec| parse_congruence(&family, spec))
        .transpose()?;

    let fits = n <= args.exact_cap;
    let method = match args.engine {
        EngineArg::Auto => {
            if congruence.is_some() {
                if !fits {
                    return Err(CliError::incompatible(format!(
                        "restricted combinations need the exact engine, but {n} hypotheses exceed --exact-cap {}",
                        args.exact_cap
                    )));
                }
                Method::Exact
            } else if args.shortlist {
                if !fits {
                    return Err(Error::Capacity {
                        n,
                        cap: args.exact_cap,
                    }
                    .into());
                }
                Method::Exact
            } else {
                Method::Shortcut
            }
        }
        EngineArg::Exact => Method::Exact,
        EngineArg::Shortcut => {
            if congruence.is_some() {
                return Err(Error::CongruenceInShortcut.into());
            }
            if args.shortlist {
                return Err(CliError::incompatible("--shortlist needs the exact engine"));
            }
            Method::Shortcut
        }
    };

    let table = match method {
        Method::Exact => Some(ClosureTable::build(
            &family,
            test,
            congruence.as_ref(),
            args.exact_cap,
        )?),
        Method::Shortcut => None,
    };
    let defining = table.as_ref().map(|t| t.defining_sets(alpha));

    let mut records = Vec::with_capacity(sets.len());
    for set in &sets {
        let (bound, summary) = match (&table, &defining) {
            (Some(table), Some(defining)) => (
                t_alpha_exact(defining, set)?,
                confidence_profile_exact(table, set)?.summary(alpha),
            ),
            _ => (
                t_alpha_shortcut(&family, test, alpha, set, None)?,
                quick_summary(&family, test, set, alpha)?,
            ),
        };
        let pcs = args
            .pc
            .iter()
            .map(|&u| Ok(json!({ "u": u, "verdict": verdict(bound.partial_conjunction(u)?) })))
            .collect::<CliResult<Vec<_>>>()?;
        records.push(json!({
            "f": bound.f(),
            "labels": report::labels(&family, set),
            "method": bound.method.name(),
            "partial_conjunctions": pcs,
            "profile": summary_json(&summary),
            "size": set.len(),
            "t": bound.t,
        }));
    }

    let mut out = report::header(&family, &raw, test.name(), alpha.value());
    out.insert("congruence".into(), json!(args.congruence));
    out.insert("engine".into(), json!(method.name()));
    out.insert("sets".into(), Value::Array(records));
    if args.shortlist {
        let defining = defining.as_ref().expect("shortlist runs the exact engine");
        let shortlist = minimal_transversals(defining, DEFAULT_SHORTLIST_CAP)?;
        let members: Vec<Value> = shortlist
            .sets()
            .iter()
            .map(|s| report::labels(&family, s))
            .collect();
        out.insert(
            "shortlist".into(),
            json!({ "sets": members, "truncated": shortlist.truncated() }),
        );
    }
    write_output(args.out.as_deref(), &report::render(&Value::Object(out)))
}

fn profile(args: &ProfileArgs) -> CliResult {
    let (_, family) = read_input(&args.input)?;
    let alpha = AlphaLevel::new(args.alpha)?;
    let test = LocalTest::from(args.test);
    let set = match &args.set {
        Some(spec) => parse_set(&family, spec)?,
        None => family.full_set(),
    };
    let profile = confidence_profile(&family, test, &set)?;
    let rows = profile.pmf();
    write_output(args.csv.as_deref(), &pmf_csv(&rows))?;
    if let Some(path) = &args.svg {
        let title = format!(
            "Confidence mass function, {} local tests, {} hypotheses",
            test.name(),
            set.len()
        );
        write_output(Some(path), &svg::pmf_chart(&rows, &title))?;
    }
    let s = profile.summary(alpha);
    let line = format!(
        "t_{} = {}, median estimate = {}, adjusted p (all false) = {}",
        mtcherry_core::format::sig(alpha.value()),
        s.t_alpha,
        s.estimate_median,
        mtcherry_core::format::sig(s.adjusted_p_all_false)
    );
    if args.csv.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> CliResult {
    let config = SimConfig {
        m_values: args.m.clone(),
        sparse: args.sparse,
        mu: args.mu,
        alpha: AlphaLevel::new(args.alpha)?,
        reps: args.reps,
        tests: args.tests.iter().map(|&t| LocalTest::from(t)).collect(),
        seed: args.seed,
    };
    let result = run_power_study(&config)?;
    write_output(args.out.as_deref(), &result.to_csv())?;

    let mut table = format!(
        "{:>6}  {:<10}  {:>8}  {:>8}  {:>10}\n",
        "m", "test", "power", "se", "violation"
    );
    for r in &result.rows {
        table.push_str(&format!(
            "{:>6}  {:<10}  {:>8.4}  {:>8.4}  {:>10.4}\n",
            r.m,
            r.test.name(),
            r.power,
            r.power_se,
            r.violation_rate
        ));
    }
    if args.out.is_some() {
        print!("{table}");
    } else {
        eprint!("{table}");
    }
    Ok(())
}

fn oracle(args: &OracleArgs) -> CliResult {
    let (raw, family) = read_input(&args.input)?;
    let alpha = AlphaLevel::new(args.alpha)?;
    let test = LocalTest::from(args.test);
    let congruence = args
        .congruence
        .as_deref()
        .map(|spec| parse_congruence(&family, spec))
        .transpose()?;
    let table = ClosureTable::build(&family, test, congruence.as_ref(), ORACLE_CAP)?;
    let defining = table.defining_sets(alpha);

    let mut out = report::header(&family, &raw, test.name(), alpha.value());
    out.insert("congruence".into(), json!(args.congruence));
    out.insert(
        "defining_sets".into(),
        Value::Array(
            defining
                .sets()
                .iter()
                .map(|s| report::labels(&family, s))
                .collect(),
        ),
    );
    if args.table {
        let n = family.len();
        let rejected = table.rejections(alpha);
        let rows: Vec<Value> = (1u64..1 << n)
            .map(|mask| {
                json!({
                    "labels": report::labels(&family, &IndexSet::from_mask(n, mask)),
                    "local_p": float(table.local_p(mask)),
                    "rejected": rejected[mask as usize],
                })
            })
            .collect();
        out.insert("table".into(), Value::Array(rows));
    }
    write_output(args.out.as_deref(), &report::render(&Value::Object(out)))
}
