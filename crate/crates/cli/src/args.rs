use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtcherry_core::{LocalTest, DEFAULT_EXACT_CAP};

#[derive(Debug, Parser)]
#[command(
    name = "mtcherry",
    version,
    about = "Simultaneous confidence bounds on the number of true hypotheses in any set"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds, partial conjunctions and shortlists for selected sets.
    Analyze(AnalyzeArgs),
    /// Confidence mass function of the number of true hypotheses in a set.
    Profile(ProfileArgs),
    /// Monte-Carlo power and coverage study.
    Simulate(SimulateArgs),
    /// Full enumeration of the closed testing procedure (at most 20 hypotheses).
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    Bonferroni,
    Simes,
    Fisher,
}

impl From<TestArg> for LocalTest {
    fn from(t: TestArg) -> Self {
        match t {
            TestArg::Bonferroni => LocalTest::Bonferroni,
            TestArg::Simes => LocalTest::Simes,
            TestArg::Fisher => LocalTest::Fisher,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    /// Exact when restricted combinations or a shortlist need it.
    Auto,
    Exact,
    Shortcut,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV file with header `id,p`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "simes")]
    pub test: TestArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Comma-separated labels; repeat for several sets. Defaults to the
    /// whole family.
    #[arg(long = "set", value_name = "LABELS")]
    pub sets: Vec<String>,
    /// Restricted combinations, e.g. `pairwise:3`.
    #[arg(long, value_name = "SPEC")]
    pub congruence: Option<String>,
    /// Largest family the exact engine will enumerate.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    /// Report the shortlist (needs the exact engine).
    #[arg(long)]
    pub shortlist: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub engine: EngineArg,
    /// Partial conjunction levels `u` to test in every set; repeatable.
    #[arg(long = "pc", value_name = "U")]
    pub pc: Vec<usize>,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "simes")]
    pub test: TestArg,
    /// Comma-separated labels; defaults to the whole family.
    #[arg(long = "set", value_name = "LABELS")]
    pub set: Option<String>,
    /// Level for the summary line.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// PMF CSV path; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Bar chart path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Comma-separated family sizes.
    #[arg(long, value_delimiter = ',', default_value = "8,32,128,512,1024")]
    pub m: Vec<usize>,
    /// False nulls per family.
    #[arg(long, default_value_t = 2)]
    pub sparse: usize,
    /// Mean shift of the false nulls' z-statistics.
    #[arg(long, default_value_t = 5.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    /// Comma-separated local tests.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "bonferroni,simes,fisher"
    )]
    pub tests: Vec<TestArg>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Power CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "simes")]
    pub test: TestArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Restricted combinations, e.g. `pairwise:3`.
    #[arg(long, value_name = "SPEC")]
    pub congruence: Option<String>,
    /// Include the local p-value and verdict of every intersection.
    #[arg(long)]
    pub table: bool,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
