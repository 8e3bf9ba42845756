use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

const GENES: &str = "id,p\ng1,0.01\ng2,0.02\ng3,0.30\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mtcherry"));
    c.env_remove("MTCHERRY_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(
        code(out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

struct Workdir {
    dir: TempDir,
}

impl Workdir {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, content: &str) -> String {
        let path = self.dir.path().join(name);
        fs::write(&path, content).unwrap();
        path.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn family_csv(p: &[f64]) -> String {
    let mut s = String::from("id,p\n");
    for (i, v) in p.iter().enumerate() {
        s.push_str(&format!("h{},{v:?}\n", i + 1));
    }
    s
}

fn label_lists(v: &Value) -> Vec<Vec<String>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| {
            s.as_array()
                .unwrap()
                .iter()
                .map(|l| l.as_str().unwrap().to_string())
                .collect()
        })
        .collect()
}

#[test]
fn analyze_three_genes_with_shortlist() {
    let w = Workdir::new();
    let input = w.file("genes.csv", GENES);
    let report = json(&run(&[
        "analyze",
        "--input",
        &input,
        "--test",
        "bonferroni",
        "--alpha",
        "0.05",
        "--shortlist",
    ]));
    assert_eq!(report["engine"], "exact");
    let set = &report["sets"][0];
    assert_eq!(set["t"], 1);
    assert_eq!(set["f"], 2);
    assert_eq!(set["method"], "exact");
    assert_eq!(
        label_lists(&report["shortlist"]["sets"]),
        vec![vec!["g1", "g2"]]
    );
    assert_eq!(report["shortlist"]["truncated"], false);
    assert_eq!(report["family"]["n"], 3);
    assert_eq!(report["test"], "bonferroni");
    assert_eq!(set["profile"]["adjusted_p_all_false"], 0.3);
}

#[test]
fn analyze_defaults_to_shortcut() {
    let w = Workdir::new();
    let input = w.file("genes.csv", GENES);
    let report = json(&run(&["analyze", "--input", &input]));
    assert_eq!(report["engine"], "shortcut");
    assert_eq!(report["test"], "simes");
    assert_eq!(report["sets"][0]["t"], 1);
    assert!(report.get("shortlist").is_none());
}

#[test]
fn analyze_all_ones() {
    let w = Workdir::new();
    let input = w.file("ones.csv", &family_csv(&[1.0; 4]));
    let report = json(&run(&["analyze", "--input", &input, "--shortlist"]));
    assert_eq!(report["sets"][0]["t"], 4);
    assert_eq!(report["sets"][0]["f"], 0);
    assert_eq!(
        label_lists(&report["shortlist"]["sets"]),
        vec![Vec::<String>::new()]
    );
}

#[test]
fn analyze_several_sets_and_partial_conjunctions() {
    let w = Workdir::new();
    let input = w.file("genes.csv", GENES);
    let report = json(&run(&[
        "analyze",
        "--input",
        &input,
        "--test",
        "bonferroni",
        "--set",
        "g1,g2",
        "--set",
        "g3",
        "--pc",
        "1",
    ]));
    let sets = report["sets"].as_array().unwrap();
    assert_eq!(sets.len(), 2);
    assert_eq!(
        (sets[0]["t"].as_u64(), sets[0]["f"].as_u64()),
        (Some(0), Some(2))
    );
    assert_eq!(sets[0]["partial_conjunctions"][0]["verdict"], "reject");
    assert_eq!(
        (sets[1]["t"].as_u64(), sets[1]["f"].as_u64()),
        (Some(1), Some(0))
    );
    assert_eq!(sets[1]["partial_conjunctions"][0]["verdict"], "retain");
}

#[test]
fn analyze_input_errors_exit_2() {
    let w = Workdir::new();
    let input = w.file("genes.csv", GENES);
    assert_eq!(
        code(&run(&["analyze", "--input", &input, "--set", "g1,g9"])),
        2
    );
    assert_eq!(
        code(&run(&["analyze", "--input", &input, "--alpha", "1.5"])),
        2
    );
    assert_eq!(code(&run(&["analyze", "--input", &input, "--pc", "4"])), 2);
    assert_eq!(
        code(&run(&[
            "analyze",
            "--input",
            &input,
            "--congruence",
            "blocks"
        ])),
        2
    );
    assert_eq!(
        code(&run(&["analyze", "--input", &input, "--test", "tippett"])),
        2
    );
    let missing = w.path("absent.csv");
    assert_eq!(
        code(&run(&["analyze", "--input", missing.to_str().unwrap()])),
        2
    );
    let bad = w.file("bad.csv", "name,value\na,0.1\n");
    let out = run(&["analyze", "--input", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("header"));
    let bad = w.file("bad.csv", "id,p\na,0.1\nb,x\n");
    let out = run(&["analyze", "--input", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
}

#[test]
fn capacity_and_incompatible_flags() {
    let w = Workdir::new();
    let p: Vec<f64> = (0..21).map(|i| 0.001 * (i + 1) as f64).collect();
    let big = w.file("big.csv", &family_csv(&p));
    assert_eq!(code(&run(&["analyze", "--input", &big, "--shortlist"])), 3);
    assert_eq!(
        code(&run(&["analyze", "--input", &big, "--engine", "exact"])),
        3
    );
    // 21 = 7 * 6 / 2 pairwise comparisons among 7 groups.
    assert_eq!(
        code(&run(&[
            "analyze",
            "--input",
            &big,
            "--congruence",
            "pairwise:7"
        ])),
        4
    );
    assert_eq!(code(&run(&["analyze", "--input", &big])), 0);

    let small = w.file("small.csv", GENES);
    let args = ["analyze", "--input", &small, "--engine", "shortcut"];
    assert_eq!(
        code(&run(&[&args[..], &["--congruence", "pairwise:3"]].concat())),
        4
    );
    assert_eq!(code(&run(&[&args[..], &["--shortlist"]].concat())), 4);
    assert_eq!(
        code(&run(&[
            "analyze",
            "--input",
            &small,
            "--shortlist",
            "--exact-cap",
            "2"
        ])),
        3
    );
}

#[test]
fn congruence_strengthens_bound() {
    let w = Workdir::new();
    let input = w.file("c.csv", "id,p\na,0.01\nb,0.6\nc,0.6\n");
    let base = ["analyze", "--input", &input, "--test", "bonferroni"];
    let plain = json(&run(&[&base[..], &["--engine", "exact"]].concat()));
    let restricted = json(&run(&[&base[..], &["--congruence", "pairwise:3"]].concat()));
    assert_eq!(plain["sets"][0]["f"], 1);
    assert_eq!(restricted["sets"][0]["f"], 2);
    assert_eq!(restricted["engine"], "exact");
    assert_eq!(restricted["congruence"], "pairwise:3");
}

#[test]
fn reports_are_byte_identical() {
    let w = Workdir::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p: Vec<f64> = (0..14).map(|_| rng.random::<f64>() * 0.2).collect();
    let input = w.file("r.csv", &family_csv(&p));
    let args = [
        "analyze",
        "--input",
        &input,
        "--test",
        "fisher",
        "--shortlist",
        "--pc",
        "2",
    ];
    let a = run(&args);
    let b = bin()
        .args(args)
        .env("MTCHERRY_THREADS", "1")
        .output()
        .unwrap();
    let c = bin()
        .args(args)
        .env("MTCHERRY_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);

    let out = w.path("report.json");
    let out = out.to_str().unwrap();
    assert_eq!(code(&run(&[&args[..], &["--out", out]].concat())), 0);
    assert_eq!(fs::read(out).unwrap(), a.stdout);
}

#[test]
fn invalid_thread_setting_exits_2() {
    let w = Workdir::new();
    let input = w.file("genes.csv", GENES);
    let out = bin()
        .args(["analyze", "--input", &input])
        .env("MTCHERRY_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn engines_agree_on_small_families() {
    let w = Workdir::new();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..40 {
        let n = rng.random_range(2..=12);
        let p: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                if rng.random_bool(0.5) {
                    u * 0.05
                } else {
                    u
                }
            })
            .collect();
        let input = w.file("e.csv", &family_csv(&p));
        let set: Vec<String> = (1..=n)
            .filter(|_| rng.random_bool(0.6))
            .map(|i| format!("h{i}"))
            .collect();
        let set = set.join(",");
        let test = ["bonferroni", "simes", "fisher"][case % 3];
        let alpha = ["0.01", "0.05", "0.2"][(case / 3) % 3];
        let run_with = |engine: &str| {
            let mut args = vec![
                "analyze", "--input", &input, "--test", test, "--alpha", alpha,
            ];
            args.extend(["--engine", engine]);
            if !set.is_empty() {
                args.extend(["--set", &set]);
            }
            json(&run(&args))
        };
        let exact = run_with("exact");
        let fast = run_with("shortcut");
        for key in ["t", "f"] {
            assert_eq!(
                exact["sets"][0][key], fast["sets"][0][key],
                "case {case}: {p:?} {set}"
            );
        }
        assert_eq!(
            exact["sets"][0]["profile"]["t_alpha"],
            fast["sets"][0]["profile"]["t_alpha"]
        );
    }
}

#[test]
fn profile_csv_and_svg() {
    let w = Workdir::new();
    let input = w.file("genes.csv", GENES);
    let out = run(&["profile", "--input", &input, "--test", "bonferroni"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "value,mass,cumulative\n0,0.7,0.7\n1,0.26,0.96\n2,0.01,0.97\n3,0.03,1\n"
    );

    let csv = w.path("pmf.csv");
    let svg = w.path("pmf.svg");
    let out = run(&[
        "profile",
        "--input",
        &input,
        "--test",
        "bonferroni",
        "--set",
        "g1,g2,g3",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("t_0.05 = 1"));
    assert!(fs::read_to_string(&csv)
        .unwrap()
        .starts_with("value,mass,cumulative\n"));
    check_svg(&svg, 4);
}

fn check_svg(path: &Path, bars: usize) {
    let text = fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("viewBox"), Some("0 0 800 500"));
    let rects = root
        .descendants()
        .filter(|n| n.has_tag_name("rect") && n.attribute("class") == Some("bar"))
        .count();
    assert_eq!(rects, bars);
    assert!(!text.to_lowercase().contains("posterior"));
}

#[test]
fn profile_subset_svg_bar_count() {
    let w = Workdir::new();
    let input = w.file("f.csv", &family_csv(&[0.001, 0.2, 0.03, 0.5, 0.004, 0.9]));
    let svg = w.path("s.svg");
    let out = run(&[
        "profile",
        "--input",
        &input,
        "--set",
        "h1,h3,h5,h6",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    check_svg(&svg, 5);
    assert_eq!(
        code(&run(&["profile", "--input", &input, "--set", "h7"])),
        2
    );
}

#[test]
fn simulate_outputs() {
    let args = [
        "simulate",
        "--m",
        "8",
        "--sparse",
        "2",
        "--mu",
        "5",
        "--reps",
        "100",
        "--seed",
        "1",
        "--tests",
        "simes,fisher",
    ];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,test,power,se,reps,seed");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let power: f64 = fields[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&power), "{line}");
        assert_eq!(fields[4], "100");
        assert_eq!(fields[5], "1");
    }
    let b = bin()
        .args(args)
        .env("MTCHERRY_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);

    let w = Workdir::new();
    let out = w.path("power.csv");
    let c = run(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(code(&c), 0);
    assert_eq!(fs::read(&out).unwrap(), a.stdout);
    assert!(String::from_utf8_lossy(&c.stdout).contains("violation"));
}

#[test]
fn simulate_invalid_config_exits_2() {
    assert_eq!(code(&run(&["simulate", "--m", "8", "--sparse", "9"])), 2);
    assert_eq!(code(&run(&["simulate", "--m", "8", "--reps", "0"])), 2);
    assert_eq!(code(&run(&["simulate", "--m", "8", "--mu", "-1"])), 2);
}

#[test]
fn oracle_reports_defining_sets() {
    let w = Workdir::new();
    let input = w.file("genes.csv", GENES);
    let report = json(&run(&["oracle", "--input", &input, "--test", "bonferroni"]));
    assert_eq!(
        label_lists(&report["defining_sets"]),
        vec![vec!["g1"], vec!["g2"]]
    );
    assert!(report.get("table").is_none());

    let report = json(&run(&[
        "oracle",
        "--input",
        &input,
        "--test",
        "bonferroni",
        "--table",
    ]));
    let table = report["table"].as_array().unwrap();
    assert_eq!(table.len(), 7);
    let full = table.last().unwrap();
    assert_eq!(full["local_p"], 0.03);
    assert_eq!(full["rejected"], true);

    let ones = w.file("ones.csv", &family_csv(&[1.0; 3]));
    let report = json(&run(&["oracle", "--input", &ones]));
    assert!(report["defining_sets"].as_array().unwrap().is_empty());

    let p: Vec<f64> = (0..21).map(|i| 0.01 * (i + 1) as f64).collect();
    let big = w.file("big.csv", &family_csv(&p));
    assert_eq!(code(&run(&["oracle", "--input", &big])), 3);
}
