use ccq::cli::{run, CliError};
use ccq::datagen::{random_signed_graph, read_clustering, read_graph, write_graph};
use ccq::exact::{solve_exact, ExactConfig};
use std::path::Path;
use std::process::Command;

fn ccq(args: &[&str]) -> Result<String, CliError> {
    let mut out = Vec::new();
    let argv = std::iter::once("ccq").chain(args.iter().copied());
    run(argv, &mut out).map(|()| String::from_utf8(out).unwrap())
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ccq"))
        .args(args)
        .env_remove("CCQ_SEED")
        .output()
        .unwrap()
}

fn field(line: &str, key: &str) -> String {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
        .to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        ccq(&[
            "generate",
            "--family",
            "S",
            "--noise",
            "II",
            "--L",
            "100",
            "--seed",
            "7",
            "--out",
            p(out),
        ])
        .unwrap();
    }
    for ext in ["graph", "truth"] {
        let x = std::fs::read(a.with_extension(ext)).unwrap();
        let y = std::fs::read(b.with_extension(ext)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{ext}");
    }
    let c = dir.path().join("c");
    ccq(&[
        "generate",
        "--family",
        "S",
        "--noise",
        "II",
        "--L",
        "100",
        "--seed",
        "8",
        "--out",
        p(&c),
    ])
    .unwrap();
    assert_ne!(
        std::fs::read(a.with_extension("graph")).unwrap(),
        std::fs::read(c.with_extension("graph")).unwrap()
    );
}

#[test]
fn generate_large_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("big");
    ccq(&[
        "generate",
        "--family",
        "sqrtn",
        "--n",
        "900",
        "--noise",
        "III",
        "--seed",
        "1",
        "--out",
        p(&out),
    ])
    .unwrap();
    assert_eq!(read_graph(out.with_extension("graph")).unwrap().n(), 900);
    assert_eq!(
        read_clustering(out.with_extension("truth")).unwrap().n(),
        900
    );
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run_with = |name: &str, env: Option<&str>, flag: Option<&str>| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ccq"));
        cmd.args([
            "generate",
            "--family",
            "N",
            "--noise",
            "I",
            "--out",
            p(&out),
        ]);
        cmd.env_remove("CCQ_SEED");
        if let Some(s) = env {
            cmd.env("CCQ_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.status().unwrap().success());
        std::fs::read(out.with_extension("graph")).unwrap()
    };
    assert_eq!(
        run_with("env", Some("5"), None),
        run_with("flag", None, Some("5"))
    );
    assert_ne!(
        run_with("env", Some("5"), None),
        run_with("zero", None, None)
    );
}

#[test]
fn exit_codes() {
    let bad = bin(&["generate", "--family", "Q"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        bin(&["solve", "--graph", "/nonexistent.graph"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn query_pivot_with_opt_matches_exact() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("s");
    ccq(&[
        "generate",
        "--family",
        "S",
        "--noise",
        "II",
        "--seed",
        "7",
        "--out",
        p(&inst),
    ])
    .unwrap();
    let graph = inst.with_extension("graph");
    let qp = ccq(&[
        "solve",
        "--graph",
        p(&graph),
        "--alg",
        "qp",
        "--oracle",
        "opt",
    ])
    .unwrap();
    let exact = ccq(&[
        "solve",
        "--graph",
        p(&graph),
        "--alg",
        "exact",
        "--oracle",
        "opt",
    ])
    .unwrap();
    assert_eq!(field(&qp, "mistakes"), field(&exact, "mistakes"));
    let cost: u64 = field(&exact, "mistakes").parse().unwrap();
    assert!(field(&qp, "queries").parse::<u64>().unwrap() <= 2 * cost);
    assert_eq!(field(&qp, "instance"), "s");
}

#[test]
fn rqp_with_p_zero_never_queries() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("n");
    ccq(&[
        "generate",
        "--family",
        "N",
        "--noise",
        "I",
        "--seed",
        "3",
        "--out",
        p(&inst),
    ])
    .unwrap();
    let truth = inst.with_extension("truth");
    let clustering = dir.path().join("out.truth");
    let line = ccq(&[
        "solve",
        "--graph",
        p(&inst.with_extension("graph")),
        "--alg",
        "rqp",
        "--p",
        "0",
        "--oracle",
        "truth",
        "--truth",
        p(&truth),
        "--seed",
        "11",
        "--out",
        p(&clustering),
    ])
    .unwrap();
    assert_eq!(field(&line, "queries"), "0");
    assert_eq!(field(&line, "seed"), "11");
    assert!(read_clustering(&clustering).unwrap().is_canonical());
}

#[test]
fn solve_rejects_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("n");
    ccq(&["generate", "--family", "N", "--out", p(&inst)]).unwrap();
    let g = inst.with_extension("graph");
    for args in [
        vec!["solve", "--graph", p(&g), "--alg", "rqp", "--p", "1.5"],
        vec!["solve", "--graph", p(&g), "--oracle", "truth"],
        vec![
            "solve",
            "--graph",
            p(&g),
            "--oracle",
            "noisy",
            "--truth",
            p(&inst.with_extension("truth")),
            "--votes",
            "4",
        ],
        vec!["solve", "--graph", p(&g), "--alg", "bbc"],
    ] {
        assert!(matches!(ccq(&args), Err(CliError::Usage(_))), "{args:?}");
    }
}

#[test]
fn exact_beyond_budget_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("r60.graph");
    write_graph(&random_signed_graph(60, 0.5, 1), &g).unwrap();
    let out = bin(&[
        "solve",
        "--graph",
        p(&g),
        "--alg",
        "exact",
        "--budget",
        "20000",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

fn strip_timing(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let skip: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.contains("elapsed"))
        .map(|(i, _)| i)
        .collect();
    std::iter::once(header.join(","))
        .chain(lines.map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| !skip.contains(i))
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        }))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn experiment_replays_and_has_a_stable_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.conf");
    std::fs::write(
        &config,
        "family = N, D\nnoise = I, II\ninstances = 2\nalgorithms = qp, rqp:0.5, acn\n\
         oracle = truth\ntrials = 2\nseed = 9\n",
    )
    .unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ccq(&["experiment", p(&config), "--out", p(&a)]).unwrap();
    ccq(&["experiment", p(&config), "--out", p(&b)]).unwrap();
    let (a_csv, b_csv) = (
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap(),
    );
    assert_eq!(strip_timing(&a_csv), strip_timing(&b_csv));
    assert_eq!(
        a_csv.lines().next().unwrap(),
        "instance_id,family,noise,algorithm,params,oracle,trial_seed,mistakes,queries,elapsed_ms,error"
    );
    // 2 families x 2 noises x 2 instances x (1 qp + 2 rqp + 2 acn)
    assert_eq!(a_csv.lines().count(), 1 + 8 * 5);
    let summary = std::fs::read_to_string(dir.path().join("a.summary.csv")).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "family,noise,algorithm,params,oracle,runs,mean_mistakes,mean_queries,mean_elapsed_ms"
    );
    assert_eq!(
        strip_timing(&summary),
        strip_timing(&std::fs::read_to_string(dir.path().join("b.summary.csv")).unwrap())
    );

    let stdout = ccq(&["experiment", p(&config), "--out", "-"]).unwrap();
    let (csv, rest) = stdout.split_once("\n\n").unwrap();
    assert_eq!(strip_timing(csv), strip_timing(&a_csv));
    assert!(rest.starts_with("family,"));
}

#[test]
fn empty_algorithm_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    std::fs::write(&config, "family = N\nalgorithms =\n").unwrap();
    assert!(matches!(
        ccq(&["experiment", p(&config)]),
        Err(CliError::Usage(_))
    ));
    assert_eq!(bin(&["experiment", p(&config)]).status.code(), Some(1));
}

#[test]
fn mistakes_follow_the_oracle_regime() {
    // a (+,+,-) triangle: the lex-min optimum merges all three, the truth
    // splits off vertex 1
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.graph"), "3 2\n0 1 +\n0 2 +\n").unwrap();
    std::fs::write(dir.path().join("g.truth"), "0 0\n1 1\n2 0\n").unwrap();
    let opt = solve_exact(
        &read_graph(dir.path().join("g.graph")).unwrap(),
        &ExactConfig::default(),
    )
    .unwrap();
    assert_eq!((opt.cost, opt.clustering.assignment()), (1, &[0, 0, 0][..]));
    let config = dir.path().join("fixture.conf");
    let csv_for = |oracle: &str| {
        std::fs::write(
            &config,
            format!("graph = g.graph\ntruth = g.truth\nalgorithms = qp, exact\noracle = {oracle}\ntrials = 1\n"),
        )
        .unwrap();
        let out = ccq(&["experiment", p(&config), "--out", "-"]).unwrap();
        let csv = out.split_once("\n\n").unwrap().0.to_string();
        csv.lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[3].to_string(), f[7].parse::<u64>().unwrap())
            })
            .collect::<Vec<_>>()
    };
    // against the graph: both reach the optimum of one disagreement
    assert_eq!(csv_for("opt"), vec![("qp".into(), 1), ("exact".into(), 1)]);
    // against the truth: qp follows the truth oracle, exact is two pairs off
    assert_eq!(
        csv_for("truth"),
        vec![("qp".into(), 0), ("exact".into(), 2)]
    );
}
