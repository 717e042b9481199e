use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nhood(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhood")).args(args).output().unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = nhood(&["validate", &data("trace_x.txt")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(
        stdout(&ok).trim(),
        "4 nodes, 3 intervals, horizon 200, mean contact duration 93.333"
    );

    let bad = nhood(&["validate", &write(dir.path(), "self.txt", "1 1 0 5\n")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 1"));

    let empty = nhood(&["validate", &write(dir.path(), "empty.txt", "")]);
    assert_eq!(empty.status.code(), Some(0));

    assert_eq!(nhood(&["validate", "/nonexistent/trace"]).status.code(), Some(2));
    assert_eq!(nhood(&["bogus"]).status.code(), Some(1));
    assert_eq!(nhood(&["--help"]).status.code(), Some(0));
}

#[test]
fn events_format_flag() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "ev.txt", "50 CONN 1 2 up\n150 CONN 1 2 down\n");
    let o = nhood(&["validate", "--format", "events", &p]);
    assert_eq!(
        stdout(&o).trim(),
        "2 nodes, 1 intervals, horizon 150, mean contact duration 100.000"
    );
    assert_eq!(nhood(&["validate", "--format", "xml", &p]).status.code(), Some(1));
}

#[test]
fn gen_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| -> String {
        let out = dir.path().join(name);
        let args = [
            "gen",
            "rwp",
            "--nodes",
            "6",
            "--duration",
            "300",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ];
        assert!(nhood(&args).status.success());
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("5", "a.txt");
    assert_eq!(a, run("5", "b.txt"));
    assert_ne!(a, run("6", "c.txt"));
    assert!(a.starts_with("# nhood gen rwp seed=5 nodes=6 "));
    assert!(nhood(&["validate", dir.path().join("a.txt").to_str().unwrap()])
        .status
        .success());
    assert_eq!(nhood(&["gen", "levy"]).status.code(), Some(1));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gen.conf", "nodes = 3\nduration = 100\nseed = 2\n");
    let o = nhood(&["gen", "rwp", "--config", &cfg]);
    assert!(stdout(&o).starts_with("# nhood gen rwp seed=2 nodes=3 "));
    let o = nhood(&["gen", "rwp", "--config", &cfg, "--nodes", "4"]);
    assert!(stdout(&o).starts_with("# nhood gen rwp seed=2 nodes=4 "));
    let bad = write(dir.path(), "bad.conf", "nodes = many\n");
    assert_eq!(nhood(&["gen", "rwp", "--config", &bad]).status.code(), Some(1));
}

#[test]
fn analyze_trace_x() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = nhood(&["analyze", &data("trace_x.txt"), "--tmax", "3", "--out", out]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("vicinity_only: 2 pairs"));

    let classes = read_csv(&dir.path().join("pair_classes.csv"));
    let rows: Vec<Vec<&str>> = classes.iter().map(|r| r.iter().collect()).collect();
    assert!(rows.contains(&vec!["2", "4", "vicinity_only", "2"]));
    assert!(rows.contains(&vec!["1", "4", "never_connected", "inf"]));
    let sizes = read_csv(&dir.path().join("neigh_size_by_T.csv"));
    assert_eq!(sizes.len(), 3);
    assert_eq!(sizes[0][1].parse::<f64>().unwrap(), 0.7);

    let lonely = write(dir.path(), "one.txt", "%horizon 10\n");
    let o = nhood(&["analyze", &lonely]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace with < 2 nodes"));
}

fn simulate_into(dir: &Path, extra: &[&str]) -> PathBuf {
    let mut args = vec!["simulate", "--out", dir.to_str().unwrap()];
    let trace = data("trace_x.txt");
    args.push(&trace);
    args.extend_from_slice(extra);
    let o = nhood(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    dir.to_path_buf()
}

#[test]
fn simulate_outputs_and_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    simulate_into(a.path(), &["--t-values", "1-3", "--seed", "4"]);
    simulate_into(b.path(), &["--t-values", "1-3", "--seed", "4"]);
    for f in [
        "waiting_by_T.csv",
        "neigh_size_by_T.csv",
        "pair_classes.csv",
        "overhead_by_T.csv",
        "messages.csv",
    ] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let waiting = read_csv(&a.path().join("waiting_by_T.csv"));
    assert_eq!(waiting.len(), 3);
    let messages = read_csv(&a.path().join("messages.csv"));
    assert_eq!(messages.len(), 6 * 10 * 3);
    let manifest = std::fs::read_to_string(a.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("seed = 4"));
    assert!(manifest.contains("input_sha256 = "));
}

#[test]
fn simulate_fixed_creation_time() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(
        dir.path(),
        &[
            "--t-values",
            "1,2",
            "--messages-per-pair",
            "1",
            "--t0",
            "0",
            "--strategy",
            "none",
        ],
    );
    let rows = read_csv(&dir.path().join("waiting_by_T.csv"));
    assert_eq!((&rows[0][1], &rows[1][1]), ("3", "5"));
    let overhead = read_csv(&dir.path().join("overhead_by_T.csv"));
    assert_eq!(&overhead[0][1], "0");
}

#[test]
fn simulate_rejects_bad_options() {
    let trace = data("trace_x.txt");
    assert_eq!(nhood(&["simulate", &trace, "--t-values", "0-2"]).status.code(), Some(1));
    assert_eq!(
        nhood(&["simulate", &trace, "--strategy", "psychic"]).status.code(),
        Some(1)
    );
    assert_eq!(nhood(&["simulate", &trace, "--ttl", "soon"]).status.code(), Some(1));
}

#[test]
fn overhead_cs_on_square() {
    let o = nhood(&[
        "overhead",
        &data("square.txt"),
        "--strategy",
        "cs",
        "--t",
        "2",
        "--node",
        "1",
        "--window-end",
        "60",
    ]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "node,strategy,T,time,probe_cost,cumulative\n1,cs,2,0,6,6\n1,cs,2,30,6,12\n1,cs,2,60,6,18\n"
    );
}

#[test]
fn overhead_ts_on_trace_x() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "overhead",
        &data("trace_x.txt"),
        "--strategy",
        "ts",
        "--t",
        "2",
        "--pairs",
        "1:3",
        "--out",
    ];
    let o = nhood(&[&args[..], &[dir.path().to_str().unwrap()]].concat());
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("delivered waiting 60"));
    let rows = read_csv(&dir.path().join("ledger.csv"));
    let times: Vec<&str> = rows.iter().map(|r| r.get(3).unwrap()).collect();
    assert_eq!(times, ["0", "30", "60"]);
    assert_eq!(rows.last().unwrap().get(5), Some("10"));
}

#[test]
fn overhead_bad_node() {
    let o = nhood(&["overhead", &data("trace_x.txt"), "--node", "9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = nhood(&["overhead", &data("trace_x.txt"), "--pairs", "1-3", "--strategy", "ts"]);
    assert_eq!(o.status.code(), Some(1));
}
