use std::process::{Command, Output};

fn qinvert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinvert")).args(args).output().expect("qinvert runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn exact_coefficients_as_json() {
    let o = qinvert(&["coeffs", "--phi", "catalan", "--mode", "exact", "-N", "10", "--json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["results"][0]["t"][3]["terms"], serde_json::json!([[0, "1/1"], [1, "1/1"], [2, "2/1"], [3, "1/1"]]));
    assert_eq!(doc["config"]["N"], 10);
    assert!(doc["versions"]["qinvert"].is_string());
    assert!(doc["config"].get("jobs").is_none());
}

#[test]
fn order_zero_gives_only_t0() {
    let o = qinvert(&["coeffs", "--phi", "catalan", "-N", "0", "--json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["results"][0]["t"], serde_json::json!([{ "terms": [[0, "1/1"]] }]));
}

#[test]
fn renewal_sequence_shows_at_q0() {
    let o = qinvert(&["coeffs", "--phi", "explicit:1/2,1/2", "-N", "5", "--csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,g_n,t_n,eps_n"));
    // τ = 1, 1/2, 3/4, 5/8, 11/16, 21/32
    let t0: Vec<String> = lines
        .take(6)
        .map(|l| l.split(',').nth(2).unwrap().split(" + ").next().unwrap().to_string())
        .collect();
    assert_eq!(t0, ["1", "1/2", "3/4", "5/8", "11/16", "21/32"]);
}

#[test]
fn exit_codes() {
    let o = qinvert(&["asymptotics", "--phi", "catalan", "--q", "1.0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("InvalidQ"));

    let o = qinvert(&["coeffs", "--phi", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));

    let o = qinvert(&["coeffs", "--phi", "exponential:1", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NotExact"));

    let o = qinvert(&["formal", "--f", "z - 3/2 z^2 + 1/2 z^3", "--q", "1/2", "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("DivisionByZero"));

    let o = qinvert(&["qbig", "--phi", "catalan", "--q", "1:2:0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn summaries_go_to_stderr() {
    let o = qinvert(&["asymptotics", "--phi", "catalan", "--q", "0.5", "-N", "60", "--csv"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("L=3.46274661945505"));
    assert!(stdout(&o).starts_with("q,n,a_n,L,abs_dev\n1/2,1,"));

    let o = qinvert(&["tuples", "--n", "5", "--i", "3"]);
    assert!(stderr(&o).contains("min L = 0 at (5,0,0)"));

    let o = qinvert(&["formal", "--f", "z-z^2", "--q", "1/2", "--kappa", "1", "-N", "8"]);
    assert!(stderr(&o).contains("kappa=1/1: residual vanishes to order 8"));
}

#[test]
fn grid_cells_stay_in_order() {
    let o = qinvert(&["qbig", "--phi", "catalan", "--q", "3/2:3:1/2", "-N", "20", "--csv", "--jobs", "3"]);
    assert!(o.status.success());
    let qs: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    let mut dedup = qs.clone();
    dedup.dedup();
    assert_eq!(dedup, ["3/2", "2/1", "5/2", "3/1"]);
}

#[test]
fn config_file_and_out_path() {
    let dir = std::env::temp_dir().join(format!("qinvert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    let out = dir.join("out.csv");
    std::fs::write(&cfg, format!("phi = \"catalan\"\nq = \"2\"\nN = 20\noutput = \"csv\"\nout = {:?}\n", out)).unwrap();
    let o = qinvert(&["qbig", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("q,n,g_n,g_n_eta_n\n2/1,1,"));
    std::fs::remove_dir_all(dir).unwrap();
}
