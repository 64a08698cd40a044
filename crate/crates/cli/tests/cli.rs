use std::path::PathBuf;
use std::process::{Command, Output};

fn semiwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiwave")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("semiwave-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exponent_table_for_the_comparison_triple() {
    let out = semiwave(&["exponent", "--p", "2", "--q", "2", "--r", "6", "--family", "dipole"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split('\t').collect();
    assert_eq!(cols[4], "combined");
    assert_eq!(cols[5], format!("{:.6}", 20.0 / 7.0));
    assert_eq!(cols[6], "2.500000");
    assert_eq!(cols[7], format!("{:.6}", 5.0 / 14.0));
}

#[test]
fn family_table_has_positive_gaps() {
    for m in 2..=5 {
        let (p, r) = (m.to_string(), (2 * m + 1).to_string());
        let out = semiwave(&["exponent", "--p", &p, "--q", &p, "--r", &r, "--family", "dipole"]);
        let text = stdout(&out);
        let gap: f64 = text.lines().nth(1).unwrap().split('\t').nth(7).unwrap().parse().unwrap();
        assert!(gap > 0.0, "m = {m}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(semiwave(&["exponent", "--p", "2", "--q", "0.5"]).status.code(), Some(2));
    assert_eq!(semiwave(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(semiwave(&["sweep", "--eps-count", "3"]).status.code(), Some(2));
    assert_eq!(semiwave(&["sweep", "--eps-ratio", "1.5"]).status.code(), Some(2));
    assert_eq!(semiwave(&["simulate", "--family", "square"]).status.code(), Some(2));
    assert_eq!(semiwave(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_huygens_writes_report() {
    let dir = scratch("verify");
    let out = semiwave(&["verify", "huygens", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("verify.csv")).unwrap();
    assert!(csv.starts_with("suite,check,value,relation,bound,pass"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_file_with_command_line_override() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# linear evolution\np = 2\nq = 2\nr = 3\nA = 0\nB = 0\nfamily = bump\nt-max = 5\n").unwrap();
    let out = semiwave(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--t-max",
        "1",
        "--dx",
        "0.1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("no crossing"));
    let stats = std::fs::read_to_string(dir.join("stats.csv")).unwrap();
    // t-max from the command line wins: 10 steps of 0.1 plus the header and t = 0.
    assert_eq!(stats.lines().count(), 12);
    let field = std::fs::read_to_string(dir.join("field.csv")).unwrap();
    assert!(field.lines().any(|l| l == "x,t,u,w"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(semiwave(&["exponent", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn picard_trace_and_divergence_exit_code() {
    let dir = scratch("picard");
    let d = dir.to_str().unwrap();
    let ok = semiwave(&["picard", "--family", "dipole", "--eps", "0.1", "--t-max", "2", "--dx", "0.1", "--out", d]);
    assert_eq!(ok.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("picard.csv")).unwrap();
    assert!(csv.contains("# scheme = zero-mean") && csv.contains("j,d_j,rho_j,n1,n2,n3,n4"));
    let bad = semiwave(&["picard", "--family", "bump", "--eps", "3", "--t-max", "6", "--dx", "0.1", "--out", d]);
    assert_eq!(bad.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sweep_writes_all_outputs() {
    let dir = scratch("sweep");
    let out = semiwave(&[
        "sweep",
        "--p",
        "1.5",
        "--q",
        "1.5",
        "--A",
        "1",
        "--B",
        "0",
        "--eps-max",
        "0.5",
        "--eps-count",
        "5",
        "--dx",
        "0.05",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "eps,dx,T_num,refined_T_num,rel_change,accepted");
    assert_eq!(csv.lines().count(), 6);
    let fit = std::fs::read_to_string(dir.join("fit.txt")).unwrap();
    for key in ["slope", "stderr", "k_theory", "rel_err"] {
        assert!(fit.lines().any(|l| l.starts_with(&format!("{key} = "))), "{key}");
    }
    let plot = std::fs::read_to_string(dir.join("plot.dat")).unwrap();
    assert_eq!(plot.lines().filter(|l| !l.starts_with('#')).count(), 5);
    let _ = std::fs::remove_dir_all(&dir);
}
