use std::path::Path;
use std::process::{Command, Output};

fn distopf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distopf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn generate(dir: &Path, topo: &str, n: usize, seed: u64) -> String {
    let path = dir.join(format!("{topo}-{n}-{seed}.json"));
    let p = path.to_str().unwrap().to_owned();
    let o = distopf(&["generate", topo, &n.to_string(), "--seed", &seed.to_string(), "--out", &p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn generate_line_and_fattree_diameters() {
    let dir = tempfile::tempdir().unwrap();
    for (topo, want) in [("line", 49), ("fattree", 2)] {
        let p = generate(dir.path(), topo, 50, 7);
        let net = distopf::load_network(&std::fs::read(p).unwrap()).unwrap();
        assert_eq!(distopf::diameter(&net), want);
    }
}

#[test]
fn generate_is_byte_deterministic() {
    let a = distopf(&["generate", "random", "30", "--seed", "4"]);
    let b = distopf(&["generate", "random", "30", "--seed", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn generate_rejects_bad_size() {
    assert_eq!(code(&distopf(&["generate", "line", "1"])), 1);
}

#[test]
fn solve_line_10_converges_and_trace_matches_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let net = generate(dir.path(), "line", 10, 0);
    let trace = dir.path().join("trace.csv");
    let out = dir.path().join("sol.json");
    let o = distopf(&[
        "solve",
        &net,
        "--parallelism",
        "2",
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,r,s,objective"));
    let rows = lines.count();
    let sol: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(sol["iterations"].as_u64().unwrap() as usize, rows);
    assert_eq!(sol["status"], "Converged");
    assert_eq!(sol["buses"].as_array().unwrap().len(), 10);
    let stderr = String::from_utf8_lossy(&o.stderr);
    for key in ["iterations", "objective", "exactness gap", "flow residual"] {
        assert!(stderr.contains(key), "missing {key}: {stderr}");
    }
}

#[test]
fn solve_with_one_iteration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let net = generate(dir.path(), "fattree", 8, 0);
    let trace = dir.path().join("t.csv");
    let o = distopf(&["solve", &net, "--max-iters", "1", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 2);
}

#[test]
fn solve_trace_is_identical_across_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let net = generate(dir.path(), "random", 25, 3);
    let mut traces = Vec::new();
    for p in ["1", "4", "8"] {
        let t = dir.path().join(format!("t{p}.csv"));
        let o = distopf(&["solve", &net, "--parallelism", p, "--max-iters", "300", "--trace", t.to_str().unwrap()]);
        assert!(matches!(code(&o), 0 | 2));
        traces.push(std::fs::read(t).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
    assert_eq!(traces[0], traces[2]);
}

#[test]
fn solve_malformed_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, b"{\"version\": 1, \"buses\": [").unwrap();
    assert_eq!(code(&distopf(&["solve", p.to_str().unwrap()])), 1);
    assert_eq!(code(&distopf(&["solve", "/nonexistent/net.json"])), 1);
}

#[test]
fn bad_flags_exit_1() {
    assert_eq!(code(&distopf(&["solve"])), 1);
    assert_eq!(code(&distopf(&["frobnicate"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let net = generate(dir.path(), "line", 3, 0);
    assert_eq!(code(&distopf(&["solve", &net, "--rho", "-1"])), 1);
}

#[test]
fn kernel_check_passes_and_is_vacuous_at_zero() {
    let o = distopf(&["kernel-check", "--count", "200", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&distopf(&["kernel-check", "--count", "0"])), 0);
}

#[test]
fn kernel_check_catches_broken_kernel() {
    let o = distopf(&["kernel-check", "--count", "50", "--inject-fault", "disk"]);
    assert_eq!(code(&o), 3);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("first failure") && out.contains("DiskQp"), "{out}");
}

#[test]
fn bench_single_sample() {
    let o = distopf(&["bench", "--count", "1"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    for k in ["solve_eq_qp", "solve_cone_box_qp", "solve_disk_qp"] {
        assert!(out.contains(k));
    }
}
