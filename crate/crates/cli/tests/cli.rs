use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_specrank");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn specrank")
}

fn write(path: &Path, body: &str) {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).unwrap();
    }
    fs::write(path, body).unwrap();
}

fn sine_csv(len: usize, freq: f64, phase: f64) -> String {
    (0..len).map(|i| format!("{}\n", (2.0 * std::f64::consts::PI * freq * i as f64 + phase).sin())).collect()
}

#[test]
fn analyze_four_samples_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.csv");
    write(&input, "1\n2\n3\n4\n");
    let out = run(&["analyze", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // power spectrum [100, 8]: already in grid order, both bins retained
    assert_eq!(v["n"], 2);
    assert_eq!(v["l_used"], 2);
    assert_eq!(v["cid"], 1.0);
    assert_eq!(v["cod"], 0.0);
    let p0 = 100.0 / 108.0;
    let p1 = 8.0 / 108.0;
    let h = -(p0 * f64::ln(p0) + p1 * f64::ln(p1));
    assert!((v["spectral_entropy"].as_f64().unwrap() - h).abs() < 1e-12);
}

#[test]
fn analyze_eigenvalues_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.csv");
    write(&input, &sine_csv(32, 0.1, 0.3));
    let out = run(&["analyze", input.to_str().unwrap(), "--eigen"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eig = v["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 16);
    let sum: f64 = eig.iter().map(|e| e.as_f64().unwrap()).sum();
    assert!(sum.abs() < 1e-8 * 16.0);

    let out = run(&["analyze", input.to_str().unwrap(), "--format", "csv", "--q", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("input,samples,n,cid,cod,spectral_entropy,l_used,q_used\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn odd_length_input_is_truncated_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("odd.csv");
    write(&input, "1\n2\n3\n4\n5\n");
    let out = run(&["analyze", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd length"));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["samples"], 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("g.csv");
    write(&good, "1\n2\n3\n4\n");
    let bad = dir.path().join("b.csv");
    write(&bad, "1\nabc\n");
    let zero = dir.path().join("z.csv");
    write(&zero, "0\n0\n0\n0\n");

    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["analyze"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", good.to_str().unwrap(), "--q", "1.5"]).status.code(), Some(1));
    assert_eq!(
        run(&["analyze", good.to_str().unwrap(), "--rank-direction", "asc", "--q", "0.5"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["monitor", good.to_str().unwrap(), "--window", "3"]).status.code(), Some(1));

    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(run(&["analyze", dir.path().join("missing.csv").to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(run(&["analyze", zero.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn nulldist_writes_summary_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("null.json");
    let out = run(&["nulldist", "--n", "4", "--descriptor", "cod", "--exact", "--output", summary.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&summary).unwrap()).unwrap();
    assert_eq!(v["trials"], 24);
    assert!((v["mean"].as_f64().unwrap() - 1.25).abs() < 1e-12);
    let hist = fs::read_to_string(dir.path().join("null.histogram.csv")).unwrap();
    assert!(hist.starts_with("bin_lower,bin_upper,count\n"));
    let total: u64 = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 24);
}

#[test]
fn nulldist_is_reproducible() {
    let args = ["nulldist", "--n", "32", "--trials", "20000", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["nulldist", "--n", "32", "--trials", "20000", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn monitor_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("m.csv");
    write(&input, &sine_csv(40, 0.05, 0.0));
    let out = run(&["monitor", input.to_str().unwrap(), "--window", "16", "--step", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "start_index,cid,cod,entropy,local_energy,combined_cid,combined_cod");
    // frames start at 0, 4, ..., 24
    assert_eq!(lines.count(), 7);
}

fn compare_layout(root: &Path, groups: &[&str]) {
    for (gi, g) in groups.iter().enumerate() {
        for f in 0..4 {
            let freq = 0.03 + 0.15 * gi as f64;
            write(&root.join(g).join(format!("s{f}.csv")), &sine_csv(64, freq, f as f64 * 0.7));
        }
    }
}

#[test]
fn compare_two_groups() {
    let dir = tempfile::tempdir().unwrap();
    compare_layout(dir.path(), &["low", "high"]);
    write(&dir.path().join("README.txt.bak"), "ignored");
    let out = run(&["compare", dir.path().to_str().unwrap(), "--metric", "entropy"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("entropy,high,low,4,4,"));
    // complete separation of 4 vs 4: exact p = 2 / C(8,4)
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields[9], "exact");
    assert!((fields[8].parse::<f64>().unwrap() - 2.0 / 70.0).abs() < 1e-12);

    let out = run(&["compare", dir.path().to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn compare_with_one_group_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    compare_layout(dir.path(), &["only"]);
    let out = run(&["compare", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn inputs_are_not_modified() {
    let dir = tempfile::tempdir().unwrap();
    compare_layout(dir.path(), &["a", "b"]);
    let odd = dir.path().join("odd.csv");
    write(&odd, "1\n2\n3\n4\n5\n");
    let snapshot = |p: &Path| fs::read(p).unwrap();
    let files = [dir.path().join("a/s0.csv"), dir.path().join("b/s3.csv"), odd.clone()];
    let before: Vec<Vec<u8>> = files.iter().map(|p| snapshot(p)).collect();
    run(&["analyze", odd.to_str().unwrap(), "--demean", "--eigen"]);
    run(&["monitor", files[0].to_str().unwrap(), "--window", "8", "--demean"]);
    run(&["compare", dir.path().to_str().unwrap(), "--demean"]);
    let after: Vec<Vec<u8>> = files.iter().map(|p| snapshot(p)).collect();
    assert_eq!(before, after);
}

#[test]
fn bundled_compare_example() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/compare-demo");
    let out = run(&["compare", root.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(&row[1..5], ["noise", "tone", "3", "3"]);
        // noise ranks above tone on every metric: the smallest exact 3-vs-3 p
        assert_eq!(row[7], "9");
        assert_eq!(row[8], "0.1");
    }
}
