use std::path::Path;
use std::process::{Command, Output};

fn arcdf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arcdf")).args(args).output().expect("run arcdf")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .split(';')
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn simulate(dir: &Path, name: &str, phi: &str, n: usize, seed: u64) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let o = arcdf(&["simulate", "--phi", phi, "--law", "normal", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", &p]);
    assert!(o.status.success(), "{}", stderr(&o));
    p
}

fn data_rows(path: &str) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(String::from)
        .collect()
}

#[test]
fn simulate_writes_presample_and_body() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate(dir.path(), "a.csv", "0.8", 100, 7);
    assert_eq!(data_rows(&a).len(), 101);
    assert!(std::fs::read_to_string(&a).unwrap().starts_with("# presample_len=1\n"));
    let b = simulate(dir.path(), "b.csv", "0.8", 100, 7);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = simulate(dir.path(), "c.csv", "-0.8,-0.4", 10, 7);
    assert_eq!(data_rows(&c).len(), 12);
}

#[test]
fn non_causal_phi_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = arcdf(&["simulate", "--phi", "1.0", "--n", "10", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("root moduli"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = arcdf(&["simulate", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_recovers_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "s.csv", "0.8", 10_000, 3);
    let out = dir.path().join("est");
    let o = arcdf(&["estimate", "--data", &data, "--p", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let phi = value(&stdout(&o), "phi_hat");
    assert!((phi - 0.8).abs() < 0.03, "{phi}");
    for f in ["fit.txt", "residuals.csv", "cdf_grid.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let grid = data_rows(out.join("cdf_grid.csv").to_str().unwrap());
    assert_eq!(grid.len(), 512);
    assert_eq!(data_rows(out.join("residuals.csv").to_str().unwrap()).len(), 10_000);
}

#[test]
fn estimate_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let constant = dir.path().join("c.csv");
    std::fs::write(&constant, "x\n".to_string() + &"2.5\n".repeat(30)).unwrap();
    let out = dir.path().join("o");
    let o = arcdf(&["estimate", "--data", constant.to_str().unwrap(), "--p", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let short = dir.path().join("short.csv");
    std::fs::write(&short, "x\n1\n2\n3\n").unwrap();
    let o = arcdf(&["estimate", "--data", short.to_str().unwrap(), "--p", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least"));
}

#[test]
fn band_halfwidths_and_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let d100 = simulate(dir.path(), "n100.csv", "0.3", 100, 11);
    let out = dir.path().join("band.csv");
    let o = arcdf(&["band", "--data", &d100, "--p", "1", "--alpha", "0.05", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let hw = value(&stdout(&o), "halfwidth");
    assert!((hw - 0.136).abs() <= 0.0005, "{hw}");
    for row in data_rows(out.to_str().unwrap()) {
        let v: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(0.0 <= v[1] && v[1] <= v[2] && v[2] <= v[3] && v[3] <= 1.0, "{row}");
    }

    let d50 = simulate(dir.path(), "n50.csv", "0.3", 50, 12);
    let o = arcdf(&["band", "--data", &d50, "--p", "1", "--alpha", "0.2", "--out", out.to_str().unwrap()]);
    let hw = value(&stdout(&o), "halfwidth");
    assert!((hw - 1.07 / 50f64.sqrt()).abs() <= 0.005 / 50f64.sqrt(), "{hw}");
    assert!(!stderr(&o).contains("warning"));

    let d40 = simulate(dir.path(), "n40.csv", "0.3", 40, 13);
    let o = arcdf(&["band", "--data", &d40, "--p", "1", "--alpha", "0.2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn predict_interval() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate(dir.path(), "s.csv", "0.5", 10_000, 21);
    let o = arcdf(&["predict", "--data", &data, "--p", "1", "--alpha1", "0.25", "--alpha2", "0.75"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let (x, lo, hi) = (value(&s, "forecast"), value(&s, "lower"), value(&s, "upper"));
    assert!(lo < x && x < hi);
    assert!((0.5 * (lo + hi) - x).abs() < 0.1);

    let est = dir.path().join("est");
    let o = arcdf(&["estimate", "--data", &data, "--p", "1", "--out", est.to_str().unwrap()]);
    let phi = value(&stdout(&o), "phi_hat");
    let last: f64 = data_rows(&data).last().unwrap().parse().unwrap();
    assert_eq!(x, phi * last);

    let o = arcdf(&["predict", "--data", &data, "--p", "1", "--alpha1", "0.5", "--alpha2", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn experiment_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "phi = 0.2\nlaw = normal\nn = 60, 120\nreplications = 12\nalpha = 0.05, 0.2\nseed = 5\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o1 = arcdf(&["experiment", "--config", &cfg, "--workers", "1", "--out", a.to_str().unwrap()]);
    let o4 = arcdf(&["experiment", "--config", &cfg, "--workers", "4", "--out", b.to_str().unwrap()]);
    assert!(o1.status.success() && o4.status.success(), "{}", stderr(&o1));
    for f in ["summary.csv", "replications.csv", "ratios.csv", "band_60_0.05.csv", "band_120_0.2.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert!(stdout(&o1).contains("Dbar(Fhat)"));
}

#[test]
fn single_replication_summary_matches_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "one.cfg", "phi = -0.8\nn = 80\nreplications = 1\nalpha = 0.05\nseed = 3\n");
    let out = dir.path().join("o");
    let o = arcdf(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let read = |f: &str| {
        let text = std::fs::read_to_string(out.join(f)).unwrap();
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
        let row: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
        (header, row)
    };
    let (rh, rr) = read("replications.csv");
    let (sh, sr) = read("summary.csv");
    let get = |h: &[String], r: &[String], k: &str| r[h.iter().position(|x| x == k).unwrap()].clone();
    assert_eq!(get(&rh, &rr, "d_n_fhat"), get(&sh, &sr, "dbar_fhat"));
    assert_eq!(get(&rh, &rr, "ise_ftilde"), get(&sh, &sr, "mise_ftilde"));
    assert_eq!(get(&rh, &rr, "cover_fhat_0.05"), get(&sh, &sr, "cover_fhat_0.05"));
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "phi = 0.5\nn = 50\nreplicatoins = 3\n");
    let o = arcdf(&["experiment", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["table2.conf", "table3.conf"] {
        let text = std::fs::read_to_string(root.join(name)).unwrap();
        let text = text
            .lines()
            .map(|l| if l.starts_with("replications") { "replications = 2" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), name, &text);
        let out = dir.path().join("o");
        let o = arcdf(&["experiment", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
    }
}
