use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn helfrich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helfrich"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel).to_string_lossy().into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: PathBuf) -> String {
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn solve_writes_record_and_profile() {
    let out = tempfile::tempdir().unwrap();
    let o = helfrich(&["solve", "--config", &fixture("reference_discs/disc_01_b0_geodesic.conf"), "--out", path(out.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_str(&read(out.path().join("disc_01_b0_geodesic.json"))).unwrap();
    let sel = rec["selected"].as_u64().unwrap() as usize;
    let root = &rec["roots"][sel];
    assert!((root["radius"].as_f64().unwrap() - 0.96).abs() < 0.005);
    assert!((root["energy"]["total"].as_f64().unwrap() - 12.6).abs() < 0.15);
    assert_eq!(rec["timestamp"].as_u64(), Some(1_700_000_000));
    assert_eq!(rec["reference_match"].as_bool(), Some(true));

    let csv = read(out.path().join("disc_01_b0_geodesic.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("sigma,r,z,phi,H,K,kappa_g,kappa_n"));
    assert!(lines.all(|l| l.split(',').count() == 8));
}

#[test]
fn identical_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = fixture("reference_discs/disc_03_b0_geodesic.conf");
    for d in [&a, &b] {
        assert_eq!(helfrich(&["solve", "--config", &cfg, "--out", path(d.path())]).status.code(), Some(0));
    }
    for f in ["disc_03_b0_geodesic.json", "disc_03_b0_geodesic.csv"] {
        assert_eq!(read(a.path().join(f)), read(b.path().join(f)), "{f} differs");
    }
    let svg = |d: &tempfile::TempDir| {
        let o = helfrich(&["render", "--config", path(&d.path().join("disc_03_b0_geodesic.csv"))]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let s = svg(&a);
    assert!(String::from_utf8_lossy(&s).starts_with("<svg"));
    assert_eq!(s, svg(&b));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_case = dir.path().join("bad_case.conf");
    std::fs::write(&bad_case, "case = geodesic_at_z0\na = 1\nc_o = 2\nb = 0\nalpha = 1\nbeta = 1\n").unwrap();
    let o = helfrich(&["solve", "--config", path(&bad_case), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("requires b != 0"));

    let bad_num = dir.path().join("bad_num.conf");
    std::fs::write(&bad_num, "case = b0_geodesic\na = 1\nc_o = 2x\nalpha = 1\nbeta = 1\n").unwrap();
    let o = helfrich(&["solve", "--config", path(&bad_num)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 7"));

    assert_eq!(helfrich(&["solve"]).status.code(), Some(1));
    assert_eq!(helfrich(&["frobnicate"]).status.code(), Some(1));
    let o = helfrich(&["solve", "--config", &fixture("reference_discs/disc_01_b0_geodesic.conf"), "--bracket", "-1:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(helfrich(&["--help"]).status.code(), Some(0));
}

#[test]
fn no_solution_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = helfrich(&["table", "--config", path(dir.path()), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = fixture("reference_discs/disc_02_b0_geodesic.conf");
    let o = helfrich(&["solve", "--config", &cfg, "--bracket", "1e-4:2e-4", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn sweep_keeps_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = helfrich(&[
        "sweep",
        "--config",
        &fixture("reference_discs/disc_24_mixed_condition.conf"),
        "--axis",
        "c_o",
        "--grid",
        "5,2",
        "--out",
        path(dir.path()),
        "--jobs",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path().join("sweep_c_o.csv"));
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    let radius = |r: &Vec<&str>| r[3].parse::<f64>().unwrap();
    assert!(rows[0][0].starts_with("5.") && rows[1][0].starts_with("2."));
    assert!((radius(&rows[0]) - 0.37).abs() < 0.015 && (radius(&rows[1]) - 0.63).abs() < 0.015);

    let o = helfrich(&["sweep", "--config", &fixture("reference_discs/disc_24_mixed_condition.conf"), "--axis", "gamma", "--grid", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn annulus_flux_column_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = helfrich(&["annulus", "--config", &fixture("annulus/flux_0.1.conf"), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path().join("flux_0.1.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("sigma,r,z,phi,H,K,kappa_g,kappa_n,zeta,A_bar_evaluated"));
    let mut n = 0;
    for l in lines.clone().filter(|l| !l.starts_with('#')) {
        let a: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!((a - 0.1).abs() < 1e-6);
        n += 1;
    }
    assert!(n > 10);
    assert!(lines.last().unwrap().starts_with("# stopped: tangent_vertical"));
}

#[test]
fn check_reports_identities() {
    let o = helfrich(&["check", "--config", &fixture("reference_discs/disc_22_mixed_condition.conf")]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("config ok"));
    assert!(!text.contains("FAIL"), "{text}");
}
