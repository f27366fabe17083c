use std::path::Path;
use std::process::{Command, Output};

fn sslab(args: &[&str], config: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sslab"));
    c.args(args);
    match config {
        Some(p) => c.env("SSLAB_CONFIG", p),
        None => c.env("SSLAB_CONFIG", "/nonexistent/sslab.conf").env_remove("SSLAB_CONFIG"),
    };
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn catalog_list_names_every_entry() {
    let o = sslab(&["catalog", "list"], None);
    assert!(o.status.success());
    let s = stdout(&o);
    for name in ["catenoid", "helicoid", "enneper1", "enneper2", "enneper_k", "knoid", "graph1", "graph2", "essential_m", "essential_e", "essential_c", "singular1", "singular2", "incomplete", "alias_palmer", "maximal_catenoid", "fourpi"] {
        assert!(s.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn analyze_exit_status_follows_expectations() {
    let o = sslab(&["analyze", "catenoid", "--param", "t=0.4", "--no-area"], None);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("result: ok\n"));
    // nonzero periods are expected for lambda = i
    let o = sslab(&["analyze", "helicoid", "--no-area", "--format", "kv"], None);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("periods.pass=false\n"));
    assert!(s.contains("ok=true\n"));
}

#[test]
fn analyze_reports_are_deterministic() {
    let args = ["analyze", "singular1", "--format", "kv"];
    let (a, b) = (sslab(&args, None), sslab(&args, None));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("end.0.index=2\n"));
}

#[test]
fn bad_parameters_are_errors() {
    let o = sslab(&["analyze", "catenoid", "--param", "t=1"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[Param]"));
    let o = sslab(&["analyze", "catenoid", "--param", "q=1"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = sslab(&["analyze", "nosuch"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn obj_records_and_ccw_quads() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.obj");
    let o = sslab(&["mesh", "enneper1", "--res", "16", "--proj", "drop-x4", "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut v = Vec::new();
    let mut f = Vec::new();
    for l in text.lines().filter(|l| !l.starts_with('#')) {
        let w: Vec<&str> = l.split_whitespace().collect();
        match w[0] {
            "v" => v.push([1, 2, 3].map(|k| w[k].parse::<f64>().unwrap())),
            "f" => f.push([1, 2, 3, 4].map(|k| w[k].parse::<usize>().unwrap())),
            r => panic!("unexpected record {r}"),
        }
    }
    assert_eq!(v.len(), 17 * 17);
    assert_eq!(f.len(), 16 * 16);
    // enneper1 at c = -1 is a graph over the (x1, x2) plane near the origin,
    // so faces near the centre project with positive orientation
    let mut positive = 0;
    for q in &f {
        let p: Vec<[f64; 3]> = q.iter().map(|&i| v[i - 1]).collect();
        let area: f64 = (0..4).map(|k| p[k][0] * p[(k + 1) % 4][1] - p[(k + 1) % 4][0] * p[k][1]).sum();
        if area > 0.0 {
            positive += 1;
        }
    }
    assert!(positive * 2 > f.len(), "{positive} of {}", f.len());
}

#[test]
fn ply_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.ply");
    let o = sslab(&["mesh", "catenoid", "--res", "16", "--proj", "drop-x1", "--out", out.to_str().unwrap()], None);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("ply\nformat ascii 1.0\n"));
    assert!(text.contains("element face 256\n"));
}

#[test]
fn malformed_path_is_io_error() {
    let o = sslab(&["mesh", "catenoid", "--res", "16", "--out", "/nonexistent/dir/x.obj"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[Io]"));
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("s.conf");
    std::fs::write(&conf, "# coarse\nmesh.res = 16\n").unwrap();
    let out = dir.path().join("m.obj");
    let o = sslab(&["mesh", "catenoid", "--out", out.to_str().unwrap()], Some(&conf));
    assert!(o.status.success());
    // the closed annulus has no seam column: 16 x 17 vertices
    assert!(stdout(&o).contains("(272 vertices, 256 faces"), "{}", stdout(&o));
    std::fs::write(&conf, "mesh.res = sixteen\n").unwrap();
    let o = sslab(&["catalog", "list"], Some(&conf));
    assert!(o.status.success(), "catalog list reads no config");
    let o = sslab(&["mesh", "catenoid", "--out", out.to_str().unwrap()], Some(&conf));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[Parse]"));
    let o = sslab(&["analyze", "catenoid"], Some(&dir.path().join("missing.conf")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[Io]"));
}

#[test]
fn locus_csv_on_the_real_axis() {
    let o = sslab(&["locus", "enneper2", "--param", "c=1", "--param", "force=true", "--window", "disc:3"], None);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut roots: Vec<f64> = Vec::new();
    for l in s.lines().skip(1) {
        let w: Vec<&str> = l.split(',').collect();
        assert_eq!(w[0], "point");
        assert!(w[3].parse::<f64>().unwrap().abs() < 1e-10);
        roots.push(w[2].parse().unwrap());
    }
    roots.sort_by(f64::total_cmp);
    let golden = 5f64.sqrt();
    assert_eq!(roots.len(), 2);
    assert!((roots[0] - (-1.0 - golden) / 2.0).abs() < 1e-10);
    assert!((roots[1] - (-1.0 + golden) / 2.0).abs() < 1e-10);
}

#[test]
fn scan_4pi_accepts_negative_parts() {
    let o = sslab(&["scan-4pi", "--m", "1", "--a", "0.3,-0.2"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("m=1 a=0.3-0.2i"));
    let o = sslab(&["scan-4pi", "--a", "0.3"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn data_file_is_addressable() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cat.wd");
    std::fs::write(&p, "label = cat\nphi = [0, 1]\npsi = [-1] / [0, 1]\ndh = [1] / [0, 1]\npunctures = 0, inf\n").unwrap();
    let o = sslab(&["analyze", p.to_str().unwrap(), "--format", "kv", "--no-area"], None);
    assert!(o.status.success(), "{}", stdout(&o));
    let s = stdout(&o);
    let k: f64 = s.lines().find_map(|l| l.strip_prefix("contour.k_total=")).unwrap().parse().unwrap();
    assert!((k + 4.0 * std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn verify_single_criterion() {
    let o = sslab(&["verify", "--only", "4", "--format", "kv"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "criterion.4=PASS\nok=true\n");
}
