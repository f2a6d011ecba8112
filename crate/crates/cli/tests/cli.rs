use std::process::Command;

fn ri2d() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ri2d"));
    c.env_remove("RI2D_SEED");
    c
}

fn stdout(args: &[&str]) -> String {
    let out = ri2d().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn kernel_prints_csv() {
    assert_eq!(stdout(&["kernel", "--point", "1,0"]), "1,0,1.000000000000\n");
    let many = stdout(&["kernel", "--point", "0,0", "--point", "2,1", "--exact-radius", "32"]);
    assert_eq!(many, "0,0,0.000000000000\n2,1,1.546479089470\n");
}

#[test]
fn cap_of_pair() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["cap", "--set", "0,0;1,0"])).unwrap();
    assert_eq!(v["schema"], 1);
    assert!((v["cap"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["hm"].as_array().unwrap().len(), 2);
}

#[test]
fn walk_is_seeded() {
    let a = stdout(&[
        "walk", "--start", "3,0", "--radius", "8", "--format", "csv", "--seed", "7",
    ]);
    let b = stdout(&[
        "walk", "--start", "3,0", "--radius", "8", "--format", "csv", "--seed", "7",
    ]);
    assert_eq!(a, b);
    assert!(a.starts_with("excursion,step,x,y\n0,0,3,0\n"));
    let env = ri2d()
        .args(["walk", "--start", "3,0", "--radius", "8", "--format", "csv"])
        .env("RI2D_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), a);
    let killed: serde_json::Value = serde_json::from_str(&stdout(&[
        "walk",
        "--start",
        "2,2",
        "--radius",
        "4",
        "--kill-radius",
        "12",
    ]))
    .unwrap();
    assert_eq!(killed["visits_origin"], false);
    assert!(killed["details"]["bias_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn sample_vacant_writes_nested_pgms() {
    let dir = std::env::temp_dir().join(format!("ri2d-cli-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    stdout(&[
        "sample-vacant",
        "--radius",
        "40",
        "--levels",
        "1,1.25,1.5",
        "--out",
        "pgm",
        "--out-dir",
        d,
    ]);
    let read = |tag: &str| std::fs::read(dir.join(format!("vacant_r40_a{tag}.pgm"))).unwrap();
    let imgs = [read("1"), read("1p25"), read("1p5")];
    let header = b"P5\n81 81\n255\n";
    for img in &imgs {
        assert!(img.starts_with(header));
        assert_eq!(img.len(), header.len() + 81 * 81);
    }
    let centre = header.len() + 40 * 81 + 40;
    for w in imgs.windows(2) {
        assert_eq!(w[0][centre], 255);
        for (a, b) in w[0][header.len()..].iter().zip(&w[1][header.len()..]) {
            assert!(*b != 255 || *a == 255, "higher level vacant where lower is covered");
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn torus_report() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&[
        "torus",
        "--n",
        "32",
        "--alpha",
        "0.25",
        "--replicas",
        "600",
        "--threads",
        "1",
    ]))
    .unwrap();
    for key in ["estimate", "ci", "acceptance_rate", "predicted"] {
        assert!(!v[key].is_null(), "{key}");
    }
}

#[test]
fn verify_exact_passes() {
    let out = ri2d().args(["verify", "--suite", "exact"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json = ri2d()
        .args(["verify", "--suite", "exact", "--format", "json"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        ri2d().args(["kernel", "--bogus"]).output().unwrap().status.code(),
        Some(2)
    );
    assert_eq!(
        ri2d()
            .args(["kernel", "--point", "1;0"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ri2d().args(["walk", "--start", "0,0"]).output().unwrap().status.code(),
        Some(2)
    );
    assert_eq!(
        ri2d()
            .args(["verify", "--suite", "nope"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
}
