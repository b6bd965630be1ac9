use std::process::{Command, Output};

fn modgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modgate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn field(stdout: &[u8], key: &str) -> String {
    let text = String::from_utf8_lossy(stdout);
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .to_string()
}

fn num(stdout: &[u8], key: &str) -> f64 {
    field(stdout, key).parse().unwrap()
}

#[test]
fn eval_identity_gate() {
    let out = modgate(&[
        "eval",
        "--scenario",
        "xpm-epsilon",
        "--phi",
        "0",
        "--a",
        "0",
        "--eps",
        "0.1",
        "--alpha",
        "0.05",
    ]);
    assert!(out.status.success());
    assert_eq!(num(&out.stdout, "nm_re"), 1.0);
    assert_eq!(num(&out.stdout, "nm_im"), 0.0);
    let p = num(&out.stdout, "p");
    assert!((p - 0.1_f64.sin().powi(2)).abs() < 1e-15);
}

#[test]
fn eval_generic_theta_zero() {
    let out = modgate(&[
        "eval",
        "--scenario",
        "generic",
        "--theta",
        "0",
        "--op",
        "x",
        "--g-re",
        "0.4",
        "--g-im",
        "0.1",
    ]);
    assert!(out.status.success());
    assert!((num(&out.stdout, "final_0_re").powi(2) + num(&out.stdout, "final_0_im").powi(2) - 1.0).abs() < 1e-15);
    assert!((num(&out.stdout, "p") - 0.1_f64.sin().powi(2)).abs() < 1e-15);
}

#[test]
fn eval_delta_absorption_dominated() {
    let out = modgate(&[
        "eval",
        "--scenario",
        "xpm-delta",
        "--phi",
        "0",
        "--a",
        "1e-2",
        "--delta",
        "1e-3",
        "--alpha",
        "0.05",
    ]);
    assert!(out.status.success());
    // Oracle: |(1 − e^{iδ} e^{−a}) / (1 − e^{iδ})|.
    let (a, d) = (1e-2_f64, 1e-3_f64);
    let num_re = 1.0 - (-a).exp() * d.cos();
    let num_im = -(-a).exp() * d.sin();
    let den = 2.0 * (d / 2.0).sin();
    let oracle = num_re.hypot(num_im) / den;
    assert!((num(&out.stdout, "nm_abs") - oracle).abs() < 1e-9 * oracle);
    assert_eq!(field(&out.stdout, "regime"), "delta-abs-dominant");
}

#[test]
fn exit_codes() {
    assert_eq!(modgate(&["eval", "--bogus"]).status.code(), Some(2));
    assert_eq!(modgate(&["eval", "--alpha", "0.5"]).status.code(), Some(2));
    assert_eq!(modgate(&["eval", "--a", "-1"]).status.code(), Some(2));
    assert_eq!(modgate(&["sweep", "--angle", "log:-1:1:3"]).status.code(), Some(2));
    assert_eq!(modgate(&["eval", "--eps", "0", "--phi", "1e-3"]).status.code(), Some(3));
    let zero = [
        "--scenario",
        "generic",
        "--theta",
        "3.141592653589793",
        "--matrix",
        "0,0;0,0;0,0;1,0",
        "--pre-theta",
        "0",
        "--post-theta",
        "1.5707963267948966",
    ];
    let mut eval_args = vec!["eval"];
    eval_args.extend(zero);
    let out = modgate(&eval_args);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero"));
    let mut sample_args = vec!["sample", "--trials", "100"];
    sample_args.extend(zero);
    let out = modgate(&sample_args);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(num(&out.stdout, "p_hat"), 0.0);
    assert_eq!(field(&out.stdout, "bloch_x"), "");
    assert_eq!(
        modgate(&["sweep", "--out", "/nonexistent-dir/out.csv"]).status.code(),
        Some(5)
    );
    assert_eq!(
        modgate(&["report", "--config", "/nonexistent-dir/c.toml"])
            .status
            .code(),
        Some(5)
    );
}

#[test]
fn sweep_three_by_three() {
    let out = modgate(&["sweep", "--phi", "0,1e-5,1e-4", "--a", "lin:0:1e-3:3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    let out = modgate(&[
        "sweep",
        "--phi",
        "0,1e-5,1e-4",
        "--a",
        "lin:0:1e-3:3",
        "--format",
        "json-lines",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v.as_object().unwrap().len(), 21);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let csv = dir.path().join("rows.csv");
    std::fs::write(
        &cfg,
        format!(
            "out = \"{}\"\n[sweep]\nscenario = \"xpm-delta\"\nphi = [0.0, 1e-5]\na = \"log:1e-4:1e-3:2\"\nangle = 1e-2\n",
            csv.display()
        ),
    )
    .unwrap();
    let out = modgate(&["sweep", "--config", cfg.to_str().unwrap(), "--angle", "2e-2,3e-2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 9);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "xpm-delta");
    assert_eq!(row[4].parse::<f64>().unwrap(), 2e-2);
    std::fs::write(&cfg, "[gate]\nbogus = 1\n").unwrap();
    assert_eq!(
        modgate(&["eval", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &[
            "sample", "--seed", "17", "--trials", "50000", "--eps", "0.3", "--a", "1e-2", "--alpha", "0.2",
        ][..],
        &["report"][..],
        &[
            "eval",
            "--scenario",
            "xpm-delta",
            "--a",
            "1e-3",
            "--delta",
            "1e-2",
            "--format",
            "json-lines",
        ][..],
    ] {
        let (a, b) = (modgate(args), modgate(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn report_sections() {
    let out = modgate(&["report", "--regime", "lossless"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("at eps=1e-2") && text.contains("at eps=1e-3"));
    assert!(!text.contains("FAIL"));
    let out = modgate(&["report"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "eps-dominant",
        "abs-dominant",
        "lossless",
        "delta-dominant",
        "delta-abs-dominant",
    ] {
        assert!(text.contains(&format!("[{name}]")));
    }
}
