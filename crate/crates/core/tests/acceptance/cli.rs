use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steepwell"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL: &str = "mesh = 512\nball_mesh = 256\nlambdas = 1e3, 1e4, 1e5\n";

#[test]
fn invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body, reason) in [
        ("delta.cfg", "delta = 500\n", "delta 500 >= mu0"),
        ("p.cfg", "dim = 5\np = 12\n", "10"),
        ("crit.cfg", "dim = 5\np = 2**\n", "dim"),
        ("key.cfg", "colour = red\n", "unknown key"),
        ("order.cfg", "lambdas = 1e4, 1e3\n", "increasing"),
    ] {
        let cfg = write_config(dir.path(), name, body);
        let out = run(&["sweep", "--config", &cfg]);
        assert_eq!(code(&out), 2, "{name}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.contains(reason), "{name}: {err}");
    }
    assert_eq!(code(&run(&["limit", "--delta", "500"])), 2);
}

#[test]
fn io_failures_exit_4() {
    assert_eq!(
        code(&run(&["sweep", "--config", "/nonexistent/sweep.cfg"])),
        4
    );
    let out = run(&[
        "ground",
        "--lambda",
        "1e3",
        "--mesh",
        "256",
        "--ball-mesh",
        "128",
        "--out",
        "/nonexistent/u.csv",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn non_convergence_exits_3() {
    let out = run(&["limit", "--ball-mesh", "256", "--max-iter", "1"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("converged = false"));
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let mut outputs = Vec::new();
    for (i, parallel) in ["true", "false", "true", "false"].iter().enumerate() {
        let path = dir.path().join(format!("out{i}.csv"));
        let out = run(&[
            "sweep",
            "--config",
            &cfg,
            "--parallel",
            parallel,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,c_lambda,mu_L_lambda,tail_mass,p_tail_mass,l2_dist_to_limit,energy_gap,iterations,residual,converged"
    );
    assert_eq!(lines.count(), 3);
    assert!(text.ends_with('\n'));
}

#[test]
fn json_sweep_has_same_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", &format!("{SMALL}format = json\n"));
    let out = run(&["sweep", "--config", &cfg]);
    assert_eq!(code(&out), 0);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let keys: Vec<&str> = rows[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    for k in [
        "lambda",
        "c_lambda",
        "mu_L_lambda",
        "tail_mass",
        "energy_gap",
        "converged",
    ] {
        assert!(keys.contains(&k), "{keys:?}");
    }
}

#[test]
fn profiles_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let out = run(&[
        "ground",
        "--lambda",
        "1e3",
        "--mesh",
        "256",
        "--ball-mesh",
        "128",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("r,u\n"));
    assert_eq!(text.lines().count(), 257);

    let out = run(&["eig", "--ball-mesh", "256", "--mesh", "512"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("mu0 = 407.6"), "{stdout}");

    let path = dir.path().join("b.csv");
    let out = run(&[
        "bubble",
        "--dim",
        "8",
        "--delta",
        "50",
        "--eps-min",
        "1e-4",
        "--per-decade",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("epsilon,energy,relative_margin\n"));
    assert_eq!(code(&run(&["bubble", "--dim", "5"])), 2);
}
