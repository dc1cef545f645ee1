use std::process::{Command, Output};

fn pga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pga")).args(args).output().expect("spawn pga")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn single_point_grid_is_rejected() {
    let out = pga(&["converge", "--eps-grid", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least two"));
}

#[test]
fn bad_flag_and_missing_input_exit_2() {
    assert_eq!(pga(&["pga", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(pga(&["mean", "--input", "/nonexistent/data.json"]).status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_json() {
    let args = ["converge", "--dim", "4", "--n-samples", "20", "--eps-grid", "0.01,0.03,0.1", "--directions", "1,2", "--seed", "7"];
    let a = pga(&args);
    let b = pga(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["slopes"].as_array().unwrap().len(), 4);
}

#[test]
fn csv_output_writes_side_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let st = pga(&["converge", "--dim", "4", "--n-samples", "20", "--eps-grid", "0.01,0.1", "--format", "csv", "-o", out.to_str().unwrap()]);
    assert!(st.status.success());
    let main = std::fs::read_to_string(&out).unwrap();
    assert!(main.starts_with("eps,direction,"));
    let slopes = std::fs::read_to_string(dir.path().join("conv.slopes.csv")).unwrap();
    assert!(slopes.starts_with("quantity,"));
}

#[test]
fn altpga_reads_quaternion_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rots.csv");
    let mut text = String::from("w,x,y,z\n");
    for i in 0..12 {
        let a = 0.05 * (i as f64 - 5.5);
        let b = 0.01 * ((i * 7 % 5) as f64 - 2.0);
        let (s, c) = (0.5 * a).sin_cos();
        let n = (c * c + s * s + b * b).sqrt();
        text.push_str(&format!("{},{},{},{}\n", c / n, s / n, b / n, 0.0));
    }
    std::fs::write(&path, text).unwrap();
    let v = json(&pga(&["altpga", "--input", path.to_str().unwrap(), "--k-max", "2"]));
    assert_eq!(v["n_points"], 12);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn altpga_rejects_rotation_csv_on_spd() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rots.csv");
    std::fs::write(&path, "1,0,0,0\n").unwrap();
    assert_eq!(pga(&["altpga", "--manifold", "spd", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn dataset_commands_round_trip_json_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.json");
    let unit = |v: [f64; 3]| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.map(|x| x / n)
    };
    let doc = serde_json::json!({
        "manifold": "sphere",
        "params": {"n": 2, "r": 1.0},
        "points": [[1.0, 0.0, 0.0], unit([0.99, 0.1, 0.0]), unit([0.99, -0.1, 0.01]), unit([0.995, 0.0, -0.05])]
    });
    std::fs::write(&path, doc.to_string()).unwrap();
    let p = path.to_str().unwrap();
    let mean = json(&pga(&["mean", "--manifold", "sphere", "--dim", "2", "--input", p]));
    let m: Vec<f64> = serde_json::from_value(mean["mean"].clone()).unwrap();
    assert!((m.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    let proj = json(&pga(&["project", "--input", p, "--k", "1"]));
    assert_eq!(proj["rows"].as_array().unwrap().len(), 4);
    let exp = json(&pga(&["expand", "--input", p, "--k", "1", "--eps", "0.5"]));
    assert_eq!(exp["corrected"].as_array().unwrap().len(), 1);
}
