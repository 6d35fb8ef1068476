use std::process::Command;

fn fockflow() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fockflow"));
    c.env("FOCKFLOW_THREADS", "2");
    c
}

#[test]
fn prove_prints_proof_and_diagram() {
    let out = fockflow().args(["prove", "John sleeps. He snores."]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sequent"], "!@n, n\\s, @n\\n, n\\s --> s.s");
    assert!(v["diagram"]["boxes"].as_array().unwrap().len() >= 4);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| fockflow().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["run", "--model", "5"]), Some(1));
    assert_eq!(code(&["run"]), Some(1));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["prove", "John flies."]), Some(2));
    assert_eq!(code(&["dataset", "inspect", "/nonexistent/data.csv"]), Some(2));
}

#[test]
fn dataset_round_trip_and_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let st = fockflow()
        .args(["dataset", "generate", "--out", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(st.status.success());
    let out = fockflow().args(["dataset", "inspect", csv.to_str().unwrap()]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("entries: 144") && text.contains("train: 72 (36/36)"));

    let res = dir.path().join("res");
    let out = fockflow()
        .args(["run", "--model", "m2", "--combination", "rz", "--seeds", "2", "--iterations", "3"])
        .args(["--dataset", csv.to_str().unwrap(), "--dump-diagrams", "--dump-circuits"])
        .arg("--out")
        .arg(&res)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cells: serde_json::Value = serde_json::from_slice(&std::fs::read(res.join("results.json")).unwrap()).unwrap();
    assert_eq!(cells[0]["model"], 2);
    assert_eq!(cells[0]["combination"], "rz");
    assert_eq!(cells[0]["curves"]["loss"].as_array().unwrap().len(), 3);
    let rows = std::fs::read_to_string(res.join("results.csv")).unwrap();
    assert_eq!(rows.lines().count(), 3);
    assert!(res.join("diagrams_2b.json").exists() && res.join("circuits_2b.json").exists());
}
