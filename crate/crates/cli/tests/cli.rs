use std::path::PathBuf;
use std::process::{Command, Output};

fn tfclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfclass")).args(args).output().expect("run tfclass")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn config(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn p1_decompose_golden() {
    let o = tfclass(&["p1", "decompose", "O(2) + T(t,3) + O(-1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "tor = T(t,3)\nvect = O(2) + O(-1)\nrank = 2\ndegree = 4\neuler characteristic = 6\n"
    );
}

#[test]
fn p1_hom_and_ext() {
    assert_eq!(stdout(&tfclass(&["p1", "hom", "O", "O(2)"])), "3\n");
    assert_eq!(stdout(&tfclass(&["p1", "ext", "O(2)", "O"])), "1\n");
    assert_eq!(stdout(&tfclass(&["p1", "--field", "F3", "hom", "T(t,2)", "T(t,1)"])), "1\n");
    let bad = tfclass(&["p1", "hom", "O", "Z"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("cannot read sheaf term"));
}

#[test]
fn classify_golden() {
    let cfg = config("classify.toml", "space = \"Z\"\ngenerators = [\"Z/9\"]\n");
    let o = tfclass(&["classify", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "space: Z\n\
         window: Z: primes {(2), (3)}, primary length <= 2, rank <= 1\n\
         generators: {Z/9}\n\
         class: AssClass({(3)})\n\
         class size in window: 4\n\
         matches Ass class: yes\n"
    );
}

#[test]
fn ass_table_and_overrides() {
    let cfg = config("ass.toml", "space = \"Z\"\n");
    let o = tfclass(&["ass", cfg.to_str().unwrap(), "--set", "objects=[\"Z + Z/4\"]"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("ring: Z\nAss R = {(0)}\n"));
    let row = text.lines().find(|l| l.starts_with("Z + Z/4")).unwrap();
    let cells: Vec<&str> = row.split('|').map(str::trim).collect();
    assert_eq!(cells, ["Z + Z/4", "{(0), (2)}", "{(0)}", "{(0)}", "Spec R", "no", "no", "no", "no", "no"]);
}

#[test]
fn verify_reports_json_and_writes_out_file() {
    let cfg = config("verify.toml", "space = \"Z/6\"\npool = \"full\"\n");
    let out = cfg.with_file_name("verify.json");
    let o = tfclass(&["verify", "takahashi", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theorem"], "takahashi");
    assert_eq!(v["pass"], true);
    assert_eq!(v["classes"].as_array().unwrap().len(), 4);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&o));
}

#[test]
fn config_errors_carry_positions() {
    let cfg = config("bad_term.toml", "space = \"Z\"\nobjects = [\"Z\", \"Z + Q\"]\n");
    let o = tfclass(&["ass", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2, column 22"), "{}", stderr(&o));

    let cfg = config("bad_key.toml", "space = \"Z\"\nbogus = 1\n");
    let o = tfclass(&["ass", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2, column 1"), "{}", stderr(&o));

    let cfg = config("genus.toml", "space = \"P1/F2\"\ngenus = 2\n");
    let o = tfclass(&["ass", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("genus 2"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tfclass(&[]).status.code(), Some(1));
    assert_eq!(tfclass(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tfclass(&["ass", "/nonexistent/run.toml"]).status.code(), Some(1));
    assert_eq!(tfclass(&["--threads", "0", "p1", "hom", "O", "O"]).status.code(), Some(1));
    assert_eq!(tfclass(&["--help"]).status.code(), Some(0));
    assert_eq!(tfclass(&["--version"]).status.code(), Some(0));
}

#[test]
fn unsupported_backend_is_a_usage_error() {
    let cfg = config("mono_ie.toml", "space = \"F2[x,y]/(xy)\"\npool = [\"R\", \"R/(x)\"]\n");
    let o = tfclass(&["verify", "ie-torf", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lattice_for_embedded_prime() {
    let cfg = config("lattice.toml", "space = \"F2[x,y]/(x^2,xy)\"\nphi = \"ass\"\n");
    let o = tfclass(&["lattice", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph lattice {\n  rankdir=BT;\n"));
    assert_eq!(dot.matches("->").count(), 2);
}

#[test]
fn p1_classification_reports_partner() {
    let cfg = config("p1.toml", "space = \"P1/F2\"\ngenerators = [\"O\", \"T(t,1)\"]\n");
    let o = tfclass(&["classify", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("class: TypeII({t})"), "{text}");
    assert!(text.contains("torsion class partner"));
}

#[test]
fn sample_configs_run() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let p = path.to_str().unwrap();
        for cmd in [&["ass", p][..], &["lattice", p], &["verify", "serre-in-torf", p]] {
            let o = tfclass(cmd);
            assert_eq!(o.status.code(), Some(0), "{cmd:?}: {}", stderr(&o));
        }
        seen += 1;
    }
    assert!(seen >= 5);
}
