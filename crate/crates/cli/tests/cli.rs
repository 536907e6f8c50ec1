use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(format!("{name}.dgbv"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dgbv")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run_model(cmd: &[&str], name: &str) -> (i32, String) {
    let path = model(name);
    let mut args = cmd.to_vec();
    args.push(path.to_str().unwrap());
    let (code, out, _) = run(&args);
    (code, out)
}

fn machine(cmd: &[&str], name: &str) -> Value {
    let mut args = vec!["--format", "machine"];
    args.extend_from_slice(cmd);
    let (code, out) = run_model(&args, name);
    let v: Value = serde_json::from_str(&out).expect("machine output is JSON");
    assert_eq!(v["exit_code"], code);
    v
}

fn verdict<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["verdicts"].as_array().unwrap().iter().find(|x| x["name"] == name).unwrap_or_else(|| panic!("no verdict {name}"))
}

#[test]
fn check_exit_codes_follow_the_conditions() {
    for name in ["torus4", "complex-torus-1", "complex-torus-2", "dd-bar-square"] {
        assert_eq!(run_model(&["check"], name).0, 0, "{name}");
    }
    for name in ["heisenberg", "kodaira-thurston", "heisenberg-polyvector", "theta-bv"] {
        assert_eq!(run_model(&["check"], name).0, 1, "{name}");
    }
    let (_, out) = run_model(&["check"], "kodaira-thurston");
    assert!(out.contains("FAIL H(j)"));
    assert!(out.contains("dim H(A,δ) = 12, dim H(A,Δ) = 12, dim (Ker δ ∩ Ker Δ)/Im δΔ = 13"));
}

#[test]
fn theta_bv_reports_the_leibniz_failure() {
    let v = machine(&["check"], "theta-bv");
    assert_eq!(verdict(&v, "bracket-leibniz")["pass"], false);
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dgbv");
    std::fs::write(&path, "model bad\nbuilder lie 2\nomega\n  e1^e2 1/0\nend\n").unwrap();
    let (code, _, err) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("line 4, column 9"), "{err}");
    let (code, _, err) = run(&["check", dir.path().join("missing.dgbv").to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(!err.is_empty());
}

#[test]
fn torus_solution_is_linear() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.txt");
    let (code, _) = run_model(&["--output", out.to_str().unwrap(), "solve", "--order", "4"], "torus4");
    assert_eq!(code, 0);
    let dump = std::fs::read_to_string(&out).unwrap();
    for n in 2..=4 {
        assert!(dump.contains(&format!("term {n}\nend\n")), "term {n} is not empty");
    }
    let term1: Vec<&str> = dump.split("term 1\n").nth(1).unwrap().lines().take_while(|l| *l != "end").collect();
    assert_eq!(term1.len(), 16);
    assert!(term1.contains(&"  x0 1 1"));

    let (code, text) = run_model(&["solve", "--order", "1"], "torus4");
    assert_eq!(code, 0);
    assert!(text.contains("order 1\n"));
    assert!(!text.contains("term 2"));
}

#[test]
fn obstruction_exits_two_with_witness() {
    let (code, text) = run_model(&["solve"], "heisenberg-polyvector");
    assert_eq!(code, 1);
    assert!(text.contains("FAIL precondition"));
    let v = machine(&["solve", "--force", "--order", "3"], "heisenberg-polyvector");
    assert_eq!(v["exit_code"], 2);
    assert_eq!(verdict(&v, "unobstructed")["detail"], "obstructed at order 2");
    assert_eq!(verdict(&v, "witness-reproduces")["pass"], true);
}

/// Sign of the shuffle sorting the concatenation of disjoint index lists.
fn shuffle_sign(parts: &[&[usize]]) -> i64 {
    let all: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    let mut inv = 0;
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            if all[a] > all[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn torus_tensor_is_the_cup_product() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.txt");
    let (code, _) = run_model(&["--output", out.to_str().unwrap(), "frobenius", "--order", "2"], "torus4");
    assert_eq!(code, 0);
    let dump = std::fs::read_to_string(&out).unwrap();

    // Subsets of {1,2,3,4} in basis order: by size, then lexicographic.
    let mut subsets: Vec<Vec<usize>> = (0u32..16).map(|m| (1..=4).filter(|k| m >> (k - 1) & 1 == 1).collect()).collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));

    let block = |key: &str| -> Vec<Vec<String>> {
        dump.split(&format!("\n{key}\n"))
            .nth(1)
            .unwrap()
            .lines()
            .take_while(|l| *l != "end")
            .map(|l| l.split_whitespace().map(String::from).collect())
            .collect()
    };
    let mut tensor = BTreeMap::new();
    for e in block("tensor") {
        assert_eq!(e[3], "1", "only constant terms expected");
        let idx: Vec<usize> = e[..3].iter().map(|s| s.parse().unwrap()).collect();
        tensor.insert((idx[0], idx[1], idx[2]), e[4].parse::<i64>().unwrap());
    }
    let mut metric = BTreeMap::new();
    for e in block("metric") {
        metric.insert((e[0].parse::<usize>().unwrap(), e[1].parse::<usize>().unwrap()), e[2].parse::<i64>().unwrap());
    }
    for i in 0..16 {
        for j in 0..16 {
            for k in 0..16 {
                let (a, b, c) = (&subsets[i], &subsets[j], &subsets[k]);
                let disjoint = a.len() + b.len() + c.len() == 4 && {
                    let mut u: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
                    u.sort();
                    u.dedup();
                    u.len() == 4
                };
                let expect = if disjoint { shuffle_sign(&[a, b, c]) } else { 0 };
                assert_eq!(tensor.get(&(i, j, k)).copied().unwrap_or(0), expect, "c({i},{j},{k})");
            }
            assert_eq!(tensor.get(&(0, i, j)), metric.get(&(i, j)), "c(0,{i},{j}) against g");
        }
    }
}

#[test]
fn frobenius_refuses_a_degenerate_integral() {
    let (code, text) = run_model(&["frobenius", "--force"], "complex-torus-1-degenerate");
    assert_eq!(code, 1);
    assert!(text.contains("the integral is not nice"), "{text}");
}

#[test]
fn compare_on_kahler_tori_and_refusal() {
    for name in ["complex-torus-1", "complex-torus-2", "dd-bar-square"] {
        let (code, text) = run_model(&["compare", "--order", "3"], name);
        assert_eq!(code, 0, "{name}");
        assert!(text.contains("verdict: IDENTICAL"), "{name}");
    }
    let (code, text) = run_model(&["compare"], "dd-bar-square-skewed");
    assert_eq!(code, 1);
    assert!(text.contains("refusing to compare"));
    assert!(text.contains("FAIL box-equals-2-box-partial"));
    let (code, _) = run_model(&["compare"], "torus4");
    assert_eq!(code, 1);
}

#[test]
fn lefschetz_ranks() {
    let v = machine(&["lefschetz"], "torus4");
    assert_eq!(v["exit_code"], 0);
    let rows = v["data"]["lefschetz"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);

    let (code, text) = run_model(&["lefschetz"], "kodaira-thurston");
    assert_eq!(code, 1);
    assert!(text.contains("PASS k=0"));
    assert!(text.contains("FAIL k=1: L^1: H^1 (3) → H^3 (3), rank 2"));
    assert!(text.contains("PASS k=2"));

    let (code, text) = run_model(&["lefschetz", "--omega", "e1^e3"], "torus4");
    assert_eq!(code, 1);
    assert!(text.contains("PASS k=0") && text.contains("FAIL k=1") && text.contains("FAIL k=2"));

    let (code, text) = run_model(&["lefschetz", "--omega", "e1"], "torus4");
    assert_eq!(code, 1);
    assert!(text.contains("not homogeneous of degree 2"));
    let (code, text) = run_model(&["lefschetz", "--omega", "e3^e4"], "kodaira-thurston");
    assert_eq!(code, 1);
    assert!(text.contains("not closed"));
    let (code, text) = run_model(&["lefschetz"], "heisenberg");
    assert_eq!(code, 1);
    assert!(text.contains("top degree 3 is odd"));
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["kodaira-thurston", "complex-torus-2", "dd-bar-square"] {
        let a = dir.path().join("a.dgbv");
        let (code, _) = run_model(&["--output", a.to_str().unwrap(), "export"], name);
        assert_eq!(code, 0);
        let first = std::fs::read_to_string(&a).unwrap();
        let (code, second, _) = run(&["export", a.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(second.ends_with(&first), "{name}");
    }
}

#[test]
fn machine_output_is_json_for_every_command() {
    let v = machine(&["check"], "kodaira-thurston");
    assert_eq!(v["command"], "check");
    assert_eq!(v["model"], "kodaira-thurston");
    assert_eq!(v["pass"], false);
    let v = machine(&["solve", "--order", "2"], "complex-torus-1");
    assert_eq!(v["exit_code"], 0);
    let v = machine(&["frobenius", "--order", "2"], "complex-torus-1");
    assert_eq!(v["exit_code"], 0);
    let v = machine(&["compare", "--order", "2"], "complex-torus-1");
    assert_eq!(v["exit_code"], 0);
}

#[test]
fn output_is_deterministic() {
    for cmd in [&["solve", "--order", "3"][..], &["frobenius", "--order", "2"], &["compare", "--order", "2"]] {
        let a = run_model(cmd, "complex-torus-2");
        let b = run_model(cmd, "complex-torus-2");
        assert_eq!(a, b, "{cmd:?}");
    }
}
