use std::path::PathBuf;
use std::process::Command;

use nilrfrs::cli::{run, Report};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("nilrfrs").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Compares against the stored report; `NILRFRS_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("NILRFRS_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "{name}");
}

#[test]
fn documented_invocations_match_golden_files() {
    let bad = data("bad_chain.txt");
    let cases: [(&str, Vec<&str>, i32); 3] = [
        ("analyze_heisenberg.json", vec!["analyze", "--group", "heisenberg", "--json"], 0),
        (
            "rfrs_obstruct_heisenberg_8.json",
            vec!["rfrs-obstruct", "--group", "heisenberg", "--max-index", "8", "--json"],
            0,
        ),
        (
            "rfrs_verify_bad_chain.json",
            vec!["rfrs-verify", "--group", "heisenberg", "--chain", &bad, "--json"],
            1,
        ),
    ];
    for (name, args, code) in cases {
        let (c1, out1, _) = invoke(&args);
        let (c2, out2, _) = invoke(&args);
        assert_eq!((c1, c2), (code, code), "{name}");
        assert_eq!(out1, out2, "{name}");
        check_golden(name, &out1);
        let report: Report = serde_json::from_str(&out1).unwrap();
        assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", out1);
    }
}

#[test]
fn analyze_text_report() {
    let (code, out, _) = invoke(&["analyze", "--group", "heisenberg"]);
    assert_eq!(code, 0);
    for line in [
        "center rank: 1",
        "Hirsch rank: 3",
        "abelianization: Z^2",
        "center-to-abelianization injective: false",
        "witness: (0,0,1)",
    ] {
        assert!(out.contains(line), "missing `{line}` in\n{out}");
    }
    let (code, out, _) = invoke(&["analyze", "--group", &data("heisenberg.pc")]);
    assert_eq!(code, 0);
    assert!(out.contains("witness: (0,0,1)"));
}

#[test]
fn report_fields() {
    let (_, out, _) = invoke(&["rfrs-verify", "--group", "heisenberg", "--chain", &data("bad_chain.txt"), "--json"]);
    let r: Report = serde_json::from_str(&out).unwrap();
    let steps = r.steps.unwrap();
    assert_eq!(steps.len(), 1);
    assert!(steps[0].normal && !steps[0].kernel_contained);
    assert_eq!(steps[0].index, 8);
    assert!(!r.overall);

    let (code, out, _) =
        invoke(&["rfrs-verify", "--group", "heisenberg", "--chain", &data("good_chain.txt"), "--json"]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.witness, Some(vec![0, 0, 1]));
    assert_eq!(r.intersection_rank, Some(3));

    let (_, out, _) = invoke(&["rfrs-obstruct", "--group", "heisenberg", "--max-index", "8", "--json"]);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert!(r.overall);
    assert_eq!(r.witness, Some(vec![0, 0, 1]));
    assert_eq!(r.checked_subgroups, Some(60));
}

#[test]
fn every_command_round_trips() {
    let good = data("good_chain.txt");
    let sub = data("index_two.txt");
    let graph = data("path3.graph");
    let commands: Vec<Vec<&str>> = vec![
        vec!["analyze", "--group", "ut(4)"],
        vec!["rfrs-restrict", "--group", "heisenberg", "--chain", &good, "--subgroup", &sub],
        vec!["raag-nf", "--graph", &graph, "--word", "c,b,a^-1"],
        vec!["raag-magnus", "--graph", "edgeless(2)", "--word", "a,b,a^-1,b^-1", "--degree", "2"],
        vec!["raag-rtfn", "--graph", &graph, "--max-len", "3"],
    ];
    for mut args in commands {
        args.push("--json");
        let (code, out, err) = invoke(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        let r: Report = serde_json::from_str(&out).unwrap();
        assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", out);
        assert_eq!(r.command, args[0]);
    }
}

#[test]
fn graph_word_commands() {
    let (_, out, _) = invoke(&["raag-nf", "--graph", "complete(2)", "--word", "b,a"]);
    assert_eq!(out, "a,b\n");
    let (_, out, _) = invoke(&["raag-nf", "--graph", "edgeless(2)", "--word", "a,b,b^-1,a^-1"]);
    assert_eq!(out, "1\n");
    let (_, out, _) = invoke(&["raag-magnus", "--graph", "edgeless(2)", "--word", "a,b,a^-1,b^-1", "--degree", "2"]);
    assert_eq!(out, "1\t1\n1\ta,b\n-1\tb,a\n");
}

#[test]
fn input_errors_exit_two() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", "--group", "dihedral(4)"],
        vec!["rfrs-verify", "--group", "heisenberg", "--chain", "/nonexistent/chain.txt"],
        vec!["rfrs-obstruct", "--group", "free_abelian(2)"],
        vec!["rfrs-obstruct", "--group", "heisenberg", "--max-index", "0"],
        vec!["raag-rtfn", "--graph", "edgeless(5)"],
        vec!["raag-nf", "--graph", "edgeless(2)", "--word", "c"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nilrfrs");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["analyze", "--group", "heisenberg"]), Some(0));
    assert_eq!(status(&["rfrs-obstruct", "--group", "heisenberg", "--max-index", "8"]), Some(0));
    assert_eq!(status(&["rfrs-verify", "--group", "heisenberg", "--chain", &data("bad_chain.txt")]), Some(1));
    assert_eq!(status(&["analyze", "--group", "nonsense"]), Some(2));
}
