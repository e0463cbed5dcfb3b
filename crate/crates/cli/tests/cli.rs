use std::fs;

use gapforge_cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gapforge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s.trim()).unwrap()
}

#[test]
fn gap_of_complete_graph() {
    let (code, out, _) = call(&["gap", "--family", "complete", "--k", "4", "--format", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["gap"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert!(out.contains("1.33333333333333"));
}

#[test]
fn lazy_gap_and_text() {
    let (code, out, _) = call(&["gap", "--family", "cycle", "--k", "4", "--lazy", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("gap = 0.5"), "{out}");
}

#[test]
fn spectrum_csv() {
    let (code, out, _) = call(&["spectrum", "--family", "path", "--k", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "index,eigenvalue,stationary");
    assert_eq!(lines.len(), 4);
    let top: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((top - 1.0).abs() < 1e-12);
}

#[test]
fn verify_grm_passes() {
    let (code, out, _) = call(&["verify", "--id", "grm", "--r", "4", "--m", "8"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["holds"], true);
    assert_eq!(v["context"]["complement_check"], true);
    assert_eq!(v["context"]["r3_check"], true);
}

#[test]
fn failing_hypothesis_exits_one() {
    let (code, out, _) = call(&["verify", "--id", "diam2", "--family", "complete", "--k", "4"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["hypothesis_ok"], false);
}

#[test]
fn enumerate_five() {
    let (code, out, _) = call(&["enumerate", "--n", "5", "--check", "main1,cheeger"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["summary"]["instances"], 1024);
    assert_eq!(v["summary"]["failing"], 0);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn counterexample_plot_ratios() {
    let (code, out, _) = call(&[
        "scan", "--id", "counterexample_family", "--n", "24,60,144,400", "--plot", "n,ratio_to_bound",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,ratio_to_bound"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().filter(|r| r.0 >= 144.0).all(|r| r.1 <= 1.0));
}

#[test]
fn plot_edge_cases() {
    // K_3 has diameter one, so the diameter-two check never applies
    let (code, out, _) = call(&["scan", "--family", "complete", "--k", "3", "--check", "diam2", "--plot", "n,n"]);
    assert_eq!(code, 0);
    assert_eq!(out, "n,n\n");
    let (code, out, _) = call(&["scan", "--family", "path", "--k", "3..5", "--check", "main1", "--plot", "n,n"]);
    assert_eq!(code, 0);
    for line in out.lines().skip(1) {
        let (a, b) = line.split_once(',').unwrap();
        assert_eq!(a, b);
    }
    let (code, _, err) = call(&["scan", "--family", "path", "--k", "3", "--check", "main1", "--plot", "n,nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("nope"));
}

#[test]
fn scans_are_byte_identical() {
    let args = [
        "scan", "--family", "erdos_renyi", "--n", "6..12", "--p", "0.4", "--count", "20", "--seed", "17", "--check",
        "main1,cheeger,kemeny_sandwich", "--format", "csv",
    ];
    let (c1, a, _) = call(&args);
    let (c2, b, _) = call(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(a.starts_with("theorem_id,n,params,hypothesis_ok,bound,measured,margin,holds\n"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["gap", "--family", "complete", "--k", "4", "--bogus"]).0, 2);
    assert_eq!(call(&["gap", "--family", "complete", "--k", "4", "--trials", "3"]).0, 2);
    assert_eq!(call(&["gap"]).0, 2);
    assert_eq!(call(&["gap", "--family", "nope", "--k", "4"]).0, 2);
    assert_eq!(call(&["gap", "--in", "/definitely/not/here.txt"]).0, 2);
    assert_eq!(call(&["verify", "--id", "main2", "--family", "path", "--k", "3"]).0, 2);
    assert_eq!(call(&["verify", "--id", "grm", "--r", "3", "--m", "5"]).0, 2);
    let (code, _, err) = call(&["gap", "--family", "empty", "--k", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("isolated"), "{err}");
}

#[test]
fn edge_list_input_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p4.txt");
    fs::write(&input, "# path on four vertices\n0 1\n1 2\n2 3\n").unwrap();
    let out = dir.path().join("c.txt");
    let (code, stdout, _) = call(&[
        "complement", "--in", input.to_str().unwrap(), "--format", "text", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    // P_4 is self-complementary: 1-3-0-2
    assert_eq!(text, "n=4\n0 2\n0 3\n1 3\n");
    let (code, both, _) = call(&["gap", "--in", input.to_str().unwrap(), "--family", "path", "--k", "4"]);
    assert_eq!(code, 2, "{both}");
    fs::write(&input, "0 0\n").unwrap();
    assert_eq!(call(&["gap", "--in", input.to_str().unwrap()]).0, 2);
}

#[test]
fn cheeger_certificate() {
    let (code, out, _) = call(&["cheeger", "--family", "two_cliques", "--k", "5"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["certificate"]["cut_size"], 4);
    assert_eq!(v["certificate"]["volume"], 16);
    assert_eq!(v["report"]["holds"], true);
}

#[test]
fn coupling_outputs() {
    let (code, out, _) = call(&[
        "coupling", "--family", "path", "--k", "3", "--tmax", "5", "--trials", "2000", "--start", "0,2",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!(v["marginal_error"].as_f64().unwrap() <= 1e-12);
    let exact = v["exact"]["tail"].as_array().unwrap();
    assert!((exact[1].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["monte_carlo"]["trials"], 2000);
    let (code, out, _) = call(&[
        "coupling", "--family", "complete", "--k", "2", "--type", "2", "--tmax", "2", "--trials", "0", "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "t,exact,tail,stderr\n0,1.0000000000000000,,\n1,0.0,,\n2,0.0,,\n");
    assert_eq!(call(&["coupling", "--family", "path", "--k", "3", "--type", "3"]).0, 2);
    // start vertex out of range
    assert_eq!(call(&["coupling", "--family", "path", "--k", "3", "--start", "0,9"]).0, 2);
}

#[test]
fn verify_variants() {
    for args in [
        &["verify", "--id", "main1", "--family", "path", "--k", "4"][..],
        &["verify", "--id", "diam3", "--family", "path", "--k", "4"],
        &["verify", "--id", "join", "--family", "join", "--k", "1", "--m", "4"],
        &["verify", "--id", "large_degree", "--family", "wheel", "--k", "5", "--K", "1"],
        &["verify", "--id", "degree_window", "--family", "cycle", "--k", "5", "--L", "0.3", "--U", "0.5"],
        &["verify", "--id", "kemeny_sandwich", "--family", "complete", "--k", "4"],
        &["verify", "--id", "counterexample_family", "--n", "24"],
        &["verify", "--id", "coupling_tv", "--family", "cycle", "--k", "6", "--type", "2", "--set", "common"],
    ] {
        let (code, out, err) = call(args);
        assert_eq!(code, 0, "{args:?}: {out} {err}");
    }
    let (code, out, _) = call(&["verify", "--id", "join", "--family", "complete", "--k", "5", "--n1", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    assert_eq!(call(&["verify", "--id", "join", "--family", "path", "--k", "4", "--n1", "2"]).0, 2);
}

#[test]
fn family_output() {
    let (code, out, _) = call(&["family", "--family", "g_rm", "--r", "3", "--m", "6"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["n"], 18);
    assert_eq!(v["edges_count"], 43);
    let (code, out, _) = call(&["family", "--family", "erdos_renyi", "--n", "6", "--p", "0.5", "--seed", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("u,v\n"));
}
