//! End-to-end runs of the command line: golden reports, exit codes and
//! error messages.
//!
//! Set `INJCERT_BLESS=1` to rewrite the golden files.

use std::path::PathBuf;
use std::process::Command;

use injcert::report::{CertificateDoc, Report};
use injcert_core::injectivity::verify_witness;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(format!("{}/tests/golden/{name}.json", env!("CARGO_MANIFEST_DIR")))
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut argv = vec!["injcert".to_string()];
    argv.extend(args.iter().map(|a| a.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = injcert::cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

struct Case {
    name: &'static str,
    args: Vec<String>,
    code: i32,
}

fn case(name: &'static str, args: &[&str], code: i32) -> Case {
    let args = args
        .iter()
        .map(|a| match a.split_once('@') {
            Some((pre, file)) => format!("{pre}{}", data(file)),
            None => a.to_string(),
        })
        .collect();
    Case { name, args, code }
}

fn cases() -> Vec<Case> {
    vec![
        case("scaled_full", &["monomial", "--B", "@b_2x2.txt", "--S", "full"], 0),
        case("positive_box_full", &["interval", "--D", "@d_positive_2x2.txt", "--S", "full"], 1),
        case("positive_box_diagonal", &["interval", "--D", "@d_positive_2x2.txt", "--S", "im:@v_diagonal.txt"], 0),
        case("lower_triangular_box", &["interval", "--D", "@d_lower_triangular.txt", "--S", "full"], 0),
        case("lower_triangular_signs", &["monotonic", "--W", "@w_lower_triangular.txt", "--S", "full"], 0),
        case("narrow_box", &["interval", "--D", "@d_box.txt", "--S", "full"], 0),
        case("stacked_box", &["interval", "--D", "@d_stacked.txt", "--A", "@a_stacked.txt", "--S", "full"], 0),
        case("difference_full", &["interval", "--D", "@d_diag.txt", "--A", "@a_difference.txt", "--S", "full"], 1),
        case(
            "difference_diagonal",
            &["interval", "--D", "@d_diag.txt", "--A", "@a_difference.txt", "--S", "im:@v_diagonal.txt"],
            0,
        ),
        case("mixed_signs_plane", &["monotonic", "--W", "@w_mixed.txt", "--S", "ker:@z_plane.txt"], 1),
        case("binding_mass_action", &["crn", "@binding.crn"], 0),
        case("binding_weak", &["crn", "@binding.crn", "--mode", "monotonic-weak"], 1),
        case("dimer", &["crn", "@dimer.crn", "--mode", "mass-action"], 0),
        case(
            "falsify_box",
            &["falsify", "--D", "@d_positive_2x2.txt", "--S", "full", "--trials", "1000", "--seed", "7"],
            1,
        ),
        case("falsify_scaled", &["falsify", "--B", "@b_2x2.txt", "--S", "full", "--trials", "1000"], 2),
    ]
}

#[test]
fn golden_reports() {
    let bless = std::env::var_os("INJCERT_BLESS").is_some();
    for c in cases() {
        let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
        let r = run(&args);
        assert_eq!(r.code, c.code, "{}: {}", c.name, r.err);
        let path = golden(c.name);
        if bless {
            std::fs::write(&path, &r.out).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
        assert_eq!(r.out, expected, "{} differs from its golden report", c.name);
        let again = run(&args);
        assert_eq!(again.out, r.out, "{} is not reproducible", c.name);
    }
}

#[test]
fn exit_codes_match_report_status() {
    for c in cases() {
        let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
        let r = run(&args);
        let report: Report = serde_json::from_str(&r.out).unwrap();
        let expected = match report.status.as_str() {
            "INJECTIVE" => 0,
            "NOT_INJECTIVE" => 1,
            "INCONCLUSIVE" => 2,
            s => panic!("unknown status {s}"),
        };
        assert_eq!(r.code, expected, "{}", c.name);
    }
}

#[test]
fn witnesses_in_reports_verify_against_the_echoed_problem() {
    let mut seen = 0;
    for c in cases() {
        let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
        let report: Report = serde_json::from_str(&run(&args).out).unwrap();
        let problem = report.input.problem.to_problem().unwrap();
        if let Some(CertificateDoc::SingularWitness(w)) = &report.certificate {
            assert!(verify_witness(&problem, &w.to_witness().unwrap()), "{}", c.name);
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn scaled_report_carries_the_determinant_table() {
    let r = run(&["monomial", "--B", &data("b_2x2.txt"), "--S", "full"]);
    let report: Report = serde_json::from_str(&r.out).unwrap();
    assert_eq!((report.status.as_str(), report.method.as_str()), ("INJECTIVE", "DET_ROUTE"));
    let Some(CertificateDoc::MonomialTable { sign, terms, .. }) = report.certificate else {
        panic!("expected a monomial table");
    };
    assert_eq!(sign, "NEG");
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0].coefficient, "-1");
}

#[test]
fn narrow_box_has_exact_vertex_maximum() {
    let r = run(&["interval", "--D", &data("d_box.txt"), "--S", "full"]);
    let report: Report = serde_json::from_str(&r.out).unwrap();
    let Some(CertificateDoc::VertexTable { sign, cells, .. }) = report.certificate else {
        panic!("expected a vertex table");
    };
    assert_eq!(sign, "NEG");
    let values: Vec<String> = cells[0].vertices.iter().map(|v| v.value.clone()).collect();
    assert!(values.contains(&"-427/1000".to_string()), "{values:?}");
}

#[test]
fn network_reports_name_mode_and_domain() {
    let r = run(&["crn", &data("binding.crn"), "--mode", "monotonic-weak"]);
    let report: Report = serde_json::from_str(&r.out).unwrap();
    let net = report.input.network.expect("network echo");
    assert_eq!(net.mode, "MONOTONIC_WEAK");
    assert_eq!(net.species, ["A", "B", "C"]);
    assert!(net.domain_note.contains("positive orthant"));
    assert!(net.reactions.iter().any(|l| l.starts_with("bind_rev:")));
}

#[test]
fn signs_of_the_diagonal() {
    let r = run(&["signs", "--S", &format!("im:{}", data("v_diagonal.txt"))]);
    let mut lines: Vec<&str> = r.out.lines().collect();
    lines.sort_unstable();
    assert_eq!((r.code, lines), (0, vec!["++", "--"]));
    let plane = run(&["signs", "--S", &format!("ker:{}", data("z_plane.txt"))]);
    assert_eq!(plane.out.lines().count(), 12);
    let full = run(&["signs", "--S", "full", "--dim", "2"]);
    assert_eq!(full.out.lines().count(), 8);
}

#[test]
fn report_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let args = ["interval", "--D", &data("d_positive_2x2.txt"), "--S", "full"];
    let direct = run(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["--report", p]);
    let r = run(&with_file);
    assert_eq!(r.code, 1);
    assert_eq!(r.out, "NOT_INJECTIVE via DET_ROUTE\n");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct.out);
}

#[test]
fn timings_are_opt_in() {
    let args = ["monomial", "--B", &data("b_2x2.txt"), "--S", "full"];
    assert!(!run(&args).out.contains("wall_time_ms"));
    let mut timed = args.to_vec();
    timed.push("--timings");
    assert!(run(&timed).out.contains("wall_time_ms"));
}

#[test]
fn caps_are_reported_and_enforced() {
    let r = run(&["signs", "--S", "full", "--dim", "3", "--max-sign-dim", "2"]);
    assert_eq!(r.code, 70, "{}", r.err);
    assert!(r.err.contains("cap"), "{}", r.err);
    let r = run(&["monomial", "--B", &data("b_2x2.txt"), "--S", "full", "--max-monomials", "7"]);
    let report: Report = serde_json::from_str(&r.out).unwrap();
    assert_eq!(report.diagnostics.caps.monomials, "7");
}

#[test]
fn errors_map_to_exit_codes() {
    let r = run(&["monomial", "--B", &data("bad_token.txt"), "--S", "full"]);
    assert_eq!(r.code, 65);
    assert!(r.err.contains("bad_token.txt:2:3"), "{}", r.err);

    let r = run(&["monomial", "--B", &data("missing.txt"), "--S", "full"]);
    assert_eq!(r.code, 66);
    assert!(r.err.contains("missing.txt"), "{}", r.err);

    assert_eq!(run(&["monomial", "--B", &data("b_2x2.txt")]).code, 64);
    assert_eq!(run(&["monomial", "--B", &data("b_2x2.txt"), "--S", "span:x"]).code, 64);
    assert_eq!(run(&["falsify", "--B", &data("b_2x2.txt"), "--W", &data("w_mixed.txt"), "--S", "full"]).code, 64);
    assert_eq!(run(&["bogus"]).code, 64);
    assert_eq!(run(&["signs", "--S", "full"]).code, 64);

    let r = run(&["crn", &data("no_orders.crn"), "--mode", "power-law"]);
    assert_eq!(r.code, 65);
    assert!(r.err.contains("orders"), "{}", r.err);

    // 3 columns of W against a 2-dimensional S.
    let r = run(&["monotonic", "--W", &data("w_mixed.txt"), "--S", &format!("im:{}", data("v_diagonal.txt"))]);
    assert_eq!(r.code, 65, "{}", r.err);
}

#[test]
fn help_exits_cleanly() {
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    for sub in ["monomial", "monotonic", "interval", "crn", "signs", "falsify"] {
        assert!(r.out.contains(sub), "{sub}");
    }
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_injcert");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["monomial", "--B", &data("b_2x2.txt"), "--S", "full"]), Some(0));
    assert_eq!(status(&["interval", "--D", &data("d_positive_2x2.txt"), "--S", "full"]), Some(1));
    assert_eq!(status(&["monomial", "--B", &data("bad_token.txt"), "--S", "full"]), Some(65));
    assert_eq!(status(&["nope"]), Some(64));
}
