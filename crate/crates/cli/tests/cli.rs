use std::path::PathBuf;
use std::process::Command;

use opcalc::chain::Betti;
use opcalc::exactlin::Field;
use opcalc_cli::build::resolve;
use opcalc_cli::run::{run, RunOptions};
use opcalc_cli::spec::{parse, SpecFile};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn opts() -> RunOptions {
    RunOptions {
        threads: 2,
        ..RunOptions::default()
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opcalc"))
}

const COMPLEX_HEADER: &str = "field = Q\n\n[operad Com]\nbuiltin com\n\n";

#[test]
fn fixtures_parse_and_resolve() {
    for f in ["com_free.spec", "aq_square.spec", "checks.spec", "table.spec"] {
        let spec = parse(&read(f)).unwrap_or_else(|e| panic!("{f}: {e:?}"));
        resolve(&spec, None).unwrap_or_else(|e| panic!("{f}: {e:?}"));
    }
}

#[test]
fn serializing_and_reparsing_is_the_identity() {
    for f in ["com_free.spec", "aq_square.spec", "checks.spec", "table.spec"] {
        let spec = parse(&read(f)).unwrap();
        let text = spec.to_string();
        let again: SpecFile = parse(&text).unwrap();
        assert_eq!(spec, again, "{f}");
        assert_eq!(text, again.to_string(), "{f}");
    }
}

#[test]
fn coefficients_round_trip() {
    let text = "field = Q\n\n[complex C]\ngen a 1\ngen b 0\ngen c 0\nd a = 2/3 b - 3 c\n";
    let spec = parse(text).unwrap();
    let out = spec.to_string();
    assert!(out.contains("d a = 2/3*b - 3*c"), "{out}");
    assert_eq!(parse(&out).unwrap(), spec);
}

#[test]
fn a_differential_that_does_not_square_to_zero_is_located() {
    let text = "field = Q\n\n[complex C]\ngen a 2\ngen b 1\ngen c 0\nd a = b\nd b = c\n";
    let spec = parse(text).unwrap();
    let errs = resolve(&spec, None).unwrap_err();
    assert_eq!(errs.len(), 1, "{errs:?}");
    assert!(errs[0].line == 7 || errs[0].line == 8, "{}", errs[0]);
}

#[test]
fn undeclared_operads_are_unresolved_references() {
    let text = "field = Q\n\n[complex V]\ngen x 2\n\n[algebra A]\noperad Lie\nfree V 6\n";
    let errs = resolve(&parse(text).unwrap(), None).unwrap_err();
    assert!(errs.iter().any(|e| e.line == 7 && e.message.contains("Lie")), "{errs:?}");
}

#[test]
fn syntax_errors_carry_columns() {
    let errs = parse("field = Q\n\n[complex C]\ngen a two\n").unwrap_err();
    assert_eq!(errs[0].line, 4);
    assert!(errs[0].col > 1);
}

#[test]
fn tq_of_a_free_algebra_is_its_generators() {
    let spec = parse(&read("com_free.spec")).unwrap();
    let env = resolve(&spec, None).unwrap();
    let report = run(&env, &spec, &opts());
    let job = report.jobs.iter().find(|j| j.kind == "tq").unwrap();
    assert!(job.pass, "{job:?}");
    assert_eq!(job.tables["betti"].betti, Betti::from_pairs(&[(2, 1)]));
    assert_eq!(job.tables["betti"].valid_through, 8);
}

#[test]
fn the_zero_complex_has_an_empty_table() {
    let text = format!("{COMPLEX_HEADER}[complex Z]\n\n[job h]\nkind homology\ncomplex = Z\nexpect betti = 0\n");
    let spec = parse(&text).unwrap();
    let env = resolve(&spec, None).unwrap();
    let report = run(&env, &spec, &opts());
    assert!(report.pass, "{report:?}");
    assert!(report.jobs[0].tables["betti"].betti.is_zero());
}

#[test]
fn the_field_can_be_overridden() {
    let spec = parse(&read("table.spec")).unwrap();
    let env = resolve(&spec, Some(Field::Fp(5))).unwrap();
    assert_eq!(env.field, Field::Fp(5));
    assert_eq!(run(&env, &spec, &opts()).field, "Fp:5");
}

#[test]
fn job_errors_name_the_job() {
    let text = format!("{COMPLEX_HEADER}[job bad]\nkind tq\nalgebra = Nope\n");
    let spec = parse(&text).unwrap();
    let env = resolve(&spec, None).unwrap();
    let report = run(&env, &spec, &opts());
    assert!(!report.pass);
    let err = report.jobs[0].error.as_deref().unwrap();
    assert!(err.contains("bad") && err.contains("Nope"), "{err}");
}

#[test]
fn pairing_index_and_corner_checks_pass() {
    let spec = parse(&read("checks.spec")).unwrap();
    let env = resolve(&spec, None).unwrap();
    let report = run(&env, &spec, &opts());
    assert!(report.pass, "{report:?}");
}

#[test]
fn exit_codes() {
    let ok = bin().args(["run"]).arg(fixture("table.spec")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let dir = std::env::temp_dir().join(format!("opcalc-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let failing = dir.join("failing.spec");
    std::fs::write(&failing, "field = Q\n\n[complex V]\ngen x 2\n\n[job h]\nkind homology\ncomplex = V\nexpect betti = 3:1\n").unwrap();
    let fail = bin().arg("run").arg(&failing).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));

    let broken = dir.join("broken.spec");
    std::fs::write(&broken, "field = Q\n[complex\n").unwrap();
    let bad = bin().arg("check").arg(&broken).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&bad.stderr);
    assert!(msg.contains(":2:"), "{msg}");

    let usage = bin().args(["run", "--field", "R"]).arg(fixture("table.spec")).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reports_are_byte_identical_and_csv_is_written() {
    let dir = std::env::temp_dir().join(format!("opcalc-det-{}", std::process::id()));
    let mut reports = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.join(k.to_string());
        let st = bin()
            .args(["run", "--csv", "--threads", threads, "--out"])
            .arg(&out)
            .arg(fixture("com_free.spec"))
            .status()
            .unwrap();
        assert!(st.success());
        reports.push(std::fs::read(out.join("report.json")).unwrap());
        let csv = std::fs::read_to_string(out.join("tq-of-free.csv")).unwrap();
        assert_eq!(csv, "table,degree,rank,valid_through\nbetti,2,1,8\n");
    }
    assert_eq!(reports[0], reports[1]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn extra_jobs_are_appended() {
    let dir = std::env::temp_dir().join(format!("opcalc-jobs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let jobs = dir.join("jobs.spec");
    std::fs::write(&jobs, "[job again]\nkind homology\nalgebra = T\n").unwrap();
    let out = bin().arg("run").arg("--jobs").arg(&jobs).arg(fixture("table.spec")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["jobs"].as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fmt_prints_the_canonical_form() {
    let out = bin().arg("fmt").arg(fixture("aq_square.spec")).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(parse(&text).unwrap(), parse(&read("aq_square.spec")).unwrap());
}
