use std::path::{Path, PathBuf};
use std::process::Command as Process;

use fracdiff::{parse_spec, run, CliError, Command, JobSpec, Spec};
use fracdiff_core::strings::ratio;
use fracdiff_core::StringSpec;
use serde_json::Value;

const EXAMPLE: &str = r#"{"string": {"L": "8/3", "ratios": ["1/2","1/8"], "gaps": ["3/8"]}}"#;
const INTEGERS: &str = r#"{"crystal": {"basis": [["1"]], "translates": [["0"]]}}"#;

struct Job {
    _tmp: tempfile::TempDir,
    job: JobSpec,
}

fn job(command: Command, input: Option<&str>) -> Job {
    let tmp = tempfile::tempdir().unwrap();
    let input = input.map(|text| {
        let path = tmp.path().join("input.json");
        std::fs::write(&path, text).unwrap();
        path
    });
    let job = JobSpec::new(command, input, tmp.path().join("out"));
    Job { _tmp: tmp, job }
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn number(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn example_string_parses_to_validated_spec() {
    let file = parse_spec(EXAMPLE).unwrap();
    let expected = StringSpec::validate(ratio(8, 3), vec![ratio(1, 2), ratio(1, 8)], vec![ratio(3, 8)], false).unwrap();
    assert_eq!(file.spec, Spec::String(expected));
    assert!(file.atoms.is_none());
}

#[test]
fn dirichlet_input_gives_cubic() {
    let file = parse_spec(r#"{"dirichlet": {"r": "1/2", "terms": [[1,1],[3,1]]}}"#).unwrap();
    match file.spec {
        Spec::Dirichlet(p) => assert_eq!(p.to_polynomial().to_string(), "1 - z - z^3"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn gaps_past_one_are_rejected() {
    let err = parse_spec(r#"{"string": {"L": "1", "ratios": ["1/2","1/4"], "gaps": ["1/2"]}}"#).unwrap_err();
    assert!(matches!(err, CliError::Core(fracdiff_core::Error::ConstraintViolation(_))), "{err:?}");
    assert_eq!(err.to_json()["error"]["kind"], "ConstraintViolation");
}

#[test]
fn schema_errors_carry_line_and_field() {
    let err = parse_spec("{\"string\": {\"L\": \"1\",\n \"ratios\": [0.5, \"1/4\"], \"gaps\": [\"1/4\"]}}").unwrap_err();
    match &err {
        CliError::Schema { line, field, .. } => {
            assert_eq!(*line, 2);
            assert_eq!(field, "string.ratios[0]");
        }
        other => panic!("{other:?}"),
    }
    assert!(parse_spec(r#"{"string": {}, "crystal": {}}"#).is_err());
    assert!(parse_spec("{").is_err());
}

#[test]
fn dims_window_for_example() {
    let mut j = job(Command::Dims, Some(EXAMPLE));
    j.job.t_max = 35.0;
    run(&j.job).unwrap();
    let (header, rows) = csv_rows(&j.job.output_dir.join("roots.csv"));
    assert_eq!(header, ["re", "im", "line_index", "n", "multiplicity"]);
    let lines: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(lines.len(), 3);
    let p = 9.06472;
    let real: Vec<&Vec<String>> = rows.iter().filter(|r| (number(&r[0]) - 0.551463).abs() < 1e-6).collect();
    assert_eq!(real.len(), 7);
    for row in &real {
        let n: i64 = row[3].parse().unwrap();
        assert!((-3..=3).contains(&n));
        assert!((number(&row[1]) - n as f64 * p).abs() < 1e-4 * (1 + n.abs()) as f64);
    }
    for row in &rows {
        assert!(number(&row[1]).abs() <= 35.0);
        assert!(row[0].trim_start_matches('-').replace(['.', 'e'], "").len() <= 14);
    }

    let svg = std::fs::read_to_string(j.job.output_dir.join("dims.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="point""#).count(), rows.len());
    let summary = json(j.job.output_dir.join("summary.json"));
    assert_eq!(summary["polynomial"], "1 - z - z^3");
    assert_eq!(summary["generator"], "1/2");
}

#[test]
fn autocorrelation_of_integers() {
    let mut j = job(Command::Autocorr, Some(INTEGERS));
    j.job.scale = 1000.0;
    run(&j.job).unwrap();
    let (header, rows) = csv_rows(&j.job.output_dir.join("autocorr.csv"));
    assert_eq!(header, ["a1", "N_L", "n_hat", "closed_form", "abs_err"]);
    assert_eq!(rows[0], ["0", "1001", "1.001", "1", "0.001"]);
}

#[test]
fn default_psf_check_passes() {
    let j = job(Command::PsfCheck, None);
    run(&j.job).unwrap();
    let report = json(j.job.output_dir.join("report.json"));
    assert_eq!(report["trials"].as_array().unwrap().len(), 50);
    assert!(report["max_diff"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["passed"], true);
}

#[test]
fn integer_comb_has_seven_equal_stems() {
    let mut j = job(Command::Diffract, Some(INTEGERS));
    j.job.b_max = 3.0;
    run(&j.job).unwrap();
    let (_, rows) = csv_rows(&j.job.output_dir.join("comb.csv"));
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r[2] == rows[0][2]));
    let svg = std::fs::read_to_string(j.job.output_dir.join("comb.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="stem""#).count(), 7);
}

#[test]
fn atoms_produce_diffraction_values() {
    let text = r#"{"crystal": {"basis": [["1"]], "d": 1, "translates": [["0", "0"], ["1/2", "1/3"]]},
                   "atoms": [{"center": [0.1, 0], "scales": [1, 1]}]}"#;
    let j = job(Command::Diffract, Some(text));
    run(&j.job).unwrap();
    let values = json(j.job.output_dir.join("values.json"));
    assert!(values["difference"].as_f64().unwrap() < 1e-9);
}

#[test]
fn wrong_input_kind_is_reported() {
    let j = job(Command::Zeta, Some(INTEGERS));
    assert!(matches!(run(&j.job), Err(CliError::WrongInput { .. })));
}

#[test]
fn binary_reports_errors_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("bad.json");
    std::fs::write(&input, r#"{"string": {"L": "1", "ratios": ["1/2","1/4"], "gaps": ["1/2"]}}"#).unwrap();
    let output = Process::new(env!("CARGO_BIN_EXE_fracdiff"))
        .args(["dims", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err: Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "ConstraintViolation");

    let output = Process::new(env!("CARGO_BIN_EXE_fracdiff"))
        .args(["psf-check", "--eps", "2", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err: Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "InvalidOption");
}

#[test]
fn binary_writes_files() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("ex.json");
    std::fs::write(&input, EXAMPLE).unwrap();
    let out = tmp.path().join("out");
    let status = Process::new(env!("CARGO_BIN_EXE_fracdiff"))
        .args(["zeta", "--depth", "8", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = csv_rows(&out.join("partial_sums.csv"));
    assert_eq!(header[0], "s");
    assert_eq!(rows.len(), 4);
}
