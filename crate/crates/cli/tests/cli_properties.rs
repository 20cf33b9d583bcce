use fracdiff::{emit, parse_spec, run, Command, JobSpec, Spec, SpecFile};
use fracdiff_core::diffraction::{random_atom, random_basis};
use fracdiff_core::strings::ratio;
use fracdiff_core::{DirichletPolynomial, IdealCrystal, LatticeBasis, Scalar, StringSpec, TestFunction};
use num::{BigInt, BigRational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(100)
}

fn rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, q_max: i64) -> Scalar {
    let q = rng.gen_range(1..=q_max);
    ratio(rng.gen_range(lo * q..=hi * q), q)
}

fn random_string(rng: &mut ChaCha8Rng) -> StringSpec {
    loop {
        let n = rng.gen_range(1..=3usize);
        let ratios: Vec<Scalar> = (0..n).map(|_| ratio(1, rng.gen_range(2..=9))).collect();
        let gaps_count = rng.gen_range(1..=2usize);
        let used: BigRational = ratios.iter().filter_map(|r| r.as_rational().cloned()).sum();
        let rest = BigRational::from_integer(BigInt::from(1)) - used;
        if rest <= BigRational::from_integer(BigInt::from(0)) {
            continue;
        }
        let share = rest / BigRational::from_integer(BigInt::from(gaps_count as i64));
        let gaps = vec![Scalar::Rational(share); gaps_count];
        let length = ratio(rng.gen_range(1..=20), rng.gen_range(1..=5));
        if let Ok(spec) = StringSpec::validate(length, ratios, gaps, false) {
            return spec;
        }
    }
}

fn random_dirichlet(rng: &mut ChaCha8Rng) -> DirichletPolynomial {
    loop {
        let count = rng.gen_range(1..=3usize);
        let mut ks: Vec<i64> = (0..count).map(|_| rng.gen_range(1..=6)).collect();
        ks.sort_unstable();
        ks.dedup();
        let terms = ks
            .into_iter()
            .map(|k| (BigRational::from_integer(BigInt::from(k)), rng.gen_range(1..=3u64)))
            .collect();
        let r = ratio(1, rng.gen_range(2..=5));
        if let Ok(p) = DirichletPolynomial::normalize(r, terms) {
            return p;
        }
    }
}

fn random_crystal(rng: &mut ChaCha8Rng, floats: bool) -> IdealCrystal {
    loop {
        let m = rng.gen_range(1..=2usize);
        let d = rng.gen_range(0..=1usize);
        let count = rng.gen_range(1..=3usize);
        let result = if floats {
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|i| (0..m).map(|j| if i == j { rng.gen_range(0.5..2.0) } else { rng.gen_range(-0.3..0.3) }).collect())
                .collect();
            let translates: Vec<Vec<f64>> =
                (0..count).map(|_| (0..m + d).map(|_| rng.gen_range(-0.4..0.4)).collect()).collect();
            LatticeBasis::from_f64_rows(&rows).and_then(|b| IdealCrystal::from_f64(b, d, &translates))
        } else {
            let translates = (0..count).map(|_| (0..m + d).map(|_| rational(rng, -1, 1, 5)).collect()).collect();
            IdealCrystal::new(random_basis(rng, m), d, translates)
        };
        if let Ok(c) = result {
            return c;
        }
    }
}

fn random_file(seed: u64) -> SpecFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = rng.gen_range(0..4);
    let approx = kind == 3;
    let spec = match kind {
        0 => Spec::String(random_string(&mut rng)),
        1 => Spec::Dirichlet(random_dirichlet(&mut rng)),
        _ => Spec::Crystal(random_crystal(&mut rng, approx)),
    };
    let atoms = match &spec {
        Spec::Crystal(c) if rng.gen_bool(0.5) => {
            let n = rng.gen_range(1..=3);
            Some(TestFunction::new((0..n).map(|_| random_atom(&mut rng, c.ambient_dim())).collect()).unwrap())
        }
        _ => None,
    };
    SpecFile { spec, atoms, approx }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn emitted_specs_parse_back(seed in any::<u64>()) {
        let file = random_file(seed);
        let text = emit(&file);
        let parsed = parse_spec(&text).unwrap();
        prop_assert_eq!(&parsed, &file);
        prop_assert_eq!(emit(&parsed), text);
    }
}

fn read_all(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn run_twice(command: Command, input: Option<&str>, tweak: impl Fn(&mut JobSpec)) -> Vec<(String, Vec<u8>)> {
    let tmp = tempfile::tempdir().unwrap();
    let input_path = input.map(|text| {
        let path = tmp.path().join("input.json");
        std::fs::write(&path, text).unwrap();
        path
    });
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let mut job = JobSpec::new(command, input_path.clone(), tmp.path().join(name));
        tweak(&mut job);
        run(&job).unwrap();
        outputs.push(read_all(&job.output_dir));
    }
    assert_eq!(outputs[0], outputs[1], "{} output differs between runs", command.name());
    outputs.remove(0)
}

const EXAMPLE: &str = r#"{"string": {"L": "8/3", "ratios": ["1/2","1/8"], "gaps": ["3/8"]}}"#;

#[test]
fn identical_jobs_write_identical_bytes() {
    for (command, expected) in [
        (Command::Dims, vec!["dims.svg", "roots.csv", "summary.json"]),
        (Command::Zeta, vec!["lengths.csv", "partial_sums.csv", "zeta.csv"]),
        (Command::Autocorr, vec!["autocorr.csv"]),
        (Command::Diffract, vec!["comb.csv", "comb.svg"]),
    ] {
        let files = run_twice(command, Some(EXAMPLE), |job| job.scale = 200.0);
        let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, expected);
    }
    let files = run_twice(Command::PsfCheck, None, |job| job.seed = 11);
    assert_eq!(files.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn seeded_psf_reports_are_reproducible(seed in 0u64..1_000_000) {
        let tmp = tempfile::tempdir().unwrap();
        let mut texts = Vec::new();
        for name in ["a", "b"] {
            let mut job = JobSpec::new(Command::PsfCheck, None, tmp.path().join(name));
            job.seed = seed;
            job.eps = 1e-8;
            run(&job).unwrap();
            texts.push(std::fs::read(job.output_dir.join("report.json")).unwrap());
        }
        prop_assert_eq!(&texts[0], &texts[1]);
    }

    #[test]
    fn crystal_csv_and_svg_are_reproducible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let crystal = random_crystal(&mut rng, false);
        let text = emit(&SpecFile { spec: Spec::Crystal(crystal), atoms: None, approx: false });
        let tmp = tempfile::tempdir().unwrap();
        let input = tmp.path().join("input.json");
        std::fs::write(&input, text).unwrap();
        let mut outputs = Vec::new();
        for name in ["a", "b"] {
            let mut job = JobSpec::new(Command::Diffract, Some(input.clone()), tmp.path().join(name));
            job.b_max = 1.0;
            run(&job).unwrap();
            let mut job = JobSpec::new(Command::Autocorr, Some(input.clone()), tmp.path().join(name));
            job.scale = 10.0;
            run(&job).unwrap();
            outputs.push(read_all(&tmp.path().join(name)));
        }
        prop_assert_eq!(&outputs[0], &outputs[1]);
    }
}
