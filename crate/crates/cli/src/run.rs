//! The five pipelines behind the `fracdiff` subcommands.

use std::path::{Path, PathBuf};

use fracdiff_core::correlation::{autocorrelation_apply, count_displacements, empirical_frequency};
use fracdiff_core::diffraction::{diffraction_apply, diffraction_comb, fourier_transform, psf_check, psf_trials};
use fracdiff_core::dirichlet::{tile_roots, ComplexDimension};
use fracdiff_core::strings::partial_zeta;
use fracdiff_core::{DirichletPolynomial, IdealCrystal, RootSet, SolverConfig, TestFunction};
use num::complex::Complex64;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::spec_io::{parse_spec, Spec, SpecFile};
use crate::svg::{render_svg, PlotStyle, Series};
use crate::table::{format_number, Table};

pub const DEFAULT_T_MAX: f64 = 35.0;
pub const DEFAULT_SCALE: f64 = 1000.0;
pub const DEFAULT_B_MAX: f64 = 5.0;
pub const DEFAULT_EPS: f64 = 1e-12;
pub const DEFAULT_DEPTH: u32 = 10;
pub const PSF_TRIALS: usize = 50;
/// Reported PSF trials pass when `|lhs - rhs| ≤ PSF_TOL (1 + |lhs|)`.
pub const PSF_TOL: f64 = 1e-10;
const ZETA_GRID_RE: usize = 41;
const ZETA_GRID_IM: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dims,
    Zeta,
    Autocorr,
    Diffract,
    PsfCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dims => "dims",
            Command::Zeta => "zeta",
            Command::Autocorr => "autocorr",
            Command::Diffract => "diffract",
            Command::PsfCheck => "psf-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub t_max: f64,
    /// Averaging scale `L`.
    pub scale: f64,
    pub b_max: f64,
    pub eps: f64,
    pub depth: u32,
    pub seed: u64,
}

impl JobSpec {
    pub fn new(command: Command, input: Option<PathBuf>, output_dir: PathBuf) -> Self {
        Self {
            command,
            input,
            output_dir,
            t_max: DEFAULT_T_MAX,
            scale: DEFAULT_SCALE,
            b_max: DEFAULT_B_MAX,
            eps: DEFAULT_EPS,
            depth: DEFAULT_DEPTH,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |option, message: String| Err(CliError::InvalidOption { option, message });
        if !(self.t_max.is_finite() && (0.0..=1e4).contains(&self.t_max)) {
            return bad("--t-max", format!("{} is outside [0, 1e4]", self.t_max));
        }
        if !(self.scale.is_finite() && self.scale > 0.0 && self.scale <= 1e7) {
            return bad("--L", format!("{} is outside (0, 1e7]", self.scale));
        }
        if !(self.b_max.is_finite() && self.b_max > 0.0 && self.b_max <= 1e4) {
            return bad("--b-max", format!("{} is outside (0, 1e4]", self.b_max));
        }
        if !(self.eps >= 1e-15 && self.eps < 1.0) {
            return bad("--eps", format!("{} is outside [1e-15, 1)", self.eps));
        }
        if self.depth > 40 {
            return bad("--depth", format!("{} exceeds 40", self.depth));
        }
        if self.input.is_none() && self.command != Command::PsfCheck {
            return bad("--in", format!("{} needs an input file", self.command.name()));
        }
        Ok(())
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            ..SolverConfig::default()
        }
    }
}

/// Runs the job and returns the files written.
pub fn run(job: &JobSpec) -> Result<Vec<PathBuf>, CliError> {
    job.validate()?;
    let file = match &job.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Some(parse_spec(&text)?)
        }
        None => None,
    };
    std::fs::create_dir_all(&job.output_dir).map_err(|e| CliError::io(&job.output_dir, e))?;
    let mut out = Output {
        dir: &job.output_dir,
        written: Vec::new(),
    };
    match (job.command, file) {
        (Command::PsfCheck, file) => psf(job, file.as_ref(), &mut out)?,
        (command, Some(file)) => match command {
            Command::Dims => dims(job, &file, &mut out)?,
            Command::Zeta => zeta(job, &file, &mut out)?,
            Command::Autocorr => autocorr(job, &file, &mut out)?,
            Command::Diffract => diffract(job, &file, &mut out)?,
            Command::PsfCheck => unreachable!(),
        },
        (_, None) => unreachable!("validated above"),
    }
    Ok(out.written)
}

struct Output<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Output<'_> {
    fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        self.text(name, &table.to_csv())
    }

    fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
        text.push('\n');
        self.text(name, &text)
    }
}

fn wrong(command: Command, file: &SpecFile) -> CliError {
    CliError::WrongInput {
        command: command.name(),
        kind: file.spec.kind(),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// The crystal a pipeline works on: given directly, or the complex
/// dimensions of a lattice string.
fn crystal_of(job: &JobSpec, file: &SpecFile) -> Result<IdealCrystal, CliError> {
    match &file.spec {
        Spec::Crystal(c) => Ok(c.clone()),
        Spec::String(s) => Ok(s.dimension_crystal(0.0, &job.solver())?.crystal),
        Spec::Dirichlet(_) => Err(wrong(job.command, file)),
    }
}

fn dims(job: &JobSpec, file: &SpecFile, out: &mut Output) -> Result<(), CliError> {
    let (poly, set, window): (&DirichletPolynomial, RootSet, Vec<ComplexDimension>) = match &file.spec {
        Spec::String(s) => {
            let dc = s.dimension_crystal(job.t_max, &job.solver())?;
            (s.lattice_form(), dc.roots, dc.window)
        }
        Spec::Dirichlet(p) => {
            let set = p.root_set(&job.solver())?;
            let window = tile_roots(&set, job.t_max);
            (p, set, window)
        }
        Spec::Crystal(_) => return Err(wrong(job.command, file)),
    };
    let strip = poly.strip_bounds()?;

    let mut roots = Table::new(&["re", "im", "line_index", "n", "multiplicity"]);
    for c in &window {
        roots.push(vec![
            format_number(c.value.re),
            format_number(c.value.im),
            c.line.to_string(),
            c.n.to_string(),
            c.multiplicity.to_string(),
        ]);
    }
    out.table("roots.csv", &roots)?;

    let summary = json!({
        "polynomial": poly.to_polynomial().to_string(),
        "generator": poly.generator_scalar().to_string(),
        "period": set.period,
        "dimension": strip.dimension,
        "lower_bound": strip.lower,
        "residual_bound": set.residual_bound,
        "principal_roots": set.lines.iter().map(|l| json!({
            "omega": complex_json(l.omega),
            "multiplicity": l.multiplicity,
        })).collect::<Vec<_>>(),
        "t_max": job.t_max,
        "window_points": window.len(),
    });
    out.json("summary.json", &summary)?;

    let style = PlotStyle {
        title: format!("Complex dimensions, |Im s| <= {}", format_number(job.t_max)),
        x_label: "Re s".into(),
        y_label: "Im s".into(),
        ..PlotStyle::default()
    };
    let points = window.iter().map(|c| (c.value.re, c.value.im)).collect();
    out.text("dims.svg", &render_svg(&Series::Points(points), &style))
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn zeta(job: &JobSpec, file: &SpecFile, out: &mut Output) -> Result<(), CliError> {
    let Spec::String(spec) = &file.spec else {
        return Err(wrong(job.command, file));
    };
    let strip = spec.lattice_form().strip_bounds()?;

    let mut grid = Table::new(&["re", "im", "zeta_re", "zeta_im", "abs"]);
    for re in linspace(strip.lower - 1.0, strip.dimension + 1.0, ZETA_GRID_RE) {
        for im in linspace(-job.t_max, job.t_max, ZETA_GRID_IM) {
            let z = spec.geometric_zeta(Complex64::new(re, im)).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            grid.push_numbers(&[re, im, z.re, z.im, z.norm()]);
        }
    }
    out.table("zeta.csv", &grid)?;

    let lengths = spec.enumerate_lengths(job.depth)?;
    let mut table = Table::new(&["length", "exact", "count"]);
    let mut i = 0;
    while i < lengths.len() {
        let run = lengths[i..].iter().take_while(|l| **l == lengths[i]).count();
        table.push(vec![format_number(lengths[i].value()), lengths[i].to_string(), run.to_string()]);
        i += run;
    }
    out.table("lengths.csv", &table)?;

    let mut sums = Table::new(&["s", "partial_sum", "zeta", "abs_err", "tail_bound"]);
    for s in [strip.dimension + 0.05, 1.0, 1.5, 2.0] {
        let Ok(tail) = spec.length_tail_bound(s, job.depth) else {
            continue;
        };
        let z = Complex64::new(s, 0.0);
        let partial = partial_zeta(&lengths, z).re;
        let exact = spec.geometric_zeta(z)?.re;
        sums.push_numbers(&[s, partial, exact, (exact - partial).abs(), tail]);
    }
    out.table("partial_sums.csv", &sums)
}

fn autocorr(job: &JobSpec, file: &SpecFile, out: &mut Output) -> Result<(), CliError> {
    let crystal = crystal_of(job, file)?;
    let table = count_displacements(&crystal, job.scale)?;
    let freq = empirical_frequency(&table);
    let n = crystal.ambient_dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    header.extend(["N_L", "n_hat", "closed_form", "abs_err"].map(String::from));
    let mut csv = Table::with_header(header);
    for entry in table.smallest(table.entries.len()) {
        let n_hat = freq.iter().find(|(a, _)| *a == entry.displacement).map_or(0.0, |f| f.1);
        let closed = table.closed_form(entry);
        let mut row: Vec<String> = entry.displacement.iter().map(|&x| format_number(x)).collect();
        row.push(entry.count.to_string());
        row.extend([n_hat, closed, (n_hat - closed).abs()].map(format_number));
        csv.push(row);
    }
    out.table("autocorr.csv", &csv)?;
    if let Some(phi) = &file.atoms {
        let value = autocorrelation_apply(&crystal, phi, job.eps)?;
        out.json(
            "values.json",
            &json!({
                "autocorrelation": complex_json(value.value),
                "truncation_bound": value.truncation_bound,
                "averaging_constant": table.averaging_constant,
            }),
        )?;
    }
    Ok(())
}

fn diffract(job: &JobSpec, file: &SpecFile, out: &mut Output) -> Result<(), CliError> {
    let crystal = crystal_of(job, file)?;
    let comb = diffraction_comb(&crystal, job.b_max)?;
    let m = crystal.rank();
    let mut header: Vec<String> = (1..=m).map(|i| format!("b{i}")).collect();
    header.extend(["intensity", "weight"].map(String::from));
    let mut csv = Table::with_header(header);
    let mut stems = Vec::with_capacity(comb.points.len());
    for point in &comb.points {
        let mut row = point.b.clone();
        row.extend([point.intensity, comb.weight(point)]);
        csv.push_numbers(&row);
        let x = if m == 1 { point.b[0] } else { point.b.iter().map(|v| v * v).sum::<f64>().sqrt() };
        stems.push((x, comb.weight(point)));
    }
    out.table("comb.csv", &csv)?;
    let style = PlotStyle {
        title: "Diffraction comb weights".into(),
        x_label: if m == 1 { "b".into() } else { "|b|".into() },
        y_label: "weight".into(),
        ..PlotStyle::default()
    };
    out.text("comb.svg", &render_svg(&Series::Stems(stems), &style))?;
    if let Some(phi) = &file.atoms {
        out.json("values.json", &diffraction_values(&crystal, phi, job.eps)?)?;
    }
    Ok(())
}

fn diffraction_values(crystal: &IdealCrystal, phi: &TestFunction, eps: f64) -> Result<Value, CliError> {
    let value = diffraction_apply(crystal, phi, eps)?;
    let dual = autocorrelation_apply(crystal, &fourier_transform(phi), eps)?;
    Ok(json!({
        "diffraction": complex_json(value.value),
        "truncation_bound": value.truncation_bound,
        "autocorrelation_of_transform": complex_json(dual.value),
        "autocorrelation_truncation_bound": dual.truncation_bound,
        "difference": (value.value - dual.value).norm(),
    }))
}

fn psf(job: &JobSpec, file: Option<&SpecFile>, out: &mut Output) -> Result<(), CliError> {
    let trials = psf_trials(PSF_TRIALS, job.seed, job.eps)?;
    let mut max_diff: f64 = 0.0;
    let mut max_relative: f64 = 0.0;
    let mut entries = Vec::with_capacity(trials.len() + 1);
    let mut record = |m: usize, d: usize, lhs: Complex64, rhs: Complex64, bounds: (f64, f64), diff: f64| {
        max_diff = max_diff.max(diff);
        max_relative = max_relative.max(diff / (1.0 + lhs.norm()));
        json!({
            "m": m,
            "d": d,
            "lhs": complex_json(lhs),
            "rhs": complex_json(rhs),
            "lhs_bound": bounds.0,
            "rhs_bound": bounds.1,
            "diff": diff,
        })
    };
    for t in &trials {
        let r = &t.report;
        entries.push(record(
            t.basis.rank(),
            t.degenerate_dim,
            r.lhs.value,
            r.rhs.value,
            (r.lhs.bound, r.rhs.bound),
            r.difference(),
        ));
    }
    let mut report = json!({
        "seed": job.seed,
        "eps": job.eps,
        "trials": entries,
    });
    if let Some(file) = file {
        let (Spec::Crystal(c), Some(phi)) = (&file.spec, &file.atoms) else {
            return Err(wrong(job.command, file));
        };
        let r = psf_check(c.basis(), c.degenerate_dim(), phi, &vec![0.0; c.rank()], &vec![0.0; c.degenerate_dim()], job.eps)?;
        report["input"] = record(
            c.rank(),
            c.degenerate_dim(),
            r.lhs.value,
            r.rhs.value,
            (r.lhs.bound, r.rhs.bound),
            r.difference(),
        );
    }
    report["max_diff"] = json!(max_diff);
    report["max_relative_diff"] = json!(max_relative);
    report["tolerance"] = json!(PSF_TOL);
    report["passed"] = json!(max_relative <= PSF_TOL);
    out.json("report.json", &report)
}
