//! JSON input files: exactly one of `string`, `dirichlet` or `crystal`, plus
//! optional `atoms` and `approx`.

use fracdiff_core::{DirichletPolynomial, GaussianAtom, IdealCrystal, LatticeBasis, Scalar, StringSpec, TestFunction};
use num::complex::Complex64;
use num::{BigInt, BigRational};
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    String(StringSpec),
    Dirichlet(DirichletPolynomial),
    Crystal(IdealCrystal),
}

impl Spec {
    pub fn kind(&self) -> &'static str {
        match self {
            Spec::String(_) => "string",
            Spec::Dirichlet(_) => "dirichlet",
            Spec::Crystal(_) => "crystal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub spec: Spec,
    pub atoms: Option<TestFunction>,
    pub approx: bool,
}

const KINDS: [&str; 3] = ["string", "dirichlet", "crystal"];

struct Reader<'a> {
    text: &'a str,
    approx: bool,
}

impl Reader<'_> {
    /// 1-based line of the first `"key":` in the source, else 1.
    fn line_of(&self, path: &str) -> usize {
        let key = path
            .rsplit('.')
            .map(|k| k.split('[').next().unwrap_or(k))
            .find(|k| !k.is_empty())
            .unwrap_or(path);
        let needle = format!("\"{key}\"");
        let mut offset = 0;
        while let Some(pos) = self.text[offset..].find(&needle) {
            let after = &self.text[offset + pos + needle.len()..];
            if after.trim_start().starts_with(':') {
                return self.text[..offset + pos].matches('\n').count() + 1;
            }
            offset += pos + needle.len();
        }
        1
    }

    fn error(&self, path: &str, message: impl Into<String>) -> CliError {
        CliError::Schema {
            line: self.line_of(path),
            field: path.to_string(),
            message: message.into(),
        }
    }

    fn object<'v>(&self, value: &'v Value, path: &str, allowed: &[&str], required: &[&str]) -> Result<&'v Map<String, Value>, CliError> {
        let map = value.as_object().ok_or_else(|| self.error(path, "expected an object"))?;
        if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(self.error(&join(path, key), format!("unknown key; expected one of {allowed:?}")));
        }
        if let Some(key) = required.iter().find(|k| !map.contains_key(**k)) {
            return Err(self.error(&join(path, key), "missing required key"));
        }
        Ok(map)
    }

    fn array<'v>(&self, value: &'v Value, path: &str) -> Result<&'v Vec<Value>, CliError> {
        value.as_array().ok_or_else(|| self.error(path, "expected an array"))
    }

    /// `"p/q"` or decimal strings and JSON integers are exact; other JSON
    /// numbers need the `approx` flag.
    fn scalar(&self, value: &Value, path: &str) -> Result<Scalar, CliError> {
        match value {
            Value::String(s) => s.parse::<Scalar>().map_err(|e| self.error(path, e.to_string())),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Scalar::integer(i))
                } else if self.approx {
                    Ok(Scalar::Float(n.as_f64().unwrap()))
                } else {
                    Err(self.error(path, format!("float {n} needs \"approx\": true, or write it as a \"p/q\" string")))
                }
            }
            _ => Err(self.error(path, "expected a number or a \"p/q\" string")),
        }
    }

    fn scalars(&self, value: &Value, path: &str) -> Result<Vec<Scalar>, CliError> {
        self.array(value, path)?
            .iter()
            .enumerate()
            .map(|(i, v)| self.scalar(v, &format!("{path}[{i}]")))
            .collect()
    }

    /// Test-function parameters are plain reals.
    fn real(&self, value: &Value, path: &str) -> Result<f64, CliError> {
        match value {
            Value::Number(n) => Ok(n.as_f64().unwrap()),
            Value::String(_) => Ok(self.scalar(value, path)?.value()),
            _ => Err(self.error(path, "expected a number")),
        }
    }

    fn reals(&self, value: &Value, path: &str) -> Result<Vec<f64>, CliError> {
        self.array(value, path)?
            .iter()
            .enumerate()
            .map(|(i, v)| self.real(v, &format!("{path}[{i}]")))
            .collect()
    }

    fn positive_integer(&self, value: &Value, path: &str) -> Result<u64, CliError> {
        value
            .as_u64()
            .filter(|&k| k > 0)
            .ok_or_else(|| self.error(path, "expected a positive integer"))
    }

    fn string_spec(&self, value: &Value) -> Result<StringSpec, CliError> {
        let map = self.object(value, "string", &["L", "ratios", "gaps"], &["L", "ratios", "gaps"])?;
        let total = self.scalar(&map["L"], "string.L")?;
        let ratios = self.scalars(&map["ratios"], "string.ratios")?;
        let gaps = self.scalars(&map["gaps"], "string.gaps")?;
        Ok(StringSpec::validate(total, ratios, gaps, self.approx)?)
    }

    fn dirichlet(&self, value: &Value) -> Result<DirichletPolynomial, CliError> {
        let map = self.object(value, "dirichlet", &["r", "terms"], &["r", "terms"])?;
        let r = self.scalar(&map["r"], "dirichlet.r")?;
        let mut terms = Vec::new();
        for (i, term) in self.array(&map["terms"], "dirichlet.terms")?.iter().enumerate() {
            let path = format!("dirichlet.terms[{i}]");
            let pair = self.array(term, &path)?;
            if pair.len() != 2 {
                return Err(self.error(&path, "expected [k, m]"));
            }
            let k = match self.scalar(&pair[0], &format!("{path}[0]"))? {
                Scalar::Rational(q) => q,
                Scalar::Float(_) => return Err(self.error(&path, "exponents must be exact")),
            };
            let m = self.positive_integer(&pair[1], &format!("{path}[1]"))?;
            terms.push((k, m));
        }
        Ok(DirichletPolynomial::normalize(r, terms)?)
    }

    fn crystal(&self, value: &Value) -> Result<IdealCrystal, CliError> {
        let map = self.object(value, "crystal", &["basis", "d", "translates"], &["basis", "translates"])?;
        let rows = self
            .array(&map["basis"], "crystal.basis")?
            .iter()
            .enumerate()
            .map(|(i, row)| self.scalars(row, &format!("crystal.basis[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(self.error("crystal.basis", "basis must be a nonempty square matrix"));
        }
        let d = match map.get("d") {
            Some(v) => v.as_u64().ok_or_else(|| self.error("crystal.d", "expected a nonnegative integer"))? as usize,
            None => 0,
        };
        let translates = self
            .array(&map["translates"], "crystal.translates")?
            .iter()
            .enumerate()
            .map(|(i, t)| self.scalars(t, &format!("crystal.translates[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let basis = LatticeBasis::from_rows(rows)?;
        Ok(IdealCrystal::new(basis, d, translates)?)
    }

    fn atoms(&self, value: &Value) -> Result<TestFunction, CliError> {
        let mut atoms = Vec::new();
        for (i, atom) in self.array(value, "atoms")?.iter().enumerate() {
            let path = format!("atoms[{i}]");
            let map = self.object(atom, &path, &["center", "scales", "modulation", "amplitude"], &["center", "scales"])?;
            let center = self.reals(&map["center"], &format!("{path}.center"))?;
            let scales = self.reals(&map["scales"], &format!("{path}.scales"))?;
            let modulation = match map.get("modulation") {
                Some(v) => self.reals(v, &format!("{path}.modulation"))?,
                None => vec![0.0; center.len()],
            };
            let amplitude = match map.get("amplitude") {
                None => Complex64::new(1.0, 0.0),
                Some(v @ Value::Array(_)) => {
                    let parts = self.reals(v, &format!("{path}.amplitude"))?;
                    if parts.len() != 2 {
                        return Err(self.error(&format!("{path}.amplitude"), "expected [re, im]"));
                    }
                    Complex64::new(parts[0], parts[1])
                }
                Some(v) => Complex64::new(self.real(v, &format!("{path}.amplitude"))?, 0.0),
            };
            atoms.push(GaussianAtom::new(center, scales, modulation, amplitude).map_err(|e| self.error(&path, e.to_string()))?);
        }
        TestFunction::new(atoms).map_err(|e| self.error("atoms", e.to_string()))
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Parses and validates an input document.
pub fn parse_spec(text: &str) -> Result<SpecFile, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Schema {
        line: e.line(),
        field: String::new(),
        message: e.to_string(),
    })?;
    let mut reader = Reader { text, approx: false };
    let map = reader.object(&value, "", &["string", "dirichlet", "crystal", "atoms", "approx"], &[])?;
    if let Some(flag) = map.get("approx") {
        reader.approx = flag.as_bool().ok_or_else(|| reader.error("approx", "expected true or false"))?;
    }
    let present: Vec<&str> = KINDS.iter().copied().filter(|k| map.contains_key(*k)).collect();
    let spec = match present.as_slice() {
        ["string"] => Spec::String(reader.string_spec(&map["string"])?),
        ["dirichlet"] => Spec::Dirichlet(reader.dirichlet(&map["dirichlet"])?),
        ["crystal"] => Spec::Crystal(reader.crystal(&map["crystal"])?),
        [] => return Err(reader.error("", "expected one of \"string\", \"dirichlet\", \"crystal\"")),
        _ => return Err(reader.error(present[1], "only one of \"string\", \"dirichlet\", \"crystal\" may be given")),
    };
    let atoms = map.get("atoms").map(|v| reader.atoms(v)).transpose()?;
    Ok(SpecFile {
        spec,
        atoms,
        approx: reader.approx,
    })
}

fn scalar_value(s: &Scalar) -> Value {
    match s {
        Scalar::Rational(_) => Value::String(s.to_string()),
        Scalar::Float(x) => json!(x),
    }
}

fn scalar_list(items: &[Scalar]) -> Value {
    Value::Array(items.iter().map(scalar_value).collect())
}

fn rational_value(q: &BigRational) -> Value {
    scalar_value(&Scalar::Rational(q.clone()))
}

/// Canonical JSON (sorted keys, two-space indent, trailing newline);
/// `parse_spec(emit(f)) == f`.
pub fn emit(file: &SpecFile) -> String {
    let mut top = Map::new();
    let body = match &file.spec {
        Spec::String(s) => json!({
            "L": scalar_value(s.total_length()),
            "ratios": scalar_list(s.ratios()),
            "gaps": scalar_list(s.gaps()),
        }),
        Spec::Dirichlet(p) => json!({
            "r": scalar_value(p.generator_scalar()),
            "terms": p.terms().map(|(k, m)| json!([rational_value(&BigRational::from_integer(BigInt::from(k))), m])).collect::<Vec<_>>(),
        }),
        Spec::Crystal(c) => json!({
            "basis": c.basis().rows().iter().map(|r| scalar_list(r)).collect::<Vec<_>>(),
            "d": c.degenerate_dim(),
            "translates": c.translates().iter().map(|t| scalar_list(t)).collect::<Vec<_>>(),
        }),
    };
    top.insert(file.spec.kind().to_string(), body);
    if let Some(phi) = &file.atoms {
        let atoms = phi
            .atoms()
            .iter()
            .map(|a| {
                json!({
                    "center": a.center(),
                    "scales": a.inverse_scales(),
                    "modulation": a.modulation(),
                    "amplitude": [a.amplitude().re, a.amplitude().im],
                })
            })
            .collect();
        top.insert("atoms".into(), Value::Array(atoms));
    }
    if file.approx {
        top.insert("approx".into(), Value::Bool(true));
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
    text.push('\n');
    text
}
