//! Chart and run configuration in TOML.
//!
//! Numbers are exact strings (`"p/q"`, `"p/q+r/s*i"`); a polynomial is a
//! list of terms `{ coeff, exps }` with exponent vectors over
//! `z_1..z_m, z̄_1..z̄_m`. Matrices list their nonzero entries by row and
//! column. Emitting a parsed config gives its canonical text.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::algebra::{GaussianRational, Jet, MatrixJet, NuSeries};
use crate::geometry::{validate_chart, Chart, ChartData, GeometryError};
use crate::starprod::Section;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("line {line}, field '{field}': {message}")]
    Field { line: usize, field: String, message: String },
}

/// One monomial: coefficient times `z^α z̄^β`, `exps = α ++ β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: String,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub weight: i32,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrySpec {
    /// ν-order of a section coefficient; absent for `u`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<i32>,
    pub row: usize,
    pub col: usize,
    pub terms: Vec<Term>,
}

/// Command parameters; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    m: Spanned<usize>,
    d: Spanned<usize>,
    order: Spanned<i32>,
    jet_accuracy: Option<Spanned<i32>>,
    calabi_bidegree: Option<[u32; 2]>,
    #[serde(default)]
    potential: Vec<Spanned<PotentialSpec>>,
    #[serde(default)]
    u: Vec<Spanned<EntrySpec>>,
    #[serde(default)]
    section: BTreeMap<String, Vec<Spanned<EntrySpec>>>,
    #[serde(default)]
    run: RunSpec,
}

#[derive(Debug, Serialize)]
struct CanonicalConfig<'a> {
    m: usize,
    d: usize,
    order: i32,
    jet_accuracy: i32,
    calabi_bidegree: [u32; 2],
    #[serde(skip_serializing_if = "is_default")]
    run: &'a RunSpec,
    potential: Vec<PotentialSpec>,
    u: Vec<EntrySpec>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    section: BTreeMap<String, Vec<EntrySpec>>,
}

fn is_default(r: &&RunSpec) -> bool {
    **r == RunSpec::default()
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Config {
    pub chart: Chart,
    /// Named input sections, exact in ν.
    pub sections: BTreeMap<String, Section>,
    pub run: RunSpec,
}

struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.text[..span.start.min(self.text.len())].matches('\n').count() + 1
    }

    fn err(&self, span: Range<usize>, field: impl Into<String>, message: impl ToString) -> ConfigError {
        ConfigError::Field { line: self.line(span), field: field.into(), message: message.to_string() }
    }
}

fn parse_terms(terms: &[Term], nvars: usize, field: &str, at: &dyn Fn(String, String) -> ConfigError) -> Result<Jet, ConfigError> {
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let f = format!("{field}.terms[{i}]");
        let c: GaussianRational = t.coeff.parse().map_err(|e: crate::algebra::AlgebraError| at(f.clone(), e.to_string()))?;
        if t.exps.len() != nvars {
            return Err(at(f, format!("exponent vector has length {}, expected {nvars}", t.exps.len())));
        }
        out.push((t.exps.clone(), c));
    }
    Ok(Jet::from_terms(nvars, out, None))
}

fn emit_terms(j: &Jet) -> Vec<Term> {
    j.monomials().map(|(exps, c)| Term { coeff: c.to_string(), exps }).collect()
}

fn matrix_entries(
    entries: &[&Spanned<EntrySpec>],
    d: usize,
    nvars: usize,
    field: &str,
    loc: &Locator,
) -> Result<MatrixJet, ConfigError> {
    let mut jets = vec![Jet::zero(nvars); d * d];
    for e in entries {
        let f = match e.get_ref().nu {
            Some(s) => format!("{field}[nu={s},{},{}]", e.get_ref().row, e.get_ref().col),
            None => format!("{field}[{},{}]", e.get_ref().row, e.get_ref().col),
        };
        let (row, col) = (e.get_ref().row, e.get_ref().col);
        if row >= d || col >= d {
            return Err(loc.err(e.span(), f, format!("index out of range for rank {d}")));
        }
        let at = |ff: String, msg: String| loc.err(e.span(), ff, msg);
        let j = parse_terms(&e.get_ref().terms, nvars, &f, &at)?;
        jets[row * d + col] = &jets[row * d + col] + &j;
    }
    Ok(MatrixJet::from_entries(d, jets))
}

fn emit_matrix(a: &MatrixJet, nu: Option<i32>) -> Vec<EntrySpec> {
    let d = a.dim();
    let mut out = Vec::new();
    for row in 0..d {
        for col in 0..d {
            let e = a.entry(row, col);
            if !e.is_zero() {
                out.push(EntrySpec { nu, row, col, terms: emit_terms(e) });
            }
        }
    }
    out
}

/// The field a chart validation error refers to.
fn geometry_field(e: &GeometryError) -> String {
    match e {
        GeometryError::MissingPotential | GeometryError::DegenerateMetric => "potential[-1]".into(),
        GeometryError::BadWeight(r) | GeometryError::NonRealPotential(r) => format!("potential[{r}]"),
        GeometryError::NonHermitian | GeometryError::SingularBundleMetric => "u".into(),
        GeometryError::Dimension(_) => "m".into(),
        GeometryError::Shape(s) => s.clone(),
        _ => "chart".into(),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let loc = Locator { text };
        let (m, d) = (*raw.m.get_ref(), *raw.d.get_ref());
        if m == 0 {
            return Err(loc.err(raw.m.span(), "m", "complex dimension must be positive"));
        }
        if d == 0 {
            return Err(loc.err(raw.d.span(), "d", "bundle rank must be positive"));
        }
        let order = *raw.order.get_ref();
        if order < 0 {
            return Err(loc.err(raw.order.span(), "order", "order must be nonnegative"));
        }
        let nvars = 2 * m;

        let mut potentials = BTreeMap::new();
        let mut pot_spans = BTreeMap::new();
        for p in &raw.potential {
            let w = p.get_ref().weight;
            let f = format!("potential[{w}]");
            if potentials.contains_key(&w) {
                return Err(loc.err(p.span(), f, "duplicate weight"));
            }
            let at = |ff: String, msg: String| loc.err(p.span(), ff, msg);
            potentials.insert(w, parse_terms(&p.get_ref().terms, nvars, &f, &at)?);
            pot_spans.insert(w, p.span());
        }
        let u_entries: Vec<_> = raw.u.iter().collect();
        if let Some(e) = u_entries.iter().find(|e| e.get_ref().nu.is_some()) {
            return Err(loc.err(e.span(), "u", "entries of u carry no ν-order"));
        }
        let u = matrix_entries(&u_entries, d, nvars, "u", &loc)?;

        let mut data = ChartData::new(m, order, potentials, u);
        if let Some(a) = &raw.jet_accuracy {
            data = data.with_accuracy(*a.get_ref());
        }
        if let Some([p, q]) = raw.calabi_bidegree {
            data = data.with_calabi_bidegree(p, q);
        }
        let chart = validate_chart(data).map_err(|e| {
            let field = geometry_field(&e);
            let span = match &e {
                GeometryError::BadWeight(r) | GeometryError::NonRealPotential(r) => pot_spans.get(r).cloned(),
                GeometryError::DegenerateMetric => pot_spans.get(&-1).cloned(),
                GeometryError::NonHermitian | GeometryError::SingularBundleMetric => raw.u.first().map(|s| s.span()),
                GeometryError::Dimension(_) => Some(raw.m.span()),
                _ => None,
            };
            let span = span.unwrap_or(0..0);
            loc.err(span, field, e)
        })?;

        let mut sections = BTreeMap::new();
        for (name, entries) in &raw.section {
            let mut by_order: BTreeMap<i32, Vec<&Spanned<EntrySpec>>> = BTreeMap::new();
            for e in entries {
                by_order.entry(e.get_ref().nu.unwrap_or(0)).or_default().push(e);
            }
            let mut coeffs = BTreeMap::new();
            for (s, es) in by_order {
                coeffs.insert(s, matrix_entries(&es, d, nvars, &format!("section.{name}"), &loc)?);
            }
            let zero = MatrixJet::zero(d, nvars);
            sections.insert(name.clone(), NuSeries::from_map(coeffs, None, &zero));
        }
        Ok(Config { chart, sections, run: raw.run })
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Config::parse(&text)
    }

    /// Canonical text: fields in fixed order, potentials by weight, matrix
    /// entries row-major, terms by monomial, zero entries omitted.
    pub fn emit(&self) -> String {
        let data = &self.chart.data;
        let (p, q) = data.calabi_bidegree;
        let canon = CanonicalConfig {
            m: data.m,
            d: data.d,
            order: data.order,
            jet_accuracy: data.jet_accuracy,
            calabi_bidegree: [p, q],
            run: &self.run,
            potential: data
                .potentials
                .iter()
                .map(|(&weight, j)| PotentialSpec { weight, terms: emit_terms(j) })
                .collect(),
            u: emit_matrix(&data.u, None),
            section: self.sections.iter().map(|(n, s)| (n.clone(), emit_section_entries(s))).collect(),
        };
        toml::to_string(&canon).expect("config serializes")
    }
}

fn emit_section_entries(s: &Section) -> Vec<EntrySpec> {
    s.iter().flat_map(|(o, a)| emit_matrix(a, Some(o))).collect()
}

#[derive(Serialize)]
struct SectionFile {
    section: BTreeMap<String, Vec<EntrySpec>>,
}

/// A section in the config's `[[section.NAME]]` format, through `ν^through`.
pub fn emit_section(name: &str, s: &Section, through: i32) -> String {
    let file = SectionFile { section: BTreeMap::from([(name.to_string(), emit_section_entries(&s.truncate(through)))]) };
    toml::to_string(&file).expect("section serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"
m = 1
d = 1
order = 2

[[potential]]
weight = -1
terms = [{ coeff = "1", exps = [1, 1] }]

[[u]]
row = 0
col = 0
terms = [{ coeff = "1", exps = [0, 0] }]
"#;

    const BUNDLE: &str = r#"
m = 1
d = 2
order = 2

[[potential]]
weight = -1
terms = [{ coeff = "1", exps = [1, 1] }]

[[u]]
row = 0
col = 0
terms = [{ coeff = "1", exps = [0, 0] }]

[[u]]
row = 0
col = 1
terms = [{ coeff = "1", exps = [1, 0] }]

[[u]]
row = 1
col = 0
terms = [{ coeff = "1", exps = [0, 1] }]

[[u]]
row = 1
col = 1
terms = [{ coeff = "1", exps = [0, 0] }, { coeff = "1", exps = [1, 1] }]

[[section.f]]
nu = 1
row = 0
col = 1
terms = [{ coeff = "1/2+3*i", exps = [2, 0] }]
"#;

    #[test]
    fn flat_chart_parses() {
        let c = Config::parse(FLAT).unwrap();
        assert_eq!((c.chart.m(), c.chart.d()), (1, 1));
        let zzbar = Jet::monomial(2, &[1, 1], GaussianRational::one());
        assert_eq!(c.chart.data.potentials[&-1], zzbar);
        assert_eq!(c.chart.data.u, MatrixJet::identity(1, 2));
    }

    #[test]
    fn bundle_round_trips() {
        let c = Config::parse(BUNDLE).unwrap();
        let (z, zb) = (Jet::z(1, 0), Jet::zbar(1, 0));
        let want = MatrixJet::from_rows(vec![vec![Jet::one(2), z.clone()], vec![zb.clone(), &Jet::one(2) + &(&z * &zb)]]);
        assert_eq!(c.chart.data.u, want);
        let text = c.emit();
        let back = Config::parse(&text).unwrap();
        assert_eq!(back.emit(), text);
        assert_eq!(back.chart.data, c.chart.data);
        assert_eq!(back.sections, c.sections);
    }

    #[test]
    fn degenerate_metric_names_field() {
        let text = FLAT.replace("exps = [1, 1]", "exps = [1, 0] }, { coeff = \"1\", exps = [0, 1]");
        match Config::parse(&text) {
            Err(ConfigError::Field { field, line, .. }) => {
                assert_eq!(field, "potential[-1]");
                assert_eq!(line, 6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_coefficient_is_located() {
        let text = FLAT.replace("coeff = \"1\", exps = [1, 1]", "coeff = \"1/0\", exps = [1, 1]");
        assert!(matches!(Config::parse(&text), Err(ConfigError::Field { ref field, .. }) if field == "potential[-1].terms[0]"));
        assert!(matches!(Config::parse("m = 1\n"), Err(ConfigError::Parse(_))));
    }
}
