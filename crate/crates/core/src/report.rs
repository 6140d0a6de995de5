//! Verification reports: one record per checked identity.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::algebra::jet::format_monomial;
use crate::algebra::{MatrixJet, NuSeries};

/// Where two values first disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub nu_order: Option<i32>,
    /// Index pair of a tensor entry, or the case label of a section check.
    pub index: Option<String>,
    pub entry: Option<(usize, usize)>,
    pub monomial: Option<String>,
    pub lhs: String,
    pub rhs: String,
}

impl Discrepancy {
    pub fn note(text: impl Into<String>) -> Self {
        Discrepancy { nu_order: None, index: None, entry: None, monomial: None, lhs: text.into(), rhs: String::new() }
    }

    pub fn with_index(mut self, index: impl Into<String>) -> Self {
        self.index = Some(index.into());
        self
    }
}

/// First disagreement of two ν-series of matrix jets within their common
/// window and accuracy.
pub fn series_difference(a: &NuSeries<MatrixJet>, b: &NuSeries<MatrixJet>) -> Option<Discrepancy> {
    let s = a.first_difference(b, |x, y| x.agrees_with(y))?;
    let x = a.get(s).unwrap_or_else(|_| a.template().clone());
    let y = b.get(s).unwrap_or_else(|_| b.template().clone());
    Some(match x.first_difference(&y) {
        Some((i, j, e, l, r)) => Discrepancy {
            nu_order: Some(s),
            index: None,
            entry: Some((i, j)),
            monomial: Some(format_monomial(&e)),
            lhs: l.to_string(),
            rhs: r.to_string(),
        },
        None => Discrepancy {
            nu_order: Some(s),
            index: None,
            entry: None,
            monomial: None,
            lhs: format!("{x}"),
            rhs: format!("{y}"),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub passed: bool,
    pub discrepancy: Option<Discrepancy>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, discrepancy: Option<Discrepancy>) -> Self {
        CheckRecord { name: name.into(), params: BTreeMap::new(), passed: discrepancy.is_none(), discrepancy }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn extend(&mut self, o: Report) {
        self.records.extend(o.records);
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    /// Records sorted by name, then parameters.
    pub fn sorted(mut self) -> Self {
        self.records.sort_by(|a, b| (&a.name, &a.params).cmp(&(&b.name, &b.params)));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            let mut line = format!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.name);
            for (k, v) in &r.params {
                let _ = write!(line, " {k}={v}");
            }
            if let Some(d) = &r.discrepancy {
                let _ = write!(line, " |");
                if let Some(s) = d.nu_order {
                    let _ = write!(line, " ν^{s}");
                }
                if let Some(i) = &d.index {
                    let _ = write!(line, " at {i}");
                }
                if let Some((i, j)) = d.entry {
                    let _ = write!(line, " entry ({i},{j})");
                }
                if let Some(mo) = &d.monomial {
                    let _ = write!(line, " monomial {mo}");
                }
                let _ = write!(line, ": {} vs {}", d.lhs, d.rhs);
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}
