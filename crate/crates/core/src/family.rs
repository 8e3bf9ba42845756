//! Hypothesis families and their CSV representation.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// Labeled elementary hypotheses with their raw p-values.
///
/// Row order is the canonical index order: index `i` of every
/// [`IndexSet`] refers to `labels()[i]` / `p_values()[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFamily {
    labels: Vec<String>,
    p: Vec<f64>,
    by_label: HashMap<String, usize>,
}

impl HypothesisFamily {
    pub fn new(labels: Vec<String>, p: Vec<f64>) -> Result<Self> {
        if labels.len() != p.len() {
            return Err(Error::InvalidFamily(format!(
                "{} labels but {} p-values",
                labels.len(),
                p.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::EmptyBody);
        }
        let mut by_label = HashMap::with_capacity(labels.len());
        for (i, (label, &value)) in labels.iter().zip(&p).enumerate() {
            if value.is_nan() {
                return Err(Error::NonNumericP {
                    row: i + 1,
                    value: value.to_string(),
                });
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::POutOfRange { row: i + 1, value });
            }
            if by_label.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    row: i + 1,
                    id: label.clone(),
                });
            }
        }
        Ok(Self {
            labels,
            p,
            by_label,
        })
    }

    /// Family with generated labels `h1..hn`.
    pub fn from_p_values(p: Vec<f64>) -> Result<Self> {
        let labels = (1..=p.len()).map(|i| format!("h{i}")).collect();
        Self::new(labels, p)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    /// Always false; families hold at least one hypothesis.
    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.len())
    }

    /// Labels of the members of `set`, in index order.
    pub fn labels_of(&self, set: &IndexSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].clone()).collect()
    }

    /// p-values of the members of `set`, in index order.
    pub fn p_of(&self, set: &IndexSet) -> Vec<f64> {
        set.iter().map(|i| self.p[i]).collect()
    }

    pub fn check_width(&self, set: &IndexSet) -> Result<()> {
        if set.width() != self.len() {
            return Err(Error::FamilyMismatch {
                expected: self.len(),
                found: set.width(),
            });
        }
        Ok(())
    }

    /// Writes the family back out as `id,p` CSV. p-values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["id", "p"]).expect("in-memory write");
        for (label, p) in self.labels.iter().zip(&self.p) {
            writer
                .write_record([label.as_str(), &p.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

/// Parses an `id,p` CSV table into a family, keeping file order.
pub fn parse_family(text: &str) -> Result<HypothesisFamily> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(Error::MissingHeader);
    }
    let header: Vec<&str> = headers.iter().collect();
    if header != ["id", "p"] {
        return Err(Error::BadHeader {
            found: header.join(","),
        });
    }

    let mut labels = Vec::new();
    let mut p = Vec::new();
    let mut seen = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::MalformedRow {
                row,
                message: "empty id".into(),
            });
        }
        let raw = &record[1];
        let value: f64 = raw.parse().map_err(|_| Error::NonNumericP {
            row,
            value: raw.to_string(),
        })?;
        if value.is_nan() {
            return Err(Error::NonNumericP {
                row,
                value: raw.to_string(),
            });
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::POutOfRange { row, value });
        }
        if seen.insert(id.clone(), row).is_some() {
            return Err(Error::DuplicateId { row, id });
        }
        labels.push(id);
        p.push(value);
    }
    if labels.is_empty() {
        return Err(Error::EmptyBody);
    }
    HypothesisFamily::new(labels, p)
}

/// Resolves hypothesis labels to an index set. Order and repeats are
/// irrelevant.
pub fn resolve_set<S: AsRef<str>>(family: &HypothesisFamily, labels: &[S]) -> Result<IndexSet> {
    let mut set = IndexSet::empty(family.len());
    for label in labels {
        let label = label.as_ref();
        let i = family
            .index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        set.insert(i);
    }
    Ok(set)
}

/// A significance level strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaLevel(f64);

impl AlphaLevel {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AlphaLevel {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}
