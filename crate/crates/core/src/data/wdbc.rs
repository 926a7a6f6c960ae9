//! Wisconsin diagnostic breast cancer records.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::encoding::FeatureVector;
use crate::error::{Error, Result};

pub const N_FEATURES: usize = 30;
/// Features are zero-padded to this length (six qubits).
pub const PADDED_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Diagnosis {
    Malignant,
    Benign,
}

impl Diagnosis {
    /// Class index: `M` is 0, `B` is 1.
    pub fn class(self) -> usize {
        match self {
            Diagnosis::Malignant => 0,
            Diagnosis::Benign => 1,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Diagnosis::Malignant => 'M',
            Diagnosis::Benign => 'B',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WdbcRecord {
    pub id: String,
    pub diagnosis: Diagnosis,
    pub features: [f64; N_FEATURES],
}

fn parse_line(line: &str, lineno: usize) -> Result<WdbcRecord> {
    let err = |reason: String| Error::Parse {
        what: "WDBC row",
        line: lineno,
        reason,
    };
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != N_FEATURES + 2 {
        return Err(err(format!(
            "expected id, diagnosis and {N_FEATURES} features, found {} fields",
            fields.len()
        )));
    }
    let diagnosis = match fields[1] {
        "M" => Diagnosis::Malignant,
        "B" => Diagnosis::Benign,
        other => return Err(err(format!("diagnosis {other:?} is neither M nor B"))),
    };
    let mut features = [0.0; N_FEATURES];
    for (j, (slot, text)) in features.iter_mut().zip(&fields[2..]).enumerate() {
        let v: f64 = text
            .parse()
            .map_err(|_| err(format!("feature {} is not a number: {text:?}", j + 1)))?;
        if !v.is_finite() {
            return Err(err(format!("feature {} is not finite", j + 1)));
        }
        *slot = v;
    }
    Ok(WdbcRecord {
        id: fields[0].to_string(),
        diagnosis,
        features,
    })
}

/// Parses `id,diagnosis,f1,…,f30` rows. Blank lines are skipped.
pub fn parse_wdbc(reader: impl BufRead) -> Result<Vec<WdbcRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line, i + 1)?);
    }
    Ok(out)
}

pub fn load_wdbc(path: &Path) -> Result<Vec<WdbcRecord>> {
    parse_wdbc(BufReader::new(File::open(path)?))
}

pub fn write_wdbc(mut w: impl Write, records: &[WdbcRecord]) -> Result<()> {
    for r in records {
        write!(w, "{},{}", r.id, r.diagnosis.letter())?;
        for v in &r.features {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Per-feature min-max statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct WdbcScaler {
    pub min: [f64; N_FEATURES],
    pub max: [f64; N_FEATURES],
}

impl WdbcScaler {
    pub fn fit(records: &[WdbcRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InsufficientSamples("cannot fit a scaler on no records".into()));
        }
        let mut min = [f64::INFINITY; N_FEATURES];
        let mut max = [f64::NEG_INFINITY; N_FEATURES];
        for r in records {
            for j in 0..N_FEATURES {
                min[j] = min[j].min(r.features[j]);
                max[j] = max[j].max(r.features[j]);
            }
        }
        Ok(WdbcScaler { min, max })
    }

    /// Scaled to `[0, 1]`, clamped outside the fitted range. Constant
    /// features map to 0.
    pub fn scale(&self, rec: &WdbcRecord) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for j in 0..N_FEATURES {
            let span = self.max[j] - self.min[j];
            out[j] = if span > 0.0 {
                ((rec.features[j] - self.min[j]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        out
    }
}

/// Min-max scaled, padded to 64 and L2-normalized.
pub fn wdbc_to_features(rec: &WdbcRecord, scaler: &WdbcScaler) -> Result<FeatureVector> {
    FeatureVector::padded_normalized(&scaler.scale(rec), PADDED_LEN, rec.diagnosis.class())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, d: char, v: f64) -> String {
        let mut s = format!("{id},{d}");
        for j in 0..N_FEATURES {
            s.push_str(&format!(",{}", v + j as f64));
        }
        s
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = format!("{}\n{}\n", row("1", 'M', 1.0), row("2", 'X', 1.0));
        match parse_wdbc(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let short = row("3", 'B', 0.0);
        let short = &short[..short.rfind(',').unwrap()];
        assert!(matches!(parse_wdbc(short.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn extremes() {
        let text = format!("{}\n{}\n", row("1", 'M', 1.0), row("2", 'B', 5.0));
        let recs = parse_wdbc(text.as_bytes()).unwrap();
        let s = WdbcScaler::fit(&recs).unwrap();
        assert!(matches!(wdbc_to_features(&recs[0], &s), Err(Error::DegenerateVector)));
        let f = wdbc_to_features(&recs[1], &s).unwrap();
        let c = 1.0 / (N_FEATURES as f64).sqrt();
        assert!(f.values[..N_FEATURES].iter().all(|v| (v - c).abs() < 1e-12));
        assert!(f.values[N_FEATURES..].iter().all(|&v| v == 0.0));
        assert_eq!(f.values.len(), PADDED_LEN);
    }
}
