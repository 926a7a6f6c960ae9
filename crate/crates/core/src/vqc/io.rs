//! Model and history files.
//!
//! A model file is a text header terminated by a line `end`, followed by
//! `n_params` little-endian `f64` angles:
//!
//! ```text
//! qfl-model v1
//! n_qubits 8
//! depth 30
//! layout zx
//! readout 0
//! n_params 480
//! step_count 300
//! end
//! ```

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::template::{ClassifierTemplate, ModelParams, RotationLayout};
use super::train::HistoryRecord;
use crate::error::{Error, Result};

const MAGIC: &str = "qfl-model v1";

pub fn write_model(mut w: impl Write, template: &ClassifierTemplate, params: &ModelParams) -> Result<()> {
    template.check_params(params)?;
    let readout: Vec<String> = template.readout().iter().map(|q| q.to_string()).collect();
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "n_qubits {}", template.n_qubits())?;
    writeln!(w, "depth {}", template.depth())?;
    writeln!(w, "layout {}", template.layout().tag())?;
    writeln!(w, "readout {}", readout.join(","))?;
    writeln!(w, "n_params {}", params.len())?;
    writeln!(w, "step_count {}", params.step_count)?;
    writeln!(w, "end")?;
    for v in &params.theta {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_model(r: impl Read) -> Result<(ClassifierTemplate, ModelParams)> {
    let mut r = BufReader::new(r);
    let parse_err = |line: usize, reason: String| Error::Parse {
        what: "model header",
        line,
        reason,
    };
    let mut fields = std::collections::BTreeMap::new();
    let mut line_no = 0;
    loop {
        let mut line = String::new();
        if r.read_line(&mut line)? == 0 {
            return Err(parse_err(line_no + 1, "missing `end` line".into()));
        }
        line_no += 1;
        let line = line.trim_end();
        if line_no == 1 {
            if line != MAGIC {
                return Err(parse_err(1, format!("expected {MAGIC:?}")));
            }
            continue;
        }
        if line == "end" {
            break;
        }
        let (k, v) = line
            .split_once(' ')
            .ok_or_else(|| parse_err(line_no, format!("expected `key value`, got {line:?}")))?;
        fields.insert(k.to_string(), (line_no, v.to_string()));
    }
    let get = |k: &str| -> Result<(usize, String)> {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| parse_err(line_no, format!("missing field {k}")))
    };
    let num = |k: &str| -> Result<u64> {
        let (l, v) = get(k)?;
        v.parse().map_err(|_| parse_err(l, format!("bad {k} {v:?}")))
    };
    let layout = RotationLayout::from_tag(&get("layout")?.1)?;
    let (rl, rv) = get("readout")?;
    let readout = rv
        .split(',')
        .map(|s| s.parse::<usize>().map_err(|_| parse_err(rl, format!("bad readout {rv:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let template = ClassifierTemplate::new(num("n_qubits")? as usize, num("depth")? as usize, &readout, layout)?;
    let n = num("n_params")? as usize;
    if n != template.parameter_count() {
        return Err(Error::DimensionMismatch {
            expected: template.parameter_count(),
            actual: n,
        });
    }
    let mut theta = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf)?;
        theta.push(f64::from_le_bytes(buf));
    }
    let mut params = ModelParams::new(theta)?;
    params.step_count = num("step_count")?;
    Ok((template, params))
}

pub fn save_model(path: &Path, template: &ClassifierTemplate, params: &ModelParams) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_model(&mut f, template, params)?;
    f.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(ClassifierTemplate, ModelParams)> {
    read_model(std::fs::File::open(path)?)
}

/// One JSON object per line.
pub fn write_history(mut w: impl Write, history: &[HistoryRecord]) -> Result<()> {
    for rec in history {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_history(r: impl Read) -> Result<Vec<HistoryRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            what: "history",
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_round_trip() {
        let t = ClassifierTemplate::new(3, 2, &[0, 2], RotationLayout::Zxz).unwrap();
        let mut p = ModelParams::new((0..t.parameter_count()).map(|i| i as f64 * 0.1 - 1.0).collect()).unwrap();
        p.step_count = 17;
        let mut buf = Vec::new();
        write_model(&mut buf, &t, &p).unwrap();
        let (t2, p2) = read_model(buf.as_slice()).unwrap();
        assert_eq!(t2, t);
        assert_eq!(p2, p);
    }

    #[test]
    fn truncated_model_fails() {
        let t = ClassifierTemplate::new(2, 1, &[0], RotationLayout::Zx).unwrap();
        let mut buf = Vec::new();
        write_model(&mut buf, &t, &ModelParams::zeros(4)).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_model(buf.as_slice()).is_err());
        assert!(read_model(&b"nonsense\n"[..]).is_err());
    }
}
