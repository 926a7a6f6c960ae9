//! Binary cache of a [`ProcessedDataset`].
//!
//! ```text
//! "QFLD"  version: u32
//! n_samples: u64  dim: u64  n_classes: u32
//! n_classes × (name_len: u16, utf-8 name)
//! n_train: u64  n_validation: u64  train indices: u64…  validation indices: u64…
//! n_samples × dim × (re: f64, im: f64)
//! n_samples × class: u32
//! ```
//! All integers and floats little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::dataset::ProcessedDataset;
use crate::error::{Error, Result};
use crate::quantum::Statevector;
use crate::vqc::LabeledSample;

pub const CACHE_MAGIC: &[u8; 4] = b"QFLD";
pub const CACHE_VERSION: u32 = 1;

pub fn write_cache(mut w: impl Write, ds: &ProcessedDataset) -> Result<()> {
    let dim = ds.samples.first().map_or(0, |s| s.input.dim());
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&(ds.samples.len() as u64).to_le_bytes())?;
    w.write_all(&(dim as u64).to_le_bytes())?;
    w.write_all(&(ds.class_map.len() as u32).to_le_bytes())?;
    for name in &ds.class_map {
        let len = u16::try_from(name.len()).map_err(|_| Error::InvalidArgument("class name too long".into()))?;
        w.write_all(&len.to_le_bytes())?;
        w.write_all(name.as_bytes())?;
    }
    w.write_all(&(ds.train.len() as u64).to_le_bytes())?;
    w.write_all(&(ds.validation.len() as u64).to_le_bytes())?;
    for &i in ds.train.iter().chain(&ds.validation) {
        w.write_all(&(i as u64).to_le_bytes())?;
    }
    for s in &ds.samples {
        if s.input.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.input.dim(),
            });
        }
        for a in s.input.amplitudes() {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
    }
    for s in &ds.samples {
        w.write_all(&(s.class() as u32).to_le_bytes())?;
    }
    Ok(())
}

struct Reader<R>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b)?;
        Ok(b)
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes()?))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<usize> {
        usize::try_from(u64::from_le_bytes(self.bytes()?))
            .map_err(|_| Error::InvalidArgument("cache count exceeds usize".into()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
}

pub fn read_cache(r: impl Read) -> Result<ProcessedDataset> {
    let mut r = Reader(r);
    if &r.bytes::<4>()? != CACHE_MAGIC {
        return Err(Error::InvalidArgument("not a dataset cache".into()));
    }
    let version = r.u32()?;
    if version != CACHE_VERSION {
        return Err(Error::InvalidArgument(format!(
            "cache version {version}, expected {CACHE_VERSION}"
        )));
    }
    let n = r.u64()?;
    let dim = r.u64()?;
    let n_classes = r.u32()? as usize;
    let mut class_map = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let len = r.u16()? as usize;
        let mut buf = vec![0u8; len];
        r.0.read_exact(&mut buf)?;
        class_map.push(String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))?);
    }
    let n_train = r.u64()?;
    let n_val = r.u64()?;
    let train = (0..n_train).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    let validation = (0..n_val).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    let mut states = Vec::with_capacity(n);
    for _ in 0..n {
        let amps = (0..dim)
            .map(|_| Ok(Complex64::new(r.f64()?, r.f64()?)))
            .collect::<Result<Vec<_>>>()?;
        states.push(Statevector::from_amplitudes(amps)?);
    }
    let samples = states
        .into_iter()
        .map(|s| LabeledSample::from_class(s, r.u32()? as usize, n_classes))
        .collect::<Result<Vec<_>>>()?;
    ProcessedDataset::new(samples, class_map, train, validation)
}

pub fn save_cache(path: &Path, ds: &ProcessedDataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_cache(&mut w, ds)?;
    w.flush()?;
    Ok(())
}

pub fn load_cache(path: &Path) -> Result<ProcessedDataset> {
    read_cache(BufReader::new(File::open(path)?))
}
