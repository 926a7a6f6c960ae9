use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::mnist::{mnist_to_features, Downsample, RawImage};
use super::wdbc::{wdbc_to_features, WdbcRecord, WdbcScaler};
use crate::encoding::FeatureVector;
use crate::error::{Error, Result};
use crate::federated::ClientShard;
use crate::quantum::Statevector;
use crate::rng::{stream, tag};
use crate::vqc::LabeledSample;

/// MNIST digits kept for the binary task, in class order.
pub const MNIST_DIGITS: [u8; 2] = [1, 9];

/// Encoded samples with a class map and a disjoint train/validation split.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessedDataset {
    pub samples: Vec<LabeledSample>,
    /// Human-readable name of each class index.
    pub class_map: Vec<String>,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

impl ProcessedDataset {
    pub fn new(samples: Vec<LabeledSample>, class_map: Vec<String>, train: Vec<usize>, validation: Vec<usize>) -> Result<Self> {
        let n = samples.len();
        let mut seen = vec![false; n];
        for &i in train.iter().chain(&validation) {
            if i >= n {
                return Err(Error::InvalidArgument(format!("split index {i} out of range for {n} samples")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("sample {i} appears twice in the split")));
            }
        }
        if let Some(s) = samples.iter().find(|s| s.label().len() != class_map.len()) {
            return Err(Error::DimensionMismatch {
                expected: class_map.len(),
                actual: s.label().len(),
            });
        }
        Ok(ProcessedDataset {
            samples,
            class_map,
            train,
            validation,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.class_map.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.samples.first().map_or(0, |s| s.input.n_qubits())
    }

    pub fn train_samples(&self) -> Vec<LabeledSample> {
        self.train.iter().map(|&i| self.samples[i].clone()).collect()
    }

    pub fn validation_samples(&self) -> Vec<LabeledSample> {
        self.validation.iter().map(|&i| self.samples[i].clone()).collect()
    }
}

/// Amplitude-encoded sample for class `class`.
pub fn encode_sample(f: &FeatureVector, class: usize, n_classes: usize) -> Result<LabeledSample> {
    let n_qubits = f.values.len().next_power_of_two().trailing_zeros() as usize;
    LabeledSample::from_class(f.to_state(n_qubits)?, class, n_classes)
}

fn mnist_class(label: u8) -> Option<usize> {
    MNIST_DIGITS.iter().position(|&d| d == label)
}

/// Samples of digits 1 and 9 (classes 0 and 1), in file order.
pub fn mnist_binary(images: &[RawImage], method: Downsample) -> Result<Vec<LabeledSample>> {
    images
        .iter()
        .filter_map(|img| mnist_class(img.label).map(|c| (img, c)))
        .map(|(img, c)| encode_sample(&mnist_to_features(img, method)?, c, MNIST_DIGITS.len()))
        .collect()
}

fn take_balanced(pool: &[LabeledSample], n: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    let (groups, _) = partition_balanced(pool, 1, n, 0, rng)?;
    Ok(groups.into_iter().next().unwrap_or_default())
}

/// The 1-vs-9 images behind [`mnist_dataset`]: the same class-balanced
/// train and validation picks, as raw images.
pub fn mnist_selection(
    train_images: &[RawImage],
    test_images: &[RawImage],
    n_train: usize,
    n_validation: usize,
    method: Downsample,
    seed: u64,
) -> Result<(Vec<RawImage>, Vec<RawImage>)> {
    let mut rng = stream(seed, tag::SPLIT);
    let mut pick = |images: &[RawImage], n: usize| -> Result<Vec<RawImage>> {
        let binary: Vec<&RawImage> = images.iter().filter(|img| mnist_class(img.label).is_some()).collect();
        let owned: Vec<RawImage> = binary.iter().map(|&img| img.clone()).collect();
        let idx = take_balanced(&mnist_binary(&owned, method)?, n, &mut rng)?;
        Ok(idx.into_iter().map(|i| binary[i].clone()).collect())
    };
    let train = pick(train_images, n_train)?;
    let val = pick(test_images, n_validation)?;
    Ok((train, val))
}

/// Class of an MNIST digit in the binary task.
pub fn mnist_class_of(image: &RawImage) -> Option<usize> {
    mnist_class(image.label)
}

/// 1-vs-9 dataset: `n_train` class-balanced samples from `train_images` and
/// `n_validation` from `test_images`.
pub fn mnist_dataset(
    train_images: &[RawImage],
    test_images: &[RawImage],
    n_train: usize,
    n_validation: usize,
    method: Downsample,
    seed: u64,
) -> Result<ProcessedDataset> {
    let (train, val) = mnist_selection(train_images, test_images, n_train, n_validation, method, seed)?;
    let (nt, nv) = (train.len(), val.len());
    let mut images = train;
    images.extend(val);
    ProcessedDataset::new(
        mnist_binary(&images, method)?,
        MNIST_DIGITS.iter().map(|d| d.to_string()).collect(),
        (0..nt).collect(),
        (nt..nt + nv).collect(),
    )
}

/// WDBC dataset: a shuffled `train_fraction` split, min-max statistics
/// from the training part only.
pub fn wdbc_dataset(records: &[WdbcRecord], train_fraction: f64, seed: u64) -> Result<ProcessedDataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("train fraction {train_fraction} not in (0, 1)")));
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.shuffle(&mut stream(seed, tag::SPLIT));
    let n_train = (records.len() as f64 * train_fraction).round() as usize;
    let train_recs: Vec<WdbcRecord> = order[..n_train].iter().map(|&i| records[i].clone()).collect();
    let scaler = WdbcScaler::fit(&train_recs)?;
    let samples = order
        .iter()
        .map(|&i| {
            let r = &records[i];
            encode_sample(&wdbc_to_features(r, &scaler)?, r.diagnosis.class(), 2)
        })
        .collect::<Result<Vec<_>>>()?;
    ProcessedDataset::new(
        samples,
        vec!["M".into(), "B".into()],
        (0..n_train).collect(),
        (n_train..records.len()).collect(),
    )
}

/// Splits indices of `pool` into `n_groups` groups of `per_group` whose
/// class counts differ by at most one, plus `n_rest` further indices.
pub fn partition_balanced(
    pool: &[LabeledSample],
    n_groups: usize,
    per_group: usize,
    n_rest: usize,
    rng: &mut impl Rng,
) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    let need = n_groups * per_group + n_rest;
    if need > pool.len() {
        return Err(Error::InsufficientSamples(format!(
            "need {need} samples, dataset has {}",
            pool.len()
        )));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in pool.iter().enumerate() {
        by_class.entry(s.class()).or_default().push(i);
    }
    for idx in by_class.values_mut() {
        idx.shuffle(rng);
    }
    let classes: Vec<usize> = by_class.keys().copied().collect();
    let k = classes.len();
    let mut groups = Vec::with_capacity(n_groups);
    for g in 0..n_groups {
        let mut members = Vec::with_capacity(per_group);
        for (ci, c) in classes.iter().enumerate() {
            // Rotate who gets the remainder so class totals stay even.
            let extra = usize::from((ci + k - g % k) % k < per_group % k);
            let want = per_group / k + extra;
            let bucket = by_class.get_mut(c).expect("class present");
            if bucket.len() < want {
                return Err(Error::InsufficientSamples(format!(
                    "class {c} runs out while building balanced group {g}"
                )));
            }
            members.extend(bucket.drain(bucket.len() - want..));
        }
        members.shuffle(rng);
        groups.push(members);
    }
    let mut rest: Vec<usize> = by_class.into_values().flatten().collect();
    rest.shuffle(rng);
    rest.truncate(n_rest);
    Ok((groups, rest))
}

/// `n_clients` disjoint class-balanced shards of `n_per_client` samples and
/// a disjoint validation pool of `n_validation`. Deterministic in `seed`.
pub fn make_shards(
    dataset: &[LabeledSample],
    n_clients: usize,
    n_per_client: usize,
    n_validation: usize,
    seed: u64,
) -> Result<(Vec<ClientShard>, Vec<LabeledSample>)> {
    if n_clients == 0 || n_per_client == 0 {
        return Err(Error::InvalidArgument("need at least one client with at least one sample".into()));
    }
    let mut rng = stream(seed, tag::SHARDS);
    let (groups, rest) = partition_balanced(dataset, n_clients, n_per_client, n_validation, &mut rng)?;
    let pick = |idx: &[usize]| idx.iter().map(|&i| dataset[i].clone()).collect::<Vec<_>>();
    let shards = groups
        .iter()
        .enumerate()
        .map(|(i, g)| ClientShard::new(i, pick(g), seed))
        .collect();
    Ok((shards, pick(&rest)))
}

/// Real amplitudes of an encoded input.
pub fn real_features(state: &Statevector) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> Vec<LabeledSample> {
        (0..n)
            .map(|i| LabeledSample::from_class(Statevector::basis(3, i % 8).unwrap(), i % 2, 2).unwrap())
            .collect()
    }

    #[test]
    fn shards_are_balanced_and_disjoint() {
        let data = toy(100);
        let (shards, val) = make_shards(&data, 4, 15, 20, 3).unwrap();
        assert_eq!(shards.len(), 4);
        for s in &shards {
            assert_eq!(s.len(), 15);
            let c = s.class_counts(2);
            assert!(c[0].abs_diff(c[1]) <= 1, "{c:?}");
        }
        assert_eq!(val.len(), 20);
        assert!(make_shards(&data, 10, 10, 1, 3).is_err());
        let (groups, rest) = partition_balanced(&data, 4, 15, 20, &mut stream(3, tag::SHARDS)).unwrap();
        let mut all: Vec<usize> = groups.concat();
        all.extend(&rest);
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn one_client_one_shard() {
        let (shards, val) = make_shards(&toy(10), 1, 10, 0, 0).unwrap();
        assert_eq!(shards[0].len(), 10);
        assert!(val.is_empty());
    }

    #[test]
    fn split_rejects_overlap() {
        let d = toy(4);
        assert!(ProcessedDataset::new(d.clone(), vec!["a".into(), "b".into()], vec![0, 1], vec![1]).is_err());
        assert!(ProcessedDataset::new(d, vec!["a".into(), "b".into()], vec![0, 1], vec![2, 3]).is_ok());
    }
}
