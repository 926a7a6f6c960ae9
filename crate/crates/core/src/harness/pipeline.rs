//! Dataset assembly for experiment runs.

use std::path::{Path, PathBuf};

use super::config::{DatasetKind, EncodingKind, ExperimentConfig};
use crate::data::{
    downsample, load_mnist, load_wdbc, make_shards, mnist_binary, mnist_class_of, mnist_selection, wdbc_dataset,
    Downsample, RawImage, WdbcRecord, MNIST_DIGITS,
};
use crate::encoding::{rotation_encoded_state, scale_to_angles};
use crate::error::{Error, Result};
use crate::federated::ClientShard;
use crate::vqc::{ClassifierTemplate, DenseSample, LabeledSample, RotationLayout};

/// Qubits and depth of the fixed rotation encoder.
pub const ENCODER_QUBITS: usize = 8;

/// Raw records read from `data_dir`.
#[derive(Clone, Debug)]
pub enum RawData {
    Mnist { train: Vec<RawImage>, test: Vec<RawImage> },
    Wdbc(Vec<WdbcRecord>),
}

/// Train and validation samples plus class names.
#[derive(Clone, Debug)]
pub struct Split {
    pub train: Vec<LabeledSample>,
    pub validation: Vec<LabeledSample>,
    pub class_names: Vec<String>,
}

fn locate(dir: &Path, names: &[&str]) -> Result<PathBuf> {
    for sub in [dir.to_path_buf(), dir.join("mnist"), dir.join("wdbc")] {
        for name in names {
            for candidate in [sub.join(format!("{name}.gz")), sub.join(name)] {
                if candidate.is_file() {
                    return Ok(candidate);
                }
            }
        }
    }
    Err(Error::Config(format!("data_dir: no {} under {}", names[0], dir.display())))
}

/// Reads the dataset files named by `config.dataset` from `config.data_dir`.
pub fn load_raw(config: &ExperimentConfig) -> Result<RawData> {
    let dir = &config.data_dir;
    match config.dataset {
        DatasetKind::Mnist => {
            let train = load_mnist(
                &locate(dir, &["train-images-idx3-ubyte", "train-images.idx3-ubyte"])?,
                &locate(dir, &["train-labels-idx1-ubyte", "train-labels.idx1-ubyte"])?,
            )?;
            let test = load_mnist(
                &locate(dir, &["t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"])?,
                &locate(dir, &["t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"])?,
            )?;
            Ok(RawData::Mnist { train, test })
        }
        DatasetKind::Wdbc => Ok(RawData::Wdbc(load_wdbc(&locate(dir, &["wdbc.data"])?)?)),
    }
}

/// The fixed encoder circuit: the `Rotor` layout at eight qubits whose first
/// 256 parameters take the pixel angles.
pub fn rotation_encoder(depth: usize) -> Result<ClassifierTemplate> {
    ClassifierTemplate::new(ENCODER_QUBITS, depth, &[0], RotationLayout::Rotor)
}

/// Encoder output states of the 1-vs-9 images in `images`.
pub fn rotation_samples(
    images: &[RawImage],
    method: Downsample,
    encoder: &ClassifierTemplate,
    angle_max: f64,
) -> Result<Vec<LabeledSample>> {
    images
        .iter()
        .filter_map(|img| mnist_class_of(img).map(|c| (img, c)))
        .map(|(img, class)| {
            let angles = scale_to_angles(&downsample(img, method), 0.0, 1.0, angle_max)?;
            LabeledSample::from_class(rotation_encoded_state(&angles, encoder)?, class, MNIST_DIGITS.len())
        })
        .collect()
}

fn encode_images(config: &ExperimentConfig, images: &[RawImage]) -> Result<Vec<LabeledSample>> {
    match config.encoding {
        EncodingKind::Amplitude => mnist_binary(images, config.downsample),
        EncodingKind::Rotation => rotation_samples(
            images,
            config.downsample,
            &rotation_encoder(config.encoder_depth)?,
            config.rotation_angle_max,
        ),
    }
}

fn check_width(config: &ExperimentConfig, samples: &[LabeledSample]) -> Result<()> {
    if let Some(s) = samples.first() {
        if s.input.n_qubits() != config.num_qubits {
            return Err(Error::Config(format!(
                "num_qubits: the data encode to {} qubits, not {}",
                s.input.n_qubits(),
                config.num_qubits
            )));
        }
    }
    Ok(())
}

/// Single-client split under `seed`.
pub fn single_split(config: &ExperimentConfig, raw: &RawData, seed: u64) -> Result<Split> {
    let split = match raw {
        RawData::Mnist { train, test } => {
            let (tr, va) = mnist_selection(
                train,
                test,
                config.train_size,
                config.validation_size,
                config.downsample,
                seed,
            )?;
            Split {
                train: encode_images(config, &tr)?,
                validation: encode_images(config, &va)?,
                class_names: MNIST_DIGITS.iter().map(|d| d.to_string()).collect(),
            }
        }
        RawData::Wdbc(records) => {
            let ds = wdbc_dataset(records, config.train_fraction, seed)?;
            Split {
                train: ds.train_samples(),
                validation: ds.validation_samples(),
                class_names: ds.class_map.clone(),
            }
        }
    };
    check_width(config, &split.train)?;
    Ok(split)
}

/// Client shards and the orchestrator's validation pool under `seed`.
///
/// MNIST shards come from the 1-vs-9 training file. WDBC shards come from
/// all records, scaled with statistics of a `train_fraction` part.
pub fn federated_split(config: &ExperimentConfig, raw: &RawData, seed: u64) -> Result<(Vec<ClientShard>, Vec<LabeledSample>)> {
    let pool = match raw {
        RawData::Mnist { train, .. } => encode_images(config, train)?,
        RawData::Wdbc(records) => wdbc_dataset(records, config.train_fraction, seed)?.samples,
    };
    check_width(config, &pool)?;
    let available = pool.len().saturating_sub(config.num_clients * config.training_set_per_client);
    make_shards(
        &pool,
        config.num_clients,
        config.training_set_per_client,
        config.validation_size.min(available),
        seed,
    )
}

/// Dense features of an encoded state: real parts, then imaginary parts.
pub fn dense_features(samples: &[LabeledSample]) -> Vec<DenseSample> {
    samples
        .iter()
        .map(|s| {
            let amps = s.input.amplitudes();
            let mut features: Vec<f64> = amps.iter().map(|a| a.re).collect();
            features.extend(amps.iter().map(|a| a.im));
            DenseSample {
                features,
                class: s.class(),
            }
        })
        .collect()
}
