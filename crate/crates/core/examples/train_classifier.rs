//! Trains the 8-qubit 1-vs-9 classifier on MNIST and the 6-qubit
//! classifier on WDBC with the direct backend.
//!
//! ```text
//! cargo run --release --example train_classifier -- [data_dir] [iterations]
//! ```

use std::path::PathBuf;

use qfl::data::{load_mnist, load_wdbc, mnist_dataset, wdbc_dataset, Downsample};
use qfl::vqc::{build_classifier, train_single, TrainConfig};

fn main() -> qfl::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "data".into()));
    let iterations: usize = args.next().map_or(300, |s| s.parse().expect("iterations"));

    let mnist = dir.join("mnist");
    let train = load_mnist(
        &mnist.join("train-images-idx3-ubyte.gz"),
        &mnist.join("train-labels-idx1-ubyte.gz"),
    )?;
    let test = load_mnist(
        &mnist.join("t10k-images-idx3-ubyte.gz"),
        &mnist.join("t10k-labels-idx1-ubyte.gz"),
    )?;
    let ds = mnist_dataset(&train, &test, 2000, 500, Downsample::AreaAverage, 0)?;
    let template = build_classifier(8, 30, &[0])?;
    let config = TrainConfig {
        learning_rate: 0.001,
        iterations,
        batch_size: 50,
        ..TrainConfig::default()
    };
    let out = train_single(&ds.train_samples(), &ds.validation_samples(), &template, &config)?;
    for r in out.history.iter().filter(|r| r.val_acc.is_some()) {
        println!("mnist iter {:4} loss {:.4} val {:.3}", r.iteration, r.loss, r.val_acc.unwrap());
    }

    let ds = wdbc_dataset(&load_wdbc(&dir.join("wdbc.data"))?, 0.8, 0)?;
    let template = build_classifier(6, 30, &[0])?;
    let config = TrainConfig { batch_size: 100, ..config };
    let out = train_single(&ds.train_samples(), &ds.validation_samples(), &template, &config)?;
    for r in out.history.iter().filter(|r| r.val_acc.is_some()) {
        println!("wdbc  iter {:4} loss {:.4} val {:.3}", r.iteration, r.loss, r.val_acc.unwrap());
    }
    Ok(())
}
