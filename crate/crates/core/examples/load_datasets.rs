//! Loads MNIST and WDBC, builds the encoded datasets and round-trips one
//! through the binary cache.
//!
//! ```text
//! cargo run --release --example load_datasets -- [data_dir]
//! ```

use std::path::PathBuf;

use qfl::data::{
    downsample, load_mnist, load_wdbc, mnist_dataset, read_cache, wdbc_dataset, write_cache, Downsample, MNIST_DIGITS,
};

fn main() -> qfl::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    let mnist = dir.join("mnist");
    let train = load_mnist(
        &mnist.join("train-images-idx3-ubyte.gz"),
        &mnist.join("train-labels-idx1-ubyte.gz"),
    )?;
    let test = load_mnist(
        &mnist.join("t10k-images-idx3-ubyte.gz"),
        &mnist.join("t10k-labels-idx1-ubyte.gz"),
    )?;
    println!("MNIST: {} train and {} test images", train.len(), test.len());
    let first = train.iter().find(|i| i.label == MNIST_DIGITS[0]).expect("a digit 1");
    for row in downsample(first, Downsample::AreaAverage).chunks(16) {
        println!("  {}", row.iter().map(|&v| if v > 0.3 { '#' } else { '.' }).collect::<String>());
    }

    let ds = mnist_dataset(&train, &test, 2000, 500, Downsample::AreaAverage, 0)?;
    println!(
        "1 vs 9: {} train, {} validation, {} qubits, classes {:?}",
        ds.train.len(),
        ds.validation.len(),
        ds.n_qubits(),
        ds.class_map
    );
    let mut bytes = Vec::new();
    write_cache(&mut bytes, &ds)?;
    assert_eq!(read_cache(bytes.as_slice())?, ds);
    println!("cache: {} bytes, round trip exact", bytes.len());

    let records = load_wdbc(&dir.join("wdbc.data"))?;
    let wdbc = wdbc_dataset(&records, 0.8, 0)?;
    println!(
        "WDBC: {} records, {} train, {} validation, {} qubits, classes {:?}",
        records.len(),
        wdbc.train.len(),
        wdbc.validation.len(),
        wdbc.n_qubits(),
        wdbc.class_map
    );
    Ok(())
}
