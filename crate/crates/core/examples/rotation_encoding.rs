//! Feeds MNIST pixels through a fixed rotation encoder, trains the
//! classifier on the encoder output and compares against a classical
//! two-hidden-layer network on the same states.
//!
//! ```text
//! cargo run --release --example rotation_encoding -- [data_dir] [iterations]
//! ```

use qfl::harness::{dense_features, load_raw, run_single, single_split, Command, ExperimentConfig};
use qfl::vqc::{train_classical_baseline, BaselineConfig};

fn main() -> qfl::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| "data".into());
    let iterations = args.next().unwrap_or_else(|| "300".into());
    let config = ExperimentConfig::parse(
        Command::TrainSingle,
        &format!("data_dir = {dir}\nencoding = rotation\nnum_iterations = {iterations}\neval_every = 50\n"),
    )?;
    let split = single_split(&config, &load_raw(&config)?, 0)?;
    println!(
        "encoder: {} qubits, {} layers, {} pixel angles in [0, {:.4}]",
        qfl::harness::ENCODER_QUBITS,
        config.encoder_depth,
        qfl::data::OUT_SIDE * qfl::data::OUT_SIDE,
        config.rotation_angle_max
    );
    let out = run_single(&config, &split)?;
    for r in out.history.iter().filter(|r| r.val_acc.is_some()) {
        println!("vqc iter {:4} loss {:.4} val {:.3}", r.iteration, r.loss, r.val_acc.unwrap_or(0.0));
    }
    let validation = dense_features(&split.validation);
    let (mlp, _) = train_classical_baseline(&dense_features(&split.train), &validation, 2, &BaselineConfig::default())?;
    println!("classical baseline val {:.3}", mlp.accuracy(&validation)?);
    Ok(())
}
