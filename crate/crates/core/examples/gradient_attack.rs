//! Trains a small MNIST classifier, then reconstructs a client's input from
//! the gradient it would share, with and without clipping and noise.
//!
//! ```text
//! cargo run --release --example gradient_attack -- [data_dir]
//! ```

use std::path::PathBuf;

use qfl::attack::{run_attack, victim_upload, AttackConfig, Defense, InputGradMethod};
use qfl::data::{load_mnist, mnist_dataset, Downsample};
use qfl::federated::{ClipMode, NoiseKind};
use qfl::rng::stream;
use qfl::vqc::{build_classifier, train_single, TrainConfig};

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
    let ds = mnist_dataset(&train, &test, 1000, 200, Downsample::AreaAverage, 0)?;
    let template = build_classifier(8, 30, &[0])?;
    let config = TrainConfig {
        learning_rate: 0.001,
        iterations: 300,
        ..TrainConfig::default()
    };
    let model = train_single(&ds.train_samples(), &ds.validation_samples(), &template, &config)?.params;

    let attack = AttackConfig::all_labels(2, 500, 0.01, InputGradMethod::Analytic);
    let validation = ds.validation_samples();
    let defense = Defense {
        clip_bound: 0.01,
        clip_mode: ClipMode::Elementwise,
        mu: 0.05,
        noise: NoiseKind::Gaussian,
    };
    for class in 0..2 {
        let victim = validation.iter().find(|s| s.class() == class).expect("both classes present");
        for (name, d) in [("no defense", None), ("clip 0.01, mu 0.05", Some(defense))] {
            let upload = victim_upload(&template, &model, &victim.input, victim.label(), d, &mut stream(0, 99))?;
            let r = run_attack(&template, &model, &upload, &attack, Some(&victim.input))?;
            println!(
                "{name:<20} true class {} recovered class {} fidelity {:.4} losses {:?}",
                victim.class(),
                qfl::vqc::argmax(&r.recovered_label),
                r.fidelity_vs_truth.unwrap_or(f64::NAN),
                r.per_label_losses().iter().map(|(_, l)| format!("{l:.2e}")).collect::<Vec<_>>()
            );
        }
    }
    Ok(())
}
