//! Federated training on WDBC with four clients at several privacy
//! strengths.
//!
//! ```text
//! cargo run --release --example federated_dp -- [data_dir] [iterations]
//! ```

use std::path::PathBuf;

use qfl::data::{load_wdbc, make_shards, wdbc_dataset};
use qfl::federated::{federated_train, FederationConfig};
use qfl::vqc::build_classifier;

fn main() -> qfl::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "data".into()));
    let iterations: usize = args.next().map_or(300, |s| s.parse().expect("iterations"));

    let pool = wdbc_dataset(&load_wdbc(&dir.join("wdbc.data"))?, 0.8, 0)?.samples;
    let template = build_classifier(6, 10, &[0])?;
    for mu in [f64::INFINITY, 1.0, 0.1] {
        let (mut shards, validation) = make_shards(&pool, 4, 100, 169, 0)?;
        let config = FederationConfig {
            n_clients: 4,
            samples_per_client: 100,
            iterations,
            learning_rate: 0.01,
            mu,
            eval_every: 50,
            ..FederationConfig::default()
        };
        let out = federated_train(&mut shards, &validation, &template, &config)?;
        let accs: Vec<String> = out
            .history
            .iter()
            .filter_map(|r| r.val_acc.map(|a| format!("{a:.2}")))
            .collect();
        println!("mu {mu:>4}: validation accuracy every 50 rounds [{}]", accs.join(" "));
    }
    Ok(())
}
