//! Slow stability check, run explicitly:
//! `cargo test -p bcfp-cli --test stability -- --ignored --nocapture`

use std::path::PathBuf;

use bcfp_cli::config::{ForestConfig, SplitConfig};
use bcfp_cli::runner::{make_splits, prepare, run_grid};
use bcfp_core::dataset::{clean_dataset, read_csv};
use bcfp_core::featurize::{FeatureScheme, FingerprintKind, Pooling};

/// Doubling the forest size must barely move the cross-validated mean:
/// 100 → 200 trees changes 5×5-CV mean AUROC by less than 0.01.
#[test]
#[ignore = "trains 50 large forests; run explicitly"]
fn doubling_trees_is_stable() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/BBBP.csv");
    if !path.exists() {
        eprintln!("data/BBBP.csv not present; skipping");
        return;
    }
    let records = read_csv(&path, "smiles", "p_np").unwrap();
    let cleaned = clean_dataset(&records).unwrap();
    let data = prepare(&cleaned.records).unwrap();
    let split = SplitConfig::Kfold {
        k: 5,
        repeats: 5,
        seed: 0,
    };
    let splits = make_splits(&split, &data.labels).unwrap();
    let scheme = FeatureScheme::new(FingerprintKind::Ecfp, 1, Pooling::Folded { dim: 2048 });

    let mean_auroc = |n_trees: usize| {
        let outcome = run_grid(
            &[scheme],
            &splits,
            &data,
            &ForestConfig { n_trees, seed: 0 },
            &Default::default(),
            |_| {},
        );
        assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
        outcome.records.iter().map(|r| r.auroc).sum::<f64>() / outcome.records.len() as f64
    };

    let m100 = mean_auroc(100);
    let m200 = mean_auroc(200);
    let delta = (m200 - m100).abs();
    println!("5x5-CV mean AUROC: 100 trees {m100:.4}, 200 trees {m200:.4}, |Δ| = {delta:.4}");
    assert!(delta < 0.01, "|Δ| = {delta:.4} >= 0.01");
}
