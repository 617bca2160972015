//! Shared synthetic-data builders for the criterion benchmarks.

use bcfp_core::featurize::FeatureMatrix;
use bcfp_core::pcg::Pcg32;

/// A handful of drug-like SMILES spanning rings, charges, and fused
/// aromatics; enough spread to exercise the parser and fingerprints.
pub const SAMPLE_SMILES: [&str; 10] = [
    "CC(C)NCC(O)COc1cccc2ccccc12",
    "Cc1onc(c2ccccc2Cl)c1C(=O)N[C@H]3[C@H]4SC(C)(C)[C@@H](N4C3=O)C(O)=O",
    "CN1C(=O)N(C)c2nc[nH]c2C1=O",
    "CC(=O)Oc1ccccc1C(=O)O",
    "C1CCN(CC1)Cc1cccc(c1)OCCCNC(=O)C",
    "Clc1ccc(COC(Cn2ccnc2)c3ccc(Cl)cc3Cl)cc1",
    "COc1ccc2nccc([C@H](O)[C@H]3C[C@@H]4CCN3C[C@@H]4C=C)c2c1",
    "[Na+].CCOc1ccc2ccccc2c1C(=O)N[C@H]3[C@H]4SC(C)(C)[C@@H](N4C3=O)C([O-])=O",
    "CC(=O)Nc1ccc(O)cc1",
    "c1ccc2c(c1)oc1ccccc12",
];

/// Random count-feature matrix with weakly informative columns, for
/// model benchmarks.
pub fn synthetic_matrix(n_rows: usize, n_cols: usize, seed: u64) -> FeatureMatrix {
    let mut rng = Pcg32::new(seed, 77);
    let mut rows = Vec::with_capacity(n_rows);
    let mut labels = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let label = (rng.next_bounded(2) == 1) as u8;
        let row: Vec<u32> = (0..n_cols)
            .map(|c| {
                let base = rng.next_bounded(4);
                // a few columns carry signal
                if c % 97 == 0 && label == 1 {
                    base + rng.next_bounded(3)
                } else {
                    base
                }
            })
            .collect();
        rows.push(row);
        labels.push(label);
    }
    FeatureMatrix::from_rows(rows, labels).expect("aligned labels")
}

/// Random score/label vectors for metric benchmarks.
pub fn synthetic_scores(n: usize, seed: u64) -> (Vec<f64>, Vec<u8>) {
    let mut rng = Pcg32::new(seed, 78);
    let mut scores = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let label = (rng.next_bounded(2) == 1) as u8;
        let score = 0.3 * label as f64 + 0.7 * rng.next_f64();
        scores.push(score);
        labels.push(label);
    }
    (scores, labels)
}
