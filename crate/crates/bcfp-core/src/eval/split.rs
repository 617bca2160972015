//! Stratified split generation. Splits are a function of (labels, seed)
//! only, so every configuration evaluated under the same seed sees the
//! same partition: the paired-replicate design the statistics rely on.

use crate::eval::EvalError;
use crate::pcg::Pcg32;

/// Sorted (train, test) index lists.
pub type TrainTestSplit = (Vec<usize>, Vec<usize>);

// Stream selectors separating split randomness from everything else.
const HOLDOUT_STREAM: u64 = 1;
const KFOLD_STREAM_BASE: u64 = 2;

fn class_indices(labels: &[u8]) -> (Vec<usize>, Vec<usize>) {
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for (i, &y) in labels.iter().enumerate() {
        if y == 1 {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    (neg, pos)
}

/// Stratified train/test split: per class, a seeded shuffle followed by
/// `round(class_size × test_fraction)` rows into test. Returned index
/// lists are sorted and together cover `0..labels.len()`.
pub fn stratified_holdout(
    labels: &[u8],
    test_fraction: f64,
    seed: u64,
) -> Result<TrainTestSplit, EvalError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvalError::BadFraction);
    }
    let (neg, pos) = class_indices(labels);
    if neg.is_empty() || pos.is_empty() {
        return Err(EvalError::DegenerateSplit);
    }

    let mut rng = Pcg32::new(seed, HOLDOUT_STREAM);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [neg, pos] {
        let mut indices = class;
        rng.shuffle(&mut indices);
        let n_test = (indices.len() as f64 * test_fraction).round() as usize;
        if n_test == 0 || n_test == indices.len() {
            return Err(EvalError::DegenerateSplit);
        }
        test.extend_from_slice(&indices[..n_test]);
        train.extend_from_slice(&indices[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Repeated stratified k-fold. Per repeat (one derived stream each), each
/// class is shuffled and dealt round-robin to the k folds; each index
/// lands in exactly one test fold per repeat. Returns `k × repeats`
/// (train, test) pairs, repeat-major.
pub fn stratified_kfold(
    labels: &[u8],
    k: usize,
    seed: u64,
    repeats: usize,
) -> Result<Vec<TrainTestSplit>, EvalError> {
    if k < 2 {
        return Err(EvalError::BadK);
    }
    let (neg, pos) = class_indices(labels);
    if neg.len() < k || pos.len() < k {
        return Err(EvalError::TooFewPerClass);
    }

    let mut folds_out = Vec::with_capacity(k * repeats);
    for repeat in 0..repeats {
        let mut rng = Pcg32::new(seed, KFOLD_STREAM_BASE + repeat as u64);
        let mut fold_of = vec![0usize; labels.len()];
        for class in [neg.clone(), pos.clone()] {
            let mut indices = class;
            rng.shuffle(&mut indices);
            for (i, &idx) in indices.iter().enumerate() {
                fold_of[idx] = i % k;
            }
        }
        for fold in 0..k {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (idx, &f) in fold_of.iter().enumerate() {
                if f == fold {
                    test.push(idx);
                } else {
                    train.push(idx);
                }
            }
            folds_out.push((train, test));
        }
    }
    Ok(folds_out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_stratification_small() {
        let (train, test) = stratified_holdout(&[1, 1, 0, 0], 0.5, 7).unwrap();
        assert_eq!(test.len(), 2);
        assert_eq!(train.len(), 2);
        let test_pos = test.iter().filter(|&&i| i < 2).count();
        assert_eq!(test_pos, 1);
    }

    #[test]
    fn same_seed_same_split() {
        let labels: Vec<u8> = (0..100).map(|i| (i % 3 == 0) as u8).collect();
        let a = stratified_holdout(&labels, 0.2, 42).unwrap();
        let b = stratified_holdout(&labels, 0.2, 42).unwrap();
        assert_eq!(a, b);
        let c = stratified_holdout(&labels, 0.2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn per_class_rounding_drives_test_size() {
        let labels: Vec<u8> = (0..103).map(|i| (i < 31) as u8).collect();
        let (_, test) = stratified_holdout(&labels, 0.2, 0).unwrap();
        let expected = (31.0f64 * 0.2).round() as usize + (72.0f64 * 0.2).round() as usize;
        assert_eq!(test.len(), expected);
    }

    #[test]
    fn degenerate_cases_rejected() {
        assert_eq!(
            stratified_holdout(&[1, 1, 1, 1], 0.5, 0),
            Err(EvalError::DegenerateSplit)
        );
        assert_eq!(
            stratified_holdout(&[1, 0], 0.2, 0),
            Err(EvalError::DegenerateSplit)
        );
        assert_eq!(
            stratified_holdout(&[1, 0, 1, 0], 0.0, 0),
            Err(EvalError::BadFraction)
        );
    }

    #[test]
    fn split_covers_everything_disjointly() {
        let labels: Vec<u8> = (0..57).map(|i| (i % 4 == 0) as u8).collect();
        let (train, test) = stratified_holdout(&labels, 0.25, 3).unwrap();
        let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..57).collect::<Vec<_>>());
    }

    #[test]
    fn kfold_small_balanced() {
        let labels = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0];
        let folds = stratified_kfold(&labels, 5, 0, 1).unwrap();
        assert_eq!(folds.len(), 5);
        for (_, test) in &folds {
            assert_eq!(test.len(), 2);
            let pos = test.iter().filter(|&&i| labels[i] == 1).count();
            assert_eq!(pos, 1);
        }
    }

    #[test]
    fn kfold_partition_property() {
        let labels: Vec<u8> = (0..83).map(|i| (i % 5 == 0) as u8).collect();
        let folds = stratified_kfold(&labels, 4, 9, 3).unwrap();
        assert_eq!(folds.len(), 12);
        for repeat in 0..3 {
            let mut union: Vec<usize> = Vec::new();
            for fold in 0..4 {
                union.extend(&folds[repeat * 4 + fold].1);
            }
            union.sort_unstable();
            assert_eq!(union, (0..83).collect::<Vec<_>>(), "repeat {repeat}");
        }
    }

    #[test]
    fn five_by_five_yields_25_folds() {
        let labels: Vec<u8> = (0..200).map(|i| (i % 4 == 0) as u8).collect();
        let folds = stratified_kfold(&labels, 5, 0, 5).unwrap();
        assert_eq!(folds.len(), 25);
    }

    #[test]
    fn kfold_validates_inputs() {
        let labels = [1, 0, 1, 0];
        assert_eq!(stratified_kfold(&labels, 1, 0, 1), Err(EvalError::BadK));
        assert_eq!(
            stratified_kfold(&labels, 3, 0, 1),
            Err(EvalError::TooFewPerClass)
        );
    }

    #[test]
    fn kfold_stratification_bound() {
        // per fold, class proportions stay within one row of global
        let labels: Vec<u8> = (0..97).map(|i| (i % 3 == 0) as u8).collect();
        let n_pos: usize = labels.iter().map(|&y| y as usize).sum();
        let folds = stratified_kfold(&labels, 5, 11, 2).unwrap();
        for (train, _) in &folds {
            let train_pos = train.iter().filter(|&&i| labels[i] == 1).count();
            let expected = n_pos as f64 * train.len() as f64 / 97.0;
            assert!(
                (train_pos as f64 - expected).abs() <= 1.0 + 1e-9,
                "train pos {train_pos} vs expected {expected}"
            );
        }
    }
}
