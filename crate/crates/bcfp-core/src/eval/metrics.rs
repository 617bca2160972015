//! Binary classification metrics: AUROC (rank form), average precision,
//! and F1 at a fixed threshold.

use crate::eval::EvalError;

/// Area under the ROC curve via the Mann–Whitney rank formulation with
/// average ranks for ties: the probability that a random positive
/// outranks a random negative, ties counting one half.
pub fn auroc(scores: &[f64], labels: &[u8]) -> Result<f64, EvalError> {
    assert_eq!(scores.len(), labels.len());
    let n = scores.len();
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::SingleClass);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());

    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // 1-based average rank of the tie group [i, j)
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }

    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// Average precision: the step-wise sum Σ (Rᵢ − Rᵢ₋₁)·Pᵢ over descending
/// score thresholds, tied scores processed as one threshold group. No
/// interpolation.
pub fn average_precision(scores: &[f64], labels: &[u8]) -> Result<f64, EvalError> {
    assert_eq!(scores.len(), labels.len());
    let n = scores.len();
    let total_pos = labels.iter().filter(|&&y| y == 1).count();
    if total_pos == 0 {
        return Err(EvalError::NoPositives);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut ap = 0.0f64;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_recall = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..j] {
            if labels[idx] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let recall = tp as f64 / total_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    Ok(ap)
}

/// F1 with predictions `score >= threshold`; returns 0 when the
/// denominator is 0.
pub fn f1_at_threshold(scores: &[f64], labels: &[u8], threshold: f64) -> f64 {
    assert_eq!(scores.len(), labels.len());
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&s, &y) in scores.iter().zip(labels) {
        let predicted = s >= threshold;
        match (predicted, y == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}
