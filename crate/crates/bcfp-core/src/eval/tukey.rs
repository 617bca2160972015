//! One-way ANOVA pooled variance plus Tukey HSD pairwise comparisons
//! over the studentized range distribution.

use crate::eval::srange::studentized_range_cdf;
use crate::eval::EvalError;

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison {
    pub a: usize,
    pub b: usize,
    /// mean(a) − mean(b).
    pub mean_diff: f64,
    /// Studentized range statistic, Tukey–Kramer for unequal n.
    pub q: f64,
    pub p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TukeyResult {
    pub group_means: Vec<f64>,
    pub group_sizes: Vec<usize>,
    /// Pooled within-group variance.
    pub mse: f64,
    /// Error degrees of freedom, Σ(nᵢ − 1).
    pub df: usize,
    pub alpha: f64,
    /// One entry per unordered pair, a < b.
    pub pairs: Vec<PairComparison>,
    /// Set when MSE is exactly zero and p-values were pinned.
    pub degenerate: bool,
}

impl TukeyResult {
    /// Symmetric lookup: (i, j) mirrors (j, i) with the sign of
    /// `mean_diff` flipped.
    pub fn pair(&self, i: usize, j: usize) -> Option<PairComparison> {
        let (lo, hi) = (i.min(j), i.max(j));
        let found = self.pairs.iter().find(|p| p.a == lo && p.b == hi)?;
        let mut out = found.clone();
        if i > j {
            out.mean_diff = -out.mean_diff;
            out.a = i;
            out.b = j;
        }
        Some(out)
    }
}

/// Tukey HSD over k groups of metric values. Equal group sizes use the
/// classic statistic; unequal sizes fall back to the Tukey–Kramer
/// harmonic adjustment q = |mᵢ−mⱼ| / √(MSE/2 · (1/nᵢ + 1/nⱼ)).
///
/// Zero pooled variance is reported rather than erroring: identical
/// groups get p = 1, separated means get p = 0, and the result is
/// flagged degenerate.
pub fn tukey_hsd(groups: &[Vec<f64>], alpha: f64) -> Result<TukeyResult, EvalError> {
    let k = groups.len();
    if k < 2 {
        return Err(EvalError::TooFewGroups);
    }
    if groups.iter().any(|g| g.len() < 2) {
        return Err(EvalError::TooFewValues);
    }

    let group_sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let group_means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();

    let mut ss_within = 0.0;
    for (g, &mean) in groups.iter().zip(&group_means) {
        ss_within += g.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    }
    let df: usize = group_sizes.iter().map(|&n| n - 1).sum();
    let mse = ss_within / df as f64;
    let degenerate = mse == 0.0;

    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            let diff = group_means[a] - group_means[b];
            let (q, p) = if degenerate {
                if diff == 0.0 {
                    (0.0, 1.0)
                } else {
                    (f64::INFINITY, 0.0)
                }
            } else {
                let se = (mse / 2.0 * (1.0 / group_sizes[a] as f64 + 1.0 / group_sizes[b] as f64))
                    .sqrt();
                let q = diff.abs() / se;
                (q, 1.0 - studentized_range_cdf(q, k, df as f64))
            };
            pairs.push(PairComparison {
                a,
                b,
                mean_diff: diff,
                q,
                p,
                significant: p < alpha,
            });
        }
    }

    Ok(TukeyResult {
        group_means,
        group_sizes,
        mse,
        df,
        alpha,
        pairs,
        degenerate,
    })
}
