//! Studentized range distribution CDF by double Gauss–Legendre
//! quadrature.
//!
//! P(Q ≤ q; k, ν) = ∫₀^∞ g_ν(s) · R_k(q·s) ds, where g_ν is the density
//! of χ_ν/√ν and R_k(w) = k ∫ φ(z) [Φ(z) − Φ(z−w)]^{k−1} dz is the CDF
//! of the range of k standard normals. Both integrals run over truncated
//! domains wide enough that the discarded tails are far below the 1e-4
//! absolute error target.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Standard normal density.
fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF via erf.
fn big_phi(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Error function, Abramowitz & Stegun 7.1.26 rational approximation
/// (|error| < 1.5e-7, far below the quadrature's error budget).
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// ln Γ(z) by the Lanczos approximation.
fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut sum = 1.000000000190015;
    for (i, &c) in COEFFS.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * sum / z).ln()
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            // Legendre P_n(x) and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // recompute derivative at the converged node for the weight
        let mut p0 = 1.0;
        let mut p1 = x;
        for j in 2..=n {
            let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn quad_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(48))
}

/// Integrate `f` over [a, b] with the cached rule split into `panels`
/// subintervals.
fn integrate<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    let (nodes, weights) = quad_rule();
    let mut total = 0.0;
    let step = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * step;
        let half = step / 2.0;
        let mid = lo + half;
        let mut acc = 0.0;
        for (&x, &w) in nodes.iter().zip(weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// CDF of the range of k standard normals at w.
fn range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let value = integrate(-8.5, 8.5, 4, |z| {
        let inner = big_phi(z) - big_phi(z - w);
        if inner <= 0.0 {
            0.0
        } else {
            phi(z) * inner.powi(km1)
        }
    });
    (k as f64 * value).clamp(0.0, 1.0)
}

/// Studentized range CDF for k groups and df degrees of freedom.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    assert!(k >= 2, "k must be at least 2");
    assert!(df >= 1.0, "df must be at least 1");
    if q <= 0.0 {
        return 0.0;
    }
    if !q.is_finite() {
        return 1.0;
    }

    // density of S = chi_nu / sqrt(nu):
    //   g(s) = 2 (nu/2)^(nu/2) / Gamma(nu/2) * s^(nu-1) * exp(-nu s^2 / 2)
    let nu = df;
    let ln_norm = (2.0f64).ln() + (nu / 2.0) * (nu / 2.0).ln() - ln_gamma(nu / 2.0);
    let g = |s: f64| -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        (ln_norm + (nu - 1.0) * s.ln() - nu * s * s / 2.0).exp()
    };

    // S concentrates around 1 with spread ~ 1/sqrt(2 nu)
    let spread = 1.0 / (2.0 * nu).sqrt();
    let (lo, hi, panels) = if nu < 4.0 {
        (1e-9, 8.0, 8)
    } else {
        ((1.0 - 12.0 * spread).max(1e-9), 1.0 + 12.0 * spread, 4)
    };

    let value = integrate(lo, hi, panels, |s| g(s) * range_cdf(q * s, k));
    value.clamp(0.0, 1.0)
}

/// Smallest q with CDF(q) ≥ p, by bisection. Used for critical values.
pub fn studentized_range_quantile(p: f64, k: usize, df: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 2.0;
    while studentized_range_cdf(hi, k, df) < p {
        hi *= 2.0;
        if hi > 1e4 {
            break;
        }
    }
    for _ in 0..60 {
        let mid = (lo + hi) / 2.0;
        if studentized_range_cdf(mid, k, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}
