//! Reference implementations used only as test oracles. None of this calls
//! into fpr-core: the central t and normal come from statrs, the noncentral
//! t is integrated directly from its normal/chi mixture, and Monte Carlo
//! draws use rand_distr.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal, StudentsT};
use statrs::function::gamma::ln_gamma;

/// Composite Simpson rule on `[a, b]` with `intervals` (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn t_pdf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).unwrap().pdf(t)
}

pub fn t_cdf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).unwrap().cdf(t)
}

pub fn phi(z: f64) -> f64 {
    Normal::standard().pdf(z)
}

pub fn big_phi(z: f64) -> f64 {
    Normal::standard().cdf(z)
}

/// Density of `W = sqrt(X / df)` for `X ~ chi^2(df)`.
fn chi_scaled_pdf(w: f64, df: f64) -> f64 {
    if w <= 0.0 {
        return if df == 1.0 {
            (2.0 / std::f64::consts::PI).sqrt()
        } else {
            0.0
        };
    }
    let ln = std::f64::consts::LN_2 + 0.5 * df * (0.5 * df).ln() - ln_gamma(0.5 * df)
        + (df - 1.0) * w.ln()
        - 0.5 * df * w * w;
    ln.exp()
}

fn w_upper(df: f64) -> f64 {
    1.0 + 40.0 / df.sqrt()
}

/// Noncentral t CDF as `E_W[Phi(t W - ncp)]`, needs `df >= 1`.
pub fn nct_cdf(t: f64, df: f64, ncp: f64) -> f64 {
    simpson(
        |w| big_phi(t * w - ncp) * chi_scaled_pdf(w, df),
        0.0,
        w_upper(df),
        40_000,
    )
}

/// Noncentral t density as `E_W[W phi(t W - ncp)]`, needs `df >= 1`.
pub fn nct_pdf(t: f64, df: f64, ncp: f64) -> f64 {
    simpson(
        |w| w * phi(t * w - ncp) * chi_scaled_pdf(w, df),
        0.0,
        w_upper(df),
        40_000,
    )
}

/// `n` draws of `(Z + ncp) / sqrt(X / df)`.
pub fn nct_draws(df: f64, ncp: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let chi = ChiSquared::new(df).unwrap();
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let x: f64 = chi.sample(&mut rng);
            (z + ncp) / (x / df).sqrt()
        })
        .collect()
}

/// erf by its Maclaurin series; fine for |x| <= 3.
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1.0;
        term *= -x * x / n;
        sum += term / (2.0 * n + 1.0);
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

/// Normal quantile by bisection on [`erf_series`], for q in [0.01, 0.99].
pub fn norm_quantile_bisect(q: f64) -> f64 {
    let cdf = |z: f64| 0.5 * (1.0 + erf_series(z / std::f64::consts::SQRT_2));
    let (mut lo, mut hi) = (-3.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided power by direct quadrature of the noncentral t tails.
pub fn power(n: f64, es: f64, alpha: f64) -> f64 {
    let df = 2.0 * (n - 1.0);
    let ncp = es / (2.0 / n).sqrt();
    let crit = StudentsT::new(0.0, 1.0, df).unwrap().inverse_cdf(1.0 - alpha / 2.0);
    1.0 - nct_cdf(crit, df, ncp) + nct_cdf(-crit, df, ncp)
}

/// p-equals likelihood ratio from oracle densities.
pub fn lr_p_equals(p: f64, n: f64, es: f64) -> f64 {
    let df = 2.0 * (n - 1.0);
    let ncp = es / (2.0 / n).sqrt();
    let crit = StudentsT::new(0.0, 1.0, df).unwrap().inverse_cdf(1.0 - p / 2.0);
    nct_pdf(crit, df, ncp) / (2.0 * t_pdf(crit, df))
}

pub fn fpr(l10: f64, prior: f64) -> f64 {
    1.0 / (1.0 + l10 * prior / (1.0 - prior))
}

/// Pass if within `abs` absolute or `rel` relative.
pub fn close(actual: f64, expected: f64, abs: f64, rel: f64) -> bool {
    let d = (actual - expected).abs();
    d <= abs || d <= rel * expected.abs()
}

/// Tolerance for a printed value: one unit in its last printed digit or
/// 2% relative, whichever is looser.
pub fn printed(actual: f64, printed: &str) -> bool {
    let expected: f64 = printed.parse().unwrap();
    let decimals = printed.split('.').nth(1).map_or(0, str::len);
    close(actual, expected, 10f64.powi(-(decimals as i32)), 0.02)
}

/// Cushny-Peebles sleep data (extra hours of sleep), two drugs on ten
/// patients each, analysed as independent groups.
pub const SLEEP_A: [f64; 10] = [0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0];
pub const SLEEP_B: [f64; 10] = [1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4];

/// Kolmogorov-Smirnov statistic of a sample against Uniform(0, 1).
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Published comparison table for n = 16, effect size 1, as printed:
/// p, L10, prior for FPR 0.05, then FPR at prior 0.5 and at prior 0.1 for
/// p-equals, Sellke-Berger and Goodman.
pub const TABLE: [[&str; 9]; 5] = [
    ["0.05", "2.8", "0.87", "0.27", "0.29", "0.227", "0.76", "0.79", "0.725"],
    ["0.025", "6.1", "0.76", "0.14", "0.20", "0.140", "0.60", "0.69", "0.593"],
    ["0.01", "15", "0.55", "0.061", "0.11", "0.068", "0.37", "0.53", "0.395"],
    ["0.005", "29", "0.40", "0.034", "0.067", "0.037", "0.24", "0.39", "0.259"],
    ["0.001", "100", "0.16", "0.0099", "0.018", "0.0088", "0.082", "0.14", "0.074"],
];
