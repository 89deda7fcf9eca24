//! Kolmogorov-Smirnov statistics and least-squares slopes.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::RngStream;

/// Two-sample KS statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample KS statistic against the uniform law on `[lo, hi]`.
pub fn ks_uniform(sample: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic for effective sample
/// size `n` (`n·m/(n+m)` in the two-sample case).
pub fn ks_critical_1pct(n_eff: f64) -> f64 {
    1.6276 / n_eff.sqrt()
}

/// Least-squares `(slope, intercept)` of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// 95% percentile interval for the OLS slope, perturbing each `y_i` by
/// independent normal noise with standard deviation `sd_i`.
pub fn bootstrap_slope_ci(x: &[f64], y: &[f64], sd: &[f64], reps: usize, stream: RngStream) -> (f64, f64) {
    let mut rng = stream.rng();
    let mut slopes: Vec<f64> = (0..reps)
        .map(|_| {
            let yb: Vec<f64> = y
                .iter()
                .zip(sd)
                .map(|(&v, &s)| {
                    let z: f64 = rng.sample(StandardNormal);
                    v + s * z
                })
                .collect();
            ols(x, &yb).0
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let at = |q: f64| slopes[((q * (reps - 1) as f64).round() as usize).min(reps - 1)];
    (at(0.025), at(0.975))
}
