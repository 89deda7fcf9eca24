//! Limit measures `C_{j,k}` of the scaled process, estimated by sampling
//! Pareto jump configurations, plus closed forms for two catalog sets.
//!
//! `C_{j,k}(A)` integrates `ν_α^j × ν_β^k` (restricted to ordered jump
//! sizes) against uniform jump times. Above floors `δ₊, δ₋` the normalized
//! restriction of `ν_α` is the Pareto(α, δ₊) law, so
//!
//! `C_{j,k}(A) = δ₊^(−jα) δ₋^(−kβ) P(config ∈ A) / (j! k!)`
//!
//! whenever every member of `A ∩ D_{j,k}` has its jumps above the floors.

use rand::Rng;
use serde::Serialize;

use crate::cadlag::{StepPath, TargetSet};
use crate::error::{domain, Error, Result};
use crate::estimate::{tally_batches, Estimate, DEFAULT_BATCH_SIZE};
use crate::quad::adaptive_simpson;
use crate::rng::RngStream;

/// Jump sizes and times of a limit configuration, as `(size, time)` pairs.
/// Down sizes are positive magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitConfig {
    pub up: Vec<(f64, f64)>,
    pub down: Vec<(f64, f64)>,
}

impl LimitConfig {
    pub fn to_path(&self) -> StepPath {
        StepPath::from_up_down(&self.up, &self.down).expect("limit configurations have distinct times")
    }
}

/// Parameters of a `C_{j,k}` computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitParams {
    pub alpha: f64,
    pub beta: f64,
    pub j: u32,
    pub k: u32,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

impl LimitParams {
    pub fn new(alpha: f64, beta: f64, j: u32, k: u32, delta_plus: f64, delta_minus: f64) -> Result<Self> {
        if !(alpha > 1.0 && beta > 1.0) {
            return Err(domain(format!("tail indices must exceed 1, got {alpha}, {beta}")));
        }
        if !(delta_plus > 0.0 && delta_minus > 0.0 && delta_plus.is_finite() && delta_minus.is_finite()) {
            return Err(domain(format!("floors must be positive, got {delta_plus}, {delta_minus}")));
        }
        Ok(LimitParams { alpha, beta, j, k, delta_plus, delta_minus })
    }

    /// Floors taken from the set's certificate for both signs.
    pub fn from_hint(set: &TargetSet, alpha: f64, beta: f64, j: u32, k: u32) -> Result<Self> {
        let d = set
            .hint_delta
            .ok_or_else(|| Error::Precondition(format!("set {} carries no floor certificate", set.name())))?;
        Self::new(alpha, beta, j, k, d, d)
    }

    /// `δ₊^(−jα) δ₋^(−kβ) / (j! k!)`: the mass of the floored product measure.
    pub fn mass(&self) -> f64 {
        self.delta_plus.powf(-(self.j as f64) * self.alpha) * self.delta_minus.powf(-(self.k as f64) * self.beta)
            / (factorial(self.j) * factorial(self.k))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn pareto<R: Rng + ?Sized>(index: f64, floor: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    floor * (1.0 - u).powf(-1.0 / index)
}

/// Draws `j` Pareto(α, δ₊) up-jumps and `k` Pareto(β, δ₋) down-jumps at
/// uniform times, all distinct and inside `(0, 1)`.
pub fn sample_limit_config<R: Rng + ?Sized>(p: &LimitParams, rng: &mut R) -> LimitConfig {
    let total = (p.j + p.k) as usize;
    let mut times = Vec::with_capacity(total);
    loop {
        times.clear();
        times.extend((0..total).map(|_| rng.random::<f64>()));
        let mut sorted = times.clone();
        sorted.sort_by(f64::total_cmp);
        let distinct = sorted.windows(2).all(|w| w[0] < w[1]);
        if distinct && sorted.first().is_none_or(|&t| t > 0.0) {
            break;
        }
    }
    let up = (0..p.j as usize).map(|i| (pareto(p.alpha, p.delta_plus, rng), times[i])).collect();
    let down = (0..p.k as usize).map(|i| (pareto(p.beta, p.delta_minus, rng), times[p.j as usize + i])).collect();
    LimitConfig { up, down }
}

/// Fraction of sampled configurations whose path lies in `set`.
pub fn hit_fraction(set: &TargetSet, p: &LimitParams, n: u64, stream: RngStream) -> Result<Estimate> {
    if n == 0 {
        return Err(domain("need at least one sample"));
    }
    let tally = tally_batches(stream, n, DEFAULT_BATCH_SIZE, |rng| {
        let cfg = sample_limit_config(p, rng);
        if set.contains_step(&cfg.to_path()) {
            1.0
        } else {
            0.0
        }
    });
    Ok(tally.estimate())
}

/// Unbiased estimate of `C_{j,k}(set)` from `n` sampled configurations.
pub fn estimate_c(set: &TargetSet, p: &LimitParams, n: u64, stream: RngStream) -> Result<Estimate> {
    Ok(hit_fraction(set, p, n, stream)?.scaled(p.mass()))
}

/// Path drawn from the limit law conditioned on `set`, by rejection; also
/// returns the number of proposals used. The acceptance probability is
/// `C_{j,k}(set)` divided by [`LimitParams::mass`].
pub fn conditional_sample<R: Rng + ?Sized>(
    set: &TargetSet,
    p: &LimitParams,
    rng: &mut R,
    max_tries: u64,
) -> Result<(StepPath, u64)> {
    if max_tries == 0 {
        return Err(domain("max_tries must be >= 1"));
    }
    for tries in 1..=max_tries {
        let path = sample_limit_config(p, rng).to_path();
        if set.contains_step(&path) {
            return Ok((path, tries));
        }
    }
    Err(Error::NoAcceptance { tries: max_tries, accepted: 0 })
}

/// `C_1` of `{x 1_[u,1] : a + cu ≤ x ≤ b}` under `ν_α`, i.e.
/// `∫_0^1 [(a + cu)^(−α) − b^(−α)]⁺ du`. `b` may be infinite.
pub fn c1_corridor_closed_form(a: f64, b: f64, c: f64, alpha: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite() && b > a && c >= 0.0 && c.is_finite() && alpha > 1.0) {
        return Err(domain(format!("need 0 < a < b, c >= 0, α > 1 (a = {a}, b = {b}, c = {c}, α = {alpha})")));
    }
    let cap = b.powf(-alpha);
    if c == 0.0 {
        return Ok(a.powf(-alpha) - cap);
    }
    // the integrand is positive while a + cu < b
    let u_end = ((b - a) / c).min(1.0);
    let head = (a.powf(1.0 - alpha) - (a + c * u_end).powf(1.0 - alpha)) / (c * (alpha - 1.0));
    Ok(head - u_end * cap)
}

/// `C_{1,1}` of the Ornstein-Uhlenbeck barrier set
/// `{ξ : inf φ(ξ) ≤ −a₋, φ(ξ)(1) ≥ a₊}`, i.e.
/// `∫_0^1 ∫_{a₋}^∞ ∫_v^1 [a₊e^{κ(1−u)} + y e^{−κ(u−v)}]^(−α) du βy^(−β−1) dy dv`,
/// to relative tolerance `tol`.
pub fn c11_ou_quadrature(a_plus: f64, a_minus: f64, kappa: f64, alpha: f64, beta: f64, tol: f64) -> Result<f64> {
    if !(a_plus > 0.0 && a_minus > 0.0 && kappa >= 0.0 && kappa.is_finite() && alpha > 1.0 && beta > 1.0) {
        return Err(domain("need a± > 0, κ >= 0, α, β > 1"));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be > 0, got {tol}")));
    }
    if a_plus.is_infinite() || a_minus.is_infinite() {
        return Ok(0.0);
    }
    // With K = a₊e^κ + y e^{κv} the bracket is K e^{−κu}, so the u-integral
    // is K^(−α) (e^{ακ} − e^{ακv}) / (ακ).
    let u_integral = |v: f64, y: f64| -> f64 {
        if kappa == 0.0 {
            (1.0 - v) * (a_plus + y).powf(-alpha)
        } else {
            let k0 = a_plus * kappa.exp() + y * (kappa * v).exp();
            k0.powf(-alpha) * ((alpha * kappa).exp() - (alpha * kappa * v).exp()) / (alpha * kappa)
        }
    };
    // p = (y / a₋)^(−β) maps y ∈ [a₋, ∞) onto p ∈ (0, 1] with βy^(−β−1)dy = a₋^(−β) dp.
    let inner = |v: f64, p: f64| if p <= 0.0 { 0.0 } else { u_integral(v, a_minus * p.powf(-1.0 / beta)) };
    let bound = a_plus.powf(-alpha) * (alpha * kappa).exp();
    let abs_tol = tol * bound * 0.01;
    let failure = std::cell::Cell::new(None);
    let outer = |v: f64| match adaptive_simpson(|p| inner(v, p), 0.0, 1.0, abs_tol, 2_000_000) {
        Ok(x) => x,
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let value = adaptive_simpson(outer, 0.0, 1.0, abs_tol, 2_000_000)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(a_minus.powf(-beta) * value)
}
