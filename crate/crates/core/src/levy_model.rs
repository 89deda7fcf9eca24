//! Regularly varying Lévy measures.
//!
//! A [`TailModel`] describes one side of the measure through its tail
//! `x -> c * x^(-index) * L(x)` on `[1, ∞)`, frozen at its `x = 1` value on
//! `(0, 1)`. A [`LevyModel`] combines an upward side, an optional downward
//! side, a drift, a Brownian coefficient and the policy for the small-jump
//! component used by the simulator.

use serde::Serialize;

use crate::error::{domain, precondition, Result};
use crate::quad::adaptive_simpson;

/// Absolute tolerance used when `inverse_tail` has to bisect.
pub const INVERSE_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Pos,
    Neg,
}

/// Slowly varying factor of a tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlowVar {
    Constant,
    /// `L(x) = (1 + ln x)^p`.
    LogPower(f64),
}

impl SlowVar {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            SlowVar::Constant => 1.0,
            SlowVar::LogPower(p) => (1.0 + x.ln()).powf(p),
        }
    }
}

/// One side of a regularly varying Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailModel {
    scale: f64,
    index: f64,
    slow_var: SlowVar,
}

impl TailModel {
    /// `scale` may be zero, which describes a side without any mass.
    pub fn new(scale: f64, index: f64, slow_var: SlowVar) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(domain(format!("tail scale must be finite and >= 0, got {scale}")));
        }
        if !(index.is_finite() && index > 1.0) {
            return Err(domain(format!("tail index must be > 1, got {index}")));
        }
        if let SlowVar::LogPower(p) = slow_var {
            // (1 + ln x)^p x^(-index) is nonincreasing on [1, ∞) iff p <= index.
            if !(p.is_finite() && p >= 0.0 && p <= index) {
                return Err(domain(format!("log-power exponent must lie in [0, index], got {p}")));
            }
        }
        Ok(TailModel { scale, index, slow_var })
    }

    pub fn pareto(scale: f64, index: f64) -> Result<Self> {
        Self::new(scale, index, SlowVar::Constant)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    pub fn slow_var(&self) -> SlowVar {
        self.slow_var
    }

    /// Tail mass `ν[x, ∞)` for this side; `x` must be positive.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain(format!("tail argument must be > 0, got {x}")));
        }
        Ok(self.tail_unchecked(x))
    }

    #[inline]
    pub(crate) fn tail_unchecked(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return self.scale;
        }
        self.scale * x.powf(-self.index) * self.slow_var.eval(x)
    }

    /// `inf { s > 0 : n * tail(s) < y }`.
    pub fn inverse_tail(&self, n: u64, y: f64) -> Result<f64> {
        if n == 0 {
            return Err(domain("inverse_tail needs n >= 1"));
        }
        if !(y > 0.0) {
            return Err(domain(format!("inverse_tail argument must be > 0, got {y}")));
        }
        Ok(self.inverse_tail_unchecked(n as f64, y))
    }

    #[inline]
    pub(crate) fn inverse_tail_unchecked(&self, n: f64, y: f64) -> f64 {
        let top = n * self.scale;
        if y > top {
            return 0.0;
        }
        match self.slow_var {
            SlowVar::Constant => (top / y).powf(1.0 / self.index),
            SlowVar::LogPower(_) => self.bisect_inverse(n, y),
        }
    }

    fn bisect_inverse(&self, n: f64, y: f64) -> f64 {
        // n * tail(1) >= y here, and n * tail is continuous and strictly
        // decreasing on [1, ∞), so the infimum is the crossing point.
        let mut lo = 1.0;
        let mut hi = 2.0;
        while n * self.tail_unchecked(hi) >= y {
            lo = hi;
            hi *= 2.0;
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= INVERSE_TAIL_TOL || mid <= lo || mid >= hi {
                return hi;
            }
            if n * self.tail_unchecked(mid) < y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Returns `(ν₁, μ₁)`: the mass above one and the mean jump size given a
    /// jump of at least one. `μ₁` does not depend on the scale, so a
    /// zero-scale side still reports the shape's value.
    pub fn truncated_mean(&self) -> (f64, f64) {
        let nu1 = self.scale;
        let mu1 = match self.slow_var {
            SlowVar::Constant => self.index / (self.index - 1.0),
            SlowVar::LogPower(p) => 1.0 + log_power_tail_integral(self.index, p),
        };
        (nu1, mu1)
    }

    /// `∫_eps^1 x² ν_small(dx)` where the small-jump part continues the power
    /// law below one with the slowly varying factor frozen at `L(1) = 1`.
    pub fn small_jump_second_moment(&self, eps: f64) -> f64 {
        let a = self.index;
        let c = self.scale;
        if (a - 2.0).abs() < 1e-12 {
            c * 2.0 * (1.0 / eps).ln()
        } else {
            c * a * (1.0 - eps.powf(2.0 - a)) / (2.0 - a)
        }
    }
}

/// `∫_1^∞ x^(-a) (1 + ln x)^p dx`, via `x = e^w`.
fn log_power_tail_integral(a: f64, p: f64) -> f64 {
    let rate = a - 1.0;
    let f = |w: f64| (-rate * w).exp() * (1.0 + w).powf(p);
    // Cut the range where the integrand is below 1e-17 of its peak scale.
    let mut upper = 1.0;
    while f(upper) > 1e-17 {
        upper *= 2.0;
    }
    adaptive_simpson(f, 0.0, upper, 1e-13, 5_000_000).expect("smooth integrand converges")
}

/// Small-jump handling for the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallJump {
    None,
    /// Replace jumps of size in `[eps, 1]` by a matched Gaussian.
    GaussianApprox(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyModel {
    pub pos: TailModel,
    pub neg: Option<TailModel>,
    pub drift: f64,
    pub sigma: f64,
    pub small_jump: SmallJump,
}

impl LevyModel {
    pub fn new(
        pos: TailModel,
        neg: Option<TailModel>,
        drift: f64,
        sigma: f64,
        small_jump: SmallJump,
    ) -> Result<Self> {
        if !drift.is_finite() {
            return Err(domain("drift must be finite"));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(domain(format!("sigma must be >= 0, got {sigma}")));
        }
        if let SmallJump::GaussianApprox(eps) = small_jump {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(domain(format!("small-jump eps must lie in (0, 1], got {eps}")));
            }
        }
        Ok(LevyModel { pos, neg, drift, sigma, small_jump })
    }

    /// Spectrally positive pure-jump model with no drift.
    pub fn one_sided(pos: TailModel) -> Self {
        LevyModel { pos, neg: None, drift: 0.0, sigma: 0.0, small_jump: SmallJump::None }
    }

    /// Two-sided pure-jump model with no drift.
    pub fn two_sided(pos: TailModel, neg: TailModel) -> Self {
        LevyModel { pos, neg: Some(neg), drift: 0.0, sigma: 0.0, small_jump: SmallJump::None }
    }

    pub fn side(&self, side: Side) -> Option<&TailModel> {
        match side {
            Side::Pos => Some(&self.pos),
            Side::Neg => self.neg.as_ref(),
        }
    }

    /// `ν[x, ∞)` for `Pos`, `ν(-∞, -x]` for `Neg`; zero for an absent side.
    pub fn tail(&self, side: Side, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain(format!("tail argument must be > 0, got {x}")));
        }
        Ok(self.side(side).map_or(0.0, |t| t.tail_unchecked(x)))
    }

    pub fn inverse_tail(&self, side: Side, n: u64, y: f64) -> Result<f64> {
        match self.side(side) {
            Some(t) => t.inverse_tail(n, y),
            None => {
                if n == 0 || !(y > 0.0) {
                    return Err(domain("inverse_tail needs n >= 1 and y > 0"));
                }
                Ok(0.0)
            }
        }
    }

    pub fn truncated_mean(&self, side: Side) -> Result<(f64, f64)> {
        self.side(side)
            .map(TailModel::truncated_mean)
            .ok_or_else(|| precondition(format!("model has no {side:?} side")))
    }

    /// Drift removed from the large-jump part so that it has mean zero:
    /// `μ₁⁺ν₁⁺ − μ₁⁻ν₁⁻`.
    pub fn compensator(&self) -> f64 {
        let (nu_p, mu_p) = self.pos.truncated_mean();
        let neg = self.neg.map_or(0.0, |t| {
            let (nu, mu) = t.truncated_mean();
            nu * mu
        });
        nu_p * mu_p - neg
    }

    /// Per-unit-time variance of the scaled Gaussian part at scale `n`.
    pub fn gaussian_variance_rate(&self, n: u64) -> f64 {
        let small = match self.small_jump {
            SmallJump::None => 0.0,
            SmallJump::GaussianApprox(eps) => {
                self.pos.small_jump_second_moment(eps)
                    + self.neg.map_or(0.0, |t| t.small_jump_second_moment(eps))
            }
        };
        (self.sigma * self.sigma + small) / n as f64
    }
}

/// `I(j, k) = (α − 1) j + (β − 1) k`.
pub fn rate_cost(alpha: f64, beta: f64, j: u32, k: u32) -> f64 {
    debug_assert!(alpha > 1.0 && beta > 1.0);
    (alpha - 1.0) * j as f64 + (beta - 1.0) * k as f64
}
