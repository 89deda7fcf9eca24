//! Samplers for the scaled Lévy process `X̄_n(t) = X(nt)/n`, scaled random
//! walks, the Poisson-subordinated walk, and the Ornstein-Uhlenbeck map.
//!
//! Large jumps come from the inverse-tail representation: with `Γ_l` the
//! arrival times of a unit-rate Poisson process, the scaled jumps are
//! `Q_n^⇐(Γ_l)/n` at independent uniform times, for as long as
//! `Q_n^⇐(Γ_l) ≥ 1`. Jumps are added to the grid cell that covers them, so
//! grid values equal the path at grid times.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::cadlag::{GridPath, Jump, StepPath};
use crate::error::{domain, precondition, Result};
use crate::levy_model::{LevyModel, Side, TailModel};

/// Default grid resolution for an `n`-scaled path.
pub fn default_grid(n: u64) -> usize {
    (n as usize).max(1000)
}

fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Calls `emit(size)` for each scaled jump of one side, largest first.
#[inline]
fn for_each_large_jump<R: Rng + ?Sized>(tail: &TailModel, n: f64, rng: &mut R, mut emit: impl FnMut(f64, &mut R)) {
    if tail.scale() == 0.0 {
        return;
    }
    let mut gamma = 0.0;
    loop {
        let e: f64 = rng.sample(Exp1);
        gamma += e;
        let q = tail.inverse_tail_unchecked(n, gamma);
        if q < 1.0 {
            return;
        }
        emit(q / n, rng);
    }
}

/// Scaled large jumps of one side, signed (negative for `Side::Neg`) and
/// sorted by time.
pub fn sample_large_jumps<R: Rng + ?Sized>(model: &LevyModel, side: Side, n: u64, rng: &mut R) -> Result<StepPath> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    let tail = model.side(side).ok_or_else(|| precondition(format!("model has no {side:?} side")))?;
    let sign = if side == Side::Pos { 1.0 } else { -1.0 };
    let mut jumps = Vec::new();
    for_each_large_jump(tail, n as f64, rng, |size, rng| {
        jumps.push(Jump::new(uniform_open(rng), sign * size));
    });
    StepPath::from_unsorted(jumps)
}

/// Reusable sampler for `X̄_n` on a fixed grid.
#[derive(Debug, Clone)]
pub struct LevySampler {
    model: LevyModel,
    n: f64,
    m: usize,
    slope: f64,
    step_sd: f64,
    terminal_sd: f64,
    grid: GridPath,
    jumps: Vec<Jump>,
}

impl LevySampler {
    pub fn new(model: &LevyModel, n: u64, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(domain(format!("need n >= 1 and m >= 1, got n = {n}, m = {m}")));
        }
        let var = model.gaussian_variance_rate(n);
        Ok(LevySampler {
            model: model.clone(),
            n: n as f64,
            m,
            slope: model.drift - model.compensator(),
            step_sd: (var / m as f64).sqrt(),
            terminal_sd: var.sqrt(),
            grid: GridPath::zeros(m),
            jumps: Vec::new(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Jumps of the last path drawn by [`sample`](Self::sample), in
    /// generation order.
    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Grid and jumps of the last path drawn.
    pub fn last(&self) -> (&GridPath, &[Jump]) {
        (&self.grid, &self.jumps)
    }

    /// Draws one path; the jump list is available from [`jumps`](Self::jumps).
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &GridPath {
        let m = self.m;
        let mf = m as f64;
        self.jumps.clear();
        let values = self.grid.values_mut();
        values.fill(0.0);
        let sides = [(Some(self.model.pos), 1.0), (self.model.neg, -1.0)];
        for (tail, sign) in sides {
            let Some(tail) = tail else { continue };
            let jumps = &mut self.jumps;
            for_each_large_jump(&tail, self.n, rng, |size, rng| {
                let u = uniform_open(rng);
                let cell = ((u * mf).ceil() as usize).clamp(1, m);
                values[cell] += sign * size;
                jumps.push(Jump::new(u, sign * size));
            });
        }
        let step = self.slope / mf;
        let mut acc = 0.0;
        for v in values.iter_mut().skip(1) {
            acc += *v + step;
            if self.step_sd > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                acc += self.step_sd * z;
            }
            *v = acc;
        }
        &self.grid
    }

    /// Draws `X̄_n(1)` alone, skipping jump times and the grid.
    pub fn sample_terminal<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let mut sum = self.slope;
        let add = |tail: &TailModel, sign: f64, rng: &mut R| {
            let mut s = 0.0;
            for_each_large_jump(tail, self.n, rng, |size, _| s += size);
            sign * s
        };
        sum += add(&self.model.pos, 1.0, rng);
        if let Some(neg) = self.model.neg {
            sum += add(&neg, -1.0, rng);
        }
        if self.terminal_sd > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            sum += self.terminal_sd * z;
        }
        sum
    }
}

/// One path of `X̄_n` on the grid `i / m_grid`.
pub fn sample_scaled_levy<R: Rng + ?Sized>(model: &LevyModel, n: u64, m_grid: usize, rng: &mut R) -> Result<GridPath> {
    let mut s = LevySampler::new(model, n, m_grid)?;
    Ok(s.sample(rng).clone())
}

/// One draw of `X̄_n(1)`.
pub fn sample_terminal<R: Rng + ?Sized>(model: &LevyModel, n: u64, rng: &mut R) -> Result<f64> {
    let mut s = LevySampler::new(model, n, 1)?;
    Ok(s.sample_terminal(rng))
}

/// Mean-zero increment law with Pareto tails: `P(S ≥ x) = c₊ x^(−α)` and
/// `P(S ≤ −x) = c₋ x^(−β)` for `x ≥ x₀`, and a uniform filler inside
/// `(−x₀, x₀)` placed so that the mean vanishes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IncrementModel {
    c_plus: f64,
    alpha: f64,
    c_minus: f64,
    beta: f64,
    x0: f64,
    p_plus: f64,
    p_minus: f64,
    center: f64,
    half_width: f64,
}

impl IncrementModel {
    pub fn new(c_plus: f64, alpha: f64, c_minus: f64, beta: f64, x0: f64) -> Result<Self> {
        if !(alpha > 1.0 && beta > 1.0) {
            return Err(domain(format!("tail indices must exceed 1, got {alpha}, {beta}")));
        }
        if !(c_plus >= 0.0 && c_minus >= 0.0 && x0 > 0.0) {
            return Err(domain("need c₊, c₋ >= 0 and x₀ > 0"));
        }
        let p_plus = c_plus * x0.powf(-alpha);
        let p_minus = c_minus * x0.powf(-beta);
        let filler = 1.0 - p_plus - p_minus;
        if !(filler > 0.0) {
            return Err(domain(format!("tail masses {p_plus} + {p_minus} leave no room below x₀ = {x0}")));
        }
        let tail_mean = p_plus * x0 * alpha / (alpha - 1.0) - p_minus * x0 * beta / (beta - 1.0);
        let center = -tail_mean / filler;
        if !(center.abs() < x0) {
            return Err(domain(format!("cannot center the increments: filler mean {center} outside (−x₀, x₀)")));
        }
        Ok(IncrementModel {
            c_plus,
            alpha,
            c_minus,
            beta,
            x0,
            p_plus,
            p_minus,
            center,
            half_width: x0 - center.abs(),
        })
    }

    pub fn symmetric(c: f64, alpha: f64, x0: f64) -> Result<Self> {
        Self::new(c, alpha, c, alpha, x0)
    }

    /// Increments identically zero.
    pub fn zero() -> Self {
        IncrementModel {
            c_plus: 0.0,
            alpha: 2.0,
            c_minus: 0.0,
            beta: 2.0,
            x0: 1.0,
            p_plus: 0.0,
            p_minus: 0.0,
            center: 0.0,
            half_width: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `P(S₁ ≥ x)` for `x ≥ x₀`.
    pub fn tail_pos(&self, x: f64) -> Result<f64> {
        if x < self.x0 {
            return Err(domain(format!("tail_pos is exact only for x >= x₀ = {}", self.x0)));
        }
        Ok(self.c_plus * x.powf(-self.alpha))
    }

    /// `P(S₁ ≤ −x)` for `x ≥ x₀`.
    pub fn tail_neg(&self, x: f64) -> Result<f64> {
        if x < self.x0 {
            return Err(domain(format!("tail_neg is exact only for x >= x₀ = {}", self.x0)));
        }
        Ok(self.c_minus * x.powf(-self.beta))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        if u < self.p_plus {
            let w = 1.0 - u / self.p_plus;
            self.x0 * w.powf(-1.0 / self.alpha)
        } else if u < self.p_plus + self.p_minus {
            let w = 1.0 - (u - self.p_plus) / self.p_minus;
            -self.x0 * w.powf(-1.0 / self.beta)
        } else if self.half_width == 0.0 {
            self.center
        } else {
            let v: f64 = rng.random();
            self.center + self.half_width * (2.0 * v - 1.0)
        }
    }
}

/// `S̄_n(t) = S_⌊nt⌋ / n` on the grid `i / n`.
pub fn sample_scaled_rw<R: Rng + ?Sized>(inc: &IncrementModel, n: u64, rng: &mut R) -> Result<GridPath> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    let mut values = Vec::with_capacity(n as usize + 1);
    values.push(0.0);
    let mut s = 0.0;
    for _ in 0..n {
        s += inc.sample(rng);
        values.push(s / n as f64);
    }
    GridPath::new(values)
}

/// `S_{N(nt)} / n` for an independent unit-rate Poisson clock `N`, on the
/// grid `i / m`.
pub fn subordinated_walk<R: Rng + ?Sized>(inc: &IncrementModel, n: u64, m: usize, rng: &mut R) -> Result<GridPath> {
    if n == 0 || m == 0 {
        return Err(domain("need n >= 1 and m >= 1"));
    }
    let mut values = vec![0.0; m + 1];
    for_each_arrival_cell(n, m, rng, |cell, rng| values[cell] += inc.sample(rng));
    let mut s = 0.0;
    for v in values.iter_mut() {
        s += *v;
        *v = s / n as f64;
    }
    GridPath::new(values)
}

/// Calls `f(cell)` for each arrival of a unit-rate Poisson process on
/// `[0, n]`, where `cell` indexes the grid point `i / m` covering the
/// arrival time divided by `n`.
fn for_each_arrival_cell<R: Rng + ?Sized>(n: u64, m: usize, rng: &mut R, mut f: impl FnMut(usize, &mut R)) {
    let horizon = n as f64;
    let mut clock = 0.0;
    loop {
        let e: f64 = rng.sample(Exp1);
        clock += e;
        if clock > horizon {
            return;
        }
        f(((clock / horizon * m as f64).ceil() as usize).clamp(1, m), rng);
    }
}

/// Lévy-driven Ornstein-Uhlenbeck image of a gridded path.
pub fn apply_ou(path: &GridPath, kappa: f64) -> Result<GridPath> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(domain(format!("kappa must be >= 0, got {kappa}")));
    }
    Ok(path.ou_transform(kappa))
}
