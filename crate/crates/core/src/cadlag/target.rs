//! Target sets `A ⊂ D[0, 1]` and the built-in catalog used by the experiments.

use std::fmt::Debug;
use std::sync::Arc;

use super::path::{GridPath, Jump, StepPath};
use crate::jump_opt::Corridor;

/// Membership predicate over paths.
pub trait PathSet: Debug + Send + Sync {
    fn name(&self) -> String;

    fn contains_step(&self, p: &StepPath) -> bool;

    /// Membership of a gridded path. `jumps` carries the exact jump list of
    /// the path when the sampler knows it.
    fn contains_grid(&self, g: &GridPath, jumps: Option<&[Jump]>) -> bool;

    /// For sets of the form `{ξ : ξ(t) ∈ S_t for all t}`: whether the constant
    /// `level` lies in `S_t` for every `t` in `[a, b)` (`[a, b]` when
    /// `right_closed`). `None` when the set is not of that form.
    fn on_interval(&self, _a: f64, _b: f64, _right_closed: bool, _level: f64) -> Option<bool> {
        None
    }

    /// True when membership depends on `ξ(1)` alone.
    fn terminal_only(&self) -> bool {
        false
    }

    /// Membership from the terminal value; only meaningful when
    /// [`terminal_only`](Self::terminal_only) holds.
    fn contains_terminal(&self, _x: f64) -> bool {
        false
    }
}

/// A [`PathSet`] plus optional certificates: `hint_delta` is a floor on the
/// jump sizes of members in the relevant `D_{j,k}`, and `hint_jk` the optimal
/// jump counts when known analytically.
#[derive(Debug, Clone)]
pub struct TargetSet {
    set: Arc<dyn PathSet>,
    pub hint_delta: Option<f64>,
    pub hint_jk: Option<(u32, u32)>,
}

impl TargetSet {
    pub fn new(set: impl PathSet + 'static) -> Self {
        TargetSet { set: Arc::new(set), hint_delta: None, hint_jk: None }
    }

    pub fn with_hint_delta(mut self, delta: f64) -> Self {
        self.hint_delta = Some(delta);
        self
    }

    pub fn with_hint_jk(mut self, j: u32, k: u32) -> Self {
        self.hint_jk = Some((j, k));
        self
    }

    pub fn all() -> Self {
        Self::new(All).with_hint_jk(0, 0)
    }

    pub fn empty() -> Self {
        Self::new(Empty)
    }

    pub fn terminal_above(level: f64, strict: bool) -> Self {
        let set = Self::new(TerminalAbove { level, strict });
        if level > 0.0 {
            set.with_hint_delta(level).with_hint_jk(1, 0)
        } else {
            set.with_hint_jk(0, 0)
        }
    }

    pub fn corridor(corridor: Corridor, interior: bool) -> Self {
        Self::new(CorridorSet { corridor, interior })
    }

    /// `{ξ : |ξ(t)| ≥ t − 1/2 for all t}`, with one-jump members of size ≥ 1/2.
    pub fn abs_above_ramp(strict: bool) -> Self {
        Self::new(AbsAboveRamp { offset: 0.5, strict }).with_hint_delta(0.5)
    }

    pub fn moderate_jumps(a: f64, b: f64, c: f64) -> Self {
        let set = ModerateJumps { a, b, c };
        let j = set.jumps_needed();
        Self::new(set).with_hint_delta(a - (j as f64 - 1.0) * b).with_hint_jk(j, 0)
    }

    pub fn ou_barrier(kappa: f64, a_plus: f64, a_minus: f64) -> Self {
        Self::new(OuBarrier { kappa, a_plus, a_minus })
            .with_hint_delta(a_plus.min(a_minus))
            .with_hint_jk(1, 1)
    }

    pub fn name(&self) -> String {
        self.set.name()
    }

    pub fn contains_step(&self, p: &StepPath) -> bool {
        self.set.contains_step(p)
    }

    pub fn contains_grid(&self, g: &GridPath, jumps: Option<&[Jump]>) -> bool {
        self.set.contains_grid(g, jumps)
    }

    pub fn on_interval(&self, a: f64, b: f64, right_closed: bool, level: f64) -> Option<bool> {
        self.set.on_interval(a, b, right_closed, level)
    }

    /// Whether the set is a pointwise constraint (see [`PathSet::on_interval`]).
    pub fn is_pointwise(&self) -> bool {
        self.set.on_interval(0.0, 1.0, true, 0.0).is_some()
    }

    pub fn terminal_only(&self) -> bool {
        self.set.terminal_only()
    }

    pub fn contains_terminal(&self, x: f64) -> bool {
        self.set.contains_terminal(x)
    }
}

fn pointwise_step(set: &dyn PathSet, p: &StepPath) -> bool {
    let segs = p.segments();
    let last = segs.len() - 1;
    segs.iter()
        .enumerate()
        .all(|(i, &(a, b, v))| (a < b || i == last) && set.on_interval(a, b, i == last, v).unwrap_or(false))
}

fn grid_time(i: usize, m: usize) -> f64 {
    i as f64 / m as f64
}

#[derive(Debug, Clone, Copy)]
pub struct All;

impl PathSet for All {
    fn name(&self) -> String {
        "all".into()
    }
    fn contains_step(&self, _: &StepPath) -> bool {
        true
    }
    fn contains_grid(&self, _: &GridPath, _: Option<&[Jump]>) -> bool {
        true
    }
    fn on_interval(&self, _: f64, _: f64, _: bool, _: f64) -> Option<bool> {
        Some(true)
    }
    fn terminal_only(&self) -> bool {
        true
    }
    fn contains_terminal(&self, _: f64) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Empty;

impl PathSet for Empty {
    fn name(&self) -> String {
        "empty".into()
    }
    fn contains_step(&self, _: &StepPath) -> bool {
        false
    }
    fn contains_grid(&self, _: &GridPath, _: Option<&[Jump]>) -> bool {
        false
    }
    fn on_interval(&self, _: f64, _: f64, _: bool, _: f64) -> Option<bool> {
        Some(false)
    }
    fn terminal_only(&self) -> bool {
        true
    }
}

/// `{ξ : ξ(1) > level}`, or `≥` when not strict.
#[derive(Debug, Clone, Copy)]
pub struct TerminalAbove {
    pub level: f64,
    pub strict: bool,
}

impl PathSet for TerminalAbove {
    fn name(&self) -> String {
        format!("terminal_{}_{}", if self.strict { "gt" } else { "ge" }, self.level)
    }
    fn contains_step(&self, p: &StepPath) -> bool {
        self.contains_terminal(p.value_at(1.0))
    }
    fn contains_grid(&self, g: &GridPath, _: Option<&[Jump]>) -> bool {
        self.contains_terminal(g.terminal())
    }
    fn on_interval(&self, _: f64, _: f64, right_closed: bool, level: f64) -> Option<bool> {
        Some(!right_closed || self.contains_terminal(level))
    }
    fn terminal_only(&self) -> bool {
        true
    }
    fn contains_terminal(&self, x: f64) -> bool {
        if self.strict {
            x > self.level
        } else {
            x >= self.level
        }
    }
}

/// Rounding slack for the closed corridor, whose boundary values come from
/// linear interpolation.
const CLOSED_TOL: f64 = 1e-12;

/// `{ξ : l ≤ ξ ≤ u}`, or `{ξ : l < ξ < u}` when `interior`.
#[derive(Debug, Clone)]
pub struct CorridorSet {
    pub corridor: Corridor,
    pub interior: bool,
}

impl CorridorSet {
    fn inside(&self, lo: f64, hi: f64, v: f64) -> bool {
        if self.interior {
            lo < v && v < hi
        } else {
            lo - CLOSED_TOL <= v && v <= hi + CLOSED_TOL
        }
    }
}

impl PathSet for CorridorSet {
    fn name(&self) -> String {
        if self.interior { "corridor_interior" } else { "corridor" }.into()
    }
    fn contains_step(&self, p: &StepPath) -> bool {
        pointwise_step(self, p)
    }
    fn contains_grid(&self, g: &GridPath, _: Option<&[Jump]>) -> bool {
        let m = g.m();
        g.values().iter().enumerate().all(|(i, &v)| {
            let t = grid_time(i, m);
            self.inside(self.corridor.lower(t), self.corridor.upper(t), v)
        })
    }
    fn on_interval(&self, a: f64, b: f64, _: bool, level: f64) -> Option<bool> {
        // l and u are continuous, so extrema over [a, b) and [a, b] coincide
        let (lo, hi) = self.corridor.extrema(a, b);
        Some(self.inside(lo, hi, level))
    }
}

/// `{ξ : |ξ(t)| ≥ t − offset for all t}` (`>` when strict).
#[derive(Debug, Clone, Copy)]
pub struct AbsAboveRamp {
    pub offset: f64,
    pub strict: bool,
}

impl Default for AbsAboveRamp {
    fn default() -> Self {
        AbsAboveRamp { offset: 0.5, strict: false }
    }
}

impl AbsAboveRamp {
    fn ok(&self, t: f64, v: f64) -> bool {
        if self.strict {
            v.abs() > t - self.offset
        } else {
            v.abs() >= t - self.offset
        }
    }
}

impl PathSet for AbsAboveRamp {
    fn name(&self) -> String {
        if self.strict { "abs_above_ramp_strict" } else { "abs_above_ramp" }.into()
    }
    fn contains_step(&self, p: &StepPath) -> bool {
        pointwise_step(self, p)
    }
    fn contains_grid(&self, g: &GridPath, _: Option<&[Jump]>) -> bool {
        let m = g.m();
        g.values().iter().enumerate().all(|(i, &v)| self.ok(grid_time(i, m), v))
    }
    fn on_interval(&self, _: f64, b: f64, right_closed: bool, level: f64) -> Option<bool> {
        // the ramp is increasing, so only the right end binds
        if right_closed || !self.strict {
            Some(self.ok(b, level))
        } else {
            Some(level.abs() >= b - self.offset)
        }
    }
}

/// `{ξ : sup_t [ξ(t) − ct] ≥ a, sup_t [ξ(t) − ξ(t−)] ≤ b}`.
#[derive(Debug, Clone, Copy)]
pub struct ModerateJumps {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ModerateJumps {
    /// `⌈a / b⌉`.
    pub fn jumps_needed(&self) -> u32 {
        (self.a / self.b).ceil() as u32
    }
}

impl PathSet for ModerateJumps {
    fn name(&self) -> String {
        format!("moderate_jumps_a{}_b{}_c{}", self.a, self.b, self.c)
    }
    fn contains_step(&self, p: &StepPath) -> bool {
        let crosses = p.segments().iter().any(|&(s, _, v)| v - self.c * s >= self.a);
        crosses && p.max_up_jump() <= self.b
    }
    fn contains_grid(&self, g: &GridPath, jumps: Option<&[Jump]>) -> bool {
        let max_jump = match jumps {
            Some(js) => js.iter().map(|j| j.size).fold(0.0, f64::max),
            None => g.max_increment(),
        };
        if max_jump > self.b {
            return false;
        }
        let m = g.m();
        g.values().iter().enumerate().any(|(i, &v)| v - self.c * grid_time(i, m) >= self.a)
    }
}

/// `{ξ : inf_t φ(ξ)(t) ≤ −a₋, φ(ξ)(1) ≥ a₊}` with `φ` the
/// Ornstein-Uhlenbeck map of rate `κ`.
#[derive(Debug, Clone, Copy)]
pub struct OuBarrier {
    pub kappa: f64,
    pub a_plus: f64,
    pub a_minus: f64,
}

impl PathSet for OuBarrier {
    fn name(&self) -> String {
        format!("ou_barrier_k{}_ap{}_am{}", self.kappa, self.a_plus, self.a_minus)
    }
    fn contains_step(&self, p: &StepPath) -> bool {
        let (inf, terminal) = p.ou_inf_and_terminal(self.kappa);
        inf <= -self.a_minus && terminal >= self.a_plus
    }
    fn contains_grid(&self, g: &GridPath, _: Option<&[Jump]>) -> bool {
        let y = g.ou_transform(self.kappa);
        y.inf() <= -self.a_minus && y.terminal() >= self.a_plus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(jumps: &[(f64, f64)]) -> StepPath {
        StepPath::new(jumps.iter().map(|&(t, s)| Jump::new(t, s)).collect()).unwrap()
    }

    #[test]
    fn abs_ramp_membership() {
        let a = TargetSet::abs_above_ramp(false);
        assert!(!a.contains_step(&StepPath::zero()));
        assert!(a.contains_step(&path(&[(0.4, 0.6)])));
        assert!(a.contains_step(&path(&[(0.5, -0.5)])));
        assert!(!a.contains_step(&path(&[(0.6, 1.0)])));
        assert!(!a.contains_step(&path(&[(0.3, 0.4)])));
        assert!(a.is_pointwise());
    }

    #[test]
    fn abs_ramp_grid_matches_step() {
        let a = TargetSet::abs_above_ramp(false);
        for p in [path(&[(0.4, 0.6)]), path(&[(0.6, 1.0)]), path(&[(0.2, 0.7), (0.9, -0.1)])] {
            assert_eq!(a.contains_step(&p), a.contains_grid(&p.to_grid(1000), None));
        }
    }

    #[test]
    fn terminal_above_is_terminal_only() {
        let g = TargetSet::terminal_above(1.0, true);
        assert!(g.terminal_only());
        assert!(!g.contains_step(&path(&[(0.5, 1.0)])));
        assert!(TargetSet::terminal_above(1.0, false).contains_step(&path(&[(0.5, 1.0)])));
        assert!(g.contains_step(&path(&[(0.5, 1.5)])));
    }

    #[test]
    fn corridor_membership() {
        let c = Corridor::new(vec![0.0, 0.5, 1.0], vec![-1.0, 0.5, 0.5], vec![1.0, 2.0, 2.0]).unwrap();
        let closed = TargetSet::corridor(c.clone(), false);
        let open = TargetSet::corridor(c, true);
        let p = path(&[(0.3, 1.0)]);
        assert!(closed.contains_step(&p));
        assert!(open.contains_step(&p));
        assert!(closed.contains_grid(&p.to_grid(100), None));
        assert!(!closed.contains_step(&StepPath::zero()));
        // touching the lower bound is in the closure only
        let touch = path(&[(0.3, 0.5)]);
        assert!(closed.contains_step(&touch));
        assert!(!open.contains_step(&touch));
    }

    #[test]
    fn moderate_jumps_membership() {
        let set = TargetSet::moderate_jumps(0.5, 0.4, 0.0);
        assert_eq!(set.hint_jk, Some((2, 0)));
        assert!((set.hint_delta.unwrap() - 0.1).abs() < 1e-12);
        assert!(set.contains_step(&path(&[(0.2, 0.3), (0.6, 0.3)])));
        assert!(!set.contains_step(&path(&[(0.2, 0.6)])));
        assert!(!set.contains_step(&path(&[(0.2, 0.3)])));
        let sloped = TargetSet::moderate_jumps(1.0, 2.0, 0.5);
        assert!(sloped.contains_step(&path(&[(0.4, 1.2)])));
        assert!(!sloped.contains_step(&path(&[(0.6, 1.2)])));
        let exact = [Jump::new(0.25, 0.45), Jump::new(0.28, 0.3)];
        let g = StepPath::new(exact.to_vec()).unwrap().to_grid(10);
        // the grid cell merges both jumps; the exact list does not
        assert!(!set.contains_grid(&g, None));
        assert!(!set.contains_grid(&g, Some(&exact)));
        let ok = [Jump::new(0.25, 0.3), Jump::new(0.28, 0.3)];
        let g = StepPath::new(ok.to_vec()).unwrap().to_grid(10);
        assert!(set.contains_grid(&g, Some(&ok)));
        assert!(!set.contains_grid(&g, None));
    }

    #[test]
    fn ou_barrier_membership() {
        let set = TargetSet::ou_barrier(0.0, 1.0, 1.0);
        assert!(set.contains_step(&path(&[(0.3, -1.5), (0.6, 3.0)])));
        assert!(!set.contains_step(&path(&[(0.3, 3.0), (0.6, -1.5)])));
        let decaying = TargetSet::ou_barrier(1.0, 1.0, 1.0);
        let p = path(&[(0.2, -1.2), (0.5, 2.5)]);
        let (inf, term) = p.ou_inf_and_terminal(1.0);
        assert_eq!(decaying.contains_step(&p), inf <= -1.0 && term >= 1.0);
        assert_eq!(decaying.contains_step(&p), decaying.contains_grid(&p.to_grid(20_000), None));
    }
}
