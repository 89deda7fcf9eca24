//! Optimal jump counts for corridor sets `A = { ξ : l ≤ ξ ≤ u }`.
//!
//! [`optimal_jump_path`] builds the step path that stays inside the corridor
//! with the fewest upward and fewest downward jumps: it holds a level for as
//! long as the running intersection of the corridor slices stays nonempty,
//! and jumps exactly when it empties. [`brute_force_min_jumps`] is an
//! exhaustive search over gridded step paths used to cross-check it.

use serde::Serialize;

use crate::cadlag::{Jump, StepPath, TargetSet};
use crate::error::{domain, Error, Result};
use crate::levy_model::rate_cost;

const MAX_BREAKPOINTS: usize = 100_000;

/// Piecewise-linear lower and upper bounds on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corridor {
    knots: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Corridor {
    /// Knots must run strictly increasing from 0 to 1 with `l < u` at every
    /// knot, which by linearity gives `l < u` everywhere.
    pub fn new(knots: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidCorridor(m));
        if knots.len() < 2 || knots.len() != lower.len() || knots.len() != upper.len() {
            return bad(format!(
                "need >= 2 knots with matching bounds (got {}, {}, {})",
                knots.len(),
                lower.len(),
                upper.len()
            ));
        }
        if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
            return bad("knots must start at 0 and end at 1".into());
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("knots must be strictly increasing".into());
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if let Some(i) = (0..knots.len()).find(|&i| !(lower[i] < upper[i])) {
            return bad(format!("l < u fails at knot t = {}", knots[i]));
        }
        Ok(Corridor { knots, lower, upper })
    }

    /// Constant band `[lo, hi]`.
    pub fn flat(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![lo, lo], vec![hi, hi])
    }

    /// Reads `knot,l,u` rows; a header line is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let (mut k, mut l, mut u) = (Vec::new(), Vec::new(), Vec::new());
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::InvalidCorridor(format!("line {}: expected knot,l,u", n + 1)));
            }
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) => {
                    k.push(v[0]);
                    l.push(v[1]);
                    u.push(v[2]);
                }
                Err(_) if n == 0 => continue,
                Err(e) => return Err(Error::InvalidCorridor(format!("line {}: {e}", n + 1))),
            }
        }
        Self::new(k, l, u)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn lower_values(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_values(&self) -> &[f64] {
        &self.upper
    }

    fn segment_of(&self, t: f64) -> usize {
        // index i with knots[i] <= t <= knots[i + 1]
        let i = self.knots.partition_point(|&k| k <= t);
        i.saturating_sub(1).min(self.knots.len() - 2)
    }

    fn interp(&self, vals: &[f64], t: f64) -> f64 {
        let i = self.segment_of(t);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        vals[i] + w * (vals[i + 1] - vals[i])
    }

    pub fn lower(&self, t: f64) -> f64 {
        self.interp(&self.lower, t)
    }

    pub fn upper(&self, t: f64) -> f64 {
        self.interp(&self.upper, t)
    }

    /// `(max l, min u)` over `[s, t]`, exact from endpoints and interior knots.
    pub fn extrema(&self, s: f64, t: f64) -> (f64, f64) {
        let mut max_l = self.lower(s).max(self.lower(t));
        let mut min_u = self.upper(s).min(self.upper(t));
        for (i, &k) in self.knots.iter().enumerate() {
            if k > s && k < t {
                max_l = max_l.max(self.lower[i]);
                min_u = min_u.min(self.upper[i]);
            }
        }
        (max_l, min_u)
    }

    /// Earliest `t >= s` after which `max_{[s,t]} l > hold_hi` or
    /// `min_{[s,t]} u < hold_lo`, i.e. the infimum of times at which a level
    /// confined to `[hold_lo, hold_hi]` can no longer stay inside; 1 if none.
    fn first_exit(&self, s: f64, mut hold_lo: f64, mut hold_hi: f64, track: bool) -> f64 {
        let mut a = s;
        let mut i = self.segment_of(s);
        loop {
            let b = self.knots[i + 1];
            let (la, lb) = (self.lower(a), self.lower[i + 1]);
            let (ua, ub) = (self.upper(a), self.upper[i + 1]);
            let mut hit = f64::INFINITY;
            if lb > hold_hi + EXIT_TOL {
                hit = hit.min(crossing(a, b, la, lb, hold_hi));
            }
            if ub < hold_lo - EXIT_TOL {
                hit = hit.min(crossing(a, b, ua, ub, hold_lo));
            }
            if hit.is_finite() {
                return hit.min(1.0);
            }
            if track {
                // the admissible band shrinks to the running intersection
                hold_lo = hold_lo.max(lb);
                hold_hi = hold_hi.min(ub);
            }
            if i + 2 >= self.knots.len() {
                return 1.0;
            }
            i += 1;
            a = b;
        }
    }
}

/// Slack on exit comparisons, so that touching the band boundary through
/// rounding does not count as leaving it.
const EXIT_TOL: f64 = 1e-12;

/// First point in `[a, b]` where the linear function `fa → fb` passes the
/// level `c`, given that it ends strictly past `c`.
fn crossing(a: f64, b: f64, fa: f64, fb: f64, c: f64) -> f64 {
    let already = if fb > c { fa > c } else { fa < c };
    if already || fa == c {
        return a;
    }
    let w = (c - fa) / (fb - fa);
    (a + w * (b - a)).clamp(a, b)
}

/// `[max_{[s,t]} l, min_{[s,t]} u]` when nonempty.
pub fn feasible_interval(c: &Corridor, s: f64, t: f64) -> Result<Option<(f64, f64)>> {
    if !(0.0 <= s && s <= t && t <= 1.0) {
        return Err(domain(format!("need 0 <= s <= t <= 1, got s = {s}, t = {t}")));
    }
    let (lo, hi) = c.extrema(s, t);
    Ok((lo <= hi).then_some((lo, hi)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalPathResult {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
    pub path: StepPath,
    /// `(J, K)`: upward and downward jumps of the optimal path.
    pub counts: (u32, u32),
}

impl OptimalPathResult {
    /// JSON record `{breakpoints, levels, J, K}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "breakpoints": self.breakpoints,
            "levels": self.levels,
            "J": self.counts.0,
            "K": self.counts.1,
        })
    }
}

/// Step path in the corridor with componentwise-minimal jump counts.
pub fn optimal_jump_path(c: &Corridor) -> Result<OptimalPathResult> {
    if !(c.lower(0.0) < 0.0 && 0.0 < c.upper(0.0)) {
        return Err(Error::InvalidCorridor("need l(0) < 0 < u(0)".into()));
    }
    let mut breakpoints = Vec::new();
    let mut t = c.first_exit(0.0, 0.0, 0.0, false);
    while t < 1.0 {
        if breakpoints.len() >= MAX_BREAKPOINTS {
            return Err(Error::Budget("corridor produced too many breakpoints".into()));
        }
        breakpoints.push(t);
        t = c.first_exit(t, c.lower(t), c.upper(t), true);
        if let Some(&prev) = breakpoints.last() {
            if t <= prev {
                return Err(Error::InvalidCorridor(format!("breakpoints stalled at t = {prev}")));
            }
        }
    }

    let mut levels = Vec::with_capacity(breakpoints.len());
    for (n, &start) in breakpoints.iter().enumerate() {
        let level = match breakpoints.get(n + 1) {
            Some(&end) => c.extrema(start, end).0,
            None => {
                let (lo, hi) = c.extrema(start, 1.0);
                0.5 * (lo + hi)
            }
        };
        levels.push(level);
    }

    let mut jumps = Vec::with_capacity(levels.len());
    let mut prev = 0.0;
    for (&time, &level) in breakpoints.iter().zip(&levels) {
        let size = level - prev;
        if size == 0.0 {
            return Err(Error::InvalidCorridor(format!("degenerate zero jump at t = {time}")));
        }
        jumps.push(Jump::new(time, size));
        prev = level;
    }
    let path = StepPath::new(jumps)?;
    let counts = path.jump_counts();
    Ok(OptimalPathResult { breakpoints, levels, path, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult {
    /// The `I`-minimal pair, smaller `j` first on ties.
    pub best: (u32, u32),
    pub cost: f64,
    /// Every pair attaining the minimal cost.
    pub minimizers: Vec<(u32, u32)>,
    /// Every pair with a member of `A` at this resolution.
    pub feasible: Vec<(u32, u32)>,
}

/// Largest number of candidate paths the enumeration fallback will visit.
pub const BRUTE_FORCE_BUDGET: f64 = 2e7;

/// Exhaustive search over step paths with jump times on `time_grid` and
/// levels on `level_grid`, with at most `max_j` upward and `max_k` downward
/// jumps. Absence means "nothing found at this resolution".
pub fn brute_force_min_jumps(
    set: &TargetSet,
    max_j: u32,
    max_k: u32,
    level_grid: &[f64],
    time_grid: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<Option<BruteForceResult>> {
    let mut times: Vec<f64> = time_grid.iter().copied().filter(|&t| t > 0.0 && t <= 1.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut levels: Vec<f64> = level_grid.iter().copied().filter(|v| v.is_finite()).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let feasible = if set.is_pointwise() {
        lattice_search(set, max_j, max_k, &levels, &times)
    } else {
        enumerate_paths(set, max_j, max_k, &levels, &times)?
    };
    if feasible.is_empty() {
        return Ok(None);
    }
    let cost = |&(j, k): &(u32, u32)| rate_cost(alpha, beta, j, k);
    let best_cost = feasible.iter().map(cost).fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * best_cost.abs().max(1.0);
    let minimizers: Vec<(u32, u32)> = feasible.iter().copied().filter(|p| cost(p) <= best_cost + tol).collect();
    let best = *minimizers.iter().min_by_key(|p| p.0).unwrap();
    Ok(Some(BruteForceResult { best, cost: best_cost, minimizers, feasible }))
}

/// Exhaustive dynamic program over (time, level, jump counts) for sets that
/// constrain a path one constant piece at a time. It visits every gridded
/// path implicitly, so it is equivalent to enumeration.
fn lattice_search(set: &TargetSet, max_j: u32, max_k: u32, levels: &[f64], times: &[f64]) -> Vec<(u32, u32)> {
    let nl = levels.len() + 1; // last slot is the initial zero level
    let value = |l: usize| if l == levels.len() { 0.0 } else { levels[l] };
    let (cj, ck) = (max_j as usize + 1, max_k as usize + 1);
    let idx = |j: usize, k: usize, l: usize| (j * ck + k) * nl + l;
    let mut alive = vec![false; cj * ck * nl];
    alive[idx(0, 0, levels.len())] = true;

    let mut start = 0.0;
    for step in 0..=times.len() {
        let (end, closed) = match times.get(step) {
            Some(&t) => (t, false),
            None => (1.0, true),
        };
        for l in 0..nl {
            let ok = set.on_interval(start, end, closed, value(l)).unwrap_or(false);
            if !ok {
                for j in 0..cj {
                    for k in 0..ck {
                        alive[idx(j, k, l)] = false;
                    }
                }
            }
        }
        if step == times.len() {
            break;
        }
        // optional jump at `end`
        let mut next = alive.clone();
        for j in 0..cj {
            for k in 0..ck {
                let mut lowest = f64::INFINITY;
                let mut highest = f64::NEG_INFINITY;
                for l in 0..nl {
                    if alive[idx(j, k, l)] {
                        lowest = lowest.min(value(l));
                        highest = highest.max(value(l));
                    }
                }
                if lowest > highest {
                    continue;
                }
                for (l, &v) in levels.iter().enumerate() {
                    if j + 1 < cj && v > lowest {
                        next[idx(j + 1, k, l)] = true;
                    }
                    if k + 1 < ck && v < highest {
                        next[idx(j, k + 1, l)] = true;
                    }
                }
            }
        }
        alive = next;
        start = end;
    }

    let mut out = Vec::new();
    for j in 0..cj {
        for k in 0..ck {
            if (0..nl).any(|l| alive[idx(j, k, l)]) {
                out.push((j as u32, k as u32));
            }
        }
    }
    out
}

fn enumerate_paths(set: &TargetSet, max_j: u32, max_k: u32, levels: &[f64], times: &[f64]) -> Result<Vec<(u32, u32)>> {
    let max_jumps = (max_j + max_k) as usize;
    let mut total = 0.0;
    let mut choose = 1.0;
    for n in 0..=max_jumps.min(times.len()) {
        if n > 0 {
            choose *= (times.len() + 1 - n) as f64 / n as f64;
        }
        total += choose * (levels.len() as f64).powi(n as i32);
    }
    if total > BRUTE_FORCE_BUDGET {
        return Err(Error::Budget(format!("{total:.3e} candidate paths exceed the budget")));
    }
    let mut found = std::collections::BTreeSet::new();
    let mut time_idx = Vec::new();
    let mut level_idx = Vec::new();
    for n in 0..=max_jumps.min(times.len()) {
        recurse_times(set, n, 0, &mut time_idx, &mut level_idx, levels, times, max_j, max_k, &mut found);
    }
    Ok(found.into_iter().collect())
}

#[allow(clippy::too_many_arguments)]
fn recurse_times(
    set: &TargetSet,
    n: usize,
    from: usize,
    time_idx: &mut Vec<usize>,
    level_idx: &mut Vec<usize>,
    levels: &[f64],
    times: &[f64],
    max_j: u32,
    max_k: u32,
    found: &mut std::collections::BTreeSet<(u32, u32)>,
) {
    if time_idx.len() == n {
        recurse_levels(set, time_idx, level_idx, levels, times, max_j, max_k, found);
        return;
    }
    for t in from..times.len() {
        time_idx.push(t);
        recurse_times(set, n, t + 1, time_idx, level_idx, levels, times, max_j, max_k, found);
        time_idx.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse_levels(
    set: &TargetSet,
    time_idx: &[usize],
    level_idx: &mut Vec<usize>,
    levels: &[f64],
    times: &[f64],
    max_j: u32,
    max_k: u32,
    found: &mut std::collections::BTreeSet<(u32, u32)>,
) {
    if level_idx.len() == time_idx.len() {
        let mut prev = 0.0;
        let mut jumps = Vec::with_capacity(level_idx.len());
        for (&ti, &li) in time_idx.iter().zip(level_idx.iter()) {
            jumps.push(Jump::new(times[ti], levels[li] - prev));
            prev = levels[li];
        }
        if let Ok(path) = StepPath::new(jumps) {
            let (j, k) = path.jump_counts();
            if j <= max_j && k <= max_k && set.contains_step(&path) {
                found.insert((j, k));
            }
        }
        return;
    }
    for l in 0..levels.len() {
        level_idx.push(l);
        recurse_levels(set, time_idx, level_idx, levels, times, max_j, max_k, found);
        level_idx.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlag::{AbsAboveRamp, PathSet, TargetSet};

    pub(crate) fn ramp_up() -> Corridor {
        Corridor::new(vec![0.0, 0.4, 0.5, 1.0], vec![-0.1, -0.1, 1.0, 1.0], vec![2.0; 4]).unwrap()
    }

    pub(crate) fn up_then_down() -> Corridor {
        Corridor::new(
            vec![0.0, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            vec![-0.1, -0.1, 1.0, 1.0, -0.1, -0.1, -0.1, -0.1],
            vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 0.0, 0.0],
        )
        .unwrap()
    }

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn level_grid() -> Vec<f64> {
        (0..41).map(|i| (i as f64 - 20.0) / 10.0).collect()
    }

    #[test]
    fn feasible_interval_examples() {
        let flat = Corridor::flat(-1.0, 1.0).unwrap();
        assert_eq!(feasible_interval(&flat, 0.2, 0.7).unwrap(), Some((-1.0, 1.0)));
        assert_eq!(feasible_interval(&ramp_up(), 0.0, 0.5).unwrap(), Some((1.0, 2.0)));
        let crossing = Corridor::new(vec![0.0, 0.5, 1.0], vec![-1.0, 1.0, -1.0], vec![1.0, 2.0, 0.5]).unwrap();
        assert_eq!(feasible_interval(&crossing, 0.0, 1.0).unwrap(), None);
        assert!(feasible_interval(&flat, 0.7, 0.2).is_err());
    }

    #[test]
    fn corridor_validation() {
        assert!(Corridor::new(vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 1.0]).is_err());
        assert!(Corridor::new(vec![0.0, 0.5], vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Corridor::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4], vec![1.0; 4]).is_err());
        let no_zero = Corridor::flat(0.5, 1.0).unwrap();
        assert!(optimal_jump_path(&no_zero).is_err());
    }

    #[test]
    fn corridor_csv() {
        let c = Corridor::from_csv("knot,l,u\n0,-1,1\n0.5,-0.5,1\n1,-1,2\n").unwrap();
        assert_eq!(c.knots(), &[0.0, 0.5, 1.0]);
        assert_eq!(c.upper(1.0), 2.0);
        assert!(Corridor::from_csv("0,-1\n").is_err());
    }

    #[test]
    fn flat_corridor_needs_no_jump() {
        let r = optimal_jump_path(&Corridor::flat(-1.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.counts, (0, 0));
        assert!(r.path.is_empty());
        assert!(r.breakpoints.is_empty());
    }

    #[test]
    fn ramp_needs_one_up_jump() {
        let r = optimal_jump_path(&ramp_up()).unwrap();
        assert_eq!(r.counts, (1, 0));
        let h1 = r.levels[0];
        assert!((1.0..=2.0).contains(&h1), "{h1}");
        // l crosses zero at 0.4 + 0.1 / 11
        assert!((r.breakpoints[0] - (0.4 + 0.1 / 11.0)).abs() < 1e-12);
    }

    #[test]
    fn up_then_down_corridor() {
        let c = up_then_down();
        let r = optimal_jump_path(&c).unwrap();
        assert_eq!(r.counts, (1, 1));
        assert!((r.breakpoints[1] - 0.85).abs() < 1e-12);
        assert!((r.levels[0] - 1.0).abs() < 1e-12);
        assert!((r.levels[1] + 0.05).abs() < 1e-12);
        for i in 0..=10_000 {
            let t = i as f64 / 10_000.0;
            let v = r.path.value_at(t);
            assert!(c.lower(t) <= v + 1e-12 && v <= c.upper(t) + 1e-12, "t = {t}");
        }
    }

    #[test]
    fn brute_force_on_examples() {
        let times = grid(101, 0.0, 1.0);
        let levels = level_grid();
        let all = TargetSet::all();
        let r = brute_force_min_jumps(&all, 2, 2, &levels, &times, 2.0, 2.0).unwrap().unwrap();
        assert_eq!(r.best, (0, 0));

        let set = TargetSet::corridor(up_then_down(), false);
        let r = brute_force_min_jumps(&set, 3, 3, &levels, &times, 2.0, 3.0).unwrap().unwrap();
        assert_eq!(r.best, (1, 1));

        let set = TargetSet::corridor(ramp_up(), false);
        let r = brute_force_min_jumps(&set, 3, 3, &levels, &times, 2.0, 3.0).unwrap().unwrap();
        assert_eq!(r.best, (1, 0));
    }

    #[test]
    fn brute_force_reports_both_optima_for_abs_ramp() {
        let set = TargetSet::new(AbsAboveRamp::default());
        let r = brute_force_min_jumps(&set, 2, 2, &level_grid(), &grid(101, 0.0, 1.0), 2.0, 2.0)
            .unwrap()
            .unwrap();
        assert_eq!(r.cost, 1.0);
        assert_eq!(r.minimizers, vec![(0, 1), (1, 0)]);
        assert_eq!(r.best, (0, 1));
    }

    #[derive(Debug)]
    struct TerminalGap;

    impl PathSet for TerminalGap {
        fn name(&self) -> String {
            "terminal_gap".into()
        }
        fn contains_step(&self, p: &StepPath) -> bool {
            p.value_at(1.0).abs() >= 0.5
        }
        fn contains_grid(&self, g: &crate::cadlag::GridPath, _: Option<&[Jump]>) -> bool {
            g.terminal().abs() >= 0.5
        }
    }

    #[test]
    fn enumeration_fallback_agrees_with_lattice() {
        // TerminalGap has no pointwise decomposition, so the enumeration path runs.
        let set = TargetSet::new(TerminalGap);
        let levels = level_grid();
        let times = grid(11, 0.0, 1.0);
        let r = brute_force_min_jumps(&set, 1, 1, &levels, &times, 3.0, 2.0).unwrap().unwrap();
        assert_eq!(r.best, (0, 1));
        assert_eq!(r.minimizers, vec![(0, 1)]);
        let too_big = brute_force_min_jumps(&set, 4, 4, &levels, &grid(101, 0.0, 1.0), 2.0, 2.0);
        assert!(matches!(too_big, Err(Error::Budget(_))));
    }
}
