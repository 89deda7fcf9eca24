#![allow(dead_code)]

use heavytail_ldp::cadlag::{Jump, StepPath};
use heavytail_ldp::jump_opt::Corridor;
use rand::seq::SliceRandom;
use rand::Rng;

pub const ORACLE_GRID: usize = 200;

/// Step path with at most `max_jumps` jumps, times in {0.1, …, 0.9} and sizes
/// in {±0.5, ±1, ±2}.
pub fn random_step_path<R: Rng>(rng: &mut R, max_jumps: usize) -> StepPath {
    let count = rng.random_range(0..=max_jumps);
    let mut times: Vec<u32> = (1..=9).collect();
    times.shuffle(rng);
    let sizes = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let jumps = times[..count]
        .iter()
        .map(|&t| Jump::new(t as f64 / 10.0, sizes[rng.random_range(0..sizes.len())]))
        .collect();
    StepPath::from_unsorted(jumps).unwrap()
}

fn value(jumps: &[(f64, f64)], t: f64) -> f64 {
    jumps.iter().filter(|j| j.0 <= t).map(|j| j.1).sum()
}

/// `sup_{t ∈ [a, b)} |c − y(t)|` (or on `[a, 1]` when `b` is `None`).
fn sup_gap(y: &[(f64, f64)], c: f64, a: f64, b: Option<f64>) -> f64 {
    let mut worst = (c - value(y, a)).abs();
    for &(t, _) in y {
        let inside = t > a && b.is_none_or(|b| t < b);
        if inside {
            worst = worst.max((c - value(y, t)).abs());
        }
    }
    worst
}

/// Skorokhod J1 distance by exhaustive search over piecewise-linear time
/// changes whose knots sit on the grid `i / ORACLE_GRID`: the jump of `x` at
/// `u_i` is moved to a grid time `s_i`, and the cost is
/// `max(max |u_i − s_i|, ‖x∘λ − y‖)`. Partial costs prune the search.
pub fn j1_oracle(x: &StepPath, y: &StepPath) -> f64 {
    let xj: Vec<(f64, f64)> = x.jumps().iter().map(|j| (j.time, j.size)).collect();
    let yj: Vec<(f64, f64)> = y.jumps().iter().map(|j| (j.time, j.size)).collect();
    let mut best = f64::INFINITY;
    search(&xj, &yj, 0, 0, 0.0, 0.0, 0.0, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn search(xj: &[(f64, f64)], yj: &[(f64, f64)], i: usize, prev: usize, prev_t: f64, level: f64, cost: f64, best: &mut f64) {
    if cost >= *best {
        return;
    }
    if i == xj.len() {
        let total = cost.max(sup_gap(yj, level, prev_t, None));
        *best = best.min(total);
        return;
    }
    let (u, size) = xj[i];
    let range: Vec<usize> = if u == 1.0 {
        vec![ORACLE_GRID]
    } else {
        (prev + 1..ORACLE_GRID).collect()
    };
    for k in range {
        let s = k as f64 / ORACLE_GRID as f64;
        let c = cost.max((u - s).abs()).max(sup_gap(yj, level, prev_t, Some(s)));
        search(xj, yj, i + 1, k, s, level + size, c, best);
    }
}

/// Random corridor with at most 6 knots, values in `[−2, 2]`, width at least
/// `min_width` tenths and `l(0) < 0 < u(0)`. Knots lie on the 0.01 grid and
/// each piece of `l` and `u` has slope 0 or ±10, so both take multiples of 0.1
/// at grid times and reach such values only at grid times. Every breakpoint
/// and level of the optimal path then lies on the lattice of
/// [`level_grid`] × [`time_grid`].
pub fn random_corridor<R: Rng>(rng: &mut R, min_width: i32) -> Corridor {
    let inner = rng.random_range(0..=4usize);
    let mut ts: Vec<i32> = (1..100).collect();
    ts.shuffle(rng);
    let mut knots: Vec<i32> = ts[..inner].to_vec();
    knots.push(0);
    knots.push(100);
    knots.sort();
    let mut l = rng.random_range((1 - min_width).max(-20)..=-1);
    let mut u = rng.random_range(1.max(l + min_width)..=l + min_width + 3);
    let mut lower = vec![l];
    let mut upper = vec![u];
    for w in knots.windows(2) {
        let len = w[1] - w[0];
        let (nl, nu) = (0..20)
            .map(|_| {
                let sl = rng.random_range(-1..=1);
                // parallel shifts force jumps more often than independent walls
                let su = if rng.random_bool(0.6) { sl } else { rng.random_range(-1..=1) };
                (l + sl * len, u + su * len)
            })
            .find(|&(nl, nu)| nl >= -20 && nu <= 20 && nu - nl >= min_width)
            .unwrap_or((l, u));
        l = nl;
        u = nu;
        lower.push(l);
        upper.push(u);
    }
    let tenths = |v: Vec<i32>| v.into_iter().map(|x| x as f64 / 10.0).collect();
    let knots = knots.iter().map(|&k| k as f64 / 100.0).collect();
    Corridor::new(knots, tenths(lower), tenths(upper)).unwrap()
}

/// `(i − 20) / 10` for `i = 0..=40`.
pub fn level_grid() -> Vec<f64> {
    (0..=40).map(|i| (i as f64 - 20.0) / 10.0).collect()
}

/// `i / 100` for `i = 0..=100`.
pub fn time_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}
