//! Skorokhod J1 distance between step paths.
//!
//! For a radius `r`, a time change `λ` with `‖λ − e‖ ≤ r` only moves each jump
//! of `x` to a new time `w_i` with `|w_i − u_i| ≤ r`, keeping the jump order.
//! `x∘λ` is then the step path with the same sizes at the new times, and the
//! question is whether the merged timeline of `x∘λ` and `y` can be laid out
//! so that every pair of simultaneously held levels differs by at most `r`.
//! The merged timeline is a monotone lattice walk over `(i, k)` = (jumps of
//! `x` taken, jumps of `y` taken); for each cell we keep the earliest time at
//! which the walk can be there, which dominates every later time.

use super::path::StepPath;
use crate::error::{domain, precondition, Result};

/// `d_J1(x, y)` to within `tol`, by bisection on the radius with an exact
/// feasibility test. The returned value is the feasible end of the final
/// bracket, so it never undercuts the true distance.
pub fn j1_distance(x: &StepPath, y: &StepPath, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be > 0, got {tol}")));
    }
    let mut hi = x.sup_distance(y);
    if hi == 0.0 || j1_feasible(x, y, 0.0) {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if j1_feasible(x, y, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Whether some time change `λ` achieves `‖λ − e‖ ≤ r` and `‖x∘λ − y‖ ≤ r`
/// (in the closure of the set of homeomorphisms).
pub fn j1_feasible(x: &StepPath, y: &StepPath, r: f64) -> bool {
    let xs = x.jumps();
    let ys = y.jumps();
    let vx = x.levels();
    let vy = y.levels();
    let (nx, ny) = (xs.len(), ys.len());

    // Admissible new times for each jump of x. A jump at time 1 cannot move.
    let window = |i: usize| -> (f64, f64) {
        let u = xs[i].time;
        if u >= 1.0 {
            (1.0, 1.0)
        } else {
            ((u - r).max(0.0), (u + r).min(1.0))
        }
    };
    let close = |i: usize, k: usize| (vx[i] - vy[k]).abs() <= r;

    let width = ny + 1;
    let mut earliest = vec![f64::INFINITY; (nx + 1) * width];
    earliest[0] = 0.0;
    for i in 0..=nx {
        for k in 0..=ny {
            let t = earliest[i * width + k];
            if !t.is_finite() {
                continue;
            }
            let next_y = ys.get(k).map(|j| j.time);
            if i < nx {
                let (lo, hi) = window(i);
                // x jumps next, before y's next jump.
                let w = t.max(lo);
                if w <= hi && next_y.is_none_or(|ty| w <= ty) && close(i + 1, k) {
                    let cell = &mut earliest[(i + 1) * width + k];
                    *cell = cell.min(w);
                }
                // both jump at y's next jump time.
                if let Some(ty) = next_y {
                    if ty >= t && ty >= lo && ty <= hi && close(i + 1, k + 1) {
                        let cell = &mut earliest[(i + 1) * width + k + 1];
                        *cell = cell.min(ty);
                    }
                }
            }
            if let Some(ty) = next_y {
                if ty >= t && close(i, k + 1) {
                    let cell = &mut earliest[i * width + k + 1];
                    *cell = cell.min(ty);
                }
            }
        }
    }
    earliest[nx * width + ny].is_finite()
}

/// Certified lower bound on the distance from `p` to every `D_{l,m}` with
/// `l < j` or `m < k`: half the smaller of the `j`-th largest upward jump and
/// the `k`-th largest downward jump. Infinite when `j = k = 0`.
pub fn bound_away_radius(p: &StepPath, j: usize, k: usize) -> Result<f64> {
    let up = p.up_sizes_desc();
    let down = p.down_sizes_desc();
    if up.len() < j || down.len() < k {
        return Err(precondition(format!(
            "path has ({}, {}) jumps, need at least ({j}, {k})",
            up.len(),
            down.len()
        )));
    }
    let a = if j > 0 { up[j - 1] } else { f64::INFINITY };
    let b = if k > 0 { down[k - 1] } else { f64::INFINITY };
    Ok(0.5 * a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlag::path::Jump;

    fn unit(t: f64) -> StepPath {
        StepPath::new(vec![Jump::new(t, 1.0)]).unwrap()
    }

    #[test]
    fn identity_distance_is_zero() {
        let x = StepPath::new(vec![Jump::new(0.2, 1.0), Jump::new(0.6, -2.0)]).unwrap();
        assert_eq!(j1_distance(&x, &x, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn shifted_unit_jump() {
        let d = j1_distance(&unit(0.3), &unit(0.4), 1e-9).unwrap();
        assert!((d - 0.1).abs() < 1e-8, "{d}");
    }

    #[test]
    fn unmatched_jump_costs_its_size() {
        let d = j1_distance(&unit(0.5), &StepPath::zero(), 1e-9).unwrap();
        assert!((d - 1.0).abs() < 1e-8, "{d}");
    }

    #[test]
    fn small_jump_is_cheaper_than_time_shift() {
        // Aligning the jumps costs 0.5 in time; leaving them apart costs 0.05.
        let x = StepPath::new(vec![Jump::new(0.1, 0.05)]).unwrap();
        let y = StepPath::new(vec![Jump::new(0.6, 0.05)]).unwrap();
        let d = j1_distance(&x, &y, 1e-9).unwrap();
        assert!((d - 0.05).abs() < 1e-8, "{d}");
    }

    #[test]
    fn jump_at_one_cannot_move() {
        let x = unit(1.0);
        let y = unit(0.9);
        // λ(1) = 1 pins the jump; the value gap over [0.9, 1) is 1.
        let d = j1_distance(&x, &y, 1e-9).unwrap();
        assert!((d - 1.0).abs() < 1e-8, "{d}");
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(j1_distance(&unit(0.5), &unit(0.5), 0.0).is_err());
    }

    #[test]
    fn bound_away_examples() {
        assert_eq!(bound_away_radius(&unit(0.5), 1, 0).unwrap(), 0.5);
        let p = StepPath::new(vec![Jump::new(0.3, 2.0), Jump::new(0.7, -0.5)]).unwrap();
        assert_eq!(bound_away_radius(&p, 1, 1).unwrap(), 0.25);
        assert_eq!(bound_away_radius(&p, 0, 0).unwrap(), f64::INFINITY);
        assert!(bound_away_radius(&p, 2, 0).is_err());
    }
}
