//! Adaptive Simpson quadrature, the only numerical integrator the crate needs.

use crate::error::{Error, Result};

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, spending at most
/// `max_evals` function evaluations.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_evals: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let mut evals = 3usize;
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let out = simpson_step(&f, a, b, fa, fm, fb, whole, tol, 50, &mut evals, max_evals);
    if evals > max_evals {
        return Err(Error::Quadrature { evaluations: evals });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
    max_evals: usize,
) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || *evals > max_evals || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, max_evals)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, max_evals)
}
