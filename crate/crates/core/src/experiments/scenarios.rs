//! Scenario runners. Each returns a [`Report`] and never touches the disk.

use std::path::Path;

use serde_json::json;

use super::config::{Scenario, ScenarioConfig};
use super::mc::{dump_paths, mc_probabilities, sample_functionals, Source};
use super::report::{Check, LimitConstant, Report, Row};
use super::stats::{bootstrap_slope_ci, ks_two_sample, ols};
use crate::cadlag::TargetSet;
use crate::error::{config, Result};
use crate::estimate::Estimate;
use crate::jump_opt::{brute_force_min_jumps, optimal_jump_path, Corridor};
use crate::levy_model::{LevyModel, Side};
use crate::limit_measures::{c1_corridor_closed_form, c11_ou_quadrature, estimate_c, LimitParams};
use crate::rng::RngStream;

const LIMIT_TASK: u32 = 1000;
const BOOTSTRAP_TASK: u32 = 2000;
const DUMP_TASK: u32 = 3000;
const SUBORDINATED_OFFSET: u32 = 500;
const BOOTSTRAP_REPS: usize = 2000;
const QUAD_TOL: f64 = 1e-9;
const LATTICE_STEP: f64 = 0.05;
const LATTICE_TIMES: usize = 100;
const DEFAULT_CONSTANT_SIGMAS: f64 = 3.0;

fn base(cfg: &ScenarioConfig) -> RngStream {
    RngStream::new(cfg.seed, 0)
}

fn mc_stream(cfg: &ScenarioConfig, i: usize) -> RngStream {
    base(cfg).child(i as u32 + 1, 0)
}

fn n_tail(model: &LevyModel, side: Side, n: u64) -> Result<f64> {
    Ok(n as f64 * model.tail(side, n as f64)?)
}

/// `(n·tail₊(n))^j (n·tail₋(n))^k`, recomputed from the model.
fn levy_normalizer(model: &LevyModel, n: u64, j: u32, k: u32) -> Result<f64> {
    let mut v = n_tail(model, Side::Pos, n)?.powi(j as i32);
    if k > 0 {
        v *= n_tail(model, Side::Neg, n)?.powi(k as i32);
    }
    Ok(v)
}

/// Multiples of `step` covering `[lo, hi]` with one step of margin.
fn lattice_levels(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let a = (lo / step).floor() as i64 - 1;
    let b = (hi / step).ceil() as i64 + 1;
    (a..=b).map(|i| i as f64 * step).collect()
}

fn lattice_times() -> Vec<f64> {
    (0..=LATTICE_TIMES).map(|i| i as f64 / LATTICE_TIMES as f64).collect()
}

fn corridor_levels(c: &Corridor) -> Vec<f64> {
    let lo = c.lower_values().iter().copied().fold(0.0, f64::min);
    let hi = c.upper_values().iter().copied().fold(0.0, f64::max);
    lattice_levels(lo, hi, LATTICE_STEP)
}

fn constant_check(report: &mut Report, name: &str, est: Estimate, reference: f64, sigmas: f64) {
    let z = (est.value - reference).abs() / est.stderr.max(f64::MIN_POSITIVE);
    let agree = (est.value - reference).abs() <= sigmas * est.stderr;
    report.check(Check { name: name.into(), value: z, min: None, max: Some(sigmas), pass: agree });
}

/// Ratio band at the largest `n`.
fn ratio_band(report: &mut Report, cfg: &ScenarioConfig) {
    let b = &cfg.bands;
    if b.ratio_min.is_none() && b.ratio_max.is_none() {
        return;
    }
    if let Some(last) = report.rows.last().copied() {
        report.check(Check::within(format!("ratio_at_n{}", last.n), last.ratio, b.ratio_min, b.ratio_max));
    }
}

/// `|r_{i+1} − T| ≤ |r_i − T| + 3·(combined stderr)` for consecutive rows.
pub fn monotone_toward(rows: &[Row], target: f64) -> bool {
    rows.windows(2).all(|w| {
        let se = (w[0].ratio_stderr().powi(2) + w[1].ratio_stderr().powi(2)).sqrt();
        (w[1].ratio - target).abs() <= (w[0].ratio - target).abs() + 3.0 * se
    })
}

/// Slope of `log p̂` against `x`, dropping rows with no hits.
fn log_slope(report: &mut Report, xs: &[f64], rows: &[Row], stream: RngStream) -> (f64, (f64, f64)) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut sd = Vec::new();
    for (xi, r) in xs.iter().zip(rows) {
        if r.p_hat > 0.0 {
            x.push(*xi);
            y.push(r.p_hat.ln());
            sd.push(r.p_stderr / r.p_hat);
        } else {
            report.warnings.push(format!("n = {} dropped from the regression: zero hits", r.n));
        }
    }
    if x.len() < 2 {
        report.warnings.push("fewer than two usable n values; slope undefined".into());
        return (f64::NAN, (f64::NAN, f64::NAN));
    }
    (ols(&x, &y).0, bootstrap_slope_ci(&x, &y, &sd, BOOTSTRAP_REPS, stream))
}

fn mc_rows(
    cfg: &ScenarioConfig,
    source: &Source,
    sets: &[TargetSet],
    normalizer: impl Fn(u64) -> Result<f64>,
) -> Result<Vec<Vec<Row>>> {
    let mut out = vec![Vec::new(); sets.len()];
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let m = match source {
            Source::Levy(_) => cfg.grid_for(n),
            _ => n as usize,
        };
        let est = mc_probabilities(source, n, sets, cfg.samples_per_n, mc_stream(cfg, i), cfg.batch_size, m)?;
        let z = normalizer(n)?;
        for (rows, e) in out.iter_mut().zip(est) {
            rows.push(Row::new(n, e, z));
        }
    }
    Ok(out)
}

fn sigmas(cfg: &ScenarioConfig) -> f64 {
    cfg.bands.constant_sigmas.unwrap_or(DEFAULT_CONSTANT_SIGMAS)
}

/// Two-sided symmetric model, `A = {|ξ(t)| ≥ t − 1/2 ∀t}`.
pub fn run_multiple_optima(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate_sampling()?;
    let model = cfg.levy_model()?;
    let (pos, neg) = match (&cfg.pos, &cfg.neg) {
        (Some(p), Some(n)) => (p, n),
        _ => return Err(config("multiple_optima needs both [pos] and [neg]")),
    };
    if pos.alpha != neg.beta {
        return Err(config(format!("multiple_optima needs alpha = beta, got {} and {}", pos.alpha, neg.beta)));
    }
    if pos.c != neg.c || pos.slowvar != neg.slowvar {
        return Err(config("multiple_optima needs symmetric tails (same c and slowvar on both sides)"));
    }
    let alpha = pos.alpha;
    let mut report = Report::new(cfg);
    let target = 0.5f64.powf(1.0 - alpha);
    report.target = Some(target);

    let sets = [TargetSet::abs_above_ramp(false), TargetSet::abs_above_ramp(true)];
    let norm = |n| Ok(n_tail(&model, Side::Pos, n)? + n_tail(&model, Side::Neg, n)?);
    let mut rows = mc_rows(cfg, &Source::Levy(model.clone()), &sets, norm)?;
    let interior = rows.pop().unwrap();
    report.rows = rows.pop().unwrap();
    report.detail("interior_rows", &interior);

    let params = LimitParams::new(alpha, alpha, 1, 0, 0.5, 0.5)?;
    let c = estimate_c(&sets[0], &params, cfg.limit_samples, base(cfg).child(LIMIT_TASK, 0))?;
    report.limit_constant = Some(LimitConstant { value: c.value, stderr: Some(c.stderr), source: "estimate_c".into() });
    constant_check(&mut report, "estimate_c_vs_target", c, target, sigmas(cfg));

    let sandwich = report.rows.iter().zip(&interior).all(|(cl, int)| {
        let se = (cl.ratio_stderr().powi(2) + int.ratio_stderr().powi(2)).sqrt();
        int.ratio <= cl.ratio + 3.0 * se
    });
    report.check(Check::flag("sandwich_interior_le_closure", sandwich));
    ratio_band(&mut report, cfg);
    if cfg.bands.monotone {
        let ok = monotone_toward(&report.rows, target);
        report.check(Check::flag("monotone_toward_target", ok));
    }
    Ok(report)
}

/// Spectrally positive model, `A = {sup(ξ(t) − ct) ≥ a, jumps ≤ b}`.
pub fn run_moderate_jumps(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate_sampling()?;
    let model = cfg.levy_model()?;
    if model.neg.is_some() {
        return Err(config("moderate_jumps needs a spectrally positive model (no [neg] table)"));
    }
    let a = cfg.need(cfg.target.a, "a")?;
    let b = cfg.need(cfg.target.b, "b")?;
    let c = cfg.need(cfg.target.c, "c")?;
    if !(a > 0.0 && b > 0.0 && c >= 0.0) {
        return Err(config("moderate_jumps needs a > 0, b > 0, c >= 0"));
    }
    let ratio = a / b;
    if (ratio - ratio.round()).abs() <= 1e-12 * ratio.max(1.0) {
        return Err(config(format!("a = {a} is a multiple of b = {b}")));
    }
    let alpha = model.pos.index();
    let set = TargetSet::moderate_jumps(a, b, c);
    let (j, _) = set.hint_jk.expect("catalog sets carry counts");
    let mut report = Report::new(cfg);
    report.detail("j", j);

    let norm = |n| levy_normalizer(&model, n, j, 0);
    report.rows = mc_rows(cfg, &Source::Levy(model.clone()), std::slice::from_ref(&set), norm)?.remove(0);

    let params = LimitParams::from_hint(&set, alpha, alpha, j, 0)?;
    let est = estimate_c(&set, &params, cfg.limit_samples, base(cfg).child(LIMIT_TASK, 0))?;
    report.limit_constant = Some(LimitConstant { value: est.value, stderr: Some(est.stderr), source: "estimate_c".into() });
    if j == 1 {
        let exact = c1_corridor_closed_form(a, b, c, alpha)?;
        report.target = Some(exact);
        report.detail("closed_form", exact);
        constant_check(&mut report, "estimate_c_vs_closed_form", est, exact, sigmas(cfg));
    } else {
        report.target = Some(est.value);
    }

    let xs: Vec<f64> = report.rows.iter().map(|r| n_tail(&model, Side::Pos, r.n).map(f64::ln)).collect::<Result<_>>()?;
    let rows = report.rows.clone();
    let (slope, ci) = log_slope(&mut report, &xs, &rows, base(cfg).child(BOOTSTRAP_TASK, 0));
    report.detail("slope", slope);
    report.detail("slope_ci", ci);
    if cfg.bands.slope_min.is_some() || cfg.bands.slope_max.is_some() {
        report.check(Check::within("slope_vs_j", slope, cfg.bands.slope_min, cfg.bands.slope_max));
    }
    ratio_band(&mut report, cfg);
    Ok(report)
}

/// Two-sided model through the OU map; one up and one down jump.
pub fn run_ou_barrier(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate_sampling()?;
    let model = cfg.levy_model()?;
    let kappa = cfg.need(cfg.target.kappa, "kappa")?;
    let a_plus = cfg.need(cfg.target.a_plus, "a_plus")?;
    let a_minus = cfg.need(cfg.target.a_minus, "a_minus")?;
    if !(kappa >= 0.0 && a_plus > 0.0 && a_minus > 0.0) {
        return Err(config("ou_barrier needs kappa >= 0 and a_plus, a_minus > 0"));
    }
    let mut report = Report::new(cfg);
    let Some(neg) = model.neg else {
        report.detail("feasible", false);
        report.warnings.push("the event needs one up and one down jump; the model has no negative side".into());
        report.check(Check::flag("two_sided_model", false));
        return Ok(report);
    };
    report.detail("feasible", true);
    let (alpha, beta) = (model.pos.index(), neg.index());
    let set = TargetSet::ou_barrier(kappa, a_plus, a_minus);

    let norm = |n| levy_normalizer(&model, n, 1, 1);
    report.rows = mc_rows(cfg, &Source::Levy(model.clone()), std::slice::from_ref(&set), norm)?.remove(0);

    let quad = c11_ou_quadrature(a_plus, a_minus, kappa, alpha, beta, QUAD_TOL)?;
    report.target = Some(quad);
    report.limit_constant = Some(LimitConstant { value: quad, stderr: None, source: "c11_ou_quadrature".into() });
    let params = LimitParams::new(alpha, beta, 1, 1, a_plus, a_minus)?;
    let est = estimate_c(&set, &params, cfg.limit_samples, base(cfg).child(LIMIT_TASK, 0))?;
    report.detail("estimate_c", est);
    constant_check(&mut report, "estimate_c_vs_quadrature", est, quad, sigmas(cfg));
    ratio_band(&mut report, cfg);
    Ok(report)
}

/// Power-law slope of `P(X̄_n ∈ G)` in `n`.
pub fn run_ldp_slope(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate_sampling()?;
    let model = cfg.levy_model()?;
    let set = cfg.ldp_set()?;
    let alpha = model.pos.index();
    let beta = model.neg.map_or(alpha, |t| t.index());
    let max_j = cfg.target.max_j.unwrap_or(3);
    let max_k = if model.neg.is_some() { cfg.target.max_k.unwrap_or(3) } else { 0 };
    let levels = match cfg.target.kind.as_deref().unwrap_or("terminal_above") {
        "corridor" => corridor_levels(&cfg.corridor()?),
        _ => {
            let r = cfg.target.level.unwrap_or(0.0).abs() + 1.0;
            lattice_levels(-r, r, LATTICE_STEP)
        }
    };
    let bf = brute_force_min_jumps(&set, max_j, max_k, &levels, &lattice_times(), alpha, beta)?
        .ok_or_else(|| config(format!("no path with at most ({max_j}, {max_k}) jumps reaches {}", set.name())))?;
    let (j, k) = bf.best;
    let mut report = Report::new(cfg);
    report.target = Some(-bf.cost);
    report.detail("jumps", json!({ "J": j, "K": k }));
    report.detail("rate", bf.cost);

    let norm = |n| levy_normalizer(&model, n, j, k);
    report.rows = mc_rows(cfg, &Source::Levy(model.clone()), std::slice::from_ref(&set), norm)?.remove(0);
    let xs: Vec<f64> = report.rows.iter().map(|r| (r.n as f64).ln()).collect();
    let rows = report.rows.clone();
    let (slope, ci) = log_slope(&mut report, &xs, &rows, base(cfg).child(BOOTSTRAP_TASK, 0));
    report.detail("slope", slope);
    report.detail("slope_ci", ci);
    report.check(Check::within("slope", slope, cfg.bands.slope_min, cfg.bands.slope_max));
    Ok(report)
}

/// Optimizer output for a corridor, cross-checked by lattice brute force.
pub fn run_corridor(cfg: &ScenarioConfig) -> Result<Report> {
    let corridor = cfg.corridor()?;
    let opt = optimal_jump_path(&corridor)?;
    let mut report = Report::new(cfg);
    report.detail("optimal_path", opt.to_json());
    let set = TargetSet::corridor(corridor.clone(), false);
    let max_j = cfg.target.max_j.unwrap_or(4);
    let max_k = cfg.target.max_k.unwrap_or(4);
    let bf = brute_force_min_jumps(&set, max_j, max_k, &corridor_levels(&corridor), &lattice_times(), 2.0, 2.0)?;
    match bf {
        Some(bf) => {
            let agree = bf.feasible.iter().all(|&(j, k)| j >= opt.counts.0 && k >= opt.counts.1);
            report.detail("brute_force", json!({ "best": bf.best, "minimizers": bf.minimizers }));
            report.check(Check::flag("optimizer_is_componentwise_minimal", agree && bf.feasible.contains(&opt.counts)));
        }
        None => {
            report.warnings.push("brute force found no member at lattice resolution".into());
            report.check(Check::flag("optimizer_is_componentwise_minimal", false));
        }
    }
    Ok(report)
}

/// Direct walk vs Poisson-subordinated walk, plus a one-jump ratio.
pub fn run_subordination(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate_sampling()?;
    let inc = cfg.increment_model()?;
    let level = cfg.target.level.unwrap_or(1.0);
    if !(level > 0.0) {
        return Err(config("subordination needs target.level > 0"));
    }
    let ks_samples = cfg.ks_samples.unwrap_or(cfg.samples_per_n);
    let mut report = Report::new(cfg);
    report.target = Some(1.0);

    let mut ks = Vec::new();
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let m = n as usize;
        let walk = sample_functionals(&Source::Walk(inc), n, ks_samples, mc_stream(cfg, i), cfg.batch_size, m)?;
        let stream = base(cfg).child(i as u32 + 1 + SUBORDINATED_OFFSET, 0);
        let sub = sample_functionals(&Source::Subordinated(inc), n, ks_samples, stream, cfg.batch_size, m)?;
        let pick = |v: &[(f64, f64)], f: fn(&(f64, f64)) -> f64| v.iter().map(f).collect::<Vec<_>>();
        let ks_sup = ks_two_sample(&pick(&walk, |p| p.0), &pick(&sub, |p| p.0));
        let ks_terminal = ks_two_sample(&pick(&walk, |p| p.1), &pick(&sub, |p| p.1));
        ks.push(json!({ "n": n, "ks_sup": ks_sup, "ks_terminal": ks_terminal }));
        if cfg.bands.ks_max.is_some() {
            report.check(Check::within(format!("ks_sup_n{n}"), ks_sup, None, cfg.bands.ks_max));
            report.check(Check::within(format!("ks_terminal_n{n}"), ks_terminal, None, cfg.bands.ks_max));
        }
    }
    report.detail("ks", ks);

    let set = TargetSet::terminal_above(level, true);
    let norm = |n: u64| Ok(n as f64 * inc.tail_pos(level * n as f64)?);
    report.rows = mc_rows(cfg, &Source::Walk(inc), std::slice::from_ref(&set), norm)?.remove(0);
    ratio_band(&mut report, cfg);
    Ok(report)
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Report> {
    match cfg.scenario {
        Scenario::ModerateJumps => run_moderate_jumps(cfg),
        Scenario::OuBarrier => run_ou_barrier(cfg),
        Scenario::MultipleOptima => run_multiple_optima(cfg),
        Scenario::LdpSlope => run_ldp_slope(cfg),
        Scenario::Corridor => run_corridor(cfg),
        Scenario::Subordination => run_subordination(cfg),
    }
}

/// The scenario's limit constant(s) alone, without path sampling.
pub fn limit_constant(cfg: &ScenarioConfig) -> Result<serde_json::Value> {
    let stream = base(cfg).child(LIMIT_TASK, 0);
    match cfg.scenario {
        Scenario::MultipleOptima => {
            let alpha = cfg.levy_model()?.pos.index();
            let params = LimitParams::new(alpha, alpha, 1, 0, 0.5, 0.5)?;
            let est = estimate_c(&TargetSet::abs_above_ramp(false), &params, cfg.limit_samples, stream)?;
            Ok(json!({ "estimate_c": est, "target": 0.5f64.powf(1.0 - alpha) }))
        }
        Scenario::ModerateJumps => {
            let alpha = cfg.levy_model()?.pos.index();
            let (a, b, c) = (cfg.need(cfg.target.a, "a")?, cfg.need(cfg.target.b, "b")?, cfg.need(cfg.target.c, "c")?);
            let set = TargetSet::moderate_jumps(a, b, c);
            let (j, _) = set.hint_jk.expect("catalog sets carry counts");
            let est = estimate_c(&set, &LimitParams::from_hint(&set, alpha, alpha, j, 0)?, cfg.limit_samples, stream)?;
            let exact = if j == 1 { Some(c1_corridor_closed_form(a, b, c, alpha)?) } else { None };
            Ok(json!({ "j": j, "estimate_c": est, "closed_form": exact }))
        }
        Scenario::OuBarrier => {
            let model = cfg.levy_model()?;
            let neg = model.neg.ok_or_else(|| config("ou_barrier needs a [neg] table"))?;
            let kappa = cfg.need(cfg.target.kappa, "kappa")?;
            let (ap, am) = (cfg.need(cfg.target.a_plus, "a_plus")?, cfg.need(cfg.target.a_minus, "a_minus")?);
            let (alpha, beta) = (model.pos.index(), neg.index());
            let quad = c11_ou_quadrature(ap, am, kappa, alpha, beta, QUAD_TOL)?;
            let params = LimitParams::new(alpha, beta, 1, 1, ap, am)?;
            let est = estimate_c(&TargetSet::ou_barrier(kappa, ap, am), &params, cfg.limit_samples, stream)?;
            Ok(json!({ "estimate_c": est, "quadrature": quad }))
        }
        other => Err(config(format!("scenario {} has no limit constant", other.name()))),
    }
}

/// Writes `cfg.dump_paths` sample paths per `n` into `dir`.
pub fn dump_scenario_paths(cfg: &ScenarioConfig, dir: &Path) -> Result<()> {
    let source = match cfg.scenario {
        Scenario::Corridor => return Ok(()),
        Scenario::Subordination => Source::Walk(cfg.increment_model()?),
        _ => Source::Levy(cfg.levy_model()?),
    };
    for (i, &n) in cfg.n_list.iter().enumerate() {
        let m = match source {
            Source::Levy(_) => cfg.grid_for(n),
            _ => n as usize,
        };
        dump_paths(&source, n, m, cfg.dump_paths, base(cfg).child(DUMP_TASK + i as u32, 0), dir)?;
    }
    Ok(())
}
