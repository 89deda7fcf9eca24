use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// A jump of a step path: `size` added at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump {
    pub time: f64,
    pub size: f64,
}

impl Jump {
    pub fn new(time: f64, size: f64) -> Self {
        Jump { time, size }
    }
}

/// Step function on `[0, 1]` vanishing at the origin, right-continuous,
/// with finitely many nonzero jumps at strictly increasing times in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct StepPath {
    jumps: Vec<Jump>,
}

impl StepPath {
    pub fn zero() -> Self {
        StepPath { jumps: Vec::new() }
    }

    pub fn new(jumps: Vec<Jump>) -> Result<Self> {
        for (i, j) in jumps.iter().enumerate() {
            if !(j.time > 0.0 && j.time <= 1.0) {
                return Err(Error::InvalidPath(format!("jump time {} outside (0, 1]", j.time)));
            }
            if !j.size.is_finite() || j.size == 0.0 {
                return Err(Error::InvalidPath(format!("jump size {} must be finite and nonzero", j.size)));
            }
            if i > 0 && jumps[i - 1].time >= j.time {
                return Err(Error::InvalidPath(format!(
                    "jump times must be strictly increasing ({} then {})",
                    jumps[i - 1].time,
                    j.time
                )));
            }
        }
        Ok(StepPath { jumps })
    }

    /// Sorts by time first; coincident times are still rejected.
    pub fn from_unsorted(mut jumps: Vec<Jump>) -> Result<Self> {
        jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
        Self::new(jumps)
    }

    /// Path built from upward jumps `(size, time)` and downward jumps
    /// `(size, time)` given with positive sizes.
    pub fn from_up_down(up: &[(f64, f64)], down: &[(f64, f64)]) -> Result<Self> {
        let jumps = up
            .iter()
            .map(|&(x, u)| Jump::new(u, x))
            .chain(down.iter().map(|&(y, v)| Jump::new(v, -y)))
            .collect();
        Self::from_unsorted(jumps)
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(domain(format!("evaluation time {t} outside [0, 1]")));
        }
        Ok(self.value_at(t))
    }

    pub(crate) fn value_at(&self, t: f64) -> f64 {
        self.jumps.iter().take_while(|j| j.time <= t).map(|j| j.size).sum()
    }

    /// `(number of upward jumps, number of downward jumps)`.
    pub fn jump_counts(&self) -> (u32, u32) {
        let up = self.jumps.iter().filter(|j| j.size > 0.0).count() as u32;
        (up, self.jumps.len() as u32 - up)
    }

    /// `(α − 1)·up + (β − 1)·down`.
    pub fn rate(&self, alpha: f64, beta: f64) -> f64 {
        let (up, down) = self.jump_counts();
        crate::levy_model::rate_cost(alpha, beta, up, down)
    }

    /// Values taken by the path: `levels[0] = 0`, `levels[i]` after jump `i`.
    pub fn levels(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.jumps.len() + 1);
        out.push(0.0);
        for j in &self.jumps {
            acc += j.size;
            out.push(acc);
        }
        out
    }

    /// Constant pieces `(start, end, level)`; the last piece ends at 1 and
    /// is right-closed, the others are right-open. A jump at time 1 yields a
    /// degenerate final piece `(1, 1, level)`.
    pub fn segments(&self) -> Vec<(f64, f64, f64)> {
        let levels = self.levels();
        let mut out = Vec::with_capacity(levels.len());
        let mut start = 0.0;
        for (i, j) in self.jumps.iter().enumerate() {
            out.push((start, j.time, levels[i]));
            start = j.time;
        }
        out.push((start, 1.0, *levels.last().unwrap()));
        out
    }

    /// Upward jump sizes, largest first.
    pub fn up_sizes_desc(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.jumps.iter().filter(|j| j.size > 0.0).map(|j| j.size).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Magnitudes of downward jumps, largest first.
    pub fn down_sizes_desc(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.jumps.iter().filter(|j| j.size < 0.0).map(|j| -j.size).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn max_up_jump(&self) -> f64 {
        self.jumps.iter().map(|j| j.size).fold(0.0, f64::max)
    }

    /// Exact `sup_t |self(t) − other(t)|`.
    pub fn sup_distance(&self, other: &StepPath) -> f64 {
        let mut i = 0;
        let mut k = 0;
        let (mut a, mut b) = (0.0f64, 0.0f64);
        let mut best = 0.0f64;
        while i < self.jumps.len() || k < other.jumps.len() {
            let ti = self.jumps.get(i).map_or(f64::INFINITY, |j| j.time);
            let tk = other.jumps.get(k).map_or(f64::INFINITY, |j| j.time);
            let t = ti.min(tk);
            while i < self.jumps.len() && self.jumps[i].time == t {
                a += self.jumps[i].size;
                i += 1;
            }
            while k < other.jumps.len() && other.jumps[k].time == t {
                b += other.jumps[k].size;
                k += 1;
            }
            best = best.max((a - b).abs());
        }
        best
    }

    /// Samples the path on the uniform grid `i / m`.
    pub fn to_grid(&self, m: usize) -> GridPath {
        let mut values = Vec::with_capacity(m + 1);
        let mut next = 0;
        let mut acc = 0.0;
        for i in 0..=m {
            let t = i as f64 / m as f64;
            while next < self.jumps.len() && self.jumps[next].time <= t {
                acc += self.jumps[next].size;
                next += 1;
            }
            values.push(acc);
        }
        GridPath { values }
    }

    /// Image under the Ornstein-Uhlenbeck map
    /// `ξ ↦ ξ(t) − κ e^{−κt} ∫_0^t e^{κs} ξ(s) ds`, evaluated exactly at `t`.
    /// For a step path this equals `Σ_{u_i ≤ t} s_i e^{−κ(t − u_i)}`.
    pub fn ou_value(&self, kappa: f64, t: f64) -> f64 {
        self.jumps
            .iter()
            .take_while(|j| j.time <= t)
            .map(|j| j.size * (-kappa * (t - j.time)).exp())
            .sum()
    }

    /// Exact infimum and terminal value of the OU image. Between jumps the
    /// image decays toward zero, so the infimum sits right after a jump or
    /// at `t = 0`.
    pub fn ou_inf_and_terminal(&self, kappa: f64) -> (f64, f64) {
        let mut inf = 0.0f64;
        let mut cur = 0.0f64;
        let mut last = 0.0f64;
        for j in &self.jumps {
            cur = cur * (-kappa * (j.time - last)).exp() + j.size;
            last = j.time;
            inf = inf.min(cur);
        }
        let terminal = cur * (-kappa * (1.0 - last)).exp();
        (inf, terminal)
    }

    pub fn ou_grid(&self, kappa: f64, m: usize) -> GridPath {
        let values = (0..=m).map(|i| self.ou_value(kappa, i as f64 / m as f64)).collect();
        GridPath { values }
    }

    /// CSV with header `time,size`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,size\n");
        for j in &self.jumps {
            let _ = writeln!(s, "{},{}", j.time, j.size);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "time,size" => {}
            other => return Err(Error::InvalidPath(format!("expected header time,size, got {other:?}"))),
        }
        let mut jumps = Vec::new();
        for line in lines {
            let mut parts = line.split(',');
            let (Some(t), Some(s), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::InvalidPath(format!("malformed row {line:?}")));
            };
            let parse = |v: &str| {
                v.trim().parse::<f64>().map_err(|e| Error::InvalidPath(format!("bad number {v:?}: {e}")))
            };
            jumps.push(Jump::new(parse(t)?, parse(s)?));
        }
        Self::new(jumps)
    }
}

/// Path sampled on the uniform grid `i / m`, `i = 0..=m`; the value at a grid
/// point is the right limit there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPath {
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidPath("grid path needs m >= 1".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPath("grid path values must be finite".into()));
        }
        Ok(GridPath { values })
    }

    pub fn zeros(m: usize) -> Self {
        GridPath { values: vec![0.0; m + 1] }
    }

    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at `t`, i.e. at the largest grid point not after `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(domain(format!("evaluation time {t} outside [0, 1]")));
        }
        let i = ((t * self.m() as f64).floor() as usize).min(self.m());
        Ok(self.values[i])
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest increment between consecutive grid points.
    pub fn max_increment(&self) -> f64 {
        self.values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// OU image with the integral evaluated by the trapezoidal rule.
    pub fn ou_transform(&self, kappa: f64) -> GridPath {
        if kappa == 0.0 {
            return self.clone();
        }
        let m = self.m() as f64;
        let dt = 1.0 / m;
        let mut out = Vec::with_capacity(self.values.len());
        out.push(self.values[0]);
        let mut integral = 0.0;
        let mut prev = self.values[0];
        for (i, &v) in self.values.iter().enumerate().skip(1) {
            let t = i as f64 * dt;
            let weighted = (kappa * t).exp() * v;
            integral += 0.5 * dt * (prev + weighted);
            prev = weighted;
            out.push(v - kappa * (-kappa * t).exp() * integral);
        }
        GridPath { values: out }
    }

    /// Single-column CSV; the header is the grid size `m`.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", self.m());
        for v in &self.values {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let m: usize = lines
            .next()
            .and_then(|h| h.trim().parse().ok())
            .ok_or_else(|| Error::InvalidPath("grid CSV header must be the grid size m".into()))?;
        let values = lines
            .map(|l| l.trim().parse::<f64>().map_err(|e| Error::InvalidPath(format!("bad value {l:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != m + 1 {
            return Err(Error::InvalidPath(format!("expected {} values, found {}", m + 1, values.len())));
        }
        Self::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_jumps() -> StepPath {
        StepPath::new(vec![Jump::new(0.3, 2.0), Jump::new(0.7, -1.0)]).unwrap()
    }

    #[test]
    fn eval_is_cadlag() {
        let p = StepPath::new(vec![Jump::new(0.5, 1.0)]).unwrap();
        assert_eq!(p.eval(0.49).unwrap(), 0.0);
        assert_eq!(p.eval(0.5).unwrap(), 1.0);
        assert_eq!(two_jumps().eval(1.0).unwrap(), 1.0);
        assert!(p.eval(1.01).is_err());
        assert!(p.eval(-0.1).is_err());
    }

    #[test]
    fn counts_and_rates() {
        assert_eq!(StepPath::zero().jump_counts(), (0, 0));
        assert_eq!(two_jumps().jump_counts(), (1, 1));
        let three = StepPath::new(vec![Jump::new(0.1, 1.0), Jump::new(0.2, 0.5), Jump::new(0.9, 3.0)]).unwrap();
        assert_eq!(three.jump_counts(), (3, 0));
        assert_eq!(StepPath::zero().rate(2.0, 3.0), 0.0);
        assert_relative_eq!(two_jumps().rate(2.0, 3.0), 3.0);
        let two_up = StepPath::new(vec![Jump::new(0.1, 1.0), Jump::new(0.2, 0.5)]).unwrap();
        assert_relative_eq!(two_up.rate(1.5, 2.0), 1.0);
    }

    #[test]
    fn construction_rejects_bad_jumps() {
        assert!(StepPath::new(vec![Jump::new(0.0, 1.0)]).is_err());
        assert!(StepPath::new(vec![Jump::new(0.5, 0.0)]).is_err());
        assert!(StepPath::new(vec![Jump::new(0.5, 1.0), Jump::new(0.5, 2.0)]).is_err());
        assert!(StepPath::new(vec![Jump::new(0.6, 1.0), Jump::new(0.5, 2.0)]).is_err());
        assert!(StepPath::new(vec![Jump::new(1.0, 1.0)]).is_ok());
        assert!(StepPath::from_unsorted(vec![Jump::new(0.6, 1.0), Jump::new(0.5, 2.0)]).is_ok());
    }

    #[test]
    fn segments_cover_unit_interval() {
        let s = two_jumps().segments();
        assert_eq!(s, vec![(0.0, 0.3, 0.0), (0.3, 0.7, 2.0), (0.7, 1.0, 1.0)]);
    }

    #[test]
    fn grid_sampling() {
        let g = two_jumps().to_grid(10);
        assert_eq!(g.m(), 10);
        assert_eq!(g.values()[2], 0.0);
        assert_eq!(g.values()[3], 2.0);
        assert_eq!(g.values()[7], 1.0);
        assert_eq!(g.terminal(), 1.0);
        assert_eq!(g.eval(0.35).unwrap(), 2.0);
    }

    #[test]
    fn ou_single_jump() {
        let p = StepPath::new(vec![Jump::new(0.5, 1.0)]).unwrap();
        assert_relative_eq!(p.ou_value(1.0, 1.0), (-0.5f64).exp(), max_relative = 1e-15);
        let (inf, term) = p.ou_inf_and_terminal(1.0);
        assert_eq!(inf, 0.0);
        assert_relative_eq!(term, (-0.5f64).exp(), max_relative = 1e-15);
        // κ = 0 leaves the path untouched
        assert_eq!(two_jumps().ou_grid(0.0, 50), two_jumps().to_grid(50));
    }

    #[test]
    fn ou_trapezoid_tracks_exact_formula() {
        let p = StepPath::new(vec![Jump::new(0.23, 1.3), Jump::new(0.61, -0.8)]).unwrap();
        let m = 10_000;
        let approx = p.to_grid(m).ou_transform(1.5);
        let exact = p.ou_grid(1.5, m);
        let err = approx
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "max error {err}");
    }

    #[test]
    fn csv_roundtrip_examples() {
        let p = two_jumps();
        assert_eq!(StepPath::from_csv(&p.to_csv()).unwrap(), p);
        let g = p.to_grid(8);
        let text = g.to_csv();
        assert!(text.starts_with("8\n"));
        assert_eq!(GridPath::from_csv(&text).unwrap(), g);
        assert!(GridPath::from_csv("3\n0\n1\n").is_err());
        assert!(StepPath::from_csv("t,s\n0.5,1\n").is_err());
    }

    proptest! {
        #[test]
        fn sup_distance_matches_dense_scan(
            xs in proptest::collection::btree_map(1u32..100, -3.0f64..3.0, 0..4),
            ys in proptest::collection::btree_map(1u32..100, -3.0f64..3.0, 0..4),
        ) {
            let mk = |m: &std::collections::BTreeMap<u32, f64>| {
                StepPath::new(m.iter().filter(|(_, s)| **s != 0.0).map(|(t, s)| Jump::new(*t as f64 / 100.0, *s)).collect()).unwrap()
            };
            let (x, y) = (mk(&xs), mk(&ys));
            let dense = (0..=100)
                .map(|i| (x.value_at(i as f64 / 100.0) - y.value_at(i as f64 / 100.0)).abs())
                .fold(0.0, f64::max);
            prop_assert!((x.sup_distance(&y) - dense).abs() < 1e-12);
        }
    }
}
