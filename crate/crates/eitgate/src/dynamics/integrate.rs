//! Explicit Runge-Kutta integrators for complex state vectors.
//!
//! [`Dop853`] is the adaptive 8th-order Dormand-Prince pair with the same
//! error norm and step controller as Hairer's DOP853 (and scipy's port);
//! [`rk4_integrate`] is a fixed-step fallback for reproducibility checks.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::dop853_tableau::{A, B, C, E3, E5, STAGES};
use crate::error::{Error, Result};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;
const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AdaptiveRk,
    FixedRk4,
    Trajectories,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the adaptive step, seconds.
    pub max_step: f64,
    /// Step of the fixed RK4 method, seconds.
    pub fixed_step: f64,
    pub trajectories: usize,
    pub seed: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::AdaptiveRk,
            rtol: 1e-8,
            atol: 1e-10,
            max_step: f64::INFINITY,
            fixed_step: 2e-11,
            trajectories: 2000,
            seed: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::param("integrator.tolerance", "tolerances must be positive"));
        }
        if !(self.max_step > 0.0) || !(self.fixed_step > 0.0) {
            return Err(Error::param("integrator.step", "step bounds must be positive"));
        }
        if self.trajectories == 0 {
            return Err(Error::param("integrator.trajectories", "need at least one trajectory"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// One accepted step handed to observers.
pub struct StepInfo<'a> {
    pub t0: f64,
    pub h: f64,
    pub y0: &'a [C64],
    pub y1: &'a [C64],
}

pub enum Outcome {
    Completed,
    /// Observer asked to stop; `y` holds the state at `t0`, before the step.
    Stopped { t0: f64, h: f64 },
}

pub struct Dop853 {
    n: usize,
    k: Vec<Vec<C64>>,
    ytmp: Vec<C64>,
    yprev: Vec<C64>,
    pub stats: Stats,
}

fn rms_scaled(v: &[C64], y0: &[C64], y1: &[C64], rtol: f64, atol: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        let sc = atol + rtol * y0[i].norm().max(y1[i].norm());
        s += (v[i] / sc).norm_sqr();
    }
    s
}

impl Dop853 {
    pub fn new(n: usize) -> Self {
        Dop853 {
            n,
            k: vec![vec![C64::new(0.0, 0.0); n]; STAGES + 1],
            ytmp: vec![C64::new(0.0, 0.0); n],
            yprev: vec![C64::new(0.0, 0.0); n],
            stats: Stats::default(),
        }
    }

    /// Stages 1..12 given k[0] = f(t, y); writes y_new.
    fn stages<F>(&mut self, f: &mut F, t: f64, h: f64, y: &[C64], y_new: &mut [C64])
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        for s in 1..STAGES {
            self.ytmp.copy_from_slice(y);
            for (j, a) in A[s][..s].iter().enumerate() {
                if *a != 0.0 {
                    let ha = h * a;
                    for (yt, kj) in self.ytmp.iter_mut().zip(&self.k[j]) {
                        *yt += kj * ha;
                    }
                }
            }
            let (before, after) = self.k.split_at_mut(s);
            let _ = before;
            f(t + C[s] * h, &self.ytmp, &mut after[0]);
        }
        y_new.copy_from_slice(y);
        for (s, b) in B.iter().enumerate() {
            if *b != 0.0 {
                let hb = h * b;
                for (yn, ks) in y_new.iter_mut().zip(&self.k[s]) {
                    *yn += ks * hb;
                }
            }
        }
        self.stats.rhs_evals += STAGES - 1;
    }

    fn error_norm(&mut self, h: f64, y: &[C64], y_new: &[C64], rtol: f64, atol: f64) -> f64 {
        let n = self.n;
        let mut e5 = vec![C64::new(0.0, 0.0); n];
        let mut e3 = vec![C64::new(0.0, 0.0); n];
        for s in 0..=STAGES {
            let (a5, a3) = (E5[s], E3[s]);
            if a5 == 0.0 && a3 == 0.0 {
                continue;
            }
            for i in 0..n {
                e5[i] += self.k[s][i] * a5;
                e3[i] += self.k[s][i] * a3;
            }
        }
        let n5 = rms_scaled(&e5, y, y_new, rtol, atol);
        let n3 = rms_scaled(&e3, y, y_new, rtol, atol);
        if n5 == 0.0 && n3 == 0.0 {
            return 0.0;
        }
        let denom = n5 + 0.01 * n3;
        h.abs() * n5 / (denom * n as f64).sqrt()
    }

    /// One step of size h without error control. Bit-identical to the step
    /// the adaptive driver takes from the same (t, y, h).
    pub fn step_fixed<F>(&mut self, f: &mut F, t: f64, h: f64, y: &mut [C64])
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        f(t, y, &mut self.k[0]);
        self.stats.rhs_evals += 1;
        self.yprev.copy_from_slice(y);
        let y0 = std::mem::take(&mut self.yprev);
        self.stages(f, t, h, &y0, y);
        self.yprev = y0;
    }

    fn initial_step<F>(&mut self, f: &mut F, t0: f64, span: f64, y0: &[C64], rtol: f64, atol: f64) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = self.n as f64;
        let scale: Vec<f64> = y0.iter().map(|y| atol + y.norm() * rtol).collect();
        let norm = |v: &[C64]| (v.iter().zip(&scale).map(|(a, s)| (a / s).norm_sqr()).sum::<f64>() / n).sqrt();
        let d0 = norm(y0);
        let d1 = norm(&self.k[0]);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1: Vec<C64> = y0.iter().zip(&self.k[0]).map(|(y, k)| y + k * h0).collect();
        let mut f1 = vec![C64::new(0.0, 0.0); self.n];
        f(t0 + h0, &y1, &mut f1);
        self.stats.rhs_evals += 1;
        let diff: Vec<C64> = f1.iter().zip(&self.k[0]).map(|(a, b)| a - b).collect();
        let d2 = norm(&diff) / h0;
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Adaptive integration of y from t0 to t1. `h_hint` carries the step
    /// size between calls (0 requests an automatic initial step).
    pub fn integrate<F, O>(
        &mut self,
        f: &mut F,
        t0: f64,
        t1: f64,
        y: &mut [C64],
        h_hint: &mut f64,
        cfg: &IntegratorConfig,
        mut observe: O,
    ) -> Result<Outcome>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        O: FnMut(&StepInfo) -> bool,
    {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: y.len() });
        }
        if t1 <= t0 {
            return Ok(Outcome::Completed);
        }
        let mut t = t0;
        f(t, y, &mut self.k[0]);
        self.stats.rhs_evals += 1;
        let mut h_abs = if *h_hint > 0.0 {
            *h_hint
        } else {
            self.initial_step(f, t0, t1 - t0, y, cfg.rtol, cfg.atol)
        };
        let mut y_new = vec![C64::new(0.0, 0.0); self.n];
        let mut steps = 0usize;
        while t < t1 {
            let min_step = 10.0 * (t.next_up() - t);
            h_abs = h_abs.min(cfg.max_step).max(min_step);
            let mut rejected = false;
            loop {
                if h_abs < min_step {
                    return Err(Error::Integrator { time: t, reason: "step size underflow".into() });
                }
                let mut h = h_abs;
                let mut t_new = t + h;
                if t_new > t1 {
                    t_new = t1;
                    h = t_new - t;
                }
                self.stages(f, t, h, y, &mut y_new);
                f(t_new, &y_new, &mut self.k[STAGES]);
                self.stats.rhs_evals += 1;
                let err = self.error_norm(h, y, &y_new, cfg.rtol, cfg.atol);
                if !err.is_finite() {
                    return Err(Error::Integrator { time: t, reason: "non-finite error estimate".into() });
                }
                if err < 1.0 {
                    let mut factor = if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(ERROR_EXPONENT)).min(MAX_FACTOR) };
                    if rejected {
                        factor = factor.min(1.0);
                    }
                    self.stats.accepted += 1;
                    self.yprev.copy_from_slice(y);
                    y.copy_from_slice(&y_new);
                    let (lo, hi) = self.k.split_at_mut(STAGES);
                    lo[0].copy_from_slice(&hi[0]);
                    let stop = observe(&StepInfo { t0: t, h, y0: &self.yprev, y1: y });
                    if stop {
                        y.copy_from_slice(&self.yprev);
                        *h_hint = h_abs;
                        return Ok(Outcome::Stopped { t0: t, h });
                    }
                    h_abs *= factor;
                    t = t_new;
                    break;
                }
                h_abs *= (SAFETY * err.powf(ERROR_EXPONENT)).max(MIN_FACTOR);
                rejected = true;
                self.stats.rejected += 1;
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Integrator { time: t, reason: "step budget exhausted".into() });
            }
        }
        *h_hint = h_abs;
        Ok(Outcome::Completed)
    }
}

/// Classic fixed-step RK4 from t0 to t1 with step ≤ `h`.
pub fn rk4_integrate<F>(f: &mut F, t0: f64, t1: f64, y: &mut [C64], h: f64) -> Result<Stats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if !(h > 0.0) {
        return Err(Error::param("fixed_step", "step must be positive"));
    }
    let n = y.len();
    let steps = ((t1 - t0) / h).ceil().max(0.0) as usize;
    if steps > MAX_STEPS {
        return Err(Error::Integrator { time: t0, reason: "fixed-step budget exhausted".into() });
    }
    let dt = if steps > 0 { (t1 - t0) / steps as f64 } else { 0.0 };
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut stats = Stats::default();
    for s in 0..steps {
        let t = t0 + s as f64 * dt;
        f(t, y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        f(t + 0.5 * dt, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        f(t + 0.5 * dt, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * dt;
        }
        f(t + dt, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        stats.accepted += 1;
        stats.rhs_evals += 4;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    // y' = -i ω y, exact y = exp(-i ω t)
    #[test]
    fn dop853_phase_rotation() {
        let w = 3.0;
        let mut f = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = -C64::i() * w * y[0];
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut d = Dop853::new(1);
        let cfg = IntegratorConfig { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let mut h = 0.0;
        d.integrate(&mut f, 0.0, 10.0, &mut y, &mut h, &cfg, |_| false).unwrap();
        let exact = C64::from_polar(1.0, -w * 10.0);
        assert!((y[0] - exact).norm() < 1e-8, "{:?}", y[0]);
        assert!(d.stats.accepted > 10);
    }

    #[test]
    fn replay_is_bit_identical() {
        let mut f = |t: f64, y: &[C64], dy: &mut [C64]| {
            dy[0] = -C64::i() * (1.0 + t) * y[1];
            dy[1] = -C64::i() * (1.0 + t) * y[0] - 0.1 * y[1];
        };
        let mut y = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let mut d = Dop853::new(2);
        let mut steps = Vec::new();
        let mut h = 0.0;
        d.integrate(&mut f, 0.0, 3.0, &mut y, &mut h, &IntegratorConfig::default(), |s| {
            steps.push((s.t0, s.h));
            false
        })
        .unwrap();
        let mut z = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        for (t, h) in steps {
            d.step_fixed(&mut f, t, h, &mut z);
        }
        assert_eq!(y, z);
    }

    #[test]
    fn rk4_matches_exact() {
        let mut f = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = -0.5 * y[0];
        let mut y = vec![C64::new(1.0, 0.0)];
        rk4_integrate(&mut f, 0.0, 2.0, &mut y, 1e-3).unwrap();
        assert!((y[0].re - (-1.0f64).exp()).abs() < 1e-12);
    }
}
