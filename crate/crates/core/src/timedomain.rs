//! Leapfrog integration of the per-wave-number second-order system
//! M v_tt = A v and growth-rate extraction from the recorded norm history.
//!
//! M is the pencil mass of the mode problem, so eigenpairs of (A, M) are
//! exact normal modes of the discrete dynamics. The recorded energy is the
//! quantity the leapfrog conserves exactly: p^T M p - v_{n+1}^T A v_n with
//! the midpoint velocity p = (v_{n+1} - v_n)/dt; at t = 0 it is evaluated
//! from the supplied initial velocity instead.

use std::io::Write;

use nalgebra::{Cholesky, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operators::ModeProblem;

/// Initial data selector.
#[derive(Debug, Clone)]
pub enum InitKind {
    /// Principal eigenvector with v_t = lambda v, the pure growing mode.
    Eigenmode,
    /// M-normalized pseudorandom v with v_t = 0, seeded deterministically.
    Random { seed: u64 },
    /// Caller-supplied v and v_t.
    Custom { v: DVector<f64>, v_t: DVector<f64> },
}

/// One recorded history row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistorySample {
    pub t: f64,
    /// (v^T M v)^(1/2)
    pub m_norm: f64,
    /// Discrete leapfrog energy invariant (see module docs).
    pub energy: f64,
}

/// Time-domain state for one wave number.
#[derive(Debug)]
pub struct SimState<'a> {
    problem: &'a ModeProblem,
    mass_chol: Cholesky<f64, Dyn>,
    v: DVector<f64>,
    v_prev: DVector<f64>,
    t: f64,
    dt: f64,
    step: usize,
    stride: usize,
    history: Vec<HistorySample>,
}

/// Least-squares growth-rate fit over the trailing window of a history.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    /// Fitted rate; reported as 0 when `oscillatory` is set.
    pub lambda_fit: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    /// Set when the trailing slope is at most 1e-6 and the fit residuals
    /// change sign, i.e. the signal is bounded rather than growing.
    pub oscillatory: bool,
}

impl<'a> SimState<'a> {
    pub fn problem(&self) -> &ModeProblem {
        self.problem
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }
    pub fn history(&self) -> &[HistorySample] {
        &self.history
    }

    pub fn m_norm(&self) -> f64 {
        self.v.dot(&(&self.problem.m * &self.v)).sqrt()
    }

    /// Advance one leapfrog step, recording every `stride` steps.
    pub fn step_leapfrog(&mut self) -> Result<()> {
        let av = &self.problem.a * &self.v;
        let acc = self.mass_chol.solve(&av);
        let mut v_next = &self.v * 2.0 - &self.v_prev;
        v_next.axpy(self.dt * self.dt, &acc, 1.0);
        if v_next.iter().any(|x| !x.is_finite()) {
            return Err(Error::BlowUp {
                step: self.step + 1,
            });
        }
        self.step += 1;
        self.t = self.step as f64 * self.dt;
        if self.step.is_multiple_of(self.stride) {
            let p = (&v_next - &self.v) / self.dt;
            let m_norm = v_next.dot(&(&self.problem.m * &v_next)).sqrt();
            let energy = p.dot(&(&self.problem.m * &p)) - v_next.dot(&av);
            self.history.push(HistorySample {
                t: self.t,
                m_norm,
                energy,
            });
        }
        self.v_prev = std::mem::replace(&mut self.v, v_next);
        Ok(())
    }

    /// History CSV: `t,m_norm,energy`.
    pub fn write_history_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,m_norm,energy")?;
        for s in &self.history {
            writeln!(
                out,
                "{},{},{}",
                crate::fmt_g17(s.t),
                crate::fmt_g17(s.m_norm),
                crate::fmt_g17(s.energy)
            )?;
        }
        Ok(())
    }
}

/// Build initial data with dt at half the stability limit and stride 1.
pub fn initial_data<'a>(problem: &'a ModeProblem, kind: InitKind) -> Result<SimState<'a>> {
    initial_data_with(problem, kind, 0.5 * problem.cfl_dt_limit, 1)
}

/// Build initial data with an explicit dt (validated against the stability
/// limit) and recording stride.
pub fn initial_data_with<'a>(
    problem: &'a ModeProblem,
    kind: InitKind,
    dt: f64,
    stride: usize,
) -> Result<SimState<'a>> {
    if !(dt > 0.0) || dt > problem.cfl_dt_limit {
        return Err(Error::CflViolation {
            dt,
            limit: problem.cfl_dt_limit,
        });
    }
    let stride = stride.max(1);
    let n = problem.dim();
    let (v, v_t) = match kind {
        InitKind::Eigenmode => {
            let (lambda_sq, u) = crate::spectra::solve_principal(problem)?;
            if !(lambda_sq > 0.0) {
                return Err(Error::ModeNotGrowing { lambda_sq });
            }
            let lambda = lambda_sq.sqrt();
            let v_t = &u * lambda;
            (u, v_t)
        }
        InitKind::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = DVector::from_iterator(
                n,
                (0..n).map(|_| {
                    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                }),
            );
            let norm = v.dot(&(&problem.m * &v)).sqrt();
            v /= norm;
            (v, DVector::zeros(n))
        }
        InitKind::Custom { v, v_t } => {
            if v.len() != n || v_t.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: v.len().max(v_t.len()),
                });
            }
            (v, v_t)
        }
    };
    let mass_chol = problem.m.clone().cholesky().ok_or(Error::Definiteness)?;
    // Second-order Taylor seed for the previous level.
    let av = &problem.a * &v;
    let acc = mass_chol.solve(&av);
    let mut v_prev = &v - &v_t * dt;
    v_prev.axpy(0.5 * dt * dt, &acc, 1.0);
    let m_norm = v.dot(&(&problem.m * &v)).sqrt();
    let energy = v_t.dot(&(&problem.m * &v_t)) - v.dot(&av);
    Ok(SimState {
        problem,
        mass_chol,
        v,
        v_prev,
        t: 0.0,
        dt,
        step: 0,
        stride,
        history: vec![HistorySample {
            t: 0.0,
            m_norm,
            energy,
        }],
    })
}

/// Run the leapfrog to t_end, recording every `stride` steps.
pub fn simulate<'a>(
    problem: &'a ModeProblem,
    dt: f64,
    t_end: f64,
    kind: InitKind,
    stride: usize,
) -> Result<SimState<'a>> {
    let mut state = initial_data_with(problem, kind, dt, stride)?;
    let steps = (t_end / dt).round().max(1.0) as usize;
    for _ in 0..steps {
        state.step_leapfrog()?;
    }
    Ok(state)
}

/// Least-squares slope of log m_norm over the trailing `window_fraction` of
/// the history.
pub fn fit_growth_rate(history: &[HistorySample], window_fraction: f64) -> Result<GrowthFit> {
    let window_fraction = window_fraction.clamp(0.0, 1.0);
    let (t_first, t_last) = match (history.first(), history.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::TooFewSamples { got: 0, need: 10 }),
    };
    let t0 = t_last - window_fraction * (t_last - t_first);
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|s| s.t >= t0 - 1e-12 && s.m_norm > 0.0)
        .map(|s| (s.t, s.m_norm.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::TooFewSamples {
            got: pts.len(),
            need: 10,
        });
    }
    let slope = crate::spectra::least_squares_slope(&pts);
    let mean_t: f64 = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let mean_y: f64 = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let intercept = mean_y - slope * mean_t;
    let residuals: Vec<f64> = pts
        .iter()
        .map(|(t, y)| y - (intercept + slope * t))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = pts.iter().map(|(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let r_squared = if ss_tot <= 1e-30 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };

    let y_scale = pts.iter().map(|(_, y)| y.abs()).fold(1.0f64, f64::max);
    let threshold = 1e-9 * y_scale;
    let mut sign_changes = 0usize;
    let mut last_sign = 0i8;
    let mut resid_max = 0.0f64;
    for &r in &residuals {
        resid_max = resid_max.max(r.abs());
        if r.abs() <= threshold {
            continue;
        }
        let s = if r > 0.0 { 1 } else { -1 };
        if last_sign != 0 && s != last_sign {
            sign_changes += 1;
        }
        last_sign = s;
    }
    // Bounded signals: residuals alternate and the trend is either flat or
    // explains less than the residual excursion over the window.
    let span = t_last - pts[0].0;
    let oscillatory = sign_changes >= 2 && (slope <= 1e-6 || slope * span <= resid_max);
    Ok(GrowthFit {
        lambda_fit: if oscillatory { 0.0 } else { slope },
        window: (pts[0].0, t_last),
        r_squared,
        oscillatory,
    })
}
