//! Symmetrizer algebra of the compressible 7-unknown system
//! w = (sigma, v1, v2, v3, B1, B2, B3).
//!
//! The diagonal symmetrizer D = diag(q(rho0+sigma), rho0+sigma (x3), 1, 1, 1)
//! with q(rho) = gamma rho^(gamma-2) renders the three flux Jacobians
//! symmetric. The matrices are written entry by entry from their closed
//! forms, never by multiplying D into anything, so the symmetry checks are
//! transcription checks and hold bit-exactly.

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::profiles::Profile;

/// Positivity threshold guarding the q(rho) singularity at gamma < 2.
pub const DENSITY_THRESHOLD: f64 = 1e-8;

pub type Matrix7 = SMatrix<f64, 7, 7>;

/// Pointwise perturbation state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State7 {
    pub sigma: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl State7 {
    pub const ZERO: State7 = State7 {
        sigma: 0.0,
        v1: 0.0,
        v2: 0.0,
        v3: 0.0,
        b1: 0.0,
        b2: 0.0,
        b3: 0.0,
    };

    pub fn scale(&self, alpha: f64) -> State7 {
        State7 {
            sigma: alpha * self.sigma,
            v1: alpha * self.v1,
            v2: alpha * self.v2,
            v3: alpha * self.v3,
            b1: alpha * self.b1,
            b2: alpha * self.b2,
            b3: alpha * self.b3,
        }
    }
}

/// Background values at the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointContext {
    pub rho0: f64,
    pub rho0x: f64,
    pub b0: f64,
    pub b0x: f64,
    pub gamma: f64,
}

fn q(rho: f64, gamma: f64) -> f64 {
    gamma * rho.powf(gamma - 2.0)
}

fn q_prime(rho: f64, gamma: f64) -> f64 {
    gamma * (gamma - 2.0) * rho.powf(gamma - 3.0)
}

fn total_density(state: &State7, ctx: &PointContext) -> Result<f64> {
    if !(ctx.gamma > 1.0) {
        return Err(Error::GammaRange { gamma: ctx.gamma });
    }
    let rho = ctx.rho0 + state.sigma;
    if rho <= DENSITY_THRESHOLD {
        return Err(Error::NonpositiveDensity {
            rho,
            threshold: DENSITY_THRESHOLD,
        });
    }
    Ok(rho)
}

/// D = diag(q(rho0+sigma), rho0+sigma, rho0+sigma, rho0+sigma, 1, 1, 1).
pub fn symmetrizer(state: &State7, ctx: &PointContext) -> Result<Matrix7> {
    let rho = total_density(state, ctx)?;
    let mut d = Matrix7::zeros();
    d[(0, 0)] = q(rho, ctx.gamma);
    d[(1, 1)] = rho;
    d[(2, 2)] = rho;
    d[(3, 3)] = rho;
    d[(4, 4)] = 1.0;
    d[(5, 5)] = 1.0;
    d[(6, 6)] = 1.0;
    Ok(d)
}

/// The three symmetrized flux Jacobians (DA1, DA2, DA3).
pub fn flux_jacobians(state: &State7, ctx: &PointContext) -> Result<(Matrix7, Matrix7, Matrix7)> {
    let rho = total_density(state, ctx)?;
    let qv = q(rho, ctx.gamma);
    let f = rho * qv;
    let State7 {
        v1,
        v2,
        v3,
        b1,
        b2,
        b3,
        ..
    } = *state;
    let bz = b3 + ctx.b0;

    let mut a1 = Matrix7::zeros();
    a1[(0, 0)] = qv * v1;
    set_sym(&mut a1, 0, 1, f);
    a1[(1, 1)] = rho * v1;
    set_sym(&mut a1, 1, 5, b2);
    set_sym(&mut a1, 1, 6, bz);
    a1[(2, 2)] = rho * v1;
    set_sym(&mut a1, 2, 5, -b1);
    a1[(3, 3)] = rho * v1;
    set_sym(&mut a1, 3, 6, -b1);
    a1[(4, 4)] = v1;
    a1[(5, 5)] = v1;
    a1[(6, 6)] = v1;

    let mut a2 = Matrix7::zeros();
    a2[(0, 0)] = qv * v2;
    set_sym(&mut a2, 0, 2, f);
    a2[(1, 1)] = rho * v2;
    set_sym(&mut a2, 1, 4, -b2);
    a2[(2, 2)] = rho * v2;
    set_sym(&mut a2, 2, 4, b1);
    set_sym(&mut a2, 2, 6, bz);
    a2[(3, 3)] = rho * v2;
    set_sym(&mut a2, 3, 6, -b2);
    a2[(4, 4)] = v2;
    a2[(5, 5)] = v2;
    a2[(6, 6)] = v2;

    let mut a3 = Matrix7::zeros();
    a3[(0, 0)] = qv * v3;
    set_sym(&mut a3, 0, 3, f);
    a3[(1, 1)] = rho * v3;
    set_sym(&mut a3, 1, 4, -b3);
    a3[(2, 2)] = rho * v3;
    set_sym(&mut a3, 2, 5, -b3);
    a3[(3, 3)] = rho * v3;
    set_sym(&mut a3, 3, 4, b1);
    set_sym(&mut a3, 3, 5, b2);
    set_sym(&mut a3, 3, 6, ctx.b0);
    a3[(4, 4)] = v3;
    a3[(5, 5)] = v3;
    a3[(6, 6)] = v3;

    Ok((a1, a2, a3))
}

fn set_sym(m: &mut Matrix7, i: usize, j: usize, v: f64) {
    m[(i, j)] = v;
    m[(j, i)] = v;
}

/// Lower-order vectors: DL linear in the state, DF the Taylor remainder of
/// the pressure coupling (quadratic near zero).
pub fn lower_order(state: &State7, ctx: &PointContext) -> Result<([f64; 7], [f64; 7])> {
    let rho = total_density(state, ctx)?;
    let q0 = q(ctx.rho0, ctx.gamma);
    let qp0 = q_prime(ctx.rho0, ctx.gamma);
    let dl = [
        ctx.rho0x * q0 * state.v1,
        q0 * ctx.rho0x * state.sigma
            + ctx.rho0 * qp0 * ctx.rho0x * state.sigma
            + ctx.b0x * state.b3,
        0.0,
        -ctx.b0x * state.b1,
        0.0,
        0.0,
        ctx.b0x * state.v1,
    ];
    // f(rho) = rho q(rho); the bracket is f(rho0+sigma) - f(rho0) - f'(rho0) sigma.
    let f_total = rho * q(rho, ctx.gamma);
    let f_base = ctx.rho0 * q0;
    let f_lin = (q0 + ctx.rho0 * qp0) * state.sigma;
    let df = [
        ctx.rho0x * q0 * state.v1 - ctx.rho0x * q(rho, ctx.gamma) * state.v1,
        (f_total - f_base - f_lin) * ctx.rho0x,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ];
    Ok((dl, df))
}

/// Largest eta and smallest C with eta I <= D(x) <= C I over the nodes of a
/// profile carrying the perturbation `sigma_field`.
pub fn check_norm_equivalence(profile: &Profile, sigma_field: &[f64]) -> Result<(f64, f64)> {
    if sigma_field.len() != profile.grid().n() {
        return Err(Error::SizeMismatch {
            expected: profile.grid().n(),
            got: sigma_field.len(),
        });
    }
    let gamma = profile.gamma();
    let mut eta = f64::INFINITY;
    let mut c_s = f64::NEG_INFINITY;
    for (i, &sigma) in sigma_field.iter().enumerate() {
        let rho = profile.rho0()[i] + sigma;
        if rho <= DENSITY_THRESHOLD {
            return Err(Error::NonpositiveDensity {
                rho,
                threshold: DENSITY_THRESHOLD,
            });
        }
        let entries = [q(rho, gamma), rho, 1.0];
        for e in entries {
            eta = eta.min(e);
            c_s = c_s.max(e);
        }
    }
    Ok((eta, c_s))
}
