//! First-order growing normal mode, escape time, and discrete checks of the
//! curl/gradient vector identities.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operators::{diff_matrix, Case, DiffOrder};
use crate::spectra::Spectrum;

/// Relative slack added to the dominance threshold Lambda^2 / 4.
pub const DOMINANCE_TOL: f64 = 1e-12;

/// Dominant growing normal mode of a sweep. The phase convention is
/// v1 ~ cos(k0 y), v2 ~ sin(k0 y).
#[derive(Debug, Clone)]
pub struct NormalMode {
    pub k0: u32,
    /// sqrt(lambda_{k0}^2), positive.
    pub lambda: f64,
    pub v1_profile: DVector<f64>,
    pub v2_profile: DVector<f64>,
    pub grid: Grid,
}

/// Three scalar fields sampled on an (x, y) tensor grid, periodic in y.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub components: [DMatrix<f64>; 3],
}

impl Field2D {
    /// Sample three component functions on the uniform periodic tensor grid
    /// of [0, 2 pi)^2.
    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(f64, f64) -> [f64; 3]) -> Field2D {
        let hx = crate::grid::DOMAIN_LENGTH / nx as f64;
        let hy = crate::grid::DOMAIN_LENGTH / ny as f64;
        let mut components = [
            DMatrix::zeros(nx, ny),
            DMatrix::zeros(nx, ny),
            DMatrix::zeros(nx, ny),
        ];
        for i in 0..nx {
            for j in 0..ny {
                let vals = f(i as f64 * hx, j as f64 * hy);
                for (c, v) in vals.iter().enumerate() {
                    components[c][(i, j)] = *v;
                }
            }
        }
        Field2D {
            nx,
            ny,
            hx,
            hy,
            components,
        }
    }

    /// CSV dump of the in-plane components: `x,y,v1,v2`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,v1,v2")?;
        for i in 0..self.nx {
            for j in 0..self.ny {
                writeln!(
                    out,
                    "{},{},{},{}",
                    crate::fmt_g17(i as f64 * self.hx),
                    crate::fmt_g17(j as f64 * self.hy),
                    crate::fmt_g17(self.components[0][(i, j)]),
                    crate::fmt_g17(self.components[1][(i, j)])
                )?;
            }
        }
        Ok(())
    }
}

/// Pick the smallest k with lambda_k^2 > Lambda^2 / 4, the dominance
/// condition Lambda < 2 lambda that the leading-order construction needs.
pub fn select_dominant(spectrum: &Spectrum) -> Result<NormalMode> {
    let threshold = spectrum.capital_lambda_sq / 4.0
        + DOMINANCE_TOL * spectrum.capital_lambda_sq.abs().max(1.0);
    let best = spectrum
        .entries
        .iter()
        .map(|e| e.lambda_sq)
        .fold(f64::NEG_INFINITY, f64::max);
    let entry = spectrum
        .entries
        .iter()
        .find(|e| e.lambda_sq > threshold && e.lambda_sq > 0.0)
        .ok_or(Error::Dominance {
            best_lambda_sq: best,
            threshold,
        })?;
    let n = spectrum.grid.n();
    let (v1, v2) = match spectrum.case {
        Case::TransverseIncompressible | Case::ParallelIncompressible => {
            let v1 = entry.eigenvector.clone();
            // divergence-free closure: v2 = -v1_x / k
            let d1 = diff_matrix(&spectrum.grid, DiffOrder::First);
            let v2 = &d1 * &v1 * (-1.0 / entry.k as f64);
            (v1, v2)
        }
        Case::TransverseCompressible | Case::ParallelCompressible => {
            let v1 = DVector::from_iterator(n, entry.eigenvector.iter().take(n).cloned());
            let v2 = DVector::from_iterator(n, entry.eigenvector.iter().skip(n).cloned());
            (v1, v2)
        }
    };
    Ok(NormalMode {
        k0: entry.k,
        lambda: entry.lambda_sq.sqrt(),
        v1_profile: v1,
        v2_profile: v2,
        grid: spectrum.grid.clone(),
    })
}

/// Evaluate the normal mode on a tensor grid at time t:
/// v1(x, y) = v1(x) cos(k0 y) e^(lambda t), v2(x, y) = v2(x) sin(k0 y)
/// e^(lambda t), v3 = 0.
pub fn mode_field(mode: &NormalMode, t: f64, ny: usize) -> Field2D {
    assert!(ny >= 4, "mode_field needs ny >= 4");
    let nx = mode.grid.n();
    let hx = mode.grid.spacing();
    let hy = crate::grid::DOMAIN_LENGTH / ny as f64;
    let growth = (mode.lambda * t).exp();
    let k = mode.k0 as f64;
    let mut components = [
        DMatrix::zeros(nx, ny),
        DMatrix::zeros(nx, ny),
        DMatrix::zeros(nx, ny),
    ];
    for j in 0..ny {
        let y = j as f64 * hy;
        let (c, s) = ((k * y).cos(), (k * y).sin());
        for i in 0..nx {
            components[0][(i, j)] = mode.v1_profile[i] * c * growth;
            components[1][(i, j)] = mode.v2_profile[i] * s * growth;
        }
    }
    Field2D {
        nx,
        ny,
        hx,
        hy,
        components,
    }
}

/// T = ln(theta / delta) / lambda, the time an O(delta) seed needs to reach
/// the fixed amplitude theta.
pub fn escape_time(delta: f64, theta: f64, lambda: f64) -> Result<f64> {
    if !(delta > 0.0) || !(theta >= delta) || !(lambda > 0.0) {
        return Err(Error::EscapeOrdering {
            delta,
            theta,
            lambda,
        });
    }
    Ok((theta / delta).ln() / lambda)
}

fn dx(f: &DMatrix<f64>, hx: f64) -> DMatrix<f64> {
    let (nx, ny) = f.shape();
    let mut out = DMatrix::zeros(nx, ny);
    let c = 1.0 / (2.0 * hx);
    for i in 0..nx {
        let ip = (i + 1) % nx;
        let im = (i + nx - 1) % nx;
        for j in 0..ny {
            out[(i, j)] = (f[(ip, j)] - f[(im, j)]) * c;
        }
    }
    out
}

fn dy(f: &DMatrix<f64>, hy: f64) -> DMatrix<f64> {
    let (nx, ny) = f.shape();
    let mut out = DMatrix::zeros(nx, ny);
    let c = 1.0 / (2.0 * hy);
    for j in 0..ny {
        let jp = (j + 1) % ny;
        let jm = (j + ny - 1) % ny;
        for i in 0..nx {
            out[(i, j)] = (f[(i, jp)] - f[(i, jm)]) * c;
        }
    }
    out
}

fn max_abs(f: &DMatrix<f64>) -> f64 {
    f.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Max-norm residuals of the two vector identities
/// curl(a x b) = a div b + (b . grad) a - b div a - (a . grad) b and
/// grad(a . b) = (a . grad) b + (b . grad) a + a x curl b + b x curl a,
/// evaluated by centered differences with z-derivatives zero. Both fields
/// must share the tensor grid and be periodically sampled.
pub fn vector_identity_residual(a: &Field2D, b: &Field2D) -> Result<(f64, f64)> {
    if a.nx != b.nx || a.ny != b.ny {
        return Err(Error::SizeMismatch {
            expected: a.nx * a.ny,
            got: b.nx * b.ny,
        });
    }
    let (hx, hy) = (a.hx, a.hy);
    let [a1, a2, a3] = &a.components;
    let [b1, b2, b3] = &b.components;

    let cross = |p1: &DMatrix<f64>,
                 p2: &DMatrix<f64>,
                 p3: &DMatrix<f64>,
                 q1: &DMatrix<f64>,
                 q2: &DMatrix<f64>,
                 q3: &DMatrix<f64>| {
        [
            p2.component_mul(q3) - p3.component_mul(q2),
            p3.component_mul(q1) - p1.component_mul(q3),
            p1.component_mul(q2) - p2.component_mul(q1),
        ]
    };
    let advect = |u1: &DMatrix<f64>, u2: &DMatrix<f64>, f: &DMatrix<f64>| {
        u1.component_mul(&dx(f, hx)) + u2.component_mul(&dy(f, hy))
    };
    let curl = |f1: &DMatrix<f64>, f2: &DMatrix<f64>, f3: &DMatrix<f64>| {
        [dy(f3, hy), -dx(f3, hx), dx(f2, hx) - dy(f1, hy)]
    };

    // identity 1: curl(a x b) against its expansion
    let c = cross(a1, a2, a3, b1, b2, b3);
    let lhs1 = curl(&c[0], &c[1], &c[2]);
    let div_a = dx(a1, hx) + dy(a2, hy);
    let div_b = dx(b1, hx) + dy(b2, hy);
    let rhs1 = [
        a1.component_mul(&div_b) + advect(b1, b2, a1)
            - b1.component_mul(&div_a)
            - advect(a1, a2, b1),
        a2.component_mul(&div_b) + advect(b1, b2, a2)
            - b2.component_mul(&div_a)
            - advect(a1, a2, b2),
        a3.component_mul(&div_b) + advect(b1, b2, a3)
            - b3.component_mul(&div_a)
            - advect(a1, a2, b3),
    ];
    let r1 = (0..3)
        .map(|i| max_abs(&(&lhs1[i] - &rhs1[i])))
        .fold(0.0f64, f64::max);

    // identity 2: grad(a . b) against its expansion
    let adotb = a1.component_mul(b1) + a2.component_mul(b2) + a3.component_mul(b3);
    let lhs2 = [dx(&adotb, hx), dy(&adotb, hy), DMatrix::zeros(a.nx, a.ny)];
    let curl_b = curl(b1, b2, b3);
    let curl_a = curl(a1, a2, a3);
    let a_x_cb = cross(a1, a2, a3, &curl_b[0], &curl_b[1], &curl_b[2]);
    let b_x_ca = cross(b1, b2, b3, &curl_a[0], &curl_a[1], &curl_a[2]);
    let rhs2 = [
        advect(a1, a2, b1) + advect(b1, b2, a1) + &a_x_cb[0] + &b_x_ca[0],
        advect(a1, a2, b2) + advect(b1, b2, a2) + &a_x_cb[1] + &b_x_ca[1],
        advect(a1, a2, b3) + advect(b1, b2, a3) + &a_x_cb[2] + &b_x_ca[2],
    ];
    let r2 = (0..3)
        .map(|i| max_abs(&(&lhs2[i] - &rhs2[i])))
        .fold(0.0f64, f64::max);

    Ok((r1, r2))
}

/// Band-limited pseudorandom field: a trigonometric polynomial with
/// wavenumbers up to `k_max` in each direction, coefficients drawn from the
/// seed. The same seed yields samples of the same continuous field at every
/// resolution.
pub fn band_limited_field(nx: usize, ny: usize, k_max: u32, seed: u64) -> Field2D {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = Vec::new();
    for _component in 0..3 {
        let mut terms = Vec::new();
        for kx in 0..=k_max {
            for ky in 0..=k_max {
                let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                terms.push((kx as f64, ky as f64, c));
            }
        }
        coeffs.push(terms);
    }
    Field2D::from_fn(nx, ny, |x, y| {
        std::array::from_fn(|c| {
            coeffs[c]
                .iter()
                .map(|(kx, ky, a)| {
                    a[0] * (kx * x).cos() * (ky * y).cos()
                        + a[1] * (kx * x).sin() * (ky * y).cos()
                        + a[2] * (kx * x).cos() * (ky * y).sin()
                        + a[3] * (kx * x).sin() * (ky * y).sin()
                })
                .sum()
        })
    })
}
