//! Discrete symmetric matrix pencils (A, M) realizing lambda^2 M u = A u for
//! the four background-field cases at a given wave number k.
//!
//! Every quadratic form is accumulated as a sum of X^T diag(w) X terms with
//! both (i, j) and (j, i) written from the same product, so A and M are
//! symmetric exactly, not merely to roundoff. First-derivative energies use
//! the staggered two-point difference evaluated at cell midpoints: the
//! resulting Gram matrix is tridiagonal and couples adjacent nodes, which
//! keeps the discrete spectrum free of the even/odd checkerboard degeneracy
//! a wide centered difference would introduce. The centered matrices remain
//! available through [`diff_matrix`] for pointwise differentiation.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, Grid};
use crate::profiles::Profile;

/// Orientation of the background field relative to gravity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOrientation {
    /// B0 = (0, 0, B0(x)), orthogonal to gravity.
    Transverse,
    /// B0 = (B0, 0, 0), aligned with gravity; B0 constant.
    Parallel,
}

/// The four variational problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    TransverseIncompressible,
    TransverseCompressible,
    ParallelIncompressible,
    ParallelCompressible,
}

impl Case {
    pub fn orientation(self) -> FieldOrientation {
        match self {
            Case::TransverseIncompressible | Case::TransverseCompressible => {
                FieldOrientation::Transverse
            }
            Case::ParallelIncompressible | Case::ParallelCompressible => FieldOrientation::Parallel,
        }
    }

    pub fn compressible(self) -> bool {
        matches!(
            self,
            Case::TransverseCompressible | Case::ParallelCompressible
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::TransverseIncompressible => "transverse_incompressible",
            Case::TransverseCompressible => "transverse_compressible",
            Case::ParallelIncompressible => "parallel_incompressible",
            Case::ParallelCompressible => "parallel_compressible",
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Unknown layout of a pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofLayout {
    /// One scalar unknown per node (u2 eliminated as -u1_x / k).
    ScalarU1,
    /// Stacked [u1; u2], two unknowns per node.
    PairU1U2,
}

/// Assembled pencil lambda^2 M u = A u for one case and wave number.
#[derive(Debug, Clone)]
pub struct ModeProblem {
    pub case: Case,
    pub k: u32,
    /// Stiffness, from the quadratic form -F - G + H. Symmetric exactly.
    pub a: DMatrix<f64>,
    /// Weighted inner product. Symmetric positive definite.
    pub m: DMatrix<f64>,
    pub dof: DofLayout,
    pub grid: Grid,
    /// Factor-1 leapfrog stability limit on dt for this pencil.
    pub cfl_dt_limit: f64,
}

impl ModeProblem {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Row-major CSV dump with a `case,k,n,bc,matrix` header.
    pub fn write_matrix_csv<W: Write>(&self, mut out: W, which: MatrixSide) -> std::io::Result<()> {
        let m = match which {
            MatrixSide::Stiffness => &self.a,
            MatrixSide::Mass => &self.m,
        };
        writeln!(out, "case,k,n,bc,matrix")?;
        writeln!(
            out,
            "{},{},{},{},{}",
            self.case,
            self.k,
            self.grid.n(),
            match self.grid.bc() {
                BoundaryCondition::Periodic => "periodic",
                BoundaryCondition::Free => "free",
            },
            match which {
                MatrixSide::Stiffness => "a",
                MatrixSide::Mass => "m",
            }
        )?;
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| crate::fmt_g17(m[(i, j)])).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixSide {
    Stiffness,
    Mass,
}

/// Derivative order selector for [`diff_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    First,
    Second,
    Fourth,
}

/// Centered second-order-accurate difference matrix for d/dx, d2/dx2 or
/// d4/dx4, honoring the grid boundary condition (periodic wrap or one-sided
/// second-order closures at free ends). The fourth-derivative matrix on a
/// free grid is the square of the second-derivative matrix.
pub fn diff_matrix(grid: &Grid, order: DiffOrder) -> DMatrix<f64> {
    let n = grid.n();
    let h = grid.spacing();
    let mut d = DMatrix::zeros(n, n);
    match order {
        DiffOrder::First => {
            let c = 1.0 / (2.0 * h);
            match grid.bc() {
                BoundaryCondition::Periodic => {
                    for i in 0..n {
                        d[(i, (i + 1) % n)] += c;
                        d[(i, (i + n - 1) % n)] -= c;
                    }
                }
                BoundaryCondition::Free => {
                    d[(0, 0)] = -3.0 * c;
                    d[(0, 1)] = 4.0 * c;
                    d[(0, 2)] = -c;
                    for i in 1..n - 1 {
                        d[(i, i + 1)] = c;
                        d[(i, i - 1)] = -c;
                    }
                    d[(n - 1, n - 1)] = 3.0 * c;
                    d[(n - 1, n - 2)] = -4.0 * c;
                    d[(n - 1, n - 3)] = c;
                }
            }
        }
        DiffOrder::Second => {
            let c = 1.0 / (h * h);
            match grid.bc() {
                BoundaryCondition::Periodic => {
                    for i in 0..n {
                        d[(i, i)] = -2.0 * c;
                        d[(i, (i + 1) % n)] += c;
                        d[(i, (i + n - 1) % n)] += c;
                    }
                }
                BoundaryCondition::Free => {
                    for (j, v) in [(0usize, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)] {
                        d[(0, j)] = v * c;
                        d[(n - 1, n - 1 - j)] = v * c;
                    }
                    for i in 1..n - 1 {
                        d[(i, i)] = -2.0 * c;
                        d[(i, i + 1)] = c;
                        d[(i, i - 1)] = c;
                    }
                }
            }
        }
        DiffOrder::Fourth => match grid.bc() {
            BoundaryCondition::Periodic => {
                let c = 1.0 / (h * h * h * h);
                for i in 0..n {
                    d[(i, i)] = 6.0 * c;
                    d[(i, (i + 1) % n)] += -4.0 * c;
                    d[(i, (i + n - 1) % n)] += -4.0 * c;
                    d[(i, (i + 2) % n)] += c;
                    d[(i, (i + n - 2) % n)] += c;
                }
            }
            BoundaryCondition::Free => {
                let d2 = diff_matrix(grid, DiffOrder::Second);
                d = &d2 * &d2;
            }
        },
    }
    d
}

/// Sparse row list (column, coefficient) of a linear map whose weighted Gram
/// matrix is accumulated into a pencil.
struct RowForm {
    rows: Vec<Vec<(usize, f64)>>,
    weights: Vec<f64>,
}

impl RowForm {
    fn new() -> Self {
        RowForm {
            rows: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<(usize, f64)>, weight: f64) {
        self.rows.push(row);
        self.weights.push(weight);
    }

    /// a += sign * X^T diag(w) X, writing (i, j) and (j, i) from the same
    /// product so the accumulated matrix is symmetric exactly.
    fn accumulate(&self, a: &mut DMatrix<f64>, sign: f64) {
        for (row, &w) in self.rows.iter().zip(&self.weights) {
            let sw = sign * w;
            for p in 0..row.len() {
                let (ci, xi) = row[p];
                a[(ci, ci)] += sw * xi * xi;
                for &(cj, xj) in &row[p + 1..] {
                    let v = sw * xi * xj;
                    a[(ci, cj)] += v;
                    a[(cj, ci)] += v;
                }
            }
        }
    }
}

/// Rows of the staggered two-point derivative: one row per cell midpoint,
/// weighted by h times the midpoint average of `coef`.
fn staggered_derivative_rows(grid: &Grid, coef: &[f64], col_offset: usize) -> RowForm {
    let n = grid.n();
    let h = grid.spacing();
    let inv_h = 1.0 / h;
    let mut form = RowForm::new();
    match grid.bc() {
        BoundaryCondition::Periodic => {
            for i in 0..n {
                let j = (i + 1) % n;
                let c_mid = 0.5 * (coef[i] + coef[j]);
                form.push(
                    vec![(col_offset + i, -inv_h), (col_offset + j, inv_h)],
                    h * c_mid,
                );
            }
        }
        BoundaryCondition::Free => {
            for i in 0..n - 1 {
                let c_mid = 0.5 * (coef[i] + coef[i + 1]);
                form.push(
                    vec![(col_offset + i, -inv_h), (col_offset + i + 1, inv_h)],
                    h * c_mid,
                );
            }
        }
    }
    form
}

/// Rows of a nodal dense-stencil matrix (e.g. centered D1 or D2), weighted by
/// the quadrature weight times `coef` at each node; `extra` appends
/// additional (column, value) entries per node row.
fn nodal_matrix_rows(
    grid: &Grid,
    mat: &DMatrix<f64>,
    coef: &[f64],
    col_offset: usize,
    extra: impl Fn(usize) -> Vec<(usize, f64)>,
) -> RowForm {
    let n = grid.n();
    let w = grid.weights();
    let mut form = RowForm::new();
    for i in 0..n {
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(6);
        for j in 0..n {
            let v = mat[(i, j)];
            if v != 0.0 {
                row.push((col_offset + j, v));
            }
        }
        row.extend(extra(i));
        form.push(row, w[i] * coef[i]);
    }
    form
}

fn diagonal_add(a: &mut DMatrix<f64>, grid: &Grid, coef: &[f64], offset: usize) {
    for (i, (&w, &c)) in grid.weights().iter().zip(coef).enumerate() {
        a[(offset + i, offset + i)] += w * c;
    }
}

fn require_orientation(case: Case, profile: &Profile) -> Result<()> {
    if profile.orientation() != case.orientation() {
        return Err(Error::CaseMismatch {
            case,
            required: case.orientation(),
        });
    }
    Ok(())
}

fn require_wave_number(k: u32) -> Result<()> {
    if k < 1 {
        return Err(Error::WaveNumber { k });
    }
    Ok(())
}

fn require_gamma(profile: &Profile) -> Result<()> {
    if !(profile.gamma() > 1.0) {
        return Err(Error::GammaRange {
            gamma: profile.gamma(),
        });
    }
    Ok(())
}

/// Largest |g rho0x| / rho0 over the nodes, a pointwise bound on both ends of
/// the incompressible case-1 spectrum.
fn rate_bound(profile: &Profile) -> f64 {
    profile
        .rho0x()
        .iter()
        .zip(profile.rho0())
        .map(|(rx, r)| (profile.g() * rx / r).abs())
        .fold(0.0, f64::max)
}

fn incompressible_mass(profile: &Profile, k: u32) -> DMatrix<f64> {
    let grid = profile.grid();
    let n = grid.n();
    let mut m = DMatrix::zeros(n, n);
    diagonal_add(&mut m, grid, profile.rho0(), 0);
    let k2 = (k as f64) * (k as f64);
    let stag = staggered_derivative_rows(grid, profile.rho0(), 0);
    stag.accumulate(&mut m, 1.0 / k2);
    m
}

/// Transverse incompressible pencil: A from -g rho0x u^2, M from
/// rho0 (u^2 + u_x^2 / k^2). Independent of B0.
pub fn assemble_case1(profile: &Profile, k: u32) -> Result<ModeProblem> {
    require_orientation(Case::TransverseIncompressible, profile)?;
    require_wave_number(k)?;
    let grid = profile.grid();
    let n = grid.n();
    let g = profile.g();
    let mut a = DMatrix::zeros(n, n);
    let coef: Vec<f64> = profile.rho0x().iter().map(|rx| -g * rx).collect();
    diagonal_add(&mut a, grid, &coef, 0);
    let m = incompressible_mass(profile, k);
    let h = grid.spacing();
    let c_max = (rate_bound(profile).sqrt() * h * k as f64).max(h);
    Ok(ModeProblem {
        case: Case::TransverseIncompressible,
        k,
        a,
        m,
        dof: DofLayout::ScalarU1,
        grid: grid.clone(),
        cfl_dt_limit: h / c_max,
    })
}

/// Transverse compressible pencil over stacked [u1; u2]:
/// -G with G = (gamma p0 + B0^2) (u1_x + k u2 + g rho0 u1 / (gamma p0 + B0^2))^2,
/// +H with H = (g^2 rho0^2 / (gamma p0 + B0^2) - g rho0x) u1^2,
/// M from rho0 (u1^2 + u2^2).
pub fn assemble_case2(profile: &Profile, k: u32) -> Result<ModeProblem> {
    require_orientation(Case::TransverseCompressible, profile)?;
    require_wave_number(k)?;
    require_gamma(profile)?;
    let grid = profile.grid();
    let n = grid.n();
    let g = profile.g();
    let c = profile.gamma_p0_plus_b0_sq();
    let rho = profile.rho0();

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    let d1 = diff_matrix(grid, DiffOrder::First);
    let kf = k as f64;
    let alpha: Vec<f64> = rho.iter().zip(&c).map(|(r, ci)| g * r / ci).collect();
    let g_rows = nodal_matrix_rows(grid, &d1, &c, 0, |i| vec![(i, alpha[i]), (n + i, kf)]);
    g_rows.accumulate(&mut a, -1.0);
    let h_coef: Vec<f64> = (0..n)
        .map(|i| g * g * rho[i] * rho[i] / c[i] - g * profile.rho0x()[i])
        .collect();
    diagonal_add(&mut a, grid, &h_coef, 0);

    let mut m = DMatrix::zeros(2 * n, 2 * n);
    diagonal_add(&mut m, grid, rho, 0);
    diagonal_add(&mut m, grid, rho, n);

    Ok(ModeProblem {
        case: Case::TransverseCompressible,
        k,
        a,
        m,
        dof: DofLayout::PairU1U2,
        grid: grid.clone(),
        cfl_dt_limit: compressible_cfl(profile, k, &c, &h_coef),
    })
}

fn compressible_cfl(profile: &Profile, k: u32, c: &[f64], h_coef: &[f64]) -> f64 {
    let grid = profile.grid();
    let h = grid.spacing();
    let c_fast = c
        .iter()
        .zip(profile.rho0())
        .map(|(ci, r)| (ci / r).sqrt())
        .fold(0.0, f64::max);
    let rate = h_coef
        .iter()
        .zip(profile.rho0())
        .map(|(hc, r)| (hc / r).max(0.0))
        .fold(0.0, f64::max)
        .sqrt();
    let kf = k as f64;
    let c_max = (c_fast * (1.0 + kf * h / PI)).max(rate * h * kf).max(h);
    h / c_max
}

/// Parallel incompressible pencil:
/// A from -B0^2 u_xx^2 / k^2 - g rho0x u^2 - B0^2 u_x^2, M as in case 1.
/// Reduces entrywise to the case-1 pencil at B0 = 0.
pub fn assemble_case3(profile: &Profile, k: u32) -> Result<ModeProblem> {
    require_orientation(Case::ParallelIncompressible, profile)?;
    require_wave_number(k)?;
    let grid = profile.grid();
    let n = grid.n();
    let g = profile.g();
    let b0_sq: Vec<f64> = profile.b0().iter().map(|b| b * b).collect();
    let k2 = (k as f64) * (k as f64);

    let mut a = DMatrix::zeros(n, n);
    let coef: Vec<f64> = profile.rho0x().iter().map(|rx| -g * rx).collect();
    diagonal_add(&mut a, grid, &coef, 0);
    if b0_sq.iter().any(|&b| b != 0.0) {
        let d2 = diff_matrix(grid, DiffOrder::Second);
        let f_rows = nodal_matrix_rows(grid, &d2, &b0_sq, 0, |_| Vec::new());
        f_rows.accumulate(&mut a, -1.0 / k2);
        let stag = staggered_derivative_rows(grid, &b0_sq, 0);
        stag.accumulate(&mut a, -1.0);
    }
    let m = incompressible_mass(profile, k);

    let h = grid.spacing();
    let c_alfven = b0_sq
        .iter()
        .zip(profile.rho0())
        .map(|(b2, r)| (b2 / r).sqrt())
        .fold(0.0, f64::max);
    let c_max = c_alfven
        .max(rate_bound(profile).sqrt() * h * k as f64)
        .max(h);
    Ok(ModeProblem {
        case: Case::ParallelIncompressible,
        k,
        a,
        m,
        dof: DofLayout::ScalarU1,
        grid: grid.clone(),
        cfl_dt_limit: h / c_max,
    })
}

/// Parallel compressible pencil over stacked [u1; u2]:
/// -F with F = B0^2 u2_x^2,
/// -G with G = (gamma p0 + B0^2) [gamma p0 u1_x / (gamma p0 + B0^2)
///             + g rho0 u1 / (gamma p0 + B0^2) + k u2]^2,
/// +H with H = -B0^2 (g rho0 u1 + gamma p0 u1_x)^2 / ((gamma p0 + B0^2) gamma p0),
/// M from rho0 (u1^2 + u2^2). Every term is nonpositive.
pub fn assemble_case4(profile: &Profile, k: u32) -> Result<ModeProblem> {
    require_orientation(Case::ParallelCompressible, profile)?;
    require_wave_number(k)?;
    require_gamma(profile)?;
    let grid = profile.grid();
    let n = grid.n();
    let g = profile.g();
    let gamma = profile.gamma();
    let c = profile.gamma_p0_plus_b0_sq();
    let rho = profile.rho0();
    let p0 = profile.p0();
    let b0_sq: Vec<f64> = profile.b0().iter().map(|b| b * b).collect();
    let kf = k as f64;
    let d1 = diff_matrix(grid, DiffOrder::First);

    let mut a = DMatrix::zeros(2 * n, 2 * n);

    // F acts on u2 alone.
    let f_rows = nodal_matrix_rows(grid, &d1, &b0_sq, n, |_| Vec::new());
    f_rows.accumulate(&mut a, -1.0);

    // G: scaled-derivative bracket, weight (gamma p0 + B0^2).
    let gp_over_c: Vec<f64> = p0.iter().zip(&c).map(|(p, ci)| gamma * p / ci).collect();
    let mut d1_scaled = d1.clone();
    for i in 0..n {
        for j in 0..n {
            d1_scaled[(i, j)] *= gp_over_c[i];
        }
    }
    let alpha: Vec<f64> = rho.iter().zip(&c).map(|(r, ci)| g * r / ci).collect();
    let g_rows = nodal_matrix_rows(grid, &d1_scaled, &c, 0, |i| {
        vec![(i, alpha[i]), (n + i, kf)]
    });
    g_rows.accumulate(&mut a, -1.0);

    // H: (g rho0 u1 + gamma p0 u1_x)^2 with weight B0^2 / ((gamma p0 + B0^2) gamma p0).
    let mut d1_gp = d1.clone();
    for i in 0..n {
        for j in 0..n {
            d1_gp[(i, j)] *= gamma * p0[i];
        }
    }
    let h_weight: Vec<f64> = (0..n).map(|i| b0_sq[i] / (c[i] * gamma * p0[i])).collect();
    let h_rows = nodal_matrix_rows(grid, &d1_gp, &h_weight, 0, |i| vec![(i, g * rho[i])]);
    h_rows.accumulate(&mut a, -1.0);

    let mut m = DMatrix::zeros(2 * n, 2 * n);
    diagonal_add(&mut m, grid, rho, 0);
    diagonal_add(&mut m, grid, rho, n);

    let zero_rate = vec![0.0; n];
    Ok(ModeProblem {
        case: Case::ParallelCompressible,
        k,
        a,
        m,
        dof: DofLayout::PairU1U2,
        grid: grid.clone(),
        cfl_dt_limit: compressible_cfl(profile, k, &c, &zero_rate),
    })
}

/// 1D pencil whose principal eigenvalue is the case-3 spectral radius:
/// lambda^2 rho0 v = -g rho0x v + B0^2 v_xx, i.e. the y-independent reduction
/// of the parallel-incompressible sup.
pub fn assemble_case3_lambda_pencil(profile: &Profile) -> Result<ModeProblem> {
    require_orientation(Case::ParallelIncompressible, profile)?;
    let grid = profile.grid();
    let n = grid.n();
    let g = profile.g();
    let b0_sq: Vec<f64> = profile.b0().iter().map(|b| b * b).collect();
    let mut a = DMatrix::zeros(n, n);
    let coef: Vec<f64> = profile.rho0x().iter().map(|rx| -g * rx).collect();
    diagonal_add(&mut a, grid, &coef, 0);
    let stag = staggered_derivative_rows(grid, &b0_sq, 0);
    stag.accumulate(&mut a, -1.0);
    let mut m = DMatrix::zeros(n, n);
    diagonal_add(&mut m, grid, profile.rho0(), 0);
    Ok(ModeProblem {
        case: Case::ParallelIncompressible,
        k: 0,
        a,
        m,
        dof: DofLayout::ScalarU1,
        grid: grid.clone(),
        cfl_dt_limit: grid.spacing(),
    })
}

/// 1D pencil whose principal eigenvalue is the case-4 spectral radius:
/// sup of -B0^2 (g rho0 v + gamma p0 v_x)^2 / ((gamma p0 + B0^2) gamma p0)
/// against rho0 v^2.
pub fn assemble_case4_lambda_pencil(profile: &Profile) -> Result<ModeProblem> {
    require_orientation(Case::ParallelCompressible, profile)?;
    require_gamma(profile)?;
    let grid = profile.grid();
    let n = grid.n();
    let g = profile.g();
    let gamma = profile.gamma();
    let c = profile.gamma_p0_plus_b0_sq();
    let rho = profile.rho0();
    let p0 = profile.p0();
    let b0_sq: Vec<f64> = profile.b0().iter().map(|b| b * b).collect();
    let d1 = diff_matrix(grid, DiffOrder::First);
    let mut d1_gp = d1;
    for i in 0..n {
        for j in 0..n {
            d1_gp[(i, j)] *= gamma * p0[i];
        }
    }
    let weight: Vec<f64> = (0..n).map(|i| b0_sq[i] / (c[i] * gamma * p0[i])).collect();
    let mut a = DMatrix::zeros(n, n);
    let rows = nodal_matrix_rows(grid, &d1_gp, &weight, 0, |i| vec![(i, g * rho[i])]);
    rows.accumulate(&mut a, -1.0);
    let mut m = DMatrix::zeros(n, n);
    diagonal_add(&mut m, grid, rho, 0);
    Ok(ModeProblem {
        case: Case::ParallelCompressible,
        k: 0,
        a,
        m,
        dof: DofLayout::ScalarU1,
        grid: grid.clone(),
        cfl_dt_limit: grid.spacing(),
    })
}

/// Dispatch to the per-case assembler.
pub fn assemble_case(profile: &Profile, case: Case, k: u32) -> Result<ModeProblem> {
    match case {
        Case::TransverseIncompressible => assemble_case1(profile, k),
        Case::TransverseCompressible => assemble_case2(profile, k),
        Case::ParallelIncompressible => assemble_case3(profile, k),
        Case::ParallelCompressible => assemble_case4(profile, k),
    }
}

/// (u^T A u) / (u^T M u).
pub fn rayleigh_quotient(problem: &ModeProblem, u: &DVector<f64>) -> Result<f64> {
    if u.len() != problem.dim() {
        return Err(Error::SizeMismatch {
            expected: problem.dim(),
            got: u.len(),
        });
    }
    if u.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let num = u.dot(&(&problem.a * u));
    let den = u.dot(&(&problem.m * u));
    Ok(num / den)
}
