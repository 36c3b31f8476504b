//! Steady-state backgrounds (rho0, p0, B0) in magnetohydrostatic balance.
//!
//! Two constructions are exposed. `Balanced` takes the density from the
//! profile shape and integrates the pressure from d/dx(p0 + B0^2/2) = rho0*g,
//! ignoring the isentropic closure for the background. `Isentropic` solves
//! C*gamma*rho^(gamma-1)*rho' + B0*B0' = rho*g for the density by RK4 and sets
//! p0 = C*rho0^gamma, so the closure holds exactly.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, Grid};
use crate::operators::FieldOrientation;

/// Default lower bound enforced on the constructed density.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-6;

/// Shape of the density profile (and its analytic derivative where possible).
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// rho0(x) = rho0_at_0 + slope * x
    Linear { rho0_at_0: f64, slope: f64 },
    /// rho0(x) = amplitude * exp(rate * x)
    Exponential { amplitude: f64, rate: f64 },
    /// rho0(x) = base + amplitude * tanh((x - location) / width)
    TanhInterface {
        base: f64,
        amplitude: f64,
        width: f64,
        location: f64,
    },
    /// Nodal values; derivatives fall back to centered differences.
    Table { values: Vec<f64> },
}

/// How the pressure (or the density) is produced from the shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Construction {
    /// p0 integrated from the balance starting at p0(0).
    Balanced { p0_at_0: f64 },
    /// rho0 solved from the isentropic balance ODE starting at rho0(0),
    /// p0 = closure_c * rho0^gamma.
    Isentropic { closure_c: f64, rho0_at_0: f64 },
}

/// Profile shape plus construction mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub construction: Construction,
}

/// Sampled steady state on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    rho0: Vec<f64>,
    rho0x: Vec<f64>,
    p0: Vec<f64>,
    p0x: Vec<f64>,
    b0: Vec<f64>,
    b0x: Vec<f64>,
    g: f64,
    gamma: f64,
    closure_c: f64,
    orientation: FieldOrientation,
    floor: f64,
}

impl Profile {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn rho0(&self) -> &[f64] {
        &self.rho0
    }
    pub fn rho0x(&self) -> &[f64] {
        &self.rho0x
    }
    pub fn p0(&self) -> &[f64] {
        &self.p0
    }
    pub fn p0x(&self) -> &[f64] {
        &self.p0x
    }
    pub fn b0(&self) -> &[f64] {
        &self.b0
    }
    pub fn b0x(&self) -> &[f64] {
        &self.b0x
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn closure_c(&self) -> f64 {
        self.closure_c
    }
    pub fn orientation(&self) -> FieldOrientation {
        self.orientation
    }
    pub fn density_floor(&self) -> f64 {
        self.floor
    }

    /// gamma*p0 + B0^2 per node, the magnetosonic stiffness of the
    /// compressible quadratic forms.
    pub fn gamma_p0_plus_b0_sq(&self) -> Vec<f64> {
        self.p0
            .iter()
            .zip(&self.b0)
            .map(|(p, b)| self.gamma * p + b * b)
            .collect()
    }

    /// Assemble a profile from raw nodal data, enforcing the invariants.
    ///
    /// This is the escape hatch for backgrounds the built-in shapes cannot
    /// express (e.g. a transverse B0 that varies with x).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        grid: Grid,
        rho0: Vec<f64>,
        rho0x: Vec<f64>,
        p0: Vec<f64>,
        p0x: Vec<f64>,
        b0: Vec<f64>,
        b0x: Vec<f64>,
        g: f64,
        gamma: f64,
        closure_c: f64,
        orientation: FieldOrientation,
        floor: f64,
    ) -> Result<Profile> {
        let n = grid.n();
        for field in [&rho0, &rho0x, &p0, &p0x, &b0, &b0x] {
            if field.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: field.len(),
                });
            }
        }
        let profile = Profile {
            grid,
            rho0,
            rho0x,
            p0,
            p0x,
            b0,
            b0x,
            g,
            gamma,
            closure_c,
            orientation,
            floor,
        };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<()> {
        let min_rho = self.rho0.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min_rho >= self.floor) {
            return Err(Error::DensityFloor {
                min_rho,
                floor: self.floor,
            });
        }
        if let Some(i) = self.p0.iter().position(|&p| !(p > 0.0)) {
            return Err(Error::NonpositivePressure {
                p0: self.p0[i],
                x: self.grid.nodes()[i],
            });
        }
        if self.orientation == FieldOrientation::Parallel {
            let b_first = self.b0[0];
            let constant =
                self.b0.iter().all(|&b| b == b_first) && self.b0x.iter().all(|&d| d == 0.0);
            if !constant {
                return Err(Error::CaseMismatch {
                    case: crate::operators::Case::ParallelIncompressible,
                    required: FieldOrientation::Parallel,
                });
            }
        }
        Ok(())
    }

    /// CSV dump with header `x,rho0,rho0x,p0,p0x,b0,b0x`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,rho0,rho0x,p0,p0x,b0,b0x")?;
        for i in 0..self.grid.n() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                crate::fmt_g17(self.grid.nodes()[i]),
                crate::fmt_g17(self.rho0[i]),
                crate::fmt_g17(self.rho0x[i]),
                crate::fmt_g17(self.p0[i]),
                crate::fmt_g17(self.p0x[i]),
                crate::fmt_g17(self.b0[i]),
                crate::fmt_g17(self.b0x[i]),
            )?;
        }
        Ok(())
    }
}

impl ProfileKind {
    fn sample(&self, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
        let xs = grid.nodes();
        match self {
            ProfileKind::Linear { rho0_at_0, slope } => Ok((
                xs.iter().map(|x| rho0_at_0 + slope * x).collect(),
                vec![*slope; xs.len()],
            )),
            ProfileKind::Exponential { amplitude, rate } => {
                let rho: Vec<f64> = xs.iter().map(|x| amplitude * (rate * x).exp()).collect();
                let rhox = rho.iter().map(|r| rate * r).collect();
                Ok((rho, rhox))
            }
            ProfileKind::TanhInterface {
                base,
                amplitude,
                width,
                location,
            } => {
                let rho: Vec<f64> = xs
                    .iter()
                    .map(|x| base + amplitude * ((x - location) / width).tanh())
                    .collect();
                let rhox = xs
                    .iter()
                    .map(|x| {
                        let c = ((x - location) / width).cosh();
                        amplitude / (width * c * c)
                    })
                    .collect();
                Ok((rho, rhox))
            }
            ProfileKind::Table { values } => {
                if values.len() != grid.n() {
                    return Err(Error::TableLength {
                        expected: grid.n(),
                        got: values.len(),
                    });
                }
                let rhox = centered_derivative(values, grid);
                Ok((values.clone(), rhox))
            }
        }
    }
}

/// Centered differences of nodal data, one-sided second-order at free ends.
pub(crate) fn centered_derivative(values: &[f64], grid: &Grid) -> Vec<f64> {
    let n = values.len();
    let h = grid.spacing();
    let mut d = vec![0.0; n];
    match grid.bc() {
        BoundaryCondition::Periodic => {
            for i in 0..n {
                let ip = (i + 1) % n;
                let im = (i + n - 1) % n;
                d[i] = (values[ip] - values[im]) / (2.0 * h);
            }
        }
        BoundaryCondition::Free => {
            d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
            for i in 1..n - 1 {
                d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
            }
            d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
        }
    }
    d
}

/// Construct a steady state on `grid`.
///
/// `b0_amplitude` is the (constant) magnitude of the background field; use
/// [`Profile::from_parts`] for an x-dependent transverse field.
pub fn make_profile(
    spec: &ProfileSpec,
    grid: &Grid,
    g: f64,
    gamma: f64,
    b0_amplitude: f64,
    orientation: FieldOrientation,
) -> Result<Profile> {
    make_profile_with_floor(
        spec,
        grid,
        g,
        gamma,
        b0_amplitude,
        orientation,
        DEFAULT_DENSITY_FLOOR,
    )
}

pub fn make_profile_with_floor(
    spec: &ProfileSpec,
    grid: &Grid,
    g: f64,
    gamma: f64,
    b0_amplitude: f64,
    orientation: FieldOrientation,
    floor: f64,
) -> Result<Profile> {
    let n = grid.n();
    let b0 = vec![b0_amplitude; n];
    let b0x = vec![0.0; n];

    let (rho0, rho0x, p0, p0x, closure_c) = match spec.construction {
        Construction::Balanced { p0_at_0 } => {
            let (rho0, rho0x) = spec.kind.sample(grid)?;
            // p0x from the balance; B0 constant here so the magnetic term drops.
            let p0x: Vec<f64> = rho0.iter().map(|r| r * g).collect();
            let p0 = cumulative_trapezoid(&p0x, grid, p0_at_0);
            (rho0, rho0x, p0, p0x, 1.0)
        }
        Construction::Isentropic {
            closure_c,
            rho0_at_0,
        } => {
            if !(gamma > 1.0) {
                return Err(Error::GammaRange { gamma });
            }
            let rho0 = integrate_isentropic_density(grid, rho0_at_0, g, gamma, closure_c, floor)?;
            // rho' = g * rho^(2-gamma) / (C*gamma); p0x = rho*g from the balance.
            let rho0x: Vec<f64> = rho0
                .iter()
                .map(|r| g * r.powf(2.0 - gamma) / (closure_c * gamma))
                .collect();
            let p0: Vec<f64> = rho0.iter().map(|r| closure_c * r.powf(gamma)).collect();
            let p0x: Vec<f64> = rho0.iter().map(|r| r * g).collect();
            (rho0, rho0x, p0, p0x, closure_c)
        }
    };

    Profile::from_parts(
        grid.clone(),
        rho0,
        rho0x,
        p0,
        p0x,
        b0,
        b0x,
        g,
        gamma,
        closure_c,
        orientation,
        floor,
    )
}

/// Balanced construction with an x-dependent transverse field supplied as a
/// nodal table; p0 integrates rho0 g - B0 B0x with B0x from centered
/// differences.
pub fn make_profile_with_b0_table(
    kind: &ProfileKind,
    grid: &Grid,
    g: f64,
    gamma: f64,
    b0: Vec<f64>,
    p0_at_0: f64,
) -> Result<Profile> {
    if b0.len() != grid.n() {
        return Err(Error::TableLength {
            expected: grid.n(),
            got: b0.len(),
        });
    }
    let (rho0, rho0x) = kind.sample(grid)?;
    let b0x = centered_derivative(&b0, grid);
    let p0x: Vec<f64> = (0..grid.n())
        .map(|i| rho0[i] * g - b0[i] * b0x[i])
        .collect();
    let p0 = cumulative_trapezoid(&p0x, grid, p0_at_0);
    Profile::from_parts(
        grid.clone(),
        rho0,
        rho0x,
        p0,
        p0x,
        b0,
        b0x,
        g,
        gamma,
        1.0,
        FieldOrientation::Transverse,
        DEFAULT_DENSITY_FLOOR,
    )
}

fn cumulative_trapezoid(f: &[f64], grid: &Grid, start: f64) -> Vec<f64> {
    let h = grid.spacing();
    let mut out = vec![0.0; f.len()];
    out[0] = start;
    for i in 1..f.len() {
        out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * h;
    }
    out
}

/// RK4 on rho' = (rho*g) / (C*gamma*rho^(gamma-1)), one step per grid interval.
fn integrate_isentropic_density(
    grid: &Grid,
    rho_at_0: f64,
    g: f64,
    gamma: f64,
    closure_c: f64,
    floor: f64,
) -> Result<Vec<f64>> {
    let h = grid.spacing();
    let slope = |rho: f64| -> f64 { g * rho.powf(2.0 - gamma) / (closure_c * gamma) };
    let n = grid.n();
    let mut rho = vec![0.0; n];
    rho[0] = rho_at_0;
    for i in 1..n {
        let y = rho[i - 1];
        if y <= floor {
            return Err(Error::DensityFloor { min_rho: y, floor });
        }
        let k1 = slope(y);
        let k2 = slope(y + 0.5 * h * k1);
        let k3 = slope(y + 0.5 * h * k2);
        let k4 = slope(y + h * k3);
        rho[i] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(rho)
}

/// Max over interior nodes of |d/dx(p0 + B0^2/2) - rho0*g| using centered
/// differences of the stored fields.
pub fn validate_steady_state(profile: &Profile) -> f64 {
    let grid = profile.grid();
    let n = grid.n();
    let total: Vec<f64> = profile
        .p0
        .iter()
        .zip(&profile.b0)
        .map(|(p, b)| p + 0.5 * b * b)
        .collect();
    let d = centered_derivative(&total, grid);
    let indices: Vec<usize> = match grid.bc() {
        BoundaryCondition::Periodic => (0..n).collect(),
        BoundaryCondition::Free => (1..n - 1).collect(),
    };
    indices
        .into_iter()
        .map(|i| (d[i] - profile.rho0[i] * profile.g).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use std::f64::consts::PI;

    fn linear_spec() -> ProfileSpec {
        ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 3.0,
                slope: -1.0 / PI,
            },
            construction: Construction::Balanced { p0_at_0: 10.0 },
        }
    }

    #[test]
    fn balanced_linear_matches_closed_form() {
        let grid = build_grid(257, BoundaryCondition::Free).unwrap();
        let p = make_profile(
            &linear_spec(),
            &grid,
            1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap();
        for (i, &x) in grid.nodes().iter().enumerate() {
            let exact = 10.0 + 3.0 * x - x * x / (2.0 * PI);
            assert!((p.p0()[i] - exact).abs() < 1e-12, "node {i}");
            assert_eq!(p.rho0x()[i], -1.0 / PI);
        }
    }

    #[test]
    fn balanced_constant_profile() {
        let grid = build_grid(65, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 1.0,
                slope: 0.0,
            },
            construction: Construction::Balanced { p0_at_0: 1.0 },
        };
        let p = make_profile(
            &spec,
            &grid,
            1.0,
            5.0 / 3.0,
            1.0,
            FieldOrientation::Transverse,
        )
        .unwrap();
        for (i, &x) in grid.nodes().iter().enumerate() {
            assert!((p.p0()[i] - (1.0 + x)).abs() < 1e-12);
        }
    }

    #[test]
    fn isentropic_matches_separable_solution() {
        // C=1, gamma=2, g=1, B0=0: 2*rho*rho' = rho, rho = 1 + x/2.
        let grid = build_grid(129, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 1.0,
                slope: 0.0,
            },
            construction: Construction::Isentropic {
                closure_c: 1.0,
                rho0_at_0: 1.0,
            },
        };
        let p = make_profile(&spec, &grid, 1.0, 2.0, 0.0, FieldOrientation::Transverse).unwrap();
        for (i, &x) in grid.nodes().iter().enumerate() {
            assert!((p.rho0()[i] - (1.0 + 0.5 * x)).abs() < 1e-8, "node {i}");
        }
    }

    #[test]
    fn isentropic_closure_holds_exactly() {
        let grid = build_grid(128, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 1.0,
                slope: 0.0,
            },
            construction: Construction::Isentropic {
                closure_c: 0.7,
                rho0_at_0: 1.3,
            },
        };
        let p = make_profile(&spec, &grid, 1.0, 1.4, 0.0, FieldOrientation::Transverse).unwrap();
        for i in 0..grid.n() {
            let closure = p.closure_c() * p.rho0()[i].powf(p.gamma());
            assert!((p.p0()[i] - closure).abs() <= 1e-10 * closure.abs());
        }
    }

    #[test]
    fn density_floor_is_enforced() {
        let grid = build_grid(64, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 1.0,
                slope: -1.0, // crosses zero before 2*pi
            },
            construction: Construction::Balanced { p0_at_0: 1.0 },
        };
        let err = make_profile(
            &spec,
            &grid,
            1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DensityFloor { .. }));
    }

    #[test]
    fn nonpositive_pressure_is_rejected() {
        let grid = build_grid(64, BoundaryCondition::Free).unwrap();
        // g < 0 drives the balanced pressure down from a small start.
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 1.0,
                slope: 0.0,
            },
            construction: Construction::Balanced { p0_at_0: 0.5 },
        };
        let err = make_profile(
            &spec,
            &grid,
            -1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonpositivePressure { .. }));
    }

    #[test]
    fn table_length_must_match() {
        let grid = build_grid(64, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Table {
                values: vec![1.0; 63],
            },
            construction: Construction::Balanced { p0_at_0: 1.0 },
        };
        let err = make_profile(
            &spec,
            &grid,
            1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::TableLength {
                expected: 64,
                got: 63
            }
        ));
    }

    #[test]
    fn parallel_orientation_requires_constant_field() {
        let grid = build_grid(16, BoundaryCondition::Free).unwrap();
        let n = grid.n();
        let err = Profile::from_parts(
            grid.clone(),
            vec![1.0; n],
            vec![0.0; n],
            vec![1.0; n],
            vec![0.0; n],
            grid.nodes().iter().map(|x| 1.0 + 0.1 * x).collect(),
            vec![0.1; n],
            1.0,
            2.0,
            1.0,
            FieldOrientation::Parallel,
            DEFAULT_DENSITY_FLOOR,
        )
        .unwrap_err();
        assert!(matches!(err, Error::CaseMismatch { .. }));
    }

    #[test]
    fn steady_state_residual_tiny_for_quadratic_pressure() {
        // Linear density gives a quadratic p0; centered differences are exact.
        let grid = build_grid(129, BoundaryCondition::Free).unwrap();
        let p = make_profile(
            &linear_spec(),
            &grid,
            1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap();
        assert!(validate_steady_state(&p) <= 1e-10);
    }

    #[test]
    fn steady_state_residual_detects_a_spike() {
        let grid = build_grid(129, BoundaryCondition::Free).unwrap();
        let p = make_profile(
            &linear_spec(),
            &grid,
            1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap();
        let mut p0 = p.p0().to_vec();
        p0[64] += 1.0;
        let spiked = Profile::from_parts(
            p.grid().clone(),
            p.rho0().to_vec(),
            p.rho0x().to_vec(),
            p0,
            p.p0x().to_vec(),
            p.b0().to_vec(),
            p.b0x().to_vec(),
            p.g(),
            p.gamma(),
            p.closure_c(),
            p.orientation(),
            p.density_floor(),
        )
        .unwrap();
        let expected = 1.0 / (2.0 * p.grid().spacing());
        let res = validate_steady_state(&spiked);
        assert!(
            (res - expected).abs() <= 1e-6 * expected,
            "res={res} expected={expected}"
        );
    }

    #[test]
    fn steady_state_residual_zero_without_gravity() {
        let grid = build_grid(64, BoundaryCondition::Periodic).unwrap();
        let n = grid.n();
        let p = Profile::from_parts(
            grid,
            vec![2.0; n],
            vec![0.0; n],
            vec![1.0; n],
            vec![0.0; n],
            vec![0.5; n],
            vec![0.0; n],
            0.0,
            2.0,
            1.0,
            FieldOrientation::Transverse,
            DEFAULT_DENSITY_FLOOR,
        )
        .unwrap();
        assert_eq!(validate_steady_state(&p), 0.0);
    }

    #[test]
    fn residual_converges_at_second_order() {
        // Smooth non-polynomial profile so the residual is pure truncation.
        let mut res = Vec::new();
        for n in [128usize, 256, 512] {
            let grid = build_grid(n + 1, BoundaryCondition::Free).unwrap();
            let spec = ProfileSpec {
                kind: ProfileKind::Exponential {
                    amplitude: 2.0,
                    rate: -0.2,
                },
                construction: Construction::Balanced { p0_at_0: 5.0 },
            };
            let p = make_profile(
                &spec,
                &grid,
                1.0,
                5.0 / 3.0,
                0.3,
                FieldOrientation::Transverse,
            )
            .unwrap();
            res.push(validate_steady_state(&p));
        }
        assert!(res[0] / res[1] >= 3.5, "ratios {:?}", res);
        assert!(res[1] / res[2] >= 3.5, "ratios {:?}", res);
    }

    #[test]
    fn csv_dump_has_header() {
        let grid = build_grid(8, BoundaryCondition::Free).unwrap();
        let p = make_profile(
            &linear_spec(),
            &grid,
            1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,rho0,rho0x,p0,p0x,b0,b0x\n"));
        assert_eq!(text.lines().count(), 9);
        assert!(!text.contains('\r'));
    }
}
