//! Generalized eigen solves, wave-number sweeps, the spectral radius
//! Lambda^2, and the instability criteria.
//!
//! The pencil A u = lambda^2 M u is reduced through the Cholesky factor of M
//! to a standard dense symmetric eigenproblem; the principal eigenvalue is
//! the algebraically largest. For the transverse cases the numerator of the
//! k -> infinity limit is derivative-free, so Lambda^2 is a pointwise scan
//! over nodes; the parallel cases keep u_x in the numerator and Lambda^2 is
//! the principal eigenvalue of a 1D pencil (the y-independent reduction,
//! which is exact because no y-derivative appears in the limiting form:
//! slices in y decouple, so the 2D sup equals the 1D sup).

use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::operators::{
    assemble_case, assemble_case3_lambda_pencil, assemble_case4_lambda_pencil, Case, ModeProblem,
};
use crate::profiles::Profile;

/// Default relative tolerance for declaring the k-sweep converged to Lambda^2.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 0.02;

/// Absolute floor used in the convergence-gap denominator when Lambda^2 is
/// at or near marginal stability.
pub const GAP_DENOMINATOR_FLOOR: f64 = 1e-10;

/// Principal eigenpair of one wave number.
#[derive(Debug, Clone)]
pub struct SpectrumEntry {
    pub k: u32,
    pub lambda_sq: f64,
    pub eigenvector: DVector<f64>,
}

/// Per-k principal eigenvalues with the computed spectral radius.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub case: Case,
    pub entries: Vec<SpectrumEntry>,
    pub capital_lambda_sq: f64,
    pub converged: bool,
    pub convergence_gap: f64,
    pub grid: Grid,
}

impl Spectrum {
    pub fn lambda_sq_at(&self, k: u32) -> Option<f64> {
        self.entries.iter().find(|e| e.k == k).map(|e| e.lambda_sq)
    }

    /// CSV emission: `k,lambda_k_sq,gap` rows plus a `Lambda_sq=` footer.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,lambda_k_sq,gap")?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{}",
                e.k,
                crate::fmt_g17(e.lambda_sq),
                crate::fmt_g17(self.capital_lambda_sq - e.lambda_sq)
            )?;
        }
        writeln!(out, "Lambda_sq={}", crate::fmt_g17(self.capital_lambda_sq))?;
        Ok(())
    }
}

/// Verdict of an instability criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub unstable: bool,
    /// Location where the criterion holds, when it does.
    pub witness_x: Option<f64>,
    /// Value of the criterion expression at the witness (case 3: the
    /// integral criterion itself).
    pub margin: f64,
}

/// Largest eigenvalue of A u = lambda^2 M u with an M-normalized eigenvector
/// (u^T M u = 1), by Cholesky reduction to a dense symmetric eigenproblem.
pub fn solve_principal(problem: &ModeProblem) -> Result<(f64, DVector<f64>)> {
    let chol = problem.m.clone().cholesky().ok_or(Error::Definiteness)?;
    let l = chol.l();
    // C = L^-1 A L^-T via two triangular solves.
    let y = l
        .solve_lower_triangular(&problem.a)
        .ok_or(Error::Definiteness)?;
    let z = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(Error::Definiteness)?;
    // z is symmetric in exact arithmetic; average away roundoff skew.
    let c = (&z + z.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let (mut idx, mut best) = (0usize, f64::NEG_INFINITY);
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v > best {
            best = v;
            idx = i;
        }
    }
    let y_vec = eig.eigenvectors.column(idx).into_owned();
    let mut u = l
        .transpose()
        .solve_upper_triangular(&y_vec)
        .ok_or(Error::Definiteness)?;
    let norm = u.dot(&(&problem.m * &u)).sqrt();
    u /= norm;
    // Deterministic sign: largest-magnitude entry is positive.
    let (mut imax, mut vmax) = (0usize, 0.0f64);
    for (i, &v) in u.iter().enumerate() {
        if v.abs() > vmax {
            vmax = v.abs();
            imax = i;
        }
    }
    if u[imax] < 0.0 {
        u = -u;
    }
    Ok((best, u))
}

/// Backward-error residual max|A u - lambda^2 M u| of a solved eigenpair.
pub fn principal_residual(problem: &ModeProblem, lambda_sq: f64, u: &DVector<f64>) -> f64 {
    let r = &problem.a * u - (&problem.m * u) * lambda_sq;
    r.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Solve each wave number independently and collect the sweep.
pub fn spectrum_over_k(profile: &Profile, case: Case, k_list: &[u32]) -> Result<Spectrum> {
    spectrum_over_k_with_tol(profile, case, k_list, DEFAULT_CONVERGENCE_TOL)
}

pub fn spectrum_over_k_with_tol(
    profile: &Profile,
    case: Case,
    k_list: &[u32],
    tol: f64,
) -> Result<Spectrum> {
    if k_list.is_empty() || k_list.windows(2).any(|w| w[1] <= w[0]) || k_list[0] < 1 {
        return Err(Error::SweepOrder);
    }
    let mut entries: Vec<SpectrumEntry> = k_list
        .par_iter()
        .map(|&k| {
            let solve = || -> Result<SpectrumEntry> {
                let problem = assemble_case(profile, case, k)?;
                let (lambda_sq, eigenvector) = solve_principal(&problem)?;
                Ok(SpectrumEntry {
                    k,
                    lambda_sq,
                    eigenvector,
                })
            };
            solve().map_err(|e| Error::Solver {
                k,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.k);

    let capital_lambda_sq = capital_lambda(profile, case)?;
    let last = entries.last().expect("nonempty");
    let convergence_gap = (capital_lambda_sq - last.lambda_sq).abs()
        / capital_lambda_sq.abs().max(GAP_DENOMINATOR_FLOOR);
    Ok(Spectrum {
        case,
        entries,
        capital_lambda_sq,
        converged: convergence_gap < tol,
        convergence_gap,
        grid: profile.grid().clone(),
    })
}

/// The spectral radius Lambda^2 of a case/profile pair.
///
/// Cases 1-2 maximize a derivative-free density ratio over nodes; cases 3-4
/// solve the 1D pencil of the y-independent reduction.
pub fn capital_lambda(profile: &Profile, case: Case) -> Result<f64> {
    match case {
        Case::TransverseIncompressible => {
            require(profile, case)?;
            Ok(scan_max(profile, |i| {
                -profile.g() * profile.rho0x()[i] / profile.rho0()[i]
            })
            .1)
        }
        Case::TransverseCompressible => {
            require(profile, case)?;
            gamma_guard(profile)?;
            let c = profile.gamma_p0_plus_b0_sq();
            let g = profile.g();
            Ok(scan_max(profile, |i| {
                let rho = profile.rho0()[i];
                (g * g * rho * rho / c[i] - g * profile.rho0x()[i]) / rho
            })
            .1)
        }
        Case::ParallelIncompressible => {
            let pencil = assemble_case3_lambda_pencil(profile)?;
            Ok(solve_principal(&pencil)?.0)
        }
        Case::ParallelCompressible => {
            let pencil = assemble_case4_lambda_pencil(profile)?;
            Ok(solve_principal(&pencil)?.0)
        }
    }
}

fn require(profile: &Profile, case: Case) -> Result<()> {
    if profile.orientation() != case.orientation() {
        return Err(Error::CaseMismatch {
            case,
            required: case.orientation(),
        });
    }
    Ok(())
}

fn gamma_guard(profile: &Profile) -> Result<()> {
    if !(profile.gamma() > 1.0) {
        return Err(Error::GammaRange {
            gamma: profile.gamma(),
        });
    }
    Ok(())
}

fn scan_max(profile: &Profile, f: impl Fn(usize) -> f64) -> (usize, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..profile.grid().n() {
        let v = f(i);
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Sufficient conditions for instability.
///
/// Case 1: rho0x < 0 somewhere (margin -g rho0x); case 2:
/// g^2 rho0^2/(gamma p0 + B0^2) > g rho0x somewhere; case 3: the integral
/// of -g rho0x is positive (witness at the largest integrand). Case 4 is
/// linearly stable and unsupported here.
pub fn instability_criterion(profile: &Profile, case: Case) -> Result<CriterionReport> {
    let g = profile.g();
    match case {
        Case::TransverseIncompressible => {
            require(profile, case)?;
            let (i, margin) = scan_max(profile, |i| -g * profile.rho0x()[i]);
            Ok(report(profile, i, margin))
        }
        Case::TransverseCompressible => {
            require(profile, case)?;
            gamma_guard(profile)?;
            let c = profile.gamma_p0_plus_b0_sq();
            let (i, margin) = scan_max(profile, |i| {
                let rho = profile.rho0()[i];
                g * g * rho * rho / c[i] - g * profile.rho0x()[i]
            });
            Ok(report(profile, i, margin))
        }
        Case::ParallelIncompressible => {
            require(profile, case)?;
            let integrand: Vec<f64> = profile.rho0x().iter().map(|rx| -g * rx).collect();
            let margin = profile.grid().integrate(&integrand);
            let (i, _) = scan_max(profile, |i| integrand[i]);
            Ok(report(profile, i, margin))
        }
        Case::ParallelCompressible => Err(Error::CriterionUnsupported { case }),
    }
}

fn report(profile: &Profile, witness_idx: usize, margin: f64) -> CriterionReport {
    let unstable = margin > 0.0;
    CriterionReport {
        unstable,
        witness_x: unstable.then(|| profile.grid().nodes()[witness_idx]),
        margin,
    }
}

/// Gap of each entry to Lambda^2 plus a log-log estimate of the decay order
/// in k (reported, not asserted: no rate is claimed for the limit).
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub gaps: Vec<(u32, f64)>,
    /// Slope of -ln(gap) against ln(k); `None` when fewer than two gaps are
    /// above the floor.
    pub fitted_order: Option<f64>,
}

pub fn limit_check(spectrum: &Spectrum) -> Result<LimitReport> {
    if spectrum.entries.len() < 3 {
        return Err(Error::TooFewSamples {
            got: spectrum.entries.len(),
            need: 3,
        });
    }
    let gaps: Vec<(u32, f64)> = spectrum
        .entries
        .iter()
        .map(|e| (e.k, (spectrum.capital_lambda_sq - e.lambda_sq).abs()))
        .collect();
    let pts: Vec<(f64, f64)> = gaps
        .iter()
        .filter(|(_, g)| *g > GAP_DENOMINATOR_FLOOR)
        .map(|(k, g)| ((*k as f64).ln(), g.ln()))
        .collect();
    let fitted_order = if pts.len() >= 2 {
        Some(-least_squares_slope(&pts))
    } else {
        None
    };
    Ok(LimitReport { gaps, fitted_order })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, BoundaryCondition};
    use crate::operators::{assemble_case1, DofLayout, FieldOrientation};
    use crate::profiles::{make_profile, Construction, ProfileKind, ProfileSpec};
    use std::f64::consts::PI;

    fn linear_profile(
        n: usize,
        orientation: FieldOrientation,
        b0: f64,
    ) -> crate::profiles::Profile {
        let grid = build_grid(n, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 3.0,
                slope: -1.0 / PI,
            },
            construction: Construction::Balanced { p0_at_0: 10.0 },
        };
        make_profile(&spec, &grid, 1.0, 5.0 / 3.0, b0, orientation).unwrap()
    }

    fn constant_profile(
        n: usize,
        orientation: FieldOrientation,
        b0: f64,
    ) -> crate::profiles::Profile {
        let grid = build_grid(n, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 1.0,
                slope: 0.0,
            },
            construction: Construction::Balanced { p0_at_0: 1.0 },
        };
        make_profile(&spec, &grid, 1.0, 5.0 / 3.0, b0, orientation).unwrap()
    }

    #[test]
    fn zero_stiffness_gives_zero_eigenvalue() {
        let p = constant_profile(32, FieldOrientation::Transverse, 0.0);
        let mp = assemble_case1(&p, 2).unwrap();
        let (lam, u) = solve_principal(&mp).unwrap();
        assert_eq!(lam, 0.0);
        let norm = u.dot(&(&mp.m * &u));
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_pencil_gives_one() {
        let p = constant_profile(32, FieldOrientation::Transverse, 0.0);
        let mut mp = assemble_case1(&p, 2).unwrap();
        mp.a = mp.m.clone();
        let (lam, _) = solve_principal(&mp).unwrap();
        assert!((lam - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenpair_residual_is_small() {
        let p = linear_profile(128, FieldOrientation::Transverse, 0.0);
        let mp = assemble_case1(&p, 8).unwrap();
        let (lam, u) = solve_principal(&mp).unwrap();
        let scale = (&mp.a * &u)
            .iter()
            .cloned()
            .fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(principal_residual(&mp, lam, &u) <= 1e-8 * scale.max(1e-300));
        let rq = crate::operators::rayleigh_quotient(&mp, &u).unwrap();
        assert!((rq - lam).abs() <= 1e-10 * lam.abs());
    }

    #[test]
    fn sweep_is_monotone_and_bounded_for_case1() {
        let p = linear_profile(192, FieldOrientation::Transverse, 0.0);
        let ks = [1u32, 2, 4, 8, 16];
        let s = spectrum_over_k(&p, Case::TransverseIncompressible, &ks).unwrap();
        let lam_cap = s.capital_lambda_sq;
        assert!((lam_cap - 1.0 / PI).abs() < 1e-12);
        let mut prev = f64::NEG_INFINITY;
        for e in &s.entries {
            assert!(e.lambda_sq >= prev - 1e-8, "k={}", e.k);
            assert!(e.lambda_sq <= lam_cap + 1e-8, "k={}", e.k);
            prev = e.lambda_sq;
        }
        assert!(!s.converged, "k_max=16 is far from the limit");
    }

    #[test]
    fn constant_density_sweep_is_flat_zero_and_converged() {
        let p = constant_profile(64, FieldOrientation::Transverse, 0.0);
        let s = spectrum_over_k(&p, Case::TransverseIncompressible, &[1, 2, 4]).unwrap();
        for e in &s.entries {
            assert!(e.lambda_sq.abs() < 1e-12);
        }
        assert_eq!(s.capital_lambda_sq, 0.0);
        assert!(s.converged);
    }

    #[test]
    fn case3_constant_density_is_stable() {
        let p = constant_profile(64, FieldOrientation::Parallel, 1.0);
        let s = spectrum_over_k(&p, Case::ParallelIncompressible, &[1, 2, 4]).unwrap();
        for e in &s.entries {
            assert!(e.lambda_sq <= 1e-10, "k={} lambda^2={}", e.k, e.lambda_sq);
        }
        assert!(s.capital_lambda_sq <= 1e-10);
        let crit = instability_criterion(&p, Case::ParallelIncompressible).unwrap();
        assert!(!crit.unstable);
    }

    #[test]
    fn sweep_rejects_bad_k_lists() {
        let p = constant_profile(32, FieldOrientation::Transverse, 0.0);
        for ks in [&[][..], &[2u32, 2][..], &[4, 2][..], &[0, 1][..]] {
            assert!(matches!(
                spectrum_over_k(&p, Case::TransverseIncompressible, ks),
                Err(Error::SweepOrder)
            ));
        }
    }

    #[test]
    fn capital_lambda_case1_is_pointwise_max() {
        let p = linear_profile(256, FieldOrientation::Transverse, 0.0);
        let lam = capital_lambda(&p, Case::TransverseIncompressible).unwrap();
        assert!((lam - 1.0 / PI).abs() <= 1e-12);
    }

    #[test]
    fn capital_lambda_case2_matches_constant_coefficient_value() {
        let grid = build_grid(256, BoundaryCondition::Free).unwrap();
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
        let lam = capital_lambda(&p, Case::TransverseCompressible).unwrap();
        assert!((lam - 0.375).abs() <= 1e-10, "{lam}");
    }

    #[test]
    fn incompressible_limit_of_case2() {
        let p = linear_profile(256, FieldOrientation::Transverse, 0.0);
        let lam1 = capital_lambda(&p, Case::TransverseIncompressible).unwrap();
        let grid = p.grid().clone();
        let mut gaps = Vec::new();
        for gamma in [10.0, 100.0, 1000.0] {
            let spec = ProfileSpec {
                kind: ProfileKind::Linear {
                    rho0_at_0: 3.0,
                    slope: -1.0 / PI,
                },
                construction: Construction::Balanced { p0_at_0: 10.0 },
            };
            let pg =
                make_profile(&spec, &grid, 1.0, gamma, 0.0, FieldOrientation::Transverse).unwrap();
            let lam2 = capital_lambda(&pg, Case::TransverseCompressible).unwrap();
            assert!(lam2 > lam1);
            gaps.push(lam2 - lam1);
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
        for w in gaps.windows(2) {
            let ratio = w[0] / w[1];
            assert!((8.0..=12.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn case3_lambda_positive_under_integral_criterion() {
        let p = linear_profile(128, FieldOrientation::Parallel, 0.5);
        let crit = instability_criterion(&p, Case::ParallelIncompressible).unwrap();
        assert!(crit.unstable);
        assert!(
            (crit.margin - 2.0).abs() < 1e-10,
            "integral of 1/pi over [0,2pi]"
        );
        let lam = capital_lambda(&p, Case::ParallelIncompressible).unwrap();
        assert!(lam > 0.0);
    }

    #[test]
    fn case3_lambda_matches_2d_tensor_quotient() {
        // v(x,y) = u(x) * (1 + 0.3 cos y) factors exactly out of the discrete
        // 2D quotient, so the 2D value equals the 1D principal eigenvalue.
        let p = linear_profile(96, FieldOrientation::Parallel, 0.4);
        let pencil = assemble_case3_lambda_pencil(&p).unwrap();
        let (lam, u) = solve_principal(&pencil).unwrap();
        assert_eq!(pencil.dof, DofLayout::ScalarU1);

        let ny = 16usize;
        let hy = 2.0 * PI / ny as f64;
        let phi: Vec<f64> = (0..ny).map(|j| 1.0 + 0.3 * (j as f64 * hy).cos()).collect();
        let phi_sq_sum: f64 = phi.iter().map(|v| v * v * hy).sum();

        let num_1d = u.dot(&(&pencil.a * &u));
        let den_1d = u.dot(&(&pencil.m * &u));
        let quotient_2d = (num_1d * phi_sq_sum) / (den_1d * phi_sq_sum);
        assert!((quotient_2d - lam).abs() <= 1e-12 * lam.abs().max(1.0));
    }

    #[test]
    fn criterion_case1_examples() {
        let p = linear_profile(128, FieldOrientation::Transverse, 0.0);
        let r = instability_criterion(&p, Case::TransverseIncompressible).unwrap();
        assert!(r.unstable);
        assert!((r.margin - 1.0 / PI).abs() < 1e-14);
        assert!(r.witness_x.is_some());

        let grid = build_grid(128, BoundaryCondition::Free).unwrap();
        let spec = ProfileSpec {
            kind: ProfileKind::Linear {
                rho0_at_0: 1.0,
                slope: 1.0 / PI,
            },
            construction: Construction::Balanced { p0_at_0: 30.0 },
        };
        let stable = make_profile(
            &spec,
            &grid,
            1.0,
            5.0 / 3.0,
            0.0,
            FieldOrientation::Transverse,
        )
        .unwrap();
        let r = instability_criterion(&stable, Case::TransverseIncompressible).unwrap();
        assert!(!r.unstable);
        assert!(r.witness_x.is_none());
    }

    #[test]
    fn criterion_case2_needs_no_density_inversion() {
        let p = constant_profile(64, FieldOrientation::Transverse, 1.0);
        let r = instability_criterion(&p, Case::TransverseCompressible).unwrap();
        assert!(r.unstable);
        assert!(r.margin > 0.0);
    }

    #[test]
    fn criterion_case4_is_unsupported() {
        let p = constant_profile(64, FieldOrientation::Parallel, 1.0);
        assert!(matches!(
            instability_criterion(&p, Case::ParallelCompressible),
            Err(Error::CriterionUnsupported { .. })
        ));
    }

    #[test]
    fn criterion_sign_matches_capital_lambda_for_case1() {
        for slope in [-0.25, -0.01, 0.0, 0.01, 0.25] {
            let grid = build_grid(96, BoundaryCondition::Free).unwrap();
            let spec = ProfileSpec {
                kind: ProfileKind::Linear {
                    rho0_at_0: 3.0,
                    slope,
                },
                construction: Construction::Balanced { p0_at_0: 30.0 },
            };
            let p = make_profile(
                &spec,
                &grid,
                1.0,
                5.0 / 3.0,
                0.0,
                FieldOrientation::Transverse,
            )
            .unwrap();
            let crit = instability_criterion(&p, Case::TransverseIncompressible).unwrap();
            let lam = capital_lambda(&p, Case::TransverseIncompressible).unwrap();
            assert_eq!(crit.unstable, lam > 0.0, "slope {slope}");
        }
    }

    #[test]
    fn limit_check_gaps_decrease_on_linear_profile() {
        let p = linear_profile(192, FieldOrientation::Transverse, 0.0);
        let s = spectrum_over_k(&p, Case::TransverseIncompressible, &[2, 4, 8, 16]).unwrap();
        let report = limit_check(&s).unwrap();
        for w in report.gaps.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        let order = report.fitted_order.unwrap();
        assert!(order > 0.0, "gap decays with k, order {order}");
    }

    #[test]
    fn limit_check_on_flat_spectrum() {
        let p = constant_profile(64, FieldOrientation::Transverse, 0.0);
        let s = spectrum_over_k(&p, Case::TransverseIncompressible, &[1, 2, 4]).unwrap();
        let report = limit_check(&s).unwrap();
        for (_, g) in &report.gaps {
            assert!(*g <= 1e-12);
        }
        assert!(report.fitted_order.is_none());
    }

    #[test]
    fn limit_check_case3_converges_to_pencil_lambda() {
        let p = linear_profile(128, FieldOrientation::Parallel, 0.4);
        let s = spectrum_over_k(&p, Case::ParallelIncompressible, &[2, 4, 8, 16]).unwrap();
        let report = limit_check(&s).unwrap();
        for w in report.gaps.windows(2) {
            assert!(w[1].1 < w[0].1, "{:?}", report.gaps);
        }
    }

    #[test]
    fn spectrum_csv_has_footer() {
        let p = constant_profile(32, FieldOrientation::Transverse, 0.0);
        let s = spectrum_over_k(&p, Case::TransverseIncompressible, &[1, 2]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,lambda_k_sq,gap\n"));
        assert!(text
            .trim_end()
            .ends_with(&format!("Lambda_sq={}", crate::fmt_g17(0.0))));
    }
}
