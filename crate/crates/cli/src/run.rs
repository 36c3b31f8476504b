//! Command dispatch and report emission.
//!
//! Every run writes `summary.txt`; the commands add their CSVs next to it.
//! All numbers are emitted with 17 significant digits and unix line endings,
//! and reruns of the same config byte-reproduce every file.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mhd_core::fmt_g17;
use mhd_core::grid::{build_grid, Grid};
use mhd_core::modes::{
    band_limited_field, escape_time, mode_field, select_dominant, vector_identity_residual,
};
use mhd_core::operators::{assemble_case, Case};
use mhd_core::profiles::{make_profile, make_profile_with_b0_table, Profile};
use mhd_core::spectra::{capital_lambda, instability_criterion, solve_principal, spectrum_over_k};
use mhd_core::symmetrize::{flux_jacobians, lower_order, symmetrizer, PointContext, State7};
use mhd_core::timedomain::{fit_growth_rate, simulate, InitKind};

use crate::config::{Command, InitTag, RunConfig};
use crate::CliError;

/// Paths written by a run, summary first.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn build_grid_for(config: &RunConfig) -> Result<Grid, CliError> {
    Ok(build_grid(config.n, config.bc)?)
}

fn build_profile(config: &RunConfig) -> Result<Profile, CliError> {
    let spec = config.profile.as_ref().ok_or(CliError::Config {
        line: None,
        msg: "this command needs a [profile] section".into(),
    })?;
    let grid = build_grid_for(config)?;
    let orientation = config
        .case
        .map(|c| c.orientation())
        .unwrap_or(mhd_core::operators::FieldOrientation::Transverse);
    let profile = match &config.b0_values {
        Some(values) => make_profile_with_b0_table(
            &spec.kind,
            &grid,
            config.g,
            config.gamma,
            values.clone(),
            p0_start(config),
        )?,
        None => make_profile(spec, &grid, config.g, config.gamma, config.b0, orientation)?,
    };
    Ok(profile)
}

fn p0_start(config: &RunConfig) -> f64 {
    match config.profile.as_ref().map(|s| s.construction) {
        Some(mhd_core::profiles::Construction::Balanced { p0_at_0 }) => p0_at_0,
        _ => 1.0,
    }
}

struct Emitter {
    dir: PathBuf,
    files: Vec<PathBuf>,
    summary: String,
}

impl Emitter {
    fn new(config: &RunConfig) -> Result<Emitter, CliError> {
        fs::create_dir_all(&config.out_dir)?;
        let mut e = Emitter {
            dir: config.out_dir.clone(),
            files: Vec::new(),
            summary: String::new(),
        };
        e.kv("command", config.command.name());
        if let Some(case) = config.case {
            e.kv("case", case.name());
        }
        Ok(e)
    }

    fn kv(&mut self, key: &str, value: impl AsRef<str>) {
        let _ = writeln!(self.summary, "{key}={}", value.as_ref());
    }

    fn kv_num(&mut self, key: &str, value: f64) {
        let _ = writeln!(self.summary, "{key}={}", fmt_g17(value));
    }

    fn write_file(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn finish(mut self) -> Result<RunOutput, CliError> {
        let path = self.dir.join("summary.txt");
        fs::write(&path, self.summary.as_bytes())?;
        self.files.insert(0, path);
        Ok(RunOutput {
            files: self.files,
            summary: self.summary,
        })
    }
}

/// Execute a validated configuration.
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    match config.command {
        Command::Spectrum => run_spectrum(config),
        Command::Lambda => run_lambda(config),
        Command::Criterion => run_criterion(config),
        Command::Simulate => run_simulate(config),
        Command::SymmetrizerCheck => run_symmetrizer_check(config),
        Command::Identities => run_identities(config),
        Command::EscapeTime => run_escape_time(config),
    }
}

fn dump_profile(e: &mut Emitter, profile: &Profile) -> Result<(), CliError> {
    let mut buf = Vec::new();
    profile.write_csv(&mut buf).map_err(CliError::Io)?;
    e.write_file("profile.csv", &buf)
}

fn criterion_lines(e: &mut Emitter, profile: &Profile, case: Case) -> Result<(), CliError> {
    if case == Case::ParallelCompressible {
        return Ok(());
    }
    let report = instability_criterion(profile, case)?;
    e.kv(
        "criterion_unstable",
        if report.unstable { "true" } else { "false" },
    );
    match report.witness_x {
        Some(x) => e.kv_num("criterion_witness_x", x),
        None => e.kv("criterion_witness_x", "none"),
    }
    e.kv_num("criterion_margin", report.margin);
    Ok(())
}

fn run_spectrum(config: &RunConfig) -> Result<RunOutput, CliError> {
    let case = config.case.expect("validated");
    let profile = build_profile(config)?;
    let mut e = Emitter::new(config)?;
    dump_profile(&mut e, &profile)?;
    let spectrum = spectrum_over_k(&profile, case, &config.k_list)?;
    let mut buf = Vec::new();
    spectrum.write_csv(&mut buf).map_err(CliError::Io)?;
    e.write_file("spectrum.csv", &buf)?;
    e.kv_num("Lambda_sq", spectrum.capital_lambda_sq);
    e.kv(
        "converged",
        if spectrum.converged { "true" } else { "false" },
    );
    e.kv_num("convergence_gap", spectrum.convergence_gap);
    criterion_lines(&mut e, &profile, case)?;
    match select_dominant(&spectrum) {
        Ok(mode) => {
            e.kv("dominant_k0", mode.k0.to_string());
            e.kv_num("dominant_lambda", mode.lambda);
        }
        Err(mhd_core::Error::Dominance { .. }) => e.kv("dominant_k0", "none"),
        Err(other) => return Err(other.into()),
    }
    e.finish()
}

fn run_lambda(config: &RunConfig) -> Result<RunOutput, CliError> {
    let case = config.case.expect("validated");
    let profile = build_profile(config)?;
    let mut e = Emitter::new(config)?;
    dump_profile(&mut e, &profile)?;
    let lam = capital_lambda(&profile, case)?;
    e.kv_num("Lambda_sq", lam);
    e.finish()
}

fn run_criterion(config: &RunConfig) -> Result<RunOutput, CliError> {
    let case = config.case.expect("validated");
    let profile = build_profile(config)?;
    let mut e = Emitter::new(config)?;
    dump_profile(&mut e, &profile)?;
    let report = instability_criterion(&profile, case)?;
    e.kv(
        "criterion_unstable",
        if report.unstable { "true" } else { "false" },
    );
    match report.witness_x {
        Some(x) => e.kv_num("criterion_witness_x", x),
        None => e.kv("criterion_witness_x", "none"),
    }
    e.kv_num("criterion_margin", report.margin);
    e.finish()
}

fn run_simulate(config: &RunConfig) -> Result<RunOutput, CliError> {
    let case = config.case.expect("validated");
    let profile = build_profile(config)?;
    let mut e = Emitter::new(config)?;
    dump_profile(&mut e, &profile)?;
    let problem = assemble_case(&profile, case, config.k0)?;
    let (lambda_sq, _) = solve_principal(&problem)?;
    let dt = config.dt_factor * problem.cfl_dt_limit;
    let kind = match config.init {
        InitTag::Eigenmode => InitKind::Eigenmode,
        InitTag::Random => InitKind::Random { seed: config.seed },
    };
    let state = simulate(&problem, dt, config.t_end, kind, config.stride)?;
    let mut buf = Vec::new();
    state.write_history_csv(&mut buf).map_err(CliError::Io)?;
    e.write_file("history.csv", &buf)?;
    let fit = fit_growth_rate(state.history(), config.window_fraction)?;
    e.kv("k0", config.k0.to_string());
    e.kv_num("dt", dt);
    e.kv_num("lambda_k_sq", lambda_sq);
    e.kv_num("lambda_fit", fit.lambda_fit);
    e.kv(
        "oscillatory",
        if fit.oscillatory { "true" } else { "false" },
    );
    e.kv_num("fit_r_squared", fit.r_squared);
    e.finish()
}

fn run_symmetrizer_check(config: &RunConfig) -> Result<RunOutput, CliError> {
    let profile = build_profile(config)?;
    let mut e = Emitter::new(config)?;
    let mid = profile.grid().n() / 2;
    let ctx = PointContext {
        rho0: profile.rho0()[mid],
        rho0x: profile.rho0x()[mid],
        b0: profile.b0()[mid],
        b0x: profile.b0x()[mid],
        gamma: profile.gamma(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut max_asym: f64 = 0.0;
    let mut probe = State7::ZERO;
    for sample in 0..1000 {
        use rand::Rng;
        let sigma = rng.random_range(-0.5 * ctx.rho0..0.5 * ctx.rho0);
        let mut f = || rng.random_range(-2.0..2.0);
        let state = State7 {
            sigma,
            v1: f(),
            v2: f(),
            v3: f(),
            b1: f(),
            b2: f(),
            b3: f(),
        };
        if sample == 0 {
            probe = state;
        }
        let (a1, a2, a3) = flux_jacobians(&state, &ctx)?;
        for m in [&a1, &a2, &a3] {
            for i in 0..7 {
                for j in 0..7 {
                    max_asym = max_asym.max((m[(i, j)] - m[(j, i)]).abs());
                }
            }
        }
    }
    e.kv_num("max_flux_asymmetry", max_asym);

    let zeros = vec![0.0; profile.grid().n()];
    let (eta, c_s) = mhd_core::symmetrize::check_norm_equivalence(&profile, &zeros)?;
    e.kv_num("eta", eta);
    e.kv_num("c_s", c_s);

    for (label, sigma) in [("1e-2", 1e-2), ("1e-3", 1e-3), ("1e-4", 1e-4)] {
        let state = State7 {
            sigma,
            ..State7::ZERO
        };
        let (_, df) = lower_order(&state, &ctx)?;
        e.kv_num(
            &format!("df2_over_sigma_sq_at_{label}"),
            df[1] / (sigma * sigma),
        );
    }

    // matrix dump at the first sampled state
    let d = symmetrizer(&probe, &ctx)?;
    let (a1, a2, a3) = flux_jacobians(&probe, &ctx)?;
    let (dl, df) = lower_order(&probe, &ctx)?;
    let mut buf = String::new();
    let _ = writeln!(buf, "matrix,row,c0,c1,c2,c3,c4,c5,c6");
    for (name, m) in [("D", &d), ("DA1", &a1), ("DA2", &a2), ("DA3", &a3)] {
        for i in 0..7 {
            let cells: Vec<String> = (0..7).map(|j| fmt_g17(m[(i, j)])).collect();
            let _ = writeln!(buf, "{name},{i},{}", cells.join(","));
        }
    }
    for (name, v) in [("DL", &dl), ("DF", &df)] {
        let cells: Vec<String> = v.iter().map(|&x| fmt_g17(x)).collect();
        let _ = writeln!(buf, "{name},0,{}", cells.join(","));
    }
    e.write_file("symmetrizer.csv", buf.as_bytes())?;
    e.finish()
}

fn run_identities(config: &RunConfig) -> Result<RunOutput, CliError> {
    if config.n > 256 {
        return Err(CliError::Config {
            line: None,
            msg: format!(
                "identities doubles grid.n three times; n = {} is too large (use n <= 256)",
                config.n
            ),
        });
    }
    let mut e = Emitter::new(config)?;
    let mut buf = String::new();
    let _ = writeln!(buf, "n,r1,r2");
    let mut rows = Vec::new();
    for level in 0..4 {
        let n = config.n << level;
        let a = band_limited_field(n, n, 2, config.seed);
        let b = band_limited_field(n, n, 2, config.seed.wrapping_add(1));
        let (r1, r2) = vector_identity_residual(&a, &b)?;
        let _ = writeln!(buf, "{n},{},{}", fmt_g17(r1), fmt_g17(r2));
        rows.push((n, r1, r2));
    }
    e.write_file("identities.csv", buf.as_bytes())?;
    let mut min_ratio = f64::INFINITY;
    for w in rows.windows(2) {
        min_ratio = min_ratio.min(w[0].1 / w[1].1).min(w[0].2 / w[1].2);
    }
    e.kv_num("min_halving_ratio", min_ratio);
    e.finish()
}

fn run_escape_time(config: &RunConfig) -> Result<RunOutput, CliError> {
    let case = config.case.expect("validated");
    let profile = build_profile(config)?;
    let mut e = Emitter::new(config)?;
    let spectrum = spectrum_over_k(&profile, case, &config.k_list)?;
    let mode = select_dominant(&spectrum)?;
    let t = escape_time(config.delta, config.theta, mode.lambda)?;
    let field = mode_field(&mode, 0.0, config.ny);
    let mut buf = Vec::new();
    field.write_csv(&mut buf).map_err(CliError::Io)?;
    e.write_file("mode_field.csv", &buf)?;
    e.kv("dominant_k0", mode.k0.to_string());
    e.kv_num("dominant_lambda", mode.lambda);
    e.kv_num("delta", config.delta);
    e.kv_num("theta", config.theta);
    e.kv_num("escape_time", t);
    e.finish()
}
