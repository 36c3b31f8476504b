//! Sectioned key=value run configuration.
//!
//! Sections: run, profile, grid, physics, sweep, sim, output. Unknown
//! sections, unknown keys, duplicate keys and malformed values are rejected
//! with the offending line number.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use mhd_core::grid::BoundaryCondition;
use mhd_core::operators::Case;
use mhd_core::profiles::{Construction, ProfileKind, ProfileSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Lambda,
    Criterion,
    Simulate,
    SymmetrizerCheck,
    Identities,
    EscapeTime,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Lambda => "lambda",
            Command::Criterion => "criterion",
            Command::Simulate => "simulate",
            Command::SymmetrizerCheck => "symmetrizer-check",
            Command::Identities => "identities",
            Command::EscapeTime => "escape-time",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitTag {
    Eigenmode,
    Random,
}

/// Fully validated run description with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub case: Option<Case>,
    pub profile: Option<ProfileSpec>,
    pub n: usize,
    pub bc: BoundaryCondition,
    pub g: f64,
    pub gamma: f64,
    pub b0: f64,
    pub b0_values: Option<Vec<f64>>,
    pub k_list: Vec<u32>,
    pub dt_factor: f64,
    pub t_end: f64,
    pub stride: usize,
    pub init: InitTag,
    pub seed: u64,
    pub k0: u32,
    pub window_fraction: f64,
    pub delta: f64,
    pub theta: f64,
    pub out_dir: PathBuf,
    pub ny: usize,
}

const SECTION_KEYS: &[(&str, &[&str])] = &[
    ("run", &["command", "case"]),
    (
        "profile",
        &[
            "kind",
            "rho0_at_0",
            "slope",
            "amplitude",
            "rate",
            "base",
            "width",
            "location",
            "values",
            "construction",
        ],
    ),
    ("grid", &["n", "bc"]),
    (
        "physics",
        &["g", "gamma", "b0", "b0_values", "p0_at_0", "closure_c"],
    ),
    ("sweep", &["k"]),
    (
        "sim",
        &[
            "dt_factor",
            "t_end",
            "stride",
            "init",
            "seed",
            "k0",
            "window_fraction",
            "delta",
            "theta",
        ],
    ),
    ("output", &["dir", "ny"]),
];

struct RawConfig {
    entries: BTreeMap<(String, String), (String, usize)>,
}

impl RawConfig {
    fn get(&self, section: &str, key: &str) -> Option<&(String, usize)> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn value(&self, section: &str, key: &str) -> Option<&str> {
        self.get(section, key).map(|(v, _)| v.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, CliError> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<T>().map(Some).map_err(|_| {
                config_err(
                    Some(*line),
                    format!("cannot parse `{v}` as a value for {section}.{key}"),
                )
            }),
        }
    }

    fn parse_list(&self, section: &str, key: &str) -> Result<Option<(Vec<f64>, usize)>, CliError> {
        match self.get(section, key) {
            None => Ok(None),
            Some((v, line)) => {
                let mut out = Vec::new();
                for piece in v.split(',') {
                    let piece = piece.trim();
                    out.push(piece.parse::<f64>().map_err(|_| {
                        config_err(
                            Some(*line),
                            format!("cannot parse `{piece}` in the list for {section}.{key}"),
                        )
                    })?);
                }
                Ok(Some((out, *line)))
            }
        }
    }
}

fn config_err(line: Option<usize>, msg: String) -> CliError {
    CliError::Config { line, msg }
}

fn scan(text: &str) -> Result<RawConfig, CliError> {
    let mut entries = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !SECTION_KEYS.iter().any(|(s, _)| *s == name) {
                return Err(config_err(
                    Some(line_no),
                    format!("unknown section [{name}]"),
                ));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_err(
                Some(line_no),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let Some(section_name) = section.clone() else {
            return Err(config_err(
                Some(line_no),
                format!("key `{key}` appears before any [section] header"),
            ));
        };
        let allowed = SECTION_KEYS
            .iter()
            .find(|(s, _)| *s == section_name)
            .map(|(_, ks)| *ks)
            .unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            return Err(config_err(
                Some(line_no),
                format!("unknown key `{key}` in section [{section_name}]"),
            ));
        }
        if entries
            .insert((section_name.clone(), key.clone()), (value, line_no))
            .is_some()
        {
            return Err(config_err(
                Some(line_no),
                format!("duplicate key `{key}` in section [{section_name}]"),
            ));
        }
    }
    Ok(RawConfig { entries })
}

fn parse_case(raw: &RawConfig) -> Result<Option<Case>, CliError> {
    match raw.get("run", "case") {
        None => Ok(None),
        Some((v, line)) => match v.as_str() {
            "transverse_incompressible" => Ok(Some(Case::TransverseIncompressible)),
            "transverse_compressible" => Ok(Some(Case::TransverseCompressible)),
            "parallel_incompressible" => Ok(Some(Case::ParallelIncompressible)),
            "parallel_compressible" => Ok(Some(Case::ParallelCompressible)),
            other => Err(config_err(Some(*line), format!("unknown case `{other}`"))),
        },
    }
}

fn parse_k_list(
    raw: &RawConfig,
    line_hint: &mut Option<usize>,
) -> Result<Option<Vec<u32>>, CliError> {
    let Some((v, line)) = raw.get("sweep", "k") else {
        return Ok(None);
    };
    *line_hint = Some(*line);
    let parse_one = |s: &str| -> Result<u32, CliError> {
        s.trim()
            .parse::<u32>()
            .map_err(|_| config_err(Some(*line), format!("cannot parse wave number `{s}`")))
    };
    if let Some((a, b)) = v.split_once("..") {
        let (a, b) = (parse_one(a)?, parse_one(b)?);
        if a < 1 || b < a {
            return Err(config_err(
                Some(*line),
                format!("bad wave-number range `{v}`"),
            ));
        }
        return Ok(Some((a..=b).collect()));
    }
    let mut out = Vec::new();
    for piece in v.split(',') {
        out.push(parse_one(piece)?);
    }
    Ok(Some(out))
}

/// Parse and validate a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw = scan(text)?;

    let command = match raw.get("run", "command") {
        None => return Err(config_err(None, "missing required key run.command".into())),
        Some((v, line)) => match v.as_str() {
            "spectrum" => Command::Spectrum,
            "lambda" => Command::Lambda,
            "criterion" => Command::Criterion,
            "simulate" => Command::Simulate,
            "symmetrizer-check" => Command::SymmetrizerCheck,
            "identities" => Command::Identities,
            "escape-time" => Command::EscapeTime,
            other => {
                return Err(config_err(
                    Some(*line),
                    format!("unknown command `{other}`"),
                ))
            }
        },
    };
    let case = parse_case(&raw)?;

    let n = raw.parse::<usize>("grid", "n")?.unwrap_or(512);
    if n < mhd_core::grid::MIN_POINTS {
        let line = raw.get("grid", "n").map(|(_, l)| *l);
        return Err(config_err(line, format!("grid.n = {n} is too small")));
    }
    let bc = match raw.value("grid", "bc") {
        None => match case {
            Some(Case::ParallelCompressible) => BoundaryCondition::Periodic,
            _ => BoundaryCondition::Free,
        },
        Some("free") => BoundaryCondition::Free,
        Some("periodic") => BoundaryCondition::Periodic,
        Some(other) => {
            let line = raw.get("grid", "bc").map(|(_, l)| *l);
            return Err(config_err(line, format!("unknown bc `{other}`")));
        }
    };

    let g = raw.parse::<f64>("physics", "g")?.unwrap_or(1.0);
    let gamma = raw.parse::<f64>("physics", "gamma")?.unwrap_or(5.0 / 3.0);
    let b0 = raw.parse::<f64>("physics", "b0")?.unwrap_or(0.0);
    let p0_at_0 = raw.parse::<f64>("physics", "p0_at_0")?.unwrap_or(1.0);
    let closure_c = raw.parse::<f64>("physics", "closure_c")?.unwrap_or(1.0);

    let b0_values = match raw.parse_list("physics", "b0_values")? {
        None => None,
        Some((values, line)) => {
            if values.len() != n {
                return Err(config_err(
                    Some(line),
                    format!(
                        "physics.b0_values must supply exactly {n} values, got {}",
                        values.len()
                    ),
                ));
            }
            if let Some(c) = case {
                if c.orientation() == mhd_core::operators::FieldOrientation::Parallel {
                    return Err(config_err(
                        Some(line),
                        format!("case {c} needs a parallel (constant) field; a b0 table is transverse data"),
                    ));
                }
            }
            Some(values)
        }
    };

    if let Some(c) = case {
        if c.compressible() && !(gamma > 1.0) {
            let line = raw.get("physics", "gamma").map(|(_, l)| *l);
            return Err(config_err(
                line,
                format!("physics.gamma must exceed 1 for compressible cases, got {gamma}"),
            ));
        }
    }

    let profile = match raw.get("profile", "kind") {
        None => None,
        Some((kind, line)) => {
            let rho0_at_0 = raw.parse::<f64>("profile", "rho0_at_0")?.unwrap_or(3.0);
            let kind = match kind.as_str() {
                "linear" => ProfileKind::Linear {
                    rho0_at_0,
                    slope: raw.parse::<f64>("profile", "slope")?.unwrap_or(0.0),
                },
                "exponential" => ProfileKind::Exponential {
                    amplitude: raw.parse::<f64>("profile", "amplitude")?.unwrap_or(1.0),
                    rate: raw.parse::<f64>("profile", "rate")?.unwrap_or(0.0),
                },
                "tanh_interface" => ProfileKind::TanhInterface {
                    base: raw.parse::<f64>("profile", "base")?.unwrap_or(2.0),
                    amplitude: raw.parse::<f64>("profile", "amplitude")?.unwrap_or(-0.9),
                    width: raw.parse::<f64>("profile", "width")?.unwrap_or(0.5),
                    location: raw.parse::<f64>("profile", "location")?.unwrap_or(PI),
                },
                "table" => {
                    let Some((values, vline)) = raw.parse_list("profile", "values")? else {
                        return Err(config_err(
                            Some(*line),
                            "profile.kind = table requires profile.values".into(),
                        ));
                    };
                    if values.len() != n {
                        return Err(config_err(
                            Some(vline),
                            format!(
                                "profile.values must supply exactly {n} values, got {}",
                                values.len()
                            ),
                        ));
                    }
                    ProfileKind::Table { values }
                }
                other => {
                    return Err(config_err(
                        Some(*line),
                        format!("unknown profile kind `{other}`"),
                    ))
                }
            };
            let construction = match raw.value("profile", "construction").unwrap_or("balanced") {
                "balanced" => Construction::Balanced { p0_at_0 },
                "isentropic" => Construction::Isentropic {
                    closure_c,
                    rho0_at_0,
                },
                other => {
                    let line = raw.get("profile", "construction").map(|(_, l)| *l);
                    return Err(config_err(line, format!("unknown construction `{other}`")));
                }
            };
            Some(ProfileSpec { kind, construction })
        }
    };

    let needs_case = matches!(
        command,
        Command::Spectrum
            | Command::Lambda
            | Command::Criterion
            | Command::Simulate
            | Command::EscapeTime
    );
    if needs_case && case.is_none() {
        return Err(config_err(None, "missing required key run.case".into()));
    }
    let needs_profile = needs_case || command == Command::SymmetrizerCheck;
    if needs_profile && profile.is_none() {
        return Err(config_err(None, "missing required key profile.kind".into()));
    }

    let mut k_line = None;
    let k_list = parse_k_list(&raw, &mut k_line)?.unwrap_or_else(|| vec![1, 2, 4, 8, 16, 32, 64]);
    if k_list.is_empty() || k_list.windows(2).any(|w| w[1] <= w[0]) || k_list[0] < 1 {
        return Err(config_err(
            k_line,
            "sweep.k must be nonempty, positive and strictly ascending".into(),
        ));
    }

    let dt_factor = raw.parse::<f64>("sim", "dt_factor")?.unwrap_or(0.5);
    if !(dt_factor > 0.0 && dt_factor <= 1.0) {
        let line = raw.get("sim", "dt_factor").map(|(_, l)| *l);
        return Err(config_err(
            line,
            format!("sim.dt_factor must lie in (0, 1], got {dt_factor}"),
        ));
    }
    let t_end = raw.parse::<f64>("sim", "t_end")?.unwrap_or(20.0);
    if !(t_end > 0.0) {
        let line = raw.get("sim", "t_end").map(|(_, l)| *l);
        return Err(config_err(
            line,
            format!("sim.t_end must be positive, got {t_end}"),
        ));
    }
    let stride = raw.parse::<usize>("sim", "stride")?.unwrap_or(1).max(1);
    let init = match raw.value("sim", "init").unwrap_or("eigenmode") {
        "eigenmode" => InitTag::Eigenmode,
        "random" => InitTag::Random,
        other => {
            let line = raw.get("sim", "init").map(|(_, l)| *l);
            return Err(config_err(line, format!("unknown init kind `{other}`")));
        }
    };
    let seed = raw.parse::<u64>("sim", "seed")?.unwrap_or(0);
    let k0 = raw.parse::<u32>("sim", "k0")?.unwrap_or(8);
    if k0 < 1 {
        let line = raw.get("sim", "k0").map(|(_, l)| *l);
        return Err(config_err(line, "sim.k0 must be at least 1".into()));
    }
    let window_fraction = raw.parse::<f64>("sim", "window_fraction")?.unwrap_or(0.5);
    let delta = raw.parse::<f64>("sim", "delta")?.unwrap_or(1e-3);
    let theta = raw.parse::<f64>("sim", "theta")?.unwrap_or(0.1);

    let out_dir = PathBuf::from(raw.value("output", "dir").unwrap_or("out"));
    let ny = raw.parse::<usize>("output", "ny")?.unwrap_or(64);

    Ok(RunConfig {
        command,
        case,
        profile,
        n,
        bc,
        g,
        gamma,
        b0,
        b0_values,
        k_list,
        dt_factor,
        t_end,
        stride,
        init,
        seed,
        k0,
        window_fraction,
        delta,
        theta,
        out_dir,
        ny,
    })
}
