use std::path::PathBuf;
use std::process::ExitCode;

use mhd_spectra::{parse_config, run};

const USAGE: &str = "usage: mhd-spectra <config-path> [--out <dir>] [--quiet]";

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let mut config_path: Option<PathBuf> = None;
    let mut out_override: Option<PathBuf> = None;
    let mut quiet = false;
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--out" => match args.next() {
                Some(dir) => out_override = Some(PathBuf::from(dir)),
                None => {
                    eprintln!("--out needs a directory argument\n{USAGE}");
                    return ExitCode::from(1);
                }
            },
            "--quiet" => quiet = true,
            "--help" | "-h" => {
                println!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            other if config_path.is_none() && !other.starts_with('-') => {
                config_path = Some(PathBuf::from(other));
            }
            other => {
                eprintln!("unexpected argument `{other}`\n{USAGE}");
                return ExitCode::from(1);
            }
        }
    }
    let Some(config_path) = config_path else {
        eprintln!("{USAGE}");
        return ExitCode::from(1);
    };

    let text = match std::fs::read_to_string(&config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", config_path.display());
            return ExitCode::from(1);
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", config_path.display());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(dir) = out_override {
        config.out_dir = dir;
    }

    match run(&config) {
        Ok(output) => {
            if !quiet {
                print!("{}", output.summary);
                for f in &output.files {
                    println!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {e}", config_path.display());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
