use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use planar_qdot::cli::{exit, parse_config, run_to_exit_code};

/// Radial eigensolver for two electrons in a planar harmonic dot.
///
/// Settings come from an optional `key = value` config file; every flag
/// overrides the key of the same name. Exit status: 0 success, 1 no state or
/// no convergence, 2 configuration error, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "planar-qdot", version, allow_negative_numbers = true)]
struct Args {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// solve | compare | cutoff-scan | chern-simons | oscillator-check
    #[arg(long)]
    mode: Option<String>,
    /// inverse-r | log-r | bessel-k0 | none
    #[arg(long)]
    potential: Option<String>,
    #[arg(long)]
    strength: Option<String>,
    #[arg(long)]
    mass_scale: Option<String>,
    /// Relative-motion confinement frequency in Hartree.
    #[arg(long)]
    omega: Option<String>,
    /// Angular momentum.
    #[arg(long)]
    l: Option<String>,
    #[arg(long)]
    r_min: Option<String>,
    #[arg(long)]
    r_max: Option<String>,
    /// Number of grid points including both ends.
    #[arg(long)]
    points: Option<String>,
    /// Absolute energy tolerance of the bisection, Hartree.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    #[arg(long)]
    scan_points: Option<String>,
    #[arg(long)]
    eta_min: Option<String>,
    #[arg(long)]
    eta_max: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Comma-separated cutoffs for cutoff-scan.
    #[arg(long)]
    r_min_list: Option<String>,
    #[arg(long)]
    mass_ratio: Option<String>,
    /// Energy the cutoff scan selects against; writes frozen.cfg.
    #[arg(long)]
    target_eta: Option<String>,
}

impl Args {
    fn overrides(&self) -> Vec<(String, String)> {
        [
            ("mode", &self.mode),
            ("potential", &self.potential),
            ("strength", &self.strength),
            ("mass_scale", &self.mass_scale),
            ("omega", &self.omega),
            ("l", &self.l),
            ("r_min", &self.r_min),
            ("r_max", &self.r_max),
            ("points", &self.points),
            ("energy_tol", &self.tol),
            ("max_iter", &self.max_iter),
            ("scan_points", &self.scan_points),
            ("eta_min", &self.eta_min),
            ("eta_max", &self.eta_max),
            ("output_dir", &self.out),
            ("r_min_list", &self.r_min_list),
            ("mass_ratio", &self.mass_ratio),
            ("target_eta", &self.target_eta),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(exit::CONFIG);
            }
        },
        None => String::new(),
    };
    let config = match parse_config(&text, &args.overrides()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::CONFIG);
        }
    };
    let code = run_to_exit_code(&config, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}
