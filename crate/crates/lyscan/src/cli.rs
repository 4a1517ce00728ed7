//! Command-line front end.
//!
//! Thin dispatch over the library: parse an operator spec, run the
//! requested analysis, write reports and images. Exit codes: 0 on success,
//! 2 on parse/usage errors, 3 on contract violations (failed certificates,
//! tolerance breaches, metamorphic disagreements).

use crate::classifier::{self, Budget};
use crate::dynamics;
use crate::kalisch;
use crate::numkit::C64;
use crate::operators::{parse_operator, Operator, SeqVector, Space, Vector};
use crate::scanner::{self, ScanRegion};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PARSE: u8 = 2;
const EXIT_CONTRACT: u8 = 3;

fn parse_c64(s: &str) -> Result<C64Arg, String> {
    let parse_f = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a float"));
    let (re, im) = match s.split_once(',') {
        Some((re, im)) => (parse_f(re)?, parse_f(im)?),
        None => (parse_f(s)?, 0.0),
    };
    if !re.is_finite() || !im.is_finite() {
        return Err("complex components must be finite".into());
    }
    Ok(C64Arg(C64::new(re, im)))
}

#[derive(Debug, Clone, Copy)]
struct C64Arg(C64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TruthSource {
    Empirical,
    Oracle,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Orbit horizon N
    #[arg(long, default_value_t = 2048)]
    horizon: u64,
    /// Maximum filtration level M
    #[arg(long, default_value_t = 40)]
    levels: usize,
    /// Randomized trials (claim certificates, identity checks)
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Quadrature panels for sampled functions
    #[arg(long, default_value_t = 4096)]
    panels: usize,
    /// Seed fixing all randomized choices
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            horizon: self.horizon,
            max_level: self.levels,
            trials: self.trials,
            panels: self.panels,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lyscan",
    version,
    about = "Numerical reconstruction of Li-Yorke chaos translation sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify λ + T: analytic filters first, then certificate searches
    Classify {
        /// Operator spec file
        #[arg(long)]
        spec: PathBuf,
        /// Translation λ as `re,im` (defaults to 0)
        #[arg(long, value_parser = parse_c64)]
        lambda: Option<C64Arg>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the verdict JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rasterize the translation set over a λ window
    Scan {
        #[arg(long)]
        spec: PathBuf,
        /// Window `cx,cy,hw,hh` (defaults to the bound-circle window)
        #[arg(long)]
        region: Option<String>,
        /// Odd grid resolution per axis
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Classify empirically or read the closed-form oracle
        #[arg(long, value_enum, default_value_t = TruthSource::Empirical)]
        truth: TruthSource,
        /// Scan text output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a P3 pixmap here
        #[arg(long)]
        image: Option<PathBuf>,
    },
    /// Sample orbit norms ‖(λ+T)ⁿ x‖ of a seed vector
    Orbit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_c64)]
        lambda: Option<C64Arg>,
        /// Basis index k for the sequence seed e_k
        #[arg(long, default_value_t = 1)]
        basis_index: usize,
        /// Indicator angle α for the function seed 1_{[α,2π]} (default π)
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form membership of λ in the translation set, where known
    Oracle {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_c64)]
        lambda: Option<C64Arg>,
    },
    /// Compare the closed-form iterate with repeated application
    VerifyTn {
        /// Translation w as `re,im`
        #[arg(long, value_parser = parse_c64, default_value = "0.3,0")]
        w: C64Arg,
        /// Largest power checked
        #[arg(long, default_value_t = 50)]
        n: u64,
        /// Quadrature panels
        #[arg(long, default_value_t = 4096)]
        panels: usize,
        /// Random test functions
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Tolerance for the max relative error
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Run the orbit-bound certificates at a translation w
    Claims {
        #[arg(long, value_parser = parse_c64, default_value = "0.5,0")]
        w: C64Arg,
        /// Orbit horizon for the certificates
        #[arg(long, default_value_t = 2000)]
        horizon: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a stored scan to a P3 pixmap
    Render {
        /// Scan text file produced by `scan --out`
        #[arg(long)]
        scan: PathBuf,
        /// Optional operator spec for the spectrum overlay
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check translation covariance (and the union law for direct sums)
    Metamorphic {
        #[arg(long)]
        spec: PathBuf,
        /// Shift λ0 for the covariance check
        #[arg(long, value_parser = parse_c64, default_value = "0.5,0")]
        lambda0: C64Arg,
        #[arg(long, default_value_t = 31)]
        resolution: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn load_operator(path: &PathBuf) -> Result<Operator, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_operator(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_region(s: &str, resolution: usize) -> Result<ScanRegion, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a float")))
        .collect::<Result<_, _>>()?;
    if parts.len() != 4 {
        return Err("region needs `cx,cy,hw,hh`".into());
    }
    if resolution % 2 == 0 || resolution < 3 || resolution > 401 {
        return Err("resolution must be odd and within 3..=401".into());
    }
    Ok(ScanRegion::new(C64::new(parts[0], parts[1]), parts[2], parts[3], resolution))
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version by "erroring" with exit 0.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_PARSE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Classify { spec, lambda, budget, out } => {
            let op = load_operator(&spec)?;
            let lambda = lambda.map(|l| l.0).unwrap_or(C64::new(0.0, 0.0));
            let verdict = scanner::classify_at(&op, lambda, &budget.budget());
            let mut doc = verdict.to_json();
            doc["lambda"] = serde_json::json!([lambda.re, lambda.im]);
            doc["operator"] = op.translate(lambda).metadata_json();
            let body = format!("{}\n{}\n", verdict.code(), serde_json::to_string_pretty(&doc).unwrap());
            write_or_print(&out, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan { spec, region, resolution, budget, truth, out, image } => {
            let op = load_operator(&spec)?;
            let window = match region {
                Some(s) => parse_region(&s, resolution)?,
                None => ScanRegion::auto(&op, resolution),
            };
            let b = budget.budget();
            let result = match truth {
                TruthSource::Empirical => scanner::scan(&op, window, &b),
                TruthSource::Oracle => scanner::scan_oracle(&op, window, &b),
            };
            write_or_print(&out, &result.to_text())?;
            if let Some(path) = image {
                let ppm = scanner::render(&result, Some(op.spectrum()));
                fs::write(&path, ppm)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Orbit { spec, lambda, basis_index, alpha, budget, out } => {
            let op = load_operator(&spec)?;
            let lambda = lambda.map(|l| l.0).unwrap_or(C64::new(0.0, 0.0));
            let translated = op.translate(lambda);
            let seed_vec = match translated.space() {
                Space::Sequence => Vector::Seq(SeqVector::basis(basis_index.max(1))),
                Space::Function => {
                    let a = alpha.unwrap_or(std::f64::consts::PI);
                    let f = kalisch::StepFunction::indicator(a.rem_euclid(std::f64::consts::TAU));
                    let n = f.norm();
                    Vector::Step(f.scale(C64::new(1.0 / n, 0.0)))
                }
                Space::Sum(_) => return Err("orbit seeds for direct sums are not supported".into()),
            };
            let rec = dynamics::orbit(&translated, &seed_vec, budget.budget().horizon)
                .map_err(|e| e.to_string())?;
            write_or_print(&out, &rec.to_rows())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { spec, lambda } => {
            let op = load_operator(&spec)?;
            let lambda = lambda.map(|l| l.0).unwrap_or(C64::new(0.0, 0.0));
            match classifier::oracle_membership(&op.translate(lambda)) {
                Some(true) => println!("true"),
                Some(false) => println!("false"),
                None => println!("unknown"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyTn { w, n, panels, trials, seed, tolerance } => {
            let gap = kalisch::iterate_consistency_gap(w.0, n, panels, trials, seed)
                .map_err(|e| e.to_string())?;
            println!(
                "iterate identity: w = {},{}  n ≤ {n}  panels = {panels}  trials = {trials}",
                w.0.re, w.0.im
            );
            println!("max relative error = {gap:.6e} (tolerance {tolerance:.1e})");
            if gap <= tolerance {
                println!("PASS");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAIL");
                Ok(ExitCode::from(EXIT_CONTRACT))
            }
        }
        Command::Claims { w, horizon, trials, seed, out } => {
            let report = kalisch::claim_certificates(w.0, horizon, trials, seed)
                .map_err(|e| e.to_string())?;
            let body = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
            write_or_print(&out, &body)?;
            for outcome in [&report.growth_divergence, &report.decay_bound, &report.edge_tail] {
                println!(
                    "{}: {} (max ratio {:.4}{})",
                    outcome.name,
                    if outcome.pass { "pass" } else { "FAIL" },
                    outcome.max_ratio,
                    outcome
                        .witness_n
                        .map(|n| format!(", witness n = {n}"))
                        .unwrap_or_default()
                );
            }
            if report.all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_CONTRACT))
            }
        }
        Command::Render { scan, spec, out } => {
            let text = fs::read_to_string(&scan)
                .map_err(|e| format!("cannot read {}: {e}", scan.display()))?;
            let result = scanner::parse_scan(&text).map_err(|e| e.to_string())?;
            let overlay = match spec {
                Some(path) => Some(load_operator(&path)?),
                None => None,
            };
            let ppm = scanner::render(&result, overlay.as_ref().map(|o| o.spectrum()));
            fs::write(&out, ppm).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Metamorphic { spec, lambda0, resolution, budget } => {
            let op = load_operator(&spec)?;
            let b = budget.budget();
            let window = ScanRegion::auto(&op, resolution);
            let base = scanner::scan(&op, window, &b);
            let shifted_op = op.translate(lambda0.0);
            let shifted = scanner::scan(&shifted_op, window.translated(-lambda0.0), &b);
            let translation = scanner::metamorphic_translation(&base, &shifted, lambda0.0)
                .map_err(|e| e.to_string())?;
            println!(
                "translation covariance (λ0 = {},{}): {} ({} compared, {} undetermined skipped, {} disagreements)",
                lambda0.0.re,
                lambda0.0.im,
                if translation.pass() { "pass" } else { "FAIL" },
                translation.compared,
                translation.skipped_undetermined,
                translation.disagreements.len()
            );
            let mut all_pass = translation.pass();
            if let crate::operators::BaseKind::Sum(parts) = op.base() {
                let part_scans: Vec<_> =
                    parts.iter().map(|p| scanner::scan(p, window, &b)).collect();
                let refs: Vec<&_> = part_scans.iter().collect();
                let union = scanner::metamorphic_union(&base, &refs).map_err(|e| e.to_string())?;
                println!(
                    "union law over {} parts: {} ({} compared, {} undetermined skipped, {} disagreements)",
                    parts.len(),
                    if union.pass() { "pass" } else { "FAIL" },
                    union.compared,
                    union.skipped_undetermined,
                    union.disagreements.len()
                );
                all_pass &= union.pass();
            }
            if all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_CONTRACT))
            }
        }
    }
}
