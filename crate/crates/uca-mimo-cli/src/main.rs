//! Command-line front end for the `uca-mimo` link-level simulator.
//!
//! Subcommands: `channel-report`, `ber-sweep`, `spacing-search`,
//! `complexity`. Each resolves its configuration from defaults, an optional
//! preset, an optional `key = value` config file, and command-line
//! overrides (in that order), writes CSV outputs plus a replayable
//! `manifest.txt` into the output directory, and prints a summary table.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure (for
//! example the exhaustive-detector hypothesis cap).

mod report;
mod settings;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use uca_mimo::channel::{
    approximation_variance, circulant_channel, circulant_residual, compensation_pair,
    exact_channel, model_channel,
};
use uca_mimo::geometry::reference_distance;
use uca_mimo::simulate::{
    complexity_counts, rounded_ratio, run_ber_sweep, spacing_search, BerPoint, Scheme, SweepConfig,
};

use report::{sig17, write_file, write_manifest};
use settings::{spacing_base_link, Settings};

/// CLI failure split by exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl From<uca_mimo::Error> for CliError {
    fn from(e: uca_mimo::Error) -> Self {
        match e {
            uca_mimo::Error::HypothesisCapExceeded { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "uca-mimo",
    version,
    about = "LOS MIMO over parallel uniform circular arrays: channel reports, BER sweeps, \
             antenna-spacing search, and detection-complexity tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channel matrices, beamformers, eigenvalues, and quality metrics.
    ChannelReport(CommonArgs),
    /// Monte Carlo bit-error-rate sweep over SNR.
    BerSweep(BerArgs),
    /// Largest antenna count per radius with eigenvalue spread below a
    /// threshold, and the resulting neighbor spacing.
    SpacingSearch(SpacingArgs),
    /// Exact complex-operation counts of both detection schemes.
    Complexity(ComplexityArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Key-value config file (a previous run's manifest.txt also works).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Configuration preset: paper-fig4-n4, paper-fig4-n6, paper-fig3-spacing.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory for CSV files and the run manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Extra `key=value` overrides applied after preset and config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Antenna count for both arrays.
    #[arg(long)]
    n: Option<usize>,
    /// Monte Carlo master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BerArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// proposed, traditional, or both.
    #[arg(long)]
    scheme: Option<String>,
    /// bpsk, qpsk, psk8, psk16.
    #[arg(long)]
    constellation: Option<String>,
    /// SNR points in dB: comma list or start:stop:step.
    #[arg(long)]
    snr: Option<String>,
    /// Trials per SNR point.
    #[arg(long)]
    trials: Option<u64>,
    /// Scale the channel to unit mean subchannel power (true/false).
    #[arg(long)]
    normalize_channel: Option<bool>,
    /// exact or circulant.
    #[arg(long)]
    channel_model: Option<String>,
}

#[derive(Args)]
struct SpacingArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Radii in wavelengths: comma list or start:stop:step.
    #[arg(long)]
    radius_over_lambda: Option<String>,
    /// Eigenvalue-spread acceptance threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Largest antenna count to sweep.
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct ComplexityArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Alphabet size K.
    #[arg(long)]
    k: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::ChannelReport(args) => run_channel_report(args),
        Command::BerSweep(args) => run_ber_sweep_cmd(args),
        Command::SpacingSearch(args) => run_spacing_search(args),
        Command::Complexity(args) => run_complexity(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Runtime(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

/// Turn `--set` pairs plus dedicated flags into ordered overrides
/// (dedicated flags win).
fn overrides(
    common: &CommonArgs,
    extra: &[(&str, Option<String>)],
) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for raw in &common.set {
        let (k, v) = raw
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got `{raw}`")))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(n) = common.n {
        pairs.push(("n".into(), n.to_string()));
    }
    if let Some(seed) = common.seed {
        pairs.push(("seed".into(), seed.to_string()));
    }
    for (key, value) in extra {
        if let Some(v) = value {
            pairs.push(((*key).to_string(), v.clone()));
        }
    }
    Ok(pairs)
}

fn resolve(
    common: &CommonArgs,
    default_link: Option<uca_mimo::geometry::LinkConfig>,
    extra: &[(&str, Option<String>)],
) -> Result<Settings, CliError> {
    let pairs = overrides(common, extra)?;
    Settings::resolve(
        default_link,
        common.preset.as_deref(),
        common.config.as_deref(),
        &pairs,
    )
}

/// Run `f` on a worker pool sized by UCA_MIMO_WORKERS when set; results are
/// worker-count independent by the library's reproducibility contract.
fn with_worker_pool<T>(f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    match std::env::var("UCA_MIMO_WORKERS") {
        Err(_) => Ok(f()),
        Ok(raw) => {
            let workers: usize = raw
                .parse()
                .map_err(|_| CliError::Config(format!("UCA_MIMO_WORKERS: not a count: `{raw}`")))?;
            #[cfg(feature = "parallel")]
            {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .map_err(|e| CliError::Runtime(format!("worker pool: {e}")))?;
                Ok(pool.install(f))
            }
            #[cfg(not(feature = "parallel"))]
            {
                let _ = workers;
                Ok(f())
            }
        }
    }
}

fn run_ber_sweep_cmd(args: BerArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let extra = [
        ("scheme", args.scheme.clone()),
        ("constellation", args.constellation.clone()),
        ("snr_db", args.snr.clone()),
        ("trials", args.trials.map(|t| t.to_string())),
        (
            "normalize_channel",
            args.normalize_channel.map(|b| b.to_string()),
        ),
        ("channel_model", args.channel_model.clone()),
    ];
    let settings = resolve(&args.common, None, &extra)?;
    let constellation = settings.constellation()?;

    let mut results: Vec<(Scheme, Vec<BerPoint>)> = Vec::new();
    for scheme in settings.scheme.schemes() {
        let mut cfg = SweepConfig::new(settings.link.clone(), scheme, constellation.clone());
        cfg.snr_db_points = settings.snr_db.clone();
        cfg.trials_per_point = settings.trials;
        cfg.seed = settings.seed;
        cfg.normalize_channel = settings.normalize_channel;
        cfg.channel_model = settings.channel_model;
        cfg.hypothesis_cap = settings.hypothesis_cap;
        let points = with_worker_pool(move || run_ber_sweep(&cfg))??;
        results.push((scheme, points));
    }

    let mut csv = String::from("snr_db,scheme,trials,bit_errors,ber,theory_ber\n");
    for (scheme, points) in &results {
        for p in points {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.snr_db,
                scheme.label(),
                p.trials,
                p.bit_errors,
                sig17(p.ber),
                p.theory_ber.map(sig17).unwrap_or_default()
            ));
        }
    }
    write_file(&args.common.out, "ber_sweep.csv", &csv)?;
    write_manifest(
        &args.common.out,
        "ber-sweep",
        &settings,
        &["ber_sweep.csv"],
        start.elapsed(),
    )?;

    println!(
        "ber-sweep: {} constellation, {} channel{}, {} trials/point, seed {}",
        settings.constellation,
        settings.channel_model.label(),
        if settings.normalize_channel {
            ", normalized gain"
        } else {
            ""
        },
        settings.trials,
        settings.seed
    );
    println!(
        "{:>8} {:>13} {:>12} {:>12} {:>12}",
        "snr_db", "scheme", "bit_errors", "ber", "theory_ber"
    );
    for (scheme, points) in &results {
        for p in points {
            println!(
                "{:>8} {:>13} {:>12} {:>12.4e} {:>12}",
                p.snr_db,
                scheme.label(),
                p.bit_errors,
                p.ber,
                p.theory_ber
                    .map(|t| format!("{t:.4e}"))
                    .unwrap_or_else(|| "-".into())
            );
        }
    }
    println!("wrote {}", args.common.out.join("ber_sweep.csv").display());
    Ok(())
}

fn run_spacing_search(args: SpacingArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let extra = [
        ("radius_over_lambda", args.radius_over_lambda.clone()),
        ("threshold", args.threshold.map(|t| t.to_string())),
        ("n_max", args.n_max.map(|n| n.to_string())),
    ];
    // Without a preset or config the search uses the documented aligned
    // base link (d = 0.21 m, lambda = 0.01 m) rather than the tilted
    // evaluation link.
    let settings = resolve(&args.common, Some(spacing_base_link()), &extra)?;
    let lambda = settings.link.wavelength;
    let radii: Vec<f64> = settings
        .radius_over_lambda
        .iter()
        .map(|r| r * lambda)
        .collect();
    let points = spacing_search(&radii, settings.threshold, &settings.link, settings.n_max)?;

    let mut csv = String::from("radius_over_lambda,best_n,spacing_over_lambda,sigma_sq\n");
    for p in &points {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            sig17(p.radius / lambda),
            p.best_n,
            sig17(p.spacing / lambda),
            sig17(p.sigma_sq)
        ));
    }
    write_file(&args.common.out, "spacing_search.csv", &csv)?;
    write_manifest(
        &args.common.out,
        "spacing-search",
        &settings,
        &["spacing_search.csv"],
        start.elapsed(),
    )?;

    println!(
        "spacing-search: d = {} m, lambda = {} m, spread threshold {}, N up to {}",
        settings.link.d_centers, lambda, settings.threshold, settings.n_max
    );
    println!(
        "{:>10} {:>8} {:>16} {:>12}",
        "R/lambda", "best_n", "spacing/lambda", "sigma_sq"
    );
    for p in &points {
        println!(
            "{:>10.3} {:>8} {:>16.3} {:>12.3e}{}",
            p.radius / lambda,
            p.best_n,
            p.spacing / lambda,
            p.sigma_sq,
            if p.satisfied {
                ""
            } else {
                "  (no count met the threshold; reporting N = 2)"
            }
        );
    }
    println!(
        "wrote {}",
        args.common.out.join("spacing_search.csv").display()
    );
    Ok(())
}

fn run_complexity(args: ComplexityArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let extra = [("k", args.k.map(|k| k.to_string()))];
    let settings = resolve(&args.common, None, &extra)?;
    let n = settings.link.n_tx as u64;
    let k = settings.k;
    let fast = complexity_counts(n, k, Scheme::Proposed)?;
    let trad = complexity_counts(n, k, Scheme::Traditional)?;

    let mut csv = String::from("scheme,n,k,additions,multiplications\n");
    for report in [&fast, &trad] {
        csv.push_str(&format!(
            "{},{n},{k},{},{}\n",
            report.scheme.label(),
            report.complex_additions,
            report.complex_multiplications
        ));
    }
    write_file(&args.common.out, "complexity.csv", &csv)?;
    write_manifest(
        &args.common.out,
        "complexity",
        &settings,
        &["complexity.csv"],
        start.elapsed(),
    )?;

    println!("complexity: N = {n}, K = {k}");
    println!(
        "{:>13} {:>24} {:>24}",
        "scheme", "complex_additions", "complex_multiplications"
    );
    for report in [&fast, &trad] {
        println!(
            "{:>13} {:>24} {:>24}",
            report.scheme.label(),
            report.complex_additions,
            report.complex_multiplications
        );
    }
    println!(
        "traditional / fast: additions {}x, multiplications {}x",
        rounded_ratio(&trad.complex_additions, &fast.complex_additions),
        rounded_ratio(&trad.complex_multiplications, &fast.complex_multiplications)
    );
    println!("wrote {}", args.common.out.join("complexity.csv").display());
    Ok(())
}

fn run_channel_report(args: CommonArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let settings = resolve(&args, None, &[])?;
    let link = &settings.link;
    let exact = exact_channel(link)?;
    let circ = circulant_channel(link)?;
    let pair = compensation_pair(link)?;
    let model = model_channel(&pair, &circ)?;
    let delta_sq = approximation_variance(&exact, &pair, &circ)?;
    let sigma_sq = uca_mimo::channel::eigenvalue_spread(circ.eigenvalues())?;

    let conj_delta: Vec<_> = pair.delta().iter().map(|z| z.conj()).collect();
    let conj_gamma: Vec<_> = pair.gamma().iter().map(|z| z.conj()).collect();
    let compensated = exact
        .entries()
        .scale_rows(&conj_delta)
        .scale_cols(&conj_gamma);
    let residual_compensated = circulant_residual(&compensated)?;
    let residual_uncompensated = circulant_residual(exact.entries())?;

    let mut metrics = String::from("metric,value\n");
    metrics.push_str(&format!("n,{}\n", link.n_tx));
    metrics.push_str(&format!(
        "d_reference,{}\n",
        sig17(reference_distance(link))
    ));
    metrics.push_str(&format!("sigma_sq,{}\n", sig17(sigma_sq)));
    metrics.push_str(&format!("delta_sq,{}\n", sig17(delta_sq)));
    metrics.push_str(&format!(
        "circulant_residual_uncompensated,{}\n",
        sig17(residual_uncompensated)
    ));
    metrics.push_str(&format!(
        "circulant_residual_compensated,{}\n",
        sig17(residual_compensated)
    ));
    write_file(&args.out, "channel_metrics.csv", &metrics)?;

    let mut mat = String::from("name,row,col,re,im\n");
    let mut push_matrix = |name: &str, m: &uca_mimo::linalg::ComplexMatrix| {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let z = m.get(r, c);
                mat.push_str(&format!("{name},{r},{c},{},{}\n", sig17(z.re), sig17(z.im)));
            }
        }
    };
    push_matrix("h_exact", exact.entries());
    push_matrix("h_circulant", circ.matrix());
    push_matrix("h_model", &model);
    let mut push_vector = |name: &str, v: &[num_complex::Complex64]| {
        for (i, z) in v.iter().enumerate() {
            mat.push_str(&format!("{name},0,{i},{},{}\n", sig17(z.re), sig17(z.im)));
        }
    };
    push_vector("first_row", circ.first_row());
    push_vector("eigenvalues", circ.eigenvalues());
    push_vector("subchannel_gains", &circ.subchannel_gains());
    push_vector("gamma", pair.gamma());
    push_vector("delta", pair.delta());
    write_file(&args.out, "channel_matrices.csv", &mat)?;

    write_manifest(
        &args.out,
        "channel-report",
        &settings,
        &["channel_metrics.csv", "channel_matrices.csv"],
        start.elapsed(),
    )?;

    println!(
        "channel-report: N = M = {}, d = {} m, lambda = {} m",
        link.n_tx, link.d_centers, link.wavelength
    );
    println!("  reference distance D : {:.6} m", reference_distance(link));
    println!("  eigenvalue spread    : {sigma_sq:.6e}");
    println!("  approximation error  : delta^2 = {delta_sq:.6}");
    println!(
        "  circulant residual   : {residual_uncompensated:.4} raw -> {residual_compensated:.4} compensated"
    );
    println!(
        "wrote {} and {}",
        args.out.join("channel_metrics.csv").display(),
        args.out.join("channel_matrices.csv").display()
    );
    Ok(())
}
