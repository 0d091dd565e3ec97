//! Command-line front end for the full-duplex link simulator.

use clap::{Parser, Subcommand};
use fdlink::harness::{self, ScenarioConfig, SchemeSpec};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fdlink",
    version,
    about = "Link-level Monte Carlo simulator for a full-duplex multi-user MIMO system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep; writes a CSV and a resolved-config sidecar.
    Sweep {
        /// Configuration file (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path; the sidecar is written next to it as <OUT>.cfg.
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: one per core). Results are identical
        /// for any worker count.
        #[arg(long)]
        workers: Option<usize>,
        /// Config override, same keys as the file; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run one seeded trial of one scheme and print the outcome.
    Trial {
        /// Configuration file (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scheme: scdc, scdc<taps>, sbfd, hd, or ideal.
        #[arg(long, default_value = "scdc")]
        scheme: String,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Config override, same keys as the file; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run the documented-example check suite of every module.
    Selftest,
}

fn build_config(
    config: &Option<PathBuf>,
    set: &[String],
    seed: Option<u64>,
) -> fdlink::Result<ScenarioConfig> {
    let mut cfg = match config {
        Some(path) => harness::parse_config(&std::fs::read_to_string(path)?)?,
        None => ScenarioConfig::default(),
    };
    for kv in set {
        let (key, value) = kv.split_once('=').ok_or_else(|| {
            fdlink::Error::Config(format!("override {kv:?} is not of the form KEY=VALUE"))
        })?;
        harness::apply_key(&mut cfg, key.trim(), value.trim())?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn do_sweep(cfg: &ScenarioConfig, out: &Path) -> fdlink::Result<()> {
    let result = harness::run_sweep_with(cfg, |row| {
        let taps = row
            .taps
            .map(|t| format!(" taps={t}"))
            .unwrap_or_default();
        eprintln!(
            "{}={} {}{}: mean {:.4} bits/use, se {:.4}, infeasible {:.1}%",
            cfg.sweep_variable.key(),
            row.sweep_value,
            row.scheme,
            taps,
            row.mean_rate,
            row.std_error,
            100.0 * row.infeasible_fraction,
        );
    })?;
    harness::write_outputs(&result, cfg, out)?;
    println!("wrote {} rows to {}", result.rows.len(), out.display());
    Ok(())
}

fn cmd_sweep(cfg: ScenarioConfig, out: PathBuf, workers: Option<usize>) -> fdlink::Result<()> {
    match workers {
        Some(0) => Err(fdlink::Error::Config("workers must be >= 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| fdlink::Error::Config(format!("worker pool: {e}")))?;
            pool.install(|| do_sweep(&cfg, &out))
        }
        None => do_sweep(&cfg, &out),
    }
}

fn cmd_trial(cfg: ScenarioConfig, scheme: &str) -> fdlink::Result<()> {
    let spec = SchemeSpec::parse(scheme)
        .ok_or_else(|| fdlink::Error::Config(format!("unknown scheme {scheme:?}")))?;
    let cp = cfg.channel_params();
    let mut sp = cfg.scheme_params();
    if let Some(taps) = spec.taps {
        sp.n_taps = taps;
    }
    let master = harness::point_master_seed(cfg.seed, 0, 0);
    let outcome = harness::run_trial(&cp, &sp, &spec, cfg.seed, 0, master, 0)?;
    println!("scheme: {}", spec.token());
    println!("rate_bits_per_use: {}", outcome.rate_bits_per_use);
    println!("tau_dl_sq: {}", outcome.tau_dl_sq);
    println!("feasible: {}", outcome.feasible);
    Ok(())
}

fn cmd_selftest() -> u8 {
    let outcomes = fdlink::selftest::run_all();
    let mut failed = 0usize;
    for o in &outcomes {
        if o.passed {
            println!("ok   {}", o.name);
        } else {
            failed += 1;
            println!("FAIL {} - {}", o.name, o.detail);
        }
    }
    println!("{} checks, {} failed", outcomes.len(), failed);
    if failed == 0 {
        0
    } else {
        2
    }
}

fn classify(e: &fdlink::Error) -> u8 {
    match e {
        fdlink::Error::Config(_) | fdlink::Error::PilotTooShort { .. } => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep { config, out, seed, workers, set } => {
            build_config(&config, &set, seed).and_then(|cfg| cmd_sweep(cfg, out, workers))
        }
        Command::Trial { config, scheme, seed, set } => {
            build_config(&config, &set, seed).and_then(|cfg| cmd_trial(cfg, &scheme))
        }
        Command::Selftest => return ExitCode::from(cmd_selftest()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}
