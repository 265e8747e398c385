use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hybrid_cr::harness::{emit_plot, load_config_file, run_sweep, write_csv, SweepSpec};
use hybrid_cr::{Error, SchemeRegistry};

#[derive(Parser)]
#[command(version, about = "Monte-Carlo sum-rate sweeps for hybrid precoding in underlay cognitive radio")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write rows.csv, aggregates.csv and optionally sum_rate.svg.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Overrides `master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        plot: bool,
    },
    /// Check a config and print the derived dimensions of every sweep point.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config_error() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn print_dimensions(spec: &SweepSpec) {
    println!(
        "channel model: {}, trials: {}, master seed: {}",
        spec.channel_model.name(),
        spec.trials,
        spec.master_seed
    );
    println!("schemes: {}", spec.schemes.join(", "));
    let ths: Vec<String> = spec.i_th_db.iter().map(|v| v.to_string()).collect();
    println!("i_th_db: {}", ths.join(", "));
    for k in spec.k_list() {
        let c = spec.config_for(k);
        println!(
            "K = {k}: N_t = {}, N_r = {}, N_r0 = {}, M_t = {}, M_r = {}, D = {}, L = {}, K·D = {}, analog precoder {}x{}, per-user baseband channel {}x{}",
            c.n_tx,
            c.n_rx,
            c.n_rx_primary,
            c.rf_tx,
            c.rf_rx,
            c.streams,
            c.paths,
            c.total_streams(),
            c.n_tx,
            c.rf_tx,
            c.rf_rx,
            c.rf_tx
        );
    }
}

fn simulate(
    config: PathBuf,
    out_dir: PathBuf,
    seed: Option<u64>,
    threads: usize,
    plot: bool,
) -> Result<(), Error> {
    let mut spec = load_config_file(&config)?;
    if let Some(s) = seed {
        spec.master_seed = s;
    }
    let out = run_sweep(&spec, &SchemeRegistry::builtin(), threads)?;
    let (rows_path, agg_path) = write_csv(&out.rows, &out.aggregates, &out_dir)?;
    println!("{:<16} {:>8} {:>4} {:>6} {:>6} {:>12} {:>10}", "scheme", "i_th_db", "k", "used", "disc", "mean", "stderr");
    for a in &out.aggregates {
        println!(
            "{:<16} {:>8} {:>4} {:>6} {:>6} {:>12.4} {:>10.4}",
            a.scheme_id, a.i_th_db, a.k, a.trials_used, a.trials_discarded, a.mean_sum_rate, a.stderr_sum_rate
        );
    }
    println!("wrote {}", rows_path.display());
    println!("wrote {}", agg_path.display());
    if plot {
        let svg = out_dir.join("sum_rate.svg");
        match emit_plot(&out.aggregates, &svg) {
            Ok(()) => println!("wrote {}", svg.display()),
            Err(Error::NoData) => eprintln!("warning: every trial was discarded, no plot written"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            out_dir,
            seed,
            threads,
            plot,
        } => simulate(config, out_dir, seed, threads, plot),
        Command::Validate { config } => load_config_file(&config).map(|spec| {
            println!("config OK");
            print_dimensions(&spec);
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
