use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use thz_fec::analyze::AnalyzeOptions;
use thz_fec::{analyze, link_sweep, simulate, CodeSpec, Grid, Operating, Setup, SimulateOptions, Table};
use thz_fec_core::analytics::DEFAULT_M_CAP;
use thz_fec_core::mdpc::DEFAULT_MAX_ITER;

#[derive(Parser)]
#[command(name = "thz-fec", version, about = "FEC analysis for two-channel THz links; all output is CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Uncoded SNR, BER and data rate per channel over a distance grid.
    LinkSweep {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Code rate, residual BER, block error and goodput over a distance grid.
    Analyze {
        /// mdpc:N:M or rs:S:K:R; with --optimize, mdpc:N or rs:S:R.
        #[arg(long)]
        code: CodeSpec,
        /// Re-select m (MDPC) or k (RS) at every distance.
        #[arg(long)]
        optimize: bool,
        /// Largest MDPC side the optimizer may choose.
        #[arg(long, default_value_t = DEFAULT_M_CAP)]
        m_cap: u64,
        /// Monte-Carlo blocks per distance; 0 disables the simulation columns.
        #[arg(long, default_value_t = 0)]
        blocks: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        chans: ChannelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte-Carlo campaign at fixed bit error rates (--p-main) or along the
    /// distance grid of a system.
    Simulate {
        /// mdpc:N:M or rs:S:K:R.
        #[arg(long)]
        code: CodeSpec,
        /// Main-channel bit error rate; omit to derive rates from the link.
        #[arg(long)]
        p_main: Option<f64>,
        /// Auxiliary-channel bit error rate (with --p-main).
        #[arg(long, default_value_t = 0.0, requires = "p_main")]
        p_aux: f64,
        #[arg(long, default_value_t = 100_000)]
        blocks: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        chans: ChannelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct SystemArgs {
    /// Preset name or path to a key = value config file.
    #[arg(long, default_value = "main-aux")]
    system: String,
}

#[derive(Args)]
struct ChannelArgs {
    /// Channel carrying the data bits.
    #[arg(long, default_value = "main")]
    main: String,
    /// Channel carrying the parity bits.
    #[arg(long, default_value = "aux")]
    aux: String,
    /// Fixed auxiliary distance in meters; defaults to the main distance.
    #[arg(long)]
    d_aux: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.5)]
    d_min: f64,
    #[arg(long, default_value_t = 20.0)]
    d_max: f64,
    #[arg(long, default_value_t = 0.5)]
    d_step: f64,
}

impl GridArgs {
    fn grid(&self) -> Grid {
        Grid { d_min: self.d_min, d_max: self.d_max, d_step: self.d_step }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(table: &Table, out: &OutArgs) -> anyhow::Result<()> {
    let bytes = table.to_csv()?;
    match &out.out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::LinkSweep { sys, grid, out } => {
            let setup = Setup::resolve(&sys.system)?;
            emit(&link_sweep(&setup, &grid.grid())?, &out)
        }
        Command::Analyze { code, optimize, m_cap, blocks, seed, max_iter, sys, chans, grid, out } => {
            let setup = Setup::resolve(&sys.system)?;
            if !optimize && !code.is_complete() {
                bail!(thz_fec::code::CodeError::Partial(code));
            }
            let opts = AnalyzeOptions {
                code,
                optimize,
                main: chans.main,
                aux: chans.aux,
                d_aux: chans.d_aux,
                m_cap,
                blocks,
                seed,
                max_iter,
            };
            let (table, warnings) = analyze(&setup, &grid.grid(), &opts)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            emit(&table, &out)
        }
        Command::Simulate { code, p_main, p_aux, blocks, seed, max_iter, sys, chans, grid, out } => {
            let op = match p_main {
                Some(p_main) => Operating::Rates { p_main, p_aux },
                None => Operating::Distances {
                    setup: Setup::resolve(&sys.system)?,
                    grid: grid.grid(),
                    main: chans.main,
                    aux: chans.aux,
                    d_aux: chans.d_aux,
                },
            };
            let opts = SimulateOptions { max_iter, ..SimulateOptions::new(code, blocks, seed) };
            emit(&simulate(&op, &opts)?, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
