use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcb::cache::Cache;
use qcb::commands::{cmd_cb, cmd_tensor_cb, cmd_verify, Format};
use qcb::datum_file::load;
use qcb::CliError;

/// Canonical bases of quantum groups and their positivity checks.
#[derive(Parser)]
#[command(name = "qcb", version)]
struct Cli {
    /// Cache directory; defaults to $QCB_CACHE_DIR, else no cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical basis of f as divided-word expansions.
    Cb {
        /// Datum file, or one of a1, a2, a1-thick, a2-thick, rank2-affine.
        datum: String,
        /// A weight in ℕ[I], e.g. `1,1`.
        #[arg(long, conflicts_with = "max_tr")]
        weight: Option<String>,
        /// Every weight of trace at most N.
        #[arg(long)]
        max_tr: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Diamond basis and transition matrices of a tensor product.
    TensorCb {
        datum: String,
        /// Factors such as `LW:1 HW:1` for the lowest-weight times the
        /// highest-weight simple module.
        #[arg(long)]
        factors: String,
        /// Largest total depth of a listed element.
        #[arg(long, default_value_t = 2)]
        weight_depth: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Runs positivity and consistency checks; writes JSON lines.
    Verify {
        datum: String,
        /// `default`, or check names separated by commas.
        #[arg(long, default_value = "default")]
        suite: String,
        /// A JSON array of checks with parameters, instead of --suite.
        #[arg(long, conflicts_with = "suite")]
        config: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cache = Cache::open(cli.cache_dir.as_deref())?;
    let (text, ok, out) = match cli.cmd {
        Cmd::Cb { datum, weight, max_tr, format } => {
            (cmd_cb(&load(&datum)?, weight.as_deref(), max_tr, format, &cache)?, true, None)
        }
        Cmd::TensorCb { datum, factors, weight_depth, format } => {
            (cmd_tensor_cb(&load(&datum)?, &factors, weight_depth, format, &cache)?, true, None)
        }
        Cmd::Verify { datum, suite, config, jobs, out } => {
            let (text, ok) = cmd_verify(&load(&datum)?, &suite, config.as_deref(), jobs, &cache)?;
            (text, ok, out)
        }
    };
    match out {
        Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {}", p.display(), e)))?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("qcb: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
