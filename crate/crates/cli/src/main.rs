use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polybern_cli::{
    cmd_alpha, cmd_conjecture, cmd_multi, cmd_table, cmd_value, cmd_verify, CmdResult, Format,
    RangeOverrides,
};

/// Exact poly-Bernoulli and multi-poly-Bernoulli numbers.
#[derive(Parser)]
#[command(name = "polybern", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// B_n^(k) for a single integer index k.
    Value {
        n: u32,
        #[arg(allow_hyphen_values = true)]
        k: i64,
    },
    /// B_n^(k1,...,kr) for a comma-separated index list such as `0,-1`.
    Multi {
        #[arg(allow_hyphen_values = true)]
        indices: String,
        n: u32,
    },
    /// Power expansion of B_n^(-k1,...,-kr), given the magnitudes `k1,...,kr`.
    Alpha { magnitudes: String },
    /// One of the three reference tables.
    Table { which: u32 },
    /// Check identities by id, or `all`, over a parameter range.
    Verify {
        #[arg(required = true)]
        ids: Vec<String>,
        #[arg(long)]
        max_n: Option<u32>,
        #[arg(long)]
        max_k: Option<u32>,
        #[arg(long)]
        max_r: Option<u32>,
        #[arg(long)]
        max_m: Option<u32>,
        #[arg(long)]
        max_i: Option<u32>,
        #[arg(long)]
        cap: Option<u32>,
        /// Let a failing conjecture make the exit status 1.
        #[arg(long)]
        strict_conjecture: bool,
    },
    /// Sweep the conjectured triangle expansion of B_n^(-k).
    Conjecture {
        #[arg(long, default_value_t = 10)]
        max_k: u32,
        #[arg(long, default_value_t = 9)]
        max_r: u32,
        #[arg(long, default_value_t = 6)]
        max_n: u32,
        #[arg(long)]
        strict_conjecture: bool,
    },
}

fn run(cli: Cli) -> CmdResult {
    let format = cli.format;
    match cli.command {
        Command::Value { n, k } => cmd_value(n, k, format),
        Command::Multi { indices, n } => cmd_multi(&indices, n, format),
        Command::Alpha { magnitudes } => cmd_alpha(&magnitudes, format),
        Command::Table { which } => cmd_table(which, format),
        Command::Verify {
            ids,
            max_n,
            max_k,
            max_r,
            max_m,
            max_i,
            cap,
            strict_conjecture,
        } => {
            let overrides = RangeOverrides {
                max_n,
                max_k,
                max_r,
                max_m,
                max_i,
                cap,
            };
            cmd_verify(&ids, &overrides, strict_conjecture, format)
        }
        Command::Conjecture {
            max_k,
            max_r,
            max_n,
            strict_conjecture,
        } => cmd_conjecture(max_k, max_r, max_n, strict_conjecture, format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(output) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(output.text.as_bytes())
                .and_then(|()| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::from(output.code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
