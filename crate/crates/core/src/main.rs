use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ergolab::cli::{execute, exit_code, Command};

#[derive(Parser, Debug)]
#[command(name = "ergolab", version, about = "Weighted and twisted ergodic average experiments")]
struct Args {
    /// avg | ww-scan | cocycle-check | skew-ergodicity | unique-ergodicity | derndinger-demo
    command: String,
    /// Experiment config (flat `key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; defaults to the config's `out`, else stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command: Command = match args.command.parse() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(k) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: cannot start {k} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(command, &args.config, args.out.as_deref(), args.seed) {
        Ok((output, Some(_))) => {
            print!("{}", output.summary);
            ExitCode::SUCCESS
        }
        Ok((output, None)) => {
            let mut stdout = std::io::stdout().lock();
            let written = output
                .table
                .to_csv_string()
                .map(|csv| stdout.write_all(csv.as_bytes()));
            if !matches!(written, Ok(Ok(()))) {
                eprintln!("error: cannot write CSV to stdout");
                return ExitCode::from(1);
            }
            eprint!("{}", output.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
