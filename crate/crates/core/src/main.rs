use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use ptinfo::cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ptinfo: error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> ptinfo::Result<u8> {
    let config = RunConfig::from_cli(cli)?;
    let mut out: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let outcome = run(&config, &mut out, &mut io::stderr())?;
    out.flush()?;
    Ok(outcome.exit_code())
}
