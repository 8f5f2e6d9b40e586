use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use commgames_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Help and version are not failures; clap's own code 2 would
            // collide with "infeasible".
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli).and_then(|out| {
        match &cli.output {
            Some(path) => std::fs::write(path, &out.body).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?,
            None => {
                let _ = std::io::stdout().write_all(out.body.as_bytes());
            }
        }
        Ok(out.status)
    }) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
