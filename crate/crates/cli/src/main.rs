use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use rootdistill_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let to_stdout = match &cli.command {
        rootdistill_cli::Command::Distill(a)
        | rootdistill_cli::Command::Sample(a)
        | rootdistill_cli::Command::Verify(a) => a.out.is_none(),
    };
    match run(&cli) {
        Ok(outcome) => {
            if to_stdout {
                print!("{}", outcome.artifact);
                let _ = std::io::stdout().flush();
                eprint!("{}", outcome.summary);
            } else {
                print!("{}", outcome.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rootdistill: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
