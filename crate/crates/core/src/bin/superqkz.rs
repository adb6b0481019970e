use std::process::ExitCode;

use clap::Parser;

use superqkz_core::config::{parse_config, Cli};
use superqkz_core::runner::run_suites;

const CONFIG_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(CONFIG_ERROR);
        }
        Err(e) => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let cfg = match parse_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("superqkz: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let doc = match run_suites(&cfg) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("superqkz: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let json = doc.to_json();
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("superqkz: cannot write {}: {e}", path.display());
                return ExitCode::from(CONFIG_ERROR);
            }
        }
        None => println!("{json}"),
    }
    let s = &doc.summary;
    eprintln!("{} checks: {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
    ExitCode::from(doc.exit_code() as u8)
}
