use std::process::ExitCode;

use spinthermo_cli::{execute, parse_args};

fn main() -> ExitCode {
    let config = match parse_args(std::env::args_os()) {
        Ok(config) => config,
        Err(e) => {
            let code = e.exit_code();
            if let spinthermo_cli::UsageError::Clap(clap_err) = &e {
                let _ = clap_err.print();
            } else {
                eprintln!("error: {e}");
            }
            return ExitCode::from(code as u8);
        }
    };
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}
