use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(su21_cli::run_cli(std::env::args_os()))
}
