use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ecp_cli::run(std::env::args_os()))
}
