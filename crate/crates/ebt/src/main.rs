use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ebt::cli::run(std::env::args_os()))
}
