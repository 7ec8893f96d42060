use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(collstats::cli::run(std::env::args_os()))
}
