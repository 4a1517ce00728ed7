use std::process::ExitCode;

fn main() -> ExitCode {
    lyscan::cli::run(std::env::args())
}
