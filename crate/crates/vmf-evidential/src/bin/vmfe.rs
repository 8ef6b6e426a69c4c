use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::init();
    ExitCode::from(vmf_evidential::cli::run(std::env::args()) as u8)
}
