use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or(drift_arbiter_cli::LOG_ENV, "warn"),
    )
    .init();
    ExitCode::from(drift_arbiter_cli::main_with_args(std::env::args_os()))
}
