use std::process::ExitCode;

use noisegate::cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NOISEGATE_LOG", "warn")).init();
    let cmd = match cli::cli_parse(std::env::args_os()) {
        Ok(cmd) => cmd,
        Err(e) => e.exit(),
    };
    match cli::run(cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
