use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use koutlab::cli::{self, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    if let Ok(t) = std::env::var("KOUTLAB_THREADS") {
        let threads = match t.trim().parse::<usize>() {
            Ok(v) if v > 0 => v,
            _ => {
                eprintln!("error: KOUTLAB_THREADS must be a positive integer, got '{t}'");
                return ExitCode::from(2);
            }
        };
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    }

    let args = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match cli::run(args, &mut out) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            cli::error_exit_code(&e)
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
