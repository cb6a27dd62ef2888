use std::io::{self, Read, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LOG_LEVEL", "error")).init();

    let args: Vec<_> = std::env::args_os().collect();
    let mut stdin = String::new();
    if args.iter().skip(1).any(|a| a == "-") {
        let _ = io::stdin().read_to_string(&mut stdin);
    }
    let outcome = opbracket_cli::run(args, &stdin);
    log::debug!("exit code {}", outcome.code);
    let _ = io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
