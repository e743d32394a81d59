use clap::Parser;

use farkas_balance::cli::{self, Cli, EXIT_INPUT, EXIT_OK};

fn main() {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // clap reports usage errors with code 2, which is reserved here
            std::process::exit(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let env_tol = std::env::var(cli::TOLERANCE_ENV).ok();
    let code = cli::run(
        parsed,
        env_tol.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
