use clap::Parser;
use regdual::cli::{apply_seed_env, error_line, exit_code, run, Cli};

fn main() {
    let mut cli = Cli::parse();
    apply_seed_env(&mut cli);
    match run(&cli, &mut std::io::stdin()) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("{}", error_line(&e));
            std::process::exit(exit_code(&e));
        }
    }
}
