use std::process::ExitCode;

use clap::Parser;

use pcr4bp_cli::{run, Args, EXIT_USAGE};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("pcr4bp: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    match run(&args) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("pcr4bp: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
