use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use sptq_core::cli::{run, thread_cap, Args};
use sptq_core::Result;

fn main() -> ExitCode {
    let args = Args::parse();
    match try_main(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}

fn try_main(args: &Args) -> Result<()> {
    if let Some(n) = thread_cap()? {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = run(args)?;
    // stdout may be a closed pipe; the files are already written
    let mut out = std::io::stdout().lock();
    let _ = write!(out, "{}", outcome.summary);
    for p in &outcome.written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(())
}
