//! Runs the full acceptance table and prints one line per criterion.
//! Filter with `cargo test --test acceptance -- <key>[,<key>...]`.

use std::process::ExitCode;

use vaxfront_core::verify::{run_all, select, Fixtures};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let only = if args.is_empty() { None } else { Some(args.join(",")) };
    let criteria = match select(only.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let outcomes = run_all(&criteria, &Fixtures::bundled(), 0);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
