use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = pou_calculus::cli::run(std::env::args_os(), &mut io::stdin().lock());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = io::stdout().flush();
    ExitCode::from(outcome.code as u8)
}
