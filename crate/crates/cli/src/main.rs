use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    ExitCode::from(coulomb_info_cli::run(std::env::args_os(), &mut stdout.lock()))
}
