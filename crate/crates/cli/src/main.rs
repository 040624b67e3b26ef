use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mubforge_cli::run(std::env::args_os()))
}
