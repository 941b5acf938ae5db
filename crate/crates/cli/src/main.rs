use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    // Unlocked handles: worker threads write progress lines to stderr too.
    let code = adgreedy_cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
