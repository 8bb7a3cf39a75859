use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use spherecert::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let code = run(&cli, &mut out, &mut stderr.lock());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
