use std::io::{self, Write};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let code =
        odsl::cli::dispatch(&argv, odsl::cli::Io { stdin: &mut stdin, stdout: &mut stdout, stderr: &mut stderr });
    let _ = stdout.flush();
    std::process::exit(code);
}
