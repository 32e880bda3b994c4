use std::io;
use std::process::ExitCode;

use steklov_cli::{parse_args, run};

fn configure_threads() {
    if let Some(n) = std::env::var("STEKLOV_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let config = match parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            if e.exit_code == 0 {
                print!("{}", e.message);
            } else {
                eprintln!("{}", e.message);
            }
            return ExitCode::from(e.exit_code as u8);
        }
    };
    configure_threads();
    let code = run(&config, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
