//! All acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::process::ExitCode;

use dampflow_cli::{cmd_check, Suite};

fn main() -> ExitCode {
    let start = std::time::Instant::now();
    let (_, code) = cmd_check(Suite::All, &mut std::io::stdout()).expect("stdout");
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
