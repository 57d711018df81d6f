//! Batch front end for `dampflow`: config files, single runs, parameter
//! sweeps and the acceptance suites.
//!
//! Exit codes are shared by all commands: 0 for a global run (or all checks
//! passing), 2 when blowup was detected, 1 for errors and failed checks.

pub mod check;
pub mod commands;
pub mod config;
pub mod output;

pub use check::{Outcome, Session, Suite};
pub use commands::{cmd_run, cmd_sweep, resolve_out_dir, Axis};
pub use config::{load_config, parse_config, RawConfig, RunConfig};

/// Run `suite`, print one line per criterion and return the exit code.
pub fn cmd_check(suite: Suite, out: &mut impl std::io::Write) -> std::io::Result<(Vec<Outcome>, i32)> {
    let session = Session::new();
    let mut outcomes = Vec::new();
    for &id in suite.criteria() {
        let o = session.criterion(id);
        writeln!(out, "{o}")?;
        for n in &o.notes {
            writeln!(out, "     note: {n}")?;
        }
        outcomes.push(o);
    }
    let failed: Vec<String> =
        outcomes.iter().filter(|o| !o.passed).map(|o| format!("[{}] {}", o.id, o.title)).collect();
    let passed = outcomes.len() - failed.len();
    writeln!(out, "{passed}/{} criteria passed", outcomes.len())?;
    if failed.is_empty() {
        Ok((outcomes, 0))
    } else {
        writeln!(out, "failed: {}", failed.join(", "))?;
        Ok((outcomes, 1))
    }
}
