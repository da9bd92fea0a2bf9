//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Run with `cargo test -p clight --test acceptance`.

#[path = "../common/mod.rs"]
mod common;

mod eval_table;
mod layout;
mod memory;
mod programs;

use std::process::ExitCode;
use std::time::Instant;

/// A criterion's verdict: a one-line summary, or the list of violations.
pub type Verdict = Result<String, Vec<String>>;

/// Collects violations, keeping the first few for the report.
#[derive(Default)]
pub struct Violations {
    pub count: usize,
    pub shown: Vec<String>,
}

impl Violations {
    pub fn push(&mut self, msg: impl Into<String>) {
        self.count += 1;
        if self.shown.len() < 10 {
            self.shown.push(msg.into());
        }
    }

    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.push(msg());
        }
    }

    pub fn verdict(self, summary: String) -> Verdict {
        if self.count == 0 {
            Ok(summary)
        } else {
            let mut v = self.shown;
            if self.count > v.len() {
                v.push(format!("... {} violations in total", self.count));
            }
            Err(v)
        }
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("layout properties", layout::check),
        ("memory algebra", memory::check),
        ("addition table", eval_table::check),
        ("statement outcomes", outcomes::check),
        ("fuel laws", programs::fuel_laws),
        ("determinism", programs::determinism),
        ("golden behaviors", programs::golden),
        ("front-end round trip", frontend::round_trip),
        ("desugaring equivalence", frontend::desugaring),
        ("goes-wrong catalogue", programs::goes_wrong),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(summary) => println!("PASS {:>2}. {} ({}; {:.2}s)", i + 1, name, summary, secs),
            Err(problems) => {
                failed += 1;
                println!("FAIL {:>2}. {} ({:.2}s)", i + 1, name, secs);
                for p in problems {
                    println!("       {}", p);
                }
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
