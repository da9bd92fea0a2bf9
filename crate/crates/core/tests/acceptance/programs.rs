use clight::exec::DEFAULT_FUEL;
use clight::world::format_trace;
use clight::Behavior;

use crate::common::{corpus, corpus_program, report};
use crate::{Verdict, Violations};

const MAX_EXP: u32 = 20;

/// Behaviors at fuel 2^k are monotone: a final answer never changes with
/// more fuel, and a bottom trace is a prefix of every later trace.
pub fn fuel_laws() -> Verdict {
    let mut v = Violations::default();
    let programs = corpus();
    let mut runs = 0;
    for p in &programs {
        let mut prev: Option<(u64, Behavior)> = None;
        for k in 0..=MAX_EXP {
            let fuel = 1u64 << k;
            let b = p.run(fuel);
            runs += 1;
            if let Some((f0, b0)) = &prev {
                match b0 {
                    Behavior::OutOfFuel { trace } => {
                        let t0 = format_trace(trace);
                        let t = format_trace(b.trace());
                        v.check(t.starts_with(&t0), || {
                            format!("{}: trace at fuel {} is not a prefix of the trace at fuel {}", p.name, f0, fuel)
                        });
                    }
                    _ => v.check(b == *b0, || {
                        format!("{}: fuel {} gave {}, fuel {} gave {}", p.name, f0, b0, fuel, b)
                    }),
                }
            }
            prev = Some((fuel, b));
        }
    }
    v.verdict(format!("{} programs, {} runs", programs.len(), runs))
}

pub fn determinism() -> Verdict {
    let mut v = Violations::default();
    let programs = corpus();
    for p in &programs {
        let first = report(&p.run(DEFAULT_FUEL));
        let second = report(&p.run(DEFAULT_FUEL));
        v.check(first == second, || format!("{}: two runs differ:\n{}\n{}", p.name, first, second));
        v.check(first == p.expect, || format!("{}: got {:?}, expected {:?}", p.name, first, p.expect));
    }
    v.verdict(format!("{} programs run twice", programs.len()))
}

fn terminates(code: i32) -> Behavior {
    Behavior::Terminates { trace: Vec::new(), code }
}

pub fn golden() -> Verdict {
    let mut v = Violations::default();
    let factorial: i32 = (1..=5).product();
    let gcd = {
        let (mut a, mut b) = (252i32, 105i32);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let dot = 3 * -2 + 4 * 7;
    let union_field = ((-1i32 as u32) >> 28) as i32 + 40;
    let array_sum: i32 = (0..6).map(|i| 3 * i + 1).sum();
    let cases = [
        ("factorial", factorial),
        ("gcd", gcd),
        ("struct_point", dot),
        ("union_field", union_field),
        ("array_sum_ptr", array_sum),
    ];
    for (name, code) in cases {
        let got = corpus_program(name).run(DEFAULT_FUEL);
        v.check(got == terminates(code), || format!("{}: got {}, expected terminates {}", name, got, code));
    }

    // echo replays its world exactly
    let echo = corpus_program("echo");
    let got = echo.run(DEFAULT_FUEL);
    let script = echo.world.clone().unwrap_or_default();
    v.check(
        matches!(got, Behavior::Terminates { code: 0, .. }) && format_trace(got.trace()) == script,
        || format!("echo: got {} with trace {:?}", got, format_trace(got.trace())),
    );

    let spin = corpus_program("while_one");
    for k in 0..=MAX_EXP {
        let got = spin.run(1 << k);
        v.check(got == Behavior::OutOfFuel { trace: Vec::new() }, || {
            format!("while_one at fuel 2^{}: {}", k, got)
        });
    }
    v.verdict(format!("{} programs against computed values", cases.len() + 2))
}

pub const CATALOGUE: [&str; 8] = [
    "div_zero",
    "int_min_div",
    "shift_big",
    "cross_block_cmp",
    "uninit_local",
    "struct_assign",
    "misoffset_call",
    "missing_answer",
];

pub fn goes_wrong() -> Verdict {
    let mut v = Violations::default();
    for name in CATALOGUE {
        let got = corpus_program(name).run(DEFAULT_FUEL);
        v.check(got.goes_wrong(), || format!("{}: got {}", name, got));
    }
    v.verdict(format!("{} programs go wrong", CATALOGUE.len()))
}
