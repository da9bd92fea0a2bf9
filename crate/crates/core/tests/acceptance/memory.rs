use clight::layout::Chunk;
use clight::memory::{BlockId, Mem, Value};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use crate::Verdict;

const CASES: u32 = 10_000;

fn chunk() -> impl Strategy<Value = Chunk> {
    prop::sample::select(Chunk::ALL.to_vec())
}

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<i32>().prop_map(Value::Int),
        any::<f64>().prop_map(Value::Float),
        (1u64..8, any::<i32>()).prop_map(|(b, o)| Value::Ptr(BlockId(b), o)),
        Just(Value::Undef),
    ]
}

#[derive(Clone, Debug)]
enum Op {
    Alloc(i64, i64),
    Store(usize, Chunk, i64, Value),
    Free(usize),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        2 => (-16i64..16, 0i64..40).prop_map(|(lo, n)| Op::Alloc(lo, lo + n)),
        6 => (any::<prop::sample::Index>(), chunk(), -16i64..40, value())
            .prop_map(|(i, c, o, v)| Op::Store(i.index(1 << 20), c, o, v)),
        1 => any::<prop::sample::Index>().prop_map(|i| Op::Free(i.index(1 << 20))),
    ]
}

/// A memory built by a random operation sequence, with the blocks it
/// allocated. Failing stores and frees are skipped.
fn memory() -> impl Strategy<Value = (Mem, Vec<BlockId>)> {
    (1usize..4, prop::collection::vec(op(), 0..24)).prop_map(|(initial, ops)| {
        let mut m = Mem::new();
        let mut blocks: Vec<BlockId> = (0..initial).map(|_| m.alloc(0, 24)).collect();
        for op in ops {
            match op {
                Op::Alloc(lo, hi) => blocks.push(m.alloc(lo, hi)),
                Op::Store(i, c, o, v) => {
                    let _ = m.store(c, blocks[i % blocks.len()], o, v);
                }
                Op::Free(i) => {
                    let _ = m.free(blocks[i % blocks.len()]);
                }
            }
        }
        (m, blocks)
    })
}

/// What a load with `chunk` returns after a store of `v` with the same
/// chunk, computed with wide integer arithmetic.
pub fn normalized(chunk: Chunk, v: Value) -> Value {
    let wrap = |n: i32, bits: u32, signed: bool| {
        let m = 1i64 << bits;
        let r = i64::from(n).rem_euclid(m);
        let r = if signed && r >= m / 2 { r - m } else { r };
        Value::Int(r as i32)
    };
    match (chunk, v) {
        (Chunk::Int8Signed, Value::Int(n)) => wrap(n, 8, true),
        (Chunk::Int8Unsigned, Value::Int(n)) => wrap(n, 8, false),
        (Chunk::Int16Signed, Value::Int(n)) => wrap(n, 16, true),
        (Chunk::Int16Unsigned, Value::Int(n)) => wrap(n, 16, false),
        (Chunk::Int32, Value::Int(_) | Value::Ptr(..)) => v,
        (Chunk::Float32, Value::Float(f)) => Value::Float(f64::from(f as f32)),
        (Chunk::Float64, Value::Float(_)) => v,
        _ => Value::Undef,
    }
}

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
    failures: &mut Vec<String>,
) {
    if let Err(e) = runner().run(&strategy, test) {
        failures.push(format!("{}: {}", name, e));
    }
}

fn aligned(c: Chunk, ofs: i64) -> i64 {
    ofs - ofs.rem_euclid(i64::from(c.align()))
}

pub fn check() -> Verdict {
    let mut failures = Vec::new();

    property(
        "load after store",
        (memory(), any::<prop::sample::Index>(), chunk(), -16i64..40, value()),
        |((mut m, blocks), i, c, ofs, v)| {
            let b = blocks[i.index(blocks.len())];
            let ofs = aligned(c, ofs);
            if m.store(c, b, ofs, v).is_ok() {
                prop_assert_eq!(m.load(c, b, ofs), Ok(normalized(c, v)));
            } else {
                // a store fails exactly when the matching load fails
                prop_assert!(m.load(c, b, ofs).is_err());
            }
            Ok(())
        },
        &mut failures,
    );

    property(
        "frame",
        (
            memory(),
            any::<prop::sample::Index>(),
            chunk(),
            -16i64..40,
            value(),
            any::<prop::sample::Index>(),
            chunk(),
            -16i64..40,
        ),
        |((m, blocks), i, c, ofs, v, j, c2, ofs2)| {
            let b = blocks[i.index(blocks.len())];
            let b2 = blocks[j.index(blocks.len())];
            let disjoint = b != b2
                || ofs + i64::from(c.size()) <= ofs2
                || ofs2 + i64::from(c2.size()) <= ofs;
            let mut m2 = m.clone();
            if disjoint && m2.store(c, b, ofs, v).is_ok() {
                prop_assert_eq!(m2.load(c2, b2, ofs2), m.load(c2, b2, ofs2));
            }
            Ok(())
        },
        &mut failures,
    );

    property(
        "alloc freshness",
        (memory(), -16i64..16, 0i64..40),
        |((mut m, blocks), lo, n)| {
            let b = m.alloc(lo, lo + n);
            prop_assert!(!blocks.contains(&b));
            prop_assert!(blocks.iter().all(|&old| old < b));
            prop_assert!(m.is_valid(b));
            prop_assert_eq!(m.bounds(b), Some((lo, lo + n)));
            let b2 = m.alloc(lo, lo + n);
            prop_assert!(b2 != b);
            Ok(())
        },
        &mut failures,
    );

    property(
        "undef on fresh reads",
        (memory(), -16i64..16, 0i64..40, chunk(), 0i64..40),
        |((mut m, _), lo, n, c, k)| {
            let b = m.alloc(lo, lo + n);
            let ofs = aligned(c, lo + k);
            let in_bounds = ofs >= lo && ofs + i64::from(c.size()) <= lo + n;
            match m.load(c, b, ofs) {
                Ok(v) => {
                    prop_assert!(in_bounds);
                    prop_assert_eq!(v, Value::Undef);
                }
                Err(_) => prop_assert!(!in_bounds),
            }
            Ok(())
        },
        &mut failures,
    );

    if failures.is_empty() {
        Ok(format!("4 properties x {} cases", CASES))
    } else {
        Err(failures)
    }
}
