use clight::ast::{BinaryOp, FloatSize, IntSize, Signedness, Type};
use clight::eval::eval_binop;
use clight::memory::{BlockId, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Verdict, Violations};

/// Classification used by the addition table.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Class {
    Int,
    Float,
    /// Pointer or array with the given element size.
    Ptr(i64),
    Other,
}

fn types() -> Vec<(Type, Class)> {
    let s = Type::Struct("s".into(), vec![("a".into(), Type::INT)]);
    vec![
        (Type::INT, Class::Int),
        (Type::UINT, Class::Int),
        (Type::Int(IntSize::I8, Signedness::Signed), Class::Int),
        (Type::Int(IntSize::I16, Signedness::Unsigned), Class::Int),
        (Type::DOUBLE, Class::Float),
        (Type::Float(FloatSize::F32), Class::Float),
        (Type::pointer(Type::INT), Class::Ptr(4)),
        (Type::pointer(Type::DOUBLE), Class::Ptr(8)),
        (Type::pointer(s.clone()), Class::Ptr(4)),
        (Type::array(Type::Int(IntSize::I16, Signedness::Signed), 5), Class::Ptr(2)),
        (Type::Void, Class::Other),
        (s, Class::Other),
    ]
}

fn values() -> Vec<Value> {
    vec![
        Value::Int(0),
        Value::Int(7),
        Value::Int(-3),
        Value::Int(i32::MAX),
        Value::Int(i32::MIN),
        Value::Float(1.5),
        Value::Float(-0.0),
        Value::Ptr(BlockId(3), 8),
        Value::Ptr(BlockId(4), -12),
        Value::Undef,
    ]
}

fn wrap(n: i64) -> i32 {
    let r = n.rem_euclid(1 << 32);
    (if r >= 1 << 31 { r - (1 << 32) } else { r }) as i32
}

/// The addition table: int+int, float+float, ptr+int, int+ptr; nothing
/// else is defined.
fn oracle(v1: Value, c1: Class, v2: Value, c2: Class) -> Option<Value> {
    match (v1, c1, v2, c2) {
        (Value::Int(a), Class::Int, Value::Int(b), Class::Int) => {
            Some(Value::Int(wrap(i64::from(a) + i64::from(b))))
        }
        (Value::Float(a), Class::Float, Value::Float(b), Class::Float) => Some(Value::Float(a + b)),
        (Value::Ptr(b, ofs), Class::Ptr(sz), Value::Int(n), Class::Int)
        | (Value::Int(n), Class::Int, Value::Ptr(b, ofs), Class::Ptr(sz)) => {
            Some(Value::Ptr(b, wrap(i64::from(ofs) + i64::from(n) * sz)))
        }
        _ => None,
    }
}

pub fn check() -> Verdict {
    let mut v = Violations::default();
    let tys = types();
    let vals = values();
    let mut cells = 0;
    for (t1, c1) in &tys {
        for (t2, c2) in &tys {
            for &v1 in &vals {
                for &v2 in &vals {
                    let got = eval_binop(BinaryOp::Add, v1, t1, v2, t2);
                    let want = oracle(v1, *c1, v2, *c2);
                    v.check(got == want, || {
                        format!("{} : {:?} + {} : {:?} gave {:?}, table says {:?}", v1, t1, v2, t2, got, want)
                    });
                    cells += 1;
                }
            }
        }
    }

    // the worked example: ptr(b, 8) + 3 at int* is ptr(b, 20)
    let ex = eval_binop(
        BinaryOp::Add,
        Value::Ptr(BlockId(1), 8),
        &Type::pointer(Type::INT),
        Value::Int(3),
        &Type::INT,
    );
    v.check(ex == Some(Value::Ptr(BlockId(1), 20)), || format!("ptr(b,8) + 3 gave {:?}", ex));

    // random pointer arithmetic triples against integer arithmetic
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let ofs: i32 = rng.gen_range(-4096..4096);
        let n: i32 = rng.gen_range(-1000..1000);
        let size: u32 = rng.gen_range(1..64);
        let elem = Type::array(Type::Int(IntSize::I8, Signedness::Unsigned), size);
        let want = Value::Ptr(BlockId(9), ofs + n * size as i32);
        for (a, ta, b, tb) in [
            (Value::Ptr(BlockId(9), ofs), Type::pointer(elem.clone()), Value::Int(n), Type::INT),
            (Value::Int(n), Type::INT, Value::Ptr(BlockId(9), ofs), Type::pointer(elem.clone())),
        ] {
            let got = eval_binop(BinaryOp::Add, a, &ta, b, &tb);
            v.check(got == Some(want), || {
                format!("ofs {} + {} x {} gave {:?}, expected {}", ofs, n, size, got, want)
            });
        }
    }
    v.verdict(format!("{} table cells, 100 pointer triples", cells))
}
