//! Big-step evaluation of pure expressions.
//!
//! Expressions never modify memory, so evaluation borrows the memory state
//! immutably. Operators are resolved from the static type annotations of
//! their operands; any combination not covered (including `Undef` operands)
//! goes wrong.

use std::collections::HashMap;

use thiserror::Error;

use crate::ast::{BinaryOp, Expr, ExprKind, Fundef, Ident, IntSize, Signedness, Type, UnaryOp};
use crate::layout::{field_offset, sizeof};
use crate::memory::{BlockId, Loc, Mem, MemError, Value};

/// Global variables and functions.
#[derive(Clone, Debug, Default)]
pub struct GlobalEnv {
    symbols: HashMap<Ident, BlockId>,
    functions: HashMap<BlockId, Fundef>,
}

impl GlobalEnv {
    pub fn new() -> Self {
        GlobalEnv::default()
    }

    pub fn bind_symbol(&mut self, id: Ident, b: BlockId) {
        self.symbols.insert(id, b);
    }

    pub fn bind_function(&mut self, b: BlockId, f: Fundef) {
        self.symbols.insert(f.name().clone(), b);
        self.functions.insert(b, f);
    }

    pub fn symbol(&self, id: &str) -> Option<BlockId> {
        self.symbols.get(id).copied()
    }

    pub fn funct(&self, b: BlockId) -> Option<&Fundef> {
        self.functions.get(&b)
    }
}

/// Function-scoped variables of one activation.
pub type LocalEnv = HashMap<Ident, BlockId>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    Unbound(Ident),
    #[error("dereference of a non-pointer value {0}")]
    NotAPointer(Value),
    #[error("no field `{0}` in the accessed struct or union")]
    NoSuchField(Ident),
    #[error("field access `.{0}` on an expression that is not a struct or union")]
    NotComposite(Ident),
    #[error("expression is not an l-value")]
    NotAnLvalue,
    #[error("memory access failed: {0}")]
    Mem(#[from] MemError),
    #[error("unary operator {op:?} undefined on {arg}")]
    Unop { op: UnaryOp, arg: Value },
    #[error("binary operator {op:?} undefined on {lhs} and {rhs}")]
    Binop { op: BinaryOp, lhs: Value, rhs: Value },
    #[error("cast of {value} to {to:?} is undefined")]
    Cast { value: Value, to: Type },
    #[error("value {0} is neither true nor false")]
    NotABool(Value),
}

/// Evaluates `a` in l-value position to a memory location.
pub fn eval_lvalue(g: &GlobalEnv, e: &LocalEnv, m: &Mem, a: &Expr) -> Result<Loc, EvalError> {
    match &a.kind {
        ExprKind::Var(id) => {
            let b = e
                .get(id)
                .copied()
                .or_else(|| g.symbol(id.as_str()))
                .ok_or_else(|| EvalError::Unbound(id.clone()))?;
            Ok(Loc::new(b, 0))
        }
        ExprKind::Deref(p) => match eval_rvalue(g, e, m, p)? {
            Value::Ptr(b, ofs) => Ok(Loc::new(b, ofs)),
            v => Err(EvalError::NotAPointer(v)),
        },
        ExprKind::Field(base, f) => {
            let loc = eval_lvalue(g, e, m, base)?;
            match &base.ty {
                Type::Struct(_, fl) => {
                    let delta =
                        field_offset(f.as_str(), fl).ok_or_else(|| EvalError::NoSuchField(f.clone()))?;
                    Ok(Loc::new(loc.block, loc.ofs.wrapping_add(delta as i32)))
                }
                Type::Union(..) => Ok(loc),
                _ => Err(EvalError::NotComposite(f.clone())),
            }
        }
        _ => Err(EvalError::NotAnLvalue),
    }
}

/// Evaluates `a` in r-value position to a value.
pub fn eval_rvalue(g: &GlobalEnv, e: &LocalEnv, m: &Mem, a: &Expr) -> Result<Value, EvalError> {
    match &a.kind {
        ExprKind::IntConst(n) => Ok(Value::Int(*n)),
        ExprKind::FloatConst(f) => Ok(Value::Float(f.0)),
        ExprKind::SizeofType(t) => Ok(Value::Int(sizeof(t) as i32)),
        ExprKind::Var(_) | ExprKind::Deref(_) | ExprKind::Field(..) => {
            let loc = eval_lvalue(g, e, m, a)?;
            Ok(m.loadval(&a.ty, loc)?)
        }
        ExprKind::Addrof(l) => {
            let loc = eval_lvalue(g, e, m, l)?;
            Ok(Value::Ptr(loc.block, loc.ofs))
        }
        ExprKind::Unop(op, x) => {
            let v = eval_rvalue(g, e, m, x)?;
            eval_unop(*op, v, &x.ty).ok_or(EvalError::Unop { op: *op, arg: v })
        }
        ExprKind::Binop(op, x, y) => {
            let v1 = eval_rvalue(g, e, m, x)?;
            let v2 = eval_rvalue(g, e, m, y)?;
            eval_binop(*op, v1, &x.ty, v2, &y.ty).ok_or(EvalError::Binop {
                op: *op,
                lhs: v1,
                rhs: v2,
            })
        }
        ExprKind::Cond(c, x, y) => {
            let v = eval_rvalue(g, e, m, c)?;
            match is_true(v, &c.ty) {
                Some(true) => eval_rvalue(g, e, m, x),
                Some(false) => eval_rvalue(g, e, m, y),
                None => Err(EvalError::NotABool(v)),
            }
        }
        ExprKind::Cast(to, x) => {
            let v = eval_rvalue(g, e, m, x)?;
            cast(v, &x.ty, to).ok_or_else(|| EvalError::Cast {
                value: v,
                to: to.clone(),
            })
        }
    }
}

/// Truth value of `v` at type `ty`; `None` when it is neither true nor false.
pub fn is_true(v: Value, ty: &Type) -> Option<bool> {
    match (ty, v) {
        (Type::Float(_), Value::Float(f)) => Some(f != 0.0),
        (t, Value::Int(n)) if t.is_int() || t.is_pointer_like() => Some(n != 0),
        (t, Value::Ptr(..)) if t.is_int() || t.is_pointer_like() => Some(true),
        _ => None,
    }
}

pub fn eval_unop(op: UnaryOp, v: Value, ty: &Type) -> Option<Value> {
    match (op, ty, v) {
        (UnaryOp::Neg, Type::Int(..), Value::Int(n)) => Some(Value::Int(n.wrapping_neg())),
        (UnaryOp::Neg, Type::Float(_), Value::Float(f)) => Some(Value::Float(-f)),
        (UnaryOp::BitNot, Type::Int(..), Value::Int(n)) => Some(Value::Int(!n)),
        (UnaryOp::LogNot, _, _) => is_true(v, ty).map(|b| Value::Int(i32::from(!b))),
        _ => None,
    }
}

fn is_unsigned(t: &Type) -> bool {
    matches!(t, Type::Int(_, Signedness::Unsigned))
}

fn bool_val(b: bool) -> Value {
    Value::Int(i32::from(b))
}

/// Scales `n` elements of `elem` into a byte displacement (wrapping).
fn scaled(n: i32, elem: &Type) -> i32 {
    n.wrapping_mul(sizeof(elem) as i32)
}

pub fn eval_binop(op: BinaryOp, v1: Value, t1: &Type, v2: Value, t2: &Type) -> Option<Value> {
    use BinaryOp::*;
    use Value::{Float, Int, Ptr};

    if op.is_comparison() {
        return eval_compare(op, v1, t1, v2, t2);
    }
    let unsigned = is_unsigned(t1) || is_unsigned(t2);
    match (op, v1, v2) {
        (Add | Sub | Mul | Div | Mod | And | Or | Xor | Shl | Shr, Int(a), Int(b))
            if t1.is_int() && t2.is_int() =>
        {
            int_arith(op, a, b, unsigned, is_unsigned(t1), is_unsigned(t2))
        }
        (Add | Sub | Mul | Div, Float(a), Float(b)) if t1.is_float() && t2.is_float() => {
            Some(Float(match op {
                Add => a + b,
                Sub => a - b,
                Mul => a * b,
                _ => a / b,
            }))
        }
        (Add, Ptr(b, ofs), Int(n)) if t2.is_int() => {
            let elem = t1.pointee()?;
            Some(Ptr(b, ofs.wrapping_add(scaled(n, elem))))
        }
        (Add, Int(n), Ptr(b, ofs)) if t1.is_int() => {
            let elem = t2.pointee()?;
            Some(Ptr(b, ofs.wrapping_add(scaled(n, elem))))
        }
        (Sub, Ptr(b, ofs), Int(n)) if t2.is_int() => {
            let elem = t1.pointee()?;
            Some(Ptr(b, ofs.wrapping_sub(scaled(n, elem))))
        }
        (Sub, Ptr(b1, o1), Ptr(b2, o2)) => {
            let (e1, e2) = (t1.pointee()?, t2.pointee()?);
            if b1 != b2 || e1 != e2 {
                return None;
            }
            let sz = sizeof(e1) as i32;
            Some(Int(o1.wrapping_sub(o2).wrapping_div(sz)))
        }
        _ => None,
    }
}

fn int_arith(op: BinaryOp, a: i32, b: i32, unsigned: bool, unsigned1: bool, unsigned2: bool) -> Option<Value> {
    use BinaryOp::*;
    let (ua, ub) = (a as u32, b as u32);
    let r = match op {
        Add => a.wrapping_add(b),
        Sub => a.wrapping_sub(b),
        Mul => a.wrapping_mul(b),
        Div | Mod => {
            if b == 0 {
                return None;
            }
            if unsigned {
                (if op == Div { ua / ub } else { ua % ub }) as i32
            } else {
                // None on INT_MIN / -1
                if op == Div { a.checked_div(b)? } else { a.checked_rem(b)? }
            }
        }
        And => a & b,
        Or => a | b,
        Xor => a ^ b,
        Shl | Shr => {
            let count = if unsigned2 { ub } else { u32::try_from(b).ok()? };
            if count >= 32 {
                return None;
            }
            match op {
                Shl => (ua << count) as i32,
                _ if unsigned1 => (ua >> count) as i32,
                _ => a >> count,
            }
        }
        _ => unreachable!("comparison handled separately"),
    };
    Some(Value::Int(r))
}

fn eval_compare(op: BinaryOp, v1: Value, t1: &Type, v2: Value, t2: &Type) -> Option<Value> {
    use BinaryOp::*;
    use Value::{Float, Int, Ptr};

    let ordered = |c: std::cmp::Ordering| {
        use std::cmp::Ordering::*;
        bool_val(match op {
            Lt => c == Less,
            Le => c != Greater,
            Gt => c == Greater,
            Ge => c != Less,
            Eq => c == Equal,
            Ne => c != Equal,
            _ => unreachable!(),
        })
    };
    let equality = |same: bool| match op {
        Eq => Some(bool_val(same)),
        Ne => Some(bool_val(!same)),
        _ => None,
    };

    if t1.is_int() && t2.is_int() {
        return match (v1, v2) {
            (Int(a), Int(b)) if is_unsigned(t1) || is_unsigned(t2) => {
                Some(ordered((a as u32).cmp(&(b as u32))))
            }
            (Int(a), Int(b)) => Some(ordered(a.cmp(&b))),
            _ => None,
        };
    }
    if t1.is_float() && t2.is_float() {
        return match (v1, v2) {
            (Float(a), Float(b)) => Some(bool_val(match op {
                Lt => a < b,
                Le => a <= b,
                Gt => a > b,
                Ge => a >= b,
                Eq => a == b,
                _ => a != b,
            })),
            _ => None,
        };
    }
    let ptr_or_int = |t: &Type| t.is_pointer_like() || t.is_int();
    if (t1.is_pointer_like() || t2.is_pointer_like()) && ptr_or_int(t1) && ptr_or_int(t2) {
        return match (v1, v2) {
            (Ptr(b1, o1), Ptr(b2, o2)) if b1 == b2 => Some(ordered(o1.cmp(&o2))),
            (Ptr(..), Int(0)) | (Int(0), Ptr(..)) => equality(false),
            (Int(a), Int(b)) => equality(a == b),
            _ => None,
        };
    }
    None
}

/// Converts `v` from type `from` to type `to`.
pub fn cast(v: Value, from: &Type, to: &Type) -> Option<Value> {
    use Value::{Float, Int, Ptr};
    let word = |t: &Type| t.is_pointer_like() || matches!(t, Type::Int(IntSize::I32, _));
    match (to, v) {
        // pointers and 32-bit integers convert without change of representation
        (_, Int(_) | Ptr(..)) if word(from) && word(to) => Some(v),
        (Type::Int(sz, sg), Int(n)) if from.is_int() => Some(Int(cast_int(n, *sz, *sg))),
        (Type::Int(sz, sg), Float(f)) if from.is_float() => float_to_int(f, *sz, *sg).map(Int),
        (Type::Float(fs), Int(n)) if from.is_int() => {
            let f = if is_unsigned(from) { f64::from(n as u32) } else { f64::from(n) };
            Some(Float(round_float(f, *fs)))
        }
        (Type::Float(fs), Float(f)) if from.is_float() => Some(Float(round_float(f, *fs))),
        _ => None,
    }
}

fn cast_int(n: i32, sz: IntSize, sg: Signedness) -> i32 {
    match (sz, sg) {
        (IntSize::I8, Signedness::Signed) => n as i8 as i32,
        (IntSize::I8, Signedness::Unsigned) => n as u8 as i32,
        (IntSize::I16, Signedness::Signed) => n as i16 as i32,
        (IntSize::I16, Signedness::Unsigned) => n as u16 as i32,
        (IntSize::I32, _) => n,
    }
}

fn float_to_int(f: f64, sz: IntSize, sg: Signedness) -> Option<i32> {
    let t = f.trunc();
    let (lo, hi) = match (sz, sg) {
        (IntSize::I8, Signedness::Signed) => (i8::MIN as f64, i8::MAX as f64),
        (IntSize::I8, Signedness::Unsigned) => (0.0, u8::MAX as f64),
        (IntSize::I16, Signedness::Signed) => (i16::MIN as f64, i16::MAX as f64),
        (IntSize::I16, Signedness::Unsigned) => (0.0, u16::MAX as f64),
        (IntSize::I32, Signedness::Signed) => (i32::MIN as f64, i32::MAX as f64),
        (IntSize::I32, Signedness::Unsigned) => (0.0, u32::MAX as f64),
    };
    // NaN fails both comparisons
    if !(t >= lo && t <= hi) {
        return None;
    }
    Some(t as i64 as i32)
}

fn round_float(f: f64, fs: crate::ast::FloatSize) -> f64 {
    match fs {
        crate::ast::FloatSize::F32 => f as f32 as f64,
        crate::ast::FloatSize::F64 => f,
    }
}
