//! Fuel-bounded execution of statements, function calls and whole programs.
//!
//! Fuel bounds the recursion depth of the interpreter: every statement and
//! function-call evaluation consumes one unit for its sub-derivations, and
//! each further loop iteration runs one unit deeper than the previous one.
//! With fuel exhausted the result is `Bottom`, carrying the trace produced so
//! far; this stands in for divergence.

use std::fmt;

use thiserror::Error;

use crate::ast::{CaseLabel, Expr, ExternalFunction, Fundef, Ident, Init, InternalFunction, Program, Stmt, Type};
use crate::eval::{eval_lvalue, eval_rvalue, is_true, EvalError, GlobalEnv, LocalEnv};
use crate::layout::sizeof;
use crate::memory::{BlockId, Loc, Mem, MemError, Value};
use crate::world::{Event, IoValue, Trace, World};

/// Default fuel used by the command-line driver.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// How a statement finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Normal,
    Continue,
    Break,
    Return,
    ReturnValue(Value),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Normal => f.write_str("Normal"),
            Outcome::Continue => f.write_str("Continue"),
            Outcome::Break => f.write_str("Break"),
            Outcome::Return => f.write_str("Return"),
            Outcome::ReturnValue(v) => write!(f, "Return({})", v),
        }
    }
}

/// Causes of going wrong.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExecError {
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("assignment failed: {0}")]
    Store(MemError),
    #[error("for-loop initializer must terminate normally, not by {0}")]
    ForInit(Outcome),
    #[error("for-loop step must terminate normally, not by {0}")]
    ForStep(Outcome),
    #[error("switch scrutinee {0} is not an integer")]
    SwitchScrutinee(Value),
    #[error("switch has no matching case and no default")]
    SwitchNoCase,
    #[error("callee {0} is not a function pointer")]
    NotAFunctionPointer(Value),
    #[error("call through pointer with nonzero offset {0}")]
    FunctionPointerOffset(i32),
    #[error("no function at block {0}")]
    NoFunction(BlockId),
    #[error("callee `{name}` has type {actual:?} but is called at type {expected:?}")]
    CallType {
        name: Ident,
        expected: Type,
        actual: Type,
    },
    #[error("function `{name}` expects {expected} arguments, got {got}")]
    Arity {
        name: Ident,
        expected: usize,
        got: usize,
    },
    #[error("cannot bind parameter `{param}`: {err}")]
    BindParam { param: Ident, err: MemError },
    #[error("function `{name}` finished with outcome {outcome}, incompatible with its return type")]
    Incompatible { name: Ident, outcome: Outcome },
    #[error("function `{0}` returned an undefined value")]
    UndefReturn(Ident),
    #[error("external call `{name}` with non-I/O argument {arg}")]
    ExternalArgument { name: Ident, arg: Value },
    #[error("the world has no answer for `{0}`")]
    NoAnswer(String),
    #[error("world answer for `{name}` does not match its return type")]
    AnswerType { name: Ident },
    #[error("releasing local variables failed: {0}")]
    Free(MemError),
    #[error("duplicate global `{0}`")]
    DuplicateGlobal(Ident),
    #[error("invalid initializer for global `{0}`")]
    Initializer(Ident),
    #[error("main function `{0}` is not defined")]
    MainMissing(Ident),
    #[error("main function `{0}` is external")]
    MainExternal(Ident),
    #[error("main function `{0}` does not have type int(void)")]
    MainType(Ident),
    #[error("main returned {0}, not an integer")]
    MainResult(Value),
}

/// Result of executing a statement with bounded fuel.
#[derive(Clone, Debug, PartialEq)]
pub enum ExecResult {
    Bottom(Trace),
    Result {
        trace: Trace,
        outcome: Outcome,
        mem: Mem,
    },
    Error {
        trace: Trace,
        error: ExecError,
    },
}

impl ExecResult {
    pub fn trace(&self) -> &Trace {
        match self {
            ExecResult::Bottom(t) => t,
            ExecResult::Result { trace, .. } | ExecResult::Error { trace, .. } => trace,
        }
    }
}

/// Result of a function invocation with bounded fuel.
#[derive(Clone, Debug, PartialEq)]
pub enum CallResult {
    Bottom(Trace),
    Result { trace: Trace, value: Value, mem: Mem },
    Error { trace: Trace, error: ExecError },
}

/// Observable behavior of a whole program.
#[derive(Clone, Debug, PartialEq)]
pub enum Behavior {
    Terminates { trace: Trace, code: i32 },
    OutOfFuel { trace: Trace },
    GoesWrong { trace: Trace, message: String },
}

impl Behavior {
    pub fn trace(&self) -> &Trace {
        match self {
            Behavior::Terminates { trace, .. }
            | Behavior::OutOfFuel { trace }
            | Behavior::GoesWrong { trace, .. } => trace,
        }
    }

    pub fn goes_wrong(&self) -> bool {
        matches!(self, Behavior::GoesWrong { .. })
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Behavior::Terminates { code, .. } => write!(f, "terminates {}", code),
            Behavior::OutOfFuel { .. } => f.write_str("out of fuel"),
            Behavior::GoesWrong { message, .. } => write!(f, "goes wrong: {}", message),
        }
    }
}

// Boxed so that every level of host recursion returns a small value.
enum Stop {
    OutOfFuel,
    Wrong(Box<ExecError>),
}

impl<E: Into<ExecError>> From<E> for Stop {
    fn from(e: E) -> Self {
        Stop::Wrong(Box::new(e.into()))
    }
}

type Step<T> = Result<T, Stop>;

// Stack headroom kept before growing onto a fresh segment; deep recursion in
// interpreted programs maps onto host recursion.
const RED_ZONE: usize = 128 * 1024;
const STACK_SEGMENT: usize = 4 * 1024 * 1024;

struct Machine<'a> {
    ge: &'a GlobalEnv,
    world: &'a mut dyn World,
    trace: Trace,
}

impl Machine<'_> {
    fn stmt(&mut self, fuel: u64, env: &LocalEnv, m: &mut Mem, s: &Stmt) -> Step<Outcome> {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.stmt_inner(fuel, env, m, s))
    }

    fn stmt_inner(&mut self, fuel: u64, env: &LocalEnv, m: &mut Mem, s: &Stmt) -> Step<Outcome> {
        if fuel == 0 {
            return Err(Stop::OutOfFuel);
        }
        let n = fuel - 1;
        match s {
            Stmt::Skip => Ok(Outcome::Normal),
            Stmt::Break => Ok(Outcome::Break),
            Stmt::Continue => Ok(Outcome::Continue),
            Stmt::Return(None) => Ok(Outcome::Return),
            Stmt::Return(Some(a)) => Ok(Outcome::ReturnValue(self.rvalue(env, m, a)?)),
            Stmt::Assign(lhs, rhs) => {
                let loc = eval_lvalue(self.ge, env, m, lhs)?;
                let v = self.rvalue(env, m, rhs)?;
                m.storeval(&lhs.ty, loc, v).map_err(ExecError::Store)?;
                Ok(Outcome::Normal)
            }
            Stmt::Seq(s1, s2) => match self.stmt(n, env, m, s1)? {
                Outcome::Normal => self.stmt(n, env, m, s2),
                out => Ok(out),
            },
            Stmt::If(c, s1, s2) => {
                if self.condition(env, m, c)? {
                    self.stmt(n, env, m, s1)
                } else {
                    self.stmt(n, env, m, s2)
                }
            }
            Stmt::While(c, body) => self.while_loop(fuel, env, m, c, body),
            Stmt::DoWhile(body, c) => self.do_while(fuel, env, m, body, c),
            Stmt::For(init, c, step, body) => {
                if **init == Stmt::Skip {
                    self.for_loop(fuel, env, m, c, step, body)
                } else {
                    match self.stmt(n, env, m, init)? {
                        Outcome::Normal => self.for_loop(n, env, m, c, step, body),
                        out => Err(ExecError::ForInit(out).into()),
                    }
                }
            }
            Stmt::Switch(scrut, cases) => self.switch(n, env, m, scrut, cases),
            Stmt::Call(res, callee, args) => self.call(n, env, m, res.as_ref(), callee, args),
        }
    }

    #[inline(never)]
    fn switch(
        &mut self,
        n: u64,
        env: &LocalEnv,
        m: &mut Mem,
        scrut: &Expr,
        cases: &[(CaseLabel, Stmt)],
    ) -> Step<Outcome> {
        let v = self.rvalue(env, m, scrut)?;
        let Value::Int(k) = v else {
            return Err(ExecError::SwitchScrutinee(v).into());
        };
        if !scrut.ty.is_int() {
            return Err(ExecError::SwitchScrutinee(v).into());
        }
        let start = cases
            .iter()
            .position(|(l, _)| *l == CaseLabel::Case(k))
            .or_else(|| cases.iter().position(|(l, _)| *l == CaseLabel::Default))
            .ok_or(ExecError::SwitchNoCase)?;
        // the selected suffix runs as a sequence, one fuel unit deeper per case
        let mut k = n;
        for (_, body) in &cases[start..] {
            if k == 0 {
                return Err(Stop::OutOfFuel);
            }
            match self.stmt(k - 1, env, m, body)? {
                Outcome::Normal => k -= 1,
                Outcome::Break => return Ok(Outcome::Normal),
                out => return Ok(out),
            }
        }
        Ok(Outcome::Normal)
    }

    #[inline(never)]
    fn call(
        &mut self,
        n: u64,
        env: &LocalEnv,
        m: &mut Mem,
        res: Option<&Expr>,
        callee: &Expr,
        args: &[Expr],
    ) -> Step<Outcome> {
        let loc = match res {
            Some(lhs) => Some(eval_lvalue(self.ge, env, m, lhs)?),
            None => None,
        };
        let fv = self.rvalue(env, m, callee)?;
        let b = match fv {
            Value::Ptr(b, 0) => b,
            Value::Ptr(_, ofs) => return Err(ExecError::FunctionPointerOffset(ofs).into()),
            v => return Err(ExecError::NotAFunctionPointer(v).into()),
        };
        let vargs = args
            .iter()
            .map(|a| self.rvalue(env, m, a))
            .collect::<Step<Vec<_>>>()?;
        let fd = self.ge.funct(b).ok_or(ExecError::NoFunction(b))?;
        if fd.type_of() != callee.ty {
            return Err(ExecError::CallType {
                name: fd.name().clone(),
                expected: callee.ty.clone(),
                actual: fd.type_of(),
            }
            .into());
        }
        let vres = self.funcall(n, fd, &vargs, m)?;
        if let (Some(lhs), Some(loc)) = (res, loc) {
            m.storeval(&lhs.ty, loc, vres).map_err(ExecError::Store)?;
        }
        Ok(Outcome::Normal)
    }

    fn rvalue(&self, env: &LocalEnv, m: &Mem, a: &Expr) -> Step<Value> {
        Ok(eval_rvalue(self.ge, env, m, a)?)
    }

    fn condition(&self, env: &LocalEnv, m: &Mem, a: &Expr) -> Step<bool> {
        let v = self.rvalue(env, m, a)?;
        is_true(v, &a.ty).ok_or_else(|| EvalError::NotABool(v).into())
    }

    fn while_loop(&mut self, fuel: u64, env: &LocalEnv, m: &mut Mem, c: &Expr, body: &Stmt) -> Step<Outcome> {
        let mut k = fuel;
        loop {
            if k == 0 {
                return Err(Stop::OutOfFuel);
            }
            if !self.condition(env, m, c)? {
                return Ok(Outcome::Normal);
            }
            match self.stmt(k - 1, env, m, body)? {
                Outcome::Normal | Outcome::Continue => k -= 1,
                Outcome::Break => return Ok(Outcome::Normal),
                out => return Ok(out),
            }
        }
    }

    fn do_while(&mut self, fuel: u64, env: &LocalEnv, m: &mut Mem, body: &Stmt, c: &Expr) -> Step<Outcome> {
        let mut k = fuel;
        loop {
            if k == 0 {
                return Err(Stop::OutOfFuel);
            }
            match self.stmt(k - 1, env, m, body)? {
                Outcome::Normal | Outcome::Continue => {}
                Outcome::Break => return Ok(Outcome::Normal),
                out => return Ok(out),
            }
            if !self.condition(env, m, c)? {
                return Ok(Outcome::Normal);
            }
            k -= 1;
        }
    }

    /// A `for` loop whose initializer has already run.
    fn for_loop(
        &mut self,
        fuel: u64,
        env: &LocalEnv,
        m: &mut Mem,
        c: &Expr,
        step: &Stmt,
        body: &Stmt,
    ) -> Step<Outcome> {
        let mut k = fuel;
        loop {
            if k == 0 {
                return Err(Stop::OutOfFuel);
            }
            if !self.condition(env, m, c)? {
                return Ok(Outcome::Normal);
            }
            match self.stmt(k - 1, env, m, body)? {
                Outcome::Normal | Outcome::Continue => {}
                Outcome::Break => return Ok(Outcome::Normal),
                out => return Ok(out),
            }
            match self.stmt(k - 1, env, m, step)? {
                Outcome::Normal => k -= 1,
                out => return Err(ExecError::ForStep(out).into()),
            }
        }
    }

    fn funcall(&mut self, fuel: u64, fd: &Fundef, args: &[Value], m: &mut Mem) -> Step<Value> {
        if fuel == 0 {
            return Err(Stop::OutOfFuel);
        }
        match fd {
            Fundef::Internal(f) => self.internal_call(fuel - 1, f, args, m),
            Fundef::External(f) => self.external_call(f, args),
        }
    }

    #[inline(never)]
    fn external_call(&mut self, f: &ExternalFunction, args: &[Value]) -> Step<Value> {
        if args.len() != f.params.len() {
            return Err(ExecError::Arity {
                name: f.name.clone(),
                expected: f.params.len(),
                got: args.len(),
            }
            .into());
        }
        let io_args = args
            .iter()
            .map(|&v| {
                IoValue::from_value(v).ok_or_else(|| ExecError::ExternalArgument {
                    name: f.name.clone(),
                    arg: v,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let res = self
            .world
            .next(f.name.as_str(), &io_args)
            .ok_or_else(|| {
                let args: Vec<String> = io_args.iter().map(|a| a.to_string()).collect();
                ExecError::NoAnswer(format!("{}({})", f.name, args.join(",")))
            })?;
        let matches = match (&f.result, res) {
            (Type::Void, _) => true,
            (Type::Float(_), IoValue::Float(_)) => true,
            (t, IoValue::Int(_)) => t.is_int() || t.is_pointer_like(),
            _ => false,
        };
        if !matches {
            return Err(ExecError::AnswerType { name: f.name.clone() }.into());
        }
        self.trace.push(Event {
            name: f.name.clone(),
            args: io_args,
            result: res,
        });
        Ok(res.to_value())
    }

    fn internal_call(&mut self, fuel: u64, f: &InternalFunction, args: &[Value], m: &mut Mem) -> Step<Value> {
        if args.len() != f.params.len() {
            return Err(ExecError::Arity {
                name: f.name.clone(),
                expected: f.params.len(),
                got: args.len(),
            }
            .into());
        }
        let mut env = LocalEnv::new();
        let mut blocks = Vec::with_capacity(f.params.len() + f.locals.len());
        for (id, ty) in f.params.iter().chain(&f.locals) {
            let b = m.alloc(0, sizeof(ty) as i64);
            env.insert(id.clone(), b);
            blocks.push(b);
        }
        for ((id, ty), &v) in f.params.iter().zip(args) {
            m.storeval(ty, Loc::new(env[id], 0), v)
                .map_err(|err| ExecError::BindParam {
                    param: id.clone(),
                    err,
                })?;
        }
        let outcome = self.stmt(fuel, &env, m, &f.body)?;
        let result = match (outcome, &f.result) {
            (Outcome::Normal | Outcome::Return, Type::Void) => Value::Undef,
            (Outcome::ReturnValue(Value::Undef), t) if *t != Type::Void => {
                return Err(ExecError::UndefReturn(f.name.clone()).into())
            }
            (Outcome::ReturnValue(v), t) if *t != Type::Void => v,
            (outcome, _) => {
                return Err(ExecError::Incompatible {
                    name: f.name.clone(),
                    outcome,
                }
                .into())
            }
        };
        for b in blocks {
            m.free(b).map_err(ExecError::Free)?;
        }
        Ok(result)
    }
}

/// Executes `s` in local environment `env` with at most `fuel` levels of
/// recursion.
pub fn exec_stmt(
    world: &mut dyn World,
    fuel: u64,
    ge: &GlobalEnv,
    env: &LocalEnv,
    mut mem: Mem,
    s: &Stmt,
) -> ExecResult {
    let mut machine = Machine {
        ge,
        world,
        trace: Trace::new(),
    };
    let r = machine.stmt(fuel, env, &mut mem, s);
    let trace = machine.trace;
    match r {
        Ok(outcome) => ExecResult::Result { trace, outcome, mem },
        Err(Stop::OutOfFuel) => ExecResult::Bottom(trace),
        Err(Stop::Wrong(error)) => ExecResult::Error { trace, error: *error },
    }
}

/// Invokes `fd` on `args`.
pub fn eval_funcall(
    world: &mut dyn World,
    fuel: u64,
    ge: &GlobalEnv,
    fd: &Fundef,
    args: &[Value],
    mut mem: Mem,
) -> CallResult {
    let mut machine = Machine {
        ge,
        world,
        trace: Trace::new(),
    };
    let r = machine.funcall(fuel, fd, args, &mut mem);
    let trace = machine.trace;
    match r {
        Ok(value) => CallResult::Result { trace, value, mem },
        Err(Stop::OutOfFuel) => CallResult::Bottom(trace),
        Err(Stop::Wrong(error)) => CallResult::Error { trace, error: *error },
    }
}

/// Builds the global environment and initial memory: one block per global
/// variable, bounds `[0, sizeof τ)`, holding `Undef` or its initializer, and
/// one block per function.
pub fn globalenv(p: &Program) -> Result<(GlobalEnv, Mem), ExecError> {
    let mut ge = GlobalEnv::new();
    let mut m = Mem::new();
    let mut seen = std::collections::HashSet::new();
    for g in &p.globals {
        if !seen.insert(g.name.clone()) {
            return Err(ExecError::DuplicateGlobal(g.name.clone()));
        }
        let b = m.alloc(0, sizeof(&g.ty) as i64);
        ge.bind_symbol(g.name.clone(), b);
        if let Some(init) = g.init {
            let v = match init {
                Init::Int(n) => Value::Int(n),
                Init::Float(f) => Value::Float(f.0),
            };
            let class_ok = match init {
                Init::Int(_) => !g.ty.is_float(),
                Init::Float(_) => g.ty.is_float(),
            };
            if !class_ok {
                return Err(ExecError::Initializer(g.name.clone()));
            }
            m.storeval(&g.ty, Loc::new(b, 0), v)
                .map_err(|_| ExecError::Initializer(g.name.clone()))?;
        }
    }
    for f in &p.functions {
        if !seen.insert(f.name().clone()) {
            return Err(ExecError::DuplicateGlobal(f.name().clone()));
        }
        // function blocks are empty: they can be pointed to, never accessed
        let b = m.alloc(0, 0);
        ge.bind_function(b, f.clone());
    }
    Ok((ge, m))
}

/// Runs `main` with no arguments and observes the program's behavior.
pub fn run_program(world: &mut dyn World, fuel: u64, p: &Program) -> Behavior {
    let wrong = |error: ExecError| Behavior::GoesWrong {
        trace: Trace::new(),
        message: error.to_string(),
    };
    let (ge, m) = match globalenv(p) {
        Ok(x) => x,
        Err(e) => return wrong(e),
    };
    let Some(b) = ge.symbol(p.main.as_str()) else {
        return wrong(ExecError::MainMissing(p.main.clone()));
    };
    let Some(f) = ge.funct(b) else {
        return wrong(ExecError::MainMissing(p.main.clone()));
    };
    if matches!(f, Fundef::External(_)) {
        return wrong(ExecError::MainExternal(p.main.clone()));
    }
    if f.type_of() != Type::function(vec![], Type::INT) {
        return wrong(ExecError::MainType(p.main.clone()));
    }
    match eval_funcall(world, fuel, &ge, f, &[], m) {
        CallResult::Result {
            trace,
            value: Value::Int(code),
            ..
        } => Behavior::Terminates { trace, code },
        CallResult::Result { trace, value, .. } => Behavior::GoesWrong {
            trace,
            message: ExecError::MainResult(value).to_string(),
        },
        CallResult::Bottom(trace) => Behavior::OutOfFuel { trace },
        CallResult::Error { trace, error } => Behavior::GoesWrong {
            trace,
            message: error.to_string(),
        },
    }
}
