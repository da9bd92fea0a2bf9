//! A reference interpreter for Clight, a large subset of C.
//!
//! The crate covers the abstract syntax ([`ast`]), type layout ([`layout`]),
//! a block-based memory model ([`memory`]), expression evaluation
//! ([`eval`]), fuel-bounded statement execution ([`exec`]) and a C-like
//! concrete syntax ([`frontend`]).

pub mod ast;
pub mod eval;
pub mod exec;
pub mod frontend;
pub mod layout;
pub mod memory;
pub mod world;

pub use ast::{Expr, Program, Stmt, Type};
pub use exec::{run_program, Behavior};
pub use memory::{Mem, Value};
pub use world::{Event, IoValue, ScriptWorld, Trace, World};
