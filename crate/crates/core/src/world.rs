//! I/O events, traces and worlds.
//!
//! An event records one call to an external function: its name, argument
//! values and the result the world supplied. Events have a one-line text
//! form, `name(arg,...) -> result`, shared by world scripts and trace output.
//! Integers are written in decimal, floats carry an `f` suffix.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ast::Ident;
use crate::memory::Value;

/// A value that can cross the I/O boundary: no pointers, no `Undef`.
#[derive(Clone, Copy, Debug)]
pub enum IoValue {
    Int(i32),
    Float(f64),
}

impl PartialEq for IoValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (IoValue::Int(a), IoValue::Int(b)) => a == b,
            (IoValue::Float(a), IoValue::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for IoValue {}

impl IoValue {
    pub fn from_value(v: Value) -> Option<IoValue> {
        match v {
            Value::Int(n) => Some(IoValue::Int(n)),
            Value::Float(f) => Some(IoValue::Float(f)),
            _ => None,
        }
    }

    pub fn to_value(self) -> Value {
        match self {
            IoValue::Int(n) => Value::Int(n),
            IoValue::Float(f) => Value::Float(f),
        }
    }
}

impl fmt::Display for IoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoValue::Int(n) => write!(f, "{}", n),
            IoValue::Float(x) => write!(f, "{:?}f", x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

impl FromStr for IoValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix('f') {
            return body
                .parse::<f64>()
                .map(IoValue::Float)
                .map_err(|_| format!("bad float `{}`", s));
        }
        let n: i64 = s.parse().map_err(|_| format!("bad integer `{}`", s))?;
        if n < i64::from(i32::MIN) || n > i64::from(u32::MAX) {
            return Err(format!("integer `{}` does not fit in 32 bits", s));
        }
        Ok(IoValue::Int(n as i32))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub name: Ident,
    pub args: Vec<IoValue>,
    pub result: IoValue,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ") -> {}", self.result)
    }
}

impl FromStr for Event {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let (call, result) = line
            .split_once("->")
            .ok_or_else(|| "expected `name(args) -> result`".to_string())?;
        let call = call.trim();
        let open = call.find('(').ok_or("missing `(`")?;
        let inner = call[open + 1..]
            .strip_suffix(')')
            .ok_or("missing `)` after arguments")?;
        let name = call[..open].trim();
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(format!("bad function name `{}`", name));
        }
        let args = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<IoValue>, _>>()?
        };
        Ok(Event {
            name: name.into(),
            args,
            result: result.parse()?,
        })
    }
}

/// A finite, ordered list of events.
pub type Trace = Vec<Event>;

/// Formats a trace in script format, one event per line.
pub fn format_trace(t: &[Event]) -> String {
    t.iter().map(|e| format!("{}\n", e)).collect()
}

/// Parses a world script. Blank lines and lines starting with `#` are
/// ignored.
pub fn parse_script(src: &str) -> Result<Vec<Event>, ScriptError> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.parse().map_err(|message| ScriptError {
                line: i + 1,
                message,
            })
        })
        .collect()
}

/// The environment answering external calls. Each query sees all previous
/// queries; `None` means the world refuses the call.
pub trait World {
    fn next(&mut self, name: &str, args: &[IoValue]) -> Option<IoValue>;
}

/// A world that answers from a finite script. The n-th query is answered
/// by the n-th event, provided name and arguments match it exactly.
#[derive(Clone, Debug, Default)]
pub struct ScriptWorld {
    events: Vec<Event>,
    pos: usize,
}

impl ScriptWorld {
    pub fn new(events: Vec<Event>) -> Self {
        ScriptWorld { events, pos: 0 }
    }

    pub fn parse(src: &str) -> Result<Self, ScriptError> {
        parse_script(src).map(ScriptWorld::new)
    }

    /// Events not yet consumed.
    pub fn remaining(&self) -> &[Event] {
        &self.events[self.pos..]
    }
}

impl World for ScriptWorld {
    fn next(&mut self, name: &str, args: &[IoValue]) -> Option<IoValue> {
        let ev = self.events.get(self.pos)?;
        if ev.name.as_str() != name || ev.args != args {
            return None;
        }
        self.pos += 1;
        Some(ev.result)
    }
}

impl<F> World for F
where
    F: FnMut(&str, &[IoValue]) -> Option<IoValue>,
{
    fn next(&mut self, name: &str, args: &[IoValue]) -> Option<IoValue> {
        self(name, args)
    }
}
