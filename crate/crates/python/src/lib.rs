//! Python bindings: compile, pretty-print and run Clight programs, and poke
//! at the memory model directly.

use std::cell::RefCell;

use clight::ast::{Fundef, Program as Ast};
use clight::exec::{run_program, Behavior as Beh, DEFAULT_FUEL};
use clight::layout::{alignof, sizeof, Chunk};
use clight::memory::{BlockId, Mem, Value};
use clight::world::{IoValue, ScriptWorld};
use clight::frontend;
use pyo3::exceptions::{PyRuntimeError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyFloat, PyInt, PyTuple};

fn diag_error(ds: Vec<clight::ast::Diagnostic>) -> PyErr {
    let text: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
    PyValueError::new_err(text.join("\n"))
}

/// A compiled program.
#[pyclass(module = "pyclight", frozen)]
struct Program {
    ast: Ast,
}

#[pymethods]
impl Program {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        frontend::compile(src).map(|ast| Program { ast }).map_err(diag_error)
    }

    /// Concrete syntax of the elaborated program.
    fn pretty(&self) -> String {
        frontend::pretty_print(&self.ast)
    }

    /// Names of internal functions, in definition order.
    #[getter]
    fn functions(&self) -> Vec<String> {
        self.ast
            .functions
            .iter()
            .filter(|f| matches!(f, Fundef::Internal(_)))
            .map(|f| f.name().to_string())
            .collect()
    }

    /// Names of external functions.
    #[getter]
    fn externals(&self) -> Vec<String> {
        self.ast
            .functions
            .iter()
            .filter(|f| matches!(f, Fundef::External(_)))
            .map(|f| f.name().to_string())
            .collect()
    }

    /// `(name, type, sizeof, alignof)` for every global variable.
    #[getter]
    fn globals(&self) -> Vec<(String, String, u64, u64)> {
        self.ast
            .globals
            .iter()
            .map(|g| {
                (
                    g.name.to_string(),
                    frontend::type_to_string(&g.ty),
                    sizeof(&g.ty),
                    alignof(&g.ty),
                )
            })
            .collect()
    }

    /// Runs the program. `world` is a script (one `name(args) -> result`
    /// per line) or a callable `world(name, args)` returning an int, a float
    /// or `None` for no answer.
    #[pyo3(signature = (world = None, fuel = DEFAULT_FUEL))]
    fn run(&self, py: Python<'_>, world: Option<&Bound<'_, PyAny>>, fuel: u64) -> PyResult<Behavior> {
        if fuel == 0 {
            return Err(PyValueError::new_err("fuel must be positive"));
        }
        let b = match world {
            None => run_program(&mut ScriptWorld::default(), fuel, &self.ast),
            Some(w) if w.is_instance_of::<pyo3::types::PyString>() => {
                let script: String = w.extract()?;
                let mut sw = ScriptWorld::parse(&script)
                    .map_err(|e| PyValueError::new_err(e.to_string()))?;
                run_program(&mut sw, fuel, &self.ast)
            }
            Some(w) if w.is_callable() => {
                let failure: RefCell<Option<PyErr>> = RefCell::new(None);
                let mut ask = |name: &str, args: &[IoValue]| -> Option<IoValue> {
                    let answer = (|| {
                        let items = args
                            .iter()
                            .map(|a| from_value(py, a.to_value()))
                            .collect::<PyResult<Vec<_>>>()?;
                        let r = w.call1((name, PyTuple::new(py, items)?))?;
                        io_value(&r)
                    })();
                    answer.unwrap_or_else(|e| {
                        failure.borrow_mut().get_or_insert(e);
                        None
                    })
                };
                let b = run_program(&mut ask, fuel, &self.ast);
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                b
            }
            Some(_) => return Err(PyTypeError::new_err("world must be a script string or a callable")),
        };
        Ok(Behavior(b))
    }

    fn __eq__(&self, other: &Program) -> bool {
        self.ast == other.ast
    }

    fn __str__(&self) -> String {
        self.pretty()
    }
}

fn io_value(r: &Bound<'_, PyAny>) -> PyResult<Option<IoValue>> {
    if r.is_none() {
        Ok(None)
    } else if r.is_instance_of::<PyInt>() {
        let n: i64 = r.extract()?;
        if n < i64::from(i32::MIN) || n > i64::from(u32::MAX) {
            return Err(PyValueError::new_err(format!("{} does not fit in 32 bits", n)));
        }
        Ok(Some(IoValue::Int(n as i32)))
    } else if r.is_instance_of::<PyFloat>() {
        Ok(Some(IoValue::Float(r.extract()?)))
    } else {
        Err(PyTypeError::new_err("world answers must be int, float or None"))
    }
}

/// Observable behavior of a run.
#[pyclass(module = "pyclight", frozen)]
struct Behavior(Beh);

#[pymethods]
impl Behavior {
    /// `"terminates"`, `"out_of_fuel"` or `"goes_wrong"`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.0 {
            Beh::Terminates { .. } => "terminates",
            Beh::OutOfFuel { .. } => "out_of_fuel",
            Beh::GoesWrong { .. } => "goes_wrong",
        }
    }

    #[getter]
    fn code(&self) -> Option<i32> {
        match self.0 {
            Beh::Terminates { code, .. } => Some(code),
            _ => None,
        }
    }

    #[getter]
    fn message(&self) -> Option<String> {
        match &self.0 {
            Beh::GoesWrong { message, .. } => Some(message.clone()),
            _ => None,
        }
    }

    /// Events as text lines.
    #[getter]
    fn trace(&self) -> Vec<String> {
        self.0.trace().iter().map(|e| e.to_string()).collect()
    }

    fn __eq__(&self, other: &Behavior) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("<Behavior {}>", self.0)
    }
}

/// The block memory model. Values are Python ints, floats, `(block, offset)`
/// tuples for pointers, or `None` for undefined.
#[pyclass(module = "pyclight")]
struct Memory(Mem);

fn chunk(name: &str) -> PyResult<Chunk> {
    Chunk::from_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown chunk `{}`", name)))
}

fn mem_err(e: clight::memory::MemError) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_value(v: &Bound<'_, PyAny>) -> PyResult<Value> {
    if v.is_none() {
        return Ok(Value::Undef);
    }
    if let Ok((b, o)) = v.extract::<(u64, i32)>() {
        return Ok(Value::Ptr(BlockId(b), o));
    }
    match io_value(v)? {
        Some(io) => Ok(io.to_value()),
        None => Ok(Value::Undef),
    }
}

fn from_value(py: Python<'_>, v: Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Int(n) => n.into_pyobject(py)?.into_any().unbind(),
        Value::Float(x) => x.into_pyobject(py)?.into_any().unbind(),
        Value::Ptr(b, o) => (b.0, o).into_pyobject(py)?.into_any().unbind(),
        Value::Undef => py.None(),
    })
}

#[pymethods]
impl Memory {
    #[new]
    fn new() -> Self {
        Memory(Mem::new())
    }

    /// Allocates a fresh block with bounds `[lo, hi)`.
    fn alloc(&mut self, lo: i64, hi: i64) -> u64 {
        self.0.alloc(lo, hi).0
    }

    fn free(&mut self, block: u64) -> PyResult<()> {
        self.0.free(BlockId(block)).map_err(mem_err)
    }

    fn is_valid(&self, block: u64) -> bool {
        self.0.is_valid(BlockId(block))
    }

    fn bounds(&self, block: u64) -> Option<(i64, i64)> {
        self.0.bounds(BlockId(block))
    }

    /// Loads with a chunk named like `int32`, `uint8` or `float64`.
    fn load(&self, py: Python<'_>, chunk_name: &str, block: u64, ofs: i64) -> PyResult<Py<PyAny>> {
        let v = self.0.load(chunk(chunk_name)?, BlockId(block), ofs).map_err(mem_err)?;
        from_value(py, v)
    }

    fn store(&mut self, chunk_name: &str, block: u64, ofs: i64, value: &Bound<'_, PyAny>) -> PyResult<()> {
        let v = to_value(value)?;
        self.0.store(chunk(chunk_name)?, BlockId(block), ofs, v).map_err(mem_err)
    }
}

/// Compiles source text; raises `ValueError` with diagnostics on failure.
#[pyfunction]
fn compile(src: &str) -> PyResult<Program> {
    Program::new(src)
}

/// Compiles and pretty-prints source text.
#[pyfunction]
fn pretty(src: &str) -> PyResult<String> {
    Program::new(src).map(|p| p.pretty())
}

/// Compiles and runs source text.
#[pyfunction]
#[pyo3(signature = (src, world = None, fuel = DEFAULT_FUEL))]
fn run(py: Python<'_>, src: &str, world: Option<&Bound<'_, PyAny>>, fuel: u64) -> PyResult<Behavior> {
    Program::new(src)?.run(py, world, fuel)
}

#[pymodule]
pub fn pyclight(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Program>()?;
    m.add_class::<Behavior>()?;
    m.add_class::<Memory>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(pretty, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("DEFAULT_FUEL", DEFAULT_FUEL)?;
    Ok(())
}
