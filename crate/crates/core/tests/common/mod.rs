//! Shared test support: the program corpus and a random program generator.
#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use clight::exec::{run_program, Behavior};
use clight::frontend;
use clight::world::{format_trace, ScriptWorld};
use clight::Program;
use rand::seq::SliceRandom;
use rand::Rng;

pub struct CorpusProgram {
    pub name: String,
    pub source: String,
    pub world: Option<String>,
    /// Expected `run --trace` report: event lines, then the behavior line.
    pub expect: String,
}

impl CorpusProgram {
    pub fn program(&self) -> Program {
        frontend::compile(&self.source).unwrap_or_else(|d| panic!("{}: {:?}", self.name, d))
    }

    pub fn world(&self) -> ScriptWorld {
        ScriptWorld::parse(self.world.as_deref().unwrap_or("")).expect("world script")
    }

    pub fn run(&self, fuel: u64) -> Behavior {
        run_program(&mut self.world(), fuel, &self.program())
    }
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub fn corpus() -> Vec<CorpusProgram> {
    let dir = corpus_dir();
    let mut names: Vec<String> = fs::read_dir(&dir)
        .expect("corpus directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "cl").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let read = |ext: &str| fs::read_to_string(dir.join(format!("{}.{}", name, ext))).ok();
            CorpusProgram {
                source: read("cl").unwrap(),
                world: read("world"),
                expect: read("expect").unwrap_or_else(|| panic!("{}.expect missing", name)),
                name,
            }
        })
        .collect()
}

pub fn corpus_program(name: &str) -> CorpusProgram {
    corpus()
        .into_iter()
        .find(|p| p.name == name)
        .unwrap_or_else(|| panic!("no corpus program {}", name))
}

/// The report format of the command-line driver.
pub fn report(b: &Behavior) -> String {
    format!("{}{}\n", format_trace(b.trace()), b)
}

pub fn run_source(src: &str, world: &str, fuel: u64) -> Behavior {
    let p = frontend::compile(src).unwrap_or_else(|d| panic!("{}\n{:?}", src, d));
    run_program(&mut ScriptWorld::parse(world).unwrap(), fuel, &p)
}

// ---------------------------------------------------------------------------
// Random program generator
//
// Programs are produced as source text from a small typed model, then
// compiled. Compiling guarantees that the resulting AST is exactly what the
// front end produces, which is the domain on which printing and re-reading
// is expected to be the identity.

#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Arith(&'static str),
    Ptr(Box<Ty>),
    Array(Box<Ty>, u32),
    Struct(usize),
}

const INT_TYPES: &[&str] = &[
    "int",
    "unsigned int",
    "char",
    "signed char",
    "unsigned char",
    "short",
    "unsigned short",
];
const FLOAT_TYPES: &[&str] = &["double", "float"];

impl Ty {
    fn is_int(&self) -> bool {
        matches!(self, Ty::Arith(n) if INT_TYPES.contains(n))
    }

    fn is_arith(&self) -> bool {
        matches!(self, Ty::Arith(_))
    }

    fn declare(&self, name: &str, structs: &[StructDef]) -> String {
        match self {
            Ty::Arith(n) => format!("{} {}", n, name),
            Ty::Struct(i) => {
                let kw = if structs[*i].union { "union" } else { "struct" };
                format!("{} {} {}", kw, structs[*i].tag, name)
            }
            Ty::Ptr(t) => match &**t {
                Ty::Array(..) => t.declare(&format!("(*{})", name), structs),
                _ => t.declare(&format!("*{}", name), structs),
            },
            Ty::Array(t, n) => t.declare(&format!("{}[{}]", name, n), structs),
        }
    }

    fn name(&self, structs: &[StructDef]) -> String {
        self.declare("", structs).trim_end().to_string()
    }
}

struct StructDef {
    tag: String,
    union: bool,
    fields: Vec<(String, Ty)>,
}

#[derive(Clone)]
struct FnSig {
    name: String,
    result: Option<Ty>,
    params: Vec<Ty>,
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    structs: Vec<StructDef>,
    globals: Vec<(String, Ty)>,
    functions: Vec<FnSig>,
    locals: Vec<(String, Ty)>,
    result: Option<Ty>,
    loop_depth: u32,
    fresh: u32,
}

impl<R: Rng> Gen<'_, R> {
    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn arith_type(&mut self) -> Ty {
        if self.chance(0.75) {
            Ty::Arith(INT_TYPES.choose(self.rng).unwrap())
        } else {
            Ty::Arith(FLOAT_TYPES.choose(self.rng).unwrap())
        }
    }

    fn object_type(&mut self, depth: u32) -> Ty {
        match self.rng.gen_range(0..10) {
            0..=5 => self.arith_type(),
            6 | 7 if depth > 0 => Ty::Ptr(Box::new(self.object_type(depth - 1))),
            8 if depth > 0 => Ty::Array(Box::new(self.object_type(depth - 1)), self.rng.gen_range(1..5)),
            9 if !self.structs.is_empty() => Ty::Struct(self.rng.gen_range(0..self.structs.len())),
            _ => Ty::Arith("int"),
        }
    }

    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{}{}", prefix, self.fresh)
    }

    fn vars(&self) -> impl Iterator<Item = &(String, Ty)> {
        self.locals.iter().chain(&self.globals)
    }

    fn int_literal(&mut self) -> String {
        match self.rng.gen_range(0..6) {
            0 => format!("{}u", self.rng.gen_range(0..100000u32)),
            1 => format!("0x{:x}", self.rng.gen_range(0..0x10000u32)),
            2 => format!("'{}'", *b"aZ0 ".choose(self.rng).unwrap() as char),
            3 => format!("-{}", self.rng.gen_range(1..1000)),
            _ => self.rng.gen_range(0..100).to_string(),
        }
    }

    fn float_literal(&mut self) -> String {
        ["1.5", "0.25", "3e10", "1e-7", "2.0", "100.125", "0.5f", "-2.5", "7.0f"]
            .choose(self.rng)
            .unwrap()
            .to_string()
    }

    /// Lvalues with their types; `depth` bounds nested index expressions.
    fn lvalues(&mut self, depth: u32) -> Vec<(String, Ty)> {
        let mut out = Vec::new();
        let vars: Vec<(String, Ty)> = self.vars().cloned().collect();
        for (v, t) in vars {
            self.paths(v, t, depth, &mut out);
        }
        out
    }

    fn paths(&mut self, e: String, t: Ty, depth: u32, out: &mut Vec<(String, Ty)>) {
        match &t {
            Ty::Struct(i) => {
                let fields = self.structs[*i].fields.clone();
                for (f, ft) in fields {
                    self.paths(format!("{}.{}", e, f), ft, depth, out);
                }
            }
            Ty::Array(elem, n) => {
                if depth > 0 {
                    let idx = self.rng.gen_range(0..*n);
                    self.paths(format!("{}[{}]", e, idx), (**elem).clone(), depth - 1, out);
                }
            }
            Ty::Ptr(inner) => {
                if depth > 0 && !matches!(**inner, Ty::Array(..)) {
                    match &**inner {
                        Ty::Struct(i) => {
                            let fields = self.structs[*i].fields.clone();
                            if let Some((f, ft)) = fields.choose(self.rng).cloned() {
                                self.paths(format!("{}->{}", e, f), ft, depth - 1, out);
                            }
                        }
                        other => {
                            let other = other.clone();
                            self.paths(format!("(*{})", e), other, depth - 1, out);
                        }
                    }
                }
                out.push((e, t));
            }
            Ty::Arith(_) => out.push((e, t)),
        }
    }

    fn arith_expr(&mut self, depth: u32) -> String {
        self.expr_of(depth, false)
    }

    fn int_expr(&mut self, depth: u32) -> String {
        self.expr_of(depth, true)
    }

    fn expr_of(&mut self, depth: u32, int_only: bool) -> String {
        let leaf = depth == 0 || self.chance(0.3);
        if leaf {
            let candidates: Vec<String> = self
                .lvalues(1)
                .into_iter()
                .filter(|(_, t)| if int_only { t.is_int() } else { t.is_arith() })
                .map(|(e, _)| e)
                .collect();
            return match self.rng.gen_range(0..4) {
                0 | 1 if !candidates.is_empty() => candidates.choose(self.rng).unwrap().clone(),
                2 if !int_only => self.float_literal(),
                _ => self.int_literal(),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..13) {
            0 => {
                let op = ["+", "-", "*", "/"].choose(self.rng).unwrap();
                format!("({} {} {})", self.expr_of(d, int_only), op, self.expr_of(d, int_only))
            }
            1 => {
                let op = ["%", "<<", ">>", "&", "|", "^"].choose(self.rng).unwrap();
                format!("({} {} {})", self.int_expr(d), op, self.int_expr(d))
            }
            2 => {
                let op = ["<", "<=", ">", ">=", "==", "!="].choose(self.rng).unwrap();
                format!("({} {} {})", self.arith_expr(d), op, self.arith_expr(d))
            }
            3 => {
                let op = ["&&", "||"].choose(self.rng).unwrap();
                format!("({} {} {})", self.cond_expr(d), op, self.cond_expr(d))
            }
            4 => format!("-({})", self.expr_of(d, int_only)),
            5 => format!("~{}", self.int_expr(d)),
            6 => format!("!{}", self.cond_expr(d)),
            7 => format!(
                "({} ? {} : {})",
                self.cond_expr(d),
                self.expr_of(d, int_only),
                self.expr_of(d, int_only)
            ),
            8 => {
                let t = if int_only { Ty::Arith(INT_TYPES.choose(self.rng).unwrap()) } else { self.arith_type() };
                format!("({}) {}", t.name(&self.structs), self.expr_of(d, int_only))
            }
            9 => {
                let t = self.object_type(2);
                format!("sizeof({})", t.name(&self.structs))
            }
            10 => {
                // pointer difference of two pointers with the same target
                let ptrs: Vec<(String, Ty)> = self
                    .lvalues(1)
                    .into_iter()
                    .filter(|(_, t)| matches!(t, Ty::Ptr(_)))
                    .collect();
                match ptrs.choose(self.rng).cloned() {
                    Some((p, _)) => format!("({} - ({} + {}))", p, p, self.rng.gen_range(0..3)),
                    None => self.int_literal(),
                }
            }
            _ => self.expr_of(0, int_only),
        }
    }

    /// A scalar expression usable as a condition.
    fn cond_expr(&mut self, depth: u32) -> String {
        if self.chance(0.2) {
            if let Some(p) = self.pointer_of(None, depth) {
                return if self.chance(0.5) { format!("({} != 0)", p) } else { p };
            }
        }
        self.arith_expr(depth)
    }

    /// An expression of type `Ptr(target)`, or of any pointer type.
    fn pointer_of(&mut self, target: Option<&Ty>, depth: u32) -> Option<String> {
        let mut cands: Vec<String> = Vec::new();
        for (e, t) in self.lvalues(1) {
            match &t {
                Ty::Ptr(inner) if target.is_none_or(|x| **inner == *x) => {
                    if depth > 0 && !matches!(**inner, Ty::Array(..)) && self.chance(0.3) {
                        let off = self.int_expr(depth - 1);
                        cands.push(format!("({} + {})", e, off));
                    } else {
                        cands.push(e.clone());
                    }
                }
                _ => {}
            }
            if target.is_none_or(|x| *x == t) {
                cands.push(format!("&{}", e));
            }
            if let Ty::Array(elem, _) = &t {
                if target.is_none_or(|x| **elem == *x) {
                    cands.push(e.clone());
                }
            }
        }
        cands.choose(self.rng).cloned()
    }

    fn assign(&mut self) -> Option<String> {
        let targets: Vec<(String, Ty)> = self
            .lvalues(2)
            .into_iter()
            .filter(|(_, t)| matches!(t, Ty::Arith(_) | Ty::Ptr(_)))
            .collect();
        let (lhs, t) = targets.choose(self.rng)?.clone();
        let rhs = match &t {
            Ty::Arith(_) => self.arith_expr(3),
            Ty::Ptr(inner) => {
                let inner = (**inner).clone();
                match self.pointer_of(Some(&inner), 2) {
                    Some(p) if self.chance(0.85) => p,
                    _ => "0".to_string(),
                }
            }
            _ => unreachable!(),
        };
        Some(format!("{} = {};", lhs, rhs))
    }

    fn call(&mut self) -> Option<String> {
        let f = self.functions.choose(self.rng)?.clone();
        let mut args = Vec::new();
        for p in &f.params {
            args.push(match p {
                Ty::Ptr(inner) => self.pointer_of(Some(inner), 1).unwrap_or_else(|| "0".into()),
                _ => self.arith_expr(2),
            });
        }
        let call = format!("{}({})", f.name, args.join(", "));
        if let Some(r) = &f.result {
            let dests: Vec<String> = self
                .lvalues(1)
                .into_iter()
                .filter(|(_, t)| t == r)
                .map(|(e, _)| e)
                .collect();
            if let Some(d) = dests.choose(self.rng) {
                return Some(format!("{} = {};", d, call));
            }
        }
        Some(format!("{};", call))
    }

    fn stmt(&mut self, depth: u32) -> String {
        let simple = depth == 0 || self.chance(0.4);
        if simple {
            return match self.rng.gen_range(0..10) {
                0..=5 => self.assign(),
                6 | 7 => self.call(),
                8 if self.loop_depth > 0 => Some(if self.chance(0.5) { "break;" } else { "continue;" }.into()),
                9 => Some(self.ret()),
                _ => None,
            }
            .unwrap_or_else(|| ";".into());
        }
        let d = depth - 1;
        match self.rng.gen_range(0..7) {
            0 => {
                let c = self.cond_expr(2);
                let a = self.stmt(d);
                if self.chance(0.5) {
                    format!("if ({}) {} else {}", c, self.block(d), a)
                } else {
                    format!("if ({}) {}", c, self.block(d))
                }
            }
            1 => {
                let c = self.cond_expr(2);
                let body = self.loop_body(d);
                format!("while ({}) {}", c, body)
            }
            2 => {
                let c = self.cond_expr(2);
                let body = self.loop_body(d);
                format!("do {} while ({});", body, c)
            }
            3 => {
                let init = self.assign().unwrap_or_else(|| ";".into());
                let c = if self.chance(0.2) { String::new() } else { self.cond_expr(2) };
                let step = self.assign().unwrap_or_default();
                let body = self.loop_body(d);
                format!(
                    "for ({} {}; {}) {}",
                    init,
                    c,
                    step.trim_end_matches(';'),
                    body
                )
            }
            4 => {
                let scrut = self.int_expr(2);
                let mut labels: Vec<i32> = (0..self.rng.gen_range(0..4)).map(|_| self.rng.gen_range(-5..20)).collect();
                labels.sort();
                labels.dedup();
                self.loop_depth += 1;
                let mut text = format!("switch ({}) {{", scrut);
                for l in labels {
                    let body = self.stmt(d);
                    text.push_str(&format!(" case {}: {}", l, body));
                }
                let body = self.stmt(d);
                text.push_str(&format!(" default: {} }}", body));
                self.loop_depth -= 1;
                text
            }
            _ => self.block(d),
        }
    }

    fn loop_body(&mut self, depth: u32) -> String {
        self.loop_depth += 1;
        let b = self.block(depth);
        self.loop_depth -= 1;
        b
    }

    fn block(&mut self, depth: u32) -> String {
        let n = self.rng.gen_range(0..4);
        let items: Vec<String> = (0..n).map(|_| self.stmt(depth)).collect();
        format!("{{ {} }}", items.join(" "))
    }

    fn ret(&mut self) -> String {
        match self.result.clone() {
            None => "return;".into(),
            Some(Ty::Ptr(inner)) => format!("return {};", self.pointer_of(Some(&inner), 1).unwrap_or_else(|| "0".into())),
            Some(_) => format!("return {};", self.arith_expr(2)),
        }
    }

    fn struct_def(&mut self, i: usize) -> StructDef {
        let tag = format!("s{}", i);
        let union = self.chance(0.3);
        let n = self.rng.gen_range(1..5);
        let mut fields = Vec::new();
        for k in 0..n {
            let t = match self.rng.gen_range(0..6) {
                // pointer back to itself
                0 => Ty::Ptr(Box::new(Ty::Struct(i))),
                1 if i > 0 => Ty::Struct(self.rng.gen_range(0..i)),
                2 => Ty::Array(Box::new(self.arith_type()), self.rng.gen_range(1..4)),
                _ => self.arith_type(),
            };
            fields.push((format!("f{}", k), t));
        }
        StructDef { tag, union, fields }
    }

    fn function(&mut self, sig: &FnSig, param_names: &[String]) -> String {
        self.locals = param_names.iter().cloned().zip(sig.params.iter().cloned()).collect();
        self.result = sig.result.clone();
        let mut decls = Vec::new();
        for _ in 0..self.rng.gen_range(0..5) {
            let name = self.name("v");
            let t = self.object_type(2);
            decls.push(format!("    {};\n", t.declare(&name, &self.structs)));
            self.locals.push((name, t));
        }
        let body: Vec<String> = (0..self.rng.gen_range(0..6)).map(|_| format!("    {}\n", self.stmt(3))).collect();
        let result = match &sig.result {
            None => "void".to_string(),
            Some(t) => t.name(&self.structs),
        };
        let params = if sig.params.is_empty() {
            "void".to_string()
        } else {
            param_names
                .iter()
                .zip(&sig.params)
                .map(|(n, t)| t.declare(n, &self.structs))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("{} {}({}) {{\n{}{}{}}}\n", result, sig.name, params, decls.concat(), body.concat(), {
            let r = self.ret();
            format!("    {}\n", r)
        })
    }
}

/// Source text of a random well-formed program.
pub fn random_source(rng: &mut impl Rng) -> String {
    let mut g = Gen {
        rng,
        structs: Vec::new(),
        globals: Vec::new(),
        functions: Vec::new(),
        locals: Vec::new(),
        result: None,
        loop_depth: 0,
        fresh: 0,
    };
    let mut out = String::new();
    for i in 0..g.rng.gen_range(0..3) {
        let s = g.struct_def(i);
        let fields: Vec<String> = s
            .fields
            .iter()
            .map(|(f, t)| format!("{};", t.declare(f, &g.structs_with(&s))))
            .collect();
        out.push_str(&format!(
            "{} {} {{ {} }};\n",
            if s.union { "union" } else { "struct" },
            s.tag,
            fields.join(" ")
        ));
        g.structs.push(s);
    }
    for _ in 0..g.rng.gen_range(0..4) {
        let name = g.name("g");
        let t = g.object_type(2);
        let init = match &t {
            Ty::Arith(n) if g.rng.gen_bool(0.4) => {
                if FLOAT_TYPES.contains(n) {
                    format!(" = {}", g.float_literal())
                } else {
                    format!(" = {}", g.rng.gen_range(-50..50))
                }
            }
            _ => String::new(),
        };
        out.push_str(&format!("{}{};\n", t.declare(&name, &g.structs), init));
        g.globals.push((name, t));
    }
    for _ in 0..g.rng.gen_range(0..3) {
        let name = g.name("ext");
        let result = if g.rng.gen_bool(0.3) { None } else { Some(g.arith_type()) };
        let params: Vec<Ty> = (0..g.rng.gen_range(0..3)).map(|_| g.arith_type()).collect();
        let ps = if params.is_empty() {
            "void".into()
        } else {
            params.iter().map(|t| t.name(&g.structs)).collect::<Vec<_>>().join(", ")
        };
        let r = result.as_ref().map_or("void".to_string(), |t| t.name(&g.structs));
        out.push_str(&format!("extern {} {}({});\n", r, name, ps));
        g.functions.push(FnSig { name, result, params });
    }
    let helpers = g.rng.gen_range(0..3);
    let mut sigs = Vec::new();
    for _ in 0..helpers {
        let name = g.name("fn");
        let result = match g.rng.gen_range(0..5) {
            0 => None,
            1 => Some(Ty::Ptr(Box::new(Ty::Arith("int")))),
            _ => Some(g.arith_type()),
        };
        let params: Vec<Ty> = (0..g.rng.gen_range(0..4))
            .map(|_| if g.rng.gen_bool(0.2) { Ty::Ptr(Box::new(g.arith_type())) } else { g.arith_type() })
            .collect();
        let sig = FnSig { name, result, params };
        // declared before any body, so helpers may call each other
        g.functions.push(sig.clone());
        sigs.push(sig);
    }
    for sig in &sigs {
        let names: Vec<String> = sig.params.iter().map(|_| g.name("p")).collect();
        out.push('\n');
        out.push_str(&g.function(sig, &names));
    }
    let main = FnSig {
        name: "main".into(),
        result: Some(Ty::Arith("int")),
        params: Vec::new(),
    };
    out.push('\n');
    out.push_str(&g.function(&main, &[]));
    out
}

impl<R: Rng> Gen<'_, R> {
    // Field declarations may mention the struct being defined.
    fn structs_with(&self, s: &StructDef) -> Vec<StructDef> {
        let mut v: Vec<StructDef> = self
            .structs
            .iter()
            .map(|d| StructDef {
                tag: d.tag.clone(),
                union: d.union,
                fields: d.fields.clone(),
            })
            .collect();
        v.push(StructDef {
            tag: s.tag.clone(),
            union: s.union,
            fields: Vec::new(),
        });
        v
    }
}

/// A random program in the image of the front end.
pub fn random_program(rng: &mut impl Rng) -> (String, Program) {
    let src = random_source(rng);
    match frontend::compile(&src) {
        Ok(p) => (src, p),
        Err(d) => panic!("generator produced an ill-formed program:\n{}\n{:?}", src, d),
    }
}
