//! Syntactic side conditions on Clight programs.

use std::collections::{HashMap, HashSet};

use super::*;
use crate::layout::sizeof;

/// Largest object size accepted; offsets are 32-bit signed.
const MAX_OBJECT_SIZE: u64 = i32::MAX as u64;

/// Checks every side condition of the abstract syntax: array counts, field
/// name uniqueness, `comp_pointer` scoping, switch shape, declaration
/// uniqueness and the type of `main`. Returns an empty list iff `p` is well
/// formed.
pub fn well_formed(p: &Program) -> Vec<Diagnostic> {
    let mut cx = Checker::default();
    cx.program(p);
    cx.diags
}

#[derive(Default)]
struct Checker {
    diags: Vec<Diagnostic>,
    /// C-level field lists seen for each tag, for consistency across uses.
    tags: HashMap<(CompKind, Ident), Vec<(Ident, CType)>>,
    reported_tags: HashSet<(CompKind, Ident)>,
}

impl Checker {
    fn err(&mut self, msg: String) {
        self.diags.push(Diagnostic::error(None, msg));
    }

    fn program(&mut self, p: &Program) {
        let mut names = HashSet::new();
        for g in &p.globals {
            if !names.insert(g.name.clone()) {
                self.err(format!("duplicate global `{}`", g.name));
            }
            self.object_type(&g.ty, &format!("global `{}`", g.name));
            match (&g.init, &g.ty) {
                (None, _) => {}
                (Some(Init::Int(_)), t) if t.is_int() || matches!(t, Type::Pointer(_)) => {}
                (Some(Init::Float(_)), Type::Float(_)) => {}
                (Some(_), _) => self.err(format!(
                    "initializer of global `{}` does not match its type",
                    g.name
                )),
            }
        }
        for f in &p.functions {
            if !names.insert(f.name().clone()) {
                self.err(format!("duplicate global `{}`", f.name()));
            }
            self.function(f);
        }
        match p.function(p.main.as_str()) {
            None => self.err(format!("main function `{}` is not defined", p.main)),
            Some(Fundef::External(_)) => {
                self.err(format!("main function `{}` must not be external", p.main))
            }
            Some(f @ Fundef::Internal(_)) => {
                if f.type_of() != Type::function(vec![], Type::INT) {
                    self.err(format!(
                        "main function `{}` must have type int(void)",
                        p.main
                    ));
                }
            }
        }
    }

    fn function(&mut self, f: &Fundef) {
        self.ty(f.result(), &mut Vec::new());
        match f {
            Fundef::External(e) => {
                for t in &e.params {
                    self.ty(t, &mut Vec::new());
                }
            }
            Fundef::Internal(f) => {
                let mut seen = HashSet::new();
                for (id, t) in f.params.iter().chain(&f.locals) {
                    if !seen.insert(id.clone()) {
                        self.err(format!(
                            "duplicate parameter or local `{}` in function `{}`",
                            id, f.name
                        ));
                    }
                    self.object_type(t, &format!("variable `{}`", id));
                }
                self.stmt(&f.body);
            }
        }
    }

    fn object_type(&mut self, t: &Type, what: &str) {
        let before = self.diags.len();
        self.ty(t, &mut Vec::new());
        if self.diags.len() == before && sizeof(t) > MAX_OBJECT_SIZE {
            self.err(format!("type of {} is too large", what));
        }
    }

    fn ty(&mut self, t: &Type, enclosing: &mut Vec<(CompKind, Ident)>) {
        match t {
            Type::Void | Type::Int(..) | Type::Float(_) => {}
            Type::Array(e, n) => {
                if *n == 0 {
                    self.err("array size must be positive".into());
                }
                self.ty(e, enclosing);
            }
            Type::Pointer(e) => self.ty(e, enclosing),
            Type::Function(ps, r) => {
                for p in ps {
                    self.ty(p, enclosing);
                }
                self.ty(r, enclosing);
            }
            Type::CompPointer(id) => {
                if !enclosing.iter().any(|(_, x)| x == id) {
                    self.err(format!(
                        "comp_pointer({}) is not inside a struct or union named {}",
                        id, id
                    ));
                }
            }
            Type::Struct(id, fl) | Type::Union(id, fl) => {
                let kind = t.comp_kind().unwrap();
                if fl.is_empty() {
                    self.err(format!("{} has no fields", tag_name(kind, id)));
                }
                let mut seen = HashSet::new();
                for (f, _) in fl {
                    if !seen.insert(f) {
                        self.err(format!(
                            "duplicate field `{}` in {}",
                            f,
                            tag_name(kind, id)
                        ));
                    }
                }
                enclosing.push((kind, id.clone()));
                let shape: Vec<(Ident, CType)> = fl
                    .iter()
                    .map(|(f, ft)| (f.clone(), ft.to_ctype(enclosing)))
                    .collect();
                for (_, ft) in fl {
                    self.ty(ft, enclosing);
                }
                enclosing.pop();
                let key = (kind, id.clone());
                match self.tags.get(&key) {
                    Some(prev) if *prev != shape => {
                        if self.reported_tags.insert(key) {
                            self.err(format!(
                                "conflicting definitions of {}",
                                tag_name(kind, id)
                            ));
                        }
                    }
                    Some(_) => {}
                    None => {
                        self.tags.insert(key, shape);
                    }
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        self.ty(&e.ty, &mut Vec::new());
        match &e.kind {
            ExprKind::Var(_) | ExprKind::IntConst(_) | ExprKind::FloatConst(_) => {}
            ExprKind::SizeofType(t) => self.ty(t, &mut Vec::new()),
            ExprKind::Unop(_, a)
            | ExprKind::Deref(a)
            | ExprKind::Field(a, _)
            | ExprKind::Addrof(a) => self.expr(a),
            ExprKind::Cast(t, a) => {
                self.ty(t, &mut Vec::new());
                self.expr(a);
            }
            ExprKind::Binop(_, a, b) => {
                self.expr(a);
                self.expr(b);
            }
            ExprKind::Cond(a, b, c) => {
                self.expr(a);
                self.expr(b);
                self.expr(c);
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Skip | Stmt::Break | Stmt::Continue | Stmt::Return(None) => {}
            Stmt::Return(Some(e)) => self.expr(e),
            Stmt::Assign(a, b) => {
                self.expr(a);
                self.expr(b);
            }
            Stmt::Call(res, f, args) => {
                if let Some(r) = res {
                    self.expr(r);
                }
                self.expr(f);
                for a in args {
                    self.expr(a);
                }
            }
            Stmt::Seq(a, b) => {
                self.stmt(a);
                self.stmt(b);
            }
            Stmt::If(c, a, b) => {
                self.expr(c);
                self.stmt(a);
                self.stmt(b);
            }
            Stmt::While(c, body) | Stmt::DoWhile(body, c) => {
                self.expr(c);
                self.stmt(body);
            }
            Stmt::For(init, c, step, body) => {
                self.stmt(init);
                self.expr(c);
                self.stmt(step);
                self.stmt(body);
            }
            Stmt::Switch(scrut, cases) => {
                self.expr(scrut);
                self.switch_cases(cases);
                for (_, body) in cases {
                    self.stmt(body);
                }
            }
        }
    }

    fn switch_cases(&mut self, cases: &SwitchCases) {
        let defaults = cases
            .iter()
            .filter(|(l, _)| *l == CaseLabel::Default)
            .count();
        if defaults == 0 {
            self.err("switch has no default case".into());
        } else if defaults > 1 {
            self.err("switch has more than one default case".into());
        } else if cases.last().map(|(l, _)| *l) != Some(CaseLabel::Default) {
            self.err("default must be last".into());
        }
        let mut seen = HashSet::new();
        for (l, _) in cases {
            if let CaseLabel::Case(n) = l {
                if !seen.insert(*n) {
                    self.err(format!("duplicate case label {}", n));
                }
            }
        }
    }
}

fn tag_name(kind: CompKind, id: &Ident) -> String {
    match kind {
        CompKind::Struct => format!("struct {}", id),
        CompKind::Union => format!("union {}", id),
    }
}
