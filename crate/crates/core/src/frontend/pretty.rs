//! Printing Clight programs in concrete syntax.
//!
//! Every cast in the tree is printed explicitly, so that parsing and
//! elaborating the output reproduces the tree.

use std::collections::HashSet;
use std::fmt::Write;

use crate::ast::*;

const INDENT: &str = "    ";
const POSTFIX: u8 = 16;
const UNARY: u8 = 15;
const COND: u8 = 3;

fn base_name(t: &CType) -> String {
    use IntSize::*;
    use Signedness::*;
    match t {
        CType::Void => "void".into(),
        CType::Int(I8, Signed) => "signed char".into(),
        CType::Int(I8, Unsigned) => "unsigned char".into(),
        CType::Int(I16, Signed) => "short".into(),
        CType::Int(I16, Unsigned) => "unsigned short".into(),
        CType::Int(I32, Signed) => "int".into(),
        CType::Int(I32, Unsigned) => "unsigned int".into(),
        CType::Float(FloatSize::F32) => "float".into(),
        CType::Float(FloatSize::F64) => "double".into(),
        CType::Named(CompKind::Struct, id) => format!("struct {}", id),
        CType::Named(CompKind::Union, id) => format!("union {}", id),
        _ => unreachable!("not a base type"),
    }
}

fn params_text(ps: &[CType]) -> String {
    if ps.is_empty() {
        "void".into()
    } else {
        ps.iter()
            .map(|p| declare(p, String::new()))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Declaration of `inner` (a name, possibly with declarator operators
/// already applied) with type `t`.
fn declare(t: &CType, inner: String) -> String {
    let wrap = |s: String| if s.starts_with('*') { format!("({})", s) } else { s };
    match t {
        CType::Pointer(e) => declare(e, format!("*{}", inner)),
        CType::Array(e, n) => declare(e, format!("{}[{}]", wrap(inner), n)),
        CType::Function(ps, r) => declare(r, format!("{}({})", wrap(inner), params_text(ps))),
        base if inner.is_empty() => base_name(base),
        base => format!("{} {}", base_name(base), inner),
    }
}

/// A C type name such as `int *` or `struct s`.
pub fn ctype_to_string(t: &CType) -> String {
    declare(t, String::new())
}

/// A C type name for a Clight type.
pub fn type_to_string(t: &Type) -> String {
    ctype_to_string(&t.to_ctype(&[]))
}

fn decl(t: &Type, name: &str) -> String {
    declare(&t.to_ctype(&[]), name.to_string())
}

fn float_text(f: f64) -> String {
    format!("{:?}", f)
}

// ---- composite definitions ---------------------------------------------

type CompDef = (CompKind, Ident, Vec<(Ident, CType)>);

#[derive(Default)]
struct Tags {
    seen: HashSet<Ident>,
    defs: Vec<CompDef>,
}

impl Tags {
    fn ty(&mut self, t: &Type, enclosing: &mut Vec<(CompKind, Ident)>) {
        match t {
            Type::Array(e, _) | Type::Pointer(e) => self.ty(e, enclosing),
            Type::Function(ps, r) => {
                for p in ps {
                    self.ty(p, enclosing);
                }
                self.ty(r, enclosing);
            }
            Type::Struct(id, fl) | Type::Union(id, fl) => {
                if !self.seen.insert(id.clone()) {
                    return;
                }
                let kind = t.comp_kind().expect("composite");
                enclosing.push((kind, id.clone()));
                let fields = fl
                    .iter()
                    .map(|(f, ft)| (f.clone(), ft.to_ctype(enclosing)))
                    .collect();
                for (_, ft) in fl {
                    self.ty(ft, enclosing);
                }
                // after its members, so that by-value members are defined first
                self.defs.push((kind, id.clone(), fields));
                enclosing.pop();
            }
            _ => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        self.ty(&e.ty, &mut Vec::new());
        match &e.kind {
            ExprKind::SizeofType(t) => self.ty(t, &mut Vec::new()),
            ExprKind::Cast(t, a) => {
                self.ty(t, &mut Vec::new());
                self.expr(a);
            }
            ExprKind::Unop(_, a)
            | ExprKind::Deref(a)
            | ExprKind::Field(a, _)
            | ExprKind::Addrof(a) => self.expr(a),
            ExprKind::Binop(_, a, b) => {
                self.expr(a);
                self.expr(b);
            }
            ExprKind::Cond(c, a, b) => {
                self.expr(c);
                self.expr(a);
                self.expr(b);
            }
            ExprKind::Var(_) | ExprKind::IntConst(_) | ExprKind::FloatConst(_) => {}
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Skip | Stmt::Break | Stmt::Continue | Stmt::Return(None) => {}
            Stmt::Assign(a, b) => {
                self.expr(a);
                self.expr(b);
            }
            Stmt::Call(l, f, args) => {
                if let Some(l) = l {
                    self.expr(l);
                }
                self.expr(f);
                args.iter().for_each(|a| self.expr(a));
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
            Stmt::While(c, b) | Stmt::DoWhile(b, c) => {
                self.expr(c);
                self.stmt(b);
            }
            Stmt::For(i, c, st, b) => {
                self.stmt(i);
                self.expr(c);
                self.stmt(st);
                self.stmt(b);
            }
            Stmt::Return(Some(e)) => self.expr(e),
            Stmt::Switch(e, cases) => {
                self.expr(e);
                cases.iter().for_each(|(_, s)| self.stmt(s));
            }
        }
    }
}

// ---- expressions --------------------------------------------------------

fn binop_info(op: BinaryOp) -> (&'static str, u8) {
    use BinaryOp::*;
    match op {
        Mul => ("*", 13),
        Div => ("/", 13),
        Mod => ("%", 13),
        Add => ("+", 12),
        Sub => ("-", 12),
        Shl => ("<<", 11),
        Shr => (">>", 11),
        Lt => ("<", 10),
        Le => ("<=", 10),
        Gt => (">", 10),
        Ge => (">=", 10),
        Eq => ("==", 9),
        Ne => ("!=", 9),
        And => ("&", 8),
        Xor => ("^", 7),
        Or => ("|", 6),
    }
}

fn paren((s, p): (String, u8), min: u8) -> String {
    if p < min {
        format!("({})", s)
    } else {
        s
    }
}

fn at(e: &Expr, min: u8) -> String {
    paren(expr_prec(e), min)
}

/// Text of `e` with its precedence level.
fn expr_prec(e: &Expr) -> (String, u8) {
    match &e.kind {
        ExprKind::Var(id) => (id.to_string(), POSTFIX),
        ExprKind::IntConst(n) if e.ty == Type::UINT => (format!("{}u", *n as u32), POSTFIX),
        ExprKind::IntConst(n) => (n.to_string(), if *n < 0 { UNARY } else { POSTFIX }),
        ExprKind::FloatConst(f) => {
            let s = float_text(f.0);
            let p = if s.starts_with('-') { UNARY } else { POSTFIX };
            (s, p)
        }
        ExprKind::SizeofType(t) => (format!("sizeof({})", type_to_string(t)), UNARY),
        ExprKind::Unop(op, a) => {
            let sym = match op {
                UnaryOp::Neg => "-",
                UnaryOp::BitNot => "~",
                UnaryOp::LogNot => "!",
            };
            let (s, p) = expr_prec(a);
            // keep `-` off literals (it would fold) and off a leading `-`
            let literal = matches!(a.kind, ExprKind::IntConst(_) | ExprKind::FloatConst(_));
            let s = if p < UNARY || (*op == UnaryOp::Neg && (literal || s.starts_with('-'))) {
                format!("({})", s)
            } else {
                s
            };
            (format!("{}{}", sym, s), UNARY)
        }
        ExprKind::Deref(a) => match &a.kind {
            ExprKind::Binop(BinaryOp::Add, x, y) => {
                (format!("{}[{}]", at(x, POSTFIX), expr_text(y)), POSTFIX)
            }
            _ => (format!("*{}", at(a, UNARY)), UNARY),
        },
        ExprKind::Field(a, f) => match &a.kind {
            ExprKind::Deref(p) if !matches!(p.kind, ExprKind::Binop(BinaryOp::Add, ..)) => {
                (format!("{}->{}", at(p, POSTFIX), f), POSTFIX)
            }
            _ => (format!("{}.{}", at(a, POSTFIX), f), POSTFIX),
        },
        ExprKind::Addrof(a) => (format!("&{}", at(a, UNARY)), UNARY),
        ExprKind::Cast(t, a) => (format!("({}) {}", type_to_string(t), at(a, UNARY)), UNARY),
        ExprKind::Binop(op, l, r) => {
            let (sym, p) = binop_info(*op);
            (format!("{} {} {}", at(l, p), sym, at(r, p + 1)), p)
        }
        ExprKind::Cond(c, a, b) => (
            format!("{} ? {} : {}", at(c, COND + 1), expr_text(a), at(b, COND)),
            COND,
        ),
    }
}

fn expr_text(e: &Expr) -> String {
    expr_prec(e).0
}

/// An expression in concrete syntax.
pub fn expr_to_string(e: &Expr) -> String {
    expr_text(e)
}

// ---- statements ---------------------------------------------------------

/// Statements of a right-nested sequence, in order.
fn flatten(s: &Stmt) -> Vec<&Stmt> {
    let mut out = Vec::new();
    let mut cur = s;
    if *cur == Stmt::Skip {
        return out;
    }
    while let Stmt::Seq(a, b) = cur {
        out.push(&**a);
        cur = b;
    }
    out.push(cur);
    out
}

fn call_text(l: &Option<Expr>, f: &Expr, args: &[Expr]) -> String {
    let callee = match &f.kind {
        ExprKind::Var(id) => id.to_string(),
        ExprKind::Deref(p) => format!("(*{})", at(p, UNARY)),
        _ => at(f, POSTFIX),
    };
    let args: Vec<String> = args.iter().map(expr_text).collect();
    let call = format!("{}({})", callee, args.join(", "));
    match l {
        Some(l) => format!("{} = {}", expr_text(l), call),
        None => call,
    }
}

struct Printer {
    out: String,
}

impl Printer {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn body(&mut self, depth: usize, s: &Stmt) {
        for item in flatten(s) {
            self.stmt(depth, item);
        }
    }

    /// A `for` initializer or step: empty, a simple statement, or a block
    /// on one line.
    fn clause(s: &Stmt) -> String {
        match s {
            Stmt::Skip => String::new(),
            Stmt::Assign(l, r) => format!("{} = {}", expr_text(l), expr_text(r)),
            Stmt::Call(l, f, args) => call_text(l, f, args),
            _ => {
                let mut p = Printer { out: String::new() };
                p.body(0, s);
                let inner: Vec<&str> = p.out.lines().map(str::trim).collect();
                format!("{{ {} }}", inner.join(" "))
            }
        }
    }

    fn stmt(&mut self, d: usize, s: &Stmt) {
        match s {
            Stmt::Skip => self.line(d, ";"),
            Stmt::Seq(..) => {
                self.line(d, "{");
                self.body(d + 1, s);
                self.line(d, "}");
            }
            Stmt::Assign(l, r) => self.line(d, &format!("{} = {};", expr_text(l), expr_text(r))),
            Stmt::Call(l, f, args) => self.line(d, &format!("{};", call_text(l, f, args))),
            Stmt::If(c, a, b) => {
                self.line(d, &format!("if ({}) {{", expr_text(c)));
                self.body(d + 1, a);
                let mut rest = &**b;
                loop {
                    match rest {
                        Stmt::Skip => break,
                        Stmt::If(c2, a2, b2) => {
                            self.line(d, &format!("}} else if ({}) {{", expr_text(c2)));
                            self.body(d + 1, a2);
                            rest = b2;
                        }
                        other => {
                            self.line(d, "} else {");
                            self.body(d + 1, other);
                            break;
                        }
                    }
                }
                self.line(d, "}");
            }
            Stmt::While(c, b) => {
                self.line(d, &format!("while ({}) {{", expr_text(c)));
                self.body(d + 1, b);
                self.line(d, "}");
            }
            Stmt::DoWhile(b, c) => {
                self.line(d, "do {");
                self.body(d + 1, b);
                self.line(d, &format!("}} while ({});", expr_text(c)));
            }
            Stmt::For(i, c, st, b) => {
                let head = format!(
                    "for ({}; {}; {}) {{",
                    Self::clause(i),
                    expr_text(c),
                    Self::clause(st)
                );
                self.line(d, &head);
                self.body(d + 1, b);
                self.line(d, "}");
            }
            Stmt::Break => self.line(d, "break;"),
            Stmt::Continue => self.line(d, "continue;"),
            Stmt::Return(None) => self.line(d, "return;"),
            Stmt::Return(Some(e)) => self.line(d, &format!("return {};", expr_text(e))),
            Stmt::Switch(e, cases) => {
                self.line(d, &format!("switch ({}) {{", expr_text(e)));
                for (label, body) in cases {
                    match label {
                        CaseLabel::Case(n) => self.line(d, &format!("case {}:", n)),
                        CaseLabel::Default => self.line(d, "default:"),
                    }
                    self.body(d + 1, body);
                }
                self.line(d, "}");
            }
        }
    }
}

/// A statement in concrete syntax, one statement per line.
pub fn stmt_to_string(s: &Stmt) -> String {
    let mut p = Printer { out: String::new() };
    p.stmt(0, s);
    p.out
}

/// Prints `p` in concrete syntax: struct and union definitions, global
/// variables, then functions in program order.
pub fn pretty_print(p: &Program) -> String {
    let mut tags = Tags::default();
    for g in &p.globals {
        tags.ty(&g.ty, &mut Vec::new());
    }
    for f in &p.functions {
        tags.ty(&f.type_of(), &mut Vec::new());
        if let Fundef::Internal(f) = f {
            for (_, t) in f.params.iter().chain(&f.locals) {
                tags.ty(t, &mut Vec::new());
            }
            tags.stmt(&f.body);
        }
    }

    let mut pr = Printer { out: String::new() };
    for (kind, id, fields) in &tags.defs {
        let kw = match kind {
            CompKind::Struct => "struct",
            CompKind::Union => "union",
        };
        pr.line(0, &format!("{} {} {{", kw, id));
        for (f, t) in fields {
            pr.line(1, &format!("{};", declare(t, f.to_string())));
        }
        pr.line(0, "};");
    }
    if !tags.defs.is_empty() {
        pr.out.push('\n');
    }
    for g in &p.globals {
        let mut line = decl(&g.ty, g.name.as_str());
        match g.init {
            Some(Init::Int(n)) => write!(line, " = {}", n).expect("string write"),
            Some(Init::Float(f)) => write!(line, " = {}", float_text(f.0)).expect("string write"),
            None => {}
        }
        line.push(';');
        pr.line(0, &line);
    }
    if !p.globals.is_empty() {
        pr.out.push('\n');
    }
    for (i, f) in p.functions.iter().enumerate() {
        match f {
            Fundef::External(e) => {
                let head = declare(
                    &e.result.to_ctype(&[]),
                    format!(
                        "{}({})",
                        e.name,
                        params_text(&e.params.iter().map(|t| t.to_ctype(&[])).collect::<Vec<_>>())
                    ),
                );
                pr.line(0, &format!("extern {};", head));
            }
            Fundef::Internal(f) => {
                if i > 0 && matches!(p.functions[i - 1], Fundef::Internal(_)) {
                    pr.out.push('\n');
                }
                let params = if f.params.is_empty() {
                    "void".to_string()
                } else {
                    f.params
                        .iter()
                        .map(|(id, t)| decl(t, id.as_str()))
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                let head = declare(
                    &f.result.to_ctype(&[]),
                    format!("{}({})", f.name, params),
                );
                if f.locals.is_empty() && f.body == Stmt::Skip {
                    pr.line(0, &format!("{} {{ }}", head));
                    continue;
                }
                pr.line(0, &format!("{} {{", head));
                for (id, t) in &f.locals {
                    pr.line(1, &format!("{};", decl(t, id.as_str())));
                }
                pr.body(1, &f.body);
                pr.line(0, "}");
            }
        }
    }
    pr.out
}
