//! Abstract syntax of Clight: types, type-annotated expressions, statements,
//! functions and programs.
//!
//! Struct and union types are structural: they carry their tag and their
//! full field list. Recursion goes through [`Type::CompPointer`], which stands
//! for a pointer to the nearest enclosing struct or union with that tag.

use std::fmt;
use std::sync::Arc;

mod wf;

pub use wf::well_formed;

/// An interned identifier. Equality is string equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: &str) -> Self {
        Ident(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident(Arc::from(s))
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntSize {
    I8,
    I16,
    I32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signedness {
    Signed,
    Unsigned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FloatSize {
    F32,
    F64,
}

/// Ordered `(name, type)` pairs of a struct or union.
pub type FieldList = Vec<(Ident, Type)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Void,
    Int(IntSize, Signedness),
    Float(FloatSize),
    Array(Box<Type>, u32),
    Pointer(Box<Type>),
    Function(Vec<Type>, Box<Type>),
    Struct(Ident, FieldList),
    Union(Ident, FieldList),
    CompPointer(Ident),
}

impl Type {
    pub const INT: Type = Type::Int(IntSize::I32, Signedness::Signed);
    pub const UINT: Type = Type::Int(IntSize::I32, Signedness::Unsigned);
    pub const DOUBLE: Type = Type::Float(FloatSize::F64);
    pub const FLOAT: Type = Type::Float(FloatSize::F32);

    pub fn pointer(to: Type) -> Type {
        Type::Pointer(Box::new(to))
    }

    pub fn array(elem: Type, n: u32) -> Type {
        Type::Array(Box::new(elem), n)
    }

    pub fn function(params: Vec<Type>, result: Type) -> Type {
        Type::Function(params, Box::new(result))
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Type::Int(..))
    }

    pub fn is_float(&self) -> bool {
        matches!(self, Type::Float(_))
    }

    pub fn is_arith(&self) -> bool {
        self.is_int() || self.is_float()
    }

    /// Types whose r-values are pointers: pointers, arrays (by reference),
    /// functions (by reference) and `comp_pointer`.
    pub fn is_pointer_like(&self) -> bool {
        matches!(
            self,
            Type::Pointer(_) | Type::Array(..) | Type::Function(..) | Type::CompPointer(_)
        )
    }

    /// Target type for pointer arithmetic: `pointer(τ)` and `array(τ, n)`.
    pub fn pointee(&self) -> Option<&Type> {
        match self {
            Type::Pointer(t) | Type::Array(t, _) => Some(t),
            _ => None,
        }
    }

    pub fn is_composite(&self) -> bool {
        matches!(self, Type::Struct(..) | Type::Union(..))
    }

    /// Field list and tag of a struct or union type.
    pub fn composite(&self) -> Option<(&Ident, &FieldList)> {
        match self {
            Type::Struct(id, fl) | Type::Union(id, fl) => Some((id, fl)),
            _ => None,
        }
    }
}

/// Replaces `comp_pointer(id)` inside the field types of a struct/union named
/// `id` by an explicit `pointer(struct id ...)`. This gives the type of a field
/// access as seen from outside the composite.
pub fn unroll_field_type(composite: &Type, field_ty: &Type) -> Type {
    match composite.composite() {
        Some((id, _)) => subst_comp_pointer(field_ty, id, composite),
        None => field_ty.clone(),
    }
}

fn subst_comp_pointer(t: &Type, id: &Ident, with: &Type) -> Type {
    match t {
        Type::CompPointer(x) if x == id => Type::pointer(with.clone()),
        Type::Pointer(inner) => Type::pointer(subst_comp_pointer(inner, id, with)),
        Type::Array(inner, n) => Type::array(subst_comp_pointer(inner, id, with), *n),
        Type::Function(ps, r) => Type::function(
            ps.iter().map(|p| subst_comp_pointer(p, id, with)).collect(),
            subst_comp_pointer(r, id, with),
        ),
        // an inner composite with the same tag shadows the outer one
        Type::Struct(x, _) | Type::Union(x, _) if x == id => t.clone(),
        Type::Struct(x, fl) => Type::Struct(x.clone(), subst_fields(fl, id, with)),
        Type::Union(x, fl) => Type::Union(x.clone(), subst_fields(fl, id, with)),
        _ => t.clone(),
    }
}

fn subst_fields(fl: &FieldList, id: &Ident, with: &Type) -> FieldList {
    fl.iter()
        .map(|(f, t)| (f.clone(), subst_comp_pointer(t, id, with)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    BitNot,
    LogNot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Shl,
    Shr,
    And,
    Or,
    Xor,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinaryOp {
    pub fn is_comparison(self) -> bool {
        use BinaryOp::*;
        matches!(self, Lt | Le | Gt | Ge | Eq | Ne)
    }
}

/// A 64-bit float literal compared by bit pattern, so that `-0.0 != 0.0`
/// structurally.
#[derive(Clone, Copy, Debug)]
pub struct FloatLit(pub f64);

impl PartialEq for FloatLit {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for FloatLit {}

impl std::hash::Hash for FloatLit {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Var(Ident),
    /// 32-bit two's-complement bit pattern; signedness comes from the annotation.
    IntConst(i32),
    FloatConst(FloatLit),
    SizeofType(Type),
    Unop(UnaryOp, Box<Expr>),
    Binop(BinaryOp, Box<Expr>, Box<Expr>),
    Deref(Box<Expr>),
    Field(Box<Expr>, Ident),
    Addrof(Box<Expr>),
    Cast(Type, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
}

/// An expression paired with its static type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: Type,
}

impl Expr {
    pub fn new(kind: ExprKind, ty: Type) -> Self {
        Expr { kind, ty }
    }

    pub fn var(id: impl Into<Ident>, ty: Type) -> Self {
        Expr::new(ExprKind::Var(id.into()), ty)
    }

    pub fn int(n: i32) -> Self {
        Expr::new(ExprKind::IntConst(n), Type::INT)
    }

    pub fn float(f: f64) -> Self {
        Expr::new(ExprKind::FloatConst(FloatLit(f)), Type::DOUBLE)
    }

    pub fn unop(op: UnaryOp, a: Expr, ty: Type) -> Self {
        Expr::new(ExprKind::Unop(op, Box::new(a)), ty)
    }

    pub fn binop(op: BinaryOp, a: Expr, b: Expr, ty: Type) -> Self {
        Expr::new(ExprKind::Binop(op, Box::new(a), Box::new(b)), ty)
    }

    pub fn deref(a: Expr, ty: Type) -> Self {
        Expr::new(ExprKind::Deref(Box::new(a)), ty)
    }

    pub fn field(a: Expr, f: impl Into<Ident>, ty: Type) -> Self {
        Expr::new(ExprKind::Field(Box::new(a), f.into()), ty)
    }

    pub fn addrof(a: Expr) -> Self {
        let ty = Type::pointer(a.ty.clone());
        Expr::new(ExprKind::Addrof(Box::new(a)), ty)
    }

    pub fn cast(to: Type, a: Expr) -> Self {
        Expr::new(ExprKind::Cast(to.clone(), Box::new(a)), to)
    }

    pub fn cond(c: Expr, a: Expr, b: Expr, ty: Type) -> Self {
        Expr::new(ExprKind::Cond(Box::new(c), Box::new(a), Box::new(b)), ty)
    }

    pub fn is_lvalue(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Var(_) | ExprKind::Deref(_) | ExprKind::Field(..)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    Case(i32),
    Default,
}

pub type SwitchCases = Vec<(CaseLabel, Stmt)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Assign(Expr, Expr),
    Call(Option<Expr>, Expr, Vec<Expr>),
    Seq(Box<Stmt>, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    While(Expr, Box<Stmt>),
    DoWhile(Box<Stmt>, Expr),
    For(Box<Stmt>, Expr, Box<Stmt>, Box<Stmt>),
    Break,
    Continue,
    Return(Option<Expr>),
    Switch(Expr, SwitchCases),
}

impl Stmt {
    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    /// Right-nested sequence of `stmts`; `Skip` when empty.
    pub fn block(stmts: Vec<Stmt>) -> Stmt {
        let mut it = stmts.into_iter().rev();
        match it.next() {
            None => Stmt::Skip,
            Some(last) => it.fold(last, |acc, s| Stmt::seq(s, acc)),
        }
    }

    pub fn if_(c: Expr, a: Stmt, b: Stmt) -> Stmt {
        Stmt::If(c, Box::new(a), Box::new(b))
    }

    pub fn while_(c: Expr, body: Stmt) -> Stmt {
        Stmt::While(c, Box::new(body))
    }

    pub fn do_while(body: Stmt, c: Expr) -> Stmt {
        Stmt::DoWhile(Box::new(body), c)
    }

    pub fn for_(init: Stmt, c: Expr, step: Stmt, body: Stmt) -> Stmt {
        Stmt::For(Box::new(init), c, Box::new(step), Box::new(body))
    }
}

/// Variable declarations: `(name, type)`.
pub type Decls = Vec<(Ident, Type)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InternalFunction {
    pub name: Ident,
    pub result: Type,
    pub params: Decls,
    pub locals: Decls,
    pub body: Stmt,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExternalFunction {
    pub name: Ident,
    pub result: Type,
    pub params: Vec<Type>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Fundef {
    Internal(InternalFunction),
    External(ExternalFunction),
}

impl Fundef {
    pub fn name(&self) -> &Ident {
        match self {
            Fundef::Internal(f) => &f.name,
            Fundef::External(f) => &f.name,
        }
    }

    pub fn result(&self) -> &Type {
        match self {
            Fundef::Internal(f) => &f.result,
            Fundef::External(f) => &f.result,
        }
    }

    pub fn param_types(&self) -> Vec<Type> {
        match self {
            Fundef::Internal(f) => f.params.iter().map(|(_, t)| t.clone()).collect(),
            Fundef::External(f) => f.params.clone(),
        }
    }

    /// `function(params, result)`, compared against the callee annotation at
    /// call sites.
    pub fn type_of(&self) -> Type {
        Type::function(self.param_types(), self.result().clone())
    }
}

/// Scalar initializer for a global variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Init {
    Int(i32),
    Float(FloatLit),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Global {
    pub name: Ident,
    pub ty: Type,
    pub init: Option<Init>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    pub globals: Vec<Global>,
    pub functions: Vec<Fundef>,
    pub main: Ident,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&Fundef> {
        self.functions.iter().find(|f| f.name().as_str() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

/// Line/column position into source text, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub pos: Option<Pos>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(pos: Option<Pos>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.pos {
            Some(p) => write!(f, "{}:{}: {}: {}", p.line, p.col, sev, self.message),
            None => write!(f, "{}: {}", sev, self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompKind {
    Struct,
    Union,
}

/// C-level view of a type, with struct and union types referenced by tag
/// instead of carried structurally. This is what concrete syntax denotes
/// before tags are resolved.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CType {
    Void,
    Int(IntSize, Signedness),
    Float(FloatSize),
    Array(Box<CType>, u32),
    Pointer(Box<CType>),
    Function(Vec<CType>, Box<CType>),
    Named(CompKind, Ident),
}

impl Type {
    /// The C-level view of this type. `enclosing` lists the composites that
    /// syntactically enclose it, innermost last; it is used to give
    /// `comp_pointer(id)` the kind of the composite it refers to.
    pub fn to_ctype(&self, enclosing: &[(CompKind, Ident)]) -> CType {
        match self {
            Type::Void => CType::Void,
            Type::Int(sz, sg) => CType::Int(*sz, *sg),
            Type::Float(fs) => CType::Float(*fs),
            Type::Array(t, n) => CType::Array(Box::new(t.to_ctype(enclosing)), *n),
            Type::Pointer(t) => CType::Pointer(Box::new(t.to_ctype(enclosing))),
            Type::Function(ps, r) => CType::Function(
                ps.iter().map(|p| p.to_ctype(enclosing)).collect(),
                Box::new(r.to_ctype(enclosing)),
            ),
            Type::Struct(id, _) => CType::Named(CompKind::Struct, id.clone()),
            Type::Union(id, _) => CType::Named(CompKind::Union, id.clone()),
            Type::CompPointer(id) => {
                let kind = enclosing
                    .iter()
                    .rev()
                    .find(|(_, x)| x == id)
                    .map_or(CompKind::Struct, |(k, _)| *k);
                CType::Pointer(Box::new(CType::Named(kind, id.clone())))
            }
        }
    }

    pub fn comp_kind(&self) -> Option<CompKind> {
        match self {
            Type::Struct(..) => Some(CompKind::Struct),
            Type::Union(..) => Some(CompKind::Union),
            _ => None,
        }
    }
}
