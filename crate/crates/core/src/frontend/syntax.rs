//! Surface syntax produced by the parser.

use crate::ast::{BinaryOp, CType, CaseLabel, CompKind, Ident, Pos, UnaryOp};

#[derive(Clone, Debug, PartialEq)]
pub struct Unit {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Composite {
        kind: CompKind,
        tag: Ident,
        fields: Vec<(Ident, CType, Pos)>,
        pos: Pos,
    },
    Global {
        name: Ident,
        ty: CType,
        init: Option<SExpr>,
        pos: Pos,
    },
    /// A definition (`body` present), a prototype, or an `extern`
    /// declaration.
    Function {
        name: Ident,
        result: CType,
        params: Vec<(Option<Ident>, CType)>,
        external: bool,
        body: Option<Body>,
        pos: Pos,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    pub locals: Vec<Local>,
    pub stmts: Vec<SStmt>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Local {
    pub name: Ident,
    pub ty: CType,
    pub init: Option<SExpr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SExpr {
    pub kind: SExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SExprKind {
    Var(Ident),
    /// An integer literal as a 32-bit pattern; `true` for unsigned.
    Int(i32, bool),
    Float(f64),
    Sizeof(CType),
    Unop(UnaryOp, Box<SExpr>),
    Binop(BinaryOp, Box<SExpr>, Box<SExpr>),
    Deref(Box<SExpr>),
    Field(Box<SExpr>, Ident),
    Addrof(Box<SExpr>),
    Cast(CType, Box<SExpr>),
    Cond(Box<SExpr>, Box<SExpr>, Box<SExpr>),
    Call(Box<SExpr>, Vec<SExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SStmt {
    pub kind: SStmtKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SStmtKind {
    Skip,
    Assign(SExpr, SExpr),
    /// An expression used as a statement; only calls are accepted.
    Expr(SExpr),
    Block(Vec<SStmt>),
    If(SExpr, Box<SStmt>, Option<Box<SStmt>>),
    While(SExpr, Box<SStmt>),
    DoWhile(Box<SStmt>, SExpr),
    For(Box<SStmt>, SExpr, Box<SStmt>, Box<SStmt>),
    Break,
    Continue,
    Return(Option<SExpr>),
    Switch(SExpr, Vec<(CaseLabel, Vec<SStmt>, Pos)>),
}
