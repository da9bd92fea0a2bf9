use super::lexer::{Tok, Token};
use super::syntax::*;
use crate::ast::{
    BinaryOp, CType, CaseLabel, CompKind, Diagnostic, FloatSize, Ident, IntSize, Pos, Signedness,
    UnaryOp,
};

type PResult<T> = Result<T, Diagnostic>;

/// Declared name, if any, and the type derivations around it.
type Declarator = (Option<(Ident, Pos)>, Vec<Deriv>);

const KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "_Bool",
];

const TYPE_WORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "signed", "unsigned", "float", "double", "struct",
    "union", "const", "volatile", "restrict", "enum", "_Bool",
];

/// One step of a declarator, outermost first.
#[derive(Clone, Debug)]
enum Deriv {
    Ptr,
    Array(u32),
    Func(Vec<(Option<Ident>, CType)>),
}

fn build(base: CType, derivs: &[Deriv]) -> CType {
    derivs.iter().rev().fold(base, |t, d| match d {
        Deriv::Ptr => CType::Pointer(Box::new(t)),
        Deriv::Array(n) => CType::Array(Box::new(t), *n),
        Deriv::Func(ps) => CType::Function(
            ps.iter().map(|(_, p)| p.clone()).collect(),
            Box::new(t),
        ),
    })
}

/// Parameter type adjustment: arrays and functions are passed as pointers.
fn adjust_param(t: CType) -> CType {
    match t {
        CType::Array(e, _) => CType::Pointer(e),
        f @ CType::Function(..) => CType::Pointer(Box::new(f)),
        t => t,
    }
}

fn binop_info(p: &str) -> Option<(u8, Option<BinaryOp>)> {
    use BinaryOp::*;
    Some(match p {
        "||" => (1, None),
        "&&" => (2, None),
        "|" => (3, Some(Or)),
        "^" => (4, Some(Xor)),
        "&" => (5, Some(And)),
        "==" => (6, Some(Eq)),
        "!=" => (6, Some(Ne)),
        "<" => (7, Some(Lt)),
        "<=" => (7, Some(Le)),
        ">" => (7, Some(Gt)),
        ">=" => (7, Some(Ge)),
        "<<" => (8, Some(Shl)),
        ">>" => (8, Some(Shr)),
        "+" => (9, Some(Add)),
        "-" => (9, Some(Sub)),
        "*" => (10, Some(Mul)),
        "/" => (10, Some(Div)),
        "%" => (10, Some(Mod)),
        _ => return None,
    })
}

fn mk(kind: SExprKind, pos: Pos) -> SExpr {
    SExpr { kind, pos }
}

fn bx(e: SExpr) -> Box<SExpr> {
    Box::new(e)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{}`", s),
        Tok::Int(v, ..) => format!("`{}`", v),
        Tok::Float(v, _) => format!("`{:?}`", v),
        Tok::Punct(p) => format!("`{}`", p),
        Tok::Eof => "end of input".into(),
    }
}

pub struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser { toks, i: 0 }
    }

    fn peek(&self) -> &Tok {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i.min(self.toks.len() - 1)].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i.min(self.toks.len() - 1)].clone();
        if self.i < self.toks.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_at(&self, k: usize, p: &str) -> bool {
        matches!(self.peek_at(k), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::error(Some(self.pos()), msg))
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            return Ok(());
        }
        match self.peek() {
            Tok::Punct("=") => self.err("assignments are only allowed as statements"),
            Tok::Punct(",") if p == ";" || p == ")" => {
                self.err("the comma operator is not supported")
            }
            Tok::Punct(q @ ("++" | "--")) => self.err(format!(
                "`{}` is not supported; write an explicit assignment",
                q
            )),
            Tok::Punct(q) if q.len() >= 2 && q.ends_with('=') && !matches!(*q, "==" | "!=" | "<=" | ">=") => {
                self.err(format!(
                    "compound assignment `{}` is not supported; write `x = x {} e`",
                    q,
                    &q[..q.len() - 1]
                ))
            }
            t => {
                let found = describe(t);
                self.err(format!("expected `{}`, found {}", p, found))
            }
        }
    }

    fn ident(&mut self) -> PResult<(Ident, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let pos = self.bump().pos;
                Ok((Ident::from(s), pos))
            }
            t => self.err(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn starts_type(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if TYPE_WORDS.contains(&s.as_str()))
    }

    fn starts_type_at(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Tok::Ident(s) if TYPE_WORDS.contains(&s.as_str()))
    }

    // ---- declarations -------------------------------------------------

    pub fn unit(&mut self) -> PResult<Unit> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            self.item(&mut items)?;
        }
        Ok(Unit { items })
    }

    fn item(&mut self, items: &mut Vec<Item>) -> PResult<()> {
        let pos = self.pos();
        if self.is_kw("typedef") {
            return self.err("typedef is not supported");
        }
        if (self.is_kw("struct") || self.is_kw("union"))
            && matches!(self.peek_at(1), Tok::Ident(_))
            && (self.is_at(2, "{") || self.is_at(2, ";"))
        {
            let kind = if self.is_kw("struct") {
                CompKind::Struct
            } else {
                CompKind::Union
            };
            self.bump();
            let (tag, _) = self.ident()?;
            if self.eat(";") {
                // forward declaration: tags are resolved lazily
                return Ok(());
            }
            self.expect("{")?;
            let mut fields = Vec::new();
            while !self.eat("}") {
                let base = self.specifiers()?;
                loop {
                    let fpos = self.pos();
                    let (name, derivs) = self.declarator(true)?;
                    let name = name.expect("named declarator").0;
                    if self.is(":") {
                        return self.err("bit-fields are not supported");
                    }
                    fields.push((name, build(base.clone(), &derivs), fpos));
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect(";")?;
            }
            if !self.is(";") {
                return self.err("a struct or union definition must be a separate declaration ending with `;`");
            }
            self.bump();
            items.push(Item::Composite {
                kind,
                tag,
                fields,
                pos,
            });
            return Ok(());
        }
        let external = if self.is_kw("extern") {
            self.bump();
            true
        } else {
            if self.is_kw("static") {
                self.bump();
            }
            false
        };
        let base = self.specifiers()?;
        let mut first = true;
        loop {
            let dpos = self.pos();
            let (name, derivs) = self.declarator(true)?;
            let (name, _) = name.expect("named declarator");
            if let Some(Deriv::Func(params)) = derivs.first() {
                let result = build(base.clone(), &derivs[1..]);
                if first && self.is("{") {
                    if external {
                        return self.err("an `extern` function cannot have a body");
                    }
                    let body = self.body()?;
                    items.push(Item::Function {
                        name,
                        result,
                        params: params.clone(),
                        external: false,
                        body: Some(body),
                        pos: dpos,
                    });
                    return Ok(());
                }
                items.push(Item::Function {
                    name,
                    result,
                    params: params.clone(),
                    external,
                    body: None,
                    pos: dpos,
                });
            } else {
                if external {
                    return Err(Diagnostic::error(
                        Some(dpos),
                        "`extern` is only supported on function declarations",
                    ));
                }
                let ty = build(base.clone(), &derivs);
                let init = if self.eat("=") {
                    if self.is("{") {
                        return self.err("aggregate initializers are not supported");
                    }
                    Some(self.expr()?)
                } else {
                    None
                };
                items.push(Item::Global {
                    name,
                    ty,
                    init,
                    pos: dpos,
                });
            }
            first = false;
            if !self.eat(",") {
                break;
            }
        }
        self.expect(";")
    }

    fn specifiers(&mut self) -> PResult<CType> {
        let pos = self.pos();
        let (mut signed, mut unsigned) = (0, 0);
        let (mut char_, mut short, mut int, mut long) = (0, 0, 0, 0);
        let (mut float, mut double, mut void) = (0, 0, 0);
        let mut named = None;
        while let Tok::Ident(w) = self.peek().clone() {
            match w.as_str() {
                "const" | "volatile" | "restrict" => {}
                "signed" => signed += 1,
                "unsigned" => unsigned += 1,
                "char" => char_ += 1,
                "short" => short += 1,
                "int" => int += 1,
                "long" => long += 1,
                "float" => float += 1,
                "double" => double += 1,
                "void" => void += 1,
                "struct" | "union" => {
                    let kind = if w == "struct" {
                        CompKind::Struct
                    } else {
                        CompKind::Union
                    };
                    self.bump();
                    let (tag, _) = self.ident()?;
                    if self.is("{") {
                        return self.err(
                            "struct and union definitions must be separate top-level declarations",
                        );
                    }
                    if named.is_some() {
                        return Err(Diagnostic::error(Some(pos), "invalid type specifiers"));
                    }
                    named = Some(CType::Named(kind, tag));
                    continue;
                }
                "enum" => return self.err("enums are not supported"),
                "_Bool" => return self.err("_Bool is not supported"),
                "static" | "extern" | "typedef" | "register" | "auto" | "inline" => {
                    return self.err(format!("storage class `{}` is not supported here", w))
                }
                _ => break,
            }
            self.bump();
        }
        let bad = || Err(Diagnostic::error(Some(pos), "invalid combination of type specifiers"));
        let arith = signed + unsigned + char_ + short + int + long + float + double;
        if let Some(t) = named {
            return if arith + void > 0 { bad() } else { Ok(t) };
        }
        if void > 0 {
            return if arith > 0 || void > 1 { bad() } else { Ok(CType::Void) };
        }
        if arith == 0 {
            return Err(Diagnostic::error(Some(pos), "expected a type"));
        }
        if signed > 1 || unsigned > 1 || signed + unsigned > 1 || char_ > 1 || short > 1 || int > 1
        {
            return bad();
        }
        if long > 1 {
            return Err(Diagnostic::error(Some(pos), "64-bit integers are not supported"));
        }
        if float + double > 0 {
            if float + double > 1 || signed + unsigned + char_ + short + int > 0 {
                return bad();
            }
            if long > 0 {
                return Err(Diagnostic::error(Some(pos), "`long double` is not supported"));
            }
            return Ok(CType::Float(if float > 0 { FloatSize::F32 } else { FloatSize::F64 }));
        }
        let size = match (char_, short, long) {
            (1, 0, 0) if int == 0 => IntSize::I8,
            (0, 1, 0) => IntSize::I16,
            (0, 0, _) => IntSize::I32,
            _ => return bad(),
        };
        let sg = if unsigned > 0 {
            Signedness::Unsigned
        } else {
            Signedness::Signed
        };
        Ok(CType::Int(size, sg))
    }

    /// Parses a declarator. With `named`, an identifier is required;
    /// otherwise the declarator is abstract (no identifier) or optionally
    /// named, as in parameter lists.
    fn declarator(&mut self, named: bool) -> PResult<Declarator> {
        self.declarator_inner(if named { Some(true) } else { None })
    }

    /// `need_name`: `Some(true)` requires a name, `Some(false)` forbids one,
    /// `None` allows either.
    fn declarator_inner(
        &mut self,
        need_name: Option<bool>,
    ) -> PResult<Declarator> {
        let mut ptrs = 0;
        while self.eat("*") {
            while self.is_kw("const") || self.is_kw("volatile") || self.is_kw("restrict") {
                self.bump();
            }
            ptrs += 1;
        }
        let nested = self.is("(")
            && match need_name {
                Some(true) => true,
                _ => self.is_at(1, "*") || self.is_at(1, "(") || self.is_at(1, "["),
            };
        let (name, mut derivs) = if nested {
            self.bump();
            let d = self.declarator_inner(need_name)?;
            self.expect(")")?;
            d
        } else if matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
            && need_name != Some(false)
        {
            (Some(self.ident()?), Vec::new())
        } else if need_name == Some(true) {
            let found = describe(self.peek());
            return self.err(format!("expected identifier, found {}", found));
        } else {
            (None, Vec::new())
        };
        loop {
            if self.eat("[") {
                let n = match self.peek().clone() {
                    Tok::Int(0, ..) => return self.err("array size must be positive"),
                    Tok::Int(v, ..) => {
                        self.bump();
                        v as u32
                    }
                    Tok::Punct("]") => return self.err("array size is required"),
                    _ => return self.err("array size must be an integer constant"),
                };
                self.expect("]")?;
                derivs.push(Deriv::Array(n));
            } else if self.is("(") {
                self.bump();
                derivs.push(Deriv::Func(self.params()?));
            } else {
                break;
            }
        }
        derivs.extend(std::iter::repeat_n(Deriv::Ptr, ptrs));
        Ok((name, derivs))
    }

    fn params(&mut self) -> PResult<Vec<(Option<Ident>, CType)>> {
        let mut ps = Vec::new();
        if self.eat(")") {
            return Ok(ps);
        }
        if self.is_kw("void") && self.is_at(1, ")") {
            self.bump();
            self.bump();
            return Ok(ps);
        }
        loop {
            if self.is("...") {
                return self.err("variadic functions are not supported");
            }
            let base = self.specifiers()?;
            let (name, derivs) = self.declarator_inner(None)?;
            ps.push((name.map(|n| n.0), adjust_param(build(base, &derivs))));
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(ps)
    }

    fn type_name(&mut self) -> PResult<CType> {
        let base = self.specifiers()?;
        let (_, derivs) = self.declarator_inner(Some(false))?;
        Ok(build(base, &derivs))
    }

    // ---- statements ---------------------------------------------------

    fn body(&mut self) -> PResult<Body> {
        self.expect("{")?;
        let mut locals = Vec::new();
        while self.starts_type() {
            let base = self.specifiers()?;
            loop {
                let pos = self.pos();
                let (name, derivs) = self.declarator(true)?;
                let name = name.expect("named declarator").0;
                let init = if self.eat("=") {
                    if self.is("{") {
                        return self.err("aggregate initializers are not supported");
                    }
                    Some(self.expr()?)
                } else {
                    None
                };
                locals.push(Local {
                    name,
                    ty: build(base.clone(), &derivs),
                    init,
                    pos,
                });
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(";")?;
        }
        let mut stmts = Vec::new();
        while !self.eat("}") {
            if self.starts_type() {
                return self.err(
                    "declarations must come before statements, at the start of the function body",
                );
            }
            stmts.push(self.stmt()?);
        }
        Ok(Body { locals, stmts })
    }

    fn block_items(&mut self) -> PResult<Vec<SStmt>> {
        let mut items = Vec::new();
        while !self.eat("}") {
            items.push(self.stmt()?);
        }
        Ok(items)
    }

    fn stmt(&mut self) -> PResult<SStmt> {
        let pos = self.pos();
        let s = |kind| Ok(SStmt { kind, pos });
        if self.starts_type() {
            return self.err("declarations are only allowed at the start of a function body");
        }
        if matches!(self.peek(), Tok::Ident(_)) && self.is_at(1, ":") && !self.is_kw("default") {
            return self.err("labels are not supported");
        }
        let Tok::Ident(w) = self.peek().clone() else {
            if self.eat("{") {
                return s(SStmtKind::Block(self.block_items()?));
            }
            if self.eat(";") {
                return s(SStmtKind::Skip);
            }
            let st = self.simple()?;
            self.expect(";")?;
            return Ok(st);
        };
        match w.as_str() {
            "if" => {
                self.bump();
                self.expect("(")?;
                let c = self.expr()?;
                self.expect(")")?;
                let then = self.stmt()?;
                let els = if self.is_kw("else") {
                    self.bump();
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                s(SStmtKind::If(c, Box::new(then), els))
            }
            "while" => {
                self.bump();
                self.expect("(")?;
                let c = self.expr()?;
                self.expect(")")?;
                s(SStmtKind::While(c, Box::new(self.stmt()?)))
            }
            "do" => {
                self.bump();
                let body = self.stmt()?;
                if !self.is_kw("while") {
                    return self.err("expected `while` after `do` body");
                }
                self.bump();
                self.expect("(")?;
                let c = self.expr()?;
                self.expect(")")?;
                self.expect(";")?;
                s(SStmtKind::DoWhile(Box::new(body), c))
            }
            "for" => {
                self.bump();
                self.expect("(")?;
                if self.starts_type() {
                    return self.err("declarations in `for` initializers are not supported");
                }
                let init = self.for_clause(";")?;
                self.expect(";")?;
                let c = if self.is(";") {
                    mk(SExprKind::Int(1, false), self.pos())
                } else {
                    self.expr()?
                };
                self.expect(";")?;
                let step = self.for_clause(")")?;
                self.expect(")")?;
                let body = self.stmt()?;
                s(SStmtKind::For(Box::new(init), c, Box::new(step), Box::new(body)))
            }
            "switch" => {
                self.bump();
                self.expect("(")?;
                let e = self.expr()?;
                self.expect(")")?;
                self.expect("{")?;
                let mut cases: Vec<(CaseLabel, Vec<SStmt>, Pos)> = Vec::new();
                while !self.eat("}") {
                    let lpos = self.pos();
                    if self.is_kw("case") {
                        self.bump();
                        let n = self.case_constant()?;
                        self.expect(":")?;
                        cases.push((CaseLabel::Case(n), Vec::new(), lpos));
                    } else if self.is_kw("default") {
                        self.bump();
                        self.expect(":")?;
                        cases.push((CaseLabel::Default, Vec::new(), lpos));
                    } else {
                        let st = self.stmt()?;
                        match cases.last_mut() {
                            Some(c) => c.1.push(st),
                            None => {
                                return Err(Diagnostic::error(
                                    Some(lpos),
                                    "statement before the first case label",
                                ))
                            }
                        }
                    }
                }
                s(SStmtKind::Switch(e, cases))
            }
            "break" => {
                self.bump();
                self.expect(";")?;
                s(SStmtKind::Break)
            }
            "continue" => {
                self.bump();
                self.expect(";")?;
                s(SStmtKind::Continue)
            }
            "return" => {
                self.bump();
                let e = if self.is(";") { None } else { Some(self.expr()?) };
                self.expect(";")?;
                s(SStmtKind::Return(e))
            }
            "goto" => self.err("goto is not supported"),
            "case" | "default" => self.err(format!("`{}` label outside of a switch", w)),
            "else" => self.err("`else` without a matching `if`"),
            _ => {
                let st = self.simple()?;
                self.expect(";")?;
                Ok(st)
            }
        }
    }

    fn for_clause(&mut self, end: &str) -> PResult<SStmt> {
        let pos = self.pos();
        if self.is(end) {
            return Ok(SStmt {
                kind: SStmtKind::Skip,
                pos,
            });
        }
        if self.eat("{") {
            return Ok(SStmt {
                kind: SStmtKind::Block(self.block_items()?),
                pos,
            });
        }
        self.simple()
    }

    /// An assignment or an expression statement, without the terminator.
    fn simple(&mut self) -> PResult<SStmt> {
        let pos = self.pos();
        if self.is("++") || self.is("--") {
            return self.err("increment and decrement operators are not supported");
        }
        let lhs = self.expr()?;
        let kind = if self.eat("=") {
            SStmtKind::Assign(lhs, self.expr()?)
        } else {
            SStmtKind::Expr(lhs)
        };
        Ok(SStmt { kind, pos })
    }

    fn case_constant(&mut self) -> PResult<i32> {
        let neg = self.eat("-");
        match self.peek().clone() {
            Tok::Int(v, ..) => {
                self.bump();
                let n = v as u32;
                Ok(if neg { n.wrapping_neg() } else { n } as i32)
            }
            t => self.err(format!(
                "case label must be an integer constant, found {}",
                describe(&t)
            )),
        }
    }

    // ---- expressions --------------------------------------------------

    pub fn expr(&mut self) -> PResult<SExpr> {
        let c = self.binary(1)?;
        if self.is("?") {
            let pos = self.bump().pos;
            let a = self.expr()?;
            self.expect(":")?;
            let b = self.expr()?;
            return Ok(mk(SExprKind::Cond(bx(c), bx(a), bx(b)), pos));
        }
        Ok(c)
    }

    fn binary(&mut self, min: u8) -> PResult<SExpr> {
        let mut left = self.unary()?;
        loop {
            let Tok::Punct(p) = *self.peek() else {
                return Ok(left);
            };
            let Some((prec, op)) = binop_info(p) else {
                return Ok(left);
            };
            if prec < min {
                return Ok(left);
            }
            let pos = self.bump().pos;
            let right = self.binary(prec + 1)?;
            let one = || mk(SExprKind::Int(1, false), pos);
            let zero = || mk(SExprKind::Int(0, false), pos);
            left = match op {
                Some(op) => mk(SExprKind::Binop(op, bx(left), bx(right)), pos),
                // x && y  ==>  x ? (y ? 1 : 0) : 0
                None if p == "&&" => {
                    let inner = mk(SExprKind::Cond(bx(right), bx(one()), bx(zero())), pos);
                    mk(SExprKind::Cond(bx(left), bx(inner), bx(zero())), pos)
                }
                // x || y  ==>  x ? 1 : (y ? 1 : 0)
                None => {
                    let inner = mk(SExprKind::Cond(bx(right), bx(one()), bx(zero())), pos);
                    mk(SExprKind::Cond(bx(left), bx(one()), bx(inner)), pos)
                }
            };
        }
    }

    fn literal_follows(&self) -> bool {
        matches!(self.peek_at(1), Tok::Int(..) | Tok::Float(..))
            && !matches!(
                self.peek_at(2),
                Tok::Punct("[" | "(" | "." | "->" | "++" | "--")
            )
    }

    fn unary(&mut self) -> PResult<SExpr> {
        let pos = self.pos();
        let un = |op, e| Ok(mk(SExprKind::Unop(op, bx(e)), pos));
        match self.peek().clone() {
            Tok::Punct("-") if self.literal_follows() => {
                self.bump();
                self.literal(true)
            }
            Tok::Punct("-") => {
                self.bump();
                un(UnaryOp::Neg, self.unary()?)
            }
            Tok::Punct("+") => {
                self.bump();
                self.unary()
            }
            Tok::Punct("~") => {
                self.bump();
                un(UnaryOp::BitNot, self.unary()?)
            }
            Tok::Punct("!") => {
                self.bump();
                un(UnaryOp::LogNot, self.unary()?)
            }
            Tok::Punct("*") => {
                self.bump();
                Ok(mk(SExprKind::Deref(bx(self.unary()?)), pos))
            }
            Tok::Punct("&") => {
                self.bump();
                Ok(mk(SExprKind::Addrof(bx(self.unary()?)), pos))
            }
            Tok::Punct("++" | "--") => self.err("increment and decrement operators are not supported"),
            Tok::Ident(w) if w == "sizeof" => {
                self.bump();
                if !(self.is("(") && self.starts_type_at(1)) {
                    return self.err("`sizeof` is only supported on parenthesized type names");
                }
                self.bump();
                let t = self.type_name()?;
                self.expect(")")?;
                Ok(mk(SExprKind::Sizeof(t), pos))
            }
            Tok::Punct("(") if self.starts_type_at(1) => {
                self.bump();
                let t = self.type_name()?;
                self.expect(")")?;
                let e = self.unary()?;
                Ok(mk(SExprKind::Cast(t, bx(e)), pos))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<SExpr> {
        let mut e = self.primary()?;
        loop {
            let pos = self.pos();
            if self.eat("[") {
                let i = self.expr()?;
                self.expect("]")?;
                let sum = mk(SExprKind::Binop(BinaryOp::Add, bx(e), bx(i)), pos);
                e = mk(SExprKind::Deref(bx(sum)), pos);
            } else if self.eat("(") {
                let mut args = Vec::new();
                if !self.eat(")") {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect(")")?;
                }
                e = mk(SExprKind::Call(bx(e), args), pos);
            } else if self.eat(".") {
                let (f, _) = self.ident()?;
                e = mk(SExprKind::Field(bx(e), f), pos);
            } else if self.eat("->") {
                let (f, _) = self.ident()?;
                let d = mk(SExprKind::Deref(bx(e)), pos);
                e = mk(SExprKind::Field(bx(d), f), pos);
            } else if self.is("++") || self.is("--") {
                return self.err("increment and decrement operators are not supported");
            } else {
                return Ok(e);
            }
        }
    }

    /// An integer or floating literal at the current token, negated if
    /// `neg` (the `-` has already been consumed).
    fn literal(&mut self, neg: bool) -> PResult<SExpr> {
        let Token { tok, pos } = self.bump();
        match tok {
            Tok::Int(v, suffix_u, decimal) => {
                let unsigned = suffix_u || (!decimal && v > i32::MAX as u64);
                let limit = if neg { 1u64 << 31 } else { i32::MAX as u64 };
                if !unsigned && v > limit {
                    return Err(Diagnostic::error(
                        Some(pos),
                        format!("integer constant `{}` is too large for int", v),
                    ));
                }
                let n = v as u32;
                let n = if neg { n.wrapping_neg() } else { n };
                Ok(mk(SExprKind::Int(n as i32, unsigned), pos))
            }
            Tok::Float(v, f32_suffix) => {
                let lit = mk(SExprKind::Float(if neg { -v } else { v }), pos);
                Ok(if f32_suffix {
                    mk(SExprKind::Cast(CType::Float(FloatSize::F32), bx(lit)), pos)
                } else {
                    lit
                })
            }
            _ => unreachable!("literal called on a non-literal token"),
        }
    }

    fn primary(&mut self) -> PResult<SExpr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(..) | Tok::Float(..) => self.literal(false),
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(mk(SExprKind::Var(s.into()), pos))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            t => self.err(format!("expected expression, found {}", describe(&t))),
        }
    }
}
