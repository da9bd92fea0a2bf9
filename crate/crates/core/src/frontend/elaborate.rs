//! Name resolution, struct tag resolution, typing and cast insertion.

use std::collections::{HashMap, HashSet};

use std::cell::RefCell;

use super::syntax::*;
use crate::ast::*;

type EResult<T> = Result<T, Diagnostic>;

fn err<T>(pos: Pos, msg: impl Into<String>) -> EResult<T> {
    Err(Diagnostic::error(Some(pos), msg))
}

fn show(t: &Type) -> String {
    super::pretty::type_to_string(t)
}

/// Turns a parsed unit into a Clight program. Reports every top-level item
/// that fails, each with its first error.
pub fn elaborate(unit: &Unit) -> Result<Program, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut cx = Context::default();

    for item in &unit.items {
        if let Item::Composite {
            kind,
            tag,
            fields,
            pos,
        } = item
        {
            if cx.tags.contains_key(tag) {
                diags.push(Diagnostic::error(
                    Some(*pos),
                    format!("redefinition of tag `{}`", tag),
                ));
                continue;
            }
            let mut seen = HashSet::new();
            for (f, _, fpos) in fields {
                if !seen.insert(f.clone()) {
                    diags.push(Diagnostic::error(
                        Some(*fpos),
                        format!("duplicate field `{}` in {} {}", f, kind_name(*kind), tag),
                    ));
                }
            }
            cx.tags.insert(tag.clone(), (*kind, fields.clone(), *pos));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    // every definition must resolve, used or not
    for item in &unit.items {
        if let Item::Composite { kind, tag, pos, .. } = item {
            if let Err(d) = cx.resolve(&CType::Named(*kind, tag.clone()), *pos) {
                diags.push(d);
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    // signatures and global variables first, so that every function body
    // sees every global name
    let mut globals = Vec::new();
    let mut order: Vec<Ident> = Vec::new();
    let mut sigs: HashMap<Ident, (Type, bool, bool, Pos)> = HashMap::new();
    for item in &unit.items {
        match item {
            Item::Composite { .. } => {}
            Item::Global {
                name,
                ty,
                init,
                pos,
            } => {
                let r = cx.object_type(ty, *pos).and_then(|t| {
                    let init = match init {
                        None => None,
                        Some(e) => Some(global_init(&t, e)?),
                    };
                    Ok((t, init))
                });
                match r {
                    Err(d) => diags.push(d),
                    Ok((t, init)) => {
                        if cx.globals.contains_key(name) {
                            diags.push(Diagnostic::error(
                                Some(*pos),
                                format!("redefinition of `{}`", name),
                            ));
                            continue;
                        }
                        cx.globals.insert(name.clone(), t.clone());
                        globals.push(Global {
                            name: name.clone(),
                            ty: t,
                            init,
                        });
                    }
                }
            }
            Item::Function {
                name,
                result,
                params,
                external,
                body,
                pos,
            } => {
                let ft = CType::Function(
                    params.iter().map(|(_, t)| t.clone()).collect(),
                    Box::new(result.clone()),
                );
                let t = match cx.resolve(&ft, *pos) {
                    Ok(t) => t,
                    Err(d) => {
                        diags.push(d);
                        continue;
                    }
                };
                if let Type::Function(_, r) = &t {
                    if matches!(**r, Type::Array(..) | Type::Function(..)) {
                        diags.push(Diagnostic::error(
                            Some(*pos),
                            format!("function `{}` cannot return an array or a function", name),
                        ));
                        continue;
                    }
                }
                match sigs.get_mut(name) {
                    None => {
                        if cx.globals.contains_key(name) {
                            diags.push(Diagnostic::error(
                                Some(*pos),
                                format!("`{}` redeclared as a function", name),
                            ));
                            continue;
                        }
                        order.push(name.clone());
                        sigs.insert(name.clone(), (t, *external, body.is_some(), *pos));
                    }
                    Some(sig) => {
                        if sig.0 != t {
                            diags.push(Diagnostic::error(
                                Some(*pos),
                                format!("conflicting types for `{}`", name),
                            ));
                        } else if sig.1 != *external {
                            diags.push(Diagnostic::error(
                                Some(*pos),
                                format!("`{}` declared both extern and non-extern", name),
                            ));
                        } else if sig.2 && body.is_some() {
                            diags.push(Diagnostic::error(
                                Some(*pos),
                                format!("redefinition of function `{}`", name),
                            ));
                        } else if body.is_some() {
                            sig.2 = true;
                            // the definition fixes the function's position
                            order.retain(|n| n != name);
                            order.push(name.clone());
                        }
                    }
                }
            }
        }
    }
    for name in &order {
        let (t, external, defined, pos) = &sigs[name];
        if !external && !defined {
            diags.push(Diagnostic::error(
                Some(*pos),
                format!(
                    "function `{}` is declared but never defined; declare it `extern` to make it external",
                    name
                ),
            ));
        }
        cx.globals.insert(name.clone(), t.clone());
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let mut functions = Vec::new();
    for name in &order {
        let (t, external, _, _) = &sigs[name];
        let Type::Function(ptys, result) = t else {
            unreachable!()
        };
        if *external {
            functions.push(Fundef::External(ExternalFunction {
                name: name.clone(),
                result: (**result).clone(),
                params: ptys.clone(),
            }));
            continue;
        }
        let def = unit.items.iter().find_map(|it| match it {
            Item::Function {
                name: n,
                params,
                body: Some(body),
                pos,
                ..
            } if n == name => Some((params, body, *pos)),
            _ => None,
        });
        let (params, body, pos) = def.expect("defined function has a body");
        match cx.function(name, params, ptys, result, body, pos) {
            Ok(f) => functions.push(Fundef::Internal(f)),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Program {
        globals,
        functions,
        main: Ident::from("main"),
    })
}

fn kind_name(k: CompKind) -> &'static str {
    match k {
        CompKind::Struct => "struct",
        CompKind::Union => "union",
    }
}

fn global_init(t: &Type, e: &SExpr) -> EResult<Init> {
    let bad = || {
        err(
            e.pos,
            "global initializers must be numeric constants matching the variable's type",
        )
    };
    match (&e.kind, t) {
        (SExprKind::Int(n, _), Type::Int(..)) => Ok(Init::Int(*n)),
        (SExprKind::Int(0, _), Type::Pointer(_)) => Ok(Init::Int(0)),
        (SExprKind::Int(n, unsigned), Type::Float(_)) => Ok(Init::Float(FloatLit(if *unsigned {
            f64::from(*n as u32)
        } else {
            f64::from(*n)
        }))),
        (SExprKind::Float(f), Type::Float(_)) => Ok(Init::Float(FloatLit(*f))),
        (SExprKind::Cast(CType::Float(FloatSize::F32), inner), Type::Float(_)) => match inner.kind {
            SExprKind::Float(f) => Ok(Init::Float(FloatLit(f64::from(f as f32)))),
            _ => bad(),
        },
        _ => bad(),
    }
}

/// A tag definition as written: kind, fields with positions, position.
type TagDef = (CompKind, Vec<(Ident, CType, Pos)>, Pos);

#[derive(Default)]
struct Context {
    tags: HashMap<Ident, TagDef>,
    globals: HashMap<Ident, Type>,
    /// Resolved types of tags, as seen outside any composite.
    resolved: RefCell<HashMap<Ident, Type>>,
}

/// Per-function state.
struct Scope<'a> {
    cx: &'a Context,
    locals: HashMap<Ident, Type>,
    result: Type,
}

impl Context {
    fn resolve(&self, t: &CType, pos: Pos) -> EResult<Type> {
        let mut stack = Vec::new();
        self.resolve_in(t, pos, &mut stack, 0)
    }

    /// Resolves `t`. `stack` lists the composites being expanded with the
    /// pointer depth at which each was entered; `depth` is the current
    /// pointer depth.
    fn resolve_in(
        &self,
        t: &CType,
        pos: Pos,
        stack: &mut Vec<(Ident, usize)>,
        depth: usize,
    ) -> EResult<Type> {
        Ok(match t {
            CType::Void => Type::Void,
            CType::Int(sz, sg) => Type::Int(*sz, *sg),
            CType::Float(fs) => Type::Float(*fs),
            CType::Array(e, n) => {
                if *n == 0 {
                    return err(pos, "array size must be positive");
                }
                let et = self.resolve_in(e, pos, stack, depth)?;
                if matches!(et, Type::Void | Type::Function(..)) {
                    return err(pos, "array elements must be object types");
                }
                Type::array(et, *n)
            }
            CType::Pointer(inner) => {
                if let CType::Named(kind, id) = &**inner {
                    if stack.iter().any(|(x, _)| x == id) {
                        self.check_kind(*kind, id, pos)?;
                        return Ok(Type::CompPointer(id.clone()));
                    }
                }
                Type::pointer(self.resolve_in(inner, pos, stack, depth + 1)?)
            }
            CType::Function(ps, r) => Type::function(
                ps.iter()
                    .map(|p| self.resolve_in(p, pos, stack, depth + 1))
                    .collect::<EResult<Vec<_>>>()?,
                self.resolve_in(r, pos, stack, depth + 1)?,
            ),
            CType::Named(kind, id) => {
                self.check_kind(*kind, id, pos)?;
                if let Some((_, entered)) = stack.iter().rev().find(|(x, _)| x == id) {
                    if *entered == depth {
                        return err(
                            pos,
                            format!(
                                "{} {} contains itself; use a pointer for recursive types",
                                kind_name(*kind),
                                id
                            ),
                        );
                    }
                }
                if stack.is_empty() {
                    if let Some(t) = self.resolved.borrow().get(id) {
                        return Ok(t.clone());
                    }
                }
                let (_, fields, _) = self.tags[id].clone();
                stack.push((id.clone(), depth));
                let mut fl = Vec::with_capacity(fields.len());
                for (f, ft, fpos) in &fields {
                    let t = self.resolve_in(ft, *fpos, stack, depth)?;
                    if matches!(t, Type::Void | Type::Function(..)) {
                        stack.pop();
                        return err(*fpos, format!("field `{}` must have an object type", f));
                    }
                    fl.push((f.clone(), t));
                }
                stack.pop();
                let t = match kind {
                    CompKind::Struct => Type::Struct(id.clone(), fl),
                    CompKind::Union => Type::Union(id.clone(), fl),
                };
                if stack.is_empty() {
                    self.resolved.borrow_mut().insert(id.clone(), t.clone());
                }
                t
            }
        })
    }

    fn check_kind(&self, kind: CompKind, id: &Ident, pos: Pos) -> EResult<()> {
        match self.tags.get(id) {
            None => err(pos, format!("{} {} is not defined", kind_name(kind), id)),
            Some((k, fields, _)) if *k == kind => {
                if fields.is_empty() {
                    err(pos, format!("{} {} has no fields", kind_name(kind), id))
                } else {
                    Ok(())
                }
            }
            Some((k, _, _)) => err(
                pos,
                format!("`{}` is a {}, not a {}", id, kind_name(*k), kind_name(kind)),
            ),
        }
    }

    /// Resolves the type of a variable: a complete object type.
    fn object_type(&self, t: &CType, pos: Pos) -> EResult<Type> {
        let t = self.resolve(t, pos)?;
        match t {
            Type::Void => err(pos, "variables cannot have type void"),
            Type::Function(..) => err(pos, "variables cannot have function type"),
            t => Ok(t),
        }
    }

    fn function(
        &self,
        name: &Ident,
        params: &[(Option<Ident>, CType)],
        ptys: &[Type],
        result: &Type,
        body: &Body,
        pos: Pos,
    ) -> EResult<InternalFunction> {
        let mut ps = Vec::new();
        let mut locals = Vec::new();
        let mut env = HashMap::new();
        for ((pname, _), t) in params.iter().zip(ptys) {
            let Some(pname) = pname else {
                return err(pos, format!("parameter name omitted in definition of `{}`", name));
            };
            if matches!(t, Type::Void) {
                return err(pos, format!("parameter `{}` has type void", pname));
            }
            if env.insert(pname.clone(), t.clone()).is_some() {
                return err(pos, format!("duplicate parameter `{}`", pname));
            }
            ps.push((pname.clone(), t.clone()));
        }
        for l in &body.locals {
            let t = self.object_type(&l.ty, l.pos)?;
            if env.insert(l.name.clone(), t.clone()).is_some() {
                return err(l.pos, format!("redeclaration of `{}`", l.name));
            }
            locals.push((l.name.clone(), t));
        }
        let scope = Scope {
            cx: self,
            locals: env,
            result: result.clone(),
        };
        let mut stmts = Vec::new();
        for l in &body.locals {
            if let Some(init) = &l.init {
                let lhs = SExpr {
                    kind: SExprKind::Var(l.name.clone()),
                    pos: l.pos,
                };
                stmts.push(scope.assign(&lhs, init, l.pos)?);
            }
        }
        for s in &body.stmts {
            stmts.push(scope.stmt(s)?);
        }
        Ok(InternalFunction {
            name: name.clone(),
            result: result.clone(),
            params: ps,
            locals,
            body: Stmt::block(stmts),
        })
    }
}

fn is_scalar(t: &Type) -> bool {
    t.is_arith() || t.is_pointer_like()
}

fn promote(e: Expr) -> Expr {
    match e.ty {
        Type::Int(IntSize::I8 | IntSize::I16, _) => Expr::cast(Type::INT, e),
        _ => e,
    }
}

fn cast_to(t: &Type, e: Expr) -> Expr {
    if e.ty == *t {
        e
    } else {
        Expr::cast(t.clone(), e)
    }
}

/// Common type of two promoted arithmetic types.
fn common_type(a: &Type, b: &Type) -> Type {
    let has = |t: &Type| a == t || b == t;
    if has(&Type::DOUBLE) {
        Type::DOUBLE
    } else if has(&Type::FLOAT) {
        Type::FLOAT
    } else if has(&Type::UINT) {
        Type::UINT
    } else {
        Type::INT
    }
}

fn op_name(op: BinaryOp) -> &'static str {
    use BinaryOp::*;
    match op {
        Add => "+",
        Sub => "-",
        Mul => "*",
        Div => "/",
        Mod => "%",
        Shl => "<<",
        Shr => ">>",
        And => "&",
        Or => "|",
        Xor => "^",
        Lt => "<",
        Le => "<=",
        Gt => ">",
        Ge => ">=",
        Eq => "==",
        Ne => "!=",
    }
}

impl Scope<'_> {
    fn lookup(&self, id: &Ident) -> Option<&Type> {
        self.locals.get(id).or_else(|| self.cx.globals.get(id))
    }

    fn resolve(&self, t: &CType, pos: Pos) -> EResult<Type> {
        self.cx.resolve(t, pos)
    }

    fn expr(&self, e: &SExpr) -> EResult<Expr> {
        let pos = e.pos;
        Ok(match &e.kind {
            SExprKind::Var(id) => match self.lookup(id) {
                Some(t) => Expr::var(id.clone(), t.clone()),
                None => return err(pos, format!("use of undeclared identifier `{}`", id)),
            },
            SExprKind::Int(n, false) => Expr::int(*n),
            SExprKind::Int(n, true) => Expr::new(ExprKind::IntConst(*n), Type::UINT),
            SExprKind::Float(f) => Expr::float(*f),
            SExprKind::Sizeof(ct) => {
                let t = self.resolve(ct, pos)?;
                Expr::new(ExprKind::SizeofType(t), Type::UINT)
            }
            SExprKind::Unop(op, a) => {
                let a = self.expr(a)?;
                match op {
                    UnaryOp::Neg if a.ty.is_arith() => {
                        let a = promote(a);
                        let t = a.ty.clone();
                        Expr::unop(*op, a, t)
                    }
                    UnaryOp::BitNot if a.ty.is_int() => {
                        let a = promote(a);
                        let t = a.ty.clone();
                        Expr::unop(*op, a, t)
                    }
                    UnaryOp::LogNot if is_scalar(&a.ty) => Expr::unop(*op, a, Type::INT),
                    _ => {
                        let sym = match op {
                            UnaryOp::Neg => "-",
                            UnaryOp::BitNot => "~",
                            UnaryOp::LogNot => "!",
                        };
                        return err(
                            pos,
                            format!("invalid operand to unary `{}` ({})", sym, show(&a.ty)),
                        );
                    }
                }
            }
            SExprKind::Binop(op, a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.binop(*op, a, b, pos)?
            }
            SExprKind::Deref(a) => {
                let a = self.expr(a)?;
                match a.ty.pointee() {
                    Some(Type::Void) => return err(pos, "cannot dereference a `void *` pointer"),
                    Some(t) => {
                        let t = t.clone();
                        Expr::deref(a, t)
                    }
                    None => {
                        return err(
                            pos,
                            format!("cannot dereference a value of type {}", show(&a.ty)),
                        )
                    }
                }
            }
            SExprKind::Field(a, f) => {
                let a = self.expr(a)?;
                let Some((_, fl)) = a.ty.composite() else {
                    return err(
                        pos,
                        format!("member `{}` requested in a non-struct, non-union type {}", f, show(&a.ty)),
                    );
                };
                let Some(ft) = crate::layout::field_type(f.as_str(), fl) else {
                    return err(pos, format!("{} has no member named `{}`", show(&a.ty), f));
                };
                let t = unroll_field_type(&a.ty, ft);
                Expr::field(a, f.clone(), t)
            }
            SExprKind::Addrof(a) => {
                let a = self.expr(a)?;
                if !a.is_lvalue() {
                    return err(pos, "cannot take the address of an r-value");
                }
                Expr::addrof(a)
            }
            SExprKind::Cast(ct, a) => {
                let t = self.resolve(ct, pos)?;
                let a = self.expr(a)?;
                if !(t.is_arith() || matches!(t, Type::Pointer(_))) {
                    return err(pos, format!("cannot cast to non-scalar type {}", show(&t)));
                }
                self.check_convertible(&a.ty, &t, pos)?;
                Expr::cast(t, a)
            }
            SExprKind::Cond(c, a, b) => {
                let c = self.expr(c)?;
                if !is_scalar(&c.ty) {
                    return err(pos, format!("condition has non-scalar type {}", show(&c.ty)));
                }
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                if a.ty.is_arith() && b.ty.is_arith() {
                    let (a, b) = (promote(a), promote(b));
                    let t = common_type(&a.ty, &b.ty);
                    let (a, b) = (cast_to(&t, a), cast_to(&t, b));
                    Expr::cond(c, a, b, t)
                } else if a.ty == b.ty {
                    let t = a.ty.clone();
                    Expr::cond(c, a, b, t)
                } else {
                    return err(
                        pos,
                        format!(
                            "branches of conditional have incompatible types {} and {}",
                            show(&a.ty),
                            show(&b.ty)
                        ),
                    );
                }
            }
            SExprKind::Call(..) => {
                return err(
                    pos,
                    "function calls are only allowed as statements `f(...);` or `x = f(...);`",
                )
            }
        })
    }

    fn binop(&self, op: BinaryOp, a: Expr, b: Expr, pos: Pos) -> EResult<Expr> {
        use BinaryOp::*;
        let invalid = |a: &Expr, b: &Expr| {
            err(
                pos,
                format!(
                    "invalid operands to binary `{}` ({} and {})",
                    op_name(op),
                    show(&a.ty),
                    show(&b.ty)
                ),
            )
        };
        let arith = a.ty.is_arith() && b.ty.is_arith();
        let ints = a.ty.is_int() && b.ty.is_int();
        let ptr_obj = |t: &Type| matches!(t.pointee(), Some(e) if !matches!(e, Type::Void | Type::Function(..)));
        let ptr_result = |t: &Type| Type::pointer(t.pointee().expect("pointer").clone());
        Ok(match op {
            Shl | Shr if ints => {
                let (a, b) = (promote(a), promote(b));
                let t = a.ty.clone();
                Expr::binop(op, a, b, t)
            }
            Mod | And | Or | Xor if ints => self.usual(op, a, b, false),
            Add | Sub | Mul | Div if arith => self.usual(op, a, b, false),
            Lt | Le | Gt | Ge | Eq | Ne if arith => self.usual(op, a, b, true),
            Add if ptr_obj(&a.ty) && b.ty.is_int() => {
                let t = ptr_result(&a.ty);
                Expr::binop(op, a, promote(b), t)
            }
            Add if a.ty.is_int() && ptr_obj(&b.ty) => {
                let t = ptr_result(&b.ty);
                Expr::binop(op, promote(a), b, t)
            }
            Sub if ptr_obj(&a.ty) && b.ty.is_int() => {
                let t = ptr_result(&a.ty);
                Expr::binop(op, a, promote(b), t)
            }
            Sub if ptr_obj(&a.ty) && ptr_obj(&b.ty) => {
                if a.ty.pointee() != b.ty.pointee() {
                    return invalid(&a, &b);
                }
                Expr::binop(op, a, b, Type::INT)
            }
            Lt | Le | Gt | Ge | Eq | Ne
                if (a.ty.is_pointer_like() && (b.ty.is_pointer_like() || b.ty.is_int()))
                    || (a.ty.is_int() && b.ty.is_pointer_like()) =>
            {
                Expr::binop(op, a, b, Type::INT)
            }
            _ => return invalid(&a, &b),
        })
    }

    /// Applies the usual arithmetic conversions to both operands.
    fn usual(&self, op: BinaryOp, a: Expr, b: Expr, comparison: bool) -> Expr {
        let (a, b) = (promote(a), promote(b));
        let t = common_type(&a.ty, &b.ty);
        let (a, b) = (cast_to(&t, a), cast_to(&t, b));
        let rt = if comparison { Type::INT } else { t };
        Expr::binop(op, a, b, rt)
    }

    fn check_convertible(&self, from: &Type, to: &Type, pos: Pos) -> EResult<()> {
        let ok = match (from, to) {
            (f, t) if f.is_arith() && t.is_arith() => true,
            (f, t) if f.is_pointer_like() && matches!(t, Type::Pointer(_)) => true,
            (f, Type::Pointer(_)) if f.is_int() => true,
            (f, t) if f.is_pointer_like() && t.is_int() => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            err(pos, format!("cannot convert {} to {}", show(from), show(to)))
        }
    }

    /// Assignment conversion of `e` to `t`.
    fn convert(&self, e: Expr, t: &Type, pos: Pos) -> EResult<Expr> {
        if e.ty == *t {
            return Ok(e);
        }
        self.check_convertible(&e.ty, t, pos)?;
        Ok(Expr::cast(t.clone(), e))
    }

    fn lvalue(&self, e: &SExpr) -> EResult<Expr> {
        let l = self.expr(e)?;
        if !l.is_lvalue() {
            return err(e.pos, "left-hand side of assignment is not an l-value");
        }
        Ok(l)
    }

    fn assign(&self, lhs: &SExpr, rhs: &SExpr, pos: Pos) -> EResult<Stmt> {
        let l = self.lvalue(lhs)?;
        if let SExprKind::Call(f, args) = &rhs.kind {
            return self.call(Some(l), f, args, rhs.pos);
        }
        let r = self.expr(rhs)?;
        if l.ty.is_composite() && l.ty == r.ty {
            // accepted; storing a struct or union goes wrong at run time
            return Ok(Stmt::Assign(l, r));
        }
        let r = self.convert(r, &l.ty.clone(), pos)?;
        Ok(Stmt::Assign(l, r))
    }

    fn call(&self, lhs: Option<Expr>, f: &SExpr, args: &[SExpr], pos: Pos) -> EResult<Stmt> {
        let mut callee = self.expr(f)?;
        if let Type::Pointer(inner) = &callee.ty {
            if let Type::Function(..) = **inner {
                let t = (**inner).clone();
                callee = Expr::deref(callee, t);
            }
        }
        let Type::Function(ptys, result) = callee.ty.clone() else {
            return err(pos, format!("called object of type {} is not a function", show(&callee.ty)));
        };
        if ptys.len() != args.len() {
            return err(
                pos,
                format!("function expects {} arguments, {} given", ptys.len(), args.len()),
            );
        }
        let mut vargs = Vec::with_capacity(args.len());
        for (a, t) in args.iter().zip(&ptys) {
            let e = self.expr(a)?;
            vargs.push(self.convert(e, t, a.pos)?);
        }
        if let Some(l) = &lhs {
            if *result == Type::Void {
                return err(pos, "cannot assign the result of a void function");
            }
            if l.ty != *result {
                return err(
                    pos,
                    format!(
                        "call result of type {} cannot be stored into {}; assign it to a variable of type {} first",
                        show(&result),
                        show(&l.ty),
                        show(&result)
                    ),
                );
            }
        }
        Ok(Stmt::Call(lhs, callee, vargs))
    }

    fn condition(&self, e: &SExpr) -> EResult<Expr> {
        let c = self.expr(e)?;
        if !is_scalar(&c.ty) {
            return err(e.pos, format!("condition has non-scalar type {}", show(&c.ty)));
        }
        Ok(c)
    }

    fn block(&self, items: &[SStmt]) -> EResult<Stmt> {
        Ok(Stmt::block(
            items.iter().map(|s| self.stmt(s)).collect::<EResult<_>>()?,
        ))
    }

    fn stmt(&self, s: &SStmt) -> EResult<Stmt> {
        let pos = s.pos;
        Ok(match &s.kind {
            SStmtKind::Skip => Stmt::Skip,
            SStmtKind::Assign(l, r) => self.assign(l, r, pos)?,
            SStmtKind::Expr(e) => match &e.kind {
                SExprKind::Call(f, args) => self.call(None, f, args, e.pos)?,
                _ => {
                    return err(
                        pos,
                        "expression statements must be assignments or function calls",
                    )
                }
            },
            SStmtKind::Block(items) => self.block(items)?,
            SStmtKind::If(c, a, b) => Stmt::if_(
                self.condition(c)?,
                self.stmt(a)?,
                match b {
                    Some(b) => self.stmt(b)?,
                    None => Stmt::Skip,
                },
            ),
            SStmtKind::While(c, body) => Stmt::while_(self.condition(c)?, self.stmt(body)?),
            SStmtKind::DoWhile(body, c) => Stmt::do_while(self.stmt(body)?, self.condition(c)?),
            SStmtKind::For(init, c, step, body) => Stmt::for_(
                self.stmt(init)?,
                self.condition(c)?,
                self.stmt(step)?,
                self.stmt(body)?,
            ),
            SStmtKind::Break => Stmt::Break,
            SStmtKind::Continue => Stmt::Continue,
            SStmtKind::Return(None) => Stmt::Return(None),
            SStmtKind::Return(Some(e)) => {
                if self.result == Type::Void {
                    return err(pos, "a void function cannot return a value");
                }
                let v = self.expr(e)?;
                Stmt::Return(Some(self.convert(v, &self.result, e.pos)?))
            }
            SStmtKind::Switch(e, cases) => {
                let v = self.expr(e)?;
                if !v.ty.is_int() {
                    return err(e.pos, format!("switch on non-integer type {}", show(&v.ty)));
                }
                let v = promote(v);
                let mut seen = HashSet::new();
                let mut out = Vec::with_capacity(cases.len());
                for (i, (label, body, lpos)) in cases.iter().enumerate() {
                    match label {
                        CaseLabel::Default if i + 1 != cases.len() => {
                            return err(*lpos, "default must be last in a switch")
                        }
                        CaseLabel::Case(n) if !seen.insert(*n) => {
                            return err(*lpos, format!("duplicate case label {}", n))
                        }
                        _ => {}
                    }
                    out.push((*label, self.block(body)?));
                }
                if !matches!(out.last(), Some((CaseLabel::Default, _))) {
                    return err(pos, "switch must end with a default case");
                }
                Stmt::Switch(v, out)
            }
        })
    }
}
