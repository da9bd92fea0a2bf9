//! Concrete syntax: parsing, type elaboration and pretty-printing.
//!
//! [`parse`] turns source text into a [`syntax::Unit`], a surface tree whose
//! types are still C-level ([`CType`](crate::ast::CType)) and whose
//! expressions carry no type annotations. Syntactic sugar is already removed
//! at that point: `a[i]` is `*(a + i)`, `p->f` is `(*p).f`, and `&&`/`||`
//! are conditionals. [`elaborate`] resolves names and struct tags, computes
//! types and inserts casts, producing a Clight [`Program`]. [`pretty_print`]
//! goes back to text.
//!
//! ```
//! let p = clight::frontend::compile("int main(void) { return 6 * 7; }").unwrap();
//! let text = clight::frontend::pretty_print(&p);
//! assert_eq!(clight::frontend::compile(&text).unwrap(), p);
//! ```

mod elaborate;
mod lexer;
mod parser;
mod pretty;
pub mod syntax;

use crate::ast::{well_formed, Diagnostic, Program};

pub use elaborate::elaborate;
pub use pretty::{expr_to_string, pretty_print, stmt_to_string, type_to_string};

/// Parses source text into a surface tree.
pub fn parse(src: &str) -> Result<syntax::Unit, Vec<Diagnostic>> {
    let tokens = lexer::tokenize(src).map_err(|d| vec![d])?;
    parser::Parser::new(tokens).unit().map_err(|d| vec![d])
}

/// Parses, elaborates and checks well-formedness.
pub fn compile(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let unit = parse(src)?;
    let p = elaborate(&unit)?;
    let diags = well_formed(&p);
    if diags.is_empty() {
        Ok(p)
    } else {
        Err(diags)
    }
}
