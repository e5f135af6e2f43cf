//! Object-language grammar: types, terms, signatures, text formats and
//! decoration inference.

pub mod decorate;
pub mod lexer;
pub mod parser;
pub mod signature;
pub mod term;
pub mod types;

pub use decorate::{decorate, DecorateError};
pub use lexer::{Cursor, ParseError, Tok};
pub use parser::{
    parse_equation, parse_equation_in, parse_signature, parse_term, parse_term_in, parse_type, parse_type_in,
    parse_type_raw, TextError,
};
pub use signature::{is_pure_syntax, Axiom, PureSym, SigError, Signature, TypeError, VarDecl};
pub use term::{EqKind, Equation, Term, TermKind};
pub use types::{name, Decoration, Name, TheoryId, TypeExpr};
