use thiserror::Error;

use super::lexer::{Cursor, ParseError, Tok, Token};
use super::signature::{SigError, Signature, TypeError};
use super::term::{EqKind, Equation, Term};
use super::types::{name, TypeExpr};
use crate::exc_theory::handlers;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseError),
    #[error("{line}:{col}: {err}")]
    Type { line: usize, col: usize, err: TypeError },
    #[error(transparent)]
    Signature(#[from] SigError),
}

impl TextError {
    pub fn is_syntax(&self) -> bool {
        matches!(self, TextError::Syntax(_))
    }
}

fn type_err(t: &Token, err: TypeError) -> TextError {
    TextError::Type { line: t.line, col: t.col, err }
}

/// Parses a type without resolving names (used by declarations).
pub fn parse_type_raw(cur: &mut Cursor) -> Result<TypeExpr, ParseError> {
    let mut t = parse_prod(cur)?;
    while cur.eat_punct("+") {
        let r = parse_prod(cur)?;
        t = TypeExpr::coprod(t, r);
    }
    Ok(t)
}

fn parse_prod(cur: &mut Cursor) -> Result<TypeExpr, ParseError> {
    let mut t = parse_type_atom(cur)?;
    while cur.eat_punct("*") {
        let r = parse_type_atom(cur)?;
        t = TypeExpr::prod(t, r);
    }
    Ok(t)
}

fn parse_type_atom(cur: &mut Cursor) -> Result<TypeExpr, ParseError> {
    match cur.peek().clone() {
        Tok::Num(1) => {
            cur.bump();
            Ok(TypeExpr::Unit)
        }
        Tok::Num(0) => {
            cur.bump();
            Ok(TypeExpr::Empty)
        }
        Tok::Punct("(") => {
            cur.bump();
            let t = parse_type_raw(cur)?;
            cur.expect_punct(")")?;
            Ok(t)
        }
        Tok::Ident(s) => {
            cur.bump();
            if s == "V" && cur.is_punct("[") {
                cur.bump();
                let n = cur.expect_ident()?;
                cur.expect_punct("]")?;
                Ok(TypeExpr::Val(name(&n)))
            } else {
                Ok(TypeExpr::Base(name(&s)))
            }
        }
        _ => Err(cur.unexpected("a type")),
    }
}

/// Parses and resolves a type against `sig`.
pub fn parse_type_in(cur: &mut Cursor, sig: &Signature) -> Result<TypeExpr, TextError> {
    let start = cur.position();
    let t = parse_type_raw(cur)?;
    sig.resolve(&t).map_err(|e| type_err(cur.token_at(start), e))
}

/// Parses a composite `a . b . c` (right nested) without typechecking the whole.
pub fn parse_term_in(cur: &mut Cursor, sig: &Signature) -> Result<Term, TextError> {
    let head = parse_term_atom(cur, sig)?;
    if cur.eat_punct(".") {
        let rest = parse_term_in(cur, sig)?;
        Ok(Term::comp(head, rest))
    } else {
        Ok(head)
    }
}

fn two_terms(cur: &mut Cursor, sig: &Signature) -> Result<(Term, Term), TextError> {
    cur.expect_punct("(")?;
    let a = parse_term_in(cur, sig)?;
    cur.expect_punct(",")?;
    let b = parse_term_in(cur, sig)?;
    cur.expect_punct(")")?;
    Ok((a, b))
}

fn two_types(cur: &mut Cursor, sig: &Signature) -> Result<(TypeExpr, TypeExpr), TextError> {
    cur.expect_punct("(")?;
    let a = parse_type_in(cur, sig)?;
    cur.expect_punct(",")?;
    let b = parse_type_in(cur, sig)?;
    cur.expect_punct(")")?;
    Ok((a, b))
}

fn one_type(cur: &mut Cursor, sig: &Signature) -> Result<TypeExpr, TextError> {
    cur.expect_punct("(")?;
    let a = parse_type_in(cur, sig)?;
    cur.expect_punct(")")?;
    Ok(a)
}

fn bracket_name(cur: &mut Cursor) -> Result<String, TextError> {
    cur.expect_punct("[")?;
    let n = cur.expect_ident()?;
    cur.expect_punct("]")?;
    Ok(n)
}

fn parse_term_atom(cur: &mut Cursor, sig: &Signature) -> Result<Term, TextError> {
    if cur.eat_punct("(") {
        let t = parse_term_in(cur, sig)?;
        cur.expect_punct(")")?;
        return Ok(t);
    }
    let word = match cur.peek().clone() {
        Tok::Ident(s) => s,
        _ => return Err(cur.unexpected("a term").into()),
    };
    let opens = matches!(cur.peek_at(1), Tok::Punct("(") | Tok::Punct("["));
    let at = cur.token().clone();
    if opens {
        match word.as_str() {
            "id" | "final" | "initial" => {
                cur.bump();
                let t = one_type(cur, sig)?;
                return Ok(match word.as_str() {
                    "id" => Term::id(t),
                    "final" => Term::final_(t),
                    _ => Term::initial(t),
                });
            }
            "pr1" | "pr2" | "in1" | "in2" => {
                cur.bump();
                let (a, b) = two_types(cur, sig)?;
                return Ok(match word.as_str() {
                    "pr1" => Term::proj1(a, b),
                    "pr2" => Term::proj2(a, b),
                    "in1" => Term::in1(a, b),
                    _ => Term::in2(a, b),
                });
            }
            "pair" | "lpair" | "rpair" | "copair" | "lcopair" | "rcopair" => {
                cur.bump();
                let (a, b) = two_terms(cur, sig)?;
                return Ok(match word.as_str() {
                    "pair" => Term::pair(a, b),
                    "lpair" => Term::lpair(a, b),
                    "rpair" => Term::rpair(a, b),
                    "copair" => Term::copair(a, b),
                    "lcopair" => Term::lcopair(a, b),
                    _ => Term::rcopair(a, b),
                });
            }
            "lkp" | "upd" => {
                cur.bump();
                let n = bracket_name(cur)?;
                if !sig.is_location(&n) {
                    return Err(type_err(&at, TypeError::UnknownLocation(name(&n))));
                }
                return Ok(if word == "lkp" { Term::lookup(name(&n)) } else { Term::update(name(&n)) });
            }
            "tag" | "untag" => {
                cur.bump();
                let n = bracket_name(cur)?;
                if !sig.is_exception(&n) {
                    return Err(type_err(&at, TypeError::UnknownException(name(&n))));
                }
                return Ok(if word == "tag" { Term::tag(name(&n)) } else { Term::untag(name(&n)) });
            }
            "down" => {
                cur.bump();
                cur.expect_punct("(")?;
                let f = parse_term_in(cur, sig)?;
                cur.expect_punct(")")?;
                return Ok(Term::downcast(f));
            }
            "throw" => {
                cur.bump();
                cur.expect_punct("(")?;
                let b = parse_type_in(cur, sig)?;
                cur.expect_punct(",")?;
                let t = cur.expect_ident()?;
                cur.expect_punct(")")?;
                return handlers::throw(sig, b, &name(&t)).map_err(|e| {
                    let tk = &at;
                    TextError::Syntax(ParseError::new(tk.line, tk.col, e.to_string()))
                });
            }
            "try" => {
                cur.bump();
                cur.expect_punct("(")?;
                let f = parse_term_in(cur, sig)?;
                cur.expect_punct(")")?;
                cur.expect_keyword("catch")?;
                let t = bracket_name(cur)?;
                cur.expect_punct("(")?;
                let g = parse_term_in(cur, sig)?;
                cur.expect_punct(")")?;
                let h = handlers::try_catch(sig, &f, &name(&t), &g).map_err(|e| {
                    let tk = &at;
                    TextError::Syntax(ParseError::new(tk.line, tk.col, e.to_string()))
                })?;
                return Ok(h.public);
            }
            _ => {}
        }
    }
    cur.bump();
    if sig.pure_sym(&word).is_some() {
        Ok(Term::sym(name(&word)))
    } else if sig.var(&word).is_some() {
        Ok(Term::var(name(&word)))
    } else {
        Err(type_err(&at, TypeError::UnknownSymbol(name(&word))))
    }
}

/// Parses `lhs == rhs` or `lhs ~~ rhs` without checking types.
pub fn parse_equation_in(cur: &mut Cursor, sig: &Signature) -> Result<Equation, TextError> {
    let lhs = parse_term_in(cur, sig)?;
    let kind = if cur.eat_punct("==") {
        EqKind::Strong
    } else if cur.eat_punct("~~") {
        EqKind::Weak
    } else {
        return Err(cur.unexpected("`==` or `~~`").into());
    };
    let rhs = parse_term_in(cur, sig)?;
    Ok(Equation::new(kind, lhs, rhs))
}

pub fn parse_type(text: &str, sig: &Signature) -> Result<TypeExpr, TextError> {
    let mut cur = Cursor::new(text)?;
    let t = parse_type_in(&mut cur, sig)?;
    cur.expect_eof()?;
    Ok(t)
}

/// Parses a closed term and typechecks it.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, TextError> {
    let mut cur = Cursor::new(text)?;
    let t = parse_term_in(&mut cur, sig)?;
    cur.expect_eof()?;
    sig.typecheck(&t).map_err(|err| TextError::Type { line: 1, col: 1, err })?;
    Ok(t)
}

/// Parses an equation and checks that both sides are parallel.
pub fn parse_equation(text: &str, sig: &Signature) -> Result<Equation, TextError> {
    let mut cur = Cursor::new(text)?;
    let e = parse_equation_in(&mut cur, sig)?;
    cur.expect_eof()?;
    sig.check_equation(&e).map_err(|err| TextError::Type { line: 1, col: 1, err })?;
    Ok(e)
}

pub fn parse_signature(text: &str) -> Result<Signature, TextError> {
    let mut cur = Cursor::new(text)?;
    let mut sig = Signature::new();
    while !cur.at_eof() {
        let tk = cur.token().clone();
        let pos = (tk.line, tk.col);
        let kw = cur.expect_ident()?;
        match kw.as_str() {
            "type" => {
                let n = cur.expect_ident()?;
                sig.add_type_at(name(&n), pos)?;
            }
            "pure" => {
                let n = cur.expect_ident()?;
                cur.expect_punct(":")?;
                let a = parse_type_raw(&mut cur)?;
                cur.expect_punct("->")?;
                let b = parse_type_raw(&mut cur)?;
                sig.add_pure_at(name(&n), a, b, pos)?;
            }
            "location" | "exception" => {
                let n = cur.expect_ident()?;
                cur.expect_punct(":")?;
                let v = parse_type_raw(&mut cur)?;
                if kw == "location" {
                    sig.add_location_at(name(&n), v, pos)?;
                } else {
                    sig.add_exception_at(name(&n), v, pos)?;
                }
            }
            "axiom" => {
                let n = cur.expect_ident()?;
                cur.expect_punct(":")?;
                let e = parse_equation_in(&mut cur, &sig)?;
                sig.add_axiom_at(name(&n), e, pos)?;
            }
            "inhabit" => {
                let t = parse_type_raw(&mut cur)?;
                cur.expect_punct("=")?;
                let h = parse_term_in(&mut cur, &sig)?;
                sig.add_inhabitant_at(t, h, pos)?;
            }
            other => {
                return Err(ParseError::new(tk.line, tk.col, format!("unknown declaration `{other}`")).into());
            }
        }
        cur.expect_punct(";")?;
    }
    Ok(sig)
}
