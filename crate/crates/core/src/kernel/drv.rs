use std::fmt::Write as _;

use super::judgment::{Binding, Bindings, Derivation, Judgment, Step};
use super::schema::{find_rule, Sort};
use crate::syntax::{
    name, parse_equation_in, parse_term_in, parse_type_in, Cursor, Decoration, EqKind, ParseError, Signature,
    TextError, TheoryId, Tok, VarDecl,
};

fn parse_dec(cur: &mut Cursor) -> Result<Decoration, TextError> {
    let n = cur.expect_num()?;
    Decoration::from_rank(n.min(255) as u8).ok_or_else(|| cur.error("decoration must be 0, 1 or 2").into())
}

fn parse_kind(cur: &mut Cursor) -> Result<EqKind, TextError> {
    match cur.expect_ident()?.as_str() {
        "strong" => Ok(EqKind::Strong),
        "weak" => Ok(EqKind::Weak),
        _ => Err(cur.error("equation kind must be `strong` or `weak`").into()),
    }
}

/// Rule names may carry a numeric suffix (`pair-eq.1`).
fn parse_rule_name(cur: &mut Cursor) -> Result<String, TextError> {
    let mut n = cur.expect_ident()?;
    if cur.is_punct(".") && matches!(cur.peek_at(1), Tok::Num(_)) {
        cur.bump();
        let k = cur.expect_num()?;
        n = format!("{n}.{k}");
    }
    Ok(n)
}

/// Raw text of a binding value of an unknown rule, up to `,` or `}` at depth 0.
fn skip_value(cur: &mut Cursor) -> Result<String, TextError> {
    let start = cur.position();
    let mut depth = 0i32;
    loop {
        match cur.peek() {
            Tok::Eof => return Err(cur.unexpected("`}`").into()),
            Tok::Punct("(") | Tok::Punct("[") => depth += 1,
            Tok::Punct(")") | Tok::Punct("]") => depth -= 1,
            Tok::Punct(",") | Tok::Punct("}") if depth == 0 => break,
            _ => {}
        }
        cur.bump();
    }
    Ok(cur.slice_from(start).to_string())
}

fn parse_judgment(cur: &mut Cursor, sig: &Signature) -> Result<Judgment, TextError> {
    let lhs = parse_term_in(cur, sig)?;
    if cur.eat_punct(":") {
        let src = parse_type_in(cur, sig)?;
        cur.expect_punct("->")?;
        let tgt = parse_type_in(cur, sig)?;
        cur.expect_punct("@")?;
        let dec = parse_dec(cur)?;
        return Ok(Judgment::Term { term: lhs, src, tgt, dec });
    }
    let kind = if cur.eat_punct("==") {
        EqKind::Strong
    } else if cur.eat_punct("~~") {
        EqKind::Weak
    } else {
        return Err(cur.unexpected("`:`, `==` or `~~`").into());
    };
    let rhs = parse_term_in(cur, sig)?;
    Ok(Judgment::Eq(crate::syntax::Equation::new(kind, lhs, rhs)))
}

/// Parses a derivation file against `sig`. Only syntax and name resolution
/// are checked here; everything else is the kernel's job.
pub fn parse_derivation(text: &str, sig: &Signature) -> Result<Derivation, TextError> {
    let mut cur = Cursor::new(text)?;
    if cur.at_eof() {
        // A file without any content is the vacuous derivation.
        return Ok(Derivation::new(TheoryId::Com));
    }
    cur.expect_keyword("theory")?;
    let th = cur.expect_ident()?;
    let theory = TheoryId::parse(&th).ok_or_else(|| cur.error(format!("unknown theory `{th}`")))?;
    cur.expect_punct(";")?;
    let mut d = Derivation::new(theory);
    let mut sig = sig.clone();
    loop {
        let tk = cur.token().clone();
        if cur.is_ident("var") {
            cur.bump();
            let n = cur.expect_ident()?;
            cur.expect_punct(":")?;
            let src = parse_type_in(&mut cur, &sig)?;
            cur.expect_punct("->")?;
            let tgt = parse_type_in(&mut cur, &sig)?;
            cur.expect_punct("@")?;
            let dec = parse_dec(&mut cur)?;
            let v = VarDecl { name: name(&n), src, tgt, dec };
            sig.add_var_at(v.clone(), (tk.line, tk.col))?;
            d.vars.push(v);
        } else if cur.is_ident("hyp") && !matches!(cur.peek_at(1), Tok::Punct("(") | Tok::Punct("[")) {
            cur.bump();
            d.hyps.push(parse_equation_in(&mut cur, &sig)?);
        } else {
            break;
        }
        cur.expect_punct(";")?;
    }
    while !cur.at_eof() {
        let tk = cur.token().clone();
        let n = cur.expect_num()?;
        if n as usize != d.steps.len() + 1 {
            return Err(ParseError::new(tk.line, tk.col, format!("expected step {}, found {n}", d.steps.len() + 1)).into());
        }
        cur.expect_punct(":")?;
        let rule = parse_rule_name(&mut cur)?;
        let schema = find_rule(theory, &rule);
        let mut bindings = Bindings::new();
        if cur.eat_punct("{") {
            while !cur.is_punct("}") {
                let mt = cur.token().clone();
                let meta = cur.expect_ident()?;
                cur.expect_punct("=")?;
                let value = match schema.and_then(|s| s.sort_of(&meta)) {
                    Some(Sort::Term(_)) => Binding::Term(parse_term_in(&mut cur, &sig)?),
                    Some(Sort::Type) => Binding::Type(parse_type_in(&mut cur, &sig)?),
                    Some(Sort::Kind) => Binding::Kind(parse_kind(&mut cur)?),
                    Some(Sort::Dec(_)) => Binding::Dec(parse_dec(&mut cur)?),
                    Some(Sort::Loc | Sort::Exn | Sort::Axiom) => Binding::Name(name(&cur.expect_ident()?)),
                    // Left for the kernel to reject with a precise message.
                    None => Binding::Name(name(&skip_value(&mut cur)?)),
                };
                if bindings.insert(meta.clone(), value).is_some() {
                    return Err(ParseError::new(mt.line, mt.col, format!("`{meta}` bound twice")).into());
                }
                if !cur.eat_punct(",") {
                    break;
                }
            }
            cur.expect_punct("}")?;
        }
        let mut premises = Vec::new();
        if cur.is_ident("from") {
            cur.bump();
            cur.expect_punct("[")?;
            while !cur.is_punct("]") {
                let pt = cur.token().clone();
                let p = cur.expect_num()?;
                if p == 0 {
                    return Err(ParseError::new(pt.line, pt.col, "steps are numbered from 1").into());
                }
                premises.push(p as usize - 1);
                if !cur.eat_punct(",") {
                    break;
                }
            }
            cur.expect_punct("]")?;
        }
        cur.expect_punct("|-")?;
        let conclusion = parse_judgment(&mut cur, &sig)?;
        cur.expect_punct(";")?;
        d.steps.push(Step { rule, bindings, premises, conclusion });
    }
    Ok(d)
}

/// Canonical text of a derivation; `parse_derivation` reads it back.
pub fn print_derivation(d: &Derivation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "theory {};", d.theory);
    for v in &d.vars {
        let _ = writeln!(s, "var {} : {} -> {} @ {};", v.name, v.src, v.tgt, v.dec);
    }
    for h in &d.hyps {
        let _ = writeln!(s, "hyp {h};");
    }
    for (i, st) in d.steps.iter().enumerate() {
        let _ = write!(s, "{}: {}", i + 1, st.rule);
        if !st.bindings.is_empty() {
            let b: Vec<String> = st.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            let _ = write!(s, " {{ {} }}", b.join(", "));
        }
        if !st.premises.is_empty() {
            let p: Vec<String> = st.premises.iter().map(|p| (p + 1).to_string()).collect();
            let _ = write!(s, " from [{}]", p.join(", "));
        }
        let _ = writeln!(s, " |- {};", st.conclusion);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check::check_derivation;
    use crate::syntax::parse_signature;

    const SIG: &str = "location X : V; pure c : 1 -> V;";

    #[test]
    fn round_trip_and_check() {
        let sig = parse_signature(SIG).unwrap();
        let text = "theory L_st;\n\
            var f : 1 -> V @ 2;\n\
            hyp f ~~ c;\n\
            1: hyp { k = weak, lhs = f, rhs = c } |- f ~~ c;\n\
            2: sym { f = f, g = c, k = weak } from [1] |- c ~~ f;\n\
            3: pair-eq.1 { f1 = c, f2 = c } |- pr1(V, V) . pair(c, c) == c;\n\
            4: lookup { X = X } |- lkp[X] : 1 -> V @ 1;\n\
            5: symbol { f = c } |- c : 1 -> V @ 0;\n\
            6: up-1 { f = c } from [5] |- c : 1 -> V @ 1;\n";
        let d = parse_derivation(text, &sig).unwrap();
        assert_eq!(d.steps.len(), 6);
        check_derivation(&d, &sig).unwrap();
        let printed = print_derivation(&d);
        assert_eq!(parse_derivation(&printed, &sig).unwrap(), d);
    }

    #[test]
    fn step_numbers_must_be_consecutive() {
        let sig = parse_signature(SIG).unwrap();
        let e = parse_derivation("theory L_com;\n2: refl { f = c, k = strong } |- c == c;", &sig).unwrap_err();
        assert!(e.is_syntax());
    }

    #[test]
    fn unknown_rule_parses_then_fails_in_kernel() {
        let sig = parse_signature(SIG).unwrap();
        let d = parse_derivation("theory L_com;\n1: magic { f = c . (x] } |- c == c;", &sig).unwrap();
        assert!(check_derivation(&d, &sig).is_err());
    }
}
