use super::model::{Carrier, Model, ModelKind, PureTable, Value};
use crate::syntax::{name, parse_type_in, Cursor, Signature, TextError, TypeExpr};

/// Parses a model file against `sig`:
///
/// ```text
/// kind state;
/// carrier V = {v0, v1};
/// table s : V -> V { v0 |-> v1, v1 |-> v0 };
/// ```
///
/// Carriers not listed and tables not listed are errors; locations and
/// exceptions are taken from the signature.
pub fn parse_model(text: &str, sig: &Signature) -> Result<Model, TextError> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("kind")?;
    let kind = match cur.expect_ident()?.as_str() {
        "state" => ModelKind::State,
        "exception" => ModelKind::Exception,
        _ => return Err(cur.error("model kind must be `state` or `exception`").into()),
    };
    cur.expect_punct(";")?;
    let mut m = Model { kind, carriers: Vec::new(), locations: sig.locations.clone(), exceptions: sig.exceptions.clone(), tables: Vec::new() };
    let mut rows_pending: Vec<(usize, PureTable, Vec<(Value, Value)>)> = Vec::new();
    while !cur.at_eof() {
        if cur.is_ident("carrier") {
            cur.bump();
            let n = cur.expect_ident()?;
            if !sig.has_type(&n) {
                return Err(cur.error(format!("unknown type `{n}`")).into());
            }
            if m.carrier(&n).is_some() {
                return Err(cur.error(format!("carrier `{n}` given twice")).into());
            }
            cur.expect_punct("=")?;
            cur.expect_punct("{")?;
            let mut elems = Vec::new();
            if !cur.is_punct("}") {
                loop {
                    let e = cur.expect_ident()?;
                    if elems.contains(&e) {
                        return Err(cur.error(format!("element `{e}` repeated")).into());
                    }
                    elems.push(e);
                    if !cur.eat_punct(",") {
                        break;
                    }
                }
            }
            cur.expect_punct("}")?;
            cur.expect_punct(";")?;
            if elems.is_empty() && kind == ModelKind::State {
                return Err(cur.error("carriers of state models must be nonempty").into());
            }
            m.carriers.push(Carrier { name: name(&n), elems });
        } else if cur.is_ident("table") {
            cur.bump();
            let n = cur.expect_ident()?;
            let Some(p) = sig.pure_sym(&n) else {
                return Err(cur.error(format!("unknown pure symbol `{n}`")).into());
            };
            let p = p.clone();
            cur.expect_punct(":")?;
            let src = parse_type_in(&mut cur, sig)?;
            cur.expect_punct("->")?;
            let tgt = parse_type_in(&mut cur, sig)?;
            if src != p.src || tgt != p.tgt {
                return Err(cur.error(format!("table `{n}` has the wrong type")).into());
            }
            let line = cur.token().line;
            cur.expect_punct("{")?;
            let mut rows = Vec::new();
            if !cur.is_punct("}") {
                loop {
                    let a = parse_value(&mut cur, &m, &src)?;
                    cur.expect_punct("|->")?;
                    let b = parse_value(&mut cur, &m, &tgt)?;
                    rows.push((a, b));
                    if !cur.eat_punct(",") {
                        break;
                    }
                }
            }
            cur.expect_punct("}")?;
            cur.expect_punct(";")?;
            rows_pending.push((line, PureTable { name: p.name.clone(), src, tgt, map: Vec::new() }, rows));
        } else {
            return Err(cur.unexpected("`carrier` or `table`").into());
        }
    }
    let err = |line: usize, msg: String| TextError::Syntax(crate::syntax::ParseError::new(line, 1, msg));
    for t in &sig.types {
        if m.carrier(t).is_none() {
            return Err(err(1, format!("no carrier for type `{t}`")));
        }
    }
    for (line, mut tb, rows) in rows_pending {
        let size = m.size(&tb.src).map_err(|e| err(line, e.to_string()))?;
        let mut map = vec![None; size];
        for (a, b) in rows {
            let i = m.encode(&a, &tb.src).map_err(|e| err(line, e.to_string()))?;
            let j = m.encode(&b, &tb.tgt).map_err(|e| err(line, e.to_string()))?;
            if map[i].replace(j as u32).is_some() {
                return Err(err(line, format!("table `{}` has two rows for one input", tb.name)));
            }
        }
        if map.iter().any(Option::is_none) {
            return Err(err(line, format!("table `{}` is not total", tb.name)));
        }
        tb.map = map.into_iter().flatten().collect();
        m.tables.push(tb);
    }
    for p in &sig.pures {
        if m.table(&p.name).is_none() {
            return Err(err(1, format!("no table for `{}`", p.name)));
        }
    }
    Ok(m)
}

fn parse_value(cur: &mut Cursor, m: &Model, t: &TypeExpr) -> Result<Value, TextError> {
    match t {
        TypeExpr::Unit => {
            cur.expect_punct("*")?;
            Ok(Value::Unit)
        }
        TypeExpr::Empty => Err(cur.error("the empty type has no elements").into()),
        TypeExpr::Base(n) => {
            let e = cur.expect_ident()?;
            let c = m.carrier(n).ok_or_else(|| cur.error(format!("carrier `{n}` must precede its use")))?;
            let i = c.elems.iter().position(|x| *x == e).ok_or_else(|| cur.error(format!("`{e}` is not an element of `{n}`")))?;
            Ok(Value::Elem(i as u32))
        }
        TypeExpr::Prod(a, b) => {
            cur.expect_punct("(")?;
            let x = parse_value(cur, m, a)?;
            cur.expect_punct(",")?;
            let y = parse_value(cur, m, b)?;
            cur.expect_punct(")")?;
            Ok(Value::Pair(Box::new(x), Box::new(y)))
        }
        TypeExpr::Coprod(a, b) => {
            let left = match cur.expect_ident()?.as_str() {
                "inl" => true,
                "inr" => false,
                _ => return Err(cur.error("expected `inl` or `inr`").into()),
            };
            cur.expect_punct("(")?;
            let v = parse_value(cur, m, if left { a } else { b })?;
            cur.expect_punct(")")?;
            Ok(if left { Value::Inl(Box::new(v)) } else { Value::Inr(Box::new(v)) })
        }
        TypeExpr::Val(_) => Err(cur.error("unresolved value type").into()),
    }
}

/// Prints a model in the format read by `parse_model`.
pub fn print_model(m: &Model) -> String {
    let mut out = format!("kind {};\n", m.kind);
    for c in &m.carriers {
        out.push_str(&format!("carrier {} = {{{}}};\n", c.name, c.elems.join(", ")));
    }
    for t in &m.tables {
        let rows: Vec<String> = t
            .map
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let a = m.decode(i, &t.src).map(|v| m.show(&v, &t.src)).unwrap_or_default();
                let b = m.decode(j as usize, &t.tgt).map(|v| m.show(&v, &t.tgt)).unwrap_or_default();
                format!("{a} |-> {b}")
            })
            .collect();
        out.push_str(&format!("table {} : {} -> {} {{ {} }};\n", t.name, t.src, t.tgt, rows.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::enumerate::{enumerate_models, EnumOptions};
    use crate::syntax::parse_signature;

    #[test]
    fn round_trip_all_small_models() {
        let sig = parse_signature("location X : V; pure c : 1 -> V; pure p : V * V -> V + 1;").unwrap();
        for m in enumerate_models(&sig, &EnumOptions::new(ModelKind::State, 2)).iter().step_by(7) {
            let text = print_model(m);
            assert_eq!(&parse_model(&text, &sig).unwrap(), m, "{text}");
        }
    }

    #[test]
    fn rejects_partial_tables() {
        let sig = parse_signature("location X : V; pure s : V -> V;").unwrap();
        let bad = "kind state; carrier V = {a, b}; table s : V -> V { a |-> b };";
        assert!(parse_model(bad, &sig).is_err());
        let ok = "kind state; carrier V = {a, b}; table s : V -> V { a |-> b, b |-> b };";
        assert_eq!(parse_model(ok, &sig).unwrap().table("s").unwrap().map, vec![1, 1]);
    }

    #[test]
    fn state_carriers_are_nonempty() {
        let sig = parse_signature("location X : V;").unwrap();
        assert!(parse_model("kind state; carrier V = {};", &sig).is_err());
    }
}
