use super::model::{Model, ModelKind, SemError, Value};
use crate::syntax::{EqKind, Equation, Name, Signature, Term, TermKind, TypeExpr};

pub type State = Vec<Value>;

/// Result of a term in an exception model: an ordinary value or a raised
/// exception (index into the model's exceptions, carried value).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Normal(Value),
    Raised(usize, Value),
}

/// Extensional interpretation of a term at its maximal decoration:
/// `A x S -> B x S` for states, `A + E -> B + E` for exceptions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Table {
    State { src: TypeExpr, tgt: TypeExpr, rows: Vec<((Value, State), (Value, State))> },
    Exc { src: TypeExpr, tgt: TypeExpr, rows: Vec<(Outcome, Outcome)> },
}

fn ctor(t: &Term) -> &'static str {
    match t.kind() {
        TermKind::LPair(..) => "lpair",
        TermKind::RPair(..) => "rpair",
        TermKind::LCopair(..) => "lcopair",
        TermKind::RCopair(..) => "rcopair",
        TermKind::Lookup(_) => "lkp",
        TermKind::Update(_) => "upd",
        TermKind::Tag(_) => "tag",
        TermKind::Untag(_) => "untag",
        TermKind::Downcast(_) => "down",
        _ => "term",
    }
}

fn position(list: &[(Name, TypeExpr)], n: &Name) -> Result<usize, SemError> {
    list.iter().position(|(m, _)| m == n).ok_or_else(|| SemError::UnknownValueType(n.clone()))
}

fn pair(a: Value, b: Value) -> Value {
    Value::Pair(Box::new(a), Box::new(b))
}

/// Runs `t` on value `v` in state `s`.
pub fn run_state(t: &Term, m: &Model, v: &Value, s: &State) -> Result<(Value, State), SemError> {
    use TermKind::*;
    let unreachable_input = || SemError::IllTyped(format!("no input can reach `{t}`"));
    Ok(match t.kind() {
        Id(_) => (v.clone(), s.clone()),
        Comp(g, f) => {
            let (w, s1) = run_state(f, m, v, s)?;
            run_state(g, m, &w, &s1)?
        }
        Pair(f1, f2) => {
            let (b1, _) = run_state(f1, m, v, s)?;
            let (b2, _) = run_state(f2, m, v, s)?;
            (pair(b1, b2), s.clone())
        }
        LPair(f1, f2) => {
            let (b1, _) = run_state(f1, m, v, s)?;
            let (b2, s2) = run_state(f2, m, v, s)?;
            (pair(b1, b2), s2)
        }
        RPair(f1, f2) => {
            let (b2, _) = run_state(f2, m, v, s)?;
            let (b1, s1) = run_state(f1, m, v, s)?;
            (pair(b1, b2), s1)
        }
        Proj1(..) | Proj2(..) => match v {
            Value::Pair(a, b) => (if matches!(t.kind(), Proj1(..)) { (**a).clone() } else { (**b).clone() }, s.clone()),
            _ => return Err(SemError::IllTyped(format!("`{t}` applied to a non-pair"))),
        },
        Final(_) => (Value::Unit, s.clone()),
        Copair(f1, f2) => match v {
            Value::Inl(a) => run_state(f1, m, a, s)?,
            Value::Inr(b) => run_state(f2, m, b, s)?,
            _ => return Err(SemError::IllTyped(format!("`{t}` applied to a non-sum"))),
        },
        In1(..) => (Value::Inl(Box::new(v.clone())), s.clone()),
        In2(..) => (Value::Inr(Box::new(v.clone())), s.clone()),
        Initial(_) => return Err(unreachable_input()),
        Sym(n) => (m.apply(n, v)?, s.clone()),
        Var(n) => return Err(SemError::Variable(n.clone())),
        Lookup(x) => (s[position(&m.locations, x)?].clone(), s.clone()),
        Update(x) => {
            let mut s2 = s.clone();
            s2[position(&m.locations, x)?] = v.clone();
            (Value::Unit, s2)
        }
        _ => return Err(SemError::NotInterpretable { ctor: ctor(t), kind: ModelKind::State }),
    })
}

/// Runs `t` on an input that may already be an exception.
pub fn run_exc(t: &Term, m: &Model, o: &Outcome) -> Result<Outcome, SemError> {
    use TermKind::*;
    let unreachable_input = || SemError::IllTyped(format!("no ordinary input can reach `{t}`"));
    // Propagators leave raised inputs untouched.
    let propagates = !matches!(t.kind(), Id(_) | Comp(..) | LCopair(..) | RCopair(..) | Untag(_));
    if propagates {
        if let Outcome::Raised(..) = o {
            return Ok(o.clone());
        }
    }
    let normal = |o: &Outcome| -> Result<Value, SemError> {
        match o {
            Outcome::Normal(v) => Ok(v.clone()),
            Outcome::Raised(..) => Err(SemError::IllTyped("unexpected exception".into())),
        }
    };
    Ok(match t.kind() {
        Id(_) => o.clone(),
        Comp(g, f) => {
            let w = run_exc(f, m, o)?;
            run_exc(g, m, &w)?
        }
        Pair(f1, f2) => {
            let b1 = run_exc(f1, m, o)?;
            let b2 = run_exc(f2, m, o)?;
            match (b1, b2) {
                (Outcome::Normal(x), Outcome::Normal(y)) => Outcome::Normal(pair(x, y)),
                (r @ Outcome::Raised(..), _) | (_, r @ Outcome::Raised(..)) => r,
            }
        }
        Proj1(..) | Proj2(..) => match normal(o)? {
            Value::Pair(a, b) => Outcome::Normal(if matches!(t.kind(), Proj1(..)) { *a } else { *b }),
            _ => return Err(SemError::IllTyped(format!("`{t}` applied to a non-pair"))),
        },
        Final(_) => Outcome::Normal(Value::Unit),
        Copair(f1, f2) => match normal(o)? {
            Value::Inl(a) => run_exc(f1, m, &Outcome::Normal(*a))?,
            Value::Inr(b) => run_exc(f2, m, &Outcome::Normal(*b))?,
            _ => return Err(SemError::IllTyped(format!("`{t}` applied to a non-sum"))),
        },
        LCopair(f1, f2) | RCopair(f1, f2) => match o {
            Outcome::Normal(Value::Inl(a)) => run_exc(f1, m, &Outcome::Normal((**a).clone()))?,
            Outcome::Normal(Value::Inr(b)) => run_exc(f2, m, &Outcome::Normal((**b).clone()))?,
            Outcome::Raised(..) if matches!(t.kind(), LCopair(..)) => run_exc(f2, m, o)?,
            Outcome::Raised(..) => run_exc(f1, m, o)?,
            _ => return Err(SemError::IllTyped(format!("`{t}` applied to a non-sum"))),
        },
        In1(..) => Outcome::Normal(Value::Inl(Box::new(normal(o)?))),
        In2(..) => Outcome::Normal(Value::Inr(Box::new(normal(o)?))),
        Initial(_) => return Err(unreachable_input()),
        Sym(n) => Outcome::Normal(m.apply(n, &normal(o)?)?),
        Var(n) => return Err(SemError::Variable(n.clone())),
        Tag(x) => Outcome::Raised(position(&m.exceptions, x)?, normal(o)?),
        Untag(x) => match o {
            Outcome::Raised(i, v) if *i == position(&m.exceptions, x)? => Outcome::Normal(v.clone()),
            Outcome::Raised(..) => o.clone(),
            Outcome::Normal(_) => return Err(unreachable_input()),
        },
        Downcast(f) => run_exc(f, m, o)?,
        _ => return Err(SemError::NotInterpretable { ctor: ctor(t), kind: ModelKind::Exception }),
    })
}

/// All exception inputs: ordinary values of `src`, then every raised exception.
pub fn exc_inputs(m: &Model, src: &TypeExpr) -> Result<Vec<Outcome>, SemError> {
    let mut v: Vec<Outcome> = m.decode_type(src)?.into_iter().map(Outcome::Normal).collect();
    for (i, (_, ty)) in m.exceptions.iter().enumerate() {
        v.extend(m.decode_type(ty)?.into_iter().map(|x| Outcome::Raised(i, x)));
    }
    Ok(v)
}

fn types(t: &Term, sig: &Signature) -> Result<(TypeExpr, TypeExpr), SemError> {
    sig.typecheck(t).map_err(|e| SemError::IllTyped(e.to_string()))
}

pub fn eval_state(t: &Term, m: &Model, sig: &Signature) -> Result<Table, SemError> {
    let (src, tgt) = types(t, sig)?;
    let states = m.states()?;
    let mut rows = Vec::new();
    for a in m.decode_type(&src)? {
        for s in &states {
            let out = run_state(t, m, &a, s)?;
            rows.push(((a.clone(), s.clone()), out));
        }
    }
    Ok(Table::State { src, tgt, rows })
}

pub fn eval_exc(t: &Term, m: &Model, sig: &Signature) -> Result<Table, SemError> {
    let (src, tgt) = types(t, sig)?;
    let rows = exc_inputs(m, &src)?
        .into_iter()
        .map(|i| {
            let o = run_exc(t, m, &i)?;
            Ok((i, o))
        })
        .collect::<Result<Vec<_>, SemError>>()?;
    Ok(Table::Exc { src, tgt, rows })
}

pub fn eval(t: &Term, m: &Model, sig: &Signature) -> Result<Table, SemError> {
    match m.kind {
        ModelKind::State => eval_state(t, m, sig),
        ModelKind::Exception => eval_exc(t, m, sig),
    }
}

/// First input on which the two sides of `e` disagree, as printed text
/// `(input, lhs output, rhs output)`.
pub fn counterexample(e: &Equation, m: &Model, sig: &Signature) -> Result<Option<(String, String, String)>, SemError> {
    let l = eval(&e.lhs, m, sig)?;
    let r = eval(&e.rhs, m, sig)?;
    let weak = e.kind == EqKind::Weak;
    match (&l, &r) {
        (Table::State { src, tgt, rows: lr }, Table::State { rows: rr, .. }) => {
            for ((inp, lo), (_, ro)) in lr.iter().zip(rr) {
                let differ = if weak { lo.0 != ro.0 } else { lo != ro };
                if differ {
                    let input = format!("{} {}", m.show(&inp.0, src), m.show_state(&inp.1));
                    let show = |o: &(Value, State)| format!("{} {}", m.show(&o.0, tgt), m.show_state(&o.1));
                    return Ok(Some((input, show(lo), show(ro))));
                }
            }
            Ok(None)
        }
        (Table::Exc { src, tgt, rows: lr }, Table::Exc { rows: rr, .. }) => {
            for ((inp, lo), (_, ro)) in lr.iter().zip(rr) {
                if weak && matches!(inp, Outcome::Raised(..)) {
                    continue;
                }
                if lo != ro {
                    return Ok(Some((show_outcome(m, inp, src), show_outcome(m, lo, tgt), show_outcome(m, ro, tgt))));
                }
            }
            Ok(None)
        }
        _ => Err(SemError::Mismatch("tables of different kinds".into())),
    }
}

pub fn show_outcome(m: &Model, o: &Outcome, ty: &TypeExpr) -> String {
    match o {
        Outcome::Normal(v) => m.show(v, ty),
        Outcome::Raised(i, v) => {
            let (n, t) = &m.exceptions[*i];
            format!("raise {n}({})", m.show(v, t))
        }
    }
}

/// Whether `e` holds in `m`: strong equations compare whole tables, weak
/// ones compare results (states) or ordinary inputs only (exceptions).
pub fn holds(e: &Equation, m: &Model, sig: &Signature) -> Result<bool, SemError> {
    Ok(counterexample(e, m, sig)?.is_none())
}

impl Table {
    /// Printed rows `input |-> output`.
    pub fn render(&self, m: &Model) -> Vec<String> {
        match self {
            Table::State { src, tgt, rows } => rows
                .iter()
                .map(|((a, s), (b, s2))| {
                    format!("{} {} |-> {} {}", m.show(a, src), m.show_state(s), m.show(b, tgt), m.show_state(s2))
                })
                .collect(),
            Table::Exc { src, tgt, rows } => rows
                .iter()
                .map(|(i, o)| format!("{} |-> {}", show_outcome(m, i, src), show_outcome(m, o, tgt)))
                .collect(),
        }
    }

    /// Whether two tables over the same inputs satisfy an equation of the
    /// given kind.
    pub fn agrees(&self, other: &Table, kind: EqKind) -> bool {
        let weak = kind == EqKind::Weak;
        match (self, other) {
            (Table::State { rows: l, .. }, Table::State { rows: r, .. }) => {
                l.len() == r.len() && l.iter().zip(r).all(|((_, a), (_, b))| if weak { a.0 == b.0 } else { a == b })
            }
            (Table::Exc { rows: l, .. }, Table::Exc { rows: r, .. }) => {
                l.len() == r.len()
                    && l.iter().zip(r).all(|((i, a), (_, b))| (weak && matches!(i, Outcome::Raised(..))) || a == b)
            }
            _ => false,
        }
    }

    /// The part of the table weak equations compare: results for states,
    /// outcomes on ordinary inputs for exceptions. Two tables over the same
    /// inputs agree weakly iff their weak views are equal.
    pub fn weak_view(&self) -> (TypeExpr, TypeExpr, Vec<Outcome>) {
        match self {
            Table::State { src, tgt, rows } => {
                (src.clone(), tgt.clone(), rows.iter().map(|(_, (b, _))| Outcome::Normal(b.clone())).collect())
            }
            Table::Exc { src, tgt, rows } => (
                src.clone(),
                tgt.clone(),
                rows.iter().filter(|(i, _)| matches!(i, Outcome::Normal(_))).map(|(_, o)| o.clone()).collect(),
            ),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Table::State { rows, .. } => rows.len(),
            Table::Exc { rows, .. } => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
