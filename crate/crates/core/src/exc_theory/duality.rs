use std::collections::HashMap;

use thiserror::Error;

use crate::kernel::{Binding, Bindings, Derivation, Judgment, Step};
use crate::syntax::{name, Equation, Name, SigError, Signature, Term, TermKind, TypeExpr, VarDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("`{0}` has no dual: downcast is outside the core fragment")]
    Downcast(String),
    #[error("rule `{0}` has no dual")]
    Rule(String),
    #[error("malformed step {step}: {msg}")]
    Step { step: usize, msg: String },
    #[error("dual signature: {0}")]
    Sig(#[from] SigError),
    #[error("bad duality map `{0}`: expected comma-separated `a=b` pairs over distinct names")]
    Map(String),
}

/// Renaming applied by dualization: a set of disjoint swaps between names
/// (locations and exception names, pure symbols, base types). Names not
/// mentioned keep their spelling, so the map is its own inverse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DualityMap {
    swap: HashMap<Name, Name>,
}

impl DualityMap {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(pairs: &[(&str, &str)]) -> Result<Self, DualError> {
        let mut m = DualityMap::default();
        for (a, b) in pairs {
            let bad = || DualError::Map(format!("{a}={b}"));
            if a == b || m.swap.contains_key(*a) || m.swap.contains_key(*b) {
                return Err(bad());
            }
            m.swap.insert(name(a), name(b));
            m.swap.insert(name(b), name(a));
        }
        Ok(m)
    }

    /// Parses `X=T,s=t`.
    pub fn parse(text: &str) -> Result<Self, DualError> {
        let mut pairs = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = part.split_once('=').ok_or_else(|| DualError::Map(part.to_string()))?;
            pairs.push((a.trim(), b.trim()));
        }
        Self::new(&pairs)
    }

    pub fn rename(&self, n: &Name) -> Name {
        self.swap.get(n).cloned().unwrap_or_else(|| n.clone())
    }

    /// Swaps products and coproducts, unit and empty type.
    pub fn ty(&self, t: &TypeExpr) -> TypeExpr {
        match t {
            TypeExpr::Base(n) => TypeExpr::Base(self.rename(n)),
            TypeExpr::Val(n) => TypeExpr::Val(self.rename(n)),
            TypeExpr::Unit => TypeExpr::Empty,
            TypeExpr::Empty => TypeExpr::Unit,
            TypeExpr::Prod(a, b) => TypeExpr::coprod(self.ty(a), self.ty(b)),
            TypeExpr::Coprod(a, b) => TypeExpr::prod(self.ty(a), self.ty(b)),
        }
    }

    /// Reverses composition and swaps every construction with its mirror.
    pub fn term(&self, t: &Term) -> Result<Term, DualError> {
        use TermKind::*;
        Ok(match t.kind() {
            Id(a) => Term::id(self.ty(a)),
            Comp(g, f) => Term::comp(self.term(f)?, self.term(g)?),
            Pair(a, b) => Term::copair(self.term(a)?, self.term(b)?),
            LPair(a, b) => Term::lcopair(self.term(a)?, self.term(b)?),
            RPair(a, b) => Term::rcopair(self.term(a)?, self.term(b)?),
            Copair(a, b) => Term::pair(self.term(a)?, self.term(b)?),
            LCopair(a, b) => Term::lpair(self.term(a)?, self.term(b)?),
            RCopair(a, b) => Term::rpair(self.term(a)?, self.term(b)?),
            Proj1(a, b) => Term::in1(self.ty(a), self.ty(b)),
            Proj2(a, b) => Term::in2(self.ty(a), self.ty(b)),
            In1(a, b) => Term::proj1(self.ty(a), self.ty(b)),
            In2(a, b) => Term::proj2(self.ty(a), self.ty(b)),
            Final(a) => Term::initial(self.ty(a)),
            Initial(a) => Term::final_(self.ty(a)),
            Sym(n) => Term::sym(self.rename(n)),
            Var(n) => Term::var(self.rename(n)),
            Lookup(x) => Term::tag(self.rename(x)),
            Update(x) => Term::untag(self.rename(x)),
            Tag(x) => Term::lookup(self.rename(x)),
            Untag(x) => Term::update(self.rename(x)),
            Downcast(_) => return Err(DualError::Downcast(t.to_string())),
        })
    }

    /// Kinds are preserved: weak equality for states (results only) and for
    /// exceptions (ordinary inputs only) are mirror notions.
    pub fn equation(&self, e: &Equation) -> Result<Equation, DualError> {
        Ok(Equation::new(e.kind, self.term(&e.lhs)?, self.term(&e.rhs)?))
    }

    pub fn judgment(&self, j: &Judgment) -> Result<Judgment, DualError> {
        Ok(match j {
            Judgment::Term { term, src, tgt, dec } => {
                Judgment::Term { term: self.term(term)?, src: self.ty(tgt), tgt: self.ty(src), dec: *dec }
            }
            Judgment::Eq(e) => Judgment::Eq(self.equation(e)?),
        })
    }

    /// Locations become exception names and vice versa; pure symbols and
    /// inhabitants are reversed; axioms keep their names.
    pub fn signature(&self, sig: &Signature) -> Result<Signature, DualError> {
        let mut d = Signature::new();
        for t in &sig.types {
            d.add_type(self.rename(t))?;
        }
        for (x, v) in &sig.exceptions {
            d.add_location(self.rename(x), self.ty(v))?;
        }
        for (x, v) in &sig.locations {
            d.add_exception(self.rename(x), self.ty(v))?;
        }
        for p in &sig.pures {
            d.add_pure(self.rename(&p.name), self.ty(&p.tgt), self.ty(&p.src))?;
        }
        for v in &sig.vars {
            d.add_var(self.var(v))?;
        }
        for a in &sig.axioms {
            d.add_axiom(self.rename(&a.name), self.equation(&a.eq)?)?;
        }
        for (t, h) in &sig.inhabitants {
            d.add_inhabitant(self.ty(t), self.term(h)?)?;
        }
        Ok(d)
    }

    fn var(&self, v: &VarDecl) -> VarDecl {
        VarDecl { name: self.rename(&v.name), src: self.ty(&v.tgt), tgt: self.ty(&v.src), dec: v.dec }
    }

    fn binding(&self, b: &Binding) -> Result<Binding, DualError> {
        Ok(match b {
            Binding::Term(t) => Binding::Term(self.term(t)?),
            Binding::Type(t) => Binding::Type(self.ty(t)),
            Binding::Name(n) => Binding::Name(self.rename(n)),
            Binding::Kind(_) | Binding::Dec(_) => b.clone(),
        })
    }

    /// Transports a derivation to the mirror theory, step by step. Every
    /// rule has a mirror except associativity, whose mirror concludes the
    /// reversed equation and is followed by a symmetry step.
    pub fn derivation(&self, d: &Derivation) -> Result<Derivation, DualError> {
        let mut out = Derivation::new(d.theory.dual());
        out.vars = d.vars.iter().map(|v| self.var(v)).collect();
        out.hyps = d.hyps.iter().map(|e| self.equation(e)).collect::<Result<_, _>>()?;
        let mut index = Vec::with_capacity(d.steps.len());
        for (i, s) in d.steps.iter().enumerate() {
            let bad = |msg: &str| DualError::Step { step: i + 1, msg: msg.to_string() };
            let (rule, renames, swap) = dual_rule(&s.rule).ok_or_else(|| DualError::Rule(s.rule.clone()))?;
            let mut bindings = Bindings::new();
            for (k, v) in &s.bindings {
                let k = renames.iter().find(|(a, _)| a == k).map_or(k.as_str(), |(_, b)| b);
                bindings.insert(k.to_string(), self.binding(v)?);
            }
            let mut premises = Vec::with_capacity(s.premises.len());
            for &p in &s.premises {
                premises.push(*index.get(p).ok_or_else(|| bad("premise does not precede the step"))?);
            }
            if swap {
                premises.reverse();
            }
            let conclusion = self.judgment(&s.conclusion)?;
            if s.rule == "assoc" {
                let Judgment::Eq(e) = &conclusion else { return Err(bad("associativity concludes an equation")) };
                let flipped = e.flipped();
                out.steps.push(Step { rule, bindings, premises, conclusion: Judgment::Eq(flipped.clone()) });
                let sym = Bindings::from([
                    ("f".to_string(), Binding::Term(flipped.lhs.clone())),
                    ("g".to_string(), Binding::Term(flipped.rhs.clone())),
                    ("k".to_string(), Binding::Kind(flipped.kind)),
                ]);
                let prev = out.steps.len() - 1;
                out.steps.push(Step { rule: "sym".into(), bindings: sym, premises: vec![prev], conclusion });
            } else {
                out.steps.push(Step { rule, bindings, premises, conclusion });
            }
            index.push(out.steps.len() - 1);
        }
        Ok(out)
    }
}

type Renames = &'static [(&'static str, &'static str)];

/// Mirror rule name, metavariable renaming and whether the two premises
/// trade places.
fn dual_rule(rule: &str) -> Option<(String, Renames, bool)> {
    const NONE: Renames = &[];
    const PAIRS: [(&str, &str); 5] =
        [("l-pair", "l-copair"), ("r-pair", "r-copair"), ("pair", "copair"), ("prod.", "coprod."), ("lookupdate-", "untag-tag-")];
    let simple = |n: &str| Some((n.to_string(), NONE, false));
    match rule {
        "refl" | "sym" | "trans" | "symbol" | "variable" | "id" | "up-1" | "up-2" | "strong-to-weak"
        | "weak-to-strong" | "hyp" | "axiom" | "effect" | "local-global" => simple(rule),
        "repl" => Some(("subs".into(), &[("f1", "g1"), ("f2", "g2"), ("g", "f")], false)),
        "subs" => Some(("repl".into(), &[("g1", "f1"), ("g2", "f2"), ("f", "g")], false)),
        "comp" => Some(("comp".into(), &[("f", "g"), ("g", "f"), ("d1", "d2"), ("d2", "d1")], true)),
        "id-source" => simple("id-target"),
        "id-target" => simple("id-source"),
        "assoc" => Some(("assoc".into(), &[("f", "h"), ("h", "f")], false)),
        "final" => simple("initial"),
        "initial" => simple("final"),
        "final-u" => Some(("initial-u".into(), &[("f", "g")], false)),
        "initial-u" => Some(("final-u".into(), &[("g", "f")], false)),
        "lookup" => Some(("tag".into(), &[("X", "T")], false)),
        "tag" => Some(("lookup".into(), &[("T", "X")], false)),
        "update" => Some(("untag".into(), &[("X", "T")], false)),
        "untag" => Some(("update".into(), &[("T", "X")], false)),
        "lookupdate-same" => Some(("untag-tag-same".into(), &[("X", "T")], false)),
        "untag-tag-same" => Some(("lookupdate-same".into(), &[("T", "X")], false)),
        "lookupdate-other" => Some(("untag-tag-other".into(), &[("X", "T"), ("Y", "R")], false)),
        "untag-tag-other" => Some(("lookupdate-other".into(), &[("T", "X"), ("R", "Y")], false)),
        _ => {
            for (a, b) in PAIRS {
                for (from, to) in [(a, b), (b, a)] {
                    if let Some(rest) = rule.strip_prefix(from) {
                        if rest.is_empty() || rest.starts_with('-') || from.ends_with('.') {
                            return Some((format!("{to}{rest}"), NONE, false));
                        }
                    }
                }
            }
            None
        }
    }
}
