use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Decoration, EqKind, Equation, Name, Term, TheoryId, TypeExpr, VarDecl};

/// Either a typing judgment `t : A -> B @ d` or an equation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Judgment {
    Term { term: Term, src: TypeExpr, tgt: TypeExpr, dec: Decoration },
    Eq(Equation),
}

impl Judgment {
    pub fn as_eq(&self) -> Option<&Equation> {
        match self {
            Judgment::Eq(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::Term { term, src, tgt, dec } => write!(f, "{term} : {src} -> {tgt} @ {dec}"),
            Judgment::Eq(e) => write!(f, "{e}"),
        }
    }
}

/// Value bound to a rule metavariable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Binding {
    Term(Term),
    Type(TypeExpr),
    Kind(EqKind),
    Dec(Decoration),
    /// Location, exception or axiom name.
    Name(Name),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Term(t) => write!(f, "{t}"),
            Binding::Type(t) => write!(f, "{t}"),
            Binding::Kind(k) => write!(f, "{}", k.word()),
            Binding::Dec(d) => write!(f, "{d}"),
            Binding::Name(n) => write!(f, "{n}"),
        }
    }
}

pub type Bindings = BTreeMap<String, Binding>;

/// One inference: rule name, metavariable bindings, indices (0-based) of
/// earlier steps used as premises, and the claimed conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    pub bindings: Bindings,
    pub premises: Vec<usize>,
    pub conclusion: Judgment,
}

/// Checkable proof object. `vars` are schematic term variables and `hyps`
/// the equations the derivation may assume through the `hyp` rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub theory: TheoryId,
    pub vars: Vec<VarDecl>,
    pub hyps: Vec<Equation>,
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn new(theory: TheoryId) -> Self {
        Derivation { theory, vars: Vec::new(), hyps: Vec::new(), steps: Vec::new() }
    }

    pub fn conclusions(&self) -> impl Iterator<Item = &Judgment> {
        self.steps.iter().map(|s| &s.conclusion)
    }

    /// True when some step concludes `eq`.
    pub fn proves(&self, eq: &Equation) -> bool {
        self.steps.iter().any(|s| s.conclusion.as_eq() == Some(eq))
    }

    pub fn last_equation(&self) -> Option<&Equation> {
        self.steps.last().and_then(|s| s.conclusion.as_eq())
    }
}
