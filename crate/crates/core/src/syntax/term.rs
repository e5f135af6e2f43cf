use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::types::{Name, TypeExpr};

/// Morphism syntax. Cheap to clone: children are shared behind an `Arc`.
#[derive(Clone)]
pub struct Term(Arc<TermKind>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    Id(TypeExpr),
    /// `Comp(g, f)` is `g ∘ f`: `f` runs first.
    Comp(Term, Term),
    Pair(Term, Term),
    LPair(Term, Term),
    RPair(Term, Term),
    Proj1(TypeExpr, TypeExpr),
    Proj2(TypeExpr, TypeExpr),
    Final(TypeExpr),
    Copair(Term, Term),
    LCopair(Term, Term),
    RCopair(Term, Term),
    In1(TypeExpr, TypeExpr),
    In2(TypeExpr, TypeExpr),
    Initial(TypeExpr),
    Sym(Name),
    /// Schematic variable declared by a derivation file.
    Var(Name),
    Lookup(Name),
    Update(Name),
    Tag(Name),
    Untag(Name),
    Downcast(Term),
}

impl Term {
    pub fn new(kind: TermKind) -> Self {
        Term(Arc::new(kind))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0
    }

    pub fn id(t: TypeExpr) -> Self {
        Term::new(TermKind::Id(t))
    }

    pub fn comp(g: Term, f: Term) -> Self {
        Term::new(TermKind::Comp(g, f))
    }

    pub fn pair(f1: Term, f2: Term) -> Self {
        Term::new(TermKind::Pair(f1, f2))
    }

    pub fn lpair(f1: Term, f2: Term) -> Self {
        Term::new(TermKind::LPair(f1, f2))
    }

    pub fn rpair(f1: Term, f2: Term) -> Self {
        Term::new(TermKind::RPair(f1, f2))
    }

    pub fn proj1(a: TypeExpr, b: TypeExpr) -> Self {
        Term::new(TermKind::Proj1(a, b))
    }

    pub fn proj2(a: TypeExpr, b: TypeExpr) -> Self {
        Term::new(TermKind::Proj2(a, b))
    }

    pub fn final_(t: TypeExpr) -> Self {
        Term::new(TermKind::Final(t))
    }

    pub fn copair(f1: Term, f2: Term) -> Self {
        Term::new(TermKind::Copair(f1, f2))
    }

    pub fn lcopair(f1: Term, f2: Term) -> Self {
        Term::new(TermKind::LCopair(f1, f2))
    }

    pub fn rcopair(f1: Term, f2: Term) -> Self {
        Term::new(TermKind::RCopair(f1, f2))
    }

    pub fn in1(a: TypeExpr, b: TypeExpr) -> Self {
        Term::new(TermKind::In1(a, b))
    }

    pub fn in2(a: TypeExpr, b: TypeExpr) -> Self {
        Term::new(TermKind::In2(a, b))
    }

    pub fn initial(t: TypeExpr) -> Self {
        Term::new(TermKind::Initial(t))
    }

    pub fn sym(n: Name) -> Self {
        Term::new(TermKind::Sym(n))
    }

    pub fn var(n: Name) -> Self {
        Term::new(TermKind::Var(n))
    }

    pub fn lookup(x: Name) -> Self {
        Term::new(TermKind::Lookup(x))
    }

    pub fn update(x: Name) -> Self {
        Term::new(TermKind::Update(x))
    }

    pub fn tag(t: Name) -> Self {
        Term::new(TermKind::Tag(t))
    }

    pub fn untag(t: Name) -> Self {
        Term::new(TermKind::Untag(t))
    }

    pub fn downcast(f: Term) -> Self {
        Term::new(TermKind::Downcast(f))
    }

    /// Right-nested composite of `atoms`; `atoms[0]` is applied last.
    /// Returns `None` for an empty slice.
    pub fn chain(atoms: &[Term]) -> Option<Term> {
        let mut it = atoms.iter().rev();
        let mut acc = it.next()?.clone();
        for a in it {
            acc = Term::comp(a.clone(), acc);
        }
        Some(acc)
    }

    pub fn is_id(&self) -> bool {
        matches!(self.kind(), TermKind::Id(_))
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Term> {
        use TermKind::*;
        match self.kind() {
            Comp(a, b) | Pair(a, b) | LPair(a, b) | RPair(a, b) | Copair(a, b) | LCopair(a, b)
            | RCopair(a, b) => vec![a, b],
            Downcast(a) => vec![a],
            _ => vec![],
        }
    }

    /// Count nodes satisfying `pred`.
    pub fn count(&self, pred: &dyn Fn(&TermKind) -> bool) -> usize {
        let here = usize::from(pred(self.kind()));
        here + self.children().iter().map(|c| c.count(pred)).sum::<usize>()
    }

    /// Rebuild the term with every type annotation rewritten by `ft`.
    pub fn map_types(&self, ft: &dyn Fn(&TypeExpr) -> TypeExpr) -> Term {
        use TermKind::*;
        let k = match self.kind() {
            Id(t) => Id(ft(t)),
            Comp(a, b) => Comp(a.map_types(ft), b.map_types(ft)),
            Pair(a, b) => Pair(a.map_types(ft), b.map_types(ft)),
            LPair(a, b) => LPair(a.map_types(ft), b.map_types(ft)),
            RPair(a, b) => RPair(a.map_types(ft), b.map_types(ft)),
            Proj1(a, b) => Proj1(ft(a), ft(b)),
            Proj2(a, b) => Proj2(ft(a), ft(b)),
            Final(t) => Final(ft(t)),
            Copair(a, b) => Copair(a.map_types(ft), b.map_types(ft)),
            LCopair(a, b) => LCopair(a.map_types(ft), b.map_types(ft)),
            RCopair(a, b) => RCopair(a.map_types(ft), b.map_types(ft)),
            In1(a, b) => In1(ft(a), ft(b)),
            In2(a, b) => In2(ft(a), ft(b)),
            Initial(t) => Initial(ft(t)),
            Downcast(a) => Downcast(a.map_types(ft)),
            other => other.clone(),
        };
        Term::new(k)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TermKind::*;
        match self.kind() {
            Id(t) => write!(f, "id({t})"),
            Comp(g, h) => {
                if matches!(g.kind(), Comp(..)) {
                    write!(f, "({g})")?;
                } else {
                    write!(f, "{g}")?;
                }
                write!(f, " . {h}")
            }
            Pair(a, b) => write!(f, "pair({a}, {b})"),
            LPair(a, b) => write!(f, "lpair({a}, {b})"),
            RPair(a, b) => write!(f, "rpair({a}, {b})"),
            Proj1(a, b) => write!(f, "pr1({a}, {b})"),
            Proj2(a, b) => write!(f, "pr2({a}, {b})"),
            Final(t) => write!(f, "final({t})"),
            Copair(a, b) => write!(f, "copair({a}, {b})"),
            LCopair(a, b) => write!(f, "lcopair({a}, {b})"),
            RCopair(a, b) => write!(f, "rcopair({a}, {b})"),
            In1(a, b) => write!(f, "in1({a}, {b})"),
            In2(a, b) => write!(f, "in2({a}, {b})"),
            Initial(t) => write!(f, "initial({t})"),
            Sym(n) | Var(n) => write!(f, "{n}"),
            Lookup(x) => write!(f, "lkp[{x}]"),
            Update(x) => write!(f, "upd[{x}]"),
            Tag(x) => write!(f, "tag[{x}]"),
            Untag(x) => write!(f, "untag[{x}]"),
            Downcast(a) => write!(f, "down({a})"),
        }
    }
}

/// Strong (`==`) or weak (`~~`) equation kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqKind {
    Strong,
    Weak,
}

impl EqKind {
    pub fn symbol(self) -> &'static str {
        match self {
            EqKind::Strong => "==",
            EqKind::Weak => "~~",
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            EqKind::Strong => "strong",
            EqKind::Weak => "weak",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub kind: EqKind,
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(kind: EqKind, lhs: Term, rhs: Term) -> Self {
        Equation { kind, lhs, rhs }
    }

    pub fn strong(lhs: Term, rhs: Term) -> Self {
        Equation::new(EqKind::Strong, lhs, rhs)
    }

    pub fn weak(lhs: Term, rhs: Term) -> Self {
        Equation::new(EqKind::Weak, lhs, rhs)
    }

    pub fn flipped(&self) -> Self {
        Equation::new(self.kind, self.rhs.clone(), self.lhs.clone())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.kind.symbol(), self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::types::name;

    #[test]
    fn composition_prints_right_nested_without_parens() {
        let x = name("X");
        let t = Term::comp(
            Term::lookup(x.clone()),
            Term::comp(Term::update(x.clone()), Term::lookup(x.clone())),
        );
        assert_eq!(t.to_string(), "lkp[X] . upd[X] . lkp[X]");
        let u = Term::comp(Term::comp(Term::lookup(x.clone()), Term::update(x.clone())), Term::lookup(x));
        assert_eq!(u.to_string(), "(lkp[X] . upd[X]) . lkp[X]");
    }

    #[test]
    fn chain_builds_right_nested() {
        let x = name("X");
        let atoms = vec![Term::lookup(x.clone()), Term::update(x.clone()), Term::lookup(x.clone())];
        let t = Term::chain(&atoms).unwrap();
        assert_eq!(t.to_string(), "lkp[X] . upd[X] . lkp[X]");
        assert!(Term::chain(&[]).is_none());
        assert_eq!(t.size(), 5);
    }
}
