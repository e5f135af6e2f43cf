use thiserror::Error;

use crate::syntax::{decorate, Decoration, Equation, Name, Signature, Term, TermKind, TheoryId, TypeExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("`{term}` is outside the single-location fragment: {reason}")]
    Fragment { term: String, reason: String },
    #[error("the decision procedure needs exactly one location, the signature declares {0}")]
    MultiLocation(usize),
    #[error("ill-typed: {0}")]
    IllTyped(String),
    #[error("`{0}` is a modifier, an accessor was expected")]
    NotAccessor(String),
    #[error("no inhabitant declared for type `{0}`")]
    MissingInhabitant(TypeExpr),
    #[error("sequential product: {0}")]
    Product(String),
}

impl StateError {
    /// Errors that mean "input outside the supported fragment" rather than
    /// "malformed input".
    pub fn is_fragment_violation(&self) -> bool {
        matches!(self, StateError::Fragment { .. } | StateError::MultiLocation(_) | StateError::MissingInhabitant(_))
    }
}

/// The single-location, product-free fragment of the state logic over a
/// signature: types are `1` or base types, terms are built from identities,
/// composition, final maps, pure symbols, `lkp` and `upd`.
#[derive(Clone, Debug)]
pub struct Fragment<'s> {
    pub sig: &'s Signature,
    pub loc: Name,
    pub val: TypeExpr,
}

fn simple_type(t: &TypeExpr) -> bool {
    matches!(t, TypeExpr::Unit | TypeExpr::Base(_))
}

impl<'s> Fragment<'s> {
    pub fn new(sig: &'s Signature) -> Result<Self, StateError> {
        if sig.locations.len() != 1 {
            return Err(StateError::MultiLocation(sig.locations.len()));
        }
        let (loc, val) = sig.locations[0].clone();
        let val = sig.resolve(&val).map_err(|e| StateError::IllTyped(e.to_string()))?;
        if !simple_type(&val) {
            return Err(StateError::Fragment {
                term: format!("lkp[{loc}]"),
                reason: format!("value type `{val}` is not a base type"),
            });
        }
        Ok(Fragment { sig, loc, val })
    }

    fn violation(t: &Term, reason: impl Into<String>) -> StateError {
        StateError::Fragment { term: t.to_string(), reason: reason.into() }
    }

    fn check_node(&self, t: &Term, root: &Term) -> Result<(), StateError> {
        let bad_type = |ty: &TypeExpr| Self::violation(root, format!("type `{ty}` is not 1 or a base type"));
        match t.kind() {
            TermKind::Id(ty) | TermKind::Final(ty) => {
                if !simple_type(ty) {
                    return Err(bad_type(ty));
                }
            }
            TermKind::Comp(g, f) => {
                self.check_node(g, root)?;
                self.check_node(f, root)?;
            }
            TermKind::Sym(n) => {
                let p = self.sig.pure_sym(n).ok_or_else(|| Self::violation(root, format!("unknown symbol `{n}`")))?;
                for ty in [&p.src, &p.tgt] {
                    if !simple_type(ty) {
                        return Err(bad_type(ty));
                    }
                }
            }
            TermKind::Lookup(x) | TermKind::Update(x) => {
                if *x != self.loc {
                    return Err(Self::violation(root, format!("unknown location `{x}`")));
                }
            }
            k => {
                let what = match k {
                    TermKind::Var(_) => "schematic variables",
                    TermKind::Tag(_) | TermKind::Untag(_) | TermKind::Downcast(_) => "exception operations",
                    _ => "products, coproducts and the empty type",
                };
                return Err(Self::violation(root, format!("{what} are not allowed")));
            }
        }
        Ok(())
    }

    /// Checks that `t` lies in the fragment; returns its types and decoration.
    pub fn check_term(&self, t: &Term) -> Result<(TypeExpr, TypeExpr, Decoration), StateError> {
        self.check_node(t, t)?;
        let (a, b) = self.sig.typecheck(t).map_err(|e| StateError::IllTyped(e.to_string()))?;
        let d = decorate(t, TheoryId::St, self.sig).map_err(|e| StateError::IllTyped(e.to_string()))?;
        Ok((a, b, d))
    }

    pub fn check_equation(&self, e: &Equation) -> Result<(Decoration, Decoration), StateError> {
        let (a1, b1, d1) = self.check_term(&e.lhs)?;
        let (a2, b2, d2) = self.check_term(&e.rhs)?;
        if a1 != a2 || b1 != b2 {
            return Err(StateError::IllTyped(format!(
                "sides of `{e}` have different types `{a1} -> {b1}` and `{a2} -> {b2}`"
            )));
        }
        Ok((d1, d2))
    }

    pub fn inhabitant(&self, ty: &TypeExpr) -> Result<Term, StateError> {
        self.sig.inhabitant(ty).ok_or_else(|| StateError::MissingInhabitant(ty.clone()))
    }

    pub fn lkp(&self) -> Term {
        Term::lookup(self.loc.clone())
    }

    pub fn upd(&self) -> Term {
        Term::update(self.loc.clone())
    }
}
