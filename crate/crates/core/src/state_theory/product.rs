use super::fragment::StateError;
use crate::syntax::{decorate, Decoration, Signature, Term, TheoryId, TypeExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The first argument runs first.
    Left,
    /// The second argument runs first.
    Right,
}

fn types(t: &Term, sig: &Signature) -> Result<(TypeExpr, TypeExpr), StateError> {
    sig.typecheck(t).map_err(|e| StateError::Product(e.to_string()))
}

/// `lpair(g1 . pr1, g2 . pr2) : X1 * X2 -> Y1 * Y2`.
fn lprod(g1: Term, g2: Term, x1: &TypeExpr, x2: &TypeExpr) -> Term {
    Term::lpair(
        Term::comp(g1, Term::proj1(x1.clone(), x2.clone())),
        Term::comp(g2, Term::proj2(x1.clone(), x2.clone())),
    )
}

fn rprod(g1: Term, g2: Term, x1: &TypeExpr, x2: &TypeExpr) -> Term {
    Term::rpair(
        Term::comp(g1, Term::proj1(x1.clone(), x2.clone())),
        Term::comp(g2, Term::proj2(x1.clone(), x2.clone())),
    )
}

/// Sequential product of two modifiers `f1 : A1 -> B1`, `f2 : A2 -> B2`,
/// as a term `A1 * A2 -> B1 * B2` composed of a left and a right product
/// with identities.
pub fn seq_product(f1: &Term, f2: &Term, side: Side, sig: &Signature) -> Result<Term, StateError> {
    let (a1, b1) = types(f1, sig)?;
    let (a2, b2) = types(f2, sig)?;
    for f in [f1, f2] {
        decorate(f, TheoryId::St, sig).map_err(|e| StateError::Product(e.to_string()))?;
    }
    let t = match side {
        Side::Left => Term::comp(
            lprod(Term::id(b1.clone()), f2.clone(), &b1, &a2),
            rprod(f1.clone(), Term::id(a2.clone()), &a1, &a2),
        ),
        Side::Right => Term::comp(
            rprod(f1.clone(), Term::id(b2.clone()), &a1, &b2),
            lprod(Term::id(a1.clone()), f2.clone(), &a1, &a2),
        ),
    };
    let d = decorate(&t, TheoryId::St, sig).map_err(|e| StateError::Product(e.to_string()))?;
    debug_assert!(d <= Decoration::Modifier);
    types(&t, sig)?;
    Ok(t)
}
