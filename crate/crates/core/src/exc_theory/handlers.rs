use thiserror::Error;

use crate::syntax::{decorate, DecorateError, Decoration, Name, Signature, Term, TheoryId, TypeError, TypeExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HandlerError {
    #[error("unknown exception name `{0}`")]
    UnknownException(Name),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Decorate(#[from] DecorateError),
    #[error("the {0} of a try/catch must be a propagator (decoration <= 1)")]
    Catcher(&'static str),
    #[error("handler type mismatch: {0}")]
    Mismatch(String),
}

/// Body, handled exception name and handler of a `try(f) catch[T](g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerSpec {
    pub body: Term,
    pub exn: Name,
    pub handler: Term,
}

/// The private catchers and the public propagator of a try/catch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerTerms {
    pub catch: Term,
    pub try_: Term,
    pub public: Term,
}

/// `throw(B, T) = initial(B) . tag[T] : V_T -> B`.
pub fn throw(sig: &Signature, b: TypeExpr, t: &Name) -> Result<Term, HandlerError> {
    if !sig.is_exception(t) {
        return Err(HandlerError::UnknownException(t.clone()));
    }
    let b = sig.resolve(&b)?;
    Ok(Term::comp(Term::initial(b), Term::tag(t.clone())))
}

/// Wraps a term in the unsafe downcast.
pub fn downcast(f: Term) -> Term {
    Term::downcast(f)
}

/// Builds the three handler terms.
///
/// The coproduct `B + 0` used by the left copair is made explicit with
/// `in1(B, 0)`, and likewise for `V_T + 0` in the catcher, so that every
/// term stays syntax-directed.
pub fn try_catch(sig: &Signature, f: &Term, t: &Name, g: &Term) -> Result<HandlerTerms, HandlerError> {
    let vt = sig.exception_type(t).cloned().ok_or_else(|| HandlerError::UnknownException(t.clone()))?;
    let (_, b) = sig.typecheck(f)?;
    let (gs, gt) = sig.typecheck(g)?;
    if gs != vt || gt != b {
        return Err(HandlerError::Mismatch(format!(
            "handler has type {gs} -> {gt}, expected {vt} -> {b}"
        )));
    }
    if decorate(f, TheoryId::Exc, sig)? > Decoration::Accessor {
        return Err(HandlerError::Catcher("body"));
    }
    if decorate(g, TheoryId::Exc, sig)? > Decoration::Accessor {
        return Err(HandlerError::Catcher("handler"));
    }
    let catch = Term::comp(
        Term::copair(g.clone(), Term::initial(b.clone())),
        Term::comp(Term::in1(vt, TypeExpr::Empty), Term::untag(t.clone())),
    );
    let try_ = Term::comp(
        Term::lcopair(Term::id(b.clone()), catch.clone()),
        Term::comp(Term::in1(b, TypeExpr::Empty), f.clone()),
    );
    let public = Term::downcast(try_.clone());
    Ok(HandlerTerms { catch, try_, public })
}

/// Same as [`try_catch`] from a [`HandlerSpec`].
pub fn build(sig: &Signature, h: &HandlerSpec) -> Result<HandlerTerms, HandlerError> {
    try_catch(sig, &h.body, &h.exn, &h.handler)
}
