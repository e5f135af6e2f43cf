use thiserror::Error;

use super::signature::Signature;
use super::term::{Term, TermKind};
use super::types::{Decoration, Name, TheoryId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecorateError {
    #[error("`{ctor}` is not available in {theory}")]
    Unavailable { ctor: &'static str, theory: TheoryId },
    #[error("`{ctor}` in {theory} needs its {which} component at decoration <= {bound}, found {found}")]
    Bound { ctor: &'static str, theory: TheoryId, which: &'static str, bound: Decoration, found: Decoration },
    #[error("unknown variable `{0}`")]
    UnknownVar(Name),
}

fn ctor_name(k: &TermKind) -> &'static str {
    use TermKind::*;
    match k {
        Id(_) => "id",
        Comp(..) => "comp",
        Pair(..) => "pair",
        LPair(..) => "lpair",
        RPair(..) => "rpair",
        Proj1(..) => "pr1",
        Proj2(..) => "pr2",
        Final(_) => "final",
        Copair(..) => "copair",
        LCopair(..) => "lcopair",
        RCopair(..) => "rcopair",
        In1(..) => "in1",
        In2(..) => "in2",
        Initial(_) => "initial",
        Sym(_) => "symbol",
        Var(_) => "variable",
        Lookup(_) => "lkp",
        Update(_) => "upd",
        Tag(_) => "tag",
        Untag(_) => "untag",
        Downcast(_) => "down",
    }
}

/// Upper bounds on the two components of a pair or copair.
fn pair_bounds(k: &TermKind, th: TheoryId) -> Option<(Decoration, Decoration)> {
    use Decoration::*;
    use TermKind::*;
    use TheoryId::*;
    match (k, th) {
        (Pair(..), Com | St) => Some((Accessor, Accessor)),
        (Pair(..), Mon | Exc) => Some((Pure, Pure)),
        (LPair(..), St) => Some((Accessor, Modifier)),
        (RPair(..), St) => Some((Modifier, Accessor)),
        (Copair(..), Com) => Some((Pure, Pure)),
        (Copair(..), St) => Some((Modifier, Modifier)),
        (Copair(..), Mon | Exc) => Some((Accessor, Accessor)),
        (LCopair(..), Exc) => Some((Accessor, Modifier)),
        (RCopair(..), Exc) => Some((Modifier, Accessor)),
        _ => None,
    }
}

/// Minimal decoration of `t` in `theory`; fails when a constructor is not
/// available there or a component exceeds its allowed decoration.
pub fn decorate(t: &Term, theory: TheoryId, sig: &Signature) -> Result<Decoration, DecorateError> {
    use TermKind::*;
    let k = t.kind();
    let unavailable = || DecorateError::Unavailable { ctor: ctor_name(k), theory };
    Ok(match k {
        Id(_) | Proj1(..) | Proj2(..) | Final(_) | In1(..) | In2(..) | Initial(_) | Sym(_) => Decoration::Pure,
        Var(n) => sig.var(n).ok_or_else(|| DecorateError::UnknownVar(n.clone()))?.dec,
        Comp(g, f) => decorate(g, theory, sig)?.max(decorate(f, theory, sig)?),
        Pair(a, b) | LPair(a, b) | RPair(a, b) | Copair(a, b) | LCopair(a, b) | RCopair(a, b) => {
            let (b1, b2) = pair_bounds(k, theory).ok_or_else(unavailable)?;
            let d1 = decorate(a, theory, sig)?;
            let d2 = decorate(b, theory, sig)?;
            for (which, d, bound) in [("first", d1, b1), ("second", d2, b2)] {
                if d > bound {
                    return Err(DecorateError::Bound { ctor: ctor_name(k), theory, which, bound, found: d });
                }
            }
            d1.max(d2)
        }
        Lookup(_) | Update(_) if theory != TheoryId::St => return Err(unavailable()),
        Tag(_) | Untag(_) | Downcast(_) if theory != TheoryId::Exc => return Err(unavailable()),
        Lookup(_) | Tag(_) => Decoration::Accessor,
        Update(_) | Untag(_) => Decoration::Modifier,
        Downcast(f) => decorate(f, theory, sig)?.min(Decoration::Accessor),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_signature, parse_term};

    #[test]
    fn state_decorations() {
        let s = parse_signature("location X : V; pure u : V -> V;").unwrap();
        let d = |txt: &str| decorate(&parse_term(txt, &s).unwrap(), TheoryId::St, &s).unwrap();
        assert_eq!(d("lkp[X] . upd[X]"), Decoration::Modifier);
        assert_eq!(d("u . lkp[X]"), Decoration::Accessor);
        assert_eq!(d("id(V)"), Decoration::Pure);
        assert_eq!(d("lpair(lkp[X] . final(V), upd[X])"), Decoration::Modifier);
        assert_eq!(d("copair(upd[X], upd[X])"), Decoration::Modifier);
    }

    #[test]
    fn availability_per_theory() {
        let s = parse_signature("location X : V;").unwrap();
        let t = parse_term("lpair(id(1), id(1))", &s).unwrap();
        assert!(matches!(decorate(&t, TheoryId::Com, &s), Err(DecorateError::Unavailable { .. })));
        let t = parse_term("pair(lkp[X] . final(V), upd[X])", &s).unwrap();
        assert!(matches!(decorate(&t, TheoryId::St, &s), Err(DecorateError::Bound { .. })));
        let t = parse_term("lpair(upd[X], upd[X])", &s).unwrap();
        assert!(matches!(decorate(&t, TheoryId::St, &s), Err(DecorateError::Bound { which: "first", .. })));
    }

    #[test]
    fn exception_decorations() {
        let s = parse_signature("exception T : V;").unwrap();
        let t = parse_term("down(untag[T])", &s).unwrap();
        assert_eq!(decorate(&t, TheoryId::Exc, &s).unwrap(), Decoration::Accessor);
        let t = parse_term("untag[T] . tag[T]", &s).unwrap();
        assert_eq!(decorate(&t, TheoryId::Exc, &s).unwrap(), Decoration::Modifier);
        assert!(decorate(&t, TheoryId::Mon, &s).is_err());
        let t = parse_term("copair(tag[T], tag[T])", &s).unwrap();
        assert_eq!(decorate(&t, TheoryId::Exc, &s).unwrap(), Decoration::Accessor);
        let t = parse_term("pair(tag[T], tag[T])", &s).unwrap();
        assert!(decorate(&t, TheoryId::Exc, &s).is_err());
    }
}
