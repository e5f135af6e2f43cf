//! Exceptions: throw and try/catch as terms, downcast, and the duality
//! with states that yields the decision procedure for the core.

pub mod decide;
pub mod duality;
pub mod handlers;

pub use decide::{decide_exc_core, exception_models, ExcDecider, ExcError};
pub use duality::{DualError, DualityMap};
pub use handlers::{build, downcast, throw, try_catch, HandlerError, HandlerSpec, HandlerTerms};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_derivation;
    use crate::state_theory::{normalize_modifier, reduce_equation, DecideOptions, Decision};
    use crate::syntax::{parse_equation, parse_signature, parse_term, TheoryId};

    const ST: &str = "location X : V; pure c : 1 -> V; pure s : V -> V; inhabit V = c;";
    const EXC: &str = "exception X : V; pure c : V -> 0; pure s : V -> V; inhabit V = c;";

    #[test]
    fn axioms_transport() {
        let st = parse_signature(ST).unwrap();
        let exc = parse_signature(EXC).unwrap();
        let m = DualityMap::identity();
        let e = parse_equation("lkp[X] . upd[X] ~~ id(V)", &st).unwrap();
        assert_eq!(m.equation(&e).unwrap(), parse_equation("untag[X] . tag[X] ~~ id(V)", &exc).unwrap());
        assert_eq!(m.signature(&st).unwrap().to_string(), exc.to_string());
        assert_eq!(m.signature(&exc).unwrap().to_string(), st.to_string());
    }

    #[test]
    fn renaming_is_an_involution() {
        let st = parse_signature("location X : V; pure s : V -> V;").unwrap();
        let m = DualityMap::parse("X=T, s=r, V=W").unwrap();
        let exc = m.signature(&st).unwrap();
        assert_eq!(exc.to_string(), "type W;\nexception T : W;\npure r : W -> W;\n");
        let e = parse_equation("s . lkp[X] . upd[X] == lkp[X] . upd[X]", &st).unwrap();
        let d = m.equation(&e).unwrap();
        assert_eq!(d, parse_equation("(untag[T] . tag[T]) . r == untag[T] . tag[T]", &exc).unwrap());
        assert_eq!(m.equation(&d).unwrap(), e);
        assert!(DualityMap::parse("X=X").is_err());
        assert!(DualityMap::parse("X").is_err());
    }

    #[test]
    fn downcast_has_no_dual() {
        let exc = parse_signature(EXC).unwrap();
        let t = parse_term("down(untag[X])", &exc).unwrap();
        assert!(matches!(DualityMap::identity().term(&t), Err(DualError::Downcast(_))));
    }

    #[test]
    fn certificates_transport() {
        let st = parse_signature(ST).unwrap();
        let m = DualityMap::identity();
        let exc = m.signature(&st).unwrap();
        let f = parse_term("upd[X] . s . lkp[X] . upd[X]", &st).unwrap();
        let (_, d) = normalize_modifier(&f, &st).unwrap();
        let dd = m.derivation(&d).unwrap();
        assert_eq!(dd.theory, TheoryId::Exc);
        check_derivation(&dd, &exc).unwrap_or_else(|e| panic!("{e}"));
        for t in ["upd[X] == final(V)", "s . lkp[X] == c", "upd[X] . lkp[X] . upd[X] == upd[X]"] {
            let r = reduce_equation(&parse_equation(t, &st).unwrap(), &st).unwrap();
            for d in [&r.forward, &r.backward] {
                let dd = m.derivation(d).unwrap();
                let out = check_derivation(&dd, &exc).unwrap_or_else(|e| panic!("{t}: {e}"));
                let want = d.last_equation().map(|e| m.equation(e).unwrap());
                assert_eq!(out.last().and_then(|j| j.as_eq()).cloned(), want);
            }
        }
    }

    #[test]
    fn decides_the_core() {
        let exc = parse_signature(EXC).unwrap();
        let m = DualityMap::identity();
        let opts = DecideOptions::default();
        let e = parse_equation("tag[X] . untag[X] == id(0)", &exc).unwrap();
        match decide_exc_core(&e, &exc, &m, &opts).unwrap() {
            Decision::Equivalent { certificate } => {
                assert!(certificate.proves(&e));
                check_derivation(&certificate, &exc).unwrap();
            }
            d => panic!("{d:?}"),
        }
        let e = parse_equation("untag[X] . tag[X] ~~ id(V)", &exc).unwrap();
        assert!(matches!(decide_exc_core(&e, &exc, &m, &opts).unwrap(), Decision::Equivalent { .. }));
        let e = parse_equation("untag[X] . tag[X] == id(V)", &exc).unwrap();
        match decide_exc_core(&e, &exc, &m, &opts).unwrap() {
            Decision::NotEquivalent { countermodel: Some(cm), .. } => {
                assert_eq!(cm.model.kind, crate::semantics::ModelKind::State)
            }
            d => panic!("{d:?}"),
        }
    }

    #[test]
    fn exception_countermodels_are_preferred() {
        let exc = parse_signature("exception X : V; pure s : V -> V;").unwrap();
        let e = parse_equation("s . untag[X] == untag[X]", &exc).unwrap();
        let d = decide_exc_core(&e, &exc, &DualityMap::identity(), &DecideOptions::default()).unwrap();
        match d {
            Decision::NotEquivalent { countermodel: Some(cm), .. } => {
                assert_eq!(cm.model.kind, crate::semantics::ModelKind::Exception)
            }
            d => panic!("{d:?}"),
        }
    }
}
