//! Decision procedure for the single-location state logic: canonical forms
//! with certificates, reduction of equations to pure ones, and `decide`.

pub mod decide;
pub mod fragment;
pub mod product;
pub(crate) mod prover;
pub(crate) mod reduce;

pub use decide::{decide, find_countermodel, fragment_decoration, Countermodel, DecideOptions, Decider, Decision, Oracle, Verdict};
pub use fragment::{Fragment, StateError};
pub use product::{seq_product, Side};
pub use prover::{AccessorForm, ModifierForm};

use crate::kernel::Derivation;
use crate::syntax::{Decoration, Equation, Signature, Term};
use prover::Prover;

/// Canonical form of an accessor with a derivation of `a == canonical`.
pub fn normalize_accessor(a: &Term, sig: &Signature) -> Result<(AccessorForm, Derivation), StateError> {
    let frag = Fragment::new(sig)?;
    if frag.check_term(a)?.2 == Decoration::Modifier {
        return Err(StateError::NotAccessor(a.to_string()));
    }
    let mut p = Prover::new(&frag, true);
    let (form, fact) = p.normalize_accessor(a);
    Ok((form, p.b.finish(&[fact])))
}

/// Canonical form of a term with a derivation of `f == canonical`.
pub fn normalize_modifier(f: &Term, sig: &Signature) -> Result<(ModifierForm, Derivation), StateError> {
    let frag = Fragment::new(sig)?;
    frag.check_term(f)?;
    let mut p = Prover::new(&frag, true);
    let (form, fact) = p.normalize_modifier(f);
    Ok((form, p.b.finish(&[fact])))
}

/// An equation and the pure equations it is equivalent to.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub equation: Equation,
    /// Reduced pure equations, omitting those that hold by normalization
    /// alone, without duplicates.
    pub pure: Vec<Equation>,
    /// Derives every equation of `pure` from the hypothesis `equation`.
    pub forward: Derivation,
    /// Derives `equation` from the hypotheses `pure`.
    pub backward: Derivation,
}

/// Reduces an equation of the fragment to at most four pure equations,
/// with certificates in both directions.
pub fn reduce_equation(e: &Equation, sig: &Signature) -> Result<Reduction, StateError> {
    let frag = Fragment::new(sig)?;
    frag.check_equation(e)?;
    let mut triv = Prover::new(&frag, false);

    let mut fw = Prover::new(&frag, true);
    let h = fw.b.hyp(e);
    let plan = fw.plan(e)?;
    let raw = fw.plan_equations(&plan);
    let facts = fw.forward(&plan, &h);
    let mut pure: Vec<Equation> = Vec::new();
    let mut trivial = Vec::new();
    let mut kept = Vec::new();
    for (eq, f) in raw.iter().zip(&facts) {
        let t = triv.trivially_equal(eq);
        trivial.push(t);
        if !t && !pure.contains(eq) {
            kept.push(f.clone());
            pure.push(eq.clone());
        }
    }

    let mut bw = Prover::new(&frag, true);
    let plan = bw.plan(e)?;
    let facts: Vec<_> = raw
        .iter()
        .zip(&trivial)
        .map(|(eq, &t)| {
            if t {
                bw.prove_by_nf(eq, false).expect("trivial equations normalize")
            } else {
                bw.b.hyp(eq)
            }
        })
        .collect();
    let f = bw.backward(&plan, &facts);
    Ok(Reduction { equation: e.clone(), pure, forward: fw.b.finish(&kept), backward: bw.b.finish(&[f]) })
}
