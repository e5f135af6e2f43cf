use thiserror::Error;

use super::duality::{DualError, DualityMap};
use crate::semantics::{enumerate_models, EnumOptions, Model, ModelKind};
use crate::state_theory::{self, find_countermodel, DecideOptions, Decider, Decision, StateError, Verdict};
use crate::syntax::{Equation, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExcError {
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error("{0}")]
    State(#[from] StateError),
}

impl ExcError {
    pub fn is_fragment_violation(&self) -> bool {
        match self {
            ExcError::Dual(DualError::Downcast(_)) => true,
            ExcError::State(e) => e.is_fragment_violation(),
            _ => false,
        }
    }
}

/// Exception models of `sig` with carriers up to `max_size`.
pub fn exception_models(sig: &Signature, opts: &DecideOptions) -> Vec<Model> {
    let eo = EnumOptions { seed: opts.seed, ..EnumOptions::new(ModelKind::Exception, opts.max_size) };
    enumerate_models(sig, &eo)
}

/// Decides an equation of the single-exception-name core by deciding its
/// dual in the state theory. The certificate and the failed pure equation
/// are transported back. A countermodel is searched among the exception
/// models of `sig` first; sets are not self-dual (a co-inhabitant `V -> 0`
/// forces `V` empty), so when none exists the state countermodel of the
/// dual equation is returned instead, recognizable by its model kind.
pub fn decide_exc_core(e: &Equation, sig: &Signature, map: &DualityMap, opts: &DecideOptions) -> Result<Decision, ExcError> {
    let dsig = map.signature(sig)?;
    let de = map.equation(e)?;
    Ok(match state_theory::decide(&de, &dsig, opts)? {
        Decision::Equivalent { certificate } => Decision::Equivalent { certificate: map.derivation(&certificate)? },
        Decision::NotEquivalent { failed, countermodel: dual } => {
            let failed = failed.map(|f| map.equation(&f)).transpose()?;
            let countermodel = find_countermodel(e, sig, &exception_models(sig, opts)).or(dual);
            Decision::NotEquivalent { failed, countermodel }
        }
        Decision::Unknown { undecided } => Decision::Unknown {
            undecided: undecided.iter().map(|u| map.equation(u)).collect::<Result<_, _>>()?,
        },
    })
}

/// Cached verdicts for the exception core, backed by a state [`Decider`]
/// over the dual signature.
pub struct ExcDecider {
    map: DualityMap,
    dual: Signature,
}

impl ExcDecider {
    pub fn new(sig: &Signature, map: DualityMap) -> Result<Self, ExcError> {
        let dual = map.signature(sig)?;
        Ok(ExcDecider { map, dual })
    }

    pub fn dual_signature(&self) -> &Signature {
        &self.dual
    }

    /// A state decider over the dual signature; its verdict on the dual of
    /// an equation is the verdict on the equation.
    pub fn state_decider(&self, opts: DecideOptions) -> Result<Decider<'_>, ExcError> {
        Ok(Decider::new(&self.dual, opts)?)
    }

    pub fn verdict(&self, d: &mut Decider<'_>, e: &Equation) -> Result<Verdict, ExcError> {
        Ok(match d.verdict(&self.map.equation(e)?)? {
            Verdict::NotEquivalent { failed } => Verdict::NotEquivalent { failed: self.map.equation(&failed)? },
            v => v,
        })
    }
}
