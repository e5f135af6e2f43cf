use std::collections::HashMap;

use rayon::prelude::*;

use super::fragment::{Fragment, StateError};
use super::prover::{ModifierForm, Prover, PureVerdict};
use crate::kernel::{Derivation, Fact};
use crate::semantics::{counterexample, enumerate_models, eval, holds, sampling_seed, EnumOptions, Model, ModelKind, Outcome, Table};
use crate::syntax::{Decoration, EqKind, Equation, Signature, Term, TypeExpr};

/// How pure equations are decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    /// Normalization plus the declared pure axioms as ground rewrites.
    Syntactic,
    /// As `Syntactic`, then an exhaustive check over the enumerated models
    /// for what normalization leaves open.
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    pub oracle: Oracle,
    /// Largest carrier size for model enumeration.
    pub max_size: usize,
    pub seed: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { oracle: Oracle::Syntactic, max_size: 3, seed: sampling_seed() }
    }
}

/// A model refuting an equation, with the first distinguishing input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug)]
pub enum Decision {
    /// `certificate` derives the equation in the state theory.
    Equivalent { certificate: Derivation },
    /// `failed` is a pure equation the equation reduces to and that does not
    /// hold; `countermodel` refutes the equation itself.
    NotEquivalent { failed: Option<Equation>, countermodel: Option<Countermodel> },
    /// Pure equations the oracle could neither prove nor refute.
    Unknown { undecided: Vec<Equation> },
}

impl Decision {
    pub fn word(&self) -> &'static str {
        match self {
            Decision::Equivalent { .. } => "equivalent",
            Decision::NotEquivalent { .. } => "not-equivalent",
            Decision::Unknown { .. } => "unknown",
        }
    }
}

/// Verdict without certificate or countermodel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    NotEquivalent { failed: Equation },
    Unknown,
}

enum PureStatus {
    Proven,
    Semantic,
    Refuted,
    Undecided,
}

fn state_models(sig: &Signature, opts: &DecideOptions) -> Vec<Model> {
    let eo = EnumOptions { seed: opts.seed, ..EnumOptions::new(ModelKind::State, opts.max_size) };
    enumerate_models(sig, &eo)
}

fn classify(p: &mut Prover, eq: &Equation, opts: &DecideOptions, models: &mut Option<Vec<Model>>) -> PureStatus {
    match p.prove_pure(eq) {
        PureVerdict::Proven(_) => PureStatus::Proven,
        PureVerdict::Refuted => PureStatus::Refuted,
        PureVerdict::Unknown if opts.oracle == Oracle::Semantic => {
            let sig = p.frag.sig;
            let ms = models.get_or_insert_with(|| state_models(sig, opts));
            if ms.par_iter().all(|m| holds(eq, m, sig).unwrap_or(false)) {
                PureStatus::Semantic
            } else {
                PureStatus::Refuted
            }
        }
        PureVerdict::Unknown => PureStatus::Undecided,
    }
}

/// First enumerated model refuting `e`.
pub fn find_countermodel(e: &Equation, sig: &Signature, models: &[Model]) -> Option<Countermodel> {
    models.par_iter().find_map_first(|m| {
        counterexample(e, m, sig).ok().flatten().map(|(input, lhs, rhs)| Countermodel { model: m.clone(), input, lhs, rhs })
    })
}

/// Decides an equation of the single-location fragment by reduction to
/// pure equations. `Equivalent` carries a certificate; `NotEquivalent` a
/// failed pure equation and, when one exists within `max_size`, a model.
pub fn decide(e: &Equation, sig: &Signature, opts: &DecideOptions) -> Result<Decision, StateError> {
    let frag = Fragment::new(sig)?;
    frag.check_equation(e)?;
    let mut q = Prover::new(&frag, false);
    let plan = q.plan(e)?;
    let raw = q.plan_equations(&plan);
    let mut models = None;
    let mut undecided = Vec::new();
    let mut statuses = Vec::new();
    for eq in &raw {
        match classify(&mut q, eq, opts, &mut models) {
            PureStatus::Refuted => {
                let ms = models.get_or_insert_with(|| state_models(sig, opts));
                let countermodel = find_countermodel(e, sig, ms);
                return Ok(Decision::NotEquivalent { failed: Some(eq.clone()), countermodel });
            }
            PureStatus::Undecided => undecided.push(eq.clone()),
            s => statuses.push(s),
        }
    }
    if !undecided.is_empty() {
        return Ok(Decision::Unknown { undecided });
    }
    Ok(Decision::Equivalent { certificate: certificate(e, &frag)? })
}

/// Backward certificate of `e`, with every reduced pure equation proven by
/// normalization or (when normalization cannot) assumed as a hypothesis.
fn certificate(e: &Equation, frag: &Fragment) -> Result<Derivation, StateError> {
    let mut r = Prover::new(frag, true);
    let plan = r.plan(e)?;
    let raw = r.plan_equations(&plan);
    let facts: Vec<Fact> = raw
        .iter()
        .map(|eq| match r.prove_pure(eq) {
            PureVerdict::Proven(f) => f,
            _ => r.b.hyp(eq),
        })
        .collect();
    let f = r.backward(&plan, &facts);
    Ok(r.b.finish(&[f]))
}

/// Decision procedure with caches, for deciding many equations over one
/// signature: canonical forms are computed once per term and verdicts once
/// per pair of canonical forms.
pub struct Decider<'s> {
    frag: Fragment<'s>,
    prover: Prover<'s>,
    opts: DecideOptions,
    ids: HashMap<Term, usize>,
    forms: HashMap<ModifierForm, usize>,
    verdicts: HashMap<(usize, usize, EqKind), Verdict>,
    models: Option<Vec<Model>>,
    /// Per model, identifiers of the distinct strong tables and weak views.
    strong_ids: Vec<HashMap<Table, u32>>,
    weak_ids: Vec<HashMap<(TypeExpr, TypeExpr, Vec<Outcome>), u32>>,
    /// Per term, its (strong, weak) identifier in every model.
    prints: HashMap<Term, Vec<(u32, u32)>>,
}

impl<'s> Decider<'s> {
    pub fn new(sig: &'s Signature, opts: DecideOptions) -> Result<Self, StateError> {
        let frag = Fragment::new(sig)?;
        let prover = Prover::new(&frag, false);
        Ok(Decider {
            frag,
            prover,
            opts,
            ids: HashMap::new(),
            forms: HashMap::new(),
            verdicts: HashMap::new(),
            models: None,
            strong_ids: Vec::new(),
            weak_ids: Vec::new(),
            prints: HashMap::new(),
        })
    }

    /// Identifier of the canonical form of `t`.
    pub fn form_id(&mut self, t: &Term) -> Result<usize, StateError> {
        if let Some(&i) = self.ids.get(t) {
            return Ok(i);
        }
        self.frag.check_term(t)?;
        let (form, _) = self.prover.normalize_modifier(t);
        let n = self.forms.len();
        let i = *self.forms.entry(form).or_insert(n);
        self.ids.insert(t.clone(), i);
        Ok(i)
    }

    pub fn verdict(&mut self, e: &Equation) -> Result<Verdict, StateError> {
        let key = (self.form_id(&e.lhs)?, self.form_id(&e.rhs)?, e.kind);
        if let Some(v) = self.verdicts.get(&key) {
            return Ok(v.clone());
        }
        let plan = self.prover.plan(e)?;
        let raw = self.prover.plan_equations(&plan);
        let mut v = Verdict::Equivalent;
        for eq in &raw {
            match classify(&mut self.prover, eq, &self.opts, &mut self.models) {
                PureStatus::Refuted => {
                    v = Verdict::NotEquivalent { failed: eq.clone() };
                    break;
                }
                PureStatus::Undecided => v = Verdict::Unknown,
                _ => {}
            }
        }
        self.verdicts.insert(key, v.clone());
        Ok(v)
    }

    /// The pure equations of `reduce_equation`, without certificates.
    pub fn reduce(&mut self, e: &Equation) -> Result<Vec<Equation>, StateError> {
        self.frag.check_equation(e)?;
        let plan = self.prover.plan(e)?;
        let mut pure: Vec<Equation> = Vec::new();
        for eq in self.prover.plan_equations(&plan) {
            if !self.prover.trivially_equal(&eq) && !pure.contains(&eq) {
                pure.push(eq);
            }
        }
        Ok(pure)
    }

    /// Full decision with certificate and countermodel.
    pub fn decide(&mut self, e: &Equation) -> Result<Decision, StateError> {
        match self.verdict(e)? {
            Verdict::Equivalent => Ok(Decision::Equivalent { certificate: certificate(e, &self.frag)? }),
            Verdict::Unknown => decide(e, self.frag.sig, &self.opts),
            Verdict::NotEquivalent { failed } => {
                let sig = self.frag.sig;
                let countermodel = self.countermodel(e)?.map(|i| {
                    let m = &self.models()[i];
                    let (input, lhs, rhs) = counterexample(e, m, sig)
                        .ok()
                        .flatten()
                        .expect("cached tables and evaluation agree");
                    Countermodel { model: m.clone(), input, lhs, rhs }
                });
                Ok(Decision::NotEquivalent { failed: Some(failed), countermodel })
            }
        }
    }

    /// The enumerated state models used for countermodels.
    pub fn models(&mut self) -> &[Model] {
        let (sig, opts) = (self.frag.sig, &self.opts);
        self.models.get_or_insert_with(|| state_models(sig, opts))
    }

    fn prints(&mut self, t: &Term) -> Result<&Vec<(u32, u32)>, StateError> {
        if !self.prints.contains_key(t) {
            let sig = self.frag.sig;
            self.models();
            let ms = self.models.as_ref().expect("models enumerated");
            if self.strong_ids.len() != ms.len() {
                self.strong_ids = vec![HashMap::new(); ms.len()];
                self.weak_ids = vec![HashMap::new(); ms.len()];
            }
            let mut ids = Vec::with_capacity(ms.len());
            for (k, m) in ms.iter().enumerate() {
                let tb = eval(t, m, sig).map_err(|e| StateError::IllTyped(e.to_string()))?;
                let weak = tb.weak_view();
                let n = self.strong_ids[k].len() as u32;
                let s = *self.strong_ids[k].entry(tb).or_insert(n);
                let n = self.weak_ids[k].len() as u32;
                let w = *self.weak_ids[k].entry(weak).or_insert(n);
                ids.push((s, w));
            }
            self.prints.insert(t.clone(), ids);
        }
        Ok(&self.prints[t])
    }

    /// Index (into `models()`) of the first model refuting `e`.
    pub fn countermodel(&mut self, e: &Equation) -> Result<Option<usize>, StateError> {
        self.prints(&e.lhs)?;
        self.prints(&e.rhs)?;
        let (l, r) = (&self.prints[&e.lhs], &self.prints[&e.rhs]);
        let strong = e.kind == EqKind::Strong;
        Ok(l.iter().zip(r).position(|(a, b)| if strong { a.0 != b.0 } else { a.1 != b.1 }))
    }

    pub fn options(&self) -> &DecideOptions {
        &self.opts
    }
}

/// Decoration of `t` in the state theory, for fragment terms.
pub fn fragment_decoration(t: &Term, sig: &Signature) -> Result<Decoration, StateError> {
    Ok(Fragment::new(sig)?.check_term(t)?.2)
}
