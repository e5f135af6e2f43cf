use std::collections::HashMap;

use thiserror::Error;

use super::judgment::{Binding, Bindings, Derivation, Judgment};
use super::schema::{find_rule, DecPat, JudgPat, KindPat, PremisePat, RuleSchema, SideCond, Sort, TmPat, TyPat};
use crate::syntax::{
    decorate, DecorateError, Decoration, EqKind, Equation, Name, SigError, Signature, Term, TermKind, TheoryId, TypeError,
    TypeExpr,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("unknown rule `{rule}` in {theory}")]
    UnknownRule { rule: String, theory: TheoryId },
    #[error("missing binding for `{meta}`")]
    MissingBinding { meta: String },
    #[error("unexpected binding `{meta}`")]
    ExtraBinding { meta: String },
    #[error("`{meta}` must be bound to a {expected}")]
    SortMismatch { meta: String, expected: &'static str },
    #[error("`{what}` is ill-typed: {err}")]
    IllTyped { what: String, err: TypeError },
    #[error("`{what}`: {err}")]
    Decorate { what: String, err: DecorateError },
    #[error("{rule} requires `{meta}` at decoration <= {bound}, found {found}")]
    DecorationBound { rule: String, meta: String, bound: Decoration, found: Decoration },
    #[error("side condition of {rule} failed: {msg}")]
    SideCondition { rule: String, msg: String },
    #[error("{rule} expects {expected} premises, got {found}")]
    PremiseCount { rule: String, expected: usize, found: usize },
    #[error("premise {index} should be `{expected}`, found `{found}`")]
    PremiseMismatch { index: usize, expected: String, found: String },
    #[error("non-parallel equation `{eq}`: {err}")]
    NonParallel { eq: String, err: TypeError },
    #[error("conclusion should be `{expected}`, found `{found}`")]
    ConclusionMismatch { expected: String, found: String },
    #[error("premise index {index} does not precede the step")]
    PremiseIndex { index: usize },
    #[error("invalid derivation header: {0}")]
    Header(String),
}

/// Failure of a derivation, located at a 1-based step (0 for the header).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step} ({rule}): {error}")]
pub struct CheckError {
    pub step: usize,
    pub rule: String,
    pub error: KernelError,
}

/// Checking context: signature (with the derivation's variables), theory and
/// the hypotheses usable through `hyp`.
pub struct Ctx<'a> {
    pub sig: &'a Signature,
    pub theory: TheoryId,
    pub hyps: &'a [Equation],
}

struct Env<'a> {
    ctx: &'a Ctx<'a>,
    rule: &'a RuleSchema,
    b: &'a Bindings,
    /// Source/target of every term metavariable.
    types: HashMap<&'static str, (TypeExpr, TypeExpr)>,
    /// Per-premise extra name binding (for `ForEach` premises).
    local: Option<(&'static str, Name)>,
}

impl Env<'_> {
    fn term(&self, x: &str) -> &Term {
        match self.b.get(x) {
            Some(Binding::Term(t)) => t,
            _ => unreachable!("bindings validated"),
        }
    }

    fn name(&self, x: &str) -> Name {
        if let Some((m, n)) = &self.local {
            if *m == x {
                return n.clone();
            }
        }
        match self.b.get(x) {
            Some(Binding::Name(n)) => n.clone(),
            _ => unreachable!("bindings validated"),
        }
    }

    fn dec(&self, p: &DecPat) -> Decoration {
        let get = |x: &str| match self.b.get(x) {
            Some(Binding::Dec(d)) => *d,
            _ => unreachable!("bindings validated"),
        };
        match p {
            DecPat::Lit(d) => *d,
            DecPat::Meta(x) => get(x),
            DecPat::Max(x, y) => get(x).max(get(y)),
        }
    }

    fn ty(&self, p: &TyPat) -> TypeExpr {
        match p {
            TyPat::Meta(x) => match self.b.get(*x) {
                Some(Binding::Type(t)) => t.clone(),
                _ => unreachable!("bindings validated"),
            },
            TyPat::SrcOf(x) => self.types[x].0.clone(),
            TyPat::TgtOf(x) => self.types[x].1.clone(),
            TyPat::ValOf(x) => {
                let n = self.name(x);
                let sig = self.ctx.sig;
                sig.location_type(&n).or_else(|| sig.exception_type(&n)).cloned().expect("validated name")
            }
        }
    }

    fn tm(&self, p: &TmPat) -> Term {
        let two = |a: &TmPat, b: &TmPat| (self.tm(a), self.tm(b));
        match p {
            TmPat::Meta(x) => self.term(x).clone(),
            TmPat::Id(a) => Term::id(self.ty(a)),
            TmPat::Comp(g, f) => {
                let (g, f) = two(g, f);
                Term::comp(g, f)
            }
            TmPat::Pair(a, b) => {
                let (a, b) = two(a, b);
                Term::pair(a, b)
            }
            TmPat::LPair(a, b) => {
                let (a, b) = two(a, b);
                Term::lpair(a, b)
            }
            TmPat::RPair(a, b) => {
                let (a, b) = two(a, b);
                Term::rpair(a, b)
            }
            TmPat::Copair(a, b) => {
                let (a, b) = two(a, b);
                Term::copair(a, b)
            }
            TmPat::LCopair(a, b) => {
                let (a, b) = two(a, b);
                Term::lcopair(a, b)
            }
            TmPat::RCopair(a, b) => {
                let (a, b) = two(a, b);
                Term::rcopair(a, b)
            }
            TmPat::Proj1(a, b) => Term::proj1(self.ty(a), self.ty(b)),
            TmPat::Proj2(a, b) => Term::proj2(self.ty(a), self.ty(b)),
            TmPat::In1(a, b) => Term::in1(self.ty(a), self.ty(b)),
            TmPat::In2(a, b) => Term::in2(self.ty(a), self.ty(b)),
            TmPat::Final(a) => Term::final_(self.ty(a)),
            TmPat::Initial(a) => Term::initial(self.ty(a)),
            TmPat::Lookup(x) => Term::lookup(self.name(x)),
            TmPat::Update(x) => Term::update(self.name(x)),
            TmPat::Tag(x) => Term::tag(self.name(x)),
            TmPat::Untag(x) => Term::untag(self.name(x)),
            TmPat::Downcast(f) => Term::downcast(self.tm(f)),
        }
    }

    fn kind(&self, p: &KindPat) -> EqKind {
        match p {
            KindPat::Strong => EqKind::Strong,
            KindPat::Weak => EqKind::Weak,
            KindPat::Meta(x) => match self.b.get(*x) {
                Some(Binding::Kind(k)) => *k,
                _ => unreachable!("bindings validated"),
            },
        }
    }

    /// Instantiates and validates a judgment pattern.
    fn judgment(&self, p: &JudgPat) -> Result<Judgment, KernelError> {
        let sig = self.ctx.sig;
        match p {
            JudgPat::Term { term, dec } => {
                let t = self.tm(term);
                let (src, tgt) = sig.typecheck(&t).map_err(|err| KernelError::IllTyped { what: t.to_string(), err })?;
                let dec = self.dec(dec);
                let found = decorate(&t, self.ctx.theory, sig)
                    .map_err(|err| KernelError::Decorate { what: t.to_string(), err })?;
                if found > dec {
                    return Err(KernelError::DecorationBound {
                        rule: self.rule.name.to_string(),
                        meta: t.to_string(),
                        bound: dec,
                        found,
                    });
                }
                Ok(Judgment::Term { term: t, src, tgt, dec })
            }
            JudgPat::Eq { kind, lhs, rhs } => {
                let eq = Equation::new(self.kind(kind), self.tm(lhs), self.tm(rhs));
                sig.check_equation(&eq).map_err(|err| KernelError::NonParallel { eq: eq.to_string(), err })?;
                for side in [&eq.lhs, &eq.rhs] {
                    decorate(side, self.ctx.theory, sig)
                        .map_err(|err| KernelError::Decorate { what: side.to_string(), err })?;
                }
                Ok(Judgment::Eq(eq))
            }
            JudgPat::Axiom(x) => {
                let n = self.name(x);
                Ok(Judgment::Eq(sig.axiom(&n).expect("validated axiom").eq.clone()))
            }
        }
    }
}

fn dec_pat_bound(p: &DecPat, b: &Bindings) -> Decoration {
    let get = |x: &str| match b.get(x) {
        Some(Binding::Dec(d)) => *d,
        _ => Decoration::Modifier,
    };
    match p {
        DecPat::Lit(d) => *d,
        DecPat::Meta(x) => get(x),
        DecPat::Max(x, y) => get(x).max(get(y)),
    }
}

/// Applies `rule` under `bindings` to `premises`, returning the conclusion.
pub fn apply_rule(
    rule: &RuleSchema,
    bindings: &Bindings,
    premises: &[Judgment],
    ctx: &Ctx,
) -> Result<Judgment, KernelError> {
    let sig = ctx.sig;
    for k in bindings.keys() {
        if rule.sort_of(k).is_none() {
            return Err(KernelError::ExtraBinding { meta: k.clone() });
        }
    }
    // Non-term metavariables first, so that term bounds can refer to them.
    let mut types = HashMap::new();
    for pass in [false, true] {
        for (meta, sort) in &rule.metas {
            if matches!(sort, Sort::Term(_)) != pass {
                continue;
            }
            let b = bindings.get(*meta).ok_or_else(|| KernelError::MissingBinding { meta: meta.to_string() })?;
            let bad = || KernelError::SortMismatch { meta: meta.to_string(), expected: sort.describe() };
            match (sort, b) {
                (Sort::Term(bound), Binding::Term(t)) => {
                    let ty = sig.typecheck(t).map_err(|err| KernelError::IllTyped { what: t.to_string(), err })?;
                    let found =
                        decorate(t, ctx.theory, sig).map_err(|err| KernelError::Decorate { what: t.to_string(), err })?;
                    let bound = dec_pat_bound(bound, bindings);
                    if found > bound {
                        return Err(KernelError::DecorationBound {
                            rule: rule.name.to_string(),
                            meta: meta.to_string(),
                            bound,
                            found,
                        });
                    }
                    types.insert(*meta, ty);
                }
                (Sort::Type, Binding::Type(t)) => match sig.resolve(t) {
                    Ok(r) if &r == t => {}
                    Ok(_) => return Err(bad()),
                    Err(err) => return Err(KernelError::IllTyped { what: t.to_string(), err }),
                },
                (Sort::Kind, Binding::Kind(_)) => {}
                (Sort::Dec(max), Binding::Dec(d)) => {
                    if d > max {
                        return Err(KernelError::DecorationBound {
                            rule: rule.name.to_string(),
                            meta: meta.to_string(),
                            bound: *max,
                            found: *d,
                        });
                    }
                }
                (Sort::Loc, Binding::Name(n)) if sig.is_location(n) => {}
                (Sort::Exn, Binding::Name(n)) if sig.is_exception(n) => {}
                (Sort::Axiom, Binding::Name(n)) if sig.axiom(n).is_some() => {}
                _ => return Err(bad()),
            }
        }
    }
    let mut env = Env { ctx, rule, b: bindings, types, local: None };
    for side in &rule.side {
        match side {
            SideCond::PureIfWeak { kind, term } => {
                if env.kind(&KindPat::Meta(kind)) == EqKind::Weak {
                    let d = decorate(env.term(term), ctx.theory, sig).expect("validated term");
                    if d != Decoration::Pure {
                        return Err(KernelError::SideCondition {
                            rule: rule.name.to_string(),
                            msg: format!("weak equation requires `{term}` pure, found decoration {d}"),
                        });
                    }
                }
            }
            SideCond::Distinct(x, y) => {
                if env.name(x) == env.name(y) {
                    return Err(KernelError::SideCondition {
                        rule: rule.name.to_string(),
                        msg: format!("`{x}` and `{y}` must differ"),
                    });
                }
            }
            SideCond::IsHypothesis => {}
            SideCond::IsSymbol(x) | SideCond::IsVariable(x) => {
                let ok = match (side, env.term(x).kind()) {
                    (SideCond::IsSymbol(_), TermKind::Sym(_)) => true,
                    (SideCond::IsVariable(_), TermKind::Var(_)) => true,
                    _ => false,
                };
                if !ok {
                    return Err(KernelError::SideCondition {
                        rule: rule.name.to_string(),
                        msg: format!("`{x}` must be a declared {}", if rule.name == "symbol" { "pure symbol" } else { "variable" }),
                    });
                }
            }
        }
    }
    let mut expected = Vec::new();
    for p in &rule.premises {
        match p {
            PremisePat::One(j) => expected.push(env.judgment(j)?),
            PremisePat::ForEachLoc { meta, pat } | PremisePat::ForEachExn { meta, pat } => {
                let names: Vec<Name> = if matches!(p, PremisePat::ForEachLoc { .. }) {
                    sig.locations.iter().map(|(n, _)| n.clone()).collect()
                } else {
                    sig.exceptions.iter().map(|(n, _)| n.clone()).collect()
                };
                for n in names {
                    env.local = Some((meta, n));
                    expected.push(env.judgment(pat)?);
                }
                env.local = None;
            }
        }
    }
    if expected.len() != premises.len() {
        return Err(KernelError::PremiseCount {
            rule: rule.name.to_string(),
            expected: expected.len(),
            found: premises.len(),
        });
    }
    for (i, (e, p)) in expected.iter().zip(premises).enumerate() {
        if e != p {
            return Err(KernelError::PremiseMismatch { index: i + 1, expected: e.to_string(), found: p.to_string() });
        }
    }
    let concl = env.judgment(&rule.conclusion)?;
    if rule.side.contains(&SideCond::IsHypothesis) && !ctx.hyps.iter().any(|h| Some(h) == concl.as_eq()) {
        return Err(KernelError::SideCondition {
            rule: rule.name.to_string(),
            msg: format!("`{concl}` is not a hypothesis"),
        });
    }
    Ok(concl)
}

fn header_error(e: impl ToString) -> CheckError {
    CheckError { step: 0, rule: "header".into(), error: KernelError::Header(e.to_string()) }
}

/// Prepares the signature for `d` (adding its variables) and validates the hypotheses.
pub fn derivation_signature(d: &Derivation, sig: &Signature) -> Result<Signature, CheckError> {
    let sig = if d.vars.is_empty() {
        sig.clone()
    } else {
        sig.with_vars(&d.vars).map_err(|e: SigError| header_error(e))?
    };
    for h in &d.hyps {
        sig.check_equation(h).map_err(|e| header_error(format!("hypothesis `{h}`: {e}")))?;
        for side in [&h.lhs, &h.rhs] {
            decorate(side, d.theory, &sig).map_err(|e| header_error(format!("hypothesis `{h}`: {e}")))?;
        }
    }
    Ok(sig)
}

/// Checks every step of `d` in order. Returns the conclusions on success.
pub fn check_derivation(d: &Derivation, sig: &Signature) -> Result<Vec<Judgment>, CheckError> {
    let sig = derivation_signature(d, sig)?;
    let ctx = Ctx { sig: &sig, theory: d.theory, hyps: &d.hyps };
    let mut done: Vec<Judgment> = Vec::with_capacity(d.steps.len());
    for (i, step) in d.steps.iter().enumerate() {
        let fail = |error| CheckError { step: i + 1, rule: step.rule.clone(), error };
        let rule = find_rule(d.theory, &step.rule)
            .ok_or_else(|| fail(KernelError::UnknownRule { rule: step.rule.clone(), theory: d.theory }))?;
        let mut prem = Vec::with_capacity(step.premises.len());
        for &p in &step.premises {
            if p >= i {
                return Err(fail(KernelError::PremiseIndex { index: p + 1 }));
            }
            prem.push(done[p].clone());
        }
        let concl = apply_rule(rule, &step.bindings, &prem, &ctx).map_err(fail)?;
        if concl != step.conclusion {
            return Err(fail(KernelError::ConclusionMismatch {
                expected: concl.to_string(),
                found: step.conclusion.to_string(),
            }));
        }
        done.push(concl);
    }
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::judgment::Step;
    use crate::syntax::{name, parse_signature, parse_term};

    fn sig() -> Signature {
        parse_signature("location X : V; pure c : 1 -> V;").unwrap()
    }

    fn tb(pairs: &[(&str, Binding)]) -> Bindings {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn comp_of_lookup_and_final() {
        let s = sig();
        let ctx = Ctx { sig: &s, theory: TheoryId::St, hyps: &[] };
        let lkp = Term::lookup(name("X"));
        let fin = Term::final_(TypeExpr::base("V"));
        let b = tb(&[
            ("f", Binding::Term(lkp.clone())),
            ("g", Binding::Term(fin.clone())),
            ("d1", Binding::Dec(Decoration::Accessor)),
            ("d2", Binding::Dec(Decoration::Pure)),
        ]);
        let prem = vec![
            Judgment::Term { term: lkp.clone(), src: TypeExpr::Unit, tgt: TypeExpr::base("V"), dec: Decoration::Accessor },
            Judgment::Term { term: fin.clone(), src: TypeExpr::base("V"), tgt: TypeExpr::Unit, dec: Decoration::Pure },
        ];
        let r = apply_rule(find_rule(TheoryId::St, "comp").unwrap(), &b, &prem, &ctx).unwrap();
        assert_eq!(
            r,
            Judgment::Term { term: Term::comp(fin, lkp), src: TypeExpr::Unit, tgt: TypeExpr::Unit, dec: Decoration::Accessor }
        );
    }

    #[test]
    fn refl_on_identity() {
        let s = sig();
        let ctx = Ctx { sig: &s, theory: TheoryId::Com, hyps: &[] };
        let id = Term::id(TypeExpr::base("V"));
        let b = tb(&[("f", Binding::Term(id.clone())), ("k", Binding::Kind(EqKind::Strong))]);
        let r = apply_rule(find_rule(TheoryId::Com, "refl").unwrap(), &b, &[], &ctx).unwrap();
        assert_eq!(r, Judgment::Eq(Equation::strong(id.clone(), id)));
    }

    #[test]
    fn weak_repl_needs_pure_context() {
        let s = sig();
        let ctx = Ctx { sig: &s, theory: TheoryId::St, hyps: &[] };
        let l = parse_term("lkp[X] . upd[X]", &s).unwrap();
        let r = parse_term("id(V)", &s).unwrap();
        let b = tb(&[
            ("f1", Binding::Term(l.clone())),
            ("f2", Binding::Term(r.clone())),
            ("g", Binding::Term(Term::update(name("X")))),
            ("k", Binding::Kind(EqKind::Weak)),
        ]);
        let prem = [Judgment::Eq(Equation::weak(l, r))];
        let e = apply_rule(find_rule(TheoryId::St, "repl").unwrap(), &b, &prem, &ctx).unwrap_err();
        assert!(matches!(e, KernelError::SideCondition { .. }), "{e}");
    }

    #[test]
    fn weak_to_strong_rejects_modifiers() {
        let s = sig();
        let l = parse_term("lkp[X] . upd[X]", &s).unwrap();
        let r = parse_term("id(V)", &s).unwrap();
        let eq = Equation::weak(l.clone(), r.clone());
        let mut d = Derivation::new(TheoryId::St);
        d.steps.push(Step {
            rule: "lookupdate-same".into(),
            bindings: tb(&[("X", Binding::Name(name("X")))]),
            premises: vec![],
            conclusion: Judgment::Eq(eq.clone()),
        });
        assert!(check_derivation(&d, &s).is_ok());
        d.steps.push(Step {
            rule: "weak-to-strong".into(),
            bindings: tb(&[("f", Binding::Term(l.clone())), ("g", Binding::Term(r.clone()))]),
            premises: vec![0],
            conclusion: Judgment::Eq(Equation::strong(l, r)),
        });
        let e = check_derivation(&d, &s).unwrap_err();
        assert_eq!(e.step, 2);
        assert!(matches!(e.error, KernelError::DecorationBound { found: Decoration::Modifier, .. }), "{e}");
    }

    #[test]
    fn empty_derivation_is_accepted() {
        assert_eq!(check_derivation(&Derivation::new(TheoryId::Com), &sig()).unwrap(), vec![]);
    }

    #[test]
    fn local_global_expands_over_locations() {
        let s = parse_signature("location X : V; location Y : V;").unwrap();
        let rule = find_rule(TheoryId::St, "local-global").unwrap();
        let ctx = Ctx { sig: &s, theory: TheoryId::St, hyps: &[] };
        let f = parse_term("upd[X] . lkp[X]", &s).unwrap();
        let g = parse_term("id(1)", &s).unwrap();
        let b = tb(&[("f", Binding::Term(f)), ("g", Binding::Term(g))]);
        let e = apply_rule(rule, &b, &[], &ctx).unwrap_err();
        assert_eq!(e, KernelError::PremiseCount { rule: "local-global".into(), expected: 2, found: 0 });
    }

    #[test]
    fn premises_must_precede() {
        let s = sig();
        let mut d = Derivation::new(TheoryId::Com);
        let id = Term::id(TypeExpr::Unit);
        d.steps.push(Step {
            rule: "sym".into(),
            bindings: tb(&[
                ("f", Binding::Term(id.clone())),
                ("g", Binding::Term(id.clone())),
                ("k", Binding::Kind(EqKind::Strong)),
            ]),
            premises: vec![0],
            conclusion: Judgment::Eq(Equation::strong(id.clone(), id)),
        });
        assert!(matches!(check_derivation(&d, &s).unwrap_err().error, KernelError::PremiseIndex { .. }));
    }
}
