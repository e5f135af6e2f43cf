use std::collections::HashMap;

use super::fragment::Fragment;
use crate::kernel::{realize, Binding, Fact, ProofBuilder};
use crate::syntax::{EqKind, Equation, Name, Term, TermKind, TheoryId, TypeExpr};

/// Canonical form of an accessor `a : A -> B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AccessorForm {
    /// `a` is pure and is its own canonical form.
    Pure(Term),
    /// `a == v . (lkp . final(A))` with `v : V -> B` pure; `vc` is the
    /// atom chain of `v` (empty when `v` is `id(V)`).
    Lookup { v: Term, vc: Vec<Term>, src: TypeExpr },
}

/// Canonical form of a modifier `f : A -> B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModifierForm {
    Accessor(AccessorForm),
    /// `f == u . (lkp . (upd . a))` with `u : V -> B` pure and `a : A -> V`
    /// an accessor; `uc`, `ac` are their atom chains.
    Update { u: Term, uc: Vec<Term>, a: Term, ac: Vec<Term>, src: TypeExpr },
}

impl AccessorForm {
    pub fn term(&self, loc: &Name) -> Term {
        match self {
            AccessorForm::Pure(t) => t.clone(),
            AccessorForm::Lookup { v, src, .. } => {
                Term::comp(v.clone(), Term::comp(Term::lookup(loc.clone()), Term::final_(src.clone())))
            }
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, AccessorForm::Pure(_))
    }
}

impl ModifierForm {
    pub fn term(&self, loc: &Name) -> Term {
        match self {
            ModifierForm::Accessor(a) => a.term(loc),
            ModifierForm::Update { u, a, .. } => Term::comp(
                u.clone(),
                Term::comp(Term::lookup(loc.clone()), Term::comp(Term::update(loc.clone()), a.clone())),
            ),
        }
    }
}

/// A chain being rewritten: `fact` proves `start = R(c)`.
pub(crate) struct Work {
    pub c: Vec<Term>,
    pub src: TypeExpr,
    pub tgt: TypeExpr,
    pub fact: Fact,
}

/// Ground rewrite from a pure axiom: `R(lhs) == R(rhs)`.
#[derive(Clone)]
pub(crate) struct PureRule {
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
    pub fact: Fact,
}

/// Outcome of the syntactic pure oracle on one equation.
pub(crate) enum PureVerdict {
    Proven(Fact),
    Refuted,
    Unknown,
}

const REWRITE_LIMIT: usize = 64;

/// Proof construction for the state fragment: the lemmas about `lkp`/`upd`,
/// the canonical-form normalizers and the pure oracle.
pub(crate) struct Prover<'s> {
    pub b: ProofBuilder<'s>,
    pub frag: Fragment<'s>,
    rules: Option<Vec<PureRule>>,
    /// Normal forms by term; only filled when not recording, where facts
    /// carry no step indices.
    memo: Memo,
}

#[derive(Default)]
struct Memo {
    acc: HashMap<Term, (AccessorForm, Fact)>,
    modi: HashMap<Term, (ModifierForm, Fact)>,
    pure: HashMap<Term, (Vec<Term>, Fact)>,
}

pub(crate) fn is_lkp(t: &Term) -> bool {
    matches!(t.kind(), TermKind::Lookup(_))
}

pub(crate) fn is_upd(t: &Term) -> bool {
    matches!(t.kind(), TermKind::Update(_))
}

impl<'s> Prover<'s> {
    pub fn new(frag: &Fragment<'s>, record: bool) -> Self {
        Prover { b: ProofBuilder::new(frag.sig, TheoryId::St, record), frag: frag.clone(), rules: None, memo: Memo::default() }
    }

    pub fn lkp(&self) -> Term {
        self.frag.lkp()
    }

    pub fn upd(&self) -> Term {
        self.frag.upd()
    }

    pub fn val(&self) -> TypeExpr {
        self.frag.val.clone()
    }

    pub fn unit_id() -> Term {
        Term::id(TypeExpr::Unit)
    }

    // ---- Chains -----------------------------------------------------------

    pub fn start(&mut self, t: &Term) -> Work {
        let (src, tgt) = self.b.types(t);
        let (c, fact) = self.b.flatten(t);
        Work { c, src, tgt, fact }
    }

    /// Rewrites `w.c[i..j]` to `new_mid` using `p`.
    pub fn rw(&mut self, w: &mut Work, i: usize, j: usize, new_mid: Vec<Term>, p: &Fact) {
        let (c, q) = self.b.rewrite(&w.c, &w.src, &w.tgt, i, j, &new_mid, p);
        w.fact = self.b.trans(&w.fact, &q);
        w.c = c;
    }

    // ---- Basic lemmas -----------------------------------------------------

    /// `lkp . upd ~ id(V)`.
    pub fn ax(&mut self) -> Fact {
        let eq = Equation::weak(Term::comp(self.lkp(), self.upd()), Term::id(self.val()));
        self.b.step("lookupdate-same", vec![("X", Binding::Name(self.frag.loc.clone()))], &[], eq)
    }

    /// `R(seg) == id(1)` for an accessor chain `seg : 1 -> 1`.
    pub fn to_id1(&mut self, seg: &[Term]) -> Fact {
        if seg.is_empty() {
            return self.b.refl(&Self::unit_id(), EqKind::Strong);
        }
        let p = self.b.final_u(&realize(seg, &TypeExpr::Unit));
        let q = self.b.final_u(&Self::unit_id());
        let q = self.b.sym(&q);
        self.b.trans(&p, &q)
    }

    /// `lkp . (upd . s) ~ s`.
    pub fn cancel(&mut self, s: &Term) -> Fact {
        let a = self.b.assoc(s, &self.upd(), &self.lkp());
        let ax = self.ax();
        let w = self.b.subs(&ax, s);
        let it = self.b.id_target(s);
        self.b.trans_all(&[a, w, it])
    }

    /// `upd . f == upd . g` from `f ~ g`.
    pub fn upd_respects_weak(&mut self, p: &Fact) -> Fact {
        let kf = self.cancel(&p.lhs);
        let kg = self.cancel(&p.rhs);
        let kg = self.b.sym(&kg);
        let w = self.b.trans_all(&[kf, p.clone(), kg]);
        let upd = self.upd();
        self.b.local_global(&Term::comp(upd.clone(), p.lhs.clone()), &Term::comp(upd, p.rhs.clone()), &[&w])
    }

    /// `upd . lkp == id(1)`.
    pub fn upd_lkp_id(&mut self) -> Fact {
        let (lkp, upd) = (self.lkp(), self.upd());
        let a = self.b.assoc(&lkp, &upd, &lkp);
        let ax = self.ax();
        let w = self.b.subs(&ax, &lkp);
        let it = self.b.id_target(&lkp);
        let is = self.b.id_source(&lkp);
        let is = self.b.sym(&is);
        let prem = self.b.trans_all(&[a, w, it, is]);
        self.b.local_global(&Term::comp(upd, lkp), &Self::unit_id(), &[&prem])
    }

    /// `upd . (lkp . final(X)) == final(X)`.
    pub fn upd_lkp_final(&mut self, x: &TypeExpr) -> Fact {
        let fin = Term::final_(x.clone());
        let (lkp, upd) = (self.lkp(), self.upd());
        let a = self.b.assoc(&fin, &lkp, &upd);
        let ul = self.upd_lkp_id();
        let s = self.b.subs(&ul, &fin);
        let it = self.b.id_target(&fin);
        self.b.trans_all(&[a, s, it])
    }

    // ---- Canonical forms --------------------------------------------------

    /// `a == canonical(a)` for an accessor `a`.
    pub fn normalize_accessor(&mut self, a: &Term) -> (AccessorForm, Fact) {
        if let Some(r) = self.memo.acc.get(a) {
            return r.clone();
        }
        let r = self.normalize_accessor_uncached(a);
        if !self.b.recording() {
            self.memo.acc.insert(a.clone(), r.clone());
        }
        r
    }

    fn normalize_accessor_uncached(&mut self, a: &Term) -> (AccessorForm, Fact) {
        let mut w = self.start(a);
        let Some(k) = w.c.iter().position(is_lkp) else {
            return (AccessorForm::Pure(a.clone()), self.b.refl(a, EqKind::Strong));
        };
        let n = w.c.len();
        let fin = Term::final_(w.src.clone());
        let rest = realize(&w.c[k + 1..], &w.src);
        let p = self.b.final_u(&rest);
        self.rw(&mut w, k + 1, n, vec![fin.clone()], &p);
        let vc = w.c[..k].to_vec();
        let v = realize(&vc, &self.val());
        let g = self.b.append(&vc, &[self.lkp(), fin], &self.val());
        let g = self.b.sym(&g);
        let fact = self.b.trans(&w.fact, &g);
        (AccessorForm::Lookup { v, vc, src: w.src }, fact)
    }

    /// Makes the accessor block `w.c[lo..k]` (ending just before the update
    /// at `k`) end in its only lookup. Returns the new index of the update.
    fn lookup_block(&mut self, w: &mut Work, lo: usize, k: usize) -> usize {
        match w.c[lo..k].iter().position(is_lkp) {
            Some(j) => {
                let j = j + lo;
                if j + 1 < k {
                    let r = w.c[j + 1..k].to_vec();
                    let p = self.to_id1(&r);
                    self.rw(w, j + 1, k, vec![], &p);
                }
                j + 1
            }
            None => {
                let ins = vec![Term::final_(self.val()), self.lkp()];
                let p = self.to_id1(&ins);
                let p = self.b.sym(&p);
                self.rw(w, k, k, ins, &p);
                k + 2
            }
        }
    }

    /// `f == canonical(f)`; `f` must be in the fragment.
    pub fn normalize_modifier(&mut self, f: &Term) -> (ModifierForm, Fact) {
        if let Some(r) = self.memo.modi.get(f) {
            return r.clone();
        }
        let r = self.normalize_modifier_uncached(f);
        if !self.b.recording() {
            self.memo.modi.insert(f.clone(), r.clone());
        }
        r
    }

    fn normalize_modifier_uncached(&mut self, f: &Term) -> (ModifierForm, Fact) {
        let mut w = self.start(f);
        let Some(k0) = w.c.iter().position(is_upd) else {
            let (af, p) = self.normalize_accessor(f);
            return (ModifierForm::Accessor(af), p);
        };
        let k = self.lookup_block(&mut w, 0, k0);
        let v = self.val();
        // Remove the inner updates one at a time, left to right.
        while let Some(k2) = w.c[k + 1..].iter().position(is_upd).map(|j| j + k + 1) {
            let k2 = self.lookup_block(&mut w, k + 1, k2);
            let f1c = w.c[k + 1..].to_vec();
            let off = k2 - 1 - (k + 1);
            let ax = self.ax();
            let (f1n, p) = self.b.rewrite(&f1c, &w.src, &v, off, off + 2, &[], &ax);
            let mut q = self.upd_respects_weak(&p);
            if f1n.is_empty() {
                let is = self.b.id_source(&self.upd());
                q = self.b.trans(&q, &is);
            }
            let mut mid = vec![self.upd()];
            mid.extend(f1n);
            let n = w.c.len();
            self.rw(&mut w, k, n, mid, &q);
        }
        // The accessor after the update keeps only its outermost lookup.
        if let Some(j) = w.c[k + 1..].iter().position(is_lkp).map(|j| j + k + 1) {
            let n = w.c.len();
            let rest = realize(&w.c[j + 1..], &w.src);
            let p = self.b.final_u(&rest);
            let fin = Term::final_(w.src.clone());
            self.rw(&mut w, j + 1, n, vec![fin], &p);
        }
        let uc = w.c[..k - 1].to_vec();
        let ac = w.c[k + 1..].to_vec();
        let u = realize(&uc, &v);
        let a = realize(&ac, &v);
        let mut tail = vec![self.lkp(), self.upd()];
        tail.extend(ac.iter().cloned());
        let p1 = self.b.append(&uc, &tail, &v);
        let regroup = if ac.is_empty() {
            let is = self.b.id_source(&self.upd());
            let r = self.b.repl(&is, &self.lkp());
            let r = self.b.repl(&r, &u);
            self.b.trans(&r, &p1)
        } else {
            p1
        };
        let regroup = self.b.sym(&regroup);
        let fact = self.b.trans(&w.fact, &regroup);
        (ModifierForm::Update { u, uc, a, ac, src: w.src }, fact)
    }

    // ---- Pure oracle ------------------------------------------------------

    /// Collapses the longest suffix ending in the unit type into
    /// `final(src)` (or nothing when the source is `1`).
    fn collapse(&mut self, w: &mut Work) {
        let Some(k) = w.c.iter().position(|a| self.b.tgt(a).is_unit()) else { return };
        let n = w.c.len();
        let seg = w.c[k..].to_vec();
        if w.src.is_unit() {
            let p = self.to_id1(&seg);
            self.rw(w, k, n, vec![], &p);
        } else {
            let fin = Term::final_(w.src.clone());
            if seg.len() == 1 && seg[0] == fin {
                return;
            }
            let p = self.b.final_u(&realize(&seg, &w.src));
            self.rw(w, k, n, vec![fin], &p);
        }
    }

    /// Normal form of a pure term without axioms: `x == R(nf)`.
    pub fn pure_nf(&mut self, x: &Term) -> (Vec<Term>, Fact) {
        if let Some(r) = self.memo.pure.get(x) {
            return r.clone();
        }
        let mut w = self.start(x);
        self.collapse(&mut w);
        if !self.b.recording() {
            self.memo.pure.insert(x.clone(), (w.c.clone(), w.fact.clone()));
        }
        (w.c, w.fact)
    }

    fn load_rules(&mut self) -> Vec<PureRule> {
        if let Some(r) = &self.rules {
            return r.clone();
        }
        let sig = self.frag.sig;
        let mut rules = Vec::new();
        for ax in &sig.axioms {
            if self.frag.check_term(&ax.eq.lhs).map(|t| t.2) != Ok(crate::syntax::Decoration::Pure)
                || self.frag.check_term(&ax.eq.rhs).map(|t| t.2) != Ok(crate::syntax::Decoration::Pure)
            {
                continue;
            }
            let (lhs, nl) = self.pure_nf(&ax.eq.lhs);
            let (rhs, nr) = self.pure_nf(&ax.eq.rhs);
            if lhs.is_empty() || lhs == rhs {
                continue;
            }
            let f = self.b.axiom(&ax.name);
            let f = self.b.w2s(&f);
            let nl = self.b.sym(&nl);
            let fact = self.b.trans_all(&[nl, f, nr]);
            rules.push(PureRule { lhs, rhs, fact });
        }
        self.rules = Some(rules.clone());
        rules
    }

    /// Whether the signature has pure axioms usable as rewrites.
    pub fn has_pure_axioms(&mut self) -> bool {
        !self.load_rules().is_empty()
    }

    /// Normal form modulo the pure axioms used as ground left-to-right
    /// rewrites, with a bounded number of steps.
    pub fn pure_nf_axioms(&mut self, x: &Term) -> (Vec<Term>, Fact) {
        let rules = self.load_rules();
        let mut w = self.start(x);
        self.collapse(&mut w);
        for _ in 0..REWRITE_LIMIT {
            let hit = rules.iter().find_map(|r| {
                (0..=w.c.len().saturating_sub(r.lhs.len()))
                    .find(|&i| w.c.len() >= r.lhs.len() && w.c[i..i + r.lhs.len()] == r.lhs[..])
                    .map(|i| (i, r))
            });
            let Some((i, r)) = hit else { break };
            let (j, mid, fact) = (i + r.lhs.len(), r.rhs.clone(), r.fact.clone());
            self.rw(&mut w, i, j, mid, &fact);
            self.collapse(&mut w);
        }
        (w.c, w.fact)
    }

    /// Proof of a pure equation by comparing normal forms, with or without
    /// the pure axioms.
    pub fn prove_by_nf(&mut self, eq: &Equation, axioms: bool) -> Option<Fact> {
        let (cl, pl) = if axioms { self.pure_nf_axioms(&eq.lhs) } else { self.pure_nf(&eq.lhs) };
        let (cr, pr) = if axioms { self.pure_nf_axioms(&eq.rhs) } else { self.pure_nf(&eq.rhs) };
        if cl != cr {
            return None;
        }
        let pr = self.b.sym(&pr);
        let f = self.b.trans(&pl, &pr);
        Some(if eq.kind == EqKind::Weak { self.b.s2w(&f) } else { f })
    }

    /// Syntactic oracle for an equation between pure terms.
    pub fn prove_pure(&mut self, eq: &Equation) -> PureVerdict {
        let axioms = self.has_pure_axioms();
        match self.prove_by_nf(eq, axioms) {
            Some(f) => PureVerdict::Proven(f),
            None if axioms => PureVerdict::Unknown,
            None => PureVerdict::Refuted,
        }
    }

    /// Whether a pure equation holds by normalization alone, without axioms.
    pub fn trivially_equal(&mut self, eq: &Equation) -> bool {
        self.pure_nf(&eq.lhs).0 == self.pure_nf(&eq.rhs).0
    }
}
