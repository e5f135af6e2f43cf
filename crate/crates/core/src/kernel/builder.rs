use std::collections::HashMap;

use super::judgment::{Binding, Bindings, Derivation, Judgment, Step};
use crate::syntax::{EqKind, Equation, Name, Signature, Term, TheoryId, TypeExpr};

/// A proven equation. `refl` facts are trivial and only turned into a step
/// when used as a premise; `idx` is the proving step when recording.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub kind: EqKind,
    pub lhs: Term,
    pub rhs: Term,
    refl: bool,
    idx: usize,
}

impl Fact {
    pub fn equation(&self) -> Equation {
        Equation::new(self.kind, self.lhs.clone(), self.rhs.clone())
    }

    pub fn is_refl(&self) -> bool {
        self.refl
    }
}

/// Right-nested composite of `atoms` (outermost first), `id(ty)` when empty.
pub fn realize(atoms: &[Term], ty: &TypeExpr) -> Term {
    Term::chain(atoms).unwrap_or_else(|| Term::id(ty.clone()))
}

/// Forward proof construction. Every tactic returns a `Fact` whose equation
/// is the conclusion of a kernel step (or a reflexivity); when `record` is
/// off only the equations are computed.
pub struct ProofBuilder<'s> {
    pub sig: &'s Signature,
    record: bool,
    deriv: Derivation,
    memo: HashMap<Judgment, usize>,
}

fn bind(pairs: Vec<(&str, Binding)>) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn t(x: &Term) -> Binding {
    Binding::Term(x.clone())
}

impl<'s> ProofBuilder<'s> {
    pub fn new(sig: &'s Signature, theory: TheoryId, record: bool) -> Self {
        ProofBuilder { sig, record, deriv: Derivation::new(theory), memo: HashMap::new() }
    }

    pub fn recording(&self) -> bool {
        self.record
    }

    pub fn theory(&self) -> TheoryId {
        self.deriv.theory
    }

    pub fn add_hyp(&mut self, eq: Equation) {
        if !self.deriv.hyps.contains(&eq) {
            self.deriv.hyps.push(eq);
        }
    }

    pub fn into_derivation(self) -> Derivation {
        self.deriv
    }

    /// The derivation restricted to the steps `goals` depend on, so that it
    /// ends with the last goal. Hypotheses are kept as declared.
    pub fn finish(mut self, goals: &[Fact]) -> Derivation {
        let tops: Vec<usize> = goals.iter().map(|g| self.commit(g).idx).collect();
        let steps = std::mem::take(&mut self.deriv.steps);
        let mut keep = vec![false; steps.len()];
        let mut todo = tops;
        while let Some(i) = todo.pop() {
            if !std::mem::replace(&mut keep[i], true) {
                todo.extend(&steps[i].premises);
            }
        }
        let mut renum = vec![usize::MAX; steps.len()];
        for (i, mut s) in steps.into_iter().enumerate().filter(|(i, _)| keep[*i]) {
            s.premises.iter_mut().for_each(|p| *p = renum[*p]);
            renum[i] = self.deriv.steps.len();
            self.deriv.steps.push(s);
        }
        self.deriv
    }

    pub fn derivation(&self) -> &Derivation {
        &self.deriv
    }

    pub fn types(&self, x: &Term) -> (TypeExpr, TypeExpr) {
        self.sig.typecheck(x).unwrap_or_else(|e| panic!("builder term `{x}` ill-typed: {e}"))
    }

    pub fn src(&self, x: &Term) -> TypeExpr {
        self.types(x).0
    }

    pub fn tgt(&self, x: &Term) -> TypeExpr {
        self.types(x).1
    }

    fn index_of(&mut self, f: &Fact) -> usize {
        if f.refl {
            let kw = Binding::Kind(f.kind);
            self.push("refl", bind(vec![("f", t(&f.lhs)), ("k", kw)]), vec![], f.equation())
        } else {
            f.idx
        }
    }

    fn push(&mut self, rule: &str, bindings: Bindings, premises: Vec<usize>, eq: Equation) -> usize {
        let j = Judgment::Eq(eq);
        if let Some(&i) = self.memo.get(&j) {
            return i;
        }
        let i = self.deriv.steps.len();
        self.deriv.steps.push(Step { rule: rule.to_string(), bindings, premises, conclusion: j.clone() });
        self.memo.insert(j, i);
        i
    }

    /// Records one kernel step concluding `eq` from `premises`.
    pub fn step(&mut self, rule: &str, bindings: Vec<(&str, Binding)>, premises: &[&Fact], eq: Equation) -> Fact {
        let mut idx = 0;
        if self.record {
            let prem: Vec<usize> = premises.iter().map(|p| self.index_of(p)).collect();
            idx = self.push(rule, bind(bindings), prem, eq.clone());
        }
        Fact { kind: eq.kind, lhs: eq.lhs, rhs: eq.rhs, refl: false, idx }
    }

    /// Makes sure `f` is the conclusion of some step (materializing reflexivity).
    pub fn commit(&mut self, f: &Fact) -> Fact {
        if self.record {
            let idx = self.index_of(f);
            Fact { refl: false, idx, ..f.clone() }
        } else {
            Fact { refl: false, ..f.clone() }
        }
    }

    pub fn refl(&self, x: &Term, kind: EqKind) -> Fact {
        Fact { kind, lhs: x.clone(), rhs: x.clone(), refl: true, idx: 0 }
    }

    pub fn sym(&mut self, p: &Fact) -> Fact {
        if p.refl {
            return p.clone();
        }
        let eq = Equation::new(p.kind, p.rhs.clone(), p.lhs.clone());
        self.step("sym", vec![("f", t(&p.lhs)), ("g", t(&p.rhs)), ("k", Binding::Kind(p.kind))], &[p], eq)
    }

    pub fn s2w(&mut self, p: &Fact) -> Fact {
        if p.kind == EqKind::Weak {
            return p.clone();
        }
        if p.refl {
            return self.refl(&p.lhs, EqKind::Weak);
        }
        let eq = Equation::weak(p.lhs.clone(), p.rhs.clone());
        self.step("strong-to-weak", vec![("f", t(&p.lhs)), ("g", t(&p.rhs))], &[p], eq)
    }

    /// Weak to strong; both sides must be accessors.
    pub fn w2s(&mut self, p: &Fact) -> Fact {
        if p.kind == EqKind::Strong {
            return p.clone();
        }
        if p.refl {
            return self.refl(&p.lhs, EqKind::Strong);
        }
        let eq = Equation::strong(p.lhs.clone(), p.rhs.clone());
        self.step("weak-to-strong", vec![("f", t(&p.lhs)), ("g", t(&p.rhs))], &[p], eq)
    }

    /// Transitivity; a strong and a weak premise give a weak conclusion.
    pub fn trans(&mut self, p: &Fact, q: &Fact) -> Fact {
        debug_assert_eq!(p.rhs, q.lhs, "trans: {} vs {}", p.rhs, q.lhs);
        let (p, q) = if p.kind == q.kind {
            (p.clone(), q.clone())
        } else {
            (self.s2w(p), self.s2w(q))
        };
        if p.refl {
            return q;
        }
        if q.refl {
            return p;
        }
        let eq = Equation::new(p.kind, p.lhs.clone(), q.rhs.clone());
        self.step(
            "trans",
            vec![("f", t(&p.lhs)), ("g", t(&p.rhs)), ("h", t(&q.rhs)), ("k", Binding::Kind(p.kind))],
            &[&p, &q],
            eq,
        )
    }

    pub fn trans_all(&mut self, facts: &[Fact]) -> Fact {
        let mut acc = facts[0].clone();
        for f in &facts[1..] {
            acc = self.trans(&acc, f);
        }
        acc
    }

    /// `g . f1 = g . f2` from `f1 = f2`.
    pub fn repl(&mut self, p: &Fact, g: &Term) -> Fact {
        let (l, r) = (Term::comp(g.clone(), p.lhs.clone()), Term::comp(g.clone(), p.rhs.clone()));
        if p.refl {
            return self.refl(&l, p.kind);
        }
        let eq = Equation::new(p.kind, l, r);
        self.step(
            "repl",
            vec![("f1", t(&p.lhs)), ("f2", t(&p.rhs)), ("g", t(g)), ("k", Binding::Kind(p.kind))],
            &[p],
            eq,
        )
    }

    /// `g1 . f = g2 . f` from `g1 = g2`.
    pub fn subs(&mut self, p: &Fact, f: &Term) -> Fact {
        let (l, r) = (Term::comp(p.lhs.clone(), f.clone()), Term::comp(p.rhs.clone(), f.clone()));
        if p.refl {
            return self.refl(&l, p.kind);
        }
        let eq = Equation::new(p.kind, l, r);
        self.step(
            "subs",
            vec![("f", t(f)), ("g1", t(&p.lhs)), ("g2", t(&p.rhs)), ("k", Binding::Kind(p.kind))],
            &[p],
            eq,
        )
    }

    /// `h . (g . f) == (h . g) . f`.
    pub fn assoc(&mut self, f: &Term, g: &Term, h: &Term) -> Fact {
        let eq = Equation::strong(
            Term::comp(h.clone(), Term::comp(g.clone(), f.clone())),
            Term::comp(Term::comp(h.clone(), g.clone()), f.clone()),
        );
        self.step("assoc", vec![("f", t(f)), ("g", t(g)), ("h", t(h))], &[], eq)
    }

    /// `f . id == f`.
    pub fn id_source(&mut self, f: &Term) -> Fact {
        let eq = Equation::strong(Term::comp(f.clone(), Term::id(self.src(f))), f.clone());
        self.step("id-source", vec![("f", t(f))], &[], eq)
    }

    /// `id . f == f`.
    pub fn id_target(&mut self, f: &Term) -> Fact {
        let eq = Equation::strong(Term::comp(Term::id(self.tgt(f)), f.clone()), f.clone());
        self.step("id-target", vec![("f", t(f))], &[], eq)
    }

    /// `f == final(src f)` for `f` into the unit type.
    pub fn final_u(&mut self, f: &Term) -> Fact {
        let fin = Term::final_(self.src(f));
        if *f == fin {
            return self.refl(f, EqKind::Strong);
        }
        self.step("final-u", vec![("f", t(f))], &[], Equation::strong(f.clone(), fin))
    }

    /// `g == initial(tgt g)` for `g` out of the empty type.
    pub fn initial_u(&mut self, g: &Term) -> Fact {
        let init = Term::initial(self.tgt(g));
        if *g == init {
            return self.refl(g, EqKind::Strong);
        }
        self.step("initial-u", vec![("g", t(g))], &[], Equation::strong(g.clone(), init))
    }

    pub fn hyp(&mut self, eq: &Equation) -> Fact {
        self.add_hyp(eq.clone());
        self.step(
            "hyp",
            vec![("lhs", t(&eq.lhs)), ("rhs", t(&eq.rhs)), ("k", Binding::Kind(eq.kind))],
            &[],
            eq.clone(),
        )
    }

    pub fn axiom(&mut self, name: &Name) -> Fact {
        let eq = self.sig.axiom(name).expect("declared axiom").eq.clone();
        self.step("axiom", vec![("name", Binding::Name(name.clone()))], &[], eq)
    }

    /// `f == g` from `f ~ g` and `final . f == final . g` (state effect rule).
    pub fn effect(&mut self, weak: &Fact, strong: &Fact) -> Fact {
        let eq = Equation::strong(weak.lhs.clone(), weak.rhs.clone());
        self.step("effect", vec![("f", t(&weak.lhs)), ("g", t(&weak.rhs))], &[weak, strong], eq)
    }

    /// `f == g` from one weak premise per location (resp. exception).
    pub fn local_global(&mut self, f: &Term, g: &Term, premises: &[&Fact]) -> Fact {
        let eq = Equation::strong(f.clone(), g.clone());
        if f == g {
            return self.refl(f, EqKind::Strong);
        }
        self.step("local-global", vec![("f", t(f)), ("g", t(g))], premises, eq)
    }

    // ---- Composite chains -------------------------------------------------

    /// Type at boundary `k` of a chain with overall target `tgt`: the target
    /// of `c[k]` (equivalently the source of `c[k - 1]`).
    pub fn boundary(&self, c: &[Term], k: usize, tgt: &TypeExpr) -> TypeExpr {
        if k == 0 {
            tgt.clone()
        } else {
            self.src(&c[k - 1])
        }
    }

    /// `R(c1) . R(c2) == R(c1 ++ c2)`, with `mid` the type between them.
    pub fn append(&mut self, c1: &[Term], c2: &[Term], mid: &TypeExpr) -> Fact {
        if c1.is_empty() {
            return self.id_target(&realize(c2, mid));
        }
        if c2.is_empty() {
            return self.id_source(&realize(c1, mid));
        }
        if c1.len() == 1 {
            let x = Term::comp(c1[0].clone(), realize(c2, mid));
            return self.refl(&x, EqKind::Strong);
        }
        let a = &c1[0];
        let rest = realize(&c1[1..], mid);
        let r2 = realize(c2, mid);
        let p = self.assoc(&r2, &rest, a);
        let p = self.sym(&p);
        let q = self.append(&c1[1..], c2, mid);
        let q = self.repl(&q, a);
        self.trans(&p, &q)
    }

    /// Flattens `x` into a chain of non-identity atoms: `x == R(atoms)`.
    pub fn flatten(&mut self, x: &Term) -> (Vec<Term>, Fact) {
        use crate::syntax::TermKind;
        match x.kind() {
            TermKind::Id(_) => (Vec::new(), self.refl(x, EqKind::Strong)),
            TermKind::Comp(g, f) => {
                let mid = self.src(g);
                let (cg, pg) = self.flatten(g);
                let (cf, pf) = self.flatten(f);
                let s = self.subs(&pg, f);
                let rg = realize(&cg, &mid);
                let r = self.repl(&pf, &rg);
                let a = self.append(&cg, &cf, &mid);
                let mut all = cg;
                all.extend(cf);
                let p = self.trans(&s, &r);
                let p = self.trans(&p, &a);
                (all, p)
            }
            _ => (vec![x.clone()], self.refl(x, EqKind::Strong)),
        }
    }

    /// Rewrites the segment `c[i..j]` to `new_mid` using `p : R(c[i..j]) = R(new_mid)`.
    /// Returns the new chain and `R(c) = R(new chain)`. `src`/`tgt` are the
    /// chain's overall types. A weak `p` needs a pure prefix in state theories.
    pub fn rewrite(
        &mut self,
        c: &[Term],
        src: &TypeExpr,
        tgt: &TypeExpr,
        i: usize,
        j: usize,
        new_mid: &[Term],
        p: &Fact,
    ) -> (Vec<Term>, Fact) {
        let lo = self.boundary(c, i, tgt);
        let hi = if j == c.len() { src.clone() } else { self.boundary(c, j, tgt) };
        let (pre, seg, suf) = (&c[..i], &c[i..j], &c[j..]);
        debug_assert_eq!(p.lhs, realize(seg, &lo), "rewrite: premise lhs");
        debug_assert_eq!(p.rhs, realize(new_mid, &lo), "rewrite: premise rhs");
        let mut out: Vec<Term> = pre.to_vec();
        out.extend_from_slice(new_mid);
        out.extend_from_slice(suf);
        if p.refl {
            return (out, self.refl(&realize(c, src), p.kind));
        }
        // R(seg ++ suf) = R(mid' ++ suf)
        let a = self.append(seg, suf, &hi);
        let a = self.sym(&a);
        let s = self.subs(p, &realize(suf, &hi));
        let b = self.append(new_mid, suf, &hi);
        let q = self.trans(&a, &s);
        let q = self.trans(&q, &b);
        if pre.is_empty() {
            return (out, q);
        }
        let mut tail_old = seg.to_vec();
        tail_old.extend_from_slice(suf);
        let mut tail_new = new_mid.to_vec();
        tail_new.extend_from_slice(suf);
        let a = self.append(pre, &tail_old, &lo);
        let a = self.sym(&a);
        let r = self.repl(&q, &realize(pre, &lo));
        let b = self.append(pre, &tail_new, &lo);
        let q = self.trans(&a, &r);
        let q = self.trans(&q, &b);
        (out, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check::check_derivation;
    use crate::syntax::{parse_signature, parse_term};

    #[test]
    fn flatten_yields_checked_right_nested_chain() {
        let sig = parse_signature("type A; pure f : A -> A; pure g : A -> A; pure h : A -> A;").unwrap();
        let x = parse_term("((h . g) . id(A)) . (f . (g . h))", &sig).unwrap();
        let mut b = ProofBuilder::new(&sig, TheoryId::Com, true);
        let (atoms, p) = b.flatten(&x);
        let p = b.commit(&p);
        assert_eq!(atoms.len(), 5);
        assert_eq!(p.lhs, x);
        assert_eq!(p.rhs, parse_term("h . g . f . g . h", &sig).unwrap());
        let d = b.into_derivation();
        check_derivation(&d, &sig).unwrap();
        assert!(d.proves(&p.equation()));
    }

    #[test]
    fn rewrite_inner_segment() {
        let sig = parse_signature("type A; pure f : A -> A; pure g : A -> A; axiom gg : g . g == id(A);").unwrap();
        let c: Vec<Term> = ["f", "g", "g", "f"].iter().map(|s| parse_term(s, &sig).unwrap()).collect();
        let a = TypeExpr::base("A");
        let mut b = ProofBuilder::new(&sig, TheoryId::Com, true);
        let ax = b.axiom(&crate::syntax::name("gg"));
        let (out, p) = b.rewrite(&c, &a, &a, 1, 3, &[], &ax);
        assert_eq!(out.len(), 2);
        assert_eq!(p.rhs, parse_term("f . f", &sig).unwrap());
        check_derivation(&b.into_derivation(), &sig).unwrap();
    }

    #[test]
    fn non_recording_builds_no_steps() {
        let sig = parse_signature("type A; pure f : A -> A;").unwrap();
        let x = parse_term("(f . f) . f", &sig).unwrap();
        let mut b = ProofBuilder::new(&sig, TheoryId::Com, false);
        let (_, p) = b.flatten(&x);
        assert!(!p.is_refl());
        assert!(b.into_derivation().steps.is_empty());
    }
}
