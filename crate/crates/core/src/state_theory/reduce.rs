use super::fragment::StateError;
use super::prover::{AccessorForm, ModifierForm, Prover};
use crate::kernel::{realize, Fact};
use crate::syntax::{Decoration, EqKind, Equation, Term, TypeExpr};

/// How an equation between accessors `a1, a2 : X -> Y` reduces to pure ones.
pub(crate) enum AccPlan {
    /// Both pure: the equation itself.
    Pure { a1: Term, a2: Term },
    /// Both effectful: `v1 == v2` between their pure parts.
    Both { n1: Fact, n2: Fact, vc1: Vec<Term>, vc2: Vec<Term>, x: TypeExpr },
    /// `p` pure, `acc == v . lkp . final(X)` effectful (`swapped` when `p`
    /// is the right-hand side): two equations through the inhabitant of `X`.
    Mixed { swapped: bool, p: Term, n: Fact, vc: Vec<Term>, x: TypeExpr, pc: Vec<Term>, hc: Vec<Term> },
}

/// One side of a modifier equation: `f ~ g` and `final . f == upd . s`.
pub(crate) struct ModSide {
    f: Term,
    form: ModifierForm,
    n: Fact,
    g: Term,
    s: Term,
}

pub(crate) enum Plan {
    Acc { weak: bool, plan: AccPlan },
    Mod { weak: bool, y: TypeExpr, sides: [ModSide; 2], g: AccPlan, s: Option<AccPlan> },
}

impl<'s> Prover<'s> {
    fn lf(&self, x: &TypeExpr) -> Term {
        Term::comp(self.lkp(), Term::final_(x.clone()))
    }

    fn hu(&self, hc: &[Term]) -> Term {
        let mut c = hc.to_vec();
        c.push(self.upd());
        realize(&c, &self.val())
    }

    pub(crate) fn acc_plan(&mut self, a1: &Term, a2: &Term) -> Result<AccPlan, StateError> {
        let (x, _) = self.b.types(a1);
        let (f1, n1) = self.normalize_accessor(a1);
        let (f2, n2) = self.normalize_accessor(a2);
        Ok(match (f1, f2) {
            (AccessorForm::Pure(_), AccessorForm::Pure(_)) => AccPlan::Pure { a1: a1.clone(), a2: a2.clone() },
            (AccessorForm::Lookup { vc: vc1, .. }, AccessorForm::Lookup { vc: vc2, .. }) => {
                let h = self.frag.inhabitant(&x)?;
                self.frag.check_term(&h)?;
                AccPlan::Both { n1, n2, vc1, vc2, x }
            }
            (f1, f2) => {
                let swapped = !f1.is_pure();
                let (p, n, form) = if swapped { (a2, n1, f1) } else { (a1, n2, f2) };
                let AccessorForm::Lookup { vc, .. } = form else { unreachable!() };
                let h = self.frag.inhabitant(&x)?;
                self.frag.check_term(&h)?;
                let (hc, _) = self.b.flatten(&h);
                let (pc, _) = self.b.flatten(p);
                AccPlan::Mixed { swapped, p: p.clone(), n, vc, x, pc, hc }
            }
        })
    }

    fn mixed_chain(&self, pc: &[Term], hc: &[Term], last: Term) -> Vec<Term> {
        let mut c = pc.to_vec();
        c.extend_from_slice(hc);
        c.push(last);
        c
    }

    pub(crate) fn acc_equations(&self, plan: &AccPlan) -> Vec<Equation> {
        let v = self.val();
        match plan {
            AccPlan::Pure { a1, a2 } => vec![Equation::strong(a1.clone(), a2.clone())],
            AccPlan::Both { vc1, vc2, .. } => vec![Equation::strong(realize(vc1, &v), realize(vc2, &v))],
            AccPlan::Mixed { p, vc, x, pc, hc, .. } => {
                let e3l = realize(&self.mixed_chain(pc, hc, Term::final_(v.clone())), &v);
                let e4l = realize(&self.mixed_chain(pc, hc, Term::final_(x.clone())), x);
                vec![Equation::strong(e3l, realize(vc, &v)), Equation::strong(e4l, p.clone())]
            }
        }
    }

    /// `canon . R(hc ++ [upd]) ~ R(vc)` for `canon = v . (lkp . final(X))`.
    fn strip(&mut self, vc: &[Term], x: &TypeExpr, hc: &[Term]) -> Fact {
        let v = realize(vc, &self.val());
        let canon = Term::comp(v, self.lf(x));
        let mut w = self.start(&Term::comp(canon, self.hu(hc)));
        let i = vc.len() + 1;
        let j = i + 1 + hc.len();
        let seg = w.c[i..j].to_vec();
        let p = self.to_id1(&seg);
        self.rw(&mut w, i, j, vec![], &p);
        let ax = self.ax();
        self.rw(&mut w, vc.len(), vc.len() + 2, vec![], &ax);
        w.fact
    }

    /// `v . (lkp . final(X)) == R(pc ++ hc ++ [final(X)])` from E3.
    fn mixed_to_e4(&mut self, e3: &Fact, x: &TypeExpr, pc: &[Term], hc: &[Term]) -> Fact {
        let v = self.val();
        let lf = self.lf(x);
        let s = self.b.sym(e3);
        let x1 = self.b.subs(&s, &lf);
        let c1 = self.mixed_chain(pc, hc, Term::final_(v.clone()));
        let x2 = self.b.append(&c1, &[self.lkp(), Term::final_(x.clone())], &v);
        let mut d = c1;
        d.push(self.lkp());
        d.push(Term::final_(x.clone()));
        let i = pc.len() + hc.len();
        let p = self.to_id1(&[Term::final_(v.clone()), self.lkp()]);
        let tgt = self.b.tgt(&d[0]);
        let (_, x3) = self.b.rewrite(&d, x, &tgt, i, i + 2, &[], &p);
        self.b.trans_all(&[x1, x2, x3])
    }

    /// Pure consequences of `h : a1 == a2`, one per equation of the plan.
    pub(crate) fn acc_forward(&mut self, plan: &AccPlan, h: &Fact) -> Vec<Fact> {
        match plan {
            AccPlan::Pure { .. } => vec![h.clone()],
            AccPlan::Both { n1, n2, vc1, vc2, x, .. } => {
                let hc = self.hc_of(x);
                let s1 = self.b.sym(n1);
                let hcanon = self.b.trans_all(&[s1, h.clone(), n2.clone()]);
                let s = self.b.subs(&hcanon, &self.hu(&hc));
                let t1 = self.strip(vc1, x, &hc);
                let t1 = self.b.sym(&t1);
                let t2 = self.strip(vc2, x, &hc);
                let w = self.b.trans_all(&[t1, s, t2]);
                vec![self.b.w2s(&w)]
            }
            AccPlan::Mixed { swapped, p, n, vc, x, pc, hc, .. } => {
                let h = if *swapped { self.b.sym(h) } else { h.clone() };
                let q = self.b.trans(&h, n);
                let s = self.b.subs(&q, &self.hu(hc));
                let mut w = self.start(&Term::comp(p.clone(), self.hu(hc)));
                let k = w.c.len() - 1;
                let ins = vec![Term::final_(self.val()), self.lkp()];
                let ip = self.to_id1(&ins);
                let ip = self.b.sym(&ip);
                self.rw(&mut w, k, k, ins, &ip);
                let ax = self.ax();
                self.rw(&mut w, k + 1, k + 3, vec![], &ax);
                let l = self.b.sym(&w.fact);
                let r = self.strip(vc, x, hc);
                let e3 = self.b.trans_all(&[l, s, r]);
                let e3 = self.b.w2s(&e3);
                let k = self.mixed_to_e4(&e3, x, pc, hc);
                let e4 = self.b.trans(&q, &k);
                let e4 = self.b.sym(&e4);
                vec![e3, e4]
            }
        }
    }

    /// `a1 == a2` from proofs of the plan's pure equations.
    pub(crate) fn acc_backward(&mut self, plan: &AccPlan, facts: &[Fact]) -> Fact {
        match plan {
            AccPlan::Pure { .. } => facts[0].clone(),
            AccPlan::Both { n1, n2, x, .. } => {
                let s = self.b.subs(&facts[0], &self.lf(x));
                let s2 = self.b.sym(n2);
                self.b.trans_all(&[n1.clone(), s, s2])
            }
            AccPlan::Mixed { swapped, n, x, pc, hc, .. } => {
                let k = self.mixed_to_e4(&facts[0], x, pc, hc);
                let acc_p = self.b.trans_all(&[n.clone(), k, facts[1].clone()]);
                if *swapped {
                    acc_p
                } else {
                    self.b.sym(&acc_p)
                }
            }
        }
    }

    fn hc_of(&mut self, x: &TypeExpr) -> Vec<Term> {
        let h = self.frag.inhabitant(x).expect("inhabitant checked by the plan");
        self.b.flatten(&h).0
    }

    fn mod_side(&mut self, f: &Term) -> ModSide {
        let (src, _) = self.b.types(f);
        let (form, n) = self.normalize_modifier(f);
        let (g, s) = match &form {
            ModifierForm::Accessor(_) => (f.clone(), self.lf(&src)),
            ModifierForm::Update { uc, ac, a, .. } => {
                let mut c = uc.clone();
                c.extend(ac.iter().cloned());
                (realize(&c, &src), a.clone())
            }
        };
        ModSide { f: f.clone(), form, n, g, s }
    }

    /// `f ~ g`.
    fn side_weak(&mut self, sd: &ModSide) -> Fact {
        match &sd.form {
            ModifierForm::Accessor(_) => self.b.refl(&sd.f, EqKind::Weak),
            ModifierForm::Update { uc, .. } => {
                let canon = sd.form.term(&self.frag.loc);
                let mut w = self.start(&canon);
                let ax = self.ax();
                self.rw(&mut w, uc.len(), uc.len() + 2, vec![], &ax);
                self.b.trans(&sd.n, &w.fact)
            }
        }
    }

    /// `final(Y) . f == upd . s`.
    fn side_effect(&mut self, sd: &ModSide, y: &TypeExpr) -> Fact {
        let fin = Term::final_(y.clone());
        match &sd.form {
            ModifierForm::Accessor(_) => {
                let (x, _) = self.b.types(&sd.f);
                let p = self.b.final_u(&Term::comp(fin, sd.f.clone()));
                let q = self.upd_lkp_final(&x);
                let q = self.b.sym(&q);
                self.b.trans(&p, &q)
            }
            ModifierForm::Update { uc, ac, .. } => {
                let r = self.b.repl(&sd.n, &fin);
                let canon = sd.form.term(&self.frag.loc);
                let mut w = self.start(&Term::comp(fin, canon));
                let k = uc.len() + 2;
                let seg = w.c[..k].to_vec();
                let p = self.to_id1(&seg);
                self.rw(&mut w, 0, k, vec![], &p);
                let mut f = self.b.trans(&r, &w.fact);
                if ac.is_empty() {
                    let is = self.b.id_source(&self.upd());
                    let is = self.b.sym(&is);
                    f = self.b.trans(&f, &is);
                }
                f
            }
        }
    }

    pub(crate) fn plan(&mut self, eq: &Equation) -> Result<Plan, StateError> {
        let (d1, d2) = self.frag.check_equation(eq)?;
        let weak = eq.kind == EqKind::Weak;
        if d1.max(d2) <= Decoration::Accessor {
            return Ok(Plan::Acc { weak, plan: self.acc_plan(&eq.lhs, &eq.rhs)? });
        }
        let (_, y) = self.b.types(&eq.lhs);
        let s1 = self.mod_side(&eq.lhs);
        let s2 = self.mod_side(&eq.rhs);
        let g = self.acc_plan(&s1.g, &s2.g)?;
        let s = if weak { None } else { Some(self.acc_plan(&s1.s, &s2.s)?) };
        Ok(Plan::Mod { weak, y, sides: [s1, s2], g, s })
    }

    /// Pure equations the plan reduces to, before filtering.
    pub(crate) fn plan_equations(&self, plan: &Plan) -> Vec<Equation> {
        match plan {
            Plan::Acc { plan, .. } => self.acc_equations(plan),
            Plan::Mod { g, s, .. } => {
                let mut v = self.acc_equations(g);
                if let Some(s) = s {
                    v.extend(self.acc_equations(s));
                }
                v
            }
        }
    }

    /// From `h` (the equation), proofs of every plan equation.
    pub(crate) fn forward(&mut self, plan: &Plan, h: &Fact) -> Vec<Fact> {
        match plan {
            Plan::Acc { plan, .. } => {
                let h = self.b.w2s(h);
                self.acc_forward(plan, &h)
            }
            Plan::Mod { y, sides: [s1, s2], g, s, .. } => {
                let w1 = self.side_weak(s1);
                let w1 = self.b.sym(&w1);
                let w2 = self.side_weak(s2);
                let gw = self.b.trans_all(&[w1, h.clone(), w2]);
                let gs = self.b.w2s(&gw);
                let mut out = self.acc_forward(g, &gs);
                if let Some(s) = s {
                    let f = self.b.repl(h, &Term::final_(y.clone()));
                    let t1 = self.side_effect(s1, y);
                    let t1 = self.b.sym(&t1);
                    let t2 = self.side_effect(s2, y);
                    let q = self.b.trans_all(&[t1, f, t2]);
                    let r = self.b.repl(&q, &self.lkp());
                    let k1 = self.cancel(&s1.s);
                    let k1 = self.b.sym(&k1);
                    let k2 = self.cancel(&s2.s);
                    let sw = self.b.trans_all(&[k1, r, k2]);
                    let ss = self.b.w2s(&sw);
                    out.extend(self.acc_forward(s, &ss));
                }
                out
            }
        }
    }

    /// The equation, from proofs of every plan equation (in order).
    pub(crate) fn backward(&mut self, plan: &Plan, facts: &[Fact]) -> Fact {
        match plan {
            Plan::Acc { weak, plan } => {
                let f = self.acc_backward(plan, facts);
                if *weak {
                    self.b.s2w(&f)
                } else {
                    f
                }
            }
            Plan::Mod { weak, y, sides: [s1, s2], g, s } => {
                let ng = self.acc_equations(g).len();
                let gf = self.acc_backward(g, &facts[..ng]);
                let w1 = self.side_weak(s1);
                let gw = self.b.s2w(&gf);
                let w2 = self.side_weak(s2);
                let w2 = self.b.sym(&w2);
                let wk = self.b.trans_all(&[w1, gw, w2]);
                if *weak {
                    return wk;
                }
                let s = s.as_ref().expect("strong plans carry the state part");
                let sf = self.acc_backward(s, &facts[ng..]);
                let t1 = self.side_effect(s1, y);
                let r = self.b.repl(&sf, &self.upd());
                let t2 = self.side_effect(s2, y);
                let t2 = self.b.sym(&t2);
                let st = self.b.trans_all(&[t1, r, t2]);
                self.b.effect(&wk, &st)
            }
        }
    }
}
