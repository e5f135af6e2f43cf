use std::collections::HashMap;
use std::sync::OnceLock;

use crate::syntax::{Decoration, TheoryId};

/// Decoration annotation in a schema: a literal, a decoration metavariable,
/// or the maximum of two of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecPat {
    Lit(Decoration),
    Meta(&'static str),
    Max(&'static str, &'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KindPat {
    Strong,
    Weak,
    Meta(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TyPat {
    Meta(&'static str),
    /// Source / target of the term bound to a metavariable.
    SrcOf(&'static str),
    TgtOf(&'static str),
    /// Value type of the location or exception bound to a metavariable.
    ValOf(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TmPat {
    Meta(&'static str),
    Id(TyPat),
    Comp(Box<TmPat>, Box<TmPat>),
    Pair(Box<TmPat>, Box<TmPat>),
    LPair(Box<TmPat>, Box<TmPat>),
    RPair(Box<TmPat>, Box<TmPat>),
    Proj1(TyPat, TyPat),
    Proj2(TyPat, TyPat),
    Final(TyPat),
    Copair(Box<TmPat>, Box<TmPat>),
    LCopair(Box<TmPat>, Box<TmPat>),
    RCopair(Box<TmPat>, Box<TmPat>),
    In1(TyPat, TyPat),
    In2(TyPat, TyPat),
    Initial(TyPat),
    Lookup(&'static str),
    Update(&'static str),
    Tag(&'static str),
    Untag(&'static str),
    Downcast(Box<TmPat>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JudgPat {
    Term { term: TmPat, dec: DecPat },
    Eq { kind: KindPat, lhs: TmPat, rhs: TmPat },
    /// The declared pure axiom named by a metavariable.
    Axiom(&'static str),
}

/// Premise pattern; the `ForEach` forms expand to one premise per declared
/// location (resp. exception), in declaration order, with `meta` bound to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PremisePat {
    One(JudgPat),
    ForEachLoc { meta: &'static str, pat: JudgPat },
    ForEachExn { meta: &'static str, pat: JudgPat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sort {
    /// Term whose decoration must not exceed the bound.
    Term(DecPat),
    Type,
    Kind,
    /// Decoration not exceeding the given maximum.
    Dec(Decoration),
    Loc,
    Exn,
    Axiom,
}

impl Sort {
    pub fn describe(&self) -> &'static str {
        match self {
            Sort::Term(_) => "term",
            Sort::Type => "type",
            Sort::Kind => "equation kind",
            Sort::Dec(_) => "decoration",
            Sort::Loc => "location",
            Sort::Exn => "exception",
            Sort::Axiom => "axiom name",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SideCond {
    /// When the kind metavariable is weak, the term metavariable must be pure.
    PureIfWeak { kind: &'static str, term: &'static str },
    /// The two name metavariables must differ.
    Distinct(&'static str, &'static str),
    /// The instantiated conclusion must be a hypothesis of the derivation.
    IsHypothesis,
    /// The term metavariable must be a declared pure symbol.
    IsSymbol(&'static str),
    /// The term metavariable must be a declared variable.
    IsVariable(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSchema {
    pub name: &'static str,
    pub metas: Vec<(&'static str, Sort)>,
    pub premises: Vec<PremisePat>,
    pub conclusion: JudgPat,
    pub side: Vec<SideCond>,
}

impl RuleSchema {
    pub fn sort_of(&self, meta: &str) -> Option<&Sort> {
        self.metas.iter().find(|(m, _)| *m == meta).map(|(_, s)| s)
    }
}

// Pattern shorthands used by the catalogue.
fn m(x: &'static str) -> TmPat {
    TmPat::Meta(x)
}
fn c(g: TmPat, f: TmPat) -> TmPat {
    TmPat::Comp(Box::new(g), Box::new(f))
}
fn src(x: &'static str) -> TyPat {
    TyPat::SrcOf(x)
}
fn tgt(x: &'static str) -> TyPat {
    TyPat::TgtOf(x)
}
fn strong(l: TmPat, r: TmPat) -> JudgPat {
    JudgPat::Eq { kind: KindPat::Strong, lhs: l, rhs: r }
}
fn weak(l: TmPat, r: TmPat) -> JudgPat {
    JudgPat::Eq { kind: KindPat::Weak, lhs: l, rhs: r }
}
fn keq(k: &'static str, l: TmPat, r: TmPat) -> JudgPat {
    JudgPat::Eq { kind: KindPat::Meta(k), lhs: l, rhs: r }
}
fn typed(t: TmPat, d: DecPat) -> JudgPat {
    JudgPat::Term { term: t, dec: d }
}
fn one(j: JudgPat) -> PremisePat {
    PremisePat::One(j)
}
fn tm(d: Decoration) -> Sort {
    Sort::Term(DecPat::Lit(d))
}

use Decoration::{Accessor as D1, Modifier as D2, Pure as D0};

fn rule(
    name: &'static str,
    metas: Vec<(&'static str, Sort)>,
    premises: Vec<PremisePat>,
    conclusion: JudgPat,
) -> RuleSchema {
    RuleSchema { name, metas, premises, conclusion, side: Vec::new() }
}

fn with_side(mut r: RuleSchema, s: SideCond) -> RuleSchema {
    r.side.push(s);
    r
}

/// Pair/copair family: formation, the two projection/injection laws and
/// uniqueness, for component bounds `b1`, `b2` and the kinds of the two laws.
struct Family {
    prefix: &'static str,
    b1: Decoration,
    b2: Decoration,
    k1: KindPat,
    k2: KindPat,
    /// Conclusion decoration of the formation rule (max of premises when None).
    form_dec: Option<Decoration>,
    build: fn(Box<TmPat>, Box<TmPat>) -> TmPat,
    coproduct: bool,
}

fn family(fam: Family) -> Vec<RuleSchema> {
    let Family { prefix, b1, b2, k1, k2, form_dec, build, coproduct } = fam;
    let eq_name: &'static str = Box::leak(format!("{prefix}-eq").into_boxed_str());
    let eq1: &'static str = Box::leak(format!("{eq_name}.1").into_boxed_str());
    let eq2: &'static str = Box::leak(format!("{eq_name}.2").into_boxed_str());
    let uniq: &'static str = Box::leak(format!("{prefix}-u").into_boxed_str());
    let both = || build(Box::new(m("f1")), Box::new(m("f2")));
    let (p1, p2) = if coproduct {
        (TmPat::In1(src("f1"), src("f2")), TmPat::In2(src("f1"), src("f2")))
    } else {
        (TmPat::Proj1(tgt("f1"), tgt("f2")), TmPat::Proj2(tgt("f1"), tgt("f2")))
    };
    let law = |p: TmPat, other: TmPat| if coproduct { c(other, p) } else { c(p, other) };
    let eqj = |k: &KindPat, l: TmPat, r: TmPat| JudgPat::Eq { kind: k.clone(), lhs: l, rhs: r };
    let form = match form_dec {
        Some(d) => rule(
            prefix,
            vec![("f1", tm(b1)), ("f2", tm(b2))],
            vec![one(typed(m("f1"), DecPat::Lit(b1))), one(typed(m("f2"), DecPat::Lit(b2)))],
            typed(both(), DecPat::Lit(d)),
        ),
        None => rule(
            prefix,
            vec![
                ("f1", Sort::Term(DecPat::Meta("d1"))),
                ("f2", Sort::Term(DecPat::Meta("d2"))),
                ("d1", Sort::Dec(b1)),
                ("d2", Sort::Dec(b2)),
            ],
            vec![one(typed(m("f1"), DecPat::Meta("d1"))), one(typed(m("f2"), DecPat::Meta("d2")))],
            typed(both(), DecPat::Max("d1", "d2")),
        ),
    };
    let fs = || vec![("f1", tm(b1)), ("f2", tm(b2))];
    vec![
        form,
        rule(eq1, fs(), vec![], eqj(&k1, law(p1.clone(), both()), m("f1"))),
        rule(eq2, fs(), vec![], eqj(&k2, law(p2.clone(), both()), m("f2"))),
        rule(
            uniq,
            vec![("g", tm(b1.max(b2))), ("f1", tm(b1)), ("f2", tm(b2))],
            vec![one(eqj(&k1, law(p1, m("g")), m("f1"))), one(eqj(&k2, law(p2, m("g")), m("f2")))],
            strong(m("g"), both()),
        ),
    ]
}

fn pair_ctor(a: Box<TmPat>, b: Box<TmPat>) -> TmPat {
    TmPat::Pair(a, b)
}
fn lpair_ctor(a: Box<TmPat>, b: Box<TmPat>) -> TmPat {
    TmPat::LPair(a, b)
}
fn rpair_ctor(a: Box<TmPat>, b: Box<TmPat>) -> TmPat {
    TmPat::RPair(a, b)
}
fn copair_ctor(a: Box<TmPat>, b: Box<TmPat>) -> TmPat {
    TmPat::Copair(a, b)
}
fn lcopair_ctor(a: Box<TmPat>, b: Box<TmPat>) -> TmPat {
    TmPat::LCopair(a, b)
}
fn rcopair_ctor(a: Box<TmPat>, b: Box<TmPat>) -> TmPat {
    TmPat::RCopair(a, b)
}

fn base_rules(theory: TheoryId) -> Vec<RuleSchema> {
    let comonadic = theory.is_comonadic();
    let mut v = vec![
        rule("refl", vec![("f", tm(D2)), ("k", Sort::Kind)], vec![], keq("k", m("f"), m("f"))),
        rule(
            "sym",
            vec![("f", tm(D2)), ("g", tm(D2)), ("k", Sort::Kind)],
            vec![one(keq("k", m("f"), m("g")))],
            keq("k", m("g"), m("f")),
        ),
        rule(
            "trans",
            vec![("f", tm(D2)), ("g", tm(D2)), ("h", tm(D2)), ("k", Sort::Kind)],
            vec![one(keq("k", m("f"), m("g"))), one(keq("k", m("g"), m("h")))],
            keq("k", m("f"), m("h")),
        ),
    ];
    let repl = rule(
        "repl",
        vec![("f1", tm(D2)), ("f2", tm(D2)), ("g", tm(D2)), ("k", Sort::Kind)],
        vec![one(keq("k", m("f1"), m("f2")))],
        keq("k", c(m("g"), m("f1")), c(m("g"), m("f2"))),
    );
    let subs = rule(
        "subs",
        vec![("f", tm(D2)), ("g1", tm(D2)), ("g2", tm(D2)), ("k", Sort::Kind)],
        vec![one(keq("k", m("g1"), m("g2")))],
        keq("k", c(m("g1"), m("f")), c(m("g2"), m("f"))),
    );
    if comonadic {
        v.push(with_side(repl, SideCond::PureIfWeak { kind: "k", term: "g" }));
        v.push(subs);
    } else {
        v.push(repl);
        v.push(with_side(subs, SideCond::PureIfWeak { kind: "k", term: "f" }));
    }
    v.extend([
        with_side(
            rule("symbol", vec![("f", tm(D0))], vec![], typed(m("f"), DecPat::Lit(D0))),
            SideCond::IsSymbol("f"),
        ),
        with_side(
            rule(
                "variable",
                vec![("f", Sort::Term(DecPat::Meta("d"))), ("d", Sort::Dec(D2))],
                vec![],
                typed(m("f"), DecPat::Meta("d")),
            ),
            SideCond::IsVariable("f"),
        ),
        rule("id", vec![("A", Sort::Type)], vec![], typed(TmPat::Id(TyPat::Meta("A")), DecPat::Lit(D0))),
        rule(
            "comp",
            vec![
                ("f", Sort::Term(DecPat::Meta("d1"))),
                ("g", Sort::Term(DecPat::Meta("d2"))),
                ("d1", Sort::Dec(D2)),
                ("d2", Sort::Dec(D2)),
            ],
            vec![one(typed(m("f"), DecPat::Meta("d1"))), one(typed(m("g"), DecPat::Meta("d2")))],
            typed(c(m("g"), m("f")), DecPat::Max("d1", "d2")),
        ),
        rule("id-source", vec![("f", tm(D2))], vec![], strong(c(m("f"), TmPat::Id(src("f"))), m("f"))),
        rule("id-target", vec![("f", tm(D2))], vec![], strong(c(TmPat::Id(tgt("f")), m("f")), m("f"))),
        rule(
            "assoc",
            vec![("f", tm(D2)), ("g", tm(D2)), ("h", tm(D2))],
            vec![],
            strong(c(m("h"), c(m("g"), m("f"))), c(c(m("h"), m("g")), m("f"))),
        ),
    ]);

    // Products.
    let pb = if comonadic { D1 } else { D0 };
    let proj = |name: &'static str, second: bool| {
        let t = if second {
            TmPat::Proj2(TyPat::Meta("A"), TyPat::Meta("B"))
        } else {
            TmPat::Proj1(TyPat::Meta("A"), TyPat::Meta("B"))
        };
        rule(name, vec![("A", Sort::Type), ("B", Sort::Type)], vec![], typed(t, DecPat::Lit(D0)))
    };
    v.push(proj("prod.1", false));
    v.push(proj("prod.2", true));
    v.extend(family(Family {
        prefix: "pair",
        b1: pb,
        b2: pb,
        k1: KindPat::Strong,
        k2: KindPat::Strong,
        form_dec: None,
        build: pair_ctor,
        coproduct: false,
    }));
    v.push(rule("final", vec![("A", Sort::Type)], vec![], typed(TmPat::Final(TyPat::Meta("A")), DecPat::Lit(D0))));
    v.push(rule("final-u", vec![("f", tm(pb))], vec![], strong(m("f"), TmPat::Final(src("f")))));

    // Coproducts.
    let (cb, ib) = match theory {
        TheoryId::Com => (D0, D0),
        TheoryId::St => (D2, D0),
        TheoryId::Mon | TheoryId::Exc => (D1, D1),
    };
    let inj = |name: &'static str, second: bool| {
        let t = if second {
            TmPat::In2(TyPat::Meta("A"), TyPat::Meta("B"))
        } else {
            TmPat::In1(TyPat::Meta("A"), TyPat::Meta("B"))
        };
        rule(name, vec![("A", Sort::Type), ("B", Sort::Type)], vec![], typed(t, DecPat::Lit(D0)))
    };
    v.push(inj("coprod.1", false));
    v.push(inj("coprod.2", true));
    v.extend(family(Family {
        prefix: "copair",
        b1: cb,
        b2: cb,
        k1: KindPat::Strong,
        k2: KindPat::Strong,
        form_dec: None,
        build: copair_ctor,
        coproduct: true,
    }));
    v.push(rule("initial", vec![("A", Sort::Type)], vec![], typed(TmPat::Initial(TyPat::Meta("A")), DecPat::Lit(D0))));
    v.push(rule("initial-u", vec![("g", tm(ib))], vec![], strong(m("g"), TmPat::Initial(tgt("g")))));

    // Conversions and assumptions.
    v.extend([
        rule("up-1", vec![("f", tm(D0))], vec![one(typed(m("f"), DecPat::Lit(D0)))], typed(m("f"), DecPat::Lit(D1))),
        rule("up-2", vec![("f", tm(D1))], vec![one(typed(m("f"), DecPat::Lit(D1)))], typed(m("f"), DecPat::Lit(D2))),
        rule(
            "strong-to-weak",
            vec![("f", tm(D2)), ("g", tm(D2))],
            vec![one(strong(m("f"), m("g")))],
            weak(m("f"), m("g")),
        ),
        rule(
            "weak-to-strong",
            vec![("f", tm(D1)), ("g", tm(D1))],
            vec![one(weak(m("f"), m("g")))],
            strong(m("f"), m("g")),
        ),
        with_side(
            rule("hyp", vec![("lhs", tm(D2)), ("rhs", tm(D2)), ("k", Sort::Kind)], vec![], keq("k", m("lhs"), m("rhs"))),
            SideCond::IsHypothesis,
        ),
        rule("axiom", vec![("name", Sort::Axiom)], vec![], JudgPat::Axiom("name")),
    ]);
    v
}

fn state_rules() -> Vec<RuleSchema> {
    let lk = |x: &'static str| TmPat::Lookup(x);
    let mut v = family(Family {
        prefix: "l-pair",
        b1: D1,
        b2: D2,
        k1: KindPat::Weak,
        k2: KindPat::Strong,
        form_dec: Some(D2),
        build: lpair_ctor,
        coproduct: false,
    });
    v.extend(family(Family {
        prefix: "r-pair",
        b1: D2,
        b2: D1,
        k1: KindPat::Strong,
        k2: KindPat::Weak,
        form_dec: Some(D2),
        build: rpair_ctor,
        coproduct: false,
    }));
    v.extend([
        rule(
            "effect",
            vec![("f", tm(D2)), ("g", tm(D2))],
            vec![
                one(weak(m("f"), m("g"))),
                one(strong(c(TmPat::Final(tgt("f")), m("f")), c(TmPat::Final(tgt("g")), m("g")))),
            ],
            strong(m("f"), m("g")),
        ),
        rule("lookup", vec![("X", Sort::Loc)], vec![], typed(lk("X"), DecPat::Lit(D1))),
        rule("update", vec![("X", Sort::Loc)], vec![], typed(TmPat::Update("X"), DecPat::Lit(D2))),
        rule(
            "lookupdate-same",
            vec![("X", Sort::Loc)],
            vec![],
            weak(c(lk("X"), TmPat::Update("X")), TmPat::Id(TyPat::ValOf("X"))),
        ),
        with_side(
            rule(
                "lookupdate-other",
                vec![("X", Sort::Loc), ("Y", Sort::Loc)],
                vec![],
                weak(c(lk("Y"), TmPat::Update("X")), c(lk("Y"), TmPat::Final(TyPat::ValOf("X")))),
            ),
            SideCond::Distinct("X", "Y"),
        ),
        rule(
            "local-global",
            vec![("f", tm(D2)), ("g", tm(D2))],
            vec![PremisePat::ForEachLoc { meta: "L", pat: weak(c(lk("L"), m("f")), c(lk("L"), m("g"))) }],
            strong(m("f"), m("g")),
        ),
    ]);
    v
}

fn exception_rules() -> Vec<RuleSchema> {
    let tg = |x: &'static str| TmPat::Tag(x);
    let mut v = family(Family {
        prefix: "l-copair",
        b1: D1,
        b2: D2,
        k1: KindPat::Weak,
        k2: KindPat::Strong,
        form_dec: Some(D2),
        build: lcopair_ctor,
        coproduct: true,
    });
    v.extend(family(Family {
        prefix: "r-copair",
        b1: D2,
        b2: D1,
        k1: KindPat::Strong,
        k2: KindPat::Weak,
        form_dec: Some(D2),
        build: rcopair_ctor,
        coproduct: true,
    }));
    let down = |x: &'static str| TmPat::Downcast(Box::new(m(x)));
    v.extend([
        rule(
            "effect",
            vec![("f", tm(D2)), ("g", tm(D2))],
            vec![
                one(weak(m("f"), m("g"))),
                one(strong(c(m("f"), TmPat::Initial(src("f"))), c(m("g"), TmPat::Initial(src("g"))))),
            ],
            strong(m("f"), m("g")),
        ),
        rule("tag", vec![("T", Sort::Exn)], vec![], typed(tg("T"), DecPat::Lit(D1))),
        rule("untag", vec![("T", Sort::Exn)], vec![], typed(TmPat::Untag("T"), DecPat::Lit(D2))),
        rule(
            "untag-tag-same",
            vec![("T", Sort::Exn)],
            vec![],
            weak(c(TmPat::Untag("T"), tg("T")), TmPat::Id(TyPat::ValOf("T"))),
        ),
        with_side(
            rule(
                "untag-tag-other",
                vec![("T", Sort::Exn), ("R", Sort::Exn)],
                vec![],
                weak(c(TmPat::Untag("T"), tg("R")), c(TmPat::Initial(TyPat::ValOf("T")), tg("R"))),
            ),
            SideCond::Distinct("T", "R"),
        ),
        rule(
            "local-global",
            vec![("f", tm(D2)), ("g", tm(D2))],
            vec![PremisePat::ForEachExn { meta: "L", pat: weak(c(m("f"), tg("L")), c(m("g"), tg("L"))) }],
            strong(m("f"), m("g")),
        ),
        rule("downcast", vec![("f", tm(D2))], vec![one(typed(m("f"), DecPat::Lit(D2)))], typed(down("f"), DecPat::Lit(D1))),
        rule("down-weak", vec![("f", tm(D2))], vec![], weak(m("f"), down("f"))),
        rule(
            "down-eq",
            vec![("f", tm(D2)), ("g", tm(D2))],
            vec![one(weak(m("f"), m("g")))],
            strong(down("f"), down("g")),
        ),
        rule(
            "down-eq-inv",
            vec![("f", tm(D2)), ("g", tm(D2))],
            vec![one(strong(down("f"), down("g")))],
            weak(m("f"), m("g")),
        ),
    ]);
    v
}

fn build(theory: TheoryId) -> Vec<RuleSchema> {
    let mut v = base_rules(theory);
    match theory {
        TheoryId::St => v.extend(state_rules()),
        TheoryId::Exc => v.extend(exception_rules()),
        _ => {}
    }
    v
}

struct Catalogue {
    rules: Vec<RuleSchema>,
    index: HashMap<&'static str, usize>,
}

fn catalogue(theory: TheoryId) -> &'static Catalogue {
    static CATS: OnceLock<Vec<Catalogue>> = OnceLock::new();
    let cats = CATS.get_or_init(|| {
        TheoryId::ALL
            .iter()
            .map(|&t| {
                let rules = build(t);
                let index = rules.iter().enumerate().map(|(i, r)| (r.name, i)).collect();
                Catalogue { rules, index }
            })
            .collect()
    });
    let i = TheoryId::ALL.iter().position(|&t| t == theory).expect("theory listed in ALL");
    &cats[i]
}

/// All decorated rules of `theory`.
pub fn rule_catalogue(theory: TheoryId) -> &'static [RuleSchema] {
    &catalogue(theory).rules
}

pub fn find_rule(theory: TheoryId, name: &str) -> Option<&'static RuleSchema> {
    let cat = catalogue(theory);
    cat.index.get(name).map(|&i| &cat.rules[i])
}
