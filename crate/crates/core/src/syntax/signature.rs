use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::term::{EqKind, Equation, Term, TermKind};
use super::types::{Decoration, Name, TypeExpr};

/// Names that cannot be used for symbols, locations or exceptions because
/// the term grammar reserves them.
pub const KEYWORDS: &[&str] = &[
    "id", "pair", "lpair", "rpair", "pr1", "pr2", "final", "copair", "lcopair", "rcopair", "in1", "in2",
    "initial", "lkp", "upd", "tag", "untag", "down", "throw", "try", "catch", "type", "pure", "location",
    "exception", "axiom", "inhabit", "var", "hyp", "theory",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown type `{0}`")]
    UnknownType(Name),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Name),
    #[error("unknown location `{0}`")]
    UnknownLocation(Name),
    #[error("unknown exception name `{0}`")]
    UnknownException(Name),
    #[error("`{0}` is not a location or exception name")]
    UnknownValueType(Name),
    #[error("type mismatch at {path}: {msg}")]
    Mismatch { path: String, msg: String },
    #[error("equation sides are not parallel: {lhs} vs {rhs}")]
    NotParallel { lhs: String, rhs: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigError {
    #[error("{line}:{col}: duplicate name `{name}`")]
    Duplicate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: ill-typed axiom `{name}`: {reason}")]
    IllTypedAxiom { line: usize, col: usize, name: String, reason: String },
    #[error("{line}:{col}: {msg}")]
    Invalid { line: usize, col: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureSym {
    pub name: Name,
    pub src: TypeExpr,
    pub tgt: TypeExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub name: Name,
    pub eq: Equation,
}

/// Schematic term variable, only introduced by derivation files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: Name,
    pub src: TypeExpr,
    pub tgt: TypeExpr,
    pub dec: Decoration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Pure(usize),
    Location(usize),
    Exception(usize),
    Var(usize),
}

/// Declarations of the object language. Types stored here are already
/// resolved: they never contain `Val`.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    pub types: Vec<Name>,
    pub pures: Vec<PureSym>,
    pub locations: Vec<(Name, TypeExpr)>,
    pub exceptions: Vec<(Name, TypeExpr)>,
    pub axioms: Vec<Axiom>,
    /// `(type, term)`; the term is `1 -> type` (inhabitant) or `type -> 0`
    /// (co-inhabitant, on the exception side).
    pub inhabitants: Vec<(TypeExpr, Term)>,
    pub vars: Vec<VarDecl>,
    names: HashMap<Name, Entry>,
}

fn loc0() -> (usize, usize) {
    (0, 0)
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn has_type(&self, n: &str) -> bool {
        self.types.iter().any(|t| &**t == n)
    }

    pub fn pure_sym(&self, n: &str) -> Option<&PureSym> {
        match self.names.get(n) {
            Some(Entry::Pure(i)) => Some(&self.pures[*i]),
            _ => None,
        }
    }

    pub fn var(&self, n: &str) -> Option<&VarDecl> {
        match self.names.get(n) {
            Some(Entry::Var(i)) => Some(&self.vars[*i]),
            _ => None,
        }
    }

    pub fn is_location(&self, n: &str) -> bool {
        matches!(self.names.get(n), Some(Entry::Location(_)))
    }

    pub fn is_exception(&self, n: &str) -> bool {
        matches!(self.names.get(n), Some(Entry::Exception(_)))
    }

    pub fn location_type(&self, n: &str) -> Option<&TypeExpr> {
        match self.names.get(n) {
            Some(Entry::Location(i)) => Some(&self.locations[*i].1),
            _ => None,
        }
    }

    pub fn exception_type(&self, n: &str) -> Option<&TypeExpr> {
        match self.names.get(n) {
            Some(Entry::Exception(i)) => Some(&self.exceptions[*i].1),
            _ => None,
        }
    }

    pub fn axiom(&self, n: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| &*a.name == n)
    }

    /// Closed pure term `1 -> ty`. The unit type is inhabited by `id(1)`.
    pub fn inhabitant(&self, ty: &TypeExpr) -> Option<Term> {
        if ty.is_unit() {
            return Some(Term::id(TypeExpr::Unit));
        }
        self.inhabitants
            .iter()
            .find(|(t, h)| t == ty && matches!(self.typecheck(h), Ok((TypeExpr::Unit, _))))
            .map(|(_, h)| h.clone())
    }

    /// Closed pure term `ty -> 0`. The empty type is co-inhabited by `id(0)`.
    pub fn coinhabitant(&self, ty: &TypeExpr) -> Option<Term> {
        if matches!(ty, TypeExpr::Empty) {
            return Some(Term::id(TypeExpr::Empty));
        }
        self.inhabitants
            .iter()
            .find(|(t, h)| t == ty && matches!(self.typecheck(h), Ok((_, TypeExpr::Empty))))
            .map(|(_, h)| h.clone())
    }

    fn claim(&mut self, n: &Name, e: Entry, pos: (usize, usize)) -> Result<(), SigError> {
        if KEYWORDS.contains(&&**n) {
            return Err(SigError::Invalid { line: pos.0, col: pos.1, msg: format!("`{n}` is a reserved word") });
        }
        if self.names.contains_key(n) {
            return Err(SigError::Duplicate { line: pos.0, col: pos.1, name: n.to_string() });
        }
        self.names.insert(n.clone(), e);
        Ok(())
    }

    pub fn add_type(&mut self, n: Name) -> Result<(), SigError> {
        self.add_type_at(n, loc0())
    }

    pub fn add_type_at(&mut self, n: Name, pos: (usize, usize)) -> Result<(), SigError> {
        if self.has_type(&n) {
            return Err(SigError::Duplicate { line: pos.0, col: pos.1, name: n.to_string() });
        }
        if KEYWORDS.contains(&&*n) {
            return Err(SigError::Invalid { line: pos.0, col: pos.1, msg: format!("`{n}` is a reserved word") });
        }
        self.types.push(n);
        Ok(())
    }

    fn declare_bases(&mut self, t: &TypeExpr) {
        match t {
            TypeExpr::Base(n) => {
                if !self.has_type(n) {
                    self.types.push(n.clone());
                }
            }
            TypeExpr::Prod(a, b) | TypeExpr::Coprod(a, b) => {
                self.declare_bases(a);
                self.declare_bases(b);
            }
            _ => {}
        }
    }

    fn value_type(&self, t: &TypeExpr, pos: (usize, usize)) -> Result<TypeExpr, SigError> {
        if contains_val(t) {
            return Err(SigError::Invalid {
                line: pos.0,
                col: pos.1,
                msg: "value types may not mention V[..]".into(),
            });
        }
        Ok(t.clone())
    }

    /// Declares a location; undeclared base names in its value type are declared implicitly.
    pub fn add_location(&mut self, n: Name, val: TypeExpr) -> Result<(), SigError> {
        self.add_location_at(n, val, loc0())
    }

    pub fn add_location_at(&mut self, n: Name, val: TypeExpr, pos: (usize, usize)) -> Result<(), SigError> {
        let val = self.value_type(&val, pos)?;
        self.claim(&n, Entry::Location(self.locations.len()), pos)?;
        self.declare_bases(&val);
        self.locations.push((n, val));
        Ok(())
    }

    pub fn add_exception(&mut self, n: Name, val: TypeExpr) -> Result<(), SigError> {
        self.add_exception_at(n, val, loc0())
    }

    pub fn add_exception_at(&mut self, n: Name, val: TypeExpr, pos: (usize, usize)) -> Result<(), SigError> {
        let val = self.value_type(&val, pos)?;
        self.claim(&n, Entry::Exception(self.exceptions.len()), pos)?;
        self.declare_bases(&val);
        self.exceptions.push((n, val));
        Ok(())
    }

    pub fn add_pure(&mut self, n: Name, src: TypeExpr, tgt: TypeExpr) -> Result<(), SigError> {
        self.add_pure_at(n, src, tgt, loc0())
    }

    pub fn add_pure_at(&mut self, n: Name, src: TypeExpr, tgt: TypeExpr, pos: (usize, usize)) -> Result<(), SigError> {
        let invalid = |e: TypeError| SigError::Invalid { line: pos.0, col: pos.1, msg: e.to_string() };
        let src = self.resolve(&src).map_err(invalid)?;
        let tgt = self.resolve(&tgt).map_err(invalid)?;
        self.claim(&n, Entry::Pure(self.pures.len()), pos)?;
        self.pures.push(PureSym { name: n, src, tgt });
        Ok(())
    }

    pub fn add_var(&mut self, v: VarDecl) -> Result<(), SigError> {
        self.add_var_at(v, loc0())
    }

    pub fn add_var_at(&mut self, v: VarDecl, pos: (usize, usize)) -> Result<(), SigError> {
        let invalid = |e: TypeError| SigError::Invalid { line: pos.0, col: pos.1, msg: e.to_string() };
        let src = self.resolve(&v.src).map_err(invalid)?;
        let tgt = self.resolve(&v.tgt).map_err(invalid)?;
        self.claim(&v.name, Entry::Var(self.vars.len()), pos)?;
        self.vars.push(VarDecl { src, tgt, ..v });
        Ok(())
    }

    /// Adds a named pure strong axiom after checking it is well typed and parallel.
    pub fn add_axiom(&mut self, n: Name, eq: Equation) -> Result<(), SigError> {
        self.add_axiom_at(n, eq, loc0())
    }

    pub fn add_axiom_at(&mut self, n: Name, eq: Equation, pos: (usize, usize)) -> Result<(), SigError> {
        let ill = |reason: String| SigError::IllTypedAxiom { line: pos.0, col: pos.1, name: n.to_string(), reason };
        if self.axioms.iter().any(|a| a.name == n) {
            return Err(SigError::Duplicate { line: pos.0, col: pos.1, name: n.to_string() });
        }
        if eq.kind != EqKind::Strong {
            return Err(ill("axioms must be strong equations".into()));
        }
        let eq = Equation::new(
            eq.kind,
            self.resolve_term(&eq.lhs).map_err(|e| ill(e.to_string()))?,
            self.resolve_term(&eq.rhs).map_err(|e| ill(e.to_string()))?,
        );
        self.check_equation(&eq).map_err(|e| ill(e.to_string()))?;
        if !is_pure_syntax(&eq.lhs) || !is_pure_syntax(&eq.rhs) {
            return Err(ill("axioms must relate pure terms".into()));
        }
        self.axioms.push(Axiom { name: n, eq });
        Ok(())
    }

    pub fn add_inhabitant(&mut self, ty: TypeExpr, term: Term) -> Result<(), SigError> {
        self.add_inhabitant_at(ty, term, loc0())
    }

    pub fn add_inhabitant_at(&mut self, ty: TypeExpr, term: Term, pos: (usize, usize)) -> Result<(), SigError> {
        let invalid = |msg: String| SigError::Invalid { line: pos.0, col: pos.1, msg };
        let ty = self.resolve(&ty).map_err(|e| invalid(e.to_string()))?;
        let term = self.resolve_term(&term).map_err(|e| invalid(e.to_string()))?;
        let (s, t) = self.typecheck(&term).map_err(|e| invalid(e.to_string()))?;
        let ok = (s == TypeExpr::Unit && t == ty) || (s == ty && t == TypeExpr::Empty);
        if !ok {
            return Err(invalid(format!("inhabitant of {ty} must have type 1 -> {ty} or {ty} -> 0, found {s} -> {t}")));
        }
        if !is_pure_syntax(&term) {
            return Err(invalid("inhabitants must be pure".into()));
        }
        self.inhabitants.push((ty, term));
        Ok(())
    }

    /// Copy of the signature extended with schematic variables.
    pub fn with_vars(&self, vars: &[VarDecl]) -> Result<Signature, SigError> {
        let mut s = self.clone();
        for v in vars {
            s.add_var(v.clone())?;
        }
        Ok(s)
    }

    /// Replaces `Val` by declared value types and checks base names.
    pub fn resolve(&self, t: &TypeExpr) -> Result<TypeExpr, TypeError> {
        Ok(match t {
            TypeExpr::Base(n) => {
                if !self.has_type(n) {
                    return Err(TypeError::UnknownType(n.clone()));
                }
                t.clone()
            }
            TypeExpr::Unit | TypeExpr::Empty => t.clone(),
            TypeExpr::Prod(a, b) => TypeExpr::prod(self.resolve(a)?, self.resolve(b)?),
            TypeExpr::Coprod(a, b) => TypeExpr::coprod(self.resolve(a)?, self.resolve(b)?),
            TypeExpr::Val(n) => self
                .location_type(n)
                .or_else(|| self.exception_type(n))
                .cloned()
                .ok_or_else(|| TypeError::UnknownValueType(n.clone()))?,
        })
    }

    /// Resolves every type annotation inside a term.
    pub fn resolve_term(&self, t: &Term) -> Result<Term, TypeError> {
        let mut err = None;
        check_types(t, &mut |ty| {
            if err.is_none() {
                if let Err(e) = self.resolve(ty) {
                    err = Some(e);
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(t.map_types(&|ty| self.resolve(ty).unwrap_or_else(|_| ty.clone()))),
        }
    }

    /// Source and target of a term.
    pub fn typecheck(&self, t: &Term) -> Result<(TypeExpr, TypeExpr), TypeError> {
        let mut path = Vec::new();
        self.tc(t, &mut path)
    }

    fn mismatch(path: &[usize], msg: String) -> TypeError {
        let mut p = String::from("root");
        for i in path {
            p.push('.');
            p.push_str(&i.to_string());
        }
        TypeError::Mismatch { path: p, msg }
    }

    fn tc(&self, t: &Term, path: &mut Vec<usize>) -> Result<(TypeExpr, TypeExpr), TypeError> {
        use TermKind::*;
        let sub = |this: &Self, i: usize, c: &Term, path: &mut Vec<usize>| {
            path.push(i);
            let r = this.tc(c, path);
            path.pop();
            r
        };
        Ok(match t.kind() {
            Id(a) => {
                let a = self.resolve(a)?;
                (a.clone(), a)
            }
            Comp(g, f) => {
                let (a, b) = sub(self, 1, f, path)?;
                let (b2, c) = sub(self, 0, g, path)?;
                if b != b2 {
                    return Err(Self::mismatch(path, format!("composing `{g}` : {b2} -> {c} after `{f}` : {a} -> {b}")));
                }
                (a, c)
            }
            Pair(f1, f2) | LPair(f1, f2) | RPair(f1, f2) => {
                let (a1, b1) = sub(self, 0, f1, path)?;
                let (a2, b2) = sub(self, 1, f2, path)?;
                if a1 != a2 {
                    return Err(Self::mismatch(path, format!("pair components have sources {a1} and {a2}")));
                }
                (a1, TypeExpr::prod(b1, b2))
            }
            Proj1(a, b) => {
                let (a, b) = (self.resolve(a)?, self.resolve(b)?);
                (TypeExpr::prod(a.clone(), b), a)
            }
            Proj2(a, b) => {
                let (a, b) = (self.resolve(a)?, self.resolve(b)?);
                (TypeExpr::prod(a, b.clone()), b)
            }
            Final(a) => (self.resolve(a)?, TypeExpr::Unit),
            Copair(f1, f2) | LCopair(f1, f2) | RCopair(f1, f2) => {
                let (a1, b1) = sub(self, 0, f1, path)?;
                let (a2, b2) = sub(self, 1, f2, path)?;
                if b1 != b2 {
                    return Err(Self::mismatch(path, format!("copair components have targets {b1} and {b2}")));
                }
                (TypeExpr::coprod(a1, a2), b1)
            }
            In1(a, b) => {
                let (a, b) = (self.resolve(a)?, self.resolve(b)?);
                (a.clone(), TypeExpr::coprod(a, b))
            }
            In2(a, b) => {
                let (a, b) = (self.resolve(a)?, self.resolve(b)?);
                (b.clone(), TypeExpr::coprod(a, b))
            }
            Initial(b) => (TypeExpr::Empty, self.resolve(b)?),
            Sym(n) => {
                let p = self.pure_sym(n).ok_or_else(|| TypeError::UnknownSymbol(n.clone()))?;
                (p.src.clone(), p.tgt.clone())
            }
            Var(n) => {
                let v = self.var(n).ok_or_else(|| TypeError::UnknownSymbol(n.clone()))?;
                (v.src.clone(), v.tgt.clone())
            }
            Lookup(x) => {
                let v = self.location_type(x).ok_or_else(|| TypeError::UnknownLocation(x.clone()))?;
                (TypeExpr::Unit, v.clone())
            }
            Update(x) => {
                let v = self.location_type(x).ok_or_else(|| TypeError::UnknownLocation(x.clone()))?;
                (v.clone(), TypeExpr::Unit)
            }
            Tag(x) => {
                let v = self.exception_type(x).ok_or_else(|| TypeError::UnknownException(x.clone()))?;
                (v.clone(), TypeExpr::Empty)
            }
            Untag(x) => {
                let v = self.exception_type(x).ok_or_else(|| TypeError::UnknownException(x.clone()))?;
                (TypeExpr::Empty, v.clone())
            }
            Downcast(f) => sub(self, 0, f, path)?,
        })
    }

    /// Checks both sides and that they are parallel; returns the common type.
    pub fn check_equation(&self, eq: &Equation) -> Result<(TypeExpr, TypeExpr), TypeError> {
        let l = self.typecheck(&eq.lhs)?;
        let r = self.typecheck(&eq.rhs)?;
        if l != r {
            return Err(TypeError::NotParallel {
                lhs: format!("{} : {} -> {}", eq.lhs, l.0, l.1),
                rhs: format!("{} : {} -> {}", eq.rhs, r.0, r.1),
            });
        }
        Ok(l)
    }
}

fn contains_val(t: &TypeExpr) -> bool {
    match t {
        TypeExpr::Val(_) => true,
        TypeExpr::Prod(a, b) | TypeExpr::Coprod(a, b) => contains_val(a) || contains_val(b),
        _ => false,
    }
}

fn check_types(t: &Term, f: &mut dyn FnMut(&TypeExpr)) {
    use TermKind::*;
    match t.kind() {
        Id(a) | Final(a) | Initial(a) => f(a),
        Proj1(a, b) | Proj2(a, b) | In1(a, b) | In2(a, b) => {
            f(a);
            f(b);
        }
        _ => {
            for c in t.children() {
                check_types(c, f);
            }
        }
    }
}

/// True when the term uses no effect constructors and no schematic variables.
pub fn is_pure_syntax(t: &Term) -> bool {
    use TermKind::*;
    t.count(&|k| {
        matches!(
            k,
            LPair(..) | RPair(..) | LCopair(..) | RCopair(..) | Lookup(_) | Update(_) | Tag(_) | Untag(_) | Downcast(_) | Var(_)
        )
    }) == 0
}

impl fmt::Display for Signature {
    /// Canonical rendering: types, locations, exceptions, pure symbols,
    /// axioms, inhabitants; each group in declaration order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.types {
            writeln!(f, "type {t};")?;
        }
        for (x, v) in &self.locations {
            writeln!(f, "location {x} : {v};")?;
        }
        for (x, v) in &self.exceptions {
            writeln!(f, "exception {x} : {v};")?;
        }
        for p in &self.pures {
            writeln!(f, "pure {} : {} -> {};", p.name, p.src, p.tgt)?;
        }
        for a in &self.axioms {
            writeln!(f, "axiom {} : {};", a.name, a.eq)?;
        }
        for (t, h) in &self.inhabitants {
            writeln!(f, "inhabit {t} = {h};")?;
        }
        Ok(())
    }
}
