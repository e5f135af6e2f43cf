use std::fmt;

use thiserror::Error;

use crate::syntax::{Name, Signature, TypeExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("type `{0}` has no carrier in the model")]
    UnknownType(Name),
    #[error("`{0}` names no location or exception of the model")]
    UnknownValueType(Name),
    #[error("symbol `{0}` has no table in the model")]
    UnknownSymbol(Name),
    #[error("`{ctor}` cannot be interpreted in a {kind} model")]
    NotInterpretable { ctor: &'static str, kind: ModelKind },
    #[error("variable `{0}` has no interpretation")]
    Variable(Name),
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("model does not match the signature: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    State,
    Exception,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::State => "state",
            ModelKind::Exception => "exception",
        })
    }
}

/// Element of a decoded type. `Elem(i)` is the i-th element of a carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Unit,
    Elem(u32),
    Pair(Box<Value>, Box<Value>),
    Inl(Box<Value>),
    Inr(Box<Value>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carrier {
    pub name: Name,
    pub elems: Vec<String>,
}

/// Extensional interpretation of a pure symbol: `map[i]` is the index of
/// the image of the i-th element of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureTable {
    pub name: Name,
    pub src: TypeExpr,
    pub tgt: TypeExpr,
    pub map: Vec<u32>,
}

/// Finite model of a signature. States are tuples over `locations` (in
/// declaration order); exceptions are tagged by their index in `exceptions`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub kind: ModelKind,
    pub carriers: Vec<Carrier>,
    pub locations: Vec<(Name, TypeExpr)>,
    pub exceptions: Vec<(Name, TypeExpr)>,
    pub tables: Vec<PureTable>,
}

pub fn default_elem_names(ty: &str, n: usize) -> Vec<String> {
    let base = ty.to_lowercase();
    (0..n).map(|i| format!("{base}{i}")).collect()
}

impl Model {
    /// Model over `sig` with the given carrier sizes and no tables yet.
    pub fn skeleton(sig: &Signature, kind: ModelKind, sizes: &[(Name, usize)]) -> Model {
        Model {
            kind,
            carriers: sizes.iter().map(|(n, k)| Carrier { name: n.clone(), elems: default_elem_names(n, *k) }).collect(),
            locations: sig.locations.clone(),
            exceptions: sig.exceptions.clone(),
            tables: Vec::new(),
        }
    }

    pub fn carrier(&self, n: &str) -> Option<&Carrier> {
        self.carriers.iter().find(|c| &*c.name == n)
    }

    pub fn table(&self, n: &str) -> Option<&PureTable> {
        self.tables.iter().find(|t| &*t.name == n)
    }

    fn val_type(&self, n: &str) -> Result<&TypeExpr, SemError> {
        self.locations
            .iter()
            .chain(&self.exceptions)
            .find(|(m, _)| &**m == n)
            .map(|(_, t)| t)
            .ok_or_else(|| SemError::UnknownValueType(n.into()))
    }

    pub fn size(&self, t: &TypeExpr) -> Result<usize, SemError> {
        Ok(match t {
            TypeExpr::Unit => 1,
            TypeExpr::Empty => 0,
            TypeExpr::Base(n) => self.carrier(n).ok_or_else(|| SemError::UnknownType(n.clone()))?.elems.len(),
            TypeExpr::Prod(a, b) => self.size(a)? * self.size(b)?,
            TypeExpr::Coprod(a, b) => self.size(a)? + self.size(b)?,
            TypeExpr::Val(n) => self.size(self.val_type(n)?)?,
        })
    }

    /// All elements of `t`, in index order.
    pub fn decode_type(&self, t: &TypeExpr) -> Result<Vec<Value>, SemError> {
        let n = self.size(t)?;
        (0..n).map(|i| self.decode(i, t)).collect()
    }

    /// Value with index `i` in `t`.
    pub fn decode(&self, i: usize, t: &TypeExpr) -> Result<Value, SemError> {
        Ok(match t {
            TypeExpr::Unit => Value::Unit,
            TypeExpr::Empty => return Err(SemError::IllTyped("element of the empty type".into())),
            TypeExpr::Base(_) => Value::Elem(i as u32),
            TypeExpr::Prod(a, b) => {
                let nb = self.size(b)?;
                Value::Pair(Box::new(self.decode(i / nb, a)?), Box::new(self.decode(i % nb, b)?))
            }
            TypeExpr::Coprod(a, b) => {
                let na = self.size(a)?;
                if i < na {
                    Value::Inl(Box::new(self.decode(i, a)?))
                } else {
                    Value::Inr(Box::new(self.decode(i - na, b)?))
                }
            }
            TypeExpr::Val(n) => self.decode(i, self.val_type(n)?)?,
        })
    }

    /// Index of `v` in `t`.
    pub fn encode(&self, v: &Value, t: &TypeExpr) -> Result<usize, SemError> {
        let bad = || SemError::IllTyped(format!("value does not belong to `{t}`"));
        Ok(match (v, t) {
            (Value::Unit, TypeExpr::Unit) => 0,
            (Value::Elem(i), TypeExpr::Base(_)) => *i as usize,
            (Value::Pair(x, y), TypeExpr::Prod(a, b)) => self.encode(x, a)? * self.size(b)? + self.encode(y, b)?,
            (Value::Inl(x), TypeExpr::Coprod(a, _)) => self.encode(x, a)?,
            (Value::Inr(y), TypeExpr::Coprod(a, b)) => self.size(a)? + self.encode(y, b)?,
            (_, TypeExpr::Val(n)) => self.encode(v, self.val_type(n)?)?,
            _ => return Err(bad()),
        })
    }

    /// Applies the table of pure symbol `n`.
    pub fn apply(&self, n: &str, v: &Value) -> Result<Value, SemError> {
        let tb = self.table(n).ok_or_else(|| SemError::UnknownSymbol(n.into()))?;
        let i = self.encode(v, &tb.src)?;
        self.decode(tb.map[i] as usize, &tb.tgt)
    }

    /// All states (tuples of location values), in index order.
    pub fn states(&self) -> Result<Vec<Vec<Value>>, SemError> {
        let mut out = vec![Vec::new()];
        for (_, t) in &self.locations {
            let vals = self.decode_type(t)?;
            out = out
                .into_iter()
                .flat_map(|s| {
                    vals.iter().map(move |v| {
                        let mut s2 = s.clone();
                        s2.push(v.clone());
                        s2
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Printed form of `v` as an element of `t`.
    pub fn show(&self, v: &Value, t: &TypeExpr) -> String {
        match (v, t) {
            (Value::Unit, _) => "*".into(),
            (Value::Elem(i), TypeExpr::Base(n)) => match self.carrier(n) {
                Some(c) => c.elems.get(*i as usize).cloned().unwrap_or_else(|| format!("#{i}")),
                None => format!("#{i}"),
            },
            (Value::Pair(x, y), TypeExpr::Prod(a, b)) => format!("({}, {})", self.show(x, a), self.show(y, b)),
            (Value::Inl(x), TypeExpr::Coprod(a, _)) => format!("inl({})", self.show(x, a)),
            (Value::Inr(y), TypeExpr::Coprod(_, b)) => format!("inr({})", self.show(y, b)),
            (_, TypeExpr::Val(n)) => match self.val_type(n) {
                Ok(t2) => self.show(v, &t2.clone()),
                Err(_) => format!("{v:?}"),
            },
            _ => format!("{v:?}"),
        }
    }

    pub fn show_state(&self, s: &[Value]) -> String {
        let parts: Vec<String> =
            self.locations.iter().zip(s).map(|((n, t), v)| format!("{n}={}", self.show(v, t))).collect();
        format!("[{}]", parts.join(", "))
    }
}
