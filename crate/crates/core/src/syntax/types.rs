use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier used for types, symbols, locations and exception names.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Object-language types.
///
/// `Val(n)` names the value type of a location or exception name. Signatures
/// resolve it to the declared value type, so after resolution two types are
/// equal exactly when they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Base(Name),
    Unit,
    Empty,
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    Coprod(Box<TypeExpr>, Box<TypeExpr>),
    Val(Name),
}

impl TypeExpr {
    pub fn base(n: &str) -> Self {
        TypeExpr::Base(name(n))
    }

    pub fn val(n: &str) -> Self {
        TypeExpr::Val(name(n))
    }

    pub fn prod(a: TypeExpr, b: TypeExpr) -> Self {
        TypeExpr::Prod(Box::new(a), Box::new(b))
    }

    pub fn coprod(a: TypeExpr, b: TypeExpr) -> Self {
        TypeExpr::Coprod(Box::new(a), Box::new(b))
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, TypeExpr::Unit)
    }

    /// True when the type avoids products, coproducts and the empty type.
    pub fn is_state_core(&self) -> bool {
        matches!(self, TypeExpr::Base(_) | TypeExpr::Unit | TypeExpr::Val(_))
    }

    /// Mirror image of `is_state_core`: no products, coproducts or unit.
    pub fn is_exc_core(&self) -> bool {
        matches!(self, TypeExpr::Base(_) | TypeExpr::Empty | TypeExpr::Val(_))
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            TypeExpr::Base(n) => write!(f, "{n}"),
            TypeExpr::Unit => write!(f, "1"),
            TypeExpr::Empty => write!(f, "0"),
            TypeExpr::Val(n) => write!(f, "V[{n}]"),
            TypeExpr::Coprod(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            TypeExpr::Prod(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Minimal decoration of a term.
///
/// On the state side rank 1 is an accessor and rank 2 a modifier; on the
/// exception side the same ranks read as propagator and catcher.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decoration {
    Pure = 0,
    Accessor = 1,
    Modifier = 2,
}

impl Decoration {
    pub fn rank(self) -> u8 {
        self as u8
    }

    pub fn from_rank(r: u8) -> Option<Self> {
        match r {
            0 => Some(Decoration::Pure),
            1 => Some(Decoration::Accessor),
            2 => Some(Decoration::Modifier),
            _ => None,
        }
    }
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rank())
    }
}

/// The four decorated logics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoryId {
    Com,
    Mon,
    St,
    Exc,
}

impl TheoryId {
    pub const ALL: [TheoryId; 4] = [TheoryId::Com, TheoryId::Mon, TheoryId::St, TheoryId::Exc];

    /// Accepts both `L_st` and `st` spellings.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.strip_prefix("L_").unwrap_or(s);
        match s {
            "com" => Some(TheoryId::Com),
            "mon" => Some(TheoryId::Mon),
            "st" => Some(TheoryId::St),
            "exc" => Some(TheoryId::Exc),
            _ => None,
        }
    }

    /// Comonad side (state) or monad side (exceptions).
    pub fn is_comonadic(self) -> bool {
        matches!(self, TheoryId::Com | TheoryId::St)
    }

    /// The theory this one extends, if any.
    pub fn base(self) -> Option<TheoryId> {
        match self {
            TheoryId::St => Some(TheoryId::Com),
            TheoryId::Exc => Some(TheoryId::Mon),
            _ => None,
        }
    }

    pub fn dual(self) -> TheoryId {
        match self {
            TheoryId::Com => TheoryId::Mon,
            TheoryId::Mon => TheoryId::Com,
            TheoryId::St => TheoryId::Exc,
            TheoryId::Exc => TheoryId::St,
        }
    }
}

impl fmt::Display for TheoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TheoryId::Com => "L_com",
            TheoryId::Mon => "L_mon",
            TheoryId::St => "L_st",
            TheoryId::Exc => "L_exc",
        };
        f.write_str(s)
    }
}
