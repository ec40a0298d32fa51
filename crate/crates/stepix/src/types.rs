//! Finite descriptions of semantic types: bottom, top, the naturals,
//! arrows, recursive types via a `mu` binder, and `floor` (k-approximation)
//! wrappers.
//!
//! Type variables are nameless, mirroring [`crate::term::Term`]: `TVar(i)`
//! counts enclosing `Mu` binders. A `Mu` body doubles as the functional `F`
//! of the recursive-type construction, applied by substitution.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

/// Syntax of semantic type descriptions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Bot,
    Top,
    Nat,
    Arrow(Rc<TypeExpr>, Rc<TypeExpr>),
    Mu(Rc<TypeExpr>),
    TVar(usize),
    Floor(Rc<TypeExpr>, u64),
}

impl TypeExpr {
    pub fn arrow(dom: TypeExpr, cod: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Rc::new(dom), Rc::new(cod))
    }

    pub fn mu(body: TypeExpr) -> TypeExpr {
        TypeExpr::Mu(Rc::new(body))
    }

    /// Wrap in a k-approximation: membership additionally requires the
    /// index to be strictly below `cutoff`.
    pub fn floor_wrap(self, cutoff: u64) -> TypeExpr {
        TypeExpr::Floor(Rc::new(self), cutoff)
    }

    pub fn size(&self) -> usize {
        match self {
            TypeExpr::Bot | TypeExpr::Top | TypeExpr::Nat | TypeExpr::TVar(_) => 1,
            TypeExpr::Arrow(d, c) => 1 + d.size() + c.size(),
            TypeExpr::Mu(b) => 1 + b.size(),
            TypeExpr::Floor(t, _) => 1 + t.size(),
        }
    }

    fn closed_under(&self, depth: usize) -> bool {
        match self {
            TypeExpr::Bot | TypeExpr::Top | TypeExpr::Nat => true,
            TypeExpr::TVar(i) => *i < depth,
            TypeExpr::Arrow(d, c) => d.closed_under(depth) && c.closed_under(depth),
            TypeExpr::Mu(b) => b.closed_under(depth + 1),
            TypeExpr::Floor(t, _) => t.closed_under(depth),
        }
    }

    /// No unbound type variables.
    pub fn is_closed(&self) -> bool {
        self.closed_under(0)
    }

    fn shift_above(&self, by: usize, cutoff: usize) -> TypeExpr {
        match self {
            TypeExpr::Bot | TypeExpr::Top | TypeExpr::Nat => self.clone(),
            TypeExpr::TVar(i) => {
                if *i >= cutoff {
                    TypeExpr::TVar(i + by)
                } else {
                    self.clone()
                }
            }
            TypeExpr::Arrow(d, c) => {
                TypeExpr::arrow(d.shift_above(by, cutoff), c.shift_above(by, cutoff))
            }
            TypeExpr::Mu(b) => TypeExpr::mu(b.shift_above(by, cutoff + 1)),
            TypeExpr::Floor(t, k) => TypeExpr::Floor(Rc::new(t.shift_above(by, cutoff)), *k),
        }
    }

    fn subst_top(&self, arg: &TypeExpr) -> TypeExpr {
        fn go(t: &TypeExpr, depth: usize, arg: &TypeExpr) -> TypeExpr {
            match t {
                TypeExpr::Bot | TypeExpr::Top | TypeExpr::Nat => t.clone(),
                TypeExpr::TVar(i) => {
                    if *i == depth {
                        arg.shift_above(depth, 0)
                    } else if *i > depth {
                        TypeExpr::TVar(i - 1)
                    } else {
                        t.clone()
                    }
                }
                TypeExpr::Arrow(d, c) => TypeExpr::arrow(go(d, depth, arg), go(c, depth, arg)),
                TypeExpr::Mu(b) => TypeExpr::mu(go(b, depth + 1, arg)),
                TypeExpr::Floor(inner, k) => TypeExpr::Floor(Rc::new(go(inner, depth, arg)), *k),
            }
        }
        go(self, 0, arg)
    }

    /// Render suitable for a binder annotation position: arrows print bare,
    /// `mu` gets parenthesized so the annotation's dot stays unambiguous.
    pub fn display_annot(&self) -> String {
        match self {
            TypeExpr::Mu(_) => format!("({self})"),
            _ => format!("{self}"),
        }
    }
}

/// Apply the functional described by a `Mu` body to an argument: the
/// capture-avoiding substitution of `arg` for the bound type variable.
pub fn apply_functional(body: &TypeExpr, arg: &TypeExpr) -> TypeExpr {
    body.subst_top(arg)
}

/// `n`-fold application of a `Mu`'s functional starting from `Bot`,
/// computing the finite approximation used for recursive-type membership.
///
/// Returns the type unchanged when `m` is not a `Mu`.
pub fn mu_unroll(m: &TypeExpr, n: u64) -> TypeExpr {
    match m {
        TypeExpr::Mu(body) => {
            let mut acc = TypeExpr::Bot;
            for _ in 0..n {
                acc = apply_functional(body, &acc);
            }
            acc
        }
        _ => m.clone(),
    }
}

/// Unfold a `Mu` one level: `mu X. F` becomes `F(mu X. F)`.
pub fn mu_unfold_once(m: &TypeExpr) -> Option<TypeExpr> {
    match m {
        TypeExpr::Mu(body) => Some(apply_functional(body, m)),
        _ => None,
    }
}

/// Syntactic well-foundedness check: every occurrence of the `mu`-bound
/// variable must sit beneath at least one arrow constructor, and nested
/// `mu` binders must satisfy the same condition for their own variable.
/// Sufficient, not necessary, for the semantic well-foundedness equation.
pub fn is_guarded(m: &TypeExpr) -> bool {
    fn occ_guarded(t: &TypeExpr, var: usize, under_arrow: bool) -> bool {
        match t {
            TypeExpr::Bot | TypeExpr::Top | TypeExpr::Nat => true,
            TypeExpr::TVar(i) => *i != var || under_arrow,
            TypeExpr::Arrow(d, c) => {
                occ_guarded(d, var, true) && occ_guarded(c, var, true)
            }
            TypeExpr::Mu(b) => occ_guarded(b, var + 1, under_arrow),
            TypeExpr::Floor(inner, _) => occ_guarded(inner, var, under_arrow),
        }
    }
    fn nested_ok(t: &TypeExpr) -> bool {
        match t {
            TypeExpr::Bot | TypeExpr::Top | TypeExpr::Nat | TypeExpr::TVar(_) => true,
            TypeExpr::Arrow(d, c) => nested_ok(d) && nested_ok(c),
            TypeExpr::Mu(b) => occ_guarded(b, 0, false) && nested_ok(b),
            TypeExpr::Floor(inner, _) => nested_ok(inner),
        }
    }
    match m {
        TypeExpr::Mu(body) => occ_guarded(body, 0, false) && nested_ok(body),
        _ => false,
    }
}

const TVAR_POOL: [&str; 6] = ["X", "Y", "Z", "W", "V", "U"];

fn tvar_name(depth: usize) -> String {
    let base = TVAR_POOL[depth % TVAR_POOL.len()];
    if depth / TVAR_POOL.len() == 0 {
        base.to_string()
    } else {
        format!("{}{}", base, depth / TVAR_POOL.len())
    }
}

fn fmt_type(t: &TypeExpr, f: &mut fmt::Formatter<'_>, depth: usize, prec: u8) -> fmt::Result {
    // prec 0: bare; 1: arrow domain / needs parens around arrows and mu
    match t {
        TypeExpr::Bot => write!(f, "Bot"),
        TypeExpr::Top => write!(f, "Top"),
        TypeExpr::Nat => write!(f, "Nat"),
        TypeExpr::TVar(i) => {
            if *i < depth {
                write!(f, "{}", tvar_name(depth - 1 - i))
            } else {
                write!(f, "?{}", i - depth)
            }
        }
        TypeExpr::Arrow(d, c) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            fmt_type(d, f, depth, 1)?;
            write!(f, " -> ")?;
            fmt_type(c, f, depth, 0)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        TypeExpr::Mu(b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write!(f, "mu {}. ", tvar_name(depth))?;
            fmt_type(b, f, depth + 1, 0)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        TypeExpr::Floor(inner, k) => {
            write!(f, "floor(")?;
            fmt_type(inner, f, depth, 0)?;
            write!(f, ", {k})")
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_type(self, f, 0, 0)
    }
}

/// Finite map from term variables to closed type expressions.
pub type TypeEnv = BTreeMap<String, TypeExpr>;

/// Render a type environment as `{x: Nat, f: Nat -> Nat}`.
pub fn display_env(env: &TypeEnv) -> String {
    let mut out = String::from("{");
    for (i, (name, ty)) in env.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(name);
        out.push_str(": ");
        out.push_str(&ty.to_string());
    }
    out.push('}');
    out
}
