//! Syntax-directed derivation of semantic typing judgments from annotated
//! terms.
//!
//! The rules are those of the model's typing lemmas: variables read the
//! environment, constants get `Nat`, abstractions consume their binder
//! annotation, applications demand an arrow on the function side, and
//! `fix` demands an endo-arrow. Recursive types are equi-recursive: a `mu`
//! meeting an arrow shape is unfolded on demand (recorded as a `MuUnfold`
//! step), and type equality identifies a `mu` with its unfolding via
//! memoized assumed-equal pairs.

use std::collections::HashSet;
use std::fmt;

use crate::membership::{models, ProbeConfig, Verdict};
use crate::term::{resolve, OpenTerm, SurfaceTerm};
use crate::types::{apply_functional, display_env, is_guarded, mu_unfold_once, TypeEnv, TypeExpr};

/// Default bound on demand-driven `mu` unfolding during shape matching.
pub const DEFAULT_UNROLL_BUDGET: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Var,
    Const,
    App,
    Abs,
    Fix,
    MuFold,
    MuUnfold,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Rule::Var => "Var",
            Rule::Const => "Const",
            Rule::App => "App",
            Rule::Abs => "Abs",
            Rule::Fix => "Fix",
            Rule::MuFold => "MuFold",
            Rule::MuUnfold => "MuUnfold",
        };
        write!(f, "{name}")
    }
}

/// A derivation tree. Each node concludes `env |- term : ty` by the named
/// rule from the conclusions of its premises. Conclusion terms carry no
/// annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub env: TypeEnv,
    pub term: SurfaceTerm,
    pub ty: TypeExpr,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn node(env: &TypeEnv, term: SurfaceTerm, ty: TypeExpr, rule: Rule, premises: Vec<Derivation>) -> Derivation {
        Derivation {
            env: env.clone(),
            term,
            ty,
            rule,
            premises,
        }
    }

    /// The conclusion term resolved to nameless form with its free context.
    pub fn resolved(&self) -> OpenTerm {
        resolve(&self.term)
    }

    /// Pretty indented rule tree.
    pub fn render_tree(&self) -> String {
        fn go(d: &Derivation, depth: usize, out: &mut String) {
            for _ in 0..depth {
                out.push_str("  ");
            }
            out.push_str(&format!(
                "{}: {} |- {} : {}\n",
                d.rule,
                display_env(&d.env),
                d.term,
                d.ty
            ));
            for p in &d.premises {
                go(p, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }

    /// Machine-readable dump mirroring the node fields.
    pub fn render_structured(&self) -> String {
        fn go(d: &Derivation, depth: usize, out: &mut String) {
            let pad = "  ".repeat(depth);
            out.push_str(&format!("{pad}rule: {}\n", d.rule));
            out.push_str(&format!("{pad}env: {}\n", display_env(&d.env)));
            out.push_str(&format!("{pad}term: {}\n", d.term));
            out.push_str(&format!("{pad}type: {}\n", d.ty));
            for p in &d.premises {
                out.push_str(&format!("{pad}premise:\n"));
                go(p, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }

    /// Structural re-validation: every node must be a correct instance of
    /// its rule's shape, with `Var`/`Const` as the only leaves.
    pub fn revalidate(&self) -> bool {
        let ok = match (&self.rule, &self.term) {
            (Rule::Var, SurfaceTerm::Var(x)) => {
                self.premises.is_empty() && self.env.get(x) == Some(&self.ty)
            }
            (Rule::Const, SurfaceTerm::Const(_)) => {
                self.premises.is_empty() && self.ty == TypeExpr::Nat
            }
            (Rule::Abs, SurfaceTerm::Abs { param, body, .. }) => match &self.ty {
                TypeExpr::Arrow(dom, cod) => {
                    if let [p] = self.premises.as_slice() {
                        let mut inner = self.env.clone();
                        inner.insert(param.clone(), dom.as_ref().clone());
                        p.env == inner
                            && p.term == body.as_ref().clone()
                            && p.ty == cod.as_ref().clone()
                    } else {
                        false
                    }
                }
                _ => false,
            },
            (Rule::App, SurfaceTerm::App(fun, arg)) => {
                if let [pf, pa] = self.premises.as_slice() {
                    match &pf.ty {
                        TypeExpr::Arrow(dom, cod) => {
                            pf.env == self.env
                                && pa.env == self.env
                                && pf.term == fun.as_ref().clone()
                                && pa.term == arg.as_ref().clone()
                                && type_eq(&pa.ty, dom)
                                && self.ty == cod.as_ref().clone()
                        }
                        _ => false,
                    }
                } else {
                    false
                }
            }
            (Rule::Fix, SurfaceTerm::Fix(body)) => {
                if let [p] = self.premises.as_slice() {
                    match &p.ty {
                        TypeExpr::Arrow(dom, cod) => {
                            p.env == self.env
                                && p.term == body.as_ref().clone()
                                && type_eq(dom, cod)
                                && self.ty == dom.as_ref().clone()
                        }
                        _ => false,
                    }
                } else {
                    false
                }
            }
            (Rule::MuFold, _) => {
                if let [p] = self.premises.as_slice() {
                    match &self.ty {
                        TypeExpr::Mu(body) => {
                            p.env == self.env
                                && p.term == self.term
                                && p.ty == apply_functional(body, &self.ty)
                        }
                        _ => false,
                    }
                } else {
                    false
                }
            }
            (Rule::MuUnfold, _) => {
                if let [p] = self.premises.as_slice() {
                    match &p.ty {
                        TypeExpr::Mu(body) => {
                            p.env == self.env
                                && p.term == self.term
                                && self.ty == apply_functional(body, &p.ty)
                        }
                        _ => false,
                    }
                } else {
                    false
                }
            }
            _ => false,
        };
        ok && self.premises.iter().all(Derivation::revalidate)
    }
}

/// Derivation failure with a rule-level message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeriveError {
    UnboundVar(String),
    MissingAnnotation(String),
    OpenAnnotation(String),
    ExpectedArrow(TypeExpr),
    ArgumentMismatch { expected: TypeExpr, found: TypeExpr },
    FixBodyMismatch { dom: TypeExpr, cod: TypeExpr },
    UnrollBudgetExhausted(TypeExpr),
}

impl fmt::Display for DeriveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeriveError::UnboundVar(x) => write!(f, "unbound variable `{x}`"),
            DeriveError::MissingAnnotation(x) => {
                write!(f, "binder `{x}` needs a type annotation")
            }
            DeriveError::OpenAnnotation(x) => {
                write!(f, "annotation on binder `{x}` has unbound type variables")
            }
            DeriveError::ExpectedArrow(t) => write!(f, "expected an arrow type, found {t}"),
            DeriveError::ArgumentMismatch { expected, found } => {
                write!(f, "argument type mismatch: expected {expected}, found {found}")
            }
            DeriveError::FixBodyMismatch { dom, cod } => {
                write!(f, "fix body must have a type of shape T -> T, found {dom} -> {cod}")
            }
            DeriveError::UnrollBudgetExhausted(t) => {
                write!(f, "mu-unroll budget exhausted while matching {t}")
            }
        }
    }
}

impl std::error::Error for DeriveError {}

// ---------------------------------------------------------------------------
// Equi-recursive matching
// ---------------------------------------------------------------------------

/// Result of matching a type against the arrow shape, with the number of
/// `mu` unfoldings that were needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowMatch {
    pub dom: TypeExpr,
    pub cod: TypeExpr,
    pub unfolds: Vec<TypeExpr>,
}

/// Match `t` against an arrow shape, unfolding `mu` one level at a time up
/// to the budget. `unfolds` records each intermediate type, innermost
/// last; its length is the number of `MuUnfold` steps taken.
pub fn match_arrow(t: &TypeExpr, unroll_budget: u64) -> Result<ArrowMatch, DeriveError> {
    let mut current = t.clone();
    let mut unfolds = Vec::new();
    for _ in 0..=unroll_budget {
        match &current {
            TypeExpr::Arrow(dom, cod) => {
                return Ok(ArrowMatch {
                    dom: dom.as_ref().clone(),
                    cod: cod.as_ref().clone(),
                    unfolds,
                });
            }
            TypeExpr::Mu(_) => {
                let next = mu_unfold_once(&current).expect("mu unfolds");
                unfolds.push(next.clone());
                current = next;
            }
            _ => return Err(DeriveError::ExpectedArrow(t.clone())),
        }
    }
    Err(DeriveError::UnrollBudgetExhausted(t.clone()))
}

/// Equi-recursive type equality: structural, with `mu` identified with its
/// unfolding under memoized assumed-equal pairs. The coinductive step
/// requires a guarded body; an unguarded `mu` is equal only to itself.
pub fn type_eq(a: &TypeExpr, b: &TypeExpr) -> bool {
    fn go(a: &TypeExpr, b: &TypeExpr, assumed: &mut HashSet<(TypeExpr, TypeExpr)>, fuel: &mut u32) -> bool {
        if a == b {
            return true;
        }
        if *fuel == 0 {
            return false;
        }
        *fuel -= 1;
        match (a, b) {
            (TypeExpr::Mu(_), _) | (_, TypeExpr::Mu(_)) => {
                let key = (a.clone(), b.clone());
                if assumed.contains(&key) {
                    return true;
                }
                if matches!(a, TypeExpr::Mu(_)) && !is_guarded(a) {
                    return false;
                }
                if matches!(b, TypeExpr::Mu(_)) && !is_guarded(b) {
                    return false;
                }
                assumed.insert(key);
                let a2 = mu_unfold_once(a).unwrap_or_else(|| a.clone());
                let b2 = mu_unfold_once(b).unwrap_or_else(|| b.clone());
                go(&a2, &b2, assumed, fuel)
            }
            (TypeExpr::Arrow(d1, c1), TypeExpr::Arrow(d2, c2)) => {
                go(d1, d2, assumed, fuel) && go(c1, c2, assumed, fuel)
            }
            (TypeExpr::Floor(t1, k1), TypeExpr::Floor(t2, k2)) => {
                k1 == k2 && go(t1, t2, assumed, fuel)
            }
            _ => false,
        }
    }
    let mut fuel = 4096;
    go(a, b, &mut HashSet::new(), &mut fuel)
}

// ---------------------------------------------------------------------------
// The engine
// ---------------------------------------------------------------------------

fn erase(s: &SurfaceTerm) -> SurfaceTerm {
    match s {
        SurfaceTerm::Const(_) | SurfaceTerm::Var(_) => s.clone(),
        SurfaceTerm::Abs { param, body, .. } => SurfaceTerm::abs(param, None, erase(body)),
        SurfaceTerm::App(f, a) => SurfaceTerm::app(erase(f), erase(a)),
        SurfaceTerm::Fix(b) => SurfaceTerm::fix(erase(b)),
    }
}

/// Wrap a derivation in `MuUnfold` nodes along the recorded unfold chain.
fn wrap_unfolds(d: Derivation, unfolds: &[TypeExpr]) -> Derivation {
    let mut current = d;
    for ty in unfolds {
        let node = Derivation::node(
            &current.env.clone(),
            current.term.clone(),
            ty.clone(),
            Rule::MuUnfold,
            vec![current],
        );
        current = node;
    }
    current
}

/// Derive `env |- s : ty` syntax-directedly. All lambda binders must be
/// annotated; free variables must be bound in `env`.
pub fn derive(env: &TypeEnv, s: &SurfaceTerm) -> Result<Derivation, DeriveError> {
    derive_with_budget(env, s, DEFAULT_UNROLL_BUDGET)
}

/// [`derive`] with an explicit `mu`-unroll budget for shape matching.
pub fn derive_with_budget(
    env: &TypeEnv,
    s: &SurfaceTerm,
    unroll_budget: u64,
) -> Result<Derivation, DeriveError> {
    match s {
        SurfaceTerm::Var(x) => match env.get(x) {
            Some(ty) => Ok(Derivation::node(env, s.clone(), ty.clone(), Rule::Var, vec![])),
            None => Err(DeriveError::UnboundVar(x.clone())),
        },
        SurfaceTerm::Const(_) => Ok(Derivation::node(
            env,
            s.clone(),
            TypeExpr::Nat,
            Rule::Const,
            vec![],
        )),
        SurfaceTerm::Abs { param, annot, body } => {
            let dom = annot
                .clone()
                .ok_or_else(|| DeriveError::MissingAnnotation(param.clone()))?;
            if !dom.is_closed() {
                return Err(DeriveError::OpenAnnotation(param.clone()));
            }
            let mut inner = env.clone();
            inner.insert(param.clone(), dom.clone());
            let premise = derive_with_budget(&inner, body, unroll_budget)?;
            let ty = TypeExpr::arrow(dom, premise.ty.clone());
            Ok(Derivation::node(
                env,
                erase(s),
                ty,
                Rule::Abs,
                vec![premise],
            ))
        }
        SurfaceTerm::App(fun, arg) => {
            let df = derive_with_budget(env, fun, unroll_budget)?;
            let m = match_arrow(&df.ty, unroll_budget)?;
            let df = wrap_unfolds(df, &m.unfolds);
            let da = derive_with_budget(env, arg, unroll_budget)?;
            if !type_eq(&da.ty, &m.dom) {
                return Err(DeriveError::ArgumentMismatch {
                    expected: m.dom,
                    found: da.ty,
                });
            }
            let da = bridge_to(da, &m.dom);
            Ok(Derivation::node(
                env,
                erase(s),
                m.cod,
                Rule::App,
                vec![df, da],
            ))
        }
        SurfaceTerm::Fix(body) => {
            let db = derive_with_budget(env, body, unroll_budget)?;
            let m = match_arrow(&db.ty, unroll_budget)?;
            let db = wrap_unfolds(db, &m.unfolds);
            if !type_eq(&m.dom, &m.cod) {
                return Err(DeriveError::FixBodyMismatch {
                    dom: m.dom,
                    cod: m.cod,
                });
            }
            Ok(Derivation::node(
                env,
                erase(s),
                m.dom,
                Rule::Fix,
                vec![db],
            ))
        }
    }
}

/// Insert a single fold or unfold node when the derived type and the
/// expected type are one exact `mu` step apart; otherwise the types are
/// already identified by equi-recursive equality and no step is recorded.
fn bridge_to(d: Derivation, expected: &TypeExpr) -> Derivation {
    if d.ty == *expected {
        return d;
    }
    if let TypeExpr::Mu(body) = expected {
        if d.ty == apply_functional(body, expected) {
            return Derivation::node(
                &d.env.clone(),
                d.term.clone(),
                expected.clone(),
                Rule::MuFold,
                vec![d],
            );
        }
    }
    if let TypeExpr::Mu(_) = &d.ty {
        if let Some(unfolded) = mu_unfold_once(&d.ty) {
            if unfolded == *expected {
                return Derivation::node(
                    &d.env.clone(),
                    d.term.clone(),
                    expected.clone(),
                    Rule::MuUnfold,
                    vec![d],
                );
            }
        }
    }
    d
}

/// Semantically confirm a derivation's conclusion by running the
/// membership judgment at index `k`.
pub fn check_derivation(d: &Derivation, k: u64, cfg: &ProbeConfig) -> Verdict {
    let open = d.resolved();
    match models(&d.env, &open, k, &d.ty, cfg) {
        Ok(v) => v,
        Err(e) => Verdict::RefutedWith(Box::new(crate::membership::Witness {
            term: crate::term::Term::Const(0),
            index: k,
            ty: d.ty.clone(),
            trace: crate::eval::Trace {
                steps: vec![crate::term::Term::Const(0)],
                terminal: crate::eval::Terminal::Value,
            },
            subst: None,
            probes: vec![],
            reason: format!("query error: {e}"),
        })),
    }
}
