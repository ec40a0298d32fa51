//! Terms of the call-by-name lambda calculus with constants and `fix`.
//!
//! The internal representation ([`Term`]) is nameless: a variable is a de
//! Bruijn index counting enclosing binders, so alpha-equivalence is plain
//! structural equality and substitution cannot capture. The named surface
//! form ([`SurfaceTerm`]) carries the concrete syntax, including optional
//! binder annotations consumed by the derivation engine.

use std::fmt;
use std::rc::Rc;

use crate::types::TypeExpr;

/// A nameless term. `Var(i)` refers to the `i`-th enclosing binder; indices
/// at or beyond the binder depth are free and interpreted against an
/// [`OpenTerm`] context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(u64),
    Var(usize),
    Abs(Rc<Term>),
    App(Rc<Term>, Rc<Term>),
    Fix(Rc<Term>),
}

impl Term {
    pub fn abs(body: Term) -> Term {
        Term::Abs(Rc::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Rc::new(fun), Rc::new(arg))
    }

    pub fn fix(body: Term) -> Term {
        Term::Fix(Rc::new(body))
    }

    /// The divergent term `(\x. x x) (\x. x x)`.
    pub fn omega() -> Term {
        let self_app = Term::abs(Term::app(Term::Var(0), Term::Var(0)));
        Term::app(self_app.clone(), self_app)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::Abs(b) | Term::Fix(b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    fn closed_under(&self, depth: usize) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(i) => *i < depth,
            Term::Abs(b) => b.closed_under(depth + 1),
            Term::App(f, a) => f.closed_under(depth) && a.closed_under(depth),
            Term::Fix(b) => b.closed_under(depth),
        }
    }

    /// True when no variable escapes its binders.
    pub fn is_closed(&self) -> bool {
        self.closed_under(0)
    }

    /// A value is a constant or a closed abstraction.
    pub fn is_value(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Abs(_) => self.is_closed(),
            _ => false,
        }
    }

    /// Value check for terms already known to be closed; skips the scan.
    pub(crate) fn is_value_closed(&self) -> bool {
        matches!(self, Term::Const(_) | Term::Abs(_))
    }

    /// Free variable indices as seen from the top level.
    pub fn free_vars(&self) -> std::collections::BTreeSet<usize> {
        fn walk(t: &Term, depth: usize, out: &mut std::collections::BTreeSet<usize>) {
            match t {
                Term::Const(_) => {}
                Term::Var(i) => {
                    if *i >= depth {
                        out.insert(*i - depth);
                    }
                }
                Term::Abs(b) => walk(b, depth + 1, out),
                Term::App(f, a) => {
                    walk(f, depth, out);
                    walk(a, depth, out);
                }
                Term::Fix(b) => walk(b, depth, out),
            }
        }
        let mut out = std::collections::BTreeSet::new();
        walk(self, 0, &mut out);
        out
    }

    /// Shift free indices `>= cutoff` up by `by`.
    pub(crate) fn shift_above(&self, by: usize, cutoff: usize) -> Term {
        match self {
            Term::Const(_) => self.clone(),
            Term::Var(i) => {
                if *i >= cutoff {
                    Term::Var(i + by)
                } else {
                    self.clone()
                }
            }
            Term::Abs(b) => Term::abs(b.shift_above(by, cutoff + 1)),
            Term::App(f, a) => Term::app(f.shift_above(by, cutoff), a.shift_above(by, cutoff)),
            Term::Fix(b) => Term::fix(b.shift_above(by, cutoff)),
        }
    }

    /// Capture-avoiding substitution of `replacement` for the free variable
    /// `target` (an index at this term's top level). The binder is consumed:
    /// free indices above `target` shift down by one.
    pub fn substitute(&self, target: usize, replacement: &Term) -> Term {
        fn go(t: &Term, target: usize, depth: usize, repl: &Term) -> Term {
            match t {
                Term::Const(_) => t.clone(),
                Term::Var(i) => {
                    let goal = target + depth;
                    if *i == goal {
                        repl.shift_above(depth, 0)
                    } else if *i > goal {
                        Term::Var(i - 1)
                    } else {
                        t.clone()
                    }
                }
                Term::Abs(b) => Term::abs(go(b, target, depth + 1, repl)),
                Term::App(f, a) => Term::app(go(f, target, depth, repl), go(a, target, depth, repl)),
                Term::Fix(b) => Term::fix(go(b, target, depth, repl)),
            }
        }
        go(self, target, 0, replacement)
    }

    /// Beta-substitution: replace the innermost binder's variable in a
    /// lambda body, as in `(\x. body) arg -> body[x := arg]`.
    pub(crate) fn subst_top(body: &Term, arg: &Term) -> Term {
        body.substitute(0, arg)
    }
}

/// Identity up to bound-variable renaming. Structural on the nameless form.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}

const BINDER_POOL: [&str; 8] = ["x", "y", "z", "w", "u", "v", "s", "t"];

fn binder_name(depth: usize, taken: &[String]) -> String {
    let mut round = 0;
    loop {
        let base = BINDER_POOL[(depth + round) % BINDER_POOL.len()];
        let name = if (depth + round) / BINDER_POOL.len() == 0 {
            base.to_string()
        } else {
            format!("{}{}", base, (depth + round) / BINDER_POOL.len())
        };
        if !taken.iter().any(|t| t == &name) {
            return name;
        }
        round += 1;
    }
}

fn fmt_term(
    t: &Term,
    f: &mut fmt::Formatter<'_>,
    names: &mut Vec<String>,
    free: &[String],
    prec: u8,
) -> fmt::Result {
    // prec 0: bare; 1: function position; 2: argument position
    match t {
        Term::Const(n) => write!(f, "{n}"),
        Term::Var(i) => {
            if *i < names.len() {
                write!(f, "{}", names[names.len() - 1 - i])
            } else {
                let j = i - names.len();
                match free.get(j) {
                    Some(n) => write!(f, "{n}"),
                    None => write!(f, "?{j}"),
                }
            }
        }
        Term::Abs(b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            let mut taken: Vec<String> = names.clone();
            taken.extend(free.iter().cloned());
            let name = binder_name(names.len(), &taken);
            write!(f, "\\{name}. ")?;
            names.push(name);
            fmt_term(b, f, names, free, 0)?;
            names.pop();
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Term::App(fun, arg) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            fmt_term(fun, f, names, free, 1)?;
            write!(f, " ")?;
            fmt_term(arg, f, names, free, 2)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Term::Fix(b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write!(f, "fix ")?;
            fmt_term(b, f, names, free, 0)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f, &mut Vec::new(), &[], 0)
    }
}

/// A resolved term together with its free-variable context: the free index
/// `j` (as seen from the top level) is the variable named `free[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenTerm {
    pub term: Term,
    pub free: Vec<String>,
}

impl OpenTerm {
    pub fn closed(term: Term) -> OpenTerm {
        debug_assert!(term.is_closed());
        OpenTerm { term, free: Vec::new() }
    }

    pub fn is_closed(&self) -> bool {
        self.term.is_closed()
    }

    /// Substitute a closed term for the named free variable, removing it
    /// from the context. No-op when the name is not in the context.
    pub fn substitute_free(&self, name: &str, replacement: &Term) -> OpenTerm {
        debug_assert!(replacement.is_closed());
        match self.free.iter().position(|n| n == name) {
            None => self.clone(),
            Some(pos) => {
                let term = self.term.substitute(pos, replacement);
                let mut free = self.free.clone();
                free.remove(pos);
                OpenTerm { term, free }
            }
        }
    }
}

impl fmt::Display for OpenTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(&self.term, f, &mut Vec::new(), &self.free, 0)
    }
}

/// Named concrete syntax tree. Binder annotations are optional and used
/// only by the derivation engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceTerm {
    Const(u64),
    Var(String),
    Abs {
        param: String,
        annot: Option<TypeExpr>,
        body: Rc<SurfaceTerm>,
    },
    App(Rc<SurfaceTerm>, Rc<SurfaceTerm>),
    Fix(Rc<SurfaceTerm>),
}

impl SurfaceTerm {
    pub fn var(name: &str) -> SurfaceTerm {
        SurfaceTerm::Var(name.to_string())
    }

    pub fn abs(param: &str, annot: Option<TypeExpr>, body: SurfaceTerm) -> SurfaceTerm {
        SurfaceTerm::Abs {
            param: param.to_string(),
            annot,
            body: Rc::new(body),
        }
    }

    pub fn app(fun: SurfaceTerm, arg: SurfaceTerm) -> SurfaceTerm {
        SurfaceTerm::App(Rc::new(fun), Rc::new(arg))
    }

    pub fn fix(body: SurfaceTerm) -> SurfaceTerm {
        SurfaceTerm::Fix(Rc::new(body))
    }

    pub fn size(&self) -> usize {
        match self {
            SurfaceTerm::Const(_) | SurfaceTerm::Var(_) => 1,
            SurfaceTerm::Abs { body, .. } => 1 + body.size(),
            SurfaceTerm::App(f, a) => 1 + f.size() + a.size(),
            SurfaceTerm::Fix(b) => 1 + b.size(),
        }
    }
}

/// Variable is unbound where a closed term was demanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundVar(pub String);

impl fmt::Display for UnboundVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unbound variable `{}`", self.0)
    }
}

impl std::error::Error for UnboundVar {}

/// Convert names to nameless references. Unbound names become free-context
/// entries in order of first occurrence; annotations are erased.
pub fn resolve(s: &SurfaceTerm) -> OpenTerm {
    fn go(s: &SurfaceTerm, scope: &mut Vec<String>, free: &mut Vec<String>) -> Term {
        match s {
            SurfaceTerm::Const(n) => Term::Const(*n),
            SurfaceTerm::Var(name) => {
                if let Some(pos) = scope.iter().rev().position(|b| b == name) {
                    Term::Var(pos)
                } else {
                    let j = free
                        .iter()
                        .position(|n| n == name)
                        .unwrap_or_else(|| {
                            free.push(name.clone());
                            free.len() - 1
                        });
                    Term::Var(scope.len() + j)
                }
            }
            SurfaceTerm::Abs { param, body, .. } => {
                scope.push(param.clone());
                let b = go(body, scope, free);
                scope.pop();
                Term::abs(b)
            }
            SurfaceTerm::App(f, a) => Term::app(go(f, scope, free), go(a, scope, free)),
            SurfaceTerm::Fix(b) => Term::fix(go(b, scope, free)),
        }
    }
    let mut free = Vec::new();
    let term = go(s, &mut Vec::new(), &mut free);
    OpenTerm { term, free }
}

/// Resolve and demand closedness, naming the first unbound variable on
/// failure.
pub fn resolve_closed(s: &SurfaceTerm) -> Result<Term, UnboundVar> {
    let open = resolve(s);
    match open.free.first() {
        None => Ok(open.term),
        Some(name) => Err(UnboundVar(name.clone())),
    }
}

fn fmt_surface(s: &SurfaceTerm, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    match s {
        SurfaceTerm::Const(n) => write!(f, "{n}"),
        SurfaceTerm::Var(name) => write!(f, "{name}"),
        SurfaceTerm::Abs { param, annot, body } => {
            if prec > 0 {
                write!(f, "(")?;
            }
            match annot {
                Some(t) => write!(f, "\\{param}:{}. ", t.display_annot())?,
                None => write!(f, "\\{param}. ")?,
            }
            fmt_surface(body, f, 0)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        SurfaceTerm::App(fun, arg) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            fmt_surface(fun, f, 1)?;
            write!(f, " ")?;
            fmt_surface(arg, f, 2)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        SurfaceTerm::Fix(b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write!(f, "fix ")?;
            fmt_surface(b, f, 0)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for SurfaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_surface(self, f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;

    fn closed(text: &str) -> Term {
        resolve_closed(&parse_term(text).unwrap()).unwrap()
    }

    #[test]
    fn identity_resolves_closed() {
        let t = closed("\\x. x");
        assert_eq!(t, Term::abs(Term::Var(0)));
        assert_eq!(t.free_vars().len(), 0);
    }

    #[test]
    fn bare_variable_is_open() {
        let open = resolve(&parse_term("x").unwrap());
        assert_eq!(open.free, vec!["x".to_string()]);
        assert_eq!(open.term, Term::Var(0));
    }

    #[test]
    fn abstraction_over_foreign_name_is_open() {
        let open = resolve(&parse_term("\\x. y").unwrap());
        assert_eq!(open.free, vec!["y".to_string()]);
        assert_eq!(open.term, Term::abs(Term::Var(1)));
        assert!(resolve_closed(&parse_term("\\x. y").unwrap()).is_err());
    }

    #[test]
    fn substitute_free_occurrence() {
        // x[x := 0] = 0
        let t = Term::Var(0);
        assert_eq!(t.substitute(0, &Term::Const(0)), Term::Const(0));
    }

    #[test]
    fn substitute_leaves_bound_occurrence() {
        // (\x. x)[x := 0] at the outer x: the bound body occurrence refers
        // to the binder, not the substitution target.
        let t = Term::abs(Term::Var(0));
        assert_eq!(t.substitute(0, &Term::Const(0)), Term::abs(Term::Var(0)));
    }

    #[test]
    fn substitute_avoids_capture() {
        // (\y. x)[x := y]: the free y of the replacement must not be
        // captured by the binder. Context [x, y]: the term is \_. Var(1).
        // Replacement indices live in the result context [y], so y is
        // Var(0) there; under the binder it must come out as Var(1), i.e.
        // still the free y rather than the bound variable.
        let term = Term::abs(Term::Var(1));
        let result = term.substitute(0, &Term::Var(0));
        assert_eq!(result, Term::abs(Term::Var(1)));
    }

    #[test]
    fn values_are_constants_and_closed_abstractions() {
        assert!(Term::Const(1).is_value());
        assert!(closed("\\x. x").is_value());
        let open_abs = resolve(&parse_term("\\x. y").unwrap()).term;
        assert!(!open_abs.is_value());
        assert!(!closed("(\\x. x) 0").is_value());
    }

    #[test]
    fn alpha_eq_ignores_names() {
        assert!(alpha_eq(&closed("\\x. x"), &closed("\\y. y")));
        assert!(!alpha_eq(&closed("\\x. x"), &closed("\\x. 0")));
        assert!(alpha_eq(&closed("\\x.\\y. x"), &closed("\\a.\\b. a")));
    }

    #[test]
    fn printing_round_trips() {
        for text in [
            "\\x. x",
            "(\\x. x) 0",
            "fix \\x. x",
            "\\x. \\y. x y (x 0)",
            "(\\x. x x) (\\x. x x)",
        ] {
            let t = closed(text);
            let printed = t.to_string();
            let back = closed(&printed);
            assert!(alpha_eq(&t, &back), "{text} -> {printed} reparsed differently");
        }
    }

    #[test]
    fn print_examples() {
        assert_eq!(Term::Const(0).to_string(), "0");
        assert_eq!(Term::abs(Term::Var(0)).to_string(), "\\x. x");
        assert_eq!(Term::fix(Term::abs(Term::Const(0))).to_string(), "fix \\x. 0");
    }

    #[test]
    fn open_terms_round_trip() {
        for text in ["x", "\\x. y", "x y (\\z. x w)", "f (fix f)"] {
            let open = resolve(&parse_term(text).unwrap());
            let printed = open.to_string();
            let back = resolve(&parse_term(&printed).unwrap());
            assert!(
                alpha_eq(&open.term, &back.term),
                "{text} -> {printed} reparsed differently"
            );
            assert_eq!(open.free, back.free, "{text}");
        }
    }

    #[test]
    fn omega_is_closed_and_not_a_value() {
        let o = Term::omega();
        assert!(o.is_closed());
        assert!(!o.is_value());
        assert_eq!(o.to_string(), "(\\x. x x) (\\x. x x)");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_term(depth: u32) -> BoxedStrategy<Term> {
            let leaf = prop_oneof![
                (0u64..5).prop_map(Term::Const),
                (0usize..3).prop_map(Term::Var),
            ];
            leaf.prop_recursive(depth, 64, 2, |inner| {
                prop_oneof![
                    inner.clone().prop_map(Term::abs),
                    (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
                    inner.prop_map(Term::fix),
                ]
            })
            .boxed()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(512))]

            #[test]
            fn alpha_eq_is_reflexive(t in arb_term(5)) {
                prop_assert!(alpha_eq(&t, &t));
            }

            #[test]
            fn alpha_eq_is_symmetric(a in arb_term(4), b in arb_term(4)) {
                prop_assert_eq!(alpha_eq(&a, &b), alpha_eq(&b, &a));
            }

            #[test]
            fn print_parse_round_trip(t in arb_term(5)) {
                // Close the term by wrapping in enough binders.
                let depth = t.free_vars().iter().next_back().map_or(0, |m| m + 1);
                let mut closed = t;
                for _ in 0..depth {
                    closed = Term::abs(closed);
                }
                prop_assert!(closed.is_closed());
                let printed = closed.to_string();
                let reparsed = resolve_closed(&parse_term(&printed).unwrap()).unwrap();
                prop_assert!(alpha_eq(&closed, &reparsed), "printed: {}", printed);
            }

            #[test]
            fn substitute_tracks_free_vars(t in arb_term(4), r in arb_term(3)) {
                // Free vars after substituting target 0: x removed, free
                // vars of the replacement added (when x occurred), others
                // shifted down by one.
                let before = t.free_vars();
                let after = t.substitute(0, &r).free_vars();
                let mut expected: std::collections::BTreeSet<usize> = before
                    .iter()
                    .filter(|&&i| i > 0)
                    .map(|&i| i - 1)
                    .collect();
                if before.contains(&0) {
                    expected.extend(r.free_vars());
                }
                prop_assert_eq!(after, expected);
            }
        }

        #[test]
        fn alpha_eq_is_an_equivalence_relation() {
            // Equality is structural on the nameless form, so these are
            // inherited from `Eq`; exercise them on a 10^4 deterministic
            // corpus anyway.
            use proptest::strategy::ValueTree;
            let mut runner = proptest::test_runner::TestRunner::deterministic();
            let strat = (arb_term(4), arb_term(4), arb_term(4));
            for _ in 0..10_000 {
                let (a, b, c) = strat
                    .new_tree(&mut runner)
                    .expect("value tree")
                    .current();
                assert!(alpha_eq(&a, &a));
                assert_eq!(alpha_eq(&a, &b), alpha_eq(&b, &a));
                if alpha_eq(&a, &b) && alpha_eq(&b, &c) {
                    assert!(alpha_eq(&a, &c));
                }
            }
        }
    }
}
