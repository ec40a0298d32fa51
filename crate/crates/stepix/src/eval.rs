//! Deterministic call-by-name small-step evaluator.
//!
//! Three rules: beta at the root, reduction in the function position, and
//! `fix a -> a (fix a)`. Nothing reduces under a binder or in argument
//! position, so every term an evaluation visits stays closed.

use std::fmt;

use crate::term::Term;

/// Operation demanded a closed term but was handed an open one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenTermError;

impl fmt::Display for OpenTermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "term has unbound variables")
    }
}

impl std::error::Error for OpenTermError {}

/// How a finite reduction sequence ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// Last term is a value.
    Value,
    /// Last term is irreducible but not a value: it "went wrong".
    Stuck,
    /// The step budget ran out while the last term could still step.
    BudgetExhausted,
}

/// A finite reduction sequence `a0 -> a1 -> ... -> aj` with a classified
/// terminal state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Term>,
    pub terminal: Terminal,
}

impl Trace {
    /// Number of reduction steps taken (one less than the entries).
    pub fn steps_taken(&self) -> u64 {
        (self.steps.len() - 1) as u64
    }

    pub fn last(&self) -> &Term {
        self.steps.last().expect("trace holds at least the start term")
    }

    pub fn is_stuck(&self) -> bool {
        self.terminal == Terminal::Stuck
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.steps {
            writeln!(f, "{t}")?;
        }
        let tag = match self.terminal {
            Terminal::Value => "value",
            Terminal::Stuck => "stuck",
            Terminal::BudgetExhausted => "budget",
        };
        write!(f, "{tag}: {}", self.last())
    }
}

fn step_closed(a: &Term) -> Option<Term> {
    match a {
        Term::App(fun, arg) => match fun.as_ref() {
            Term::Abs(body) => Some(Term::subst_top(body, arg)),
            f => step_closed(f).map(|f2| Term::App(std::rc::Rc::new(f2), arg.clone())),
        },
        Term::Fix(body) => Some(Term::app(body.as_ref().clone(), a.clone())),
        _ => None,
    }
}

/// The unique successor under the small-step rules, or `None` when the
/// term is irreducible.
pub fn step(a: &Term) -> Result<Option<Term>, OpenTermError> {
    if !a.is_closed() {
        return Err(OpenTermError);
    }
    Ok(step_closed(a))
}

/// Iterate [`step`] at most `budget` times and classify the terminal state.
pub fn trace(a: &Term, budget: u64) -> Result<Trace, OpenTermError> {
    if !a.is_closed() {
        return Err(OpenTermError);
    }
    let mut steps = Vec::with_capacity((budget.min(64) + 1) as usize);
    let mut current = a.clone();
    for _ in 0..budget {
        match step_closed(&current) {
            Some(next) => {
                steps.push(current);
                current = next;
            }
            None => {
                let terminal = if current.is_value_closed() {
                    Terminal::Value
                } else {
                    Terminal::Stuck
                };
                steps.push(current);
                return Ok(Trace { steps, terminal });
            }
        }
    }
    let terminal = if step_closed(&current).is_some() {
        Terminal::BudgetExhausted
    } else if current.is_value_closed() {
        Terminal::Value
    } else {
        Terminal::Stuck
    };
    steps.push(current);
    Ok(Trace { steps, terminal })
}

/// Is `a` safe for `k` steps: every reduct reachable in fewer than `k`
/// steps is a value or can step. Returns the witnessing trace.
pub fn safe_for(a: &Term, k: u64) -> Result<(bool, Trace), OpenTermError> {
    if k == 0 {
        // any term is safe for 0 steps; a zero-step run witnesses it
        let t = trace(a, 0)?;
        return Ok((true, t));
    }
    let t = trace(a, k - 1)?;
    let safe = match t.terminal {
        Terminal::Value | Terminal::BudgetExhausted => true,
        Terminal::Stuck => false,
    };
    Ok((safe, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;
    use crate::term::resolve_closed;

    fn closed(text: &str) -> Term {
        resolve_closed(&parse_term(text).unwrap()).unwrap()
    }

    #[test]
    fn beta_at_root() {
        let a = closed("(\\x. x) 0");
        assert_eq!(step(&a).unwrap(), Some(Term::Const(0)));
    }

    #[test]
    fn reduction_in_function_position() {
        let a = closed("((\\x.\\y. x) 0) 1");
        assert_eq!(step(&a).unwrap(), Some(closed("(\\y. 0) 1")));
    }

    #[test]
    fn fix_unrolls() {
        let a = closed("fix \\f. 0");
        assert_eq!(step(&a).unwrap(), Some(closed("(\\f. 0) (fix \\f. 0)")));
    }

    #[test]
    fn constant_head_is_stuck() {
        let a = closed("0 0");
        assert_eq!(step(&a).unwrap(), None);
        assert!(!a.is_value());
    }

    #[test]
    fn values_are_irreducible() {
        assert_eq!(step(&Term::Const(3)).unwrap(), None);
        assert_eq!(step(&closed("\\x. x")).unwrap(), None);
    }

    #[test]
    fn open_terms_are_rejected() {
        let open = crate::term::resolve(&parse_term("x").unwrap()).term;
        assert_eq!(step(&open), Err(OpenTermError));
        assert!(trace(&open, 10).is_err());
        assert!(safe_for(&open, 10).is_err());
    }

    #[test]
    fn trace_of_redex() {
        let t = trace(&closed("(\\x. x) 0"), 10).unwrap();
        assert_eq!(t.steps_taken(), 1);
        assert_eq!(t.terminal, Terminal::Value);
        assert_eq!(t.last(), &Term::Const(0));
        assert_eq!(t.steps, vec![closed("(\\x. x) 0"), Term::Const(0)]);
    }

    #[test]
    fn trace_of_omega_exhausts_budget() {
        let t = trace(&Term::omega(), 1000).unwrap();
        assert_eq!(t.steps_taken(), 1000);
        assert_eq!(t.terminal, Terminal::BudgetExhausted);
        // every step reproduces omega
        assert!(t.steps.iter().all(|s| s == &Term::omega()));
    }

    #[test]
    fn trace_of_value_is_empty() {
        let t = trace(&Term::Const(0), 5).unwrap();
        assert_eq!(t.steps_taken(), 0);
        assert_eq!(t.terminal, Terminal::Value);
    }

    #[test]
    fn trace_serialization_format() {
        let t = trace(&closed("(\\x. x) 0"), 10).unwrap();
        assert_eq!(t.to_string(), "(\\x. x) 0\n0\nvalue: 0");
        let t = trace(&closed("0 0"), 10).unwrap();
        assert_eq!(t.to_string(), "0 0\nstuck: 0 0");
        let t = trace(&Term::omega(), 1).unwrap();
        assert_eq!(
            t.to_string(),
            "(\\x. x x) (\\x. x x)\n(\\x. x x) (\\x. x x)\nbudget: (\\x. x x) (\\x. x x)"
        );
    }

    #[test]
    fn safe_for_zero_accepts_everything() {
        assert!(safe_for(&closed("0 0"), 0).unwrap().0);
        assert!(safe_for(&Term::omega(), 0).unwrap().0);
    }

    #[test]
    fn stuck_term_is_unsafe_at_one() {
        let (safe, t) = safe_for(&closed("0 0"), 1).unwrap();
        assert!(!safe);
        assert!(t.is_stuck());
    }

    #[test]
    fn omega_is_safe() {
        assert!(safe_for(&Term::omega(), 1000).unwrap().0);
    }

    #[test]
    fn safe_prefix_property_on_samples() {
        for text in ["(\\x. x) ((\\y. y) 0)", "(\\x. 0 0) 1", "fix \\f. f"] {
            let a = closed(text);
            for k in 0..12u64 {
                let (safe_k, _) = safe_for(&a, k).unwrap();
                if safe_k {
                    for j in 0..=k {
                        assert!(safe_for(&a, j).unwrap().0, "{text} at {j} <= {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn trace_entries_are_step_related() {
        for text in [
            "(\\x. x) ((\\y. y) 0)",
            "fix \\f. \\x. f x",
            "(\\x. x x) (\\x. x x)",
            "(\\x. \\y. x y) 0 1",
        ] {
            let a = closed(text);
            let t = trace(&a, 20).unwrap();
            for pair in t.steps.windows(2) {
                assert_eq!(step(&pair[0]).unwrap(), Some(pair[1].clone()), "{text}");
            }
        }
    }

    #[test]
    fn fix_always_takes_the_unroll_rule() {
        for text in ["fix \\f. 0", "fix \\f. f", "fix (\\x. x) \\y. y"] {
            let a = closed(text);
            let t = trace(&a, 1).unwrap();
            assert_eq!(t.steps_taken(), 1);
            if let Term::Fix(body) = &a {
                assert_eq!(t.steps[1], Term::app(body.as_ref().clone(), a.clone()));
            }
        }
    }
}
