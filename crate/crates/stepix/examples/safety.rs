//! The safe-for-k-steps predicate: no reduct reachable in fewer than k
//! steps is an irreducible non-value.
//!
//! Run with: cargo run -p stepix --example safety

use stepix::eval::safe_for;
use stepix::parser::parse_term;
use stepix::term::{resolve_closed, Term};

fn check(text: &str, k: u64) {
    let term = resolve_closed(&parse_term(text).expect("parses")).expect("closed");
    let (safe, run) = safe_for(&term, k).expect("closed");
    println!(
        "safe_for({term}, {k}) = {}  [{} steps, ends {}]",
        safe,
        run.steps_taken(),
        match run.terminal {
            stepix::Terminal::Value => "at a value",
            stepix::Terminal::Stuck => "stuck",
            stepix::Terminal::BudgetExhausted => "still running",
        }
    );
}

fn main() {
    // values are trivially safe
    check("0", 100);
    check("\\x. x", 100);

    // anything is safe for zero steps, even a stuck term
    check("0 0", 0);
    // ... but not for one
    check("0 0", 1);

    // stuckness may take a few steps to surface
    check("(\\x. x 0) 1", 1);
    check("(\\x. x 0) 1", 2);

    // divergence is safe: the term always has a next step
    let omega = Term::omega();
    let (safe, _) = safe_for(&omega, 1000).expect("closed");
    println!("safe_for(omega, 1000) = {safe}");

    // fix the identity diverges productively and is safe as well
    check("fix \\x. x", 1000);
}
