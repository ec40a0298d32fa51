//! Small-step call-by-name evaluation with traces.
//!
//! Run with: cargo run -p stepix --example eval_trace

use stepix::eval::trace;
use stepix::parser::parse_term;
use stepix::term::{resolve_closed, Term};

fn show(text: &str, budget: u64) {
    let term = resolve_closed(&parse_term(text).expect("parses")).expect("closed");
    println!("-- trace of `{term}` (budget {budget})");
    println!("{}", trace(&term, budget).expect("closed"));
    println!();
}

fn main() {
    // a beta redex reduces to a value
    show("(\\x. x) 0", 10);

    // reduction happens in the function position only: the argument of an
    // application is never touched before it is substituted
    show("((\\x. \\y. x) 0) 1", 10);

    // fix unrolls itself: fix a -> a (fix a)
    show("fix \\f. 0", 10);

    // a constant in head position has no rule: the term is stuck
    show("0 0", 10);

    // call-by-name discards an argument that would go wrong elsewhere
    show("(\\x. 5) (0 0)", 10);

    // the divergent term runs out of budget instead of misbehaving
    let omega = Term::omega();
    println!("-- trace of omega (budget 8)");
    println!("{}", trace(&omega, 8).expect("closed"));
}
