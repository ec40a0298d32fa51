//! Counterexample shrinking: replay-guided reduction of a refuted
//! judgment to its smallest still-refuting core.
//!
//! Run with: cargo run -p stepix --example shrinking

use stepix::harness::{shrink, Counterexample};
use stepix::membership::ProbeConfig;
use stepix::parser::{parse_term, parse_type};
use stepix::term::resolve_closed;

fn main() {
    let pcfg = ProbeConfig::default();

    // a large-ish judgment that fails because a stuck application hides
    // inside: (\x. (\y. 0 0) x) (5 5) against Nat
    let term = resolve_closed(&parse_term("(\\x. (\\y. 0 0) x) (5 5)").expect("parses"))
        .expect("closed");
    let cx = Counterexample {
        term,
        index: 9,
        ty: parse_type("Nat").unwrap(),
        detail: "stuck application buried in a redex".to_string(),
    };
    println!("before: {} :_{} {}", cx.term, cx.index, cx.ty);
    println!("replays: {}", cx.replays(&pcfg));

    let small = shrink(&cx, &pcfg);
    println!("after:  {} :_{} {}", small.term, small.index, small.ty);
    println!("still replays: {}", small.replays(&pcfg));

    // shrinking is greedy and replay-guided: each accepted step keeps the
    // judgment refuted, and the result is minimal in the sense that every
    // further single step would un-refute it
    let already = Counterexample {
        term: resolve_closed(&parse_term("0 0").unwrap()).unwrap(),
        index: 1,
        ty: parse_type("Nat").unwrap(),
        detail: String::new(),
    };
    let same = shrink(&already, &pcfg);
    println!(
        "an already-minimal case stays put: {} :_{} {}",
        same.term, same.index, same.ty
    );
}
