//! Step-indexed type membership: exact where the type permits, probe-based
//! falsification where the arrow quantifies over all terms.
//!
//! Run with: cargo run -p stepix --example membership

use stepix::membership::{holds, value_member, ProbeConfig};
use stepix::parser::{parse_term, parse_type};
use stepix::term::{resolve_closed, Term};

fn main() {
    let cfg = ProbeConfig::default();
    let term = |s: &str| resolve_closed(&parse_term(s).expect("parses")).expect("closed");
    let ty = |s: &str| parse_type(s).expect("parses");

    // constants inhabit Nat at every index, exactly
    let v = holds(&term("3"), 5, &ty("Nat"), &cfg).unwrap();
    println!("3 :_5 Nat\n{}", v.render());

    // a term counts as long as it cannot be caught misbehaving within the
    // index: at k = 1 only zero-step behavior is quantified, and index-0
    // judgments are vacuous, so even \x. 0 0 passes
    let bad = term("\\x. 0 0");
    let arrow = ty("Nat -> Nat");
    let v = value_member(1, &bad, &arrow, &cfg).unwrap();
    println!("(1, \\x. 0 0) in Nat -> Nat\n{}", v.render());

    // one more index and a probe catches it: applying to 0 gets stuck
    let v = value_member(2, &bad, &arrow, &cfg).unwrap();
    println!("(2, \\x. 0 0) in Nat -> Nat\n{}", v.render());

    // the divergent term inhabits every type at every index: evaluation
    // never reaches an irreducible term, so the judgment is vacuous
    for t in ["Bot", "Top", "Nat", "Nat -> Nat", "mu X. Nat -> X"] {
        let v = holds(&Term::omega(), 1000, &ty(t), &cfg).unwrap();
        println!("omega :_1000 {t}  ->  {}", v.render().trim_end());
    }
    println!();

    // probe passes are evidence, not proof: the identity maps Nat probes
    // to Nat
    let v = holds(&term("\\x. x"), 6, &arrow, &cfg).unwrap();
    println!("\\x. x :_6 Nat -> Nat\n{}", v.render());

    // a stuck term is in no type by the time it goes wrong
    let v = holds(&term("0 0"), 1, &ty("Nat"), &cfg).unwrap();
    println!("0 0 :_1 Nat\n{}", v.render());
}
