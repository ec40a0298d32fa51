//! Recursive types: bounded mu-unrolling, the guardedness analysis, and
//! the fixed-point equation mu F = F(mu F) checked on probe values.
//!
//! Run with: cargo run -p stepix --example recursive_types

use stepix::membership::{value_member, ProbeConfig};
use stepix::parser::{parse_term, parse_type};
use stepix::term::resolve_closed;
use stepix::types::{is_guarded, mu_unfold_once, mu_unroll};

fn main() {
    let cfg = ProbeConfig::default();
    let ty = |s: &str| parse_type(s).expect("parses");
    let term = |s: &str| resolve_closed(&parse_term(s).expect("parses")).expect("closed");

    // membership in mu F at index k is membership in F^(k+1)(Bot)
    let stream = ty("mu X. Nat -> X");
    for n in 0..4 {
        println!("unroll({stream}, {n}) = {}", mu_unroll(&stream, n));
    }
    println!();

    // guardedness: every occurrence of the bound variable must sit under
    // an arrow; sufficient for the well-foundedness equation
    for t in ["mu X. Nat -> X", "mu X. X", "mu X. (X -> Nat) -> Nat", "mu X. Nat"] {
        println!("is_guarded({t}) = {}", is_guarded(&ty(t)));
    }
    println!();

    // the identity functional has no fixed-point content: mu X. X is Bot,
    // so membership is refuted at every index
    let bottom = ty("mu X. X");
    for k in 0..4 {
        let v = value_member(k, &term("0"), &bottom, &cfg).unwrap();
        println!("(k={k}, 0) in mu X. X  ->  refuted: {}", v.is_refuted());
    }
    println!();

    // mu F and F(mu F) agree on probed values for guarded F
    let unfolded = mu_unfold_once(&stream).unwrap();
    println!("comparing {stream}  with  {unfolded}");
    // a diverging-result abstraction inhabits any arrow, hence the stream
    let values = [term("\\x. x"), term("0"), term("\\x. (\\y. y y) (\\y. y y)")];
    for v in &values {
        for k in [0u64, 1, 3, 6] {
            let lhs = value_member(k, v, &stream, &cfg).unwrap();
            let rhs = value_member(k, v, &unfolded, &cfg).unwrap();
            println!(
                "  k={k} v={v}: mu side refuted={}, unfolded side refuted={}",
                lhs.is_refuted(),
                rhs.is_refuted()
            );
        }
    }
}
