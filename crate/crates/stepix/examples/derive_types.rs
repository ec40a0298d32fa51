//! The syntax-directed derivation engine over annotated terms, including
//! fix typing and on-demand equi-recursive unfolding, and the semantic
//! confirmation of derived judgments.
//!
//! Run with: cargo run -p stepix --example derive_types

use stepix::derivation::{check_derivation, derive, type_eq};
use stepix::membership::ProbeConfig;
use stepix::parser::{parse_env, parse_term, parse_type};
use stepix::types::TypeEnv;

fn show(env_text: &str, term_text: &str) {
    let env = parse_env(env_text).expect("env parses");
    let term = parse_term(term_text).expect("term parses");
    match derive(&env, &term) {
        Ok(d) => {
            println!("-- {term_text}  has type  {}", d.ty);
            print!("{}", d.render_tree());
            let verdict = check_derivation(&d, 50, &ProbeConfig::default());
            println!("semantic check at k = 50: refuted = {}", verdict.is_refuted());
        }
        Err(e) => println!("-- {term_text}  fails: {e}"),
    }
    println!();
}

fn main() {
    // the simply typed fragment
    show("", "\\x:Nat. x");
    show("", "(\\x:Nat. x) 0");
    show("", "\\f:Nat -> Nat. \\x:Nat. f x");

    // fix demands an endo-arrow and yields its argument type; the derived
    // term diverges yet is typed and safe
    show("", "fix \\x:Nat. x");

    // recursion through a recursive type: applying a stream unfolds the mu
    show("s: mu X. Nat -> X", "s 0");
    show("s: mu X. Nat -> X", "(s 0) 1");

    // rule-level failures
    show("", "0 1");
    show("", "\\x. x");
    show("", "fix \\x:Nat. \\y:Nat. y");

    // equi-recursive equality identifies a mu with its unfolding
    let a = parse_type("mu X. Nat -> X").unwrap();
    let b = parse_type("Nat -> (mu X. Nat -> X)").unwrap();
    let c = parse_type("mu X. Nat -> (mu Y. Nat -> Y)").unwrap();
    println!("type_eq(mu X. Nat -> X, Nat -> (mu X. Nat -> X)) = {}", type_eq(&a, &b));
    println!("type_eq(mu X. Nat -> X, mu X. Nat -> (mu Y. Nat -> Y)) = {}", type_eq(&a, &c));

    // a derivation tree survives structural re-validation
    let d = derive(&TypeEnv::new(), &parse_term("(\\x:Nat. x) 0").unwrap()).unwrap();
    println!("revalidates: {}", d.revalidate());
}
