//! Run the full property catalog: every typing lemma and theorem of the
//! model checked at bounded index with seeded generators.
//!
//! Run with: cargo run -p stepix --release --example verify_all

use stepix::harness::{run_all, GenConfig};
use stepix::membership::ProbeConfig;

fn main() {
    let cfg = GenConfig::default();
    let pcfg = ProbeConfig::with_seed(cfg.seed);

    // trimmed case counts so the example finishes quickly; the acceptance
    // suite and the `verify` subcommand run the full defaults
    let reports = run_all(&cfg, &pcfg, Some(50));

    let mut failed = 0;
    for r in &reports {
        println!("{}", r.render());
        if !r.passed() {
            failed += 1;
        }
    }
    println!(
        "{}/{} properties passed",
        reports.len() - failed,
        reports.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
