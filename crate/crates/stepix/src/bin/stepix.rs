//! Command-line front door: evaluate terms, check step-indexed judgments,
//! derive types, and run the verification suite.
//!
//! Exit codes: 0 success, 1 refuted judgment / failed derivation / suite
//! refutations, 2 evaluation went wrong (stuck), 64 usage or parse errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stepix::eval::{safe_for, trace, Terminal};
use stepix::harness::{default_cases, run_all, run_property, GenConfig};
use stepix::membership::{holds, ProbeConfig};
use stepix::parser::{parse_env, parse_term, parse_type};
use stepix::term::resolve_closed;
use stepix::derivation::derive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(name = "stepix", about = "Step-indexed semantic types for the call-by-name lambda calculus", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a term, printing the reduction trace
    Eval {
        /// Term text, or @path to read it from a file
        term: String,
        /// Step budget
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide safe-for-k-steps
    Safe {
        term: String,
        #[arg(long, default_value_t = 1000)]
        k: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the judgment `term :_k type`
    Check {
        term: String,
        #[arg(long = "type")]
        ty: String,
        #[arg(long, default_value_t = 25)]
        k: u64,
        /// Probes per type per index
        #[arg(long, default_value_t = 5)]
        probes: u64,
        #[arg(long, default_value_t = 8)]
        max_probe_size: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Derive a type for an annotated term
    Derive {
        term: String,
        /// Environment bindings, e.g. "x: Nat, f: Nat -> Nat"
        #[arg(long, default_value = "")]
        env: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the property-verification suite
    Verify {
        /// `all` or a property id
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Maximum step index exercised by quantified properties
        #[arg(long, default_value_t = 25)]
        k: u64,
        /// Cases per property (default: each property's own count)
        #[arg(long)]
        cases: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn read_input(arg: &str) -> Result<String, String> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))
    } else {
        Ok(arg.to_string())
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(64)
}

fn parse_closed(text: &str) -> Result<stepix::Term, String> {
    let surface = parse_term(text).map_err(|e| e.to_string())?;
    resolve_closed(&surface).map_err(|e| e.to_string())
}

fn terminal_tag(t: Terminal) -> &'static str {
    match t {
        Terminal::Value => "value",
        Terminal::Stuck => "stuck",
        Terminal::BudgetExhausted => "budget",
    }
}

fn cmd_eval(term: &str, steps: u64, format: Format) -> ExitCode {
    let text = match read_input(term) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let a = match parse_closed(&text) {
        Ok(a) => a,
        Err(e) => return usage_error(&e),
    };
    let run = trace(&a, steps).expect("closed term");
    match format {
        Format::Text => println!("{run}"),
        Format::Structured => {
            println!("command: eval");
            println!("term: {a}");
            println!("steps: {}", run.steps_taken());
            println!("terminal: {}", terminal_tag(run.terminal));
            println!("trace:");
            for line in run.to_string().lines() {
                println!("  {line}");
            }
        }
    }
    if run.terminal == Terminal::Stuck {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_safe(term: &str, k: u64, format: Format) -> ExitCode {
    let text = match read_input(term) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let a = match parse_closed(&text) {
        Ok(a) => a,
        Err(e) => return usage_error(&e),
    };
    let (safe, run) = safe_for(&a, k).expect("closed term");
    match format {
        Format::Text => {
            println!("{run}");
            println!("safe for {k} steps: {}", if safe { "yes" } else { "no" });
        }
        Format::Structured => {
            println!("command: safe");
            println!("term: {a}");
            println!("k: {k}");
            println!("safe: {safe}");
            println!("trace:");
            for line in run.to_string().lines() {
                println!("  {line}");
            }
        }
    }
    if safe {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    term: &str,
    ty: &str,
    k: u64,
    probes: u64,
    max_probe_size: u64,
    seed: u64,
    format: Format,
) -> ExitCode {
    let term_text = match read_input(term) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let ty_text = match read_input(ty) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let a = match parse_closed(&term_text) {
        Ok(a) => a,
        Err(e) => return usage_error(&e),
    };
    let t = match parse_type(&ty_text) {
        Ok(t) => t,
        Err(e) => return usage_error(&e.to_string()),
    };
    let cfg = ProbeConfig {
        probes_per_type: probes.max(1),
        max_probe_size,
        seed,
        extra_probes: Vec::new(),
    };
    let verdict = match holds(&a, k, &t, &cfg) {
        Ok(v) => v,
        Err(e) => return usage_error(&e.to_string()),
    };
    if format == Format::Structured {
        println!("command: check");
        println!("term: {a}");
        println!("k: {k}");
        println!("type: {t}");
        println!("seed: {seed}");
    }
    print!("{}", verdict.render());
    if verdict.is_refuted() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_derive(term: &str, env: &str, format: Format) -> ExitCode {
    let text = match read_input(term) {
        Ok(t) => t,
        Err(e) => return usage_error(&e),
    };
    let surface = match parse_term(&text) {
        Ok(s) => s,
        Err(e) => return usage_error(&e.to_string()),
    };
    let env = match parse_env(env) {
        Ok(e) => e,
        Err(e) => return usage_error(&e.to_string()),
    };
    match derive(&env, &surface) {
        Ok(d) => {
            match format {
                Format::Text => {
                    println!("type: {}", d.ty);
                    print!("{}", d.render_tree());
                }
                Format::Structured => {
                    println!("command: derive");
                    print!("{}", d.render_structured());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("derivation failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_verify(suite: &str, seed: u64, k: u64, cases: Option<u64>, format: Format) -> ExitCode {
    let cfg = GenConfig {
        seed,
        max_index: k,
        ..GenConfig::default()
    };
    let pcfg = ProbeConfig::with_seed(seed);
    let reports = if suite == "all" {
        run_all(&cfg, &pcfg, cases)
    } else {
        let cases = cases.or_else(|| default_cases(suite));
        let cfg = GenConfig {
            cases_per_property: cases.unwrap_or(cfg.cases_per_property),
            ..cfg
        };
        match run_property(suite, &cfg, &pcfg) {
            Ok(r) => vec![r],
            Err(e) => return usage_error(&e.to_string()),
        }
    };
    if format == Format::Structured {
        println!("command: verify");
        println!("suite: {suite}");
        println!("seed: {seed}");
    }
    let mut refuted = false;
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            println!();
        }
        print!("{}", r.render());
        refuted |= !r.passed();
    }
    if refuted {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(64);
        }
    };
    match cli.command {
        Command::Eval { term, steps, format } => cmd_eval(&term, steps, format),
        Command::Safe { term, k, format } => cmd_safe(&term, k, format),
        Command::Check {
            term,
            ty,
            k,
            probes,
            max_probe_size,
            seed,
            format,
        } => cmd_check(&term, &ty, k, probes, max_probe_size, seed, format),
        Command::Derive { term, env, format } => cmd_derive(&term, &env, format),
        Command::Verify {
            suite,
            seed,
            k,
            cases,
            format,
        } => cmd_verify(&suite, seed, k, cases, format),
    }
}
