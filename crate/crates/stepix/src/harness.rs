//! Seeded generators and a property catalog machine-checking the model's
//! lemmas at bounded index.
//!
//! Well-typed terms are generated by applying the typing rules backwards
//! (generate-and-filter has vanishing yield at useful sizes); arbitrary
//! terms come from a stuckness-biased generator. Every property run is
//! fully determined by its seed, and a refuted case is minimized by
//! term-size-then-index shrinking before it is reported.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivation::{match_arrow, type_eq};
use crate::eval::{safe_for, step, trace, Terminal};
use crate::membership::{
    fnv1a64, holds, probes_for, value_member, ProbeConfig, Verdict,
};
use crate::term::{resolve, resolve_closed, SurfaceTerm, Term};
use crate::types::{is_guarded, mu_unfold_once, TypeEnv, TypeExpr};

/// Generator bounds and the seed everything derives from.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub max_term_size: u64,
    pub max_type_depth: u64,
    pub max_index: u64,
    pub cases_per_property: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 42,
            max_term_size: 30,
            max_type_depth: 2,
            max_index: 25,
            cases_per_property: 200,
        }
    }
}

impl GenConfig {
    fn for_case(&self, property: &str, case: u64) -> GenConfig {
        GenConfig {
            seed: fnv1a64(format!("{}|{property}|{case}", self.seed).as_bytes()),
            ..self.clone()
        }
    }
}

/// A minimizable refutation: a judgment `term :_index ty` expected to hold
/// (or expected to refute) together with a property-specific explanation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub term: Term,
    pub index: u64,
    pub ty: TypeExpr,
    pub detail: String,
}

impl Counterexample {
    /// Re-run the judgment; true when it still refutes.
    pub fn replays(&self, pcfg: &ProbeConfig) -> bool {
        let verdict = if self.term.is_value() {
            value_member(self.index, &self.term, &self.ty, pcfg)
        } else {
            holds(&self.term, self.index, &self.ty, pcfg)
        };
        matches!(verdict, Ok(v) if v.is_refuted())
    }
}

/// Outcome of one property run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub name: String,
    pub cases: u64,
    pub refutations: u64,
    pub counterexample: Option<Counterexample>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.refutations == 0
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "property: {}\ncases: {}\nrefutations: {}\n",
            self.name, self.cases, self.refutations
        );
        if let Some(cx) = &self.counterexample {
            out.push_str("counterexample:\n");
            out.push_str(&format!("  term: {}\n", cx.term));
            out.push_str(&format!("  k: {}\n", cx.index));
            out.push_str(&format!("  type: {}\n", cx.ty));
            out.push_str(&format!("  detail: {}\n", cx.detail));
        }
        out
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// The property id is not in the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownProperty(pub String);

impl fmt::Display for UnknownProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown property `{}`", self.0)
    }
}

impl std::error::Error for UnknownProperty {}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

struct TermGen {
    rng: ChaCha8Rng,
    fresh: u64,
}

impl TermGen {
    fn new(seed: u64) -> TermGen {
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh: 0,
        }
    }

    fn fresh_name(&mut self) -> String {
        let name = format!("x{}", self.fresh);
        self.fresh += 1;
        name
    }

    fn gen_type(&mut self, depth: u64) -> TypeExpr {
        if depth == 0 {
            return match self.rng.gen_range(0..8u32) {
                0..=5 => TypeExpr::Nat,
                6 => TypeExpr::Top,
                _ => TypeExpr::Bot,
            };
        }
        match self.rng.gen_range(0..10u32) {
            0..=3 => self.gen_type(0),
            4..=7 => {
                let dom = self.gen_type(depth - 1);
                let cod = self.gen_type(depth - 1);
                TypeExpr::arrow(dom, cod)
            }
            _ => self.gen_guarded_mu(depth),
        }
    }

    /// Random guarded functional: the bound variable only ever appears
    /// beneath an arrow.
    fn gen_guarded_mu(&mut self, depth: u64) -> TypeExpr {
        let t = self.gen_type(depth.saturating_sub(1));
        let x = TypeExpr::TVar(0);
        match self.rng.gen_range(0..4u32) {
            0 => TypeExpr::mu(TypeExpr::arrow(t, x)),
            1 => TypeExpr::mu(TypeExpr::arrow(x, t)),
            2 => TypeExpr::mu(TypeExpr::arrow(TypeExpr::arrow(x, t.clone()), t)),
            _ => TypeExpr::mu(TypeExpr::arrow(t.clone(), TypeExpr::arrow(t, x))),
        }
    }

    /// Smallest convenient inhabitant of a type: a constant at `Nat`, an
    /// abstraction at arrows, and the diverging `fix \x:T. x` elsewhere.
    fn minimal(&mut self, target: &TypeExpr, fuel: u64) -> SurfaceTerm {
        if type_eq(target, &TypeExpr::Nat) {
            return SurfaceTerm::Const(self.rng.gen_range(0..4));
        }
        if fuel > 0 {
            if let Ok(m) = match_arrow(target, 8) {
                let x = self.fresh_name();
                let body = self.minimal(&m.cod, fuel - 1);
                return SurfaceTerm::abs(&x, Some(m.dom), body);
            }
        }
        let x = self.fresh_name();
        SurfaceTerm::fix(SurfaceTerm::abs(&x, Some(target.clone()), SurfaceTerm::var(&x)))
    }

    /// Backwards application of the typing rules: the result derives a
    /// type equi-recursively equal to `target`.
    fn gen_typed(&mut self, env: &[(String, TypeExpr)], target: &TypeExpr, size: u64) -> SurfaceTerm {
        if size <= 1 {
            return self.minimal(target, 2);
        }

        let arrow = match_arrow(target, 8).ok();
        let matching_vars: Vec<&(String, TypeExpr)> = env
            .iter()
            .filter(|(_, t)| type_eq(t, target))
            .collect();

        #[derive(Clone, Copy)]
        enum Choice {
            Const,
            Var,
            Abs,
            App,
            Fix,
        }
        let mut choices: Vec<(Choice, u32)> = Vec::new();
        if type_eq(target, &TypeExpr::Nat) {
            choices.push((Choice::Const, 3));
        }
        if !matching_vars.is_empty() {
            choices.push((Choice::Var, 3));
        }
        if arrow.is_some() {
            choices.push((Choice::Abs, 4));
        }
        if size >= 4 {
            choices.push((Choice::App, 2));
        }
        if size >= 3 {
            choices.push((Choice::Fix, 1));
        }
        if choices.is_empty() {
            return self.minimal(target, 2);
        }
        let total: u32 = choices.iter().map(|(_, w)| w).sum();
        let mut pick = self.rng.gen_range(0..total);
        let mut chosen = choices[0].0;
        for (c, w) in &choices {
            if pick < *w {
                chosen = *c;
                break;
            }
            pick -= w;
        }

        match chosen {
            Choice::Const => SurfaceTerm::Const(self.rng.gen_range(0..4)),
            Choice::Var => {
                let i = self.rng.gen_range(0..matching_vars.len());
                SurfaceTerm::var(&matching_vars[i].0)
            }
            Choice::Abs => {
                let m = arrow.expect("checked");
                let x = self.fresh_name();
                let mut inner: Vec<(String, TypeExpr)> = env.to_vec();
                inner.push((x.clone(), m.dom.clone()));
                let body = self.gen_typed(&inner, &m.cod, size - 1);
                SurfaceTerm::abs(&x, Some(m.dom), body)
            }
            Choice::App => {
                let arg_ty = match self.rng.gen_range(0..4u32) {
                    0 => TypeExpr::Nat,
                    1 => self.gen_type(1),
                    _ => {
                        if env.is_empty() {
                            TypeExpr::Nat
                        } else {
                            let i = self.rng.gen_range(0..env.len());
                            env[i].1.clone()
                        }
                    }
                };
                let fun_size = (size - 1) * 2 / 3;
                let f = self.gen_typed(
                    env,
                    &TypeExpr::arrow(arg_ty.clone(), target.clone()),
                    fun_size.max(1),
                );
                let a = self.gen_typed(env, &arg_ty, (size - 1).saturating_sub(fun_size).max(1));
                SurfaceTerm::app(f, a)
            }
            Choice::Fix => {
                let body = self.gen_typed(
                    env,
                    &TypeExpr::arrow(target.clone(), target.clone()),
                    size - 1,
                );
                SurfaceTerm::fix(body)
            }
        }
    }

    /// Arbitrary closed terms, biased toward applications so that stuck
    /// states actually show up.
    fn gen_any(&mut self, scope: &mut Vec<String>, size: u64) -> SurfaceTerm {
        if size <= 1 {
            return if !scope.is_empty() && self.rng.gen_bool(0.4) {
                let i = self.rng.gen_range(0..scope.len());
                SurfaceTerm::var(&scope[i])
            } else {
                SurfaceTerm::Const(self.rng.gen_range(0..3))
            };
        }
        match self.rng.gen_range(0..10u32) {
            0..=4 => {
                let left = 1 + self.rng.gen_range(0..size - 1);
                let f = self.gen_any(scope, left);
                let a = self.gen_any(scope, size - 1 - left);
                SurfaceTerm::app(f, a)
            }
            5..=7 => {
                let x = self.fresh_name();
                scope.push(x.clone());
                let body = self.gen_any(scope, size - 1);
                scope.pop();
                SurfaceTerm::abs(&x, None, body)
            }
            8 => SurfaceTerm::fix(self.gen_any(scope, size - 1)),
            _ => self.gen_any(scope, 1),
        }
    }
}

/// A closed, annotated term with a valid derivation, together with the
/// target type it was generated at; deterministic per seed.
pub fn gen_typed_term(cfg: &GenConfig) -> (SurfaceTerm, TypeExpr) {
    let mut g = TermGen::new(cfg.seed);
    let target = g.gen_type(cfg.max_type_depth);
    let size = 1 + (g.rng.gen::<u64>() % cfg.max_term_size.max(1));
    let term = g.gen_typed(&[], &target, size);
    (term, target)
}

/// A well-typed open term generated under the given environment at the
/// given target type.
pub fn gen_typed_term_in(cfg: &GenConfig, env: &TypeEnv, target: &TypeExpr) -> SurfaceTerm {
    let mut g = TermGen::new(cfg.seed);
    let env_vec: Vec<(String, TypeExpr)> = env.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let size = 1 + (g.rng.gen::<u64>() % cfg.max_term_size.max(1));
    g.gen_typed(&env_vec, target, size)
}

/// An arbitrary closed term with no typing constraint.
pub fn gen_any_term(cfg: &GenConfig) -> SurfaceTerm {
    let mut g = TermGen::new(cfg.seed);
    let size = 1 + (g.rng.gen::<u64>() % cfg.max_term_size.max(1));
    g.gen_any(&mut Vec::new(), size)
}

/// Guarded functionals exercised by the recursive-type properties.
pub fn guarded_catalog() -> Vec<TypeExpr> {
    let p = |s: &str| crate::parser::parse_type(s).expect("catalog type parses");
    vec![
        p("mu X. Nat -> X"),
        p("mu X. (X -> Nat) -> Nat"),
        p("mu X. Nat"),
        p("mu X. Top"),
        p("mu X. Bot"),
        p("mu X. Nat -> Nat"),
        p("mu X. X -> Nat"),
        p("mu X. Nat -> (Nat -> X)"),
        p("mu X. (Nat -> X) -> Nat"),
        p("mu X. Nat -> (X -> X)"),
        p("mu X. Top -> X"),
        p("mu X. (X -> Top) -> (Nat -> X)"),
    ]
}

// ---------------------------------------------------------------------------
// Shrinking
// ---------------------------------------------------------------------------

fn closed_proper_subterms(t: &Term) -> Vec<Term> {
    fn walk(t: &Term, out: &mut Vec<Term>) {
        let children: Vec<&Term> = match t {
            Term::Const(_) | Term::Var(_) => vec![],
            Term::Abs(b) | Term::Fix(b) => vec![b.as_ref()],
            Term::App(f, a) => vec![f.as_ref(), a.as_ref()],
        };
        for c in children {
            if c.is_closed() {
                out.push(c.clone());
            }
            walk(c, out);
        }
    }
    let mut out = Vec::new();
    walk(t, &mut out);
    out.sort_by_key(|t| (t.size(), t.to_string()));
    out.dedup();
    out
}

/// Greedy minimization: replace the term by its smallest still-refuting
/// closed subterm until none applies, then lower the index to the smallest
/// still-refuting one. A counterexample that does not replay is returned
/// unchanged.
pub fn shrink(cx: &Counterexample, pcfg: &ProbeConfig) -> Counterexample {
    let mut current = cx.clone();
    if !current.replays(pcfg) {
        return current;
    }
    loop {
        let mut advanced = false;
        for s in closed_proper_subterms(&current.term) {
            if s.size() >= current.term.size() {
                continue;
            }
            let candidate = Counterexample {
                term: s,
                ..current.clone()
            };
            if candidate.replays(pcfg) {
                current = candidate;
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    for j in 0..current.index {
        let candidate = Counterexample {
            index: j,
            ..current.clone()
        };
        if candidate.replays(pcfg) {
            current.index = j;
            break;
        }
    }
    current
}

// ---------------------------------------------------------------------------
// Property catalog
// ---------------------------------------------------------------------------

/// Catalog of property ids with their default case counts.
pub const PROPERTIES: [(&str, u64); 11] = [
    ("determinism", 10_000),
    ("index0-vacuity", 1_000),
    ("downward-closure", 1_000),
    ("safety-theorem", 500),
    ("application-lemma", 300),
    ("abstraction-theorem", 200),
    ("fix-lemma", 200),
    ("mu-fixpoint", 150),
    ("mu-floor", 150),
    ("floor-defs", 300),
    ("wf-equation", 150),
];

/// Default case count for a property id.
pub fn default_cases(name: &str) -> Option<u64> {
    PROPERTIES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

fn verdict_class(v: &Verdict) -> &'static str {
    match v {
        Verdict::RefutedWith(_) => "refuted",
        Verdict::PassedProbes(_) => "passed",
        Verdict::HoldsExactly => "holds",
    }
}

/// Probe configuration for agreement checks between textually different
/// but extensionally equal types: canonical probes only, so both sides
/// search with identical power.
fn agreement_cfg(pcfg: &ProbeConfig) -> ProbeConfig {
    ProbeConfig {
        probes_per_type: 1,
        ..pcfg.clone()
    }
}

/// Values to probe membership with, harvested from the probe lists of the
/// given types plus a few stock values.
fn value_pool(types: &[&TypeExpr], k: u64, pcfg: &ProbeConfig) -> Vec<Term> {
    let mut pool = vec![
        Term::Const(0),
        Term::Const(1),
        Term::abs(Term::Var(0)),
        Term::abs(Term::omega()),
        Term::abs(Term::Const(0)),
    ];
    for t in types {
        if let Ok(probes) = probes_for(t, k, pcfg) {
            for p in probes {
                if let Ok(run) = trace(&p, 64) {
                    if run.terminal == Terminal::Value {
                        pool.push(run.last().clone());
                    }
                }
            }
        }
    }
    pool.sort_by_key(|t| (t.size(), t.to_string()));
    pool.dedup();
    pool
}

/// Independent irreducibility oracle used by the determinism property;
/// mirrors the side conditions of the three reduction rules without going
/// through `step`.
fn reducible_oracle(t: &Term) -> bool {
    match t {
        Term::Const(_) | Term::Var(_) | Term::Abs(_) => false,
        Term::Fix(_) => true,
        Term::App(f, _) => matches!(f.as_ref(), Term::Abs(_)) || reducible_oracle(f),
    }
}

fn applicable_rule_count(t: &Term) -> usize {
    let mut n = 0;
    if let Term::App(f, _) = t {
        if matches!(f.as_ref(), Term::Abs(_)) {
            n += 1; // root beta
        }
        if reducible_oracle(f) {
            n += 1; // left context
        }
    }
    if matches!(t, Term::Fix(_)) {
        n += 1; // fix unroll
    }
    n
}

fn any_closed_term(cfg: &GenConfig) -> Term {
    resolve_closed(&gen_any_term(cfg)).expect("gen_any_term emits closed terms")
}

fn prop_determinism(cfg: &GenConfig, _pcfg: &ProbeConfig) -> Option<Counterexample> {
    let a = any_closed_term(cfg);
    let fail = |detail: String| {
        Some(Counterexample {
            term: a.clone(),
            index: 0,
            ty: TypeExpr::Nat,
            detail,
        })
    };
    let mut current = a.clone();
    for _ in 0..64 {
        let n = applicable_rule_count(&current);
        if n > 1 {
            return fail(format!("{n} reduction rules apply to {current}"));
        }
        let next = step(&current).expect("closed");
        if (n == 1) != next.is_some() {
            return fail(format!("rule count {n} disagrees with step on {current}"));
        }
        match next {
            Some(t) => current = t,
            None => break,
        }
    }
    let t1 = trace(&a, 64).expect("closed");
    let t2 = trace(&a, 64).expect("closed");
    if t1 != t2 {
        return fail("trace replay differs".to_string());
    }
    None
}

fn gen_query_type(g: &mut TermGen, cfg: &GenConfig) -> TypeExpr {
    let t = g.gen_type(cfg.max_type_depth);
    if g.rng.gen_bool(0.2) {
        let cutoff = g.rng.gen_range(0..6);
        t.floor_wrap(cutoff)
    } else {
        t
    }
}

fn prop_index0_vacuity(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let t = gen_query_type(&mut g, cfg);
    let a = any_closed_term(cfg);
    match holds(&a, 0, &t, pcfg) {
        Ok(Verdict::HoldsExactly) => None,
        other => Some(Counterexample {
            term: a,
            index: 0,
            ty: t,
            detail: format!("holds at index 0 returned {other:?} instead of HoldsExactly"),
        }),
    }
}

fn prop_downward_closure(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let t = gen_query_type(&mut g, cfg);
    let a = if g.rng.gen_bool(0.5) {
        any_closed_term(cfg)
    } else {
        let (s, _) = gen_typed_term(cfg);
        resolve_closed(&s).expect("typed terms are closed")
    };
    let k = g.rng.gen_range(0..=cfg.max_index);
    let at_k = holds(&a, k, &t, pcfg).ok()?;
    if at_k.is_refuted() {
        return None;
    }
    for j in 0..k {
        if holds(&a, j, &t, pcfg).ok()?.is_refuted() {
            return Some(Counterexample {
                term: a,
                index: j,
                ty: t,
                detail: format!("not refuted at k = {k} but refuted at j = {j}"),
            });
        }
    }
    None
}

fn prop_safety_theorem(cfg: &GenConfig, _pcfg: &ProbeConfig) -> Option<Counterexample> {
    let (s, _) = gen_typed_term(cfg);
    let a = resolve_closed(&s).expect("typed terms are closed");
    let (safe, run) = safe_for(&a, 1000).expect("closed");
    if safe {
        return None;
    }
    Some(Counterexample {
        term: a,
        index: run.steps_taken() + 1,
        ty: TypeExpr::Nat,
        detail: format!("well-typed term went wrong after {} steps", run.steps_taken()),
    })
}

fn prop_application_lemma(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let dom = g.gen_type(cfg.max_type_depth);
    let cod = g.gen_type(cfg.max_type_depth);
    let arrow = TypeExpr::arrow(dom.clone(), cod.clone());
    let k = g.rng.gen_range(1..=cfg.max_index);

    let f = resolve_closed(&gen_typed_term_in(
        &cfg.for_case("application-lemma-fun", 0),
        &TypeEnv::new(),
        &arrow,
    ))
    .expect("closed");
    let a = resolve_closed(&gen_typed_term_in(
        &cfg.for_case("application-lemma-arg", 0),
        &TypeEnv::new(),
        &dom,
    ))
    .expect("closed");

    // premise-satisfying pairs only
    if holds(&f, k, &arrow, pcfg).ok()?.is_refuted() {
        return None;
    }
    if holds(&a, k, &dom, pcfg).ok()?.is_refuted() {
        return None;
    }
    let app = Term::app(f, a);
    if holds(&app, k, &cod, pcfg).ok()?.is_refuted() {
        return Some(Counterexample {
            term: app,
            index: k,
            ty: cod,
            detail: "premises hold but the application was refuted".to_string(),
        });
    }
    None
}

fn prop_abstraction_theorem(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let dom = g.gen_type(cfg.max_type_depth);
    let cod = g.gen_type(cfg.max_type_depth);
    let k = g.rng.gen_range(1..=cfg.max_index);

    let mut env = TypeEnv::new();
    env.insert("x".to_string(), dom.clone());
    let body = gen_typed_term_in(&cfg.for_case("abstraction-body", 0), &env, &cod);

    // premise: {x: dom} |= body :_k cod
    let open_body = resolve(&body);
    match crate::membership::models(&env, &open_body, k, &cod, pcfg) {
        Ok(v) if v.is_refuted() => return None,
        Ok(_) => {}
        Err(_) => return None,
    }

    let lam = SurfaceTerm::abs("x", Some(dom.clone()), body);
    let closed = resolve_closed(&lam).expect("closed");
    let arrow = TypeExpr::arrow(dom, cod);
    if holds(&closed, k, &arrow, pcfg).ok()?.is_refuted() {
        return Some(Counterexample {
            term: closed,
            index: k,
            ty: arrow,
            detail: "premise holds but the abstraction was refuted".to_string(),
        });
    }
    None
}

fn prop_fix_lemma(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let tau = g.gen_type(cfg.max_type_depth);
    let endo = TypeExpr::arrow(tau.clone(), tau.clone());
    let k = g.rng.gen_range(1..=cfg.max_index);

    let a = resolve_closed(&gen_typed_term_in(
        &cfg.for_case("fix-lemma-body", 0),
        &TypeEnv::new(),
        &endo,
    ))
    .expect("closed");
    if holds(&a, k, &endo, pcfg).ok()?.is_refuted() {
        return None;
    }
    let fixed = Term::fix(a);
    if holds(&fixed, k, &tau, pcfg).ok()?.is_refuted() {
        return Some(Counterexample {
            term: fixed,
            index: k,
            ty: tau,
            detail: "premise a :_k T -> T holds but fix a :_k T was refuted".to_string(),
        });
    }
    None
}

fn pick_functional(g: &mut TermGen, cfg: &GenConfig) -> TypeExpr {
    let catalog = guarded_catalog();
    if g.rng.gen_bool(0.7) {
        let i = g.rng.gen_range(0..catalog.len());
        catalog[i].clone()
    } else {
        let m = g.gen_guarded_mu(cfg.max_type_depth.max(1));
        debug_assert!(is_guarded(&m));
        m
    }
}

fn prop_mu_fixpoint(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let m = pick_functional(&mut g, cfg);
    let unfolded = mu_unfold_once(&m).expect("catalog holds mu types");
    let k = g.rng.gen_range(0..=10u64);
    let agree = agreement_cfg(pcfg);
    for v in value_pool(&[&m, &unfolded], k, pcfg) {
        let lhs = value_member(k, &v, &m, &agree).ok()?;
        let rhs = value_member(k, &v, &unfolded, &agree).ok()?;
        if verdict_class(&lhs) != verdict_class(&rhs) {
            let (index, ty) = if lhs.is_refuted() {
                (k, m.clone())
            } else {
                (k, unfolded.clone())
            };
            return Some(Counterexample {
                term: v,
                index,
                ty,
                detail: format!(
                    "mu F = F(mu F) disagreement at k = {k}: {} on mu F, {} on F(mu F) (F = {m})",
                    verdict_class(&lhs),
                    verdict_class(&rhs)
                ),
            });
        }
    }
    None
}

fn prop_mu_floor(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let m = pick_functional(&mut g, cfg);
    let unfolded = mu_unfold_once(&m).expect("catalog holds mu types");
    let k = g.rng.gen_range(0..=8u64);
    let lhs_ty = m.clone().floor_wrap(k);
    let rhs_ty = unfolded.floor_wrap(k);
    let agree = agreement_cfg(pcfg);
    for v in value_pool(&[&lhs_ty, &rhs_ty], k + 2, pcfg) {
        for j in 0..=k + 1 {
            let lhs = value_member(j, &v, &lhs_ty, &agree).ok()?;
            let rhs = value_member(j, &v, &rhs_ty, &agree).ok()?;
            if verdict_class(&lhs) != verdict_class(&rhs) {
                return Some(Counterexample {
                    term: v,
                    index: j,
                    ty: if lhs.is_refuted() { lhs_ty } else { rhs_ty },
                    detail: format!(
                        "floor(mu F, {k}) vs floor(F(mu F), {k}) disagree at j = {j}: {} vs {}",
                        verdict_class(&lhs),
                        verdict_class(&rhs)
                    ),
                });
            }
        }
    }
    None
}

fn prop_floor_defs(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let t = g.gen_type(cfg.max_type_depth);
    let cutoff = g.rng.gen_range(0..=6u64);
    let floored = t.clone().floor_wrap(cutoff);
    let nested = t.clone().floor_wrap(2).floor_wrap(5);
    let flat = t.clone().floor_wrap(2);
    for v in value_pool(&[&t], 8, pcfg) {
        for j in 0..8u64 {
            // defining equation of the k-approximation
            let via_floor = value_member(j, &v, &floored, pcfg).ok()?;
            let direct = value_member(j, &v, &t, pcfg).ok()?;
            if j >= cutoff {
                if !via_floor.is_refuted() {
                    return Some(Counterexample {
                        term: v,
                        index: j,
                        ty: floored,
                        detail: format!("index {j} >= cutoff {cutoff} must refute"),
                    });
                }
            } else if verdict_class(&via_floor) != verdict_class(&direct) {
                return Some(Counterexample {
                    term: v,
                    index: j,
                    ty: floored,
                    detail: format!(
                        "below the cutoff, floor({t}, {cutoff}) must agree with {t}: {} vs {}",
                        verdict_class(&via_floor),
                        verdict_class(&direct)
                    ),
                });
            }
            // nested floors collapse to the minimum cutoff
            let a = value_member(j, &v, &nested, pcfg).ok()?;
            let b = value_member(j, &v, &flat, pcfg).ok()?;
            if verdict_class(&a) != verdict_class(&b) {
                return Some(Counterexample {
                    term: v,
                    index: j,
                    ty: nested,
                    detail: "floor(floor(t, 2), 5) must behave as floor(t, 2)".to_string(),
                });
            }
        }
    }
    None
}

fn prop_wf_equation(cfg: &GenConfig, pcfg: &ProbeConfig) -> Option<Counterexample> {
    let mut g = TermGen::new(cfg.seed);
    let m = pick_functional(&mut g, cfg);
    let TypeExpr::Mu(body) = &m else { return None };
    let tau = g.gen_type(cfg.max_type_depth);
    let k = g.rng.gen_range(0..=6u64);
    let lhs_ty = crate::types::apply_functional(body, &tau).floor_wrap(k + 1);
    let rhs_ty =
        crate::types::apply_functional(body, &tau.clone().floor_wrap(k)).floor_wrap(k + 1);
    let agree = agreement_cfg(pcfg);
    for v in value_pool(&[&lhs_ty, &rhs_ty], k + 1, pcfg) {
        for j in 0..=k + 1 {
            let lhs = value_member(j, &v, &lhs_ty, &agree).ok()?;
            let rhs = value_member(j, &v, &rhs_ty, &agree).ok()?;
            if verdict_class(&lhs) != verdict_class(&rhs) {
                return Some(Counterexample {
                    term: v,
                    index: j,
                    ty: if lhs.is_refuted() { lhs_ty } else { rhs_ty },
                    detail: format!(
                        "well-foundedness equation fails for F = {m} at tau = {tau}, k = {k}, j = {j}: {} vs {}",
                        verdict_class(&lhs),
                        verdict_class(&rhs)
                    ),
                });
            }
        }
    }
    None
}

type PropFn = fn(&GenConfig, &ProbeConfig) -> Option<Counterexample>;

fn property_fn(name: &str) -> Option<PropFn> {
    Some(match name {
        "determinism" => prop_determinism,
        "index0-vacuity" => prop_index0_vacuity,
        "downward-closure" => prop_downward_closure,
        "safety-theorem" => prop_safety_theorem,
        "application-lemma" => prop_application_lemma,
        "abstraction-theorem" => prop_abstraction_theorem,
        "fix-lemma" => prop_fix_lemma,
        "mu-fixpoint" => prop_mu_fixpoint,
        "mu-floor" => prop_mu_floor,
        "floor-defs" => prop_floor_defs,
        "wf-equation" => prop_wf_equation,
        _ => return None,
    })
}

/// Run one catalog property for `cfg.cases_per_property` cases, shrinking
/// the first refutation found. Deterministic per seed.
pub fn run_property(
    name: &str,
    cfg: &GenConfig,
    pcfg: &ProbeConfig,
) -> Result<PropertyReport, UnknownProperty> {
    let f = property_fn(name).ok_or_else(|| UnknownProperty(name.to_string()))?;
    let mut refutations = 0;
    let mut first: Option<Counterexample> = None;
    for case in 0..cfg.cases_per_property {
        if let Some(cx) = f(&cfg.for_case(name, case), pcfg) {
            refutations += 1;
            if first.is_none() {
                first = Some(cx);
            }
        }
    }
    let counterexample = first.map(|cx| shrink(&cx, pcfg));
    Ok(PropertyReport {
        name: name.to_string(),
        cases: cfg.cases_per_property,
        refutations,
        counterexample,
    })
}

/// Run the whole catalog in its fixed order. Each property uses its
/// default case count unless `cases_override` is given.
pub fn run_all(
    cfg: &GenConfig,
    pcfg: &ProbeConfig,
    cases_override: Option<u64>,
) -> Vec<PropertyReport> {
    PROPERTIES
        .iter()
        .map(|(name, default)| {
            let cases = cases_override.unwrap_or(*default);
            let cfg = GenConfig {
                cases_per_property: cases,
                ..cfg.clone()
            };
            run_property(name, &cfg, pcfg).expect("catalog names are known")
        })
        .collect()
}
