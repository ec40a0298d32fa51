//! Bounded decision procedures for step-indexed type membership.
//!
//! Membership of a pair `(k, v)` in a type, the judgment `a :_k t` on whole
//! terms, ground substitutions against type environments, and the semantic
//! typing judgment `env |= a :_k t`. Queries over first-order types decide
//! exactly; the arrow type quantifies over all terms, which we render as a
//! falsification search over a finite probe set. A refutation is ground
//! truth and carries a replayable witness; a pass over probes is bounded
//! evidence, never proof.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{trace, Terminal, Trace};
use crate::term::{OpenTerm, Term};
use crate::types::{mu_unroll, TypeEnv, TypeExpr};

/// Finite map from term variables to closed terms. The call-by-name model
/// substitutes arbitrary closed terms, not just values.
pub type GroundSubst = BTreeMap<String, Term>;

/// Render a ground substitution as indented `name = term` lines.
pub fn display_subst(g: &GroundSubst, indent: &str) -> String {
    let mut out = String::new();
    for (name, term) in g {
        out.push_str(indent);
        out.push_str(name);
        out.push_str(" = ");
        out.push_str(&term.to_string());
        out.push('\n');
    }
    out
}

/// Replayable counterexample attached to a refutation.
///
/// `term`, `index`, and `ty` name the innermost failing judgment, which is
/// always decided exactly; `trace` is the run that exhibits it. `probes`
/// records the arrow probes descended through to reach it (outermost
/// first), and `subst` the ground substitution applied at the top when the
/// query came from [`models`] or [`subst_holds`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub term: Term,
    pub index: u64,
    pub ty: TypeExpr,
    pub trace: Trace,
    pub subst: Option<GroundSubst>,
    pub probes: Vec<(u64, Term)>,
    pub reason: String,
}

impl Witness {
    /// Re-run the innermost failing judgment; a sound witness refutes
    /// again.
    pub fn replays(&self, cfg: &ProbeConfig) -> bool {
        let verdict = if self.term.is_value() {
            value_member(self.index, &self.term, &self.ty, cfg)
        } else {
            holds(&self.term, self.index, &self.ty, cfg)
        };
        matches!(verdict, Ok(Verdict::RefutedWith(_)))
    }
}

/// Three-valued membership result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Definitive: a genuine counterexample exists and is attached.
    RefutedWith(Box<Witness>),
    /// Bounded evidence from the given number of probe checks; never proof.
    PassedProbes(u64),
    /// Decided exactly, without quantifying over terms.
    HoldsExactly,
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::RefutedWith(_))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Verdict::HoldsExactly)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::RefutedWith(w) => Some(w),
            _ => None,
        }
    }

    /// Serialize to the structured text form.
    pub fn render(&self) -> String {
        match self {
            Verdict::HoldsExactly => "verdict: holds\n".to_string(),
            Verdict::PassedProbes(n) => format!("verdict: passed\nprobes: {n}\n"),
            Verdict::RefutedWith(w) => {
                let mut out = String::from("verdict: refuted\nwitness:\n");
                out.push_str(&format!("  judgment: {} :_{} {}\n", w.term, w.index, w.ty));
                out.push_str(&format!("  reason: {}\n", w.reason));
                if let Some(g) = &w.subst {
                    out.push_str("  gamma:\n");
                    out.push_str(&display_subst(g, "    "));
                }
                for (j, b) in &w.probes {
                    out.push_str(&format!("  probe[j={j}]: {b}\n"));
                }
                out.push_str("  trace:\n");
                for line in w.trace.to_string().lines() {
                    out.push_str("    ");
                    out.push_str(line);
                    out.push('\n');
                }
                out
            }
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Probe search configuration. Probe generation is fully determined by the
/// seed, the queried type, and the index, independent of query order.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Target probe count per (type, index) pair; canonical inhabitants
    /// always included, generated terms fill up to this many.
    pub probes_per_type: u64,
    /// Size bound on generated probe terms.
    pub max_probe_size: u64,
    pub seed: u64,
    /// Caller-supplied probes, included whenever the queried type equals
    /// the paired type and the probe survives the membership filter.
    pub extra_probes: Vec<(TypeExpr, Term)>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            probes_per_type: 5,
            max_probe_size: 8,
            seed: 42,
            extra_probes: Vec::new(),
        }
    }
}

impl ProbeConfig {
    pub fn with_seed(seed: u64) -> ProbeConfig {
        ProbeConfig {
            seed,
            ..ProbeConfig::default()
        }
    }
}

/// Errors raised by membership queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryError {
    /// `value_member` demands a value.
    NonValue(String),
    /// The queried type has an unbound type variable.
    UnboundTypeVar,
    /// The judged term must be closed.
    OpenTerm,
    /// `subst_holds` demands equal domains.
    DomainMismatch(String),
    /// `models` found a free variable outside the environment.
    FreeVarNotInEnv(String),
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::NonValue(t) => write!(f, "`{t}` is not a value"),
            QueryError::UnboundTypeVar => write!(f, "type has an unbound type variable"),
            QueryError::OpenTerm => write!(f, "term has unbound variables"),
            QueryError::DomainMismatch(d) => write!(f, "domain mismatch: {d}"),
            QueryError::FreeVarNotInEnv(x) => {
                write!(f, "free variable `{x}` is not bound in the environment")
            }
        }
    }
}

impl std::error::Error for QueryError {}

// ---------------------------------------------------------------------------
// Query engine
// ---------------------------------------------------------------------------

/// Probe-generation recursion bound; at the limit a type gets only its
/// flat canonical inhabitants.
const PROBE_DEPTH_LIMIT: usize = 3;

/// Separate budget for seeing through `mu` binders while building
/// canonical probes. Unfolding must not consume arrow depth: a `mu` type
/// and its unrolling have to produce the same canonical inhabitants, or
/// extensionally equal types would get probe sets of different power.
const MU_UNFOLD_LIMIT: usize = 8;

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn is_first_order(t: &TypeExpr) -> bool {
    match t {
        TypeExpr::Bot | TypeExpr::Top | TypeExpr::Nat => true,
        TypeExpr::Arrow(..) | TypeExpr::Mu(_) | TypeExpr::TVar(_) => false,
        TypeExpr::Floor(inner, _) => is_first_order(inner),
    }
}

struct QueryCtx<'a> {
    cfg: &'a ProbeConfig,
    member_memo: HashMap<(u64, Term, TypeExpr), Verdict>,
    holds_memo: HashMap<(u64, Term, TypeExpr), Verdict>,
    probe_memo: HashMap<(TypeExpr, u64, usize), Rc<Vec<Term>>>,
}

impl<'a> QueryCtx<'a> {
    fn new(cfg: &'a ProbeConfig) -> QueryCtx<'a> {
        QueryCtx {
            cfg,
            member_memo: HashMap::new(),
            holds_memo: HashMap::new(),
            probe_memo: HashMap::new(),
        }
    }

    /// Canonical inhabitants by type structure. Each is a genuine member
    /// of its type at every index, so admitting them as arrow premises
    /// cannot manufacture spurious refutations.
    fn canonical_probes(&mut self, t: &TypeExpr, depth: usize) -> Vec<Term> {
        self.canonical_rec(t, depth, MU_UNFOLD_LIMIT)
    }

    fn canonical_rec(&mut self, t: &TypeExpr, depth: usize, mu_left: usize) -> Vec<Term> {
        let mut out = vec![Term::omega()];
        if depth >= PROBE_DEPTH_LIMIT {
            if matches!(t, TypeExpr::Nat | TypeExpr::Top) {
                out.push(Term::Const(0));
            }
            return out;
        }
        match t {
            TypeExpr::Bot => {}
            TypeExpr::Top => {
                out.push(Term::Const(0));
                out.push(Term::Const(1));
                out.push(Term::abs(Term::Var(0)));
            }
            TypeExpr::Nat => {
                out.push(Term::Const(0));
                out.push(Term::Const(1));
                out.push(Term::Const(2));
            }
            TypeExpr::Arrow(dom, cod) => {
                // diverging-result and constant-result abstractions
                out.push(Term::abs(Term::omega()));
                for p in self.canonical_rec(cod, depth + 1, MU_UNFOLD_LIMIT) {
                    // p is closed, so wrapping needs no shift
                    out.push(Term::abs(p));
                }
                if dom == cod {
                    out.push(Term::abs(Term::Var(0)));
                }
            }
            TypeExpr::Mu(_) => {
                if mu_left > 0 {
                    if let Some(unfolded) = crate::types::mu_unfold_once(t) {
                        out.extend(self.canonical_rec(&unfolded, depth, mu_left - 1));
                    }
                }
            }
            TypeExpr::TVar(_) => {}
            TypeExpr::Floor(inner, _) => {
                out.extend(self.canonical_rec(inner, depth, mu_left));
            }
        }
        out
    }

    /// Deterministic probe list for membership checks of type `t` at
    /// index `j`: canonical inhabitants, matching extra probes, and
    /// seed-generated terms, all filtered by a membership check at
    /// `(t, j)` and sorted by size then text.
    fn probes(&mut self, t: &TypeExpr, j: u64, depth: usize) -> Result<Rc<Vec<Term>>, QueryError> {
        let key = (t.clone(), j, depth.min(PROBE_DEPTH_LIMIT));
        if let Some(hit) = self.probe_memo.get(&key) {
            return Ok(hit.clone());
        }

        let first_order = is_first_order(t);
        let admit = |this: &mut Self, p: &Term, generated: bool| -> Result<bool, QueryError> {
            Ok(match this.holds_at(p, j, t, depth + 1)? {
                Verdict::RefutedWith(_) => false,
                Verdict::HoldsExactly => true,
                // A probe admitted on probe evidence alone could itself be
                // a non-member and poison downstream refutations; only
                // canonical and caller-supplied probes may ride on it.
                Verdict::PassedProbes(_) => !generated || first_order,
            })
        };

        let mut kept: Vec<Term> = Vec::new();
        for p in self.canonical_probes(t, depth) {
            if admit(self, &p, false)? {
                kept.push(p);
            }
        }
        for (ty, p) in &self.cfg.extra_probes.clone() {
            if ty == t && p.is_closed() && admit(self, p, false)? {
                kept.push(p.clone());
            }
        }

        if depth < PROBE_DEPTH_LIMIT {
            let want = self.cfg.probes_per_type.saturating_sub(kept.len() as u64);
            if want > 0 {
                let h = fnv1a64(format!("{}|{}|{}", self.cfg.seed, t, j).as_bytes());
                let mut rng = ChaCha8Rng::seed_from_u64(h);
                let mut admitted = 0;
                for _ in 0..want * 8 {
                    if admitted >= want {
                        break;
                    }
                    let size = 1 + (rng.gen::<u64>() % self.cfg.max_probe_size.max(1)) as usize;
                    let p = gen_closed_term(&mut rng, size);
                    if admit(self, &p, true)? {
                        kept.push(p);
                        admitted += 1;
                    }
                }
            }
        }

        kept.sort_by_key(|t| (t.size(), t.to_string()));
        kept.dedup();

        let rc = Rc::new(kept);
        self.probe_memo.insert(key, rc.clone());
        Ok(rc)
    }

    fn member_at(
        &mut self,
        k: u64,
        v: &Term,
        t: &TypeExpr,
        depth: usize,
    ) -> Result<Verdict, QueryError> {
        let key = (k, v.clone(), t.clone());
        if let Some(hit) = self.member_memo.get(&key) {
            return Ok(hit.clone());
        }
        let verdict = self.member_uncached(k, v, t, depth)?;
        self.member_memo.insert(key, verdict.clone());
        Ok(verdict)
    }

    fn member_uncached(
        &mut self,
        k: u64,
        v: &Term,
        t: &TypeExpr,
        depth: usize,
    ) -> Result<Verdict, QueryError> {
        let refute = |reason: String| {
            Verdict::RefutedWith(Box::new(Witness {
                term: v.clone(),
                index: k,
                ty: t.clone(),
                trace: Trace {
                    steps: vec![v.clone()],
                    terminal: Terminal::Value,
                },
                subst: None,
                probes: Vec::new(),
                reason,
            }))
        };
        match t {
            TypeExpr::Bot => Ok(refute("Bot contains no pairs".to_string())),
            TypeExpr::Top => Ok(Verdict::HoldsExactly),
            TypeExpr::Nat => match v {
                Term::Const(_) => Ok(Verdict::HoldsExactly),
                _ => Ok(refute("Nat contains only constants".to_string())),
            },
            TypeExpr::TVar(_) => Err(QueryError::UnboundTypeVar),
            TypeExpr::Floor(inner, cutoff) => {
                if k < *cutoff {
                    self.member_at(k, v, inner, depth)
                } else {
                    Ok(refute(format!(
                        "index {k} is not below the approximation cutoff {cutoff}"
                    )))
                }
            }
            TypeExpr::Mu(_) => {
                let unrolled = mu_unroll(t, k + 1);
                self.member_at(k, v, &unrolled, depth)
            }
            TypeExpr::Arrow(dom, cod) => {
                let body = match v {
                    Term::Abs(body) => body.clone(),
                    _ => {
                        return Ok(refute(
                            "arrow types contain only abstractions".to_string(),
                        ))
                    }
                };
                if k <= 1 {
                    // only j = 0 is quantified and index-0 judgments are
                    // vacuous for every argument
                    return Ok(Verdict::HoldsExactly);
                }
                let mut checked = 0u64;
                for j in 1..k {
                    let probes = self.probes(dom, j, depth)?;
                    for b in probes.iter() {
                        let applied = Term::subst_top(&body, b);
                        match self.holds_at(&applied, j, cod, depth)? {
                            Verdict::RefutedWith(mut w) => {
                                w.probes.insert(0, (j, b.clone()));
                                return Ok(Verdict::RefutedWith(w));
                            }
                            Verdict::PassedProbes(n) => checked += 1 + n,
                            Verdict::HoldsExactly => checked += 1,
                        }
                    }
                }
                Ok(Verdict::PassedProbes(checked))
            }
        }
    }

    fn holds_at(
        &mut self,
        a: &Term,
        k: u64,
        t: &TypeExpr,
        depth: usize,
    ) -> Result<Verdict, QueryError> {
        if k == 0 {
            return Ok(Verdict::HoldsExactly);
        }
        let key = (k, a.clone(), t.clone());
        if let Some(hit) = self.holds_memo.get(&key) {
            return Ok(hit.clone());
        }
        let run = trace(a, k - 1).map_err(|_| QueryError::OpenTerm)?;
        let verdict = match run.terminal {
            Terminal::BudgetExhausted => Verdict::HoldsExactly,
            Terminal::Stuck => Verdict::RefutedWith(Box::new(Witness {
                term: a.clone(),
                index: k,
                ty: t.clone(),
                trace: run,
                subst: None,
                probes: Vec::new(),
                reason: "reached an irreducible non-value, which no type contains".to_string(),
            })),
            Terminal::Value => {
                let j = run.steps_taken();
                let v = run.last().clone();
                match self.member_at(k - j, &v, t, depth)? {
                    Verdict::RefutedWith(mut w) => {
                        // report the whole run when the failing judgment is
                        // about the term we started from
                        if w.term == v && w.probes.is_empty() {
                            w.term = a.clone();
                            w.index = k;
                            w.trace = run;
                        }
                        Verdict::RefutedWith(w)
                    }
                    other => other,
                }
            }
        };
        self.holds_memo.insert(key, verdict.clone());
        Ok(verdict)
    }
}

fn gen_closed_term(rng: &mut ChaCha8Rng, size: usize) -> Term {
    fn leaf(rng: &mut ChaCha8Rng, depth: usize) -> Term {
        if depth > 0 && rng.gen_bool(0.5) {
            Term::Var(rng.gen_range(0..depth))
        } else {
            Term::Const(rng.gen_range(0..4))
        }
    }
    fn go(rng: &mut ChaCha8Rng, depth: usize, size: usize) -> Term {
        if size <= 1 {
            return leaf(rng, depth);
        }
        match rng.gen_range(0..10u32) {
            0..=2 => Term::abs(go(rng, depth + 1, size - 1)),
            3..=7 => {
                let left = 1 + rng.gen_range(0..size - 1);
                Term::app(go(rng, depth, left), go(rng, depth, size - 1 - left))
            }
            8 => Term::fix(go(rng, depth, size - 1)),
            _ => leaf(rng, depth),
        }
    }
    go(rng, 0, size)
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Does the pair `(k, v)` belong to `t`? `v` must be a value.
pub fn value_member(
    k: u64,
    v: &Term,
    t: &TypeExpr,
    cfg: &ProbeConfig,
) -> Result<Verdict, QueryError> {
    if !v.is_value() {
        return Err(QueryError::NonValue(v.to_string()));
    }
    if !t.is_closed() {
        return Err(QueryError::UnboundTypeVar);
    }
    QueryCtx::new(cfg).member_at(k, v, t, 0)
}

/// The judgment `a :_k t`: whenever `a` reaches an irreducible term within
/// fewer than `k` steps, that term belongs to `t` at the remaining index.
/// Vacuous (and exact) at `k = 0` and when evaluation outlives the budget.
pub fn holds(a: &Term, k: u64, t: &TypeExpr, cfg: &ProbeConfig) -> Result<Verdict, QueryError> {
    if !a.is_closed() {
        return Err(QueryError::OpenTerm);
    }
    if !t.is_closed() {
        return Err(QueryError::UnboundTypeVar);
    }
    QueryCtx::new(cfg).holds_at(a, k, t, 0)
}

/// Deterministic, seed-dependent probe list for `t` at index `j`.
pub fn probes_for(t: &TypeExpr, j: u64, cfg: &ProbeConfig) -> Result<Vec<Term>, QueryError> {
    if !t.is_closed() {
        return Err(QueryError::UnboundTypeVar);
    }
    let mut ctx = QueryCtx::new(cfg);
    let probes = ctx.probes(t, j, 0)?;
    Ok(probes.as_ref().clone())
}

/// The judgment `g :_k env`: pointwise `g(x) :_k env(x)` over equal
/// domains.
pub fn subst_holds(
    g: &GroundSubst,
    k: u64,
    env: &TypeEnv,
    cfg: &ProbeConfig,
) -> Result<Verdict, QueryError> {
    let g_vars: Vec<&String> = g.keys().collect();
    let env_vars: Vec<&String> = env.keys().collect();
    if g_vars != env_vars {
        return Err(QueryError::DomainMismatch(format!(
            "substitution binds {{{}}} but the environment binds {{{}}}",
            g_vars.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
            env_vars.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
        )));
    }
    let mut ctx = QueryCtx::new(cfg);
    let mut all_exact = true;
    let mut checked = 0u64;
    for (x, term) in g {
        if !term.is_closed() {
            return Err(QueryError::OpenTerm);
        }
        match ctx.holds_at(term, k, &env[x], 0)? {
            Verdict::RefutedWith(mut w) => {
                w.subst = Some(g.clone());
                w.reason = format!("variable `{x}`: {}", w.reason);
                return Ok(Verdict::RefutedWith(w));
            }
            Verdict::PassedProbes(n) => {
                all_exact = false;
                checked += n;
            }
            Verdict::HoldsExactly => checked += 1,
        }
    }
    if all_exact {
        Ok(Verdict::HoldsExactly)
    } else {
        Ok(Verdict::PassedProbes(checked))
    }
}

/// The judgment `env |= a :_k t`: `gamma(a) :_k t` for ground
/// substitutions `gamma` built from probes of each variable's type. With
/// an empty environment this is exactly one closed evaluation; otherwise
/// the substitution space is sampled, so a pass is bounded evidence.
pub fn models(
    env: &TypeEnv,
    a: &OpenTerm,
    k: u64,
    t: &TypeExpr,
    cfg: &ProbeConfig,
) -> Result<Verdict, QueryError> {
    for name in &a.free {
        if !env.contains_key(name) {
            return Err(QueryError::FreeVarNotInEnv(name.clone()));
        }
    }
    if !t.is_closed() {
        return Err(QueryError::UnboundTypeVar);
    }
    if k == 0 {
        // vacuous for every ground substitution, hence exact
        return Ok(Verdict::HoldsExactly);
    }
    let mut ctx = QueryCtx::new(cfg);

    let vars: Vec<&String> = env.keys().collect();
    if vars.is_empty() {
        return ctx.holds_at(&a.term, k, t, 0);
    }

    let mut candidate_lists: Vec<Rc<Vec<Term>>> = Vec::with_capacity(vars.len());
    for x in &vars {
        let probes = ctx.probes(&env[*x], k, 0)?;
        if probes.is_empty() {
            // no admissible gamma was found; vacuously passed with zero checks
            return Ok(Verdict::PassedProbes(0));
        }
        candidate_lists.push(probes);
    }

    let mut odometer = vec![0usize; vars.len()];
    let mut checked = 0u64;
    loop {
        let mut gamma = GroundSubst::new();
        for (i, x) in vars.iter().enumerate() {
            gamma.insert((*x).clone(), candidate_lists[i][odometer[i]].clone());
        }
        let mut closed = a.clone();
        for (name, term) in &gamma {
            closed = closed.substitute_free(name, term);
        }
        debug_assert!(closed.is_closed());
        match ctx.holds_at(&closed.term, k, t, 0)? {
            Verdict::RefutedWith(mut w) => {
                w.subst = Some(gamma);
                return Ok(Verdict::RefutedWith(w));
            }
            Verdict::PassedProbes(n) => checked += 1 + n,
            Verdict::HoldsExactly => checked += 1,
        }
        // advance the odometer
        let mut i = 0;
        loop {
            odometer[i] += 1;
            if odometer[i] < candidate_lists[i].len() {
                break;
            }
            odometer[i] = 0;
            i += 1;
            if i == vars.len() {
                return Ok(Verdict::PassedProbes(checked));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_term, parse_type};
    use crate::term::{resolve, resolve_closed};

    fn closed(text: &str) -> Term {
        resolve_closed(&parse_term(text).unwrap()).unwrap()
    }

    fn ty(text: &str) -> TypeExpr {
        parse_type(text).unwrap()
    }

    fn cfg() -> ProbeConfig {
        ProbeConfig::default()
    }

    #[test]
    fn constants_inhabit_nat() {
        let v = value_member(5, &closed("3"), &TypeExpr::Nat, &cfg()).unwrap();
        assert_eq!(v, Verdict::HoldsExactly);
    }

    #[test]
    fn nothing_inhabits_bot() {
        for k in [0u64, 1, 5] {
            let v = value_member(k, &closed("0"), &TypeExpr::Bot, &cfg()).unwrap();
            assert!(v.is_refuted(), "k = {k}");
        }
    }

    #[test]
    fn arrow_is_vacuous_at_index_one() {
        let v = value_member(1, &closed("\\x. 0 0"), &ty("Nat -> Nat"), &cfg()).unwrap();
        assert_eq!(v, Verdict::HoldsExactly);
    }

    #[test]
    fn arrow_refutes_at_index_two() {
        let v = value_member(2, &closed("\\x. 0 0"), &ty("Nat -> Nat"), &cfg()).unwrap();
        let w = v.witness().expect("refuted");
        assert_eq!(w.probes.len(), 1);
        let (j, probe) = &w.probes[0];
        assert_eq!(*j, 1);
        assert_eq!(probe, &Term::Const(0));
        assert!(w.trace.is_stuck());
        assert!(w.replays(&cfg()));
    }

    #[test]
    fn constant_is_not_an_arrow_member() {
        let v = value_member(3, &closed("4"), &ty("Nat -> Nat"), &cfg()).unwrap();
        assert!(v.is_refuted());
        // also refuted at index 0: the set contains only abstraction pairs
        let v = value_member(0, &closed("4"), &ty("Nat -> Nat"), &cfg()).unwrap();
        assert!(v.is_refuted());
    }

    #[test]
    fn constant_functional_unrolls_to_nat() {
        let v = value_member(3, &closed("2"), &ty("mu X. Nat"), &cfg()).unwrap();
        assert_eq!(v, Verdict::HoldsExactly);
    }

    #[test]
    fn value_member_rejects_non_values() {
        assert!(matches!(
            value_member(3, &closed("0 0"), &TypeExpr::Nat, &cfg()),
            Err(QueryError::NonValue(_))
        ));
    }

    #[test]
    fn holds_is_vacuous_at_index_zero() {
        for text in ["0", "0 0", "(\\x. x) 0"] {
            let v = holds(&closed(text), 0, &TypeExpr::Nat, &cfg()).unwrap();
            assert_eq!(v, Verdict::HoldsExactly, "{text}");
        }
        let v = holds(&Term::omega(), 0, &TypeExpr::Bot, &cfg()).unwrap();
        assert_eq!(v, Verdict::HoldsExactly);
    }

    #[test]
    fn stuck_term_refuted_at_one() {
        let v = holds(&closed("0 0"), 1, &TypeExpr::Nat, &cfg()).unwrap();
        let w = v.witness().expect("refuted");
        assert!(w.trace.is_stuck());
        assert_eq!(w.trace.steps_taken(), 0);
        assert!(w.replays(&cfg()));
    }

    #[test]
    fn omega_inhabits_bot_at_large_index() {
        let v = holds(&Term::omega(), 1000, &TypeExpr::Bot, &cfg()).unwrap();
        assert_eq!(v, Verdict::HoldsExactly);
    }

    #[test]
    fn reduction_to_constant_holds() {
        let v = holds(&closed("(\\x. x) 4"), 10, &TypeExpr::Nat, &cfg()).unwrap();
        assert_eq!(v, Verdict::HoldsExactly);
    }

    #[test]
    fn floor_examples() {
        // floor(Nat, 0) behaves as Bot
        let t = TypeExpr::Nat.floor_wrap(0);
        for k in 0..4u64 {
            assert!(value_member(k, &closed("1"), &t, &cfg()).unwrap().is_refuted());
        }
        // floor(Top, 3) contains exactly indices 0, 1, 2
        let t = TypeExpr::Top.floor_wrap(3);
        for k in 0..6u64 {
            let v = value_member(k, &closed("1"), &t, &cfg()).unwrap();
            assert_eq!(v.is_refuted(), k >= 3, "k = {k}");
        }
        // nested floors take the minimum cutoff
        let nested = TypeExpr::Nat.floor_wrap(2).floor_wrap(5);
        let flat = TypeExpr::Nat.floor_wrap(2);
        for k in 0..8u64 {
            assert_eq!(
                value_member(k, &closed("0"), &nested, &cfg()).unwrap().is_refuted(),
                value_member(k, &closed("0"), &flat, &cfg()).unwrap().is_refuted(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn probe_lists_contain_the_basics() {
        let probes = probes_for(&TypeExpr::Nat, 3, &cfg()).unwrap();
        assert!(probes.contains(&Term::Const(0)));
        assert!(probes.contains(&Term::Const(1)));
        assert!(probes.contains(&Term::omega()));

        let probes = probes_for(&TypeExpr::Bot, 3, &cfg()).unwrap();
        assert!(probes.contains(&Term::omega()));
        for p in &probes {
            let run = trace(p, 2).unwrap();
            assert_ne!(run.terminal, Terminal::Value, "{p} reaches a value in < 3 steps");
        }

        let probes = probes_for(&ty("Nat -> Nat"), 2, &cfg()).unwrap();
        assert!(probes.contains(&Term::abs(Term::Const(0))));
        assert!(probes.contains(&Term::omega()));
    }

    #[test]
    fn probe_lists_are_deterministic() {
        let a = probes_for(&ty("Nat -> Nat"), 4, &cfg()).unwrap();
        let b = probes_for(&ty("Nat -> Nat"), 4, &cfg()).unwrap();
        assert_eq!(a, b);
        let c = probes_for(&ty("Nat -> Nat"), 4, &ProbeConfig::with_seed(7)).unwrap();
        let d = probes_for(&ty("Nat -> Nat"), 4, &ProbeConfig::with_seed(7)).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn extra_probes_are_included() {
        let mut c = cfg();
        let special = closed("(\\x. x) ((\\y. y) 2)");
        c.extra_probes.push((TypeExpr::Nat, special.clone()));
        let probes = probes_for(&TypeExpr::Nat, 5, &c).unwrap();
        assert!(probes.contains(&special));
        // a refuted extra probe is filtered out
        let mut c = cfg();
        c.extra_probes.push((TypeExpr::Nat, closed("0 0")));
        let probes = probes_for(&TypeExpr::Nat, 5, &c).unwrap();
        assert!(!probes.contains(&closed("0 0")));
    }

    #[test]
    fn subst_holds_examples() {
        let mut g = GroundSubst::new();
        g.insert("x".to_string(), closed("0"));
        let mut env = TypeEnv::new();
        env.insert("x".to_string(), TypeExpr::Nat);
        assert_eq!(subst_holds(&g, 7, &env, &cfg()).unwrap(), Verdict::HoldsExactly);

        let mut g_bad = GroundSubst::new();
        g_bad.insert("x".to_string(), closed("0 0"));
        let v = subst_holds(&g_bad, 1, &env, &cfg()).unwrap();
        let w = v.witness().expect("refuted");
        assert!(w.reason.contains("`x`"));

        assert_eq!(
            subst_holds(&GroundSubst::new(), 9, &TypeEnv::new(), &cfg()).unwrap(),
            Verdict::HoldsExactly
        );

        let g_mismatch = GroundSubst::new();
        assert!(matches!(
            subst_holds(&g_mismatch, 3, &env, &cfg()),
            Err(QueryError::DomainMismatch(_))
        ));
    }

    #[test]
    fn models_variable_judgment() {
        let mut env = TypeEnv::new();
        env.insert("x".to_string(), TypeExpr::Nat);
        let open = resolve(&parse_term("x").unwrap());
        let v = models(&env, &open, 10, &TypeExpr::Nat, &cfg()).unwrap();
        assert!(matches!(v, Verdict::PassedProbes(_)), "{v:?}");
    }

    #[test]
    fn models_closed_term_is_exact() {
        let open = resolve(&parse_term("(\\x. x) 0").unwrap());
        let v = models(&TypeEnv::new(), &open, 100, &TypeExpr::Nat, &cfg()).unwrap();
        assert_eq!(v, Verdict::HoldsExactly);
    }

    #[test]
    fn models_refutes_self_application() {
        let mut env = TypeEnv::new();
        env.insert("x".to_string(), TypeExpr::Nat);
        let open = resolve(&parse_term("x x").unwrap());
        let v = models(&env, &open, 2, &TypeExpr::Nat, &cfg()).unwrap();
        let w = v.witness().expect("refuted");
        let gamma = w.subst.as_ref().expect("gamma attached");
        assert_eq!(gamma["x"], Term::Const(0));
        assert!(w.replays(&cfg()));
        let rendered = v.render();
        assert!(rendered.contains("gamma:"), "{rendered}");
        assert!(rendered.contains("x = 0"), "{rendered}");
    }

    #[test]
    fn models_rejects_unbound_free_variables() {
        let open = resolve(&parse_term("x y").unwrap());
        let mut env = TypeEnv::new();
        env.insert("x".to_string(), TypeExpr::Nat);
        assert!(matches!(
            models(&env, &open, 3, &TypeExpr::Nat, &cfg()),
            Err(QueryError::FreeVarNotInEnv(_))
        ));
    }

    #[test]
    fn equivalence_of_holds_and_member_at_positive_index() {
        let values = [closed("0"), closed("\\x. x"), closed("\\x. 0 0"), closed("2")];
        let types = [
            TypeExpr::Nat,
            TypeExpr::Top,
            TypeExpr::Bot,
            ty("Nat -> Nat"),
            ty("mu X. Nat -> X"),
            TypeExpr::Nat.floor_wrap(2),
        ];
        for v in &values {
            for t in &types {
                for k in 1..6u64 {
                    let via_holds = holds(v, k, t, &cfg()).unwrap();
                    let via_member = value_member(k, v, t, &cfg()).unwrap();
                    assert_eq!(
                        via_holds.is_refuted(),
                        via_member.is_refuted(),
                        "v = {v}, t = {t}, k = {k}"
                    );
                    assert_eq!(
                        via_holds.is_exact(),
                        via_member.is_exact(),
                        "v = {v}, t = {t}, k = {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn downward_closure_on_samples() {
        let terms = [
            closed("0"),
            closed("\\x. x"),
            closed("(\\x. x) 3"),
            closed("\\x. 0 0"),
            Term::omega(),
            closed("fix \\f. f"),
        ];
        let types = [
            TypeExpr::Nat,
            TypeExpr::Top,
            TypeExpr::Bot,
            ty("Nat -> Nat"),
            ty("Top -> Nat"),
            ty("mu X. Nat -> X"),
            TypeExpr::Nat.floor_wrap(3),
        ];
        for a in &terms {
            for t in &types {
                for k in 0..8u64 {
                    if !holds(a, k, t, &cfg()).unwrap().is_refuted() {
                        for j in 0..k {
                            assert!(
                                !holds(a, j, t, &cfg()).unwrap().is_refuted(),
                                "a = {a}, t = {t}, k = {k}, j = {j}"
                            );
                        }
                    }
                }
            }
        }
    }

    /// Brute-force check of the well-foundedness equation
    /// floor(F(tau), k+1) = floor(F(floor(tau, k)), k+1) on probe values;
    /// independent of the syntactic guardedness analysis.
    fn floor_equation_holds(m: &TypeExpr, k_max: u64) -> bool {
        let cfg = ProbeConfig {
            probes_per_type: 1,
            ..ProbeConfig::default()
        };
        let TypeExpr::Mu(body) = m else { panic!("functional expected") };
        let taus = [TypeExpr::Nat, TypeExpr::Top, ty("Nat -> Nat")];
        for tau in &taus {
            for k in 0..=k_max {
                let lhs_ty = crate::types::apply_functional(body, tau).clone().floor_wrap(k + 1);
                let rhs_ty = crate::types::apply_functional(body, &tau.clone().floor_wrap(k))
                    .floor_wrap(k + 1);
                let mut values = vec![
                    closed("0"),
                    closed("\\x. x"),
                    Term::abs(Term::omega()),
                    Term::abs(Term::Const(0)),
                    Term::abs(Term::abs(Term::Const(1))),
                ];
                for t in [&lhs_ty, &rhs_ty] {
                    for p in probes_for(t, k + 1, &cfg).unwrap() {
                        if let Ok(run) = trace(&p, 32) {
                            if run.terminal == Terminal::Value {
                                values.push(run.last().clone());
                            }
                        }
                    }
                }
                values.sort_by_key(|t| (t.size(), t.to_string()));
                values.dedup();
                for v in &values {
                    for j in 0..=k + 1 {
                        let lhs = value_member(j, v, &lhs_ty, &cfg).unwrap();
                        let rhs = value_member(j, v, &rhs_ty, &cfg).unwrap();
                        if lhs.is_refuted() != rhs.is_refuted() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn guardedness_cross_checked_against_floor_equation() {
        use crate::types::is_guarded;
        // guarded functionals satisfy the equation at small k
        for text in ["mu X. Nat -> X", "mu X. (X -> Nat) -> Nat", "mu X. Nat"] {
            let m = ty(text);
            assert!(is_guarded(&m), "{text}");
            assert!(floor_equation_holds(&m, 8), "{text} fails the floor equation");
        }
        // the unguarded identity functional fails both
        let m = ty("mu X. X");
        assert!(!is_guarded(&m));
        assert!(
            !floor_equation_holds(&m, 6),
            "the identity functional is not well founded and the brute-force check must see it"
        );
    }

    #[test]
    fn refutation_witnesses_replay() {
        let cfg = ProbeConfig::default();
        let types = [
            TypeExpr::Nat,
            TypeExpr::Bot,
            ty("Nat -> Nat"),
            ty("mu X. Nat -> X"),
            TypeExpr::Nat.floor_wrap(2),
        ];
        let mut refuted = 0;
        for case in 0..200u64 {
            let gcfg = crate::harness::GenConfig {
                seed: 1_000_000_007u64.wrapping_mul(case + 1),
                ..Default::default()
            };
            let a = crate::term::resolve_closed(&crate::harness::gen_any_term(&gcfg)).unwrap();
            let t = &types[(case % types.len() as u64) as usize];
            let k = 1 + case % 8;
            if let Verdict::RefutedWith(w) = holds(&a, k, t, &cfg).unwrap() {
                refuted += 1;
                assert!(w.replays(&cfg), "witness for {a} :_{k} {t} does not replay");
            }
        }
        assert!(refuted > 30, "only {refuted} refutations sampled");
    }

    #[test]
    fn verdict_rendering() {
        let v = holds(&closed("0"), 5, &TypeExpr::Nat, &cfg()).unwrap();
        assert_eq!(v.render(), "verdict: holds\n");
        let v = holds(&closed("\\x. x"), 3, &ty("Nat -> Nat"), &cfg()).unwrap();
        assert!(v.render().starts_with("verdict: passed\nprobes: "));
        let v = holds(&closed("0 0"), 1, &TypeExpr::Nat, &cfg()).unwrap();
        let rendered = v.render();
        assert!(rendered.starts_with("verdict: refuted\nwitness:\n"));
        assert!(rendered.contains("trace:"));
        assert!(rendered.contains("stuck: 0 0"));
    }
}
