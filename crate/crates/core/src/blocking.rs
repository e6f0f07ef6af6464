//! Blocking words, certified up to an explicit horizon.
//!
//! A pattern `u` on `L` is `V`-blocking at horizon `T` when `Φ^t(x)|_V`,
//! `t ≤ T`, is the same for every configuration `x` with `x|_L = u`. Only the
//! cells of the dependency cone `D` of `V` matter, so the check reduces to
//! the finitely many assignments of `D \ L` (the *exterior*).
//!
//! Exhaustive verification first runs a set-valued propagation over the
//! cone: every cell carries the set of symbols it can hold, exterior cells
//! start with the whole alphabet. The sets over-approximate what any
//! exterior can produce, so singleton sets on the window at every step prove
//! the query for all exteriors at once. Otherwise every exterior assignment
//! is enumerated in mixed-radix order (first exterior cell in canonical
//! order is the least significant digit) and compared against assignment 0.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Alphabet, Configuration, Pattern, Symbol};
use crate::engine::{evolve_capped, CellularAutomaton, Cone};
use crate::error::{Error, Result};
use crate::group::{Family, GroupCtx, GroupElement, DEFAULT_BALL_CAP};

pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 1 << 24;
pub const DEFAULT_SAMPLED_TRIALS: u64 = 10_000;

const ENUM_CHUNK: u128 = 4096;
const SET_PRODUCT_CAP: usize = 4096;
const OVER_CAP_PROBES: u64 = 256;

/// `u` on `L`, blocked region `V`, horizon `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockingQuery {
    pub word: Pattern,
    pub region: Vec<GroupElement>,
    pub horizon: usize,
}

impl BlockingQuery {
    pub fn new(word: Pattern, region: Vec<GroupElement>, horizon: usize) -> Self {
        BlockingQuery {
            word,
            region,
            horizon,
        }
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        json!({
            "word": self.word.to_json(alphabet),
            "region": self.region.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "horizon": self.horizon,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerificationMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

impl fmt::Display for VerificationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationMode::Exhaustive => write!(f, "exhaustive"),
            VerificationMode::Sampled { trials, seed } => write!(f, "sampled:{trials}:{seed}"),
        }
    }
}

impl std::str::FromStr for VerificationMode {
    type Err = Error;

    /// `exhaustive` or `sampled:N:SEED`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "exhaustive" {
            return Ok(VerificationMode::Exhaustive);
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["sampled"] => Ok(VerificationMode::Sampled {
                trials: DEFAULT_SAMPLED_TRIALS,
                seed: 0,
            }),
            ["sampled", n, seed] => Ok(VerificationMode::Sampled {
                trials: n.parse().map_err(|e| Error::parse(format!("mode '{s}': {e}")))?,
                seed: seed.parse().map_err(|e| Error::parse(format!("mode '{s}': {e}")))?,
            }),
            _ => Err(Error::parse(format!(
                "mode '{s}' is not exhaustive or sampled:N:SEED"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest `|A|^{|D \ L|}` enumerated in exhaustive mode.
    pub exhaustive_cap: u128,
    /// Try the set-valued proof before enumerating.
    pub set_pruning: bool,
    pub ball_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            set_pruning: true,
            ball_cap: DEFAULT_BALL_CAP,
        }
    }
}

impl VerifyOptions {
    pub fn enumeration_only() -> Self {
        VerifyOptions {
            set_pruning: false,
            ..VerifyOptions::default()
        }
    }
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Enumeration,
    Sampling,
    SetPropagation,
}

impl Method {
    fn as_str(&self) -> &'static str {
        match self {
            Method::Enumeration => "enumeration",
            Method::Sampling => "sampling",
            Method::SetPropagation => "set-propagation",
        }
    }
}

/// Two exterior assignments whose frames differ on `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub reference: Vec<Symbol>,
    pub witness: Vec<Symbol>,
    pub time: usize,
    pub cell: GroupElement,
    pub reference_value: Symbol,
    pub witness_value: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Blocking,
    NotBlocking(Box<Counterexample>),
}

impl Verdict {
    pub fn is_blocking(&self) -> bool {
        matches!(self, Verdict::Blocking)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Blocking => None,
            Verdict::NotBlocking(c) => Some(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockingCertificate {
    pub query: BlockingQuery,
    pub mode: VerificationMode,
    pub method: Method,
    pub verdict: Verdict,
    /// `D \ L` in canonical order; assignments are aligned with it.
    pub exterior: Vec<GroupElement>,
    /// Exterior assignments covered by the verdict.
    pub enumerated: u128,
}

impl BlockingCertificate {
    pub fn is_blocking(&self) -> bool {
        self.verdict.is_blocking()
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let tokens = |v: &[Symbol]| v.iter().map(|s| alphabet.token(*s).to_string()).collect::<Vec<_>>();
        let verdict = match &self.verdict {
            Verdict::Blocking => json!({"kind": "blocking"}),
            Verdict::NotBlocking(c) => json!({
                "kind": "not_blocking",
                "time": c.time,
                "cell": c.cell.to_string(),
                "reference_value": alphabet.token(c.reference_value),
                "witness_value": alphabet.token(c.witness_value),
                "reference_exterior": tokens(&c.reference),
                "witness_exterior": tokens(&c.witness),
            }),
        };
        json!({
            "query": self.query.to_json(alphabet),
            "mode": self.mode.to_string(),
            "method": self.method.as_str(),
            "exterior": self.exterior.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "enumerated": self.enumerated.to_string(),
            "verdict": verdict,
        })
    }
}

fn check_query(ca: &CellularAutomaton, q: &BlockingQuery) -> Result<()> {
    if q.horizon < 1 {
        return Err(Error::precondition("blocking horizon must be at least 1"));
    }
    let fam = ca.family();
    for g in q.word.support().chain(q.region.iter()) {
        fam.check(g)?;
    }
    if let Some(s) = q.word.iter().map(|(_, s)| s).find(|s| !ca.alphabet().contains(*s)) {
        return Err(Error::precondition(format!("word symbol {s:?} not in the alphabet")));
    }
    Ok(())
}

/// The cone of the query plus the split of its cells into fixed and free.
struct Setup {
    cone: Cone,
    exterior: Vec<GroupElement>,
    /// For each exterior cell, its index in the cone.
    exterior_slots: Vec<usize>,
    /// Cone values with exterior cells set to symbol 0.
    template: Vec<Symbol>,
}

fn setup(ca: &CellularAutomaton, q: &BlockingQuery, ball_cap: usize) -> Result<Setup> {
    let fam = ca.family();
    let cone = Cone::build(fam, &q.region, ca.neighborhood(), q.horizon, ball_cap)?;
    let mut exterior: Vec<GroupElement> = cone
        .elements()
        .iter()
        .filter(|g| !q.word.contains(g))
        .cloned()
        .collect();
    fam.sort_canonical(&mut exterior);
    let pos: std::collections::HashMap<&GroupElement, usize> =
        cone.elements().iter().enumerate().map(|(i, g)| (g, i)).collect();
    let exterior_slots = exterior.iter().map(|g| pos[g]).collect();
    let template = cone
        .elements()
        .iter()
        .map(|g| q.word.get(g).unwrap_or(Symbol(0)))
        .collect();
    Ok(Setup {
        cone,
        exterior,
        exterior_slots,
        template,
    })
}

fn decode(mut idx: u128, k: u128, out: &mut [Symbol]) {
    for slot in out.iter_mut() {
        *slot = Symbol((idx % k) as u8);
        idx /= k;
    }
}

/// `(time, cell index, witness value)` of the first divergence.
type Disagreement = (usize, usize, Symbol);

/// First disagreement between the frames produced by `assignment` and the
/// reference frames: `(t, window index, value)`.
fn first_disagreement(
    ca: &CellularAutomaton,
    s: &Setup,
    assignment: &[Symbol],
    reference: &[Vec<Symbol>],
    buf: &mut Vec<Symbol>,
    scratch: &mut (Vec<Symbol>, Vec<Symbol>),
) -> Option<Disagreement> {
    buf.clear();
    buf.extend_from_slice(&s.template);
    for (slot, v) in s.exterior_slots.iter().zip(assignment) {
        buf[*slot] = *v;
    }
    let mut hit = None;
    s.cone.run_with(ca, buf, scratch, |t, frame| {
        if let Some(i) = frame.iter().zip(&reference[t]).position(|(a, b)| a != b) {
            hit = Some((t, i, frame[i]));
            false
        } else {
            true
        }
    });
    hit
}

/// Set-valued propagation; true when every window cell is a singleton at
/// every step.
fn set_propagation_proves(ca: &CellularAutomaton, s: &Setup) -> bool {
    let k = ca.alphabet().len();
    if k > 64 {
        return false;
    }
    let full: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let cone = &s.cone;
    let mut sets: Vec<u64> = s.template.iter().map(|v| 1u64 << v.0).collect();
    for &slot in &s.exterior_slots {
        sets[slot] = full;
    }
    let w = cone.window_len();
    let singleton = |m: u64| m.count_ones() == 1;
    if !sets[..w].iter().all(|m| singleton(*m)) {
        return false;
    }
    let arity = ca.neighborhood().len();
    let horizon = cone.horizon();
    let fam = ca.family();
    // Neighbor indices are recomputed here through positions to stay
    // independent of the cone's internal layout.
    let pos: std::collections::HashMap<&GroupElement, usize> =
        cone.elements().iter().enumerate().map(|(i, g)| (g, i)).collect();
    let n_rows = cone.layer_len(horizon.saturating_sub(1));
    let mut rows: Vec<usize> = Vec::with_capacity(n_rows * arity);
    for g in &cone.elements()[..n_rows] {
        for nb in ca.neighborhood() {
            rows.push(pos[&fam.multiply(g, nb).expect("same family")]);
        }
    }
    let mut members: Vec<Vec<Symbol>> = vec![Vec::new(); arity];
    let mut vals = vec![Symbol(0); arity];
    for t in 1..=horizon {
        let n = cone.layer_len(horizon - t);
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let row = &rows[i * arity..(i + 1) * arity];
            let mut product = 1usize;
            for (m, &j) in members.iter_mut().zip(row) {
                m.clear();
                let mask = sets[j];
                m.extend((0..k).filter(|b| mask >> b & 1 == 1).map(|b| Symbol(b as u8)));
                product = product.saturating_mul(m.len());
            }
            if product > SET_PRODUCT_CAP {
                next.push(full);
                continue;
            }
            let mut out = 0u64;
            let mut odo = vec![0usize; arity];
            'combos: loop {
                for (v, (m, &o)) in vals.iter_mut().zip(members.iter().zip(&odo)) {
                    *v = m[o];
                }
                out |= 1u64 << ca.eval(&vals).0;
                for d in (0..arity).rev() {
                    odo[d] += 1;
                    if odo[d] < members[d].len() {
                        continue 'combos;
                    }
                    odo[d] = 0;
                }
                break;
            }
            next.push(out);
        }
        sets = next;
        if !sets[..w].iter().all(|m| singleton(*m)) {
            return false;
        }
    }
    true
}

/// Verifies that `q.word` is `q.region`-blocking up to `q.horizon`.
pub fn verify_blocking(
    ca: &CellularAutomaton,
    q: &BlockingQuery,
    mode: VerificationMode,
    opts: &VerifyOptions,
) -> Result<BlockingCertificate> {
    check_query(ca, q)?;
    let s = setup(ca, q, opts.ball_cap)?;
    let k = ca.alphabet().len() as u128;
    let n_ext = s.exterior.len();
    let total = k.checked_pow(n_ext as u32).unwrap_or(u128::MAX);

    if opts.set_pruning && set_propagation_proves(ca, &s) {
        return Ok(BlockingCertificate {
            query: q.clone(),
            mode,
            method: Method::SetPropagation,
            verdict: Verdict::Blocking,
            exterior: s.exterior,
            enumerated: total,
        });
    }

    let reference_assignment = vec![Symbol(0); n_ext];
    let mut buf = Vec::new();
    let mut scratch = (Vec::new(), Vec::new());
    let mut reference: Vec<Vec<Symbol>> = Vec::new();
    {
        buf.extend_from_slice(&s.template);
        s.cone.run_with(ca, &buf, &mut scratch, |_, f| {
            reference.push(f.to_vec());
            true
        });
    }

    let found: Option<(u128, Vec<Symbol>, Disagreement)> = match mode {
        VerificationMode::Exhaustive => {
            if total > opts.exhaustive_cap {
                // Too many exteriors to enumerate. A handful of random ones
                // still refutes most non-blocking words; a refutation is a
                // complete answer, a miss is not.
                let probe = verify_blocking(
                    ca,
                    q,
                    VerificationMode::Sampled {
                        trials: OVER_CAP_PROBES,
                        seed: 0,
                    },
                    &VerifyOptions {
                        set_pruning: false,
                        ..*opts
                    },
                )?;
                if !probe.is_blocking() {
                    return Ok(BlockingCertificate { mode, ..probe });
                }
                return Err(Error::cap(
                    format!(
                        "exhaustive blocking check over {n_ext} exterior cells (try sampled mode)"
                    ),
                    total,
                    opts.exhaustive_cap,
                ));
            }
            let chunks = total.div_ceil(ENUM_CHUNK);
            (0..chunks as u64).into_par_iter().find_map_first(|c| {
                let mut buf = Vec::new();
                let mut scratch = (Vec::new(), Vec::new());
                let mut asg = vec![Symbol(0); n_ext];
                let lo = c as u128 * ENUM_CHUNK;
                let hi = (lo + ENUM_CHUNK).min(total);
                for idx in lo.max(1)..hi {
                    decode(idx, k, &mut asg);
                    if let Some(hit) =
                        first_disagreement(ca, &s, &asg, &reference, &mut buf, &mut scratch)
                    {
                        return Some((idx, asg, hit));
                    }
                }
                None
            })
        }
        VerificationMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Vec<Symbol>> = (0..trials)
                .map(|_| {
                    (0..n_ext)
                        .map(|_| Symbol(rng.gen_range(0..k as u8)))
                        .collect()
                })
                .collect();
            samples
                .into_par_iter()
                .enumerate()
                .find_map_first(|(i, asg)| {
                    let mut buf = Vec::new();
                    let mut scratch = (Vec::new(), Vec::new());
                    first_disagreement(ca, &s, &asg, &reference, &mut buf, &mut scratch)
                        .map(|hit| (i as u128, asg, hit))
                })
        }
    };

    let method = match mode {
        VerificationMode::Exhaustive => Method::Enumeration,
        VerificationMode::Sampled { .. } => Method::Sampling,
    };
    let (verdict, enumerated) = match found {
        None => (
            Verdict::Blocking,
            match mode {
                VerificationMode::Exhaustive => total,
                VerificationMode::Sampled { trials, .. } => trials as u128,
            },
        ),
        Some((idx, witness, (t, i, v))) => (
            Verdict::NotBlocking(Box::new(Counterexample {
                reference: reference_assignment,
                witness,
                time: t,
                cell: s.cone.window()[i].clone(),
                reference_value: reference[t][i],
                witness_value: v,
            })),
            idx + 1,
        ),
    };
    Ok(BlockingCertificate {
        query: q.clone(),
        mode,
        method,
        verdict,
        exterior: s.exterior,
        enumerated,
    })
}

/// Rebuilds the two configurations of a counterexample and re-runs them
/// through the generic engine. True when they really disagree at the
/// recorded time and cell.
pub fn replay_counterexample(
    ca: &CellularAutomaton,
    cert: &BlockingCertificate,
) -> Result<bool> {
    let Some(c) = cert.verdict.counterexample() else {
        return Err(Error::precondition("certificate carries no counterexample"));
    };
    let fam = ca.family();
    let build = |asg: &[Symbol]| {
        let ext = Pattern::from_cells(cert.exterior.iter().cloned().zip(asg.iter().copied()));
        Configuration::with_base(fam, cert.query.word.overlay(&ext), Symbol(0))
    };
    let x = build(&c.reference);
    let y = build(&c.witness);
    let window = std::slice::from_ref(&c.cell);
    let ex = evolve_capped(ca, &x, window, c.time, DEFAULT_BALL_CAP)?;
    let ey = evolve_capped(ca, &y, window, c.time, DEFAULT_BALL_CAP)?;
    Ok(ex.frames[c.time][0] == c.reference_value
        && ey.frames[c.time][0] == c.witness_value
        && c.reference_value != c.witness_value)
}

/// `g.u` on `gL`, blocking `gV`.
pub fn translate_blocking(
    family: Family,
    g: &GroupElement,
    q: &BlockingQuery,
) -> Result<BlockingQuery> {
    Ok(BlockingQuery {
        word: q.word.translate(family, g)?,
        region: q
            .region
            .iter()
            .map(|v| family.multiply(g, v))
            .collect::<Result<_>>()?,
        horizon: q.horizon,
    })
}

/// Extends the word to `word′ ⊇ u` and restricts the region to `V′ ⊆ V`.
pub fn extend_restrict(
    q: &BlockingQuery,
    word: &Pattern,
    region: &[GroupElement],
) -> Result<BlockingQuery> {
    for (g, s) in q.word.iter() {
        match word.get(g) {
            Some(t) if t == s => {}
            Some(_) => {
                return Err(Error::precondition(format!(
                    "extended word changes the value at {g}"
                )))
            }
            None => {
                return Err(Error::precondition(format!(
                    "extended word drops the cell {g}"
                )))
            }
        }
    }
    if let Some(v) = region.iter().find(|v| !q.region.contains(v)) {
        return Err(Error::precondition(format!(
            "restricted region adds the cell {v}"
        )));
    }
    Ok(BlockingQuery {
        word: word.clone(),
        region: region.to_vec(),
        horizon: q.horizon,
    })
}

/// Outcome of a bounded search for a `B(1,k)`-blocking word.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub k: u64,
    pub found: Option<(u64, BlockingCertificate)>,
    /// Every certificate produced, in candidate order.
    pub certificates: Vec<BlockingCertificate>,
}

impl SearchOutcome {
    pub fn query(&self) -> Option<&BlockingQuery> {
        self.found.as_ref().map(|(_, c)| &c.query)
    }

    /// True when every candidate was refuted by a counterexample.
    pub fn all_refuted(&self) -> bool {
        self.found.is_none()
            && self
                .certificates
                .iter()
                .all(|c| c.verdict.counterexample().is_some())
    }
}

/// Enumerates candidate words on `B(1, r)` for `r = k..=max_support_radius`
/// and returns the first one that is `B(1,k)`-blocking at the horizon.
/// Supports smaller than `B(1,k)` are skipped: the region must lie inside
/// the support because `t = 0` is part of the condition.
pub fn search_blocking(
    ctx: &GroupCtx,
    ca: &CellularAutomaton,
    k: u64,
    max_support_radius: u64,
    horizon: usize,
    mode: VerificationMode,
    opts: &VerifyOptions,
) -> Result<SearchOutcome> {
    let region = ctx.ball(k)?;
    let a = ca.alphabet().len() as u128;
    let mut certificates = Vec::new();
    for r in k..=max_support_radius {
        let support = ctx.ball(r)?;
        let count = a.checked_pow(support.len() as u32).unwrap_or(u128::MAX);
        if count > opts.exhaustive_cap {
            return Err(Error::cap(
                format!("candidate words on the ball of radius {r}"),
                count,
                opts.exhaustive_cap,
            ));
        }
        let mut vals = vec![Symbol(0); support.len()];
        for idx in 0..count {
            decode(idx, a, &mut vals);
            let word = Pattern::from_cells(support.iter().cloned().zip(vals.iter().copied()));
            let q = BlockingQuery::new(word, region.clone(), horizon);
            let cert = verify_blocking(ca, &q, mode, opts)?;
            let ok = cert.is_blocking();
            certificates.push(cert);
            if ok {
                let found = certificates.last().cloned().map(|c| (r, c));
                return Ok(SearchOutcome {
                    k,
                    found,
                    certificates,
                });
            }
        }
    }
    Ok(SearchOutcome {
        k,
        found: None,
        certificates,
    })
}

/// Bounded evidence about sensitivity at precision `2^{-k}`.
#[derive(Clone, Debug)]
pub struct SensitivityReport {
    pub k: u64,
    pub outcome: SearchOutcome,
}

impl SensitivityReport {
    pub fn summary(&self) -> String {
        match &self.outcome.found {
            Some((r, _)) => format!("blocking word found at r={r}"),
            None if self.outcome.all_refuted() => {
                "no blocking word up to bounds; all candidates refuted".to_string()
            }
            None => "no blocking word up to bounds".to_string(),
        }
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        json!({
            "k": self.k,
            "epsilon": 2f64.powi(-(self.k as i32)),
            "summary": self.summary(),
            "found": self.outcome.found.as_ref().map(|(r, c)| json!({"radius": r, "certificate": c.to_json(alphabet)})),
            "candidates": self.outcome.certificates.len(),
            "certificates": self.outcome.certificates.iter().map(|c| c.to_json(alphabet)).collect::<Vec<_>>(),
        })
    }
}

pub fn sensitivity_probe(
    ctx: &GroupCtx,
    ca: &CellularAutomaton,
    k: u64,
    max_support_radius: u64,
    horizon: usize,
    mode: VerificationMode,
    opts: &VerifyOptions,
) -> Result<SensitivityReport> {
    let outcome = search_blocking(ctx, ca, k, max_support_radius, horizon, mode, opts)?;
    Ok(SensitivityReport { k, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{and_ca, identity_ca, xor_ca, xor_wall_ca};

    fn int(n: i64) -> GroupElement {
        GroupElement::Int(n)
    }

    fn zeros(range: std::ops::RangeInclusive<i64>) -> Pattern {
        Pattern::from_cells(range.map(|n| (int(n), Symbol(0))))
    }

    #[test]
    fn identity_is_blocking() {
        let ca = identity_ca(Family::Integers);
        let q = BlockingQuery::new(zeros(-1..=1), vec![int(0)], 5);
        for opts in [VerifyOptions::default(), VerifyOptions::enumeration_only()] {
            let c = verify_blocking(&ca, &q, VerificationMode::Exhaustive, &opts).unwrap();
            assert!(c.is_blocking());
        }
    }

    #[test]
    fn and_zero_is_blocking() {
        let q = BlockingQuery::new(zeros(0..=0), vec![int(0)], 10);
        let c = verify_blocking(&and_ca(), &q, VerificationMode::Exhaustive, &VerifyOptions::enumeration_only())
            .unwrap();
        assert!(c.is_blocking());
        assert_eq!(c.enumerated, 1 << 20);
    }

    #[test]
    fn xor_zeros_not_blocking() {
        let q = BlockingQuery::new(zeros(-2..=2), vec![int(0)], 3);
        let c = verify_blocking(&xor_ca(), &q, VerificationMode::Exhaustive, &VerifyOptions::default())
            .unwrap();
        let ce = c.verdict.counterexample().expect("xor is not blocked by zeros");
        // The only exterior cells that reach 0 within 3 steps are ±3.
        let differing: Vec<_> = c
            .exterior
            .iter()
            .zip(ce.reference.iter().zip(&ce.witness))
            .filter(|(_, (a, b))| a != b)
            .map(|(g, _)| g.as_int().unwrap())
            .collect();
        assert!(differing.iter().all(|n| n.abs() == 3), "{differing:?}");
        assert!(replay_counterexample(&xor_ca(), &c).unwrap());
    }

    #[test]
    fn wall_freezes_its_cell() {
        let ca = xor_wall_ca();
        let q = BlockingQuery::new(Pattern::single(int(0), Symbol(2)), vec![int(0)], 8);
        let c = verify_blocking(&ca, &q, VerificationMode::Exhaustive, &VerifyOptions::default())
            .unwrap();
        assert!(c.is_blocking());
    }

    #[test]
    fn cap_suggests_sampling() {
        // Over the cap, a blocking word cannot be settled by enumeration.
        let wall = BlockingQuery::new(Pattern::single(int(0), Symbol(2)), vec![int(0)], 30);
        let err = verify_blocking(&xor_wall_ca(), &wall, VerificationMode::Exhaustive, &VerifyOptions::enumeration_only())
            .unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
        // A non-blocking one is still refuted by the random probes.
        let q = BlockingQuery::new(zeros(0..=0), vec![int(0)], 30);
        let c = verify_blocking(&xor_ca(), &q, VerificationMode::Exhaustive, &VerifyOptions::enumeration_only())
            .unwrap();
        assert_eq!(c.method, Method::Sampling);
        assert!(replay_counterexample(&xor_ca(), &c).unwrap());
        let c = verify_blocking(
            &xor_ca(),
            &q,
            VerificationMode::Sampled { trials: 200, seed: 1 },
            &VerifyOptions::enumeration_only(),
        )
        .unwrap();
        assert!(!c.is_blocking());
        assert!(replay_counterexample(&xor_ca(), &c).unwrap());
    }

    #[test]
    fn translate_examples() {
        let q = BlockingQuery::new(zeros(0..=0), vec![int(0)], 2);
        assert_eq!(translate_blocking(Family::Integers, &int(0), &q).unwrap(), q);
        let t = translate_blocking(Family::Integers, &int(3), &q).unwrap();
        assert_eq!(t.region, vec![int(3)]);
        assert!(t.word.contains(&int(3)));
        let f = Family::Free { rank: 2 };
        let e = |s: &str| f.parse_element(s).unwrap();
        let q = BlockingQuery::new(Pattern::new(), vec![e(""), e("a")], 1);
        let t = translate_blocking(f, &e("b"), &q).unwrap();
        assert_eq!(t.region, vec![e("b"), e("ba")]);
    }

    #[test]
    fn extend_restrict_guards() {
        let q = BlockingQuery::new(zeros(0..=0), vec![int(-1), int(0), int(1)], 3);
        assert_eq!(extend_restrict(&q, &q.word, &q.region).unwrap(), q);
        let wider = zeros(0..=0).overlay(&Pattern::single(int(-1), Symbol(1)));
        assert!(extend_restrict(&q, &wider, &[int(0)]).is_ok());
        let bad = Pattern::single(int(0), Symbol(1));
        assert!(extend_restrict(&q, &bad, &[int(0)]).is_err());
        assert!(extend_restrict(&q, &q.word, &[int(5)]).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exhaustive".parse::<VerificationMode>().unwrap(), VerificationMode::Exhaustive);
        assert_eq!(
            "sampled:50:7".parse::<VerificationMode>().unwrap(),
            VerificationMode::Sampled { trials: 50, seed: 7 }
        );
        assert!("sampled:x:1".parse::<VerificationMode>().is_err());
    }
}
