//! The obstacle automaton `F` on a free group.
//!
//! Alphabet `{0, 1, ι, β}` (tokens `0`, `1`, `I`, `B`). Binary cells add their
//! binary neighbors mod 2, blocked cells keep their state, everything else
//! is erased to `0`.
//!
//! Two evaluation routes exist. [`rule_f`], [`classify_free`] and
//! [`classify_blocked`] read a [`Configuration`] straight from the
//! definitions, while [`freeblock_ca`] packs the same rule as a function of
//! the values on `B(1,2)` for the generic engine. [`FreeOrbit`] evaluates
//! `F^t(c)_g` lazily: a binary cell stays binary forever and only the
//! binary/non-binary pattern decides who is blocked, so most questions never
//! touch the large cone a generic evolution would materialize.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Alphabet, Configuration, Pattern, Symbol};
use crate::engine::{evolve_capped, CellularAutomaton, LocalRule};
use crate::error::{Error, Result};
use crate::group::{Family, FreeWord, GroupCtx, GroupElement, Letter, DEFAULT_BALL_CAP};

pub const ZERO: Symbol = Symbol(0);
pub const ONE: Symbol = Symbol(1);
pub const IOTA: Symbol = Symbol(2);
pub const BETA: Symbol = Symbol(3);

pub fn free_alphabet() -> Alphabet {
    Alphabet::new(["0", "1", "I", "B"]).expect("valid alphabet")
}

#[inline]
pub fn is_binary(s: Symbol) -> bool {
    s.0 < 2
}

fn rank_of(family: Family) -> Result<u8> {
    match family {
        Family::Free { rank } => Ok(rank),
        other => Err(Error::precondition(format!(
            "the obstacle automaton lives on free groups, not {other}"
        ))),
    }
}

fn word_of(g: &GroupElement) -> Result<&FreeWord> {
    g.as_word()
        .ok_or_else(|| Error::precondition(format!("{g} is not a free-group element")))
}

fn times(g: &FreeWord, l: Letter) -> FreeWord {
    let mut h = g.clone();
    h.push(l);
    h
}

fn at(cfg: &Configuration, w: &FreeWord) -> Symbol {
    cfg.value_at(&GroupElement::Word(w.clone()))
}

/// `g` is free: binary, with at least two binary neighbors.
pub fn classify_free(cfg: &Configuration, g: &GroupElement) -> Result<bool> {
    let rank = rank_of(cfg.family())?;
    let g = word_of(g)?;
    Ok(free_in(cfg, g, rank))
}

fn free_in(cfg: &Configuration, g: &FreeWord, rank: u8) -> bool {
    is_binary(at(cfg, g))
        && (0..2 * rank)
            .filter(|&l| is_binary(at(cfg, &times(g, l))))
            .count()
            >= 2
}

/// `g` is blocked: an `ι` surrounded by `{ι, β}`, or a `β` with exactly one
/// `ι` neighbor whose other neighbors are all free.
pub fn classify_blocked(cfg: &Configuration, g: &GroupElement) -> Result<bool> {
    let rank = rank_of(cfg.family())?;
    let g = word_of(g)?;
    Ok(blocked_in(cfg, g, rank))
}

fn blocked_in(cfg: &Configuration, g: &FreeWord, rank: u8) -> bool {
    let nbs: Vec<FreeWord> = (0..2 * rank).map(|l| times(g, l)).collect();
    match at(cfg, g) {
        IOTA => nbs.iter().all(|h| !is_binary(at(cfg, h))),
        BETA => {
            let iotas = nbs.iter().filter(|h| at(cfg, h) == IOTA).count();
            iotas == 1
                && nbs
                    .iter()
                    .filter(|h| at(cfg, h) != IOTA)
                    .all(|h| free_in(cfg, h, rank))
        }
        _ => false,
    }
}

/// `F(c)_g`, read from the definition.
pub fn rule_f(cfg: &Configuration, g: &GroupElement) -> Result<Symbol> {
    let rank = rank_of(cfg.family())?;
    let g = word_of(g)?;
    let c = at(cfg, g);
    if is_binary(c) {
        let mut s = c.0;
        for l in 0..2 * rank {
            let v = at(cfg, &times(g, l));
            if is_binary(v) {
                s ^= v.0;
            }
        }
        Ok(Symbol(s))
    } else if blocked_in(cfg, g, rank) {
        Ok(c)
    } else {
        Ok(ZERO)
    }
}

/// Slot tables for a rule reading values on `B(1,2)`.
#[derive(Debug)]
struct Slots {
    center: usize,
    /// `nb[l]` is the slot of the letter `l`.
    nb: Vec<usize>,
    /// `nb2[l][m]` is the slot of `l·m` (the center when `m = l⁻¹`).
    nb2: Vec<Vec<usize>>,
}

impl Slots {
    fn new(rank: u8, s: &[GroupElement]) -> Slots {
        let pos: HashMap<FreeWord, usize> = s
            .iter()
            .enumerate()
            .map(|(i, g)| (g.as_word().expect("free ball").clone(), i))
            .collect();
        let id = FreeWord::identity();
        let nb = (0..2 * rank).map(|l| pos[&times(&id, l)]).collect();
        let nb2 = (0..2 * rank)
            .map(|l| {
                let first = times(&id, l);
                (0..2 * rank).map(|m| pos[&times(&first, m)]).collect()
            })
            .collect();
        Slots {
            center: pos[&id],
            nb,
            nb2,
        }
    }

    fn free_nb(&self, v: &[Symbol], l: usize) -> bool {
        is_binary(v[self.nb[l]]) && self.nb2[l].iter().filter(|&&j| is_binary(v[j])).count() >= 2
    }

    fn blocked(&self, v: &[Symbol]) -> bool {
        match v[self.center] {
            IOTA => self.nb.iter().all(|&j| !is_binary(v[j])),
            BETA => {
                let iotas = self.nb.iter().filter(|&&j| v[j] == IOTA).count();
                iotas == 1
                    && (0..self.nb.len())
                        .filter(|&l| v[self.nb[l]] != IOTA)
                        .all(|l| self.free_nb(v, l))
            }
            _ => false,
        }
    }

    fn rule(&self, v: &[Symbol]) -> Symbol {
        let c = v[self.center];
        if is_binary(c) {
            let mut s = c.0;
            for &j in &self.nb {
                if is_binary(v[j]) {
                    s ^= v[j].0;
                }
            }
            Symbol(s)
        } else if self.blocked(v) {
            c
        } else {
            ZERO
        }
    }
}

/// `F` as a radius-2 automaton for the generic engine, `S = B(1,2)` in
/// canonical order.
pub fn freeblock_ca(rank: u8) -> CellularAutomaton {
    let s = GroupCtx::free(rank).ball(2).expect("radius-2 ball is small");
    let slots = Arc::new(Slots::new(rank, &s));
    CellularAutomaton::new(
        "freeblock",
        Family::Free { rank },
        free_alphabet(),
        s,
        LocalRule::Function(Arc::new(move |v| slots.rule(v))),
    )
    .expect("valid builtin")
}

/// `D(c) ∩ region`.
pub fn nonzero_set(cfg: &Configuration, region: &[GroupElement]) -> Vec<GroupElement> {
    region
        .iter()
        .filter(|g| !is_binary(cfg.value_at(g)))
        .cloned()
        .collect()
}

/// `ι` on `‖g‖ ≤ n−2`, `β` on `‖g‖ = n−1`, `0` elsewhere.
pub fn obstacle_config(rank: u8, n: u64) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::precondition("obstacles need n >= 2"));
    }
    let ctx = GroupCtx::free(rank);
    let mut base = Pattern::new();
    for g in ctx.ball(n - 1)? {
        let s = if ctx.norm(&g)? + 2 <= n { IOTA } else { BETA };
        base.insert(g, s);
    }
    Ok(Configuration::with_base(Family::Free { rank }, base, ZERO))
}

/// Cellwise sum mod 2 on `region`.
pub fn xor_overlay(x1: &Configuration, x2: &Configuration, region: &[GroupElement]) -> Result<Pattern> {
    let mut out = Pattern::new();
    for g in region {
        let (a, b) = (x1.value_at(g), x2.value_at(g));
        if !is_binary(a) || !is_binary(b) {
            return Err(Error::precondition(format!("non-binary cell at {g}")));
        }
        out.insert(g.clone(), Symbol(a.0 ^ b.0));
    }
    Ok(out)
}

/// Lazy, memoized orbit `t ↦ F^t(c)` of one configuration.
pub struct FreeOrbit<'a> {
    cfg: &'a Configuration,
    rank: u8,
    s: Vec<FreeWord>,
    slots: Slots,
    /// `ZERO` stands for "some binary symbol".
    kinds: HashMap<(FreeWord, u32), Symbol>,
    values: HashMap<(FreeWord, u32), Symbol>,
}

impl<'a> FreeOrbit<'a> {
    pub fn new(cfg: &'a Configuration) -> Result<FreeOrbit<'a>> {
        let rank = rank_of(cfg.family())?;
        let ball = GroupCtx::free(rank).ball(2)?;
        let slots = Slots::new(rank, &ball);
        Ok(FreeOrbit {
            cfg,
            rank,
            s: ball.iter().map(|g| g.as_word().expect("free").clone()).collect(),
            slots,
            kinds: HashMap::new(),
            values: HashMap::new(),
        })
    }

    pub fn memo_len(&self) -> usize {
        self.kinds.len() + self.values.len()
    }

    fn class(s: Symbol) -> Symbol {
        if is_binary(s) {
            ZERO
        } else {
            s
        }
    }

    /// `ZERO` when `F^t(c)_g` is binary, else the (non-binary) symbol.
    pub fn kind(&mut self, g: &FreeWord, t: u32) -> Symbol {
        if t == 0 {
            return Self::class(at(self.cfg, g));
        }
        if let Some(&k) = self.kinds.get(&(g.clone(), t)) {
            return k;
        }
        let prev = self.kind(g, t - 1);
        let k = if is_binary(prev) || !self.blocked(g, t - 1) {
            ZERO
        } else {
            prev
        };
        self.kinds.insert((g.clone(), t), k);
        k
    }

    fn kinds_around(&mut self, g: &FreeWord, t: u32) -> Vec<Symbol> {
        let cells: Vec<FreeWord> = self.s.iter().map(|s| g.mul(s)).collect();
        cells.iter().map(|h| self.kind(h, t)).collect()
    }

    pub fn blocked(&mut self, g: &FreeWord, t: u32) -> bool {
        if is_binary(self.kind(g, t)) {
            return false;
        }
        let v = self.kinds_around(g, t);
        self.slots.blocked(&v)
    }

    pub fn free(&mut self, g: &FreeWord, t: u32) -> bool {
        if !is_binary(self.kind(g, t)) {
            return false;
        }
        (0..2 * self.rank)
            .filter(|&l| is_binary(self.kind(&times(g, l), t)))
            .count()
            >= 2
    }

    /// `F^t(c)_g`.
    pub fn value(&mut self, g: &FreeWord, t: u32) -> Symbol {
        if t == 0 {
            return at(self.cfg, g);
        }
        let k = self.kind(g, t);
        if !is_binary(k) {
            return k;
        }
        if let Some(&v) = self.values.get(&(g.clone(), t)) {
            return v;
        }
        let v = if is_binary(self.kind(g, t - 1)) {
            let mut s = self.value(g, t - 1).0;
            for l in 0..2 * self.rank {
                let h = times(g, l);
                if is_binary(self.kind(&h, t - 1)) {
                    s ^= self.value(&h, t - 1).0;
                }
            }
            Symbol(s)
        } else {
            ZERO
        };
        self.values.insert((g.clone(), t), v);
        v
    }

    pub fn frame(&mut self, window: &[GroupElement], t: u32) -> Result<Vec<Symbol>> {
        window
            .iter()
            .map(|g| Ok(self.value(word_of(g)?, t)))
            .collect()
    }
}

/// Exterior alphabet for the obstacle experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exterior {
    /// Random `{0,1}` outside `B(1,n)`.
    Binary,
    /// Random symbols from the whole alphabet outside `B(1,n+1)`.
    Full,
}

impl std::str::FromStr for Exterior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Exterior::Binary),
            "full" => Ok(Exterior::Full),
            _ => Err(Error::parse(format!("exterior '{s}' is not binary or full"))),
        }
    }
}

impl Exterior {
    fn as_str(&self) -> &'static str {
        match self {
            Exterior::Binary => "binary",
            Exterior::Full => "full",
        }
    }
}

/// First `(t, cell)` where `F^t(c')` and `F^t(obstacle)` differ on
/// `B(1,n−1)`, for `t ≤ steps`. `c'` must agree with the obstacle on `B(1,n)`.
pub fn obstacle_trial(
    rank: u8,
    n: u64,
    steps: u32,
    cprime: &Configuration,
) -> Result<Option<(u32, GroupElement)>> {
    let c = obstacle_config(rank, n)?;
    let ctx = GroupCtx::free(rank);
    for g in ctx.ball(n)? {
        if cprime.value_at(&g) != c.value_at(&g) {
            return Err(Error::precondition(format!(
                "perturbation reaches inside B(1,{n}) at {g}"
            )));
        }
    }
    let inner = ctx.ball(n - 1)?;
    let mut oc = FreeOrbit::new(&c)?;
    let mut op = FreeOrbit::new(cprime)?;
    for t in 0..=steps {
        for g in &inner {
            let w = word_of(g)?;
            if oc.value(w, t) != op.value(w, t) {
                return Ok(Some((t, g.clone())));
            }
        }
    }
    Ok(None)
}

/// `F(c) = c` on `B(1,radius)` for the obstacle `c`, through the generic
/// engine.
pub fn obstacle_fixed_point(rank: u8, n: u64, radius: u64) -> Result<bool> {
    let c = obstacle_config(rank, n)?;
    let window = GroupCtx::free(rank).ball(radius)?;
    let ev = evolve_capped(&freeblock_ca(rank), &c, &window, 1, DEFAULT_BALL_CAP)?;
    Ok(ev.frames[1] == ev.frames[0])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonsensitivitySpec {
    pub rank: u8,
    pub n: u64,
    pub steps: u32,
    pub trials: u64,
    pub seed: u64,
    pub exterior: Exterior,
}

#[derive(Clone, Debug)]
pub struct NonsensitivityReport {
    pub spec: NonsensitivitySpec,
    pub fixed_point: bool,
    pub violations: Vec<(u64, u32, GroupElement)>,
}

impl NonsensitivityReport {
    pub fn passed(&self) -> bool {
        self.fixed_point && self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let s = &self.spec;
        json!({
            "experiment": "obstacle",
            "rank": s.rank,
            "n": s.n,
            "steps": s.steps,
            "trials": s.trials,
            "seed": s.seed,
            "exterior": s.exterior.as_str(),
            "agreement_radius": match s.exterior { Exterior::Binary => s.n, Exterior::Full => s.n + 1 },
            "fixed_point_on_radius": s.n + 2,
            "fixed_point": self.fixed_point,
            // Agreement on B(1,n-1) at every step keeps d(F^t c', F^t c) <= 2^-n.
            "distance_bound_exponent": s.n,
            "violations": self.violations.iter().map(|(i, t, g)| json!({"trial": i, "t": t, "cell": g.to_string()})).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

/// Random exteriors around the obstacle of radius `n` never disturb
/// `B(1,n−1)`.
///
/// Binary exteriors agree with the obstacle on `B(1,n)`. Full-alphabet
/// exteriors must agree on `B(1,n+1)`: with agreement on `B(1,n)` only, two
/// non-binary cells at norm `n+1` under a cell of norm `n` leave that cell
/// unfree, which unblocks the `β` above it.
pub fn experiment_nonsensitivity(spec: &NonsensitivitySpec) -> Result<NonsensitivityReport> {
    let c = obstacle_config(spec.rank, spec.n)?;
    let fam = Family::Free { rank: spec.rank };
    let ctx = GroupCtx::free(spec.rank);
    let (symbols, keep) = match spec.exterior {
        Exterior::Binary => (vec![ZERO, ONE], spec.n),
        Exterior::Full => (vec![ZERO, ONE, IOTA, BETA], spec.n + 1),
    };
    let base = c.materialize(&ctx.ball(keep)?);
    let mut violations = Vec::new();
    for i in 0..spec.trials {
        let cp = Configuration::noise(fam, base.clone(), spec.seed.wrapping_add(i), symbols.clone());
        if let Some((t, g)) = obstacle_trial(spec.rank, spec.n, spec.steps, &cp)? {
            violations.push((i, t, g));
        }
    }
    Ok(NonsensitivityReport {
        spec: spec.clone(),
        fixed_point: obstacle_fixed_point(spec.rank, spec.n, spec.n + 2)?,
        violations,
    })
}

#[derive(Clone, Debug)]
pub struct UniformInteriorReport {
    pub rank: u8,
    pub n: u64,
    pub flipped: GroupElement,
    /// `F^t(c)_1` and `F^t(c^n)_1` for `t = 0..=n`.
    pub plain: Vec<Symbol>,
    pub perturbed: Vec<Symbol>,
    pub dependency_size: usize,
}

impl UniformInteriorReport {
    pub fn passed(&self) -> bool {
        let n = self.n as usize;
        self.plain[n] == IOTA && is_binary(self.perturbed[n])
    }

    pub fn to_json(&self) -> Value {
        let a = free_alphabet();
        let toks = |v: &[Symbol]| v.iter().map(|s| a.token(*s).to_string()).collect::<Vec<_>>();
        json!({
            "experiment": "uniform-interior",
            "rank": self.rank,
            "n": self.n,
            "flipped": self.flipped.to_string(),
            "center_plain": toks(&self.plain),
            "center_perturbed": toks(&self.perturbed),
            "dependency_size": self.dependency_size,
            "passed": self.passed(),
        })
    }
}

/// Uniform `ι` against the same configuration with one `0` at norm `n`
/// (the first element of the sphere in canonical order), watched at `1_G`
/// for `n` steps on the full dependency cone.
pub fn experiment_uniform_interior(rank: u8, n: u64, cap: usize) -> Result<UniformInteriorReport> {
    if n < 2 {
        return Err(Error::precondition(
            "uniform-interior needs n >= 2 so the flip sits outside the radius-2 stencil of 1",
        ));
    }
    let ctx = GroupCtx::free(rank).with_ball_cap(cap);
    let size = Family::Free { rank }.ball_size(2 * n);
    if size > cap as u128 {
        return Err(Error::cap(format!("ball of radius {}", 2 * n), size, cap as u128));
    }
    let flipped = ctx.sphere(n)?.into_iter().next().expect("spheres are nonempty");
    let fam = Family::Free { rank };
    let c = Configuration::uniform(fam, IOTA);
    let cn = c.patched(&Pattern::single(flipped.clone(), ZERO));
    let ca = freeblock_ca(rank);
    let window = [fam.identity()];
    let plain = evolve_capped(&ca, &c, &window, n as usize, cap)?;
    let perturbed = evolve_capped(&ca, &cn, &window, n as usize, cap)?;
    Ok(UniformInteriorReport {
        rank,
        n,
        flipped,
        plain: plain.frames.iter().map(|f| f[0]).collect(),
        perturbed: perturbed.frames.iter().map(|f| f[0]).collect(),
        dependency_size: perturbed.dependency_size,
    })
}

/// Input of the propagation experiment.
#[derive(Clone, Debug)]
pub struct PropagationSpec {
    pub seed_config: Configuration,
    /// A cell with `F^t(c)_g` binary.
    pub g: GroupElement,
    pub t: u32,
    /// Cut radius: `d = c` on `B(1,n)`, `0` outside.
    pub n: u64,
    /// Path length.
    pub i: u64,
    /// Reject paths whose far end stays inside `B(1,n)`.
    pub enforce_cut: bool,
}

#[derive(Clone, Debug)]
pub struct ScheduleStep {
    pub time: u32,
    pub closest: Vec<GroupElement>,
    pub expected: GroupElement,
}

impl ScheduleStep {
    pub fn ok(&self) -> bool {
        self.closest.len() == 1 && self.closest[0] == self.expected
    }
}

#[derive(Clone, Debug)]
pub struct PropagationReport {
    pub t_star: u32,
    pub stable_through: u32,
    pub stable: bool,
    pub path: Vec<GroupElement>,
    pub path_free: bool,
    pub flip: GroupElement,
    pub flip_outside_cut: bool,
    pub schedule: Vec<ScheduleStep>,
    /// `F^{T*+i}(d)_g ≠ F^{T*+i}(d')_g`.
    pub reached: bool,
}

impl PropagationReport {
    pub fn passed(&self) -> bool {
        self.stable && self.path_free && self.reached && self.schedule.iter().all(|s| s.ok())
    }

    pub fn to_json(&self) -> Value {
        let strs = |v: &[GroupElement]| v.iter().map(|g| g.to_string()).collect::<Vec<_>>();
        json!({
            "experiment": "propagation",
            "t_star": self.t_star,
            "stable": self.stable,
            "stable_through": self.stable_through,
            "path": strs(&self.path),
            "path_rule": "lexicographically least outward free neighbor",
            "path_free": self.path_free,
            "flip": self.flip.to_string(),
            "flip_outside_cut": self.flip_outside_cut,
            "schedule": self.schedule.iter().map(|s| json!({
                "time": s.time,
                "closest": strs(&s.closest),
                "expected": s.expected.to_string(),
                "ok": s.ok(),
            })).collect::<Vec<_>>(),
            "reached": self.reached,
            "passed": self.passed(),
        })
    }
}

fn d_set(orbit: &mut FreeOrbit<'_>, cells: &[FreeWord], t: u32) -> BTreeSet<FreeWord> {
    cells
        .iter()
        .filter(|g| !is_binary(orbit.kind(g, t)))
        .cloned()
        .collect()
}

/// Cuts `c` to `0` outside `B(1,n)`, waits for `D` to stabilize at `T*`,
/// walks an outward free path of length `i` from `g`, flips the cell
/// `g_i·x^{T*}` (`x` the last letter of `g_i`) and checks that the closest
/// difference at time `T*+k` is exactly `g_{i−k}`.
pub fn experiment_propagation(spec: &PropagationSpec) -> Result<PropagationReport> {
    let fam = spec.seed_config.family();
    let rank = rank_of(fam)?;
    let ctx = GroupCtx::free(rank);
    let g = word_of(&spec.g)?.clone();
    if spec.i == 0 {
        return Err(Error::precondition("path length i must be at least 1"));
    }
    {
        let mut oc = FreeOrbit::new(&spec.seed_config)?;
        if !is_binary(oc.value(&g, spec.t)) {
            return Err(Error::precondition(format!(
                "no binary cell: F^{}(c) is not binary at {}",
                spec.t, spec.g
            )));
        }
    }
    if spec.n <= g.len() as u64 + 2 * spec.t as u64 {
        return Err(Error::precondition(format!(
            "cut radius n={} must exceed |g| + 2t = {}",
            spec.n,
            g.len() as u64 + 2 * spec.t as u64
        )));
    }
    let d = Configuration::with_base(fam, spec.seed_config.materialize(&ctx.ball(spec.n)?), ZERO);
    let mut od = FreeOrbit::new(&d)?;
    if !is_binary(od.value(&g, spec.t)) {
        return Err(Error::precondition("the cut configuration lost the binary cell"));
    }

    // D(F^t(d)) is decreasing and lives in B(1,n).
    let cut: Vec<FreeWord> = ctx
        .ball(spec.n)?
        .iter()
        .map(|h| h.as_word().expect("free").clone())
        .collect();
    let mut t_star = 0;
    let mut current = d_set(&mut od, &cut, 0);
    loop {
        let next = d_set(&mut od, &cut, t_star + 1);
        if next == current {
            break;
        }
        current = next;
        t_star += 1;
    }
    let horizon = t_star + spec.i as u32;
    let mut stable_through = t_star;
    for t in t_star + 1..=horizon + 1 {
        if d_set(&mut od, &cut, t) != current {
            break;
        }
        stable_through = t;
    }
    let stable = stable_through > horizon;

    let mut path = vec![g.clone()];
    for _ in 0..spec.i {
        let last = path.last().expect("nonempty").clone();
        let mut options: Vec<GroupElement> = (0..2 * rank)
            .map(|l| times(&last, l))
            .filter(|h| h.len() == last.len() + 1)
            .filter(|h| !current.contains(h) && od.free(h, t_star))
            .map(GroupElement::Word)
            .collect();
        fam.sort_canonical(&mut options);
        let Some(next) = options.into_iter().next() else {
            return Err(Error::precondition(format!(
                "no outward free neighbor of {last} at time {t_star}"
            )));
        };
        path.push(next.as_word().expect("free").clone());
    }
    let mut path_free = true;
    for t in t_star..=horizon {
        for p in &path {
            path_free &= od.free(p, t);
        }
    }

    let gi = path.last().expect("nonempty").clone();
    let flip_outside_cut = gi.len() as u64 > spec.n;
    if spec.enforce_cut && !flip_outside_cut {
        return Err(Error::precondition(format!(
            "path end {gi} lies inside B(1,{}); the flip would not be a small perturbation",
            spec.n
        )));
    }
    let x = gi.last().expect("i >= 1");
    let flip = gi.mul(&FreeWord::from_letters(std::iter::repeat_n(x, t_star as usize)));
    let old = at(&d, &flip);
    if !is_binary(old) {
        return Err(Error::precondition(format!("flip cell {flip} is not binary")));
    }
    let d2 = d.patched(&Pattern::single(GroupElement::Word(flip.clone()), Symbol(old.0 ^ 1)));
    let mut od2 = FreeOrbit::new(&d2)?;

    let mut schedule = Vec::new();
    for k in 0..=spec.i as u32 {
        let s = t_star + k;
        let reach = ctx.ball(2 * s as u64)?;
        let mut diffs: Vec<FreeWord> = Vec::new();
        for r in &reach {
            let h = flip.mul(r.as_word().expect("free"));
            if od.value(&h, s) != od2.value(&h, s) {
                diffs.push(h);
            }
        }
        let closest: Vec<GroupElement> = match diffs.iter().map(|h| h.len()).min() {
            Some(m) => {
                let mut v: Vec<GroupElement> = diffs
                    .into_iter()
                    .filter(|h| h.len() == m)
                    .map(GroupElement::Word)
                    .collect();
                fam.sort_canonical(&mut v);
                v
            }
            None => Vec::new(),
        };
        schedule.push(ScheduleStep {
            time: s,
            closest,
            expected: GroupElement::Word(path[spec.i as usize - k as usize].clone()),
        });
    }
    let reached = od.value(&g, horizon) != od2.value(&g, horizon);
    Ok(PropagationReport {
        t_star,
        stable_through,
        stable,
        path: path.into_iter().map(GroupElement::Word).collect(),
        path_free,
        flip: GroupElement::Word(flip),
        flip_outside_cut,
        schedule,
        reached,
    })
}

/// Graphviz rendering of the states on a ball of the Cayley graph.
pub fn ball_state_dot(cfg: &Configuration, alphabet: &Alphabet, radius: u64) -> Result<String> {
    let fam = cfg.family();
    let ctx = GroupCtx::new(fam);
    let ball = ctx.ball(radius)?;
    let inside: BTreeSet<&GroupElement> = ball.iter().collect();
    let name = |g: &GroupElement| {
        let s = g.to_string();
        if s.is_empty() {
            "1".to_string()
        } else {
            s
        }
    };
    let mut out = String::from("graph cayley {\n  node [shape=circle];\n");
    for g in &ball {
        out.push_str(&format!(
            "  \"{}\" [label=\"{}\\n{}\"];\n",
            name(g),
            name(g),
            alphabet.token(cfg.value_at(g))
        ));
    }
    let mut seen = BTreeSet::new();
    for g in &ball {
        for e in fam.canonical_generators() {
            let h = fam.multiply(g, &e)?;
            if !inside.contains(&h) {
                continue;
            }
            let (a, b) = (name(g), name(&h));
            let key = if a < b { (a, b) } else { (b, a) };
            if seen.insert(key.clone()) {
                out.push_str(&format!("  \"{}\" -- \"{}\";\n", key.0, key.1));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Counts from a fuzzing run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FuzzOutcome {
    pub checked: u64,
    pub violations: u64,
}

fn random_symbol(rng: &mut ChaCha8Rng, binary_bias: f64) -> Symbol {
    if rng.gen_bool(binary_bias) {
        Symbol(rng.gen_range(0..2))
    } else {
        Symbol(rng.gen_range(2..4))
    }
}

fn random_pattern(rng: &mut ChaCha8Rng, cells: &[GroupElement], bias: f64) -> Pattern {
    Pattern::from_cells(cells.iter().map(|g| (g.clone(), random_symbol(rng, bias))))
}

/// An obstacle of radius `n` centered at `at`, surrounded by random binary
/// cells on `region`. Every cell of `D` is blocked.
fn obstacle_in_noise(
    rng: &mut ChaCha8Rng,
    rank: u8,
    n: u64,
    center: &GroupElement,
    region: &[GroupElement],
) -> Result<Configuration> {
    let fam = Family::Free { rank };
    let ob = obstacle_config(rank, n)?.base().translate(fam, center)?;
    let noise = random_pattern(rng, region, 1.0);
    Ok(Configuration::with_base(fam, noise.overlay(&ob), ZERO))
}

/// `rule_f(c, g)` must not change when `c` is rewritten outside `g·B(1,2)`.
pub fn fuzz_radius_two(rank: u8, trials: u64, seed: u64) -> Result<FuzzOutcome> {
    let ctx = GroupCtx::free(rank);
    let fam = Family::Free { rank };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = ctx.ball(4)?;
    let centers = ctx.ball(2)?;
    let s = ctx.ball(2)?;
    let ca = freeblock_ca(rank);
    let mut out = FuzzOutcome::default();
    for _ in 0..trials {
        let bias = rng.gen_range(0.2..0.9);
        let c = Configuration::with_base(fam, random_pattern(&mut rng, &region, bias), ZERO);
        let g = &centers[rng.gen_range(0..centers.len())];
        let stencil: Vec<GroupElement> = s.iter().map(|x| fam.multiply(g, x)).collect::<Result<_>>()?;
        let kept = c.materialize(&stencil);
        let other = Configuration::noise(fam, kept, rng.gen(), vec![ZERO, ONE, IOTA, BETA]);
        let before = rule_f(&c, g)?;
        let after = rule_f(&other, g)?;
        out.checked += 1;
        if before != after || ca.apply_local(&c, g)? != before {
            out.violations += 1;
        }
    }
    Ok(out)
}

/// `D(F(c)) ⊆ D(c)`, with equality when all of `D(c)` is blocked. Half of
/// the samples are obstacles in binary noise, where the equality applies.
pub fn fuzz_d_monotone(rank: u8, trials: u64, seed: u64) -> Result<FuzzOutcome> {
    let ctx = GroupCtx::free(rank);
    let fam = Family::Free { rank };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = ctx.ball(3)?;
    let wide = ctx.ball(5)?;
    let centers = ctx.ball(1)?;
    let mut out = FuzzOutcome::default();
    for i in 0..trials {
        let c = if i % 2 == 0 {
            let bias = rng.gen_range(0.2..0.9);
            Configuration::with_base(fam, random_pattern(&mut rng, &region, bias), ZERO)
        } else {
            let n = rng.gen_range(2..=3);
            let center = centers[rng.gen_range(0..centers.len())].clone();
            obstacle_in_noise(&mut rng, rank, n, &center, &wide)?
        };
        // Everything non-binary sits inside B(1,3); so does D(F(c)).
        let d0: BTreeSet<GroupElement> = nonzero_set(&c, &region).into_iter().collect();
        let mut d1 = BTreeSet::new();
        for g in &region {
            if !is_binary(rule_f(&c, g)?) {
                d1.insert(g.clone());
            }
        }
        let mut all_blocked = true;
        for g in &d0 {
            all_blocked &= classify_blocked(&c, g)?;
        }
        out.checked += 1;
        if !d1.is_subset(&d0) || (all_blocked && d1 != d0) {
            out.violations += 1;
        }
    }
    Ok(out)
}

/// A free position stays free, and a binary non-free position clears its
/// non-binary neighbors in one step and becomes free.
pub fn fuzz_free_stays_free(rank: u8, trials: u64, steps: u32, seed: u64) -> Result<FuzzOutcome> {
    let ctx = GroupCtx::free(rank);
    let fam = Family::Free { rank };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = ctx.ball(3)?;
    let watch: Vec<FreeWord> = ctx
        .ball(1)?
        .iter()
        .map(|g| g.as_word().expect("free").clone())
        .collect();
    let mut out = FuzzOutcome::default();
    for _ in 0..trials {
        let bias = rng.gen_range(0.2..0.9);
        let c = Configuration::noise(
            fam,
            random_pattern(&mut rng, &region, bias),
            rng.gen(),
            vec![ZERO, ONE, IOTA, BETA],
        );
        let mut orbit = FreeOrbit::new(&c)?;
        for t in 0..steps {
            for g in &watch {
                out.checked += 1;
                if orbit.free(g, t) && !orbit.free(g, t + 1) {
                    out.violations += 1;
                }
                if is_binary(orbit.kind(g, t)) && !orbit.free(g, t) {
                    let cleared = (0..2 * rank).all(|l| {
                        let h = times(g, l);
                        is_binary(orbit.kind(&h, t)) || is_binary(orbit.kind(&h, t + 1))
                    });
                    if !cleared || !orbit.free(g, t + 1) {
                        out.violations += 1;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// On configurations sharing the same fully blocked `D` and its values,
/// `F(x¹⊕x²) = F(x¹) + F(x²)` off `D`.
pub fn fuzz_abelian(rank: u8, pairs: u64, seed: u64) -> Result<FuzzOutcome> {
    let ctx = GroupCtx::free(rank);
    let fam = Family::Free { rank };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wide = ctx.ball(5)?;
    let watch = ctx.ball(3)?;
    let centers = ctx.ball(1)?;
    let mut out = FuzzOutcome::default();
    for _ in 0..pairs {
        let n = rng.gen_range(2..=3);
        let center = centers[rng.gen_range(0..centers.len())].clone();
        let x1 = obstacle_in_noise(&mut rng, rank, n, &center, &wide)?;
        let x2 = obstacle_in_noise(&mut rng, rank, n, &center, &wide)?;
        let d: BTreeSet<GroupElement> = nonzero_set(&x1, &wide).into_iter().collect();
        let off: Vec<GroupElement> = wide.iter().filter(|g| !d.contains(g)).cloned().collect();
        let sum = xor_overlay(&x1, &x2, &off)?.overlay(&x1.materialize(&d));
        let x3 = Configuration::with_base(fam, sum, ZERO);
        for g in watch.iter().filter(|g| !d.contains(g)) {
            out.checked += 1;
            let lhs = rule_f(&x3, g)?;
            let rhs = Symbol(rule_f(&x1, g)?.0 ^ rule_f(&x2, g)?.0);
            if lhs != rhs {
                out.violations += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::evolve;

    const F2: Family = Family::Free { rank: 2 };

    fn w(s: &str) -> GroupElement {
        F2.parse_element(s).unwrap()
    }

    #[test]
    fn predicates_on_simple_configs() {
        let zeros = Configuration::uniform(F2, ZERO);
        assert!(classify_free(&zeros, &w("ab")).unwrap());
        let iotas = Configuration::uniform(F2, IOTA);
        assert!(!classify_free(&iotas, &w("")).unwrap());
        assert!(classify_blocked(&iotas, &w("ba")).unwrap());
        let lone_beta = Configuration::with_base(F2, Pattern::single(w(""), BETA), ZERO);
        assert!(!classify_blocked(&lone_beta, &w("")).unwrap());
    }

    #[test]
    fn obstacle_structure() {
        let ctx = GroupCtx::free(2);
        let c2 = obstacle_config(2, 2).unwrap();
        assert_eq!(c2.value_at(&w("")), IOTA);
        assert_eq!(c2.value_at(&w("b")), BETA);
        assert_eq!(c2.value_at(&w("ab")), ZERO);
        let c3 = obstacle_config(2, 3).unwrap();
        assert_eq!(c3.value_at(&w("aB")), BETA);
        for g in ctx.ball(2).unwrap() {
            assert!(classify_blocked(&c3, &g).unwrap(), "{g}");
        }
        for g in ctx.sphere(3).unwrap() {
            assert!(classify_free(&c3, &g).unwrap(), "{g}");
        }
        let mut d = nonzero_set(&c3, &ctx.ball(4).unwrap());
        F2.sort_canonical(&mut d);
        assert_eq!(d, ctx.ball(2).unwrap());
        assert!(obstacle_config(2, 1).is_err());
    }

    #[test]
    fn rule_examples() {
        let ctx = GroupCtx::free(2);
        let single = Configuration::with_base(F2, Pattern::single(w(""), ONE), ZERO);
        for g in ctx.ball(2).unwrap() {
            let want = if g.as_word().unwrap().len() <= 1 { ONE } else { ZERO };
            assert_eq!(rule_f(&single, &g).unwrap(), want, "{g}");
        }
        let ev = evolve(&freeblock_ca(2), &single, &ctx.ball(1).unwrap(), 1).unwrap();
        assert!(ev.frames[1].iter().all(|s| *s == ONE));
        let iotas = Configuration::uniform(F2, IOTA);
        assert_eq!(rule_f(&iotas, &w("aB")).unwrap(), IOTA);
        assert!(obstacle_fixed_point(2, 3, 5).unwrap());
    }

    #[test]
    fn xor_overlay_laws() {
        let ctx = GroupCtx::free(2);
        let region = ctx.ball(2).unwrap();
        let x = Configuration::noise(F2, Pattern::new(), 5, vec![ZERO, ONE]);
        let z = Configuration::uniform(F2, ZERO);
        assert!(xor_overlay(&x, &x, &region).unwrap().iter().all(|(_, s)| s == ZERO));
        assert_eq!(xor_overlay(&x, &z, &region).unwrap(), x.materialize(&region));
        let g = Configuration::with_base(F2, Pattern::single(w("a"), ONE), ZERO);
        let h = Configuration::with_base(F2, Pattern::single(w("b"), ONE), ZERO);
        let s = xor_overlay(&g, &h, &region).unwrap();
        assert_eq!(s.iter().filter(|(_, v)| *v == ONE).count(), 2);
        assert!(xor_overlay(&Configuration::uniform(F2, IOTA), &z, &region).is_err());
    }

    #[test]
    fn lazy_orbit_matches_engine() {
        let ctx = GroupCtx::free(2);
        let window = ctx.ball(1).unwrap();
        let region = ctx.ball(3).unwrap();
        let ca = freeblock_ca(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..40 {
            let bias = [0.3, 0.6, 0.9][round % 3];
            let cfg = Configuration::noise(F2, random_pattern(&mut rng, &region, bias), round as u64, vec![ZERO, ONE, IOTA, BETA]);
            let ev = evolve(&ca, &cfg, &window, 2).unwrap();
            let mut orbit = FreeOrbit::new(&cfg).unwrap();
            for t in 0..=2 {
                assert_eq!(orbit.frame(&window, t as u32).unwrap(), ev.frames[t], "round {round} t {t}");
            }
        }
    }

    #[test]
    fn obstacle_breaks_with_one_ring_of_agreement() {
        // Agreement on B(1,n) only: put two ι below "a" at norm n+1 = 3.
        let n = 2;
        let c = obstacle_config(2, n).unwrap();
        let cp = c.patched(&Pattern::from_cells([(w("aaa"), IOTA), (w("aab"), IOTA)]));
        let hit = obstacle_trial(2, n, 3, &cp).unwrap();
        assert_eq!(hit, Some((1, w("a"))));
        // One more ring of agreement and binary noise beyond keeps it intact.
        let safe = obstacle_trial(2, n, 6, &Configuration::noise(F2, c.materialize(&GroupCtx::free(2).ball(3).unwrap()), 1, vec![ZERO, ONE, IOTA, BETA])).unwrap();
        assert_eq!(safe, None);
    }

    #[test]
    fn trial_guard() {
        let c = obstacle_config(2, 3).unwrap().patched(&Pattern::single(w("ab"), ONE));
        assert!(matches!(obstacle_trial(2, 3, 2, &c), Err(Error::Precondition(_))));
    }

    #[test]
    fn uniform_interior_small() {
        let r = experiment_uniform_interior(2, 3, DEFAULT_BALL_CAP).unwrap();
        assert!(r.passed(), "{:?}", r);
        assert!(r.perturbed[..3].iter().all(|s| *s == IOTA));
        assert!(experiment_uniform_interior(2, 1, DEFAULT_BALL_CAP).is_err());
    }

    #[test]
    fn propagation_uniform_zero() {
        let spec = PropagationSpec {
            seed_config: Configuration::uniform(F2, ZERO),
            g: w(""),
            t: 0,
            n: 2,
            i: 2,
            enforce_cut: false,
        };
        let r = experiment_propagation(&spec).unwrap();
        assert_eq!(r.t_star, 0);
        assert!(r.passed(), "{}", r.to_json());
        assert!(!r.flip_outside_cut);
        let strict = PropagationSpec { enforce_cut: true, ..spec };
        assert!(matches!(experiment_propagation(&strict), Err(Error::Precondition(_))));
    }

    #[test]
    fn propagation_around_obstacle() {
        let ctx = GroupCtx::free(2);
        let g = ctx.sphere(3).unwrap()[0].clone();
        let spec = PropagationSpec {
            seed_config: obstacle_config(2, 2).unwrap(),
            g,
            t: 0,
            n: 4,
            i: 2,
            enforce_cut: true,
        };
        let r = experiment_propagation(&spec).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.flip_outside_cut);
    }

    #[test]
    fn local_facts_small() {
        assert_eq!(fuzz_radius_two(2, 40, 1).unwrap().violations, 0);
        assert_eq!(fuzz_d_monotone(2, 40, 2).unwrap().violations, 0);
        assert_eq!(fuzz_free_stays_free(2, 20, 4, 3).unwrap().violations, 0);
        assert_eq!(fuzz_abelian(2, 20, 4).unwrap().violations, 0);
    }

    #[test]
    fn dot_output() {
        let dot = ball_state_dot(&obstacle_config(2, 2).unwrap(), &free_alphabet(), 1).unwrap();
        assert!(dot.starts_with("graph cayley"));
        assert_eq!(dot.matches(" -- ").count(), 4);
    }
}
