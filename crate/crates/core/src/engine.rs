//! Cellular automata on any supported group, evaluated exactly on finite
//! windows.
//!
//! `Φ^t(x)` restricted to a window `V` only depends on `x` over the
//! dependency cone `D_T` (`D_0 = V`, `D_{t+1} = D_t ∪ D_t·S`). A [`Cone`]
//! materializes `D_T` once, indexes the neighbor relation, and then runs the
//! local rule on the shrinking layers `D_{T-1}, ..., D_0`. There is no
//! boundary condition anywhere.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Alphabet, Configuration, Pattern, Symbol};
use crate::error::{Error, Result};
use crate::group::{Family, GroupCtx, GroupElement, DEFAULT_BALL_CAP};

pub type RuleFn = Arc<dyn Fn(&[Symbol]) -> Symbol + Send + Sync>;

/// Local map `μ : A^S → A`. Tables are indexed in mixed radix over the
/// neighborhood in declaration order, the first neighbor being the most
/// significant digit.
#[derive(Clone)]
pub enum LocalRule {
    Table(Vec<Symbol>),
    Function(RuleFn),
}

impl fmt::Debug for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalRule::Table(t) => write!(f, "Table({} entries)", t.len()),
            LocalRule::Function(_) => write!(f, "Function"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellularAutomaton {
    name: String,
    family: Family,
    alphabet: Alphabet,
    neighborhood: Vec<GroupElement>,
    rule: LocalRule,
}

impl CellularAutomaton {
    pub fn new(
        name: impl Into<String>,
        family: Family,
        alphabet: Alphabet,
        neighborhood: Vec<GroupElement>,
        rule: LocalRule,
    ) -> Result<Self> {
        if neighborhood.is_empty() {
            return Err(Error::precondition("neighborhood must be non-empty"));
        }
        for (i, s) in neighborhood.iter().enumerate() {
            family.check(s)?;
            if neighborhood[..i].contains(s) {
                return Err(Error::precondition(format!("neighbor {s} listed twice")));
            }
        }
        if let LocalRule::Table(t) = &rule {
            let want = (alphabet.len() as u128).checked_pow(neighborhood.len() as u32);
            if want != Some(t.len() as u128) {
                return Err(Error::precondition(format!(
                    "rule table has {} entries, expected |A|^|S| = {}^{}",
                    t.len(),
                    alphabet.len(),
                    neighborhood.len()
                )));
            }
            if let Some(bad) = t.iter().find(|s| !alphabet.contains(**s)) {
                return Err(Error::precondition(format!("rule output {bad:?} not in alphabet")));
            }
        }
        Ok(CellularAutomaton {
            name: name.into(),
            family,
            alphabet,
            neighborhood,
            rule,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn neighborhood(&self) -> &[GroupElement] {
        &self.neighborhood
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    /// `μ` on values listed in neighborhood order.
    #[inline]
    pub fn eval(&self, values: &[Symbol]) -> Symbol {
        match &self.rule {
            LocalRule::Table(t) => {
                let k = self.alphabet.len();
                let idx = values.iter().fold(0usize, |acc, v| acc * k + v.index());
                t[idx]
            }
            LocalRule::Function(f) => f(values),
        }
    }

    /// `Φ(x)(g) = μ(s ↦ x(g·s))`.
    pub fn apply_local(&self, cfg: &Configuration, g: &GroupElement) -> Result<Symbol> {
        let mut vals = Vec::with_capacity(self.neighborhood.len());
        for s in &self.neighborhood {
            vals.push(cfg.value_at(&self.family.multiply(g, s)?));
        }
        Ok(self.eval(&vals))
    }

    /// Tabulates the rule (for export). Fails above `max_entries`.
    pub fn to_table(&self, max_entries: usize) -> Result<Vec<Symbol>> {
        if let LocalRule::Table(t) = &self.rule {
            return Ok(t.clone());
        }
        let k = self.alphabet.len();
        let n = self.neighborhood.len();
        let total = (k as u128).pow(n as u32);
        if total > max_entries as u128 {
            return Err(Error::cap("rule table", total, max_entries as u128));
        }
        let mut vals = vec![Symbol(0); n];
        let mut out = Vec::with_capacity(total as usize);
        for idx in 0..total as usize {
            let mut r = idx;
            for slot in vals.iter_mut().rev() {
                *slot = Symbol((r % k) as u8);
                r /= k;
            }
            out.push(self.eval(&vals));
        }
        Ok(out)
    }

    /// Same alphabet and rule over a different neighborhood; used by lifts.
    pub(crate) fn with_neighborhood(
        &self,
        name: impl Into<String>,
        family: Family,
        neighborhood: Vec<GroupElement>,
    ) -> Result<Self> {
        CellularAutomaton::new(name, family, self.alphabet.clone(), neighborhood, self.rule.clone())
    }
}

fn int_nbhd(v: &[i64]) -> Vec<GroupElement> {
    v.iter().map(|&n| GroupElement::Int(n)).collect()
}

/// `S = {1_G}`, `μ = id`, binary alphabet.
pub fn identity_ca(family: Family) -> CellularAutomaton {
    CellularAutomaton::new(
        "identity",
        family,
        Alphabet::numeric(2),
        vec![family.identity()],
        LocalRule::Function(Arc::new(|v| v[0])),
    )
    .expect("valid builtin")
}

/// XOR of the two neighbors on `Z`, `S = {-1, +1}`.
pub fn xor_ca() -> CellularAutomaton {
    CellularAutomaton::new(
        "xor",
        Family::Integers,
        Alphabet::numeric(2),
        int_nbhd(&[-1, 1]),
        LocalRule::Function(Arc::new(|v| Symbol(v[0].0 ^ v[1].0))),
    )
    .expect("valid builtin")
}

/// Conjunction over `S = {-1, 0, 1}` on `Z`; `0` is absorbing.
pub fn and_ca() -> CellularAutomaton {
    CellularAutomaton::new(
        "and",
        Family::Integers,
        Alphabet::numeric(2),
        int_nbhd(&[-1, 0, 1]),
        LocalRule::Function(Arc::new(|v| Symbol(v[0].0 & v[1].0 & v[2].0))),
    )
    .expect("valid builtin")
}

/// Alphabet `{0, 1, W}` on `Z`, `S = {-1, 0, 1}`: a wall `W` never changes;
/// any other cell becomes the XOR of its non-wall neighbors at `±1`.
pub fn xor_wall_ca() -> CellularAutomaton {
    const W: u8 = 2;
    CellularAutomaton::new(
        "xor-wall",
        Family::Integers,
        Alphabet::new(["0", "1", "W"]).expect("valid alphabet"),
        int_nbhd(&[-1, 0, 1]),
        LocalRule::Function(Arc::new(|v| {
            if v[1].0 == W {
                return Symbol(W);
            }
            let bit = |s: Symbol| if s.0 == W { 0 } else { s.0 };
            Symbol(bit(v[0]) ^ bit(v[2]))
        })),
    )
    .expect("valid builtin")
}

pub const BUILTINS: &[&str] = &["identity", "xor", "and", "xor-wall", "freeblock"];

/// Looks up a built-in automaton for `family`.
pub fn builtin(name: &str, family: Family) -> Result<CellularAutomaton> {
    let need_z = |ca: CellularAutomaton| {
        if family == Family::Integers {
            Ok(ca)
        } else {
            Err(Error::precondition(format!(
                "builtin '{name}' is defined on z (lift it with the subgroup embedding)"
            )))
        }
    };
    match name {
        "identity" => Ok(identity_ca(family)),
        "xor" => need_z(xor_ca()),
        "and" => need_z(and_ca()),
        "xor-wall" => need_z(xor_wall_ca()),
        "freeblock" => match family {
            Family::Free { rank } => Ok(crate::freeca::freeblock_ca(rank)),
            _ => Err(Error::precondition("freeblock lives on free groups")),
        },
        _ => Err(Error::Usage(format!(
            "unknown builtin CA '{name}' (known: {})",
            BUILTINS.join(", ")
        ))),
    }
}

/// Rule file: either a builtin name or an explicit table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleFile {
    Builtin {
        builtin: String,
    },
    Table {
        alphabet: Vec<String>,
        neighborhood: Vec<String>,
        table: BTreeMap<String, String>,
    },
}

fn key_separator(alphabet: &Alphabet) -> &'static str {
    if alphabet.tokens().iter().all(|t| t.chars().count() == 1) {
        ""
    } else {
        ","
    }
}

impl RuleFile {
    /// Table keys join the neighbor symbols in declaration order, with no
    /// separator when every token is a single character and `,` otherwise.
    pub fn into_ca(&self, family: Family) -> Result<CellularAutomaton> {
        match self {
            RuleFile::Builtin { builtin: name } => builtin(name, family),
            RuleFile::Table {
                alphabet,
                neighborhood,
                table,
            } => {
                let alphabet = Alphabet::new(alphabet.clone())?;
                let nbhd = neighborhood
                    .iter()
                    .map(|s| family.parse_element(s))
                    .collect::<Result<Vec<_>>>()?;
                let k = alphabet.len();
                let n = nbhd.len();
                let total = (k as u128)
                    .checked_pow(n as u32)
                    .filter(|t| *t <= 1 << 24)
                    .ok_or_else(|| Error::cap("rule table", u128::MAX, 1 << 24))?
                    as usize;
                let sep = key_separator(&alphabet);
                let mut out = vec![None; total];
                for (key, val) in table {
                    let parts: Vec<&str> = if sep.is_empty() {
                        key.char_indices()
                            .map(|(i, c)| &key[i..i + c.len_utf8()])
                            .collect()
                    } else {
                        key.split(sep).collect()
                    };
                    if parts.len() != n {
                        return Err(Error::parse(format!("table key '{key}' has wrong arity")));
                    }
                    let mut idx = 0usize;
                    for p in parts {
                        idx = idx * k + alphabet.symbol(p)?.index();
                    }
                    out[idx] = Some(alphabet.symbol(val)?);
                }
                let table = out
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        s.ok_or_else(|| Error::precondition(format!("rule table misses entry #{i}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                CellularAutomaton::new("table", family, alphabet, nbhd, LocalRule::Table(table))
            }
        }
    }

    pub fn from_ca(ca: &CellularAutomaton, max_entries: usize) -> Result<RuleFile> {
        let table = ca.to_table(max_entries)?;
        let k = ca.alphabet().len();
        let n = ca.neighborhood().len();
        let sep = key_separator(ca.alphabet());
        let mut map = BTreeMap::new();
        for (idx, out) in table.iter().enumerate() {
            let mut r = idx;
            let mut parts = vec![String::new(); n];
            for slot in parts.iter_mut().rev() {
                *slot = ca.alphabet().token(Symbol((r % k) as u8)).to_string();
                r /= k;
            }
            map.insert(parts.join(sep), ca.alphabet().token(*out).to_string());
        }
        Ok(RuleFile::Table {
            alphabet: ca.alphabet().tokens().to_vec(),
            neighborhood: ca.neighborhood().iter().map(|g| g.to_string()).collect(),
            table: map,
        })
    }
}

/// The dependency cone of a window, with an indexed neighbor relation.
#[derive(Clone, Debug)]
pub struct Cone {
    elements: Vec<GroupElement>,
    /// `layer_ends[t] = |D_t|`; `D_t` is a prefix of `elements`.
    layer_ends: Vec<usize>,
    /// Row `i` (for `i < |D_{T-1}|`) lists the indices of `elements[i]·s`.
    neighbors: Vec<u32>,
    arity: usize,
}

impl Cone {
    /// Builds `D_T` for the window `V`. The window order is kept as the
    /// order of `D_0`; each new layer is sorted canonically.
    pub fn build(
        family: Family,
        window: &[GroupElement],
        neighborhood: &[GroupElement],
        horizon: usize,
        cap: usize,
    ) -> Result<Cone> {
        let mut index: HashMap<GroupElement, u32> = HashMap::new();
        let mut elements = Vec::new();
        for g in window {
            family.check(g)?;
            if !index.contains_key(g) {
                index.insert(g.clone(), elements.len() as u32);
                elements.push(g.clone());
            }
        }
        let arity = neighborhood.len();
        let mut layer_ends = vec![elements.len()];
        let mut neighbors: Vec<u32> = Vec::new();
        let mut start = 0;
        for _ in 0..horizon {
            let end = elements.len();
            let mut fresh: Vec<GroupElement> = Vec::new();
            let mut products: Vec<GroupElement> = Vec::with_capacity((end - start) * arity);
            for g in &elements[start..end] {
                for s in neighborhood {
                    let gs = family.multiply(g, s)?;
                    if !index.contains_key(&gs) {
                        index.insert(gs.clone(), u32::MAX);
                        fresh.push(gs.clone());
                    }
                    products.push(gs);
                }
            }
            if end + fresh.len() > cap {
                return Err(Error::cap(
                    "dependency region",
                    (end + fresh.len()) as u128,
                    cap as u128,
                ));
            }
            family.sort_canonical(&mut fresh);
            for g in fresh {
                index.insert(g.clone(), elements.len() as u32);
                elements.push(g);
            }
            neighbors.extend(products.iter().map(|p| index[p]));
            layer_ends.push(elements.len());
            start = end;
        }
        Ok(Cone {
            elements,
            layer_ends,
            neighbors,
            arity,
        })
    }

    pub fn horizon(&self) -> usize {
        self.layer_ends.len() - 1
    }

    pub fn window_len(&self) -> usize {
        self.layer_ends[0]
    }

    pub fn window(&self) -> &[GroupElement] {
        &self.elements[..self.layer_ends[0]]
    }

    /// All of `D_T`.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn layer_len(&self, t: usize) -> usize {
        self.layer_ends[t]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.elements.iter().position(|h| h == g)
    }

    /// Runs the automaton from `initial` (values on all of `D_T`) and calls
    /// `visit(t, frame_on_window)` for `t = 0..=T`. Stops early when `visit`
    /// returns `false`. `scratch` is reused across calls.
    pub fn run_with<F>(
        &self,
        ca: &CellularAutomaton,
        initial: &[Symbol],
        scratch: &mut (Vec<Symbol>, Vec<Symbol>),
        mut visit: F,
    ) where
        F: FnMut(usize, &[Symbol]) -> bool,
    {
        debug_assert_eq!(initial.len(), self.elements.len());
        let w = self.window_len();
        if !visit(0, &initial[..w]) {
            return;
        }
        let (prev, next) = scratch;
        prev.clear();
        prev.extend_from_slice(initial);
        let horizon = self.horizon();
        let k = self.arity;
        let mut vals = vec![Symbol(0); k];
        for t in 1..=horizon {
            let n = self.layer_ends[horizon - t];
            next.clear();
            if n >= 1 << 14 {
                next.resize(n, Symbol(0));
                let prev_ref: &[Symbol] = prev;
                next.par_chunks_mut(1 << 12)
                    .enumerate()
                    .for_each(|(c, chunk)| {
                        let mut vals = vec![Symbol(0); k];
                        for (off, slot) in chunk.iter_mut().enumerate() {
                            let i = c * (1 << 12) + off;
                            let row = &self.neighbors[i * k..(i + 1) * k];
                            for (v, &j) in vals.iter_mut().zip(row) {
                                *v = prev_ref[j as usize];
                            }
                            *slot = ca.eval(&vals);
                        }
                    });
            } else {
                for i in 0..n {
                    let row = &self.neighbors[i * k..(i + 1) * k];
                    for (v, &j) in vals.iter_mut().zip(row) {
                        *v = prev[j as usize];
                    }
                    next.push(ca.eval(&vals));
                }
            }
            std::mem::swap(prev, next);
            if !visit(t, &prev[..w]) {
                return;
            }
        }
    }

    /// All frames on the window.
    pub fn run(&self, ca: &CellularAutomaton, initial: &[Symbol]) -> Vec<Vec<Symbol>> {
        let mut frames = Vec::with_capacity(self.horizon() + 1);
        let mut scratch = (Vec::new(), Vec::new());
        self.run_with(ca, initial, &mut scratch, |_, f| {
            frames.push(f.to_vec());
            true
        });
        frames
    }
}

/// `D_T` for window `V`, neighborhood `S` and horizon `T`, in canonical
/// order.
pub fn dependency_region(
    ctx: &GroupCtx,
    window: &[GroupElement],
    neighborhood: &[GroupElement],
    horizon: usize,
) -> Result<Vec<GroupElement>> {
    let cone = Cone::build(ctx.family(), window, neighborhood, horizon, ctx.ball_cap())?;
    let mut v = cone.elements;
    ctx.family().sort_canonical(&mut v);
    Ok(v)
}

/// Frames `Φ^t(x)|_V` for `t = 0..=T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolutionResult {
    pub window: Vec<GroupElement>,
    pub frames: Vec<Vec<Symbol>>,
    pub dependency_size: usize,
}

impl EvolutionResult {
    pub fn frame(&self, t: usize) -> Pattern {
        Pattern::from_cells(self.window.iter().cloned().zip(self.frames[t].iter().copied()))
    }

    pub fn value(&self, t: usize, g: &GroupElement) -> Option<Symbol> {
        self.window
            .iter()
            .position(|h| h == g)
            .map(|i| self.frames[t][i])
    }
}

pub fn evolve(
    ca: &CellularAutomaton,
    cfg: &Configuration,
    window: &[GroupElement],
    horizon: usize,
) -> Result<EvolutionResult> {
    evolve_capped(ca, cfg, window, horizon, DEFAULT_BALL_CAP)
}

pub fn evolve_capped(
    ca: &CellularAutomaton,
    cfg: &Configuration,
    window: &[GroupElement],
    horizon: usize,
    cap: usize,
) -> Result<EvolutionResult> {
    if cfg.family() != ca.family() {
        return Err(Error::FamilyMismatch {
            expected: ca.family().to_string(),
            found: cfg.family().to_string(),
        });
    }
    let cone = Cone::build(ca.family(), window, ca.neighborhood(), horizon, cap)?;
    let initial: Vec<Symbol> = cone.elements().iter().map(|g| cfg.value_at(g)).collect();
    let frames = cone.run(ca, &initial);
    Ok(EvolutionResult {
        window: cone.window().to_vec(),
        frames,
        dependency_size: cone.elements().len(),
    })
}

/// Checks `Φ^t(g·x) = g·Φ^t(x)` on `V` for `t ≤ T`.
pub fn check_equivariance(
    ca: &CellularAutomaton,
    g: &GroupElement,
    cfg: &Configuration,
    window: &[GroupElement],
    horizon: usize,
) -> Result<bool> {
    let fam = ca.family();
    let shifted = cfg.shift(g)?;
    let lhs = evolve(ca, &shifted, window, horizon)?;
    // (g·y)(v) = y(g⁻¹v)
    let ginv = fam.inverse(g)?;
    let pulled = window
        .iter()
        .map(|v| fam.multiply(&ginv, v))
        .collect::<Result<Vec<_>>>()?;
    let rhs = evolve(ca, cfg, &pulled, horizon)?;
    Ok(lhs.frames == rhs.frames)
}
