//! Exact arithmetic, word norms and ball enumeration for the supported
//! group families: `Z`, `Z × Z_m`, the infinite dihedral group and free
//! groups of finite rank.
//!
//! Elements have one canonical string form per family:
//!
//! | family            | example           |
//! |-------------------|-------------------|
//! | integers          | `-3`, `0`, `7`    |
//! | `Z × Z_m`         | `(n,r)`, `0 ≤ r < m` |
//! | infinite dihedral | `(n,e)`, `e ∈ {0,1}` |
//! | free              | `abA` (`A` = `a⁻¹`), `""` = identity |

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default hard cap on the number of elements a single ball may hold.
pub const DEFAULT_BALL_CAP: usize = 10_000_000;

/// A letter of a free group: `code / 2` is the generator index and the low
/// bit marks the inverse.
pub type Letter = u8;

#[inline]
pub fn letter_inverse(l: Letter) -> Letter {
    l ^ 1
}

#[inline]
pub fn letter_char(l: Letter) -> char {
    let idx = l >> 1;
    if l & 1 == 0 {
        (b'a' + idx) as char
    } else {
        (b'A' + idx) as char
    }
}

/// Reduced word over `2d` letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(Vec<Letter>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    /// Builds a word from letters, freely reducing as it goes.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = FreeWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// `x^k` for the `index`-th generator `x` (negative `k` gives inverses).
    pub fn generator_power(index: u8, k: i64) -> Self {
        let l = if k >= 0 { index << 1 } else { (index << 1) | 1 };
        FreeWord(vec![l; k.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Right-multiplies by one letter, cancelling if needed.
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&letter_inverse(l)) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.0.clone();
        out.reserve(other.0.len());
        for &l in &other.0 {
            if out.last() == Some(&letter_inverse(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|&l| letter_inverse(l)).collect())
    }

    fn max_generator(&self) -> Option<u8> {
        self.0.iter().map(|l| l >> 1).max()
    }

    /// Splits off the maximal trailing power of generator `index`:
    /// returns `(prefix, k)` with `self = prefix · x^k`.
    pub fn split_trailing_power(&self, index: u8) -> (FreeWord, i64) {
        let mut end = self.0.len();
        let mut k = 0i64;
        while end > 0 && self.0[end - 1] >> 1 == index {
            k += if self.0[end - 1] & 1 == 0 { 1 } else { -1 };
            end -= 1;
        }
        (FreeWord(self.0[..end].to_vec()), k)
    }

    fn cmp_serialized(&self, other: &FreeWord) -> Ordering {
        self.0
            .iter()
            .map(|&l| letter_char(l))
            .cmp(other.0.iter().map(|&l| letter_char(l)))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

/// A group element. The family it belongs to is implied by the variant;
/// the modulus of `Z × Z_m` and the rank of a free group live in [`Family`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Int(i64),
    Prod { n: i64, r: u32 },
    Dih { n: i64, flip: bool },
    Word(FreeWord),
}

impl GroupElement {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            GroupElement::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_word(&self) -> Option<&FreeWord> {
        match self {
            GroupElement::Word(w) => Some(w),
            _ => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            GroupElement::Int(_) => "integer",
            GroupElement::Prod { .. } => "direct-product",
            GroupElement::Dih { .. } => "dihedral",
            GroupElement::Word(_) => "free-word",
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(n) => write!(f, "{n}"),
            GroupElement::Prod { n, r } => write!(f, "({n},{r})"),
            GroupElement::Dih { n, flip } => write!(f, "({n},{})", u8::from(*flip)),
            GroupElement::Word(w) => write!(f, "{w}"),
        }
    }
}

/// The supported group families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Integers,
    DirectProduct { m: u32 },
    InfiniteDihedral,
    Free { rank: u8 },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Integers => write!(f, "z"),
            Family::DirectProduct { m } => write!(f, "prod:{m}"),
            Family::InfiniteDihedral => write!(f, "dinf"),
            Family::Free { rank } => write!(f, "free:{rank}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<u32> {
            a.ok_or_else(|| Error::parse(format!("group '{s}' needs a numeric argument")))?
                .parse::<u32>()
                .map_err(|e| Error::parse(format!("group '{s}': {e}")))
        };
        match head {
            "z" | "int" | "integers" if arg.is_none() => Ok(Family::Integers),
            "prod" | "zxzm" => {
                let m = num(arg)?;
                if m == 0 {
                    return Err(Error::parse("prod:m needs m ≥ 1"));
                }
                Ok(Family::DirectProduct { m })
            }
            "dinf" | "dihedral" => Ok(Family::InfiniteDihedral),
            "free" => {
                let d = num(arg)?;
                if !(2..=26).contains(&d) {
                    return Err(Error::parse("free:d needs 2 ≤ d ≤ 26"));
                }
                Ok(Family::Free { rank: d as u8 })
            }
            _ => Err(Error::parse(format!("unknown group '{s}'"))),
        }
    }
}

impl Family {
    pub fn identity(&self) -> GroupElement {
        match self {
            Family::Integers => GroupElement::Int(0),
            Family::DirectProduct { .. } => GroupElement::Prod { n: 0, r: 0 },
            Family::InfiniteDihedral => GroupElement::Dih { n: 0, flip: false },
            Family::Free { .. } => GroupElement::Word(FreeWord::identity()),
        }
    }

    fn mismatch(&self, g: &GroupElement) -> Error {
        Error::FamilyMismatch {
            expected: self.to_string(),
            found: g.kind().to_string(),
        }
    }

    /// Checks that `g` is a well-formed element of this family.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        let ok = match (self, g) {
            (Family::Integers, GroupElement::Int(_)) => true,
            (Family::DirectProduct { m }, GroupElement::Prod { r, .. }) => r < m,
            (Family::InfiniteDihedral, GroupElement::Dih { .. }) => true,
            (Family::Free { rank }, GroupElement::Word(w)) => {
                w.max_generator().is_none_or(|x| x < *rank)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(self.mismatch(g))
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        match (self, g, h) {
            (Family::Integers, Int(a), Int(b)) => Ok(Int(a + b)),
            (Family::DirectProduct { m }, Prod { n: n1, r: r1 }, Prod { n: n2, r: r2 }) => Ok(Prod {
                n: n1 + n2,
                r: ((*r1 as u64 + *r2 as u64) % *m as u64) as u32,
            }),
            (Family::InfiniteDihedral, Dih { n: n1, flip: f1 }, Dih { n: n2, flip: f2 }) => Ok(Dih {
                n: if *f1 { n1 - n2 } else { n1 + n2 },
                flip: f1 ^ f2,
            }),
            (Family::Free { .. }, Word(a), Word(b)) => Ok(Word(a.mul(b))),
            (_, g, h) => {
                self.check(g)?;
                Err(self.mismatch(h))
            }
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        match (self, g) {
            (Family::Integers, Int(a)) => Ok(Int(-a)),
            (Family::DirectProduct { m }, Prod { n, r }) => Ok(Prod {
                n: -n,
                r: (m - r % m) % m,
            }),
            (Family::InfiniteDihedral, Dih { n, flip }) => Ok(if *flip {
                Dih { n: *n, flip: true }
            } else {
                Dih { n: -n, flip: false }
            }),
            (Family::Free { .. }, Word(w)) => Ok(Word(w.inverse())),
            (_, g) => Err(self.mismatch(g)),
        }
    }

    /// The canonical symmetric generating set `E`.
    pub fn canonical_generators(&self) -> Vec<GroupElement> {
        use GroupElement::*;
        match self {
            Family::Integers => vec![Int(1), Int(-1)],
            Family::DirectProduct { m } => {
                let mut v = vec![Prod { n: 1, r: 0 }, Prod { n: -1, r: 0 }];
                v.extend((1..*m).map(|r| Prod { n: 0, r }));
                v
            }
            Family::InfiniteDihedral => vec![
                Dih { n: 1, flip: false },
                Dih { n: -1, flip: false },
                Dih { n: 0, flip: true },
            ],
            Family::Free { rank } => (0..2 * rank)
                .map(|l| Word(FreeWord(vec![l])))
                .collect(),
        }
    }

    /// Word norm with respect to the canonical generators.
    pub fn norm(&self, g: &GroupElement) -> Result<u64> {
        use GroupElement::*;
        self.check(g)?;
        Ok(match g {
            Int(n) => n.unsigned_abs(),
            Prod { n, r } => n.unsigned_abs() + u64::from(*r != 0),
            Dih { n, flip } => n.unsigned_abs() + u64::from(*flip),
            Word(w) => w.len() as u64,
        })
    }

    /// Number of elements in the canonical ball of radius `k`.
    pub fn ball_size(&self, k: u64) -> u128 {
        let k = k as u128;
        match self {
            Family::Integers => 2 * k + 1,
            Family::DirectProduct { m } => {
                let m = *m as u128;
                if k == 0 {
                    1
                } else {
                    (2 * k + 1) + (m - 1) * (2 * k - 1)
                }
            }
            Family::InfiniteDihedral => {
                if k == 0 {
                    1
                } else {
                    (2 * k + 1) + (2 * k - 1)
                }
            }
            Family::Free { rank } => {
                let d = *rank as u128;
                let mut total: u128 = 1;
                let mut layer: u128 = 2 * d;
                for _ in 0..k {
                    total = total.saturating_add(layer);
                    layer = layer.saturating_mul(2 * d - 1);
                }
                total
            }
        }
    }

    /// Total order used for every deterministic enumeration: by norm, then
    /// lexicographically on the canonical serialization.
    pub fn canonical_cmp(&self, a: &GroupElement, b: &GroupElement) -> Ordering {
        let na = self.norm(a).unwrap_or(u64::MAX);
        let nb = self.norm(b).unwrap_or(u64::MAX);
        na.cmp(&nb).then_with(|| match (a, b) {
            (GroupElement::Word(x), GroupElement::Word(y)) => x.cmp_serialized(y),
            _ => a.to_string().cmp(&b.to_string()),
        })
    }

    pub fn sort_canonical(&self, v: &mut [GroupElement]) {
        v.sort_by(|a, b| self.canonical_cmp(a, b));
    }

    pub fn format(&self, g: &GroupElement) -> String {
        g.to_string()
    }

    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let bad = |why: &str| Error::parse(format!("'{s}' is not a {self} element: {why}"));
        let pair = |s: &str| -> Result<(i64, i64)> {
            let inner = s
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| bad("expected (n,x)"))?;
            let (a, b) = inner.split_once(',').ok_or_else(|| bad("expected (n,x)"))?;
            let a = a.trim().parse::<i64>().map_err(|e| bad(&e.to_string()))?;
            let b = b.trim().parse::<i64>().map_err(|e| bad(&e.to_string()))?;
            Ok((a, b))
        };
        match self {
            Family::Integers => s
                .strip_prefix('+')
                .unwrap_or(s)
                .parse::<i64>()
                .map(GroupElement::Int)
                .map_err(|e| bad(&e.to_string())),
            Family::DirectProduct { m } => {
                let (n, r) = pair(s)?;
                if r < 0 || r >= *m as i64 {
                    return Err(bad("residue out of range"));
                }
                Ok(GroupElement::Prod { n, r: r as u32 })
            }
            Family::InfiniteDihedral => {
                let (n, e) = pair(s)?;
                match e {
                    0 | 1 => Ok(GroupElement::Dih { n, flip: e == 1 }),
                    _ => Err(bad("flip bit must be 0 or 1")),
                }
            }
            Family::Free { rank } => {
                let mut w = Vec::with_capacity(s.len());
                for c in s.chars() {
                    let l = if c.is_ascii_lowercase() {
                        (c as u8 - b'a') << 1
                    } else if c.is_ascii_uppercase() {
                        ((c as u8 - b'A') << 1) | 1
                    } else {
                        return Err(bad("letters must be ASCII a-z / A-Z"));
                    };
                    if l >> 1 >= *rank {
                        return Err(bad("letter beyond the group's rank"));
                    }
                    if w.last() == Some(&letter_inverse(l)) {
                        return Err(bad("word is not reduced"));
                    }
                    w.push(l);
                }
                Ok(GroupElement::Word(FreeWord(w)))
            }
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Family::Free { .. })
    }
}

/// A group together with its generating set `E`.
///
/// Besides the canonical generators of each family, the integers can be
/// equipped with an arbitrary finite generating set (used to compare word
/// metrics of two generating sets of the same group).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCtx {
    family: Family,
    generators: Vec<GroupElement>,
    int_generators: Option<Vec<i64>>,
    ball_cap: usize,
}

impl GroupCtx {
    pub fn new(family: Family) -> Self {
        GroupCtx {
            family,
            generators: family.canonical_generators(),
            int_generators: None,
            ball_cap: DEFAULT_BALL_CAP,
        }
    }

    pub fn integers() -> Self {
        GroupCtx::new(Family::Integers)
    }

    pub fn free(rank: u8) -> Self {
        GroupCtx::new(Family::Free { rank })
    }

    /// `Z` with the generating set `gens ∪ -gens`. The generators must be
    /// nonzero with gcd 1.
    pub fn integers_with(gens: &[i64]) -> Result<Self> {
        if gens.is_empty() || gens.contains(&0) {
            return Err(Error::precondition(
                "integer generators must be nonzero and non-empty",
            ));
        }
        let g = gens.iter().fold(0i64, |acc, &x| gcd(acc, x.abs()));
        if g != 1 {
            return Err(Error::precondition(format!(
                "generators {gens:?} do not generate Z (gcd {g})"
            )));
        }
        let mut sym: Vec<i64> = gens.iter().flat_map(|&x| [x, -x]).collect();
        sym.sort_unstable();
        sym.dedup();
        if sym == [-1, 1] {
            return Ok(GroupCtx::integers());
        }
        Ok(GroupCtx {
            family: Family::Integers,
            generators: sym.iter().map(|&x| GroupElement::Int(x)).collect(),
            int_generators: Some(sym),
            ball_cap: DEFAULT_BALL_CAP,
        })
    }

    pub fn with_ball_cap(mut self, cap: usize) -> Self {
        self.ball_cap = cap;
        self
    }

    pub fn ball_cap(&self) -> usize {
        self.ball_cap
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn identity(&self) -> GroupElement {
        self.family.identity()
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.family.multiply(g, h)
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.family.inverse(g)
    }

    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        self.family.parse_element(s)
    }

    /// `d_E(1, g)`.
    pub fn norm(&self, g: &GroupElement) -> Result<u64> {
        match &self.int_generators {
            None => self.family.norm(g),
            Some(gens) => {
                let x = g.as_int().ok_or_else(|| self.family.mismatch(g))?;
                Ok(int_norm(gens, x))
            }
        }
    }

    /// The ball `B(1, k)` in canonical order (by norm, then serialization).
    pub fn ball(&self, k: u64) -> Result<Vec<GroupElement>> {
        if let Some(gens) = &self.int_generators {
            let maxg = gens.iter().map(|x| x.unsigned_abs()).max().unwrap_or(1) as u128;
            let bound = 2 * (k as u128) * maxg + 1;
            if bound > self.ball_cap as u128 {
                return Err(Error::cap("ball", bound, self.ball_cap as u128));
            }
            let mut layers = int_bfs(gens, k);
            layers.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.to_string().cmp(&b.0.to_string())));
            return Ok(layers.into_iter().map(|(x, _)| GroupElement::Int(x)).collect());
        }
        let size = self.family.ball_size(k);
        if size > self.ball_cap as u128 {
            return Err(Error::cap(
                format!("ball of radius {k} in {}", self.family),
                size,
                self.ball_cap as u128,
            ));
        }
        Ok(canonical_ball(self.family, k))
    }

    /// The sphere of radius `k` (elements of norm exactly `k`).
    pub fn sphere(&self, k: u64) -> Result<Vec<GroupElement>> {
        let ball = self.ball(k)?;
        let mut out = Vec::new();
        for g in ball {
            if self.norm(&g)? == k {
                out.push(g);
            }
        }
        Ok(out)
    }
}

impl FromStr for GroupCtx {
    type Err = Error;

    /// Accepts a family string, or `z:g1,g2,...` for integers with a custom
    /// generating set.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.trim().strip_prefix("z:") {
            let gens = rest
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|e| Error::parse(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            return GroupCtx::integers_with(&gens);
        }
        Ok(GroupCtx::new(s.parse()?))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// BFS norm in `(Z, gens)`. The search is confined to the window
/// `[min(0,x) - M, max(0,x) + M]` with `M = max |gen|`; any shortest word
/// can be reordered so its partial sums stay inside that window.
fn int_norm(gens: &[i64], x: i64) -> u64 {
    let m = gens.iter().map(|g| g.abs()).max().unwrap_or(1);
    let lo = x.min(0) - m;
    let hi = x.max(0) + m;
    let mut dist: HashMap<i64, u64> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(0, 0);
    queue.push_back(0i64);
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        if v == x {
            return dv;
        }
        for &g in gens {
            let w = v + g;
            if (lo..=hi).contains(&w) && !dist.contains_key(&w) {
                dist.insert(w, dv + 1);
                queue.push_back(w);
            }
        }
    }
    unreachable!("generators with gcd 1 reach every integer")
}

fn int_bfs(gens: &[i64], k: u64) -> Vec<(i64, u64)> {
    let mut seen: HashSet<i64> = HashSet::from([0]);
    let mut out = vec![(0i64, 0u64)];
    let mut frontier = vec![0i64];
    for depth in 1..=k {
        let mut next = Vec::new();
        for &v in &frontier {
            for &g in gens {
                if seen.insert(v + g) {
                    next.push(v + g);
                    out.push((v + g, depth));
                }
            }
        }
        frontier = next;
    }
    out
}

fn canonical_ball(family: Family, k: u64) -> Vec<GroupElement> {
    use GroupElement::*;
    let k_i = k as i64;
    match family {
        Family::Free { rank } => {
            // Letters ordered by their character so layers come out sorted.
            let mut order: Vec<Letter> = (0..2 * rank).collect();
            order.sort_by_key(|&l| letter_char(l));
            let mut out = vec![Word(FreeWord::identity())];
            let mut layer = vec![FreeWord::identity()];
            for _ in 0..k {
                let mut next = Vec::with_capacity(layer.len() * (2 * rank as usize - 1).max(1));
                for w in &layer {
                    for &l in &order {
                        if w.last() == Some(letter_inverse(l)) {
                            continue;
                        }
                        let mut v = w.0.clone();
                        v.push(l);
                        next.push(FreeWord(v));
                    }
                }
                out.extend(next.iter().cloned().map(Word));
                layer = next;
            }
            out
        }
        _ => {
            let mut v: Vec<GroupElement> = match family {
                Family::Integers => (-k_i..=k_i).map(Int).collect(),
                Family::DirectProduct { m } => {
                    let mut v: Vec<_> = (-k_i..=k_i).map(|n| Prod { n, r: 0 }).collect();
                    if k > 0 {
                        for r in 1..m {
                            v.extend((-(k_i - 1)..=(k_i - 1)).map(|n| Prod { n, r }));
                        }
                    }
                    v
                }
                Family::InfiniteDihedral => {
                    let mut v: Vec<_> = (-k_i..=k_i).map(|n| Dih { n, flip: false }).collect();
                    if k > 0 {
                        v.extend((-(k_i - 1)..=(k_i - 1)).map(|n| Dih { n, flip: true }));
                    }
                    v
                }
                Family::Free { .. } => unreachable!(),
            };
            family.sort_canonical(&mut v);
            v
        }
    }
}

/// Smallest `k2` with `B_1(1, k1) ⊆ B_2(1, k2)` for two generating sets of
/// the same group. Only the integers support custom generating sets.
pub fn check_ball_inclusion(ctx1: &GroupCtx, ctx2: &GroupCtx, k1: u64) -> Result<u64> {
    if ctx1.family() != Family::Integers || ctx2.family() != Family::Integers {
        return Err(Error::Unsupported(
            "ball inclusion is only implemented for generating sets of Z".into(),
        ));
    }
    let mut k2 = 0;
    for g in ctx1.ball(k1)? {
        k2 = k2.max(ctx2.norm(&g)?);
    }
    Ok(k2)
}
