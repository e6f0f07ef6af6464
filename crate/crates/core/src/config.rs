//! Finite patterns, total configurations described as a pattern over a
//! background rule, the `G`-shift and the Cantor metric.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Family, FreeWord, GroupCtx, GroupElement};

/// Index of a token in an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Symbol(pub u8);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::precondition("alphabet must be non-empty"));
        }
        if tokens.len() > 255 {
            return Err(Error::precondition("alphabet holds at most 255 symbols"));
        }
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::precondition("alphabet tokens must be non-empty"));
            }
            if tokens[..i].contains(t) {
                return Err(Error::precondition(format!("duplicate alphabet token '{t}'")));
            }
        }
        Ok(Alphabet { tokens })
    }

    /// `{"0", "1", ..., "k-1"}`.
    pub fn numeric(k: usize) -> Self {
        Alphabet::new((0..k).map(|i| i.to_string())).expect("1 ≤ k ≤ 255")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, s: Symbol) -> &str {
        &self.tokens[s.index()]
    }

    pub fn symbol(&self, token: &str) -> Result<Symbol> {
        self.tokens
            .iter()
            .position(|t| t == token)
            .map(|i| Symbol(i as u8))
            .ok_or_else(|| Error::parse(format!("'{token}' is not in the alphabet {:?}", self.tokens)))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.tokens.len()).map(|i| Symbol(i as u8))
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.index() < self.tokens.len()
    }
}

/// A finite map from group elements to symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pattern {
    cells: BTreeMap<GroupElement, Symbol>,
}

impl Pattern {
    pub fn new() -> Self {
        Pattern::default()
    }

    pub fn single(g: GroupElement, s: Symbol) -> Self {
        Pattern::from_cells([(g, s)])
    }

    pub fn from_cells<I: IntoIterator<Item = (GroupElement, Symbol)>>(cells: I) -> Self {
        Pattern {
            cells: cells.into_iter().collect(),
        }
    }

    /// The same symbol on every element of `support`.
    pub fn constant<'a, I: IntoIterator<Item = &'a GroupElement>>(support: I, s: Symbol) -> Self {
        Pattern::from_cells(support.into_iter().map(|g| (g.clone(), s)))
    }

    pub fn get(&self, g: &GroupElement) -> Option<Symbol> {
        self.cells.get(g).copied()
    }

    pub fn insert(&mut self, g: GroupElement, s: Symbol) {
        self.cells.insert(g, s);
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.cells.contains_key(g)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.cells.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, Symbol)> {
        self.cells.iter().map(|(g, s)| (g, *s))
    }

    /// Restriction to `region ∩ support`.
    pub fn restrict<'a, I: IntoIterator<Item = &'a GroupElement>>(&self, region: I) -> Pattern {
        Pattern::from_cells(
            region
                .into_iter()
                .filter_map(|g| self.get(g).map(|s| (g.clone(), s))),
        )
    }

    /// `g.u`: support `gL`, values `u(g⁻¹ ·)`.
    pub fn translate(&self, family: Family, g: &GroupElement) -> Result<Pattern> {
        let mut out = Pattern::new();
        for (h, s) in self.iter() {
            out.insert(family.multiply(g, h)?, s);
        }
        Ok(out)
    }

    /// Union of supports; `patch` wins on overlap.
    pub fn overlay(&self, patch: &Pattern) -> Pattern {
        let mut cells = self.cells.clone();
        cells.extend(patch.iter().map(|(g, s)| (g.clone(), s)));
        Pattern { cells }
    }

    /// True when `self` and `other` agree wherever both are defined.
    pub fn compatible_with(&self, other: &Pattern) -> bool {
        self.iter()
            .all(|(g, s)| other.get(g).is_none_or(|t| t == s))
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> PatternFile {
        PatternFile {
            alphabet: alphabet.tokens().to_vec(),
            cells: cells_to_json(self, alphabet),
        }
    }

    pub fn from_json(family: Family, file: &PatternFile) -> Result<(Alphabet, Pattern)> {
        let alphabet = Alphabet::new(file.alphabet.clone())?;
        let pattern = cells_from_json(family, &alphabet, &file.cells)?;
        Ok((alphabet, pattern))
    }
}

fn cells_to_json(p: &Pattern, alphabet: &Alphabet) -> BTreeMap<String, String> {
    p.iter()
        .map(|(g, s)| (g.to_string(), alphabet.token(s).to_string()))
        .collect()
}

fn cells_from_json(
    family: Family,
    alphabet: &Alphabet,
    cells: &BTreeMap<String, String>,
) -> Result<Pattern> {
    let mut p = Pattern::new();
    for (k, v) in cells {
        p.insert(family.parse_element(k)?, alphabet.symbol(v)?);
    }
    Ok(p)
}

/// How a configuration is defined outside its base pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Background {
    /// The same symbol everywhere.
    Uniform(Symbol),
    /// `x = u ∘ m` for a word `u` on the section `V_[0,n]` of a virtually-Z
    /// group, so that `x(φ⁻¹(n+1)·g) = x(g)`.
    Periodic { n: i64, word: Pattern },
    /// `x' = x ∘ π` for a configuration `x` on `⟨a⟩ ≅ Z` inside a free group.
    CosetPullback { sub: Box<Configuration> },
    /// `j ↦ parent(offset · a^j)`: the slice `(offset⁻¹ parent)|_⟨a⟩` seen
    /// as a configuration on `Z`.
    SubgroupSlice { offset: FreeWord, parent: Box<Configuration> },
    /// `h ↦ inner(by⁻¹ · h)`.
    Translated { by: GroupElement, inner: Box<Configuration> },
    /// Seeded pseudo-random symbols, a deterministic stand-in for an
    /// arbitrary infinite exterior.
    Noise { seed: u64, symbols: Vec<Symbol> },
}

/// A total configuration: `base` on its finite support, `background`
/// everywhere else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    family: Family,
    base: Pattern,
    background: Background,
}

impl Configuration {
    pub fn new(family: Family, base: Pattern, background: Background) -> Self {
        Configuration {
            family,
            base,
            background,
        }
    }

    pub fn uniform(family: Family, s: Symbol) -> Self {
        Configuration::new(family, Pattern::new(), Background::Uniform(s))
    }

    /// `base` on top of a uniform background.
    pub fn with_base(family: Family, base: Pattern, fill: Symbol) -> Self {
        Configuration::new(family, base, Background::Uniform(fill))
    }

    pub fn noise(family: Family, base: Pattern, seed: u64, symbols: Vec<Symbol>) -> Self {
        Configuration::new(family, base, Background::Noise { seed, symbols })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn base(&self) -> &Pattern {
        &self.base
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    /// A copy whose base is overlaid with `patch`.
    pub fn patched(&self, patch: &Pattern) -> Configuration {
        Configuration {
            family: self.family,
            base: self.base.overlay(patch),
            background: self.background.clone(),
        }
    }

    /// The symbol at `g`. `g` must belong to this configuration's family.
    pub fn value_at(&self, g: &GroupElement) -> Symbol {
        if let Some(s) = self.base.get(g) {
            return s;
        }
        self.background_at(g)
    }

    fn background_at(&self, g: &GroupElement) -> Symbol {
        let fam = self.family;
        match &self.background {
            Background::Uniform(s) => *s,
            Background::Periodic { n, word } => {
                let folded = crate::vz::fold_into_section(fam, *n, g)
                    .expect("periodic backgrounds live on virtually-Z families");
                word.get(&folded).expect("periodic word covers its section")
            }
            Background::CosetPullback { sub } => {
                let w = g.as_word().expect("pullback backgrounds live on free groups");
                sub.value_at(&GroupElement::Int(crate::lift::pi_exponent(w)))
            }
            Background::SubgroupSlice { offset, parent } => {
                let j = g.as_int().expect("subgroup slices live on Z");
                let h = offset.mul(&FreeWord::generator_power(0, j));
                parent.value_at(&GroupElement::Word(h))
            }
            Background::Translated { by, inner } => {
                let pre = fam
                    .inverse(by)
                    .and_then(|b| fam.multiply(&b, g))
                    .expect("translation stays in the family");
                inner.value_at(&pre)
            }
            Background::Noise { seed, symbols } => {
                let h = mix64(seed ^ fnv1a(g.to_string().as_bytes()));
                symbols[(h % symbols.len() as u64) as usize]
            }
        }
    }

    /// Values on `region`, as a pattern.
    pub fn materialize<'a, I: IntoIterator<Item = &'a GroupElement>>(&self, region: I) -> Pattern {
        Pattern::from_cells(region.into_iter().map(|g| (g.clone(), self.value_at(g))))
    }

    /// The `G`-shift `g·x = x ∘ L_{g⁻¹}`.
    ///
    /// Uniform backgrounds are shift invariant, and periodic ones are
    /// invariant under their period subgroup; every other background is
    /// wrapped in [`Background::Translated`], which keeps the result exact
    /// on the whole group.
    pub fn shift(&self, g: &GroupElement) -> Result<Configuration> {
        let fam = self.family;
        fam.check(g)?;
        let base = self.base.translate(fam, g)?;
        if *g == fam.identity() {
            return Ok(self.clone());
        }
        let background = match &self.background {
            Background::Uniform(s) => Background::Uniform(*s),
            Background::Periodic { n, word } if crate::vz::is_period_element(fam, *n, g) => {
                Background::Periodic {
                    n: *n,
                    word: word.clone(),
                }
            }
            Background::Translated { by, inner } => Background::Translated {
                by: fam.multiply(g, by)?,
                inner: inner.clone(),
            },
            other => Background::Translated {
                by: g.clone(),
                inner: Box::new(Configuration::new(fam, Pattern::new(), other.clone())),
            },
        };
        Ok(Configuration {
            family: fam,
            base,
            background,
        })
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> ConfigFile {
        ConfigFile {
            group: Some(self.family.to_string()),
            alphabet: alphabet.tokens().to_vec(),
            cells: cells_to_json(&self.base, alphabet),
            background: background_to_json(&self.background, alphabet),
        }
    }

    /// Parses a configuration. `family` is used unless the file names its
    /// own group.
    pub fn from_json(family: Family, file: &ConfigFile) -> Result<(Alphabet, Configuration)> {
        let family = match &file.group {
            Some(g) => g.parse()?,
            None => family,
        };
        let alphabet = Alphabet::new(file.alphabet.clone())?;
        let base = cells_from_json(family, &alphabet, &file.cells)?;
        let background = background_from_json(family, &alphabet, &file.background)?;
        Ok((alphabet, Configuration::new(family, base, background)))
    }
}

fn background_to_json(bg: &Background, alphabet: &Alphabet) -> BackgroundFile {
    match bg {
        Background::Uniform(s) => BackgroundFile::Uniform {
            symbol: alphabet.token(*s).to_string(),
        },
        Background::Periodic { n, word } => BackgroundFile::Periodic {
            n: *n,
            cells: cells_to_json(word, alphabet),
        },
        Background::CosetPullback { sub } => BackgroundFile::Pullback {
            sub: Box::new(sub.to_json(alphabet)),
        },
        Background::SubgroupSlice { offset, parent } => BackgroundFile::Slice {
            offset: offset.to_string(),
            parent: Box::new(parent.to_json(alphabet)),
        },
        Background::Translated { by, inner } => BackgroundFile::Translated {
            by: by.to_string(),
            inner: Box::new(inner.to_json(alphabet)),
        },
        Background::Noise { seed, symbols } => BackgroundFile::Noise {
            seed: *seed,
            symbols: symbols.iter().map(|s| alphabet.token(*s).to_string()).collect(),
        },
    }
}

fn background_from_json(
    family: Family,
    alphabet: &Alphabet,
    file: &BackgroundFile,
) -> Result<Background> {
    let nested = |f: Family, c: &ConfigFile| -> Result<Box<Configuration>> {
        let (a, cfg) = Configuration::from_json(f, c)?;
        if a != *alphabet {
            return Err(Error::parse("nested configuration uses a different alphabet"));
        }
        Ok(Box::new(cfg))
    };
    Ok(match file {
        BackgroundFile::Uniform { symbol } => Background::Uniform(alphabet.symbol(symbol)?),
        BackgroundFile::Periodic { n, cells } => {
            let word = cells_from_json(family, alphabet, cells)?;
            crate::vz::check_periodic_word(family, *n, &word)?;
            Background::Periodic { n: *n, word }
        }
        BackgroundFile::Pullback { sub } => {
            if !family.is_free() {
                return Err(Error::parse("pullback backgrounds need a free group"));
            }
            Background::CosetPullback {
                sub: nested(Family::Integers, sub)?,
            }
        }
        BackgroundFile::Slice { offset, parent } => {
            if family != Family::Integers {
                return Err(Error::parse("slice backgrounds live on z"));
            }
            let cfg = nested(Family::Free { rank: 26 }, parent)?;
            let offset = cfg
                .family()
                .parse_element(offset)?
                .as_word()
                .cloned()
                .ok_or_else(|| Error::parse("slice parent must be a free group"))?;
            Background::SubgroupSlice {
                offset,
                parent: cfg,
            }
        }
        BackgroundFile::Translated { by, inner } => Background::Translated {
            by: family.parse_element(by)?,
            inner: nested(family, inner)?,
        },
        BackgroundFile::Noise { seed, symbols } => {
            if symbols.is_empty() {
                return Err(Error::parse("noise background needs at least one symbol"));
            }
            Background::Noise {
                seed: *seed,
                symbols: symbols
                    .iter()
                    .map(|t| alphabet.symbol(t))
                    .collect::<Result<_>>()?,
            }
        }
    })
}

/// `{"alphabet":[...], "cells":{"<element>":"<symbol>"}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub cells: BTreeMap<String, String>,
}

/// A pattern file plus a `background` object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub cells: BTreeMap<String, String>,
    pub background: BackgroundFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackgroundFile {
    Uniform { symbol: String },
    Periodic { n: i64, cells: BTreeMap<String, String> },
    Pullback { sub: Box<ConfigFile> },
    Slice { offset: String, parent: Box<ConfigFile> },
    Translated { by: String, inner: Box<ConfigFile> },
    Noise { seed: u64, symbols: Vec<String> },
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Result of comparing two configurations up to a probe radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CantorDistance {
    /// `2^{-k}` where `k` is the least norm of a disagreement.
    Exact { k: u64 },
    /// No disagreement inside the probed ball: the distance is at most
    /// `2^{-radius}`.
    AtMost { radius: u64 },
}

impl CantorDistance {
    pub fn value(&self) -> f64 {
        match self {
            CantorDistance::Exact { k } => 2f64.powi(-(*k as i32)),
            CantorDistance::AtMost { radius } => 2f64.powi(-(*radius as i32)),
        }
    }

    /// Whether the distance is certified to be `≤ 2^{-k}`.
    pub fn within(&self, k: u64) -> bool {
        match self {
            CantorDistance::Exact { k: j } => *j >= k,
            CantorDistance::AtMost { radius } => *radius >= k,
        }
    }
}

impl fmt::Display for CantorDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CantorDistance::Exact { k } => write!(f, "2^-{k}"),
            CantorDistance::AtMost { radius } => write!(f, "<= 2^-{radius}"),
        }
    }
}

pub fn cantor_distance(
    ctx: &GroupCtx,
    x: &Configuration,
    y: &Configuration,
    probe_radius: u64,
) -> Result<CantorDistance> {
    for g in ctx.ball(probe_radius)? {
        if x.value_at(&g) != y.value_at(&g) {
            return Ok(CantorDistance::Exact { k: ctx.norm(&g)? });
        }
    }
    Ok(CantorDistance::AtMost {
        radius: probe_radius,
    })
}

/// Cantor distance between two patterns on a common, norm-ordered window.
pub fn pattern_distance(
    ctx: &GroupCtx,
    window: &[GroupElement],
    x: &Pattern,
    y: &Pattern,
    probe_radius: u64,
) -> Result<CantorDistance> {
    let mut best: Option<u64> = None;
    for g in window {
        if x.get(g) != y.get(g) {
            let n = ctx.norm(g)?;
            best = Some(best.map_or(n, |b| b.min(n)));
        }
    }
    Ok(match best {
        Some(k) => CantorDistance::Exact { k },
        None => CantorDistance::AtMost {
            radius: probe_radius,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: Family = Family::Integers;
    const F2: Family = Family::Free { rank: 2 };

    fn int(n: i64) -> GroupElement {
        GroupElement::Int(n)
    }

    #[test]
    fn value_at_precedence() {
        let c = Configuration::uniform(Z, Symbol(0));
        assert_eq!(c.value_at(&int(17)), Symbol(0));
        let c = Configuration::with_base(Z, Pattern::single(int(0), Symbol(1)), Symbol(0));
        assert_eq!(c.value_at(&int(0)), Symbol(1));
        assert_eq!(c.value_at(&int(1)), Symbol(0));
    }

    #[test]
    fn shift_examples() {
        let c = Configuration::with_base(Z, Pattern::single(int(0), Symbol(1)), Symbol(0));
        assert_eq!(c.shift(&int(0)).unwrap(), c);
        let s = c.shift(&int(2)).unwrap();
        assert_eq!(s.base(), &Pattern::single(int(2), Symbol(1)));
        let a = F2.parse_element("a").unwrap();
        let c = Configuration::with_base(F2, Pattern::single(F2.identity(), Symbol(3)), Symbol(0));
        let s = c.shift(&a).unwrap();
        assert_eq!(s.base(), &Pattern::single(a, Symbol(3)));
    }

    #[test]
    fn shift_of_noise_is_exact() {
        let c = Configuration::noise(Z, Pattern::new(), 7, vec![Symbol(0), Symbol(1)]);
        let s = c.shift(&int(5)).unwrap();
        for h in -20..20 {
            assert_eq!(s.value_at(&int(h)), c.value_at(&int(h - 5)));
        }
        let s2 = s.shift(&int(-2)).unwrap();
        for h in -20..20 {
            assert_eq!(s2.value_at(&int(h)), c.value_at(&int(h - 3)));
        }
    }

    #[test]
    fn cantor_examples() {
        let ctx = GroupCtx::integers();
        let x = Configuration::uniform(Z, Symbol(0));
        assert_eq!(
            cantor_distance(&ctx, &x, &x, 5).unwrap(),
            CantorDistance::AtMost { radius: 5 }
        );
        let y = x.patched(&Pattern::single(int(-3), Symbol(1)));
        assert_eq!(
            cantor_distance(&ctx, &x, &y, 5).unwrap(),
            CantorDistance::Exact { k: 3 }
        );
    }

    #[test]
    fn overlay_examples() {
        let a = Pattern::single(int(0), Symbol(0));
        let b = Pattern::single(int(1), Symbol(1));
        assert_eq!(a.overlay(&b).len(), 2);
        assert_eq!(a.overlay(&a), a);
        let patch = Pattern::single(int(0), Symbol(1));
        assert_eq!(a.overlay(&patch).get(&int(0)), Some(Symbol(1)));
    }

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(Alphabet::new(["0", "0"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        let a = Alphabet::new(["0", "1", "W"]).unwrap();
        assert_eq!(a.symbol("W").unwrap(), Symbol(2));
        assert!(a.symbol("x").is_err());
    }

    #[test]
    fn json_round_trip() {
        let alpha = Alphabet::numeric(2);
        let c = Configuration::with_base(Z, Pattern::single(int(-4), Symbol(1)), Symbol(0))
            .shift(&int(3))
            .unwrap();
        let c2 = Configuration::noise(Z, Pattern::new(), 3, vec![Symbol(1)])
            .shift(&int(1))
            .unwrap();
        for cfg in [c, c2] {
            let text = serde_json::to_string(&cfg.to_json(&alpha)).unwrap();
            let file: ConfigFile = serde_json::from_str(&text).unwrap();
            let (a, back) = Configuration::from_json(Z, &file).unwrap();
            assert_eq!(a, alpha);
            assert_eq!(back, cfg);
        }
    }
}
