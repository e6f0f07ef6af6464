//! Lifting automata from `H = ⟨a⟩ ≅ Z` to a free group `G = F_d`.
//!
//! Left cosets `fH` are indexed by representatives that do not end with a
//! power of `a`; stripping the trailing `a`-power of a reduced word gives
//! both the representative `f` and `π(g) = f⁻¹g = a^j`.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::config::{Background, Configuration, Pattern};
use crate::engine::{evolve_capped, CellularAutomaton};
use crate::error::{Error, Result};
use crate::group::{Family, FreeWord, GroupCtx, GroupElement};

/// Exponent `j` with `π(w) = a^j`.
pub fn pi_exponent(w: &FreeWord) -> i64 {
    w.split_trailing_power(0).1
}

fn word(g: &GroupElement) -> Result<&FreeWord> {
    g.as_word()
        .ok_or_else(|| Error::precondition(format!("{g} is not a free-group element")))
}

/// `⟨a⟩ ≤ F_d`, with `±1 ↦ a^{±1}`.
#[derive(Clone, Debug)]
pub struct SubgroupEmbedding {
    big: GroupCtx,
    sub: GroupCtx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RectangleSpec {
    pub k: u64,
    pub l: u64,
}

impl SubgroupEmbedding {
    pub fn new(rank: u8) -> Result<SubgroupEmbedding> {
        if rank < 2 {
            return Err(Error::precondition("the ambient free group needs rank >= 2"));
        }
        Ok(SubgroupEmbedding {
            big: GroupCtx::free(rank),
            sub: GroupCtx::integers(),
        })
    }

    pub fn with_ball_cap(mut self, cap: usize) -> Self {
        self.big = self.big.with_ball_cap(cap);
        self
    }

    pub fn big(&self) -> &GroupCtx {
        &self.big
    }

    pub fn sub(&self) -> &GroupCtx {
        &self.sub
    }

    pub fn rank(&self) -> u8 {
        match self.big.family() {
            Family::Free { rank } => rank,
            _ => unreachable!(),
        }
    }

    /// `n ↦ a^n`.
    pub fn embed(&self, h: &GroupElement) -> Result<GroupElement> {
        let n = h
            .as_int()
            .ok_or_else(|| Error::precondition(format!("{h} is not an integer")))?;
        Ok(GroupElement::Word(FreeWord::generator_power(0, n)))
    }

    pub fn coset_rep(&self, g: &GroupElement) -> Result<GroupElement> {
        self.big.family().check(g)?;
        Ok(GroupElement::Word(word(g)?.split_trailing_power(0).0))
    }

    /// `(f, h)` with `g = f · a^h`.
    pub fn decompose(&self, g: &GroupElement) -> Result<(GroupElement, i64)> {
        self.big.family().check(g)?;
        let (f, j) = word(g)?.split_trailing_power(0);
        Ok((GroupElement::Word(f), j))
    }

    pub fn project_pi(&self, g: &GroupElement) -> Result<i64> {
        Ok(self.decompose(g)?.1)
    }

    /// `ω(g) = ‖f‖`.
    pub fn omega(&self, g: &GroupElement) -> Result<u64> {
        let (f, _) = self.decompose(g)?;
        self.big.norm(&f)
    }

    /// `‖g‖_H = ‖π(g)‖_H`.
    pub fn h_norm(&self, g: &GroupElement) -> Result<u64> {
        Ok(self.project_pi(g)?.unsigned_abs())
    }

    /// Coset representatives of norm at most `k`, canonical order.
    pub fn reps_in_ball(&self, k: u64) -> Result<Vec<GroupElement>> {
        Ok(self
            .big
            .ball(k)?
            .into_iter()
            .filter(|g| g.as_word().is_some_and(|w| w.split_trailing_power(0).1 == 0))
            .collect())
    }

    /// `R(k,l) = ∪_{f ∈ F ∩ B(1,k)} f·B_H(1,l)`, canonical order.
    pub fn rectangle(&self, spec: RectangleSpec) -> Result<Vec<GroupElement>> {
        let fam = self.big.family();
        let l = spec.l as i64;
        let mut out = Vec::new();
        for f in self.reps_in_ball(spec.k)? {
            for j in -l..=l {
                out.push(fam.multiply(&f, &self.embed(&GroupElement::Int(j))?)?);
            }
        }
        fam.sort_canonical(&mut out);
        Ok(out)
    }

    /// `Λ(k) = max_{g ∈ B(1,k)} ‖g‖_H`.
    pub fn lambda_of(&self, k: u64) -> Result<u64> {
        let mut best = 0;
        for g in self.big.ball(k)? {
            best = best.max(self.h_norm(&g)?);
        }
        Ok(best)
    }

    pub fn check_rectangle_inclusions(&self, k: u64, l: u64) -> Result<RectangleReport> {
        let rect = self.rectangle(RectangleSpec { k, l })?;
        // The union form must match the defining predicate, swept over the
        // ball that contains every candidate.
        let by_definition: Vec<GroupElement> = self
            .big
            .ball(k + l)?
            .into_iter()
            .filter(|g| {
                self.omega(g).is_ok_and(|w| w <= k) && self.h_norm(g).is_ok_and(|h| h <= l)
            })
            .collect();
        let union_matches_definition = rect == by_definition;
        let mut outside_ball = Vec::new();
        for g in &rect {
            if self.big.norm(g)? > k + l {
                outside_ball.push(g.clone());
            }
        }
        let lambda = self.lambda_of(k)?;
        let big_rect: BTreeSet<GroupElement> =
            self.rectangle(RectangleSpec { k, l: lambda })?.into_iter().collect();
        let mut outside_rect = Vec::new();
        for g in self.big.ball(k)? {
            if !big_rect.contains(&g) {
                outside_rect.push(g);
            }
        }
        Ok(RectangleReport {
            k,
            l,
            lambda,
            rectangle_size: rect.len(),
            union_matches_definition,
            rect_outside_ball: outside_ball,
            ball_outside_rect: outside_rect,
        })
    }

    /// Same alphabet and rule, neighborhood embedded into `⟨a⟩`.
    pub fn lift_ca(&self, ca: &CellularAutomaton) -> Result<CellularAutomaton> {
        if ca.family() != Family::Integers {
            return Err(Error::precondition(format!(
                "lifted automata must live on z, got {}",
                ca.family()
            )));
        }
        let nbhd = ca
            .neighborhood()
            .iter()
            .map(|s| self.embed(s))
            .collect::<Result<Vec<_>>>()?;
        ca.with_neighborhood(format!("{}@lift", ca.name()), self.big.family(), nbhd)
    }

    /// `x' = x ∘ π`.
    pub fn pullback_config(&self, x: &Configuration) -> Result<Configuration> {
        if x.family() != Family::Integers {
            return Err(Error::precondition("pullbacks start from a configuration on z"));
        }
        Ok(Configuration::new(
            self.big.family(),
            Pattern::new(),
            Background::CosetPullback {
                sub: Box::new(x.clone()),
            },
        ))
    }

    /// `(f⁻¹x)|_H` as a configuration on `Z`.
    pub fn coset_slice(&self, x: &Configuration, f: &GroupElement) -> Result<Configuration> {
        if x.family() != self.big.family() {
            return Err(Error::FamilyMismatch {
                expected: self.big.family().to_string(),
                found: x.family().to_string(),
            });
        }
        Ok(Configuration::new(
            Family::Integers,
            Pattern::new(),
            Background::SubgroupSlice {
                offset: word(f)?.clone(),
                parent: Box::new(x.clone()),
            },
        ))
    }

    /// Runs the lifted automaton on `f·B_H(1,l)` and the original one on
    /// `B_H(1,l)` from `(f⁻¹x)|_H`, for every representative, and compares
    /// frames. `f = 1` is the restriction identity.
    pub fn check_parallel_dynamics(
        &self,
        ca: &CellularAutomaton,
        x: &Configuration,
        horizon: usize,
        l: u64,
        reps: &[GroupElement],
    ) -> Result<ParallelReport> {
        let lifted = self.lift_ca(ca)?;
        let fam = self.big.family();
        let li = l as i64;
        let h_window: Vec<GroupElement> = (-li..=li).map(GroupElement::Int).collect();
        let mut per_rep = Vec::new();
        for f in reps {
            if self.coset_rep(f)? != *f {
                return Err(Error::precondition(format!("{f} is not a coset representative")));
            }
            let g_window = h_window
                .iter()
                .map(|h| fam.multiply(f, &self.embed(h)?))
                .collect::<Result<Vec<_>>>()?;
            let on_g = evolve_capped(&lifted, x, &g_window, horizon, self.big.ball_cap())?;
            let slice = self.coset_slice(x, f)?;
            let on_h = evolve_capped(ca, &slice, &h_window, horizon, self.sub.ball_cap())?;
            let mismatches = on_g
                .frames
                .iter()
                .zip(&on_h.frames)
                .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count())
                .sum();
            per_rep.push((f.clone(), mismatches));
        }
        Ok(ParallelReport {
            ca: ca.name().to_string(),
            horizon,
            window_radius: l,
            per_rep,
        })
    }

    /// Two configurations whose slices along `f₁H` and `f₂H` agree on the
    /// cells that matter must evolve identically there.
    #[allow(clippy::too_many_arguments)]
    pub fn check_coset_transfer(
        &self,
        ca: &CellularAutomaton,
        x1: &Configuration,
        f1: &GroupElement,
        f2: &GroupElement,
        other: &Configuration,
        horizon: usize,
        l: u64,
    ) -> Result<usize> {
        let lifted = self.lift_ca(ca)?;
        let fam = self.big.family();
        // The cone of f·a^[-l,l] for a neighborhood inside ⟨a⟩ stays in the
        // coset, within radius l + horizon·r.
        let r = ca
            .neighborhood()
            .iter()
            .filter_map(|s| s.as_int())
            .map(|n| n.unsigned_abs())
            .max()
            .unwrap_or(0);
        let reach = (l + horizon as u64 * r) as i64;
        let mut copy = Pattern::new();
        for j in -reach..=reach {
            let a = self.embed(&GroupElement::Int(j))?;
            copy.insert(fam.multiply(f2, &a)?, x1.value_at(&fam.multiply(f1, &a)?));
        }
        let x2 = other.patched(&copy);
        let li = l as i64;
        let window = |f: &GroupElement| -> Result<Vec<GroupElement>> {
            (-li..=li)
                .map(|j| fam.multiply(f, &self.embed(&GroupElement::Int(j))?))
                .collect()
        };
        let e1 = evolve_capped(&lifted, x1, &window(f1)?, horizon, self.big.ball_cap())?;
        let e2 = evolve_capped(&lifted, &x2, &window(f2)?, horizon, self.big.ball_cap())?;
        Ok(e1
            .frames
            .iter()
            .zip(&e2.frames)
            .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count())
            .sum())
    }
}

/// Re-reads an automaton on `F_d` as one on `F_rank`, `rank ≥ d`, with the
/// same neighborhood words.
pub fn lift_free_ca(ca: &CellularAutomaton, rank: u8) -> Result<CellularAutomaton> {
    let Family::Free { rank: d } = ca.family() else {
        return Err(Error::precondition("free lift starts from a free-group automaton"));
    };
    if rank < d {
        return Err(Error::precondition(format!("cannot lift from rank {d} down to {rank}")));
    }
    ca.with_neighborhood(
        format!("{}@free:{rank}", ca.name()),
        Family::Free { rank },
        ca.neighborhood().to_vec(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectangleReport {
    pub k: u64,
    pub l: u64,
    pub lambda: u64,
    pub rectangle_size: usize,
    pub union_matches_definition: bool,
    pub rect_outside_ball: Vec<GroupElement>,
    pub ball_outside_rect: Vec<GroupElement>,
}

impl RectangleReport {
    pub fn holds(&self) -> bool {
        self.union_matches_definition
            && self.rect_outside_ball.is_empty()
            && self.ball_outside_rect.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let strs = |v: &[GroupElement]| v.iter().map(|g| g.to_string()).collect::<Vec<_>>();
        json!({
            "k": self.k,
            "l": self.l,
            "lambda": self.lambda,
            "rectangle_size": self.rectangle_size,
            "union_matches_definition": self.union_matches_definition,
            "rect_outside_ball": strs(&self.rect_outside_ball),
            "ball_outside_rect": strs(&self.ball_outside_rect),
            "holds": self.holds(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelReport {
    pub ca: String,
    pub horizon: usize,
    pub window_radius: u64,
    /// Mismatching cells summed over frames, per representative.
    pub per_rep: Vec<(GroupElement, usize)>,
}

impl ParallelReport {
    pub fn holds(&self) -> bool {
        self.per_rep.iter().all(|(_, m)| *m == 0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ca": self.ca,
            "horizon": self.horizon,
            "window_radius": self.window_radius,
            "reps": self.per_rep.iter().map(|(f, m)| json!({"rep": f.to_string(), "mismatches": m})).collect::<Vec<_>>(),
            "holds": self.holds(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Symbol;
    use crate::engine::{and_ca, identity_ca, xor_ca};

    fn emb() -> SubgroupEmbedding {
        SubgroupEmbedding::new(2).unwrap()
    }

    fn w(s: &str) -> GroupElement {
        Family::Free { rank: 2 }.parse_element(s).unwrap()
    }

    #[test]
    fn coset_examples() {
        let e = emb();
        assert_eq!(e.coset_rep(&w("aaa")).unwrap(), w(""));
        assert_eq!(e.coset_rep(&w("baa")).unwrap(), w("b"));
        assert_eq!(e.coset_rep(&w("ab")).unwrap(), w("ab"));
        assert_eq!(e.decompose(&w("baa")).unwrap(), (w("b"), 2));
        assert_eq!(e.decompose(&w("A")).unwrap(), (w(""), -1));
        assert_eq!(e.decompose(&w("")).unwrap(), (w(""), 0));
        assert_eq!(e.omega(&w("aaaaa")).unwrap(), 0);
        assert_eq!(e.omega(&w("baa")).unwrap(), 1);
        assert_eq!(e.omega(&w("abAb")).unwrap(), 4);
    }

    #[test]
    fn lambda_examples() {
        let e = emb();
        assert_eq!(e.lambda_of(0).unwrap(), 0);
        assert_eq!(e.lambda_of(1).unwrap(), 1);
        assert_eq!(e.lambda_of(3).unwrap(), 3);
    }

    #[test]
    fn rectangles() {
        let e = emb();
        let r0 = e.rectangle(RectangleSpec { k: 0, l: 2 }).unwrap();
        let mut want: Vec<_> = (-2..=2).map(|j| GroupElement::Word(FreeWord::generator_power(0, j))).collect();
        Family::Free { rank: 2 }.sort_canonical(&mut want);
        assert_eq!(r0, want);
        let r11: BTreeSet<String> = e
            .rectangle(RectangleSpec { k: 1, l: 1 })
            .unwrap()
            .iter()
            .map(|g| g.to_string())
            .collect();
        let want: BTreeSet<String> = ["A", "", "a", "bA", "b", "ba", "BA", "B", "Ba"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(r11, want);
        assert_eq!(
            e.rectangle(RectangleSpec { k: 2, l: 0 }).unwrap(),
            e.reps_in_ball(2).unwrap()
        );
        assert!(e.check_rectangle_inclusions(2, 2).unwrap().holds());
    }

    #[test]
    fn pullback_values() {
        let e = emb();
        let x = Configuration::with_base(Family::Integers, Pattern::single(GroupElement::Int(2), Symbol(1)), Symbol(0));
        let xp = e.pullback_config(&x).unwrap();
        assert_eq!(xp.value_at(&w("baa")), Symbol(1));
        assert_eq!(xp.value_at(&w("aa")), Symbol(1));
        assert_eq!(xp.value_at(&w("aab")), Symbol(0));
        let u = e.pullback_config(&Configuration::uniform(Family::Integers, Symbol(0))).unwrap();
        assert_eq!(u.value_at(&w("abAB")), Symbol(0));
    }

    #[test]
    fn lifted_rules() {
        let e = emb();
        let id = e.lift_ca(&identity_ca(Family::Integers)).unwrap();
        assert_eq!(id.neighborhood(), &[w("")]);
        let x = e.lift_ca(&xor_ca()).unwrap();
        assert_eq!(x.neighborhood(), &[w("A"), w("a")]);
        let cfg = Configuration::with_base(Family::Free { rank: 2 }, Pattern::single(w("b"), Symbol(1)), Symbol(0));
        assert_eq!(x.apply_local(&cfg, &w("ba")).unwrap(), Symbol(1));
        assert_eq!(x.apply_local(&cfg, &w("bb")).unwrap(), Symbol(0));
        assert!(e.lift_ca(&id).is_err());
    }

    #[test]
    fn parallel_dynamics_small() {
        let e = emb();
        let x = Configuration::noise(Family::Free { rank: 2 }, Pattern::new(), 3, vec![Symbol(0), Symbol(1)]);
        let reps = e.reps_in_ball(1).unwrap();
        for ca in [xor_ca(), and_ca()] {
            let r = e.check_parallel_dynamics(&ca, &x, 3, 3, &reps).unwrap();
            assert!(r.holds(), "{r:?}");
        }
        let other = Configuration::noise(Family::Free { rank: 2 }, Pattern::new(), 99, vec![Symbol(0), Symbol(1)]);
        let m = e.check_coset_transfer(&xor_ca(), &x, &w("b"), &w("ab"), &other, 4, 3).unwrap();
        assert_eq!(m, 0);
    }
}
