//! Spine machinery for virtually-`Z` groups.
//!
//! Each supported family has a finite-index subgroup `H ≅ Z` (the spine):
//! `Z` itself, `Z × {0}` inside `Z × Z_m`, and the translations inside the
//! infinite dihedral group. Every element decomposes uniquely as `z·f` with
//! `z ∈ H` and `f` in a fixed fundamental domain, and `p(g) = φ(z)`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::blocking::{verify_blocking, BlockingCertificate, BlockingQuery, VerificationMode, VerifyOptions};
use crate::config::{Configuration, Pattern, Symbol};
use crate::engine::{evolve, CellularAutomaton};
use crate::error::{Error, Result};
use crate::group::{Family, GroupCtx, GroupElement};

#[derive(Clone, Debug)]
pub struct VZStructure {
    ctx: GroupCtx,
    domain: Vec<GroupElement>,
}

fn require_vz(family: Family) -> Result<()> {
    match family {
        Family::Integers | Family::DirectProduct { .. } | Family::InfiniteDihedral => Ok(()),
        Family::Free { .. } => Err(Error::Unsupported(format!(
            "{family} is not virtually Z"
        ))),
    }
}

/// `φ⁻¹(k)`.
fn phi_inv(family: Family, k: i64) -> GroupElement {
    match family {
        Family::Integers => GroupElement::Int(k),
        Family::DirectProduct { .. } => GroupElement::Prod { n: k, r: 0 },
        Family::InfiniteDihedral => GroupElement::Dih { n: k, flip: false },
        Family::Free { .. } => unreachable!("guarded by require_vz"),
    }
}

fn spine_coord(g: &GroupElement) -> i64 {
    match g {
        GroupElement::Int(n) | GroupElement::Prod { n, .. } | GroupElement::Dih { n, .. } => *n,
        GroupElement::Word(_) => unreachable!("guarded by require_vz"),
    }
}

fn in_spine(g: &GroupElement) -> bool {
    match g {
        GroupElement::Int(_) => true,
        GroupElement::Prod { r, .. } => *r == 0,
        GroupElement::Dih { flip, .. } => !flip,
        GroupElement::Word(_) => false,
    }
}

/// `m(g) = φ⁻¹(p(g) mod (n+1)) · φ⁻¹(p(g))⁻¹ · g`, which lands in `V_[0,n]`.
pub fn fold_into_section(family: Family, n: i64, g: &GroupElement) -> Result<GroupElement> {
    require_vz(family)?;
    family.check(g)?;
    if n < 0 {
        return Err(Error::precondition("period word needs n >= 0"));
    }
    let p = spine_coord(g);
    let back = family.inverse(&phi_inv(family, p))?;
    let head = phi_inv(family, p.rem_euclid(n + 1));
    family.multiply(&head, &family.multiply(&back, g)?)
}

/// True when left multiplication by `g` preserves every `u ∘ m` of period
/// `n + 1`, that is `g ∈ ⟨φ⁻¹(n+1)⟩`.
pub fn is_period_element(family: Family, n: i64, g: &GroupElement) -> bool {
    require_vz(family).is_ok() && in_spine(g) && spine_coord(g).rem_euclid(n + 1) == 0
}

/// The support of a period word must be exactly `V_[0,n]`.
pub fn check_periodic_word(family: Family, n: i64, word: &Pattern) -> Result<()> {
    let vz = VZStructure::new(GroupCtx::new(family))?;
    if n < 0 {
        return Err(Error::precondition("period word needs n >= 0"));
    }
    let want: BTreeSet<GroupElement> = Section::new(0, n)?.elements(&vz).into_iter().collect();
    let have: BTreeSet<GroupElement> = word.support().cloned().collect();
    if want != have {
        return Err(Error::precondition(format!(
            "period word must be supported exactly on V_[0,{n}] ({} cells), found {} cells",
            want.len(),
            have.len()
        )));
    }
    Ok(())
}

/// `V_[a,b] = p⁻¹([a,b])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    pub a: i64,
    pub b: i64,
}

impl Section {
    pub fn new(a: i64, b: i64) -> Result<Section> {
        if a > b {
            return Err(Error::precondition(format!("empty section [{a},{b}]")));
        }
        Ok(Section { a, b })
    }

    pub fn len(&self) -> u64 {
        (self.b - self.a + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, vz: &VZStructure, g: &GroupElement) -> bool {
        (self.a..=self.b).contains(&vz.project_p(g))
    }

    /// All cells, vertebra by vertebra.
    pub fn elements(&self, vz: &VZStructure) -> Vec<GroupElement> {
        (self.a..=self.b).flat_map(|k| vz.vertebra(k)).collect()
    }

    /// Recovers `[a,b]` from a set that must be exactly a section.
    pub fn of_set(vz: &VZStructure, cells: &[GroupElement]) -> Result<Section> {
        let ps: Vec<i64> = cells.iter().map(|g| vz.project_p(g)).collect();
        let (Some(&a), Some(&b)) = (ps.iter().min(), ps.iter().max()) else {
            return Err(Error::precondition("empty set is not a section"));
        };
        let sec = Section { a, b };
        let want: BTreeSet<&GroupElement> = cells.iter().collect();
        let full = sec.elements(vz);
        if full.len() != want.len() || !full.iter().all(|g| want.contains(g)) {
            return Err(Error::precondition(format!(
                "cell set is not the whole section V_[{a},{b}]"
            )));
        }
        Ok(sec)
    }
}

impl VZStructure {
    pub fn new(ctx: GroupCtx) -> Result<VZStructure> {
        let family = ctx.family();
        require_vz(family)?;
        let domain = match family {
            Family::Integers => vec![GroupElement::Int(0)],
            Family::DirectProduct { m } => (0..m).map(|r| GroupElement::Prod { n: 0, r }).collect(),
            Family::InfiniteDihedral => vec![
                GroupElement::Dih { n: 0, flip: false },
                GroupElement::Dih { n: 0, flip: true },
            ],
            Family::Free { .. } => unreachable!(),
        };
        Ok(VZStructure { ctx, domain })
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn family(&self) -> Family {
        self.ctx.family()
    }

    /// The fundamental domain `F`, identity first.
    pub fn domain(&self) -> &[GroupElement] {
        &self.domain
    }

    pub fn phi_inv(&self, k: i64) -> GroupElement {
        phi_inv(self.family(), k)
    }

    pub fn in_spine(&self, g: &GroupElement) -> bool {
        in_spine(g)
    }

    /// The unique `(z, f)` with `g = z·f`.
    pub fn decompose(&self, g: &GroupElement) -> (GroupElement, GroupElement) {
        let z = self.phi_inv(spine_coord(g));
        let f = self
            .family()
            .multiply(&self.family().inverse(&z).expect("same family"), g)
            .expect("same family");
        (z, f)
    }

    pub fn project_p(&self, g: &GroupElement) -> i64 {
        spine_coord(g)
    }

    /// `V_{k} = {φ⁻¹(k)·f : f ∈ F}`.
    pub fn vertebra(&self, k: i64) -> Vec<GroupElement> {
        let z = self.phi_inv(k);
        self.domain
            .iter()
            .map(|f| self.family().multiply(&z, f).expect("same family"))
            .collect()
    }

    pub fn section_translate(&self, h: &GroupElement, sec: Section) -> Result<Section> {
        self.family().check(h)?;
        if !in_spine(h) {
            return Err(Error::precondition(format!("{h} is not in the spine subgroup")));
        }
        let d = spine_coord(h);
        Section::new(sec.a + d, sec.b + d)
    }

    /// `max{|p(gs) − p(g)| : g ∈ V_{k}}`.
    pub fn impact_at(&self, s: &GroupElement, k: i64) -> Result<u64> {
        let fam = self.family();
        let mut best = 0;
        for g in self.vertebra(k) {
            let gs = fam.multiply(&g, s)?;
            best = best.max((spine_coord(&gs) - spine_coord(&g)).unsigned_abs());
        }
        Ok(best)
    }

    pub fn impact(&self, s: &GroupElement) -> Result<u64> {
        self.impact_at(s, 0)
    }

    /// `Δ = max{imp(s) : s ∈ S}`.
    pub fn delta(&self, ca: &CellularAutomaton) -> Result<u64> {
        if ca.family() != self.family() {
            return Err(Error::FamilyMismatch {
                expected: self.family().to_string(),
                found: ca.family().to_string(),
            });
        }
        let mut d = 0;
        for s in ca.neighborhood() {
            d = d.max(self.impact(s)?);
        }
        Ok(d)
    }

    /// The section spanned by a blocking region, which must be a whole
    /// section.
    pub fn section_of(&self, cells: &[GroupElement]) -> Result<Section> {
        Section::of_set(self, cells)
    }
}

/// `x = u ∘ m` for `u` supported exactly on `V_[0,n]`.
pub fn periodic_config_from_word(vz: &VZStructure, word: &Pattern) -> Result<Configuration> {
    let n = word
        .support()
        .map(|g| vz.project_p(g))
        .max()
        .ok_or_else(|| Error::precondition("empty period word"))?;
    check_periodic_word(vz.family(), n, word)?;
    Ok(Configuration::new(
        vz.family(),
        Pattern::new(),
        crate::config::Background::Periodic {
            n,
            word: word.clone(),
        },
    ))
}

/// Outcome of a disconnection check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisconnectReport {
    pub section: Section,
    pub delta: u64,
    pub horizon: usize,
    /// Arm assignments examined per side.
    pub right_checked: u64,
    pub left_checked: u64,
    pub right_violations: u64,
    pub left_violations: u64,
}

impl DisconnectReport {
    pub fn passed(&self) -> bool {
        self.right_violations == 0 && self.left_violations == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "section": [self.section.a, self.section.b],
            "delta": self.delta,
            "horizon": self.horizon,
            "right": {"checked": self.right_checked, "violations": self.right_violations},
            "left": {"checked": self.left_checked, "violations": self.left_violations},
            "passed": self.passed(),
        })
    }
}

/// One side of the disconnection check: for each assignment of the arm
/// cells of the cone, the window frames must not depend on the cells on
/// the other side.
#[allow(clippy::too_many_arguments)]
fn disconnect_side(
    vz: &VZStructure,
    ca: &CellularAutomaton,
    q: &BlockingQuery,
    window: &[GroupElement],
    on_arm: &dyn Fn(i64) -> bool,
    mode: VerificationMode,
    opts: &VerifyOptions,
) -> Result<(u64, u64)> {
    let fam = vz.family();
    let cone = crate::engine::Cone::build(fam, window, ca.neighborhood(), q.horizon, opts.ball_cap)?;
    let mut arm: Vec<GroupElement> = cone
        .elements()
        .iter()
        .filter(|g| on_arm(vz.project_p(g)) && !q.word.contains(g))
        .cloned()
        .collect();
    fam.sort_canonical(&mut arm);
    let k = ca.alphabet().len() as u128;
    let total = k.checked_pow(arm.len() as u32).unwrap_or(u128::MAX);
    let assignments: Box<dyn Iterator<Item = Vec<Symbol>>> = match mode {
        VerificationMode::Exhaustive => {
            if total > opts.exhaustive_cap {
                return Err(Error::cap(
                    "arm assignments for the disconnection check (try sampled mode)",
                    total,
                    opts.exhaustive_cap,
                ));
            }
            let n = arm.len();
            Box::new((0..total).map(move |mut idx| {
                (0..n)
                    .map(|_| {
                        let s = Symbol((idx % k) as u8);
                        idx /= k;
                        s
                    })
                    .collect()
            }))
        }
        VerificationMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = arm.len();
            let samples: Vec<Vec<Symbol>> = (0..trials)
                .map(|_| (0..n).map(|_| Symbol(rng.gen_range(0..k as u8))).collect())
                .collect();
            Box::new(samples.into_iter())
        }
    };
    let inner_mode = |i: u64| match mode {
        VerificationMode::Exhaustive => VerificationMode::Exhaustive,
        VerificationMode::Sampled { trials, seed } => VerificationMode::Sampled {
            trials: trials.min(256),
            seed: seed.wrapping_add(i + 1),
        },
    };
    let (mut checked, mut violations) = (0u64, 0u64);
    for (i, asg) in assignments.enumerate() {
        let shared = Pattern::from_cells(arm.iter().cloned().zip(asg));
        let sub = BlockingQuery::new(q.word.overlay(&shared), window.to_vec(), q.horizon);
        let cert = verify_blocking(ca, &sub, inner_mode(i as u64), opts)?;
        checked += 1;
        if !cert.is_blocking() {
            violations += 1;
        }
    }
    Ok((checked, violations))
}

/// Checks that, given a blocking word for a section of length at least
/// `Δ`, the dynamics on the vertebrae next to each arm only depends on
/// that arm. The window on each side is the `width` vertebrae adjacent to
/// the section.
pub fn check_disconnect(
    vz: &VZStructure,
    ca: &CellularAutomaton,
    q: &BlockingQuery,
    width: u64,
    mode: VerificationMode,
    opts: &VerifyOptions,
) -> Result<DisconnectReport> {
    let sec = vz.section_of(&q.region)?;
    let delta = vz.delta(ca)?;
    if sec.len() < delta {
        return Err(Error::precondition(format!(
            "section length {} is below delta {delta}",
            sec.len()
        )));
    }
    let cert = verify_blocking(ca, q, mode, opts)?;
    if !cert.is_blocking() {
        return Err(Error::precondition(
            "the word is not blocking for the section at this horizon",
        ));
    }
    let width = width.max(1) as i64;
    let right_window = Section::new(sec.b + 1, sec.b + width)?.elements(vz);
    let left_window = Section::new(sec.a - width, sec.a - 1)?.elements(vz);
    let (b, a) = (sec.b, sec.a);
    let (right_checked, right_violations) =
        disconnect_side(vz, ca, q, &right_window, &|p| p > b, mode, opts)?;
    let (left_checked, left_violations) =
        disconnect_side(vz, ca, q, &left_window, &|p| p < a, mode, opts)?;
    Ok(DisconnectReport {
        section: sec,
        delta,
        horizon: q.horizon,
        right_checked,
        left_checked,
        right_violations,
        left_violations,
    })
}

/// Glues two blocking words whose supports and regions are sections.
///
/// Requires `p_i ≤ a_i ≤ b_i ≤ q_i`, `q₁ < p₂`, `b₁ < a₂`, `l(V_i) ≥ Δ`,
/// equal horizons, both words verified blocking, and a filler agreeing with
/// both words. Returns the word `filler|_V_[p₁,q₂]` for `V_[a₁,b₂]`.
pub fn glue(
    vz: &VZStructure,
    ca: &CellularAutomaton,
    q1: &BlockingQuery,
    q2: &BlockingQuery,
    filler: &Configuration,
    opts: &VerifyOptions,
) -> Result<BlockingQuery> {
    let l1: Vec<GroupElement> = q1.word.support().cloned().collect();
    let l2: Vec<GroupElement> = q2.word.support().cloned().collect();
    let s1 = vz.section_of(&l1)?;
    let s2 = vz.section_of(&l2)?;
    let v1 = vz.section_of(&q1.region)?;
    let v2 = vz.section_of(&q2.region)?;
    for (i, (s, v)) in [(s1, v1), (s2, v2)].iter().enumerate() {
        if !(s.a <= v.a && v.b <= s.b) {
            return Err(Error::precondition(format!(
                "word {} must contain its region: need p <= a <= b <= q, got L=[{},{}], V=[{},{}]",
                i + 1,
                s.a,
                s.b,
                v.a,
                v.b
            )));
        }
    }
    if s1.b >= s2.a {
        return Err(Error::precondition(format!(
            "supports overlap: q1={} must be < p2={}",
            s1.b, s2.a
        )));
    }
    if v1.b >= v2.a {
        return Err(Error::precondition(format!(
            "regions overlap: b1={} must be < a2={}",
            v1.b, v2.a
        )));
    }
    let delta = vz.delta(ca)?;
    if v1.len() < delta || v2.len() < delta {
        return Err(Error::precondition(format!(
            "blocked sections must have length >= delta = {delta}"
        )));
    }
    if q1.horizon != q2.horizon {
        return Err(Error::precondition("both words must share the horizon"));
    }
    for (i, q) in [q1, q2].iter().enumerate() {
        if let Some((g, _)) = q.word.iter().find(|(g, s)| filler.value_at(g) != *s) {
            return Err(Error::precondition(format!(
                "filler disagrees with word {} at {g}",
                i + 1
            )));
        }
        let cert = verify_blocking(ca, q, VerificationMode::Exhaustive, opts)?;
        if !cert.is_blocking() {
            return Err(Error::precondition(format!(
                "word {} is not blocking at horizon {}",
                i + 1,
                q.horizon
            )));
        }
    }
    let support = Section::new(s1.a, s2.b)?.elements(vz);
    Ok(BlockingQuery {
        word: filler.materialize(&support),
        region: Section::new(v1.a, v2.b)?.elements(vz),
        horizon: q1.horizon,
    })
}

/// Blocking words on both arms, beyond `±k`.
#[derive(Clone, Debug)]
pub struct ArmWitnesses {
    pub left: BlockingQuery,
    pub right: BlockingQuery,
}

/// Picks, inside a configuration of period `n + 1` built from `q.word`
/// (supported on `V_[0,n]`), the nearest translated copies of the word lying
/// strictly beyond `-k` and `k`.
pub fn arm_witnesses_from_period(vz: &VZStructure, q: &BlockingQuery, k: u64) -> Result<ArmWitnesses> {
    let l: Vec<GroupElement> = q.word.support().cloned().collect();
    let sl = vz.section_of(&l)?;
    if sl.a != 0 {
        return Err(Error::precondition("period word must start at vertebra 0"));
    }
    let period = sl.b + 1;
    let k = k as i64;
    // Left copy [i, i+n] with i + n < -k, right copy [j, j+n] with j > k.
    let i = (-k - 1 - sl.b).div_euclid(period) * period;
    let j = (k.div_euclid(period) + 1) * period;
    let fam = vz.family();
    let shift = |d: i64| crate::blocking::translate_blocking(fam, &vz.phi_inv(d), q);
    Ok(ArmWitnesses {
        left: shift(i)?,
        right: shift(j)?,
    })
}

#[derive(Clone, Debug)]
pub struct EquicontinuityReport {
    pub k: u64,
    pub horizon: usize,
    pub delta: u64,
    pub glued: BlockingCertificate,
    /// Any `y` agreeing with `x` on this ball agrees with it on `B(1,k)`
    /// at every step up to the horizon.
    pub agreement_radius: u64,
    pub trials: u64,
    pub violations: u64,
}

impl EquicontinuityReport {
    pub fn passed(&self) -> bool {
        self.glued.is_blocking() && self.violations == 0
    }

    pub fn to_json(&self, alphabet: &crate::config::Alphabet) -> Value {
        json!({
            "k": self.k,
            "epsilon": 2f64.powi(-(self.k as i32)),
            "horizon": self.horizon,
            "delta": self.delta,
            "agreement_radius": self.agreement_radius,
            "delta_radius": 2f64.powi(-(self.agreement_radius as i32) - 1),
            "trials": self.trials,
            "violations": self.violations,
            "passed": self.passed(),
            "glued_certificate": self.glued.to_json(alphabet),
        })
    }
}

/// Finite-scale check that `x` is an equicontinuity point at precision
/// `2^{-k}`: the two arm witnesses must be words of `x` blocking sections
/// of length `> Δ` beyond `±k`; their glued word must be blocking at the
/// horizon and cover `B(1,k)`; then `trials` random `y` agreeing with `x`
/// on the glued support are evolved and compared on `B(1,k)`.
#[allow(clippy::too_many_arguments)]
pub fn equicontinuity_witness_check(
    vz: &VZStructure,
    ca: &CellularAutomaton,
    x: &Configuration,
    k: u64,
    witnesses: &ArmWitnesses,
    trials: u64,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<EquicontinuityReport> {
    let delta = vz.delta(ca)?;
    let ki = k as i64;
    let (ql, qr) = (&witnesses.left, &witnesses.right);
    let horizon = ql.horizon;
    let sl: Vec<GroupElement> = ql.word.support().cloned().collect();
    let sr: Vec<GroupElement> = qr.word.support().cloned().collect();
    let (ll, lr) = (vz.section_of(&sl)?, vz.section_of(&sr)?);
    let (vl, vr) = (vz.section_of(&ql.region)?, vz.section_of(&qr.region)?);
    if !(ll.b < -ki && vl.b < -ki && lr.a > ki && vr.a > ki) {
        return Err(Error::precondition(format!(
            "witnesses must lie beyond ±{k}: left L=[{},{}] V=[{},{}], right L=[{},{}] V=[{},{}]",
            ll.a, ll.b, vl.a, vl.b, lr.a, lr.b, vr.a, vr.b
        )));
    }
    if vl.len() <= delta || vr.len() <= delta {
        return Err(Error::precondition(format!(
            "witness sections must be longer than delta = {delta}"
        )));
    }
    let glued_q = glue(vz, ca, ql, qr, x, opts)?;
    let glued = verify_blocking(ca, &glued_q, VerificationMode::Exhaustive, opts)?;
    let ball = vz.ctx().ball(k)?;
    if let Some(g) = ball.iter().find(|g| !glued_q.region.contains(g)) {
        return Err(Error::precondition(format!(
            "glued region does not cover B(1,{k}) (missing {g})"
        )));
    }
    let fam = vz.family();
    let mut agreement_radius = 0;
    for g in glued_q.word.support() {
        agreement_radius = agreement_radius.max(vz.ctx().norm(g)?);
    }
    let reference = evolve(ca, x, &ball, horizon)?;
    let symbols: Vec<Symbol> = ca.alphabet().symbols().collect();
    let mut violations = 0;
    for t in 0..trials {
        let agree = x.materialize(&vz.ctx().ball(agreement_radius)?);
        let y = Configuration::noise(fam, agree, seed.wrapping_add(t), symbols.clone());
        let ev = evolve(ca, &y, &ball, horizon)?;
        if ev.frames != reference.frames {
            violations += 1;
        }
    }
    Ok(EquicontinuityReport {
        k,
        horizon,
        delta,
        glued,
        agreement_radius,
        trials,
        violations,
    })
}

/// Report of the whole equicontinuity construction on one blocking word.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    /// The word moved to `V_[0,n]` and extended by `0` to the full section.
    pub normalized: BlockingQuery,
    pub period: i64,
    pub periodicity_checked: u64,
    pub periodicity_violations: u64,
    /// `x|_L = u` for the normalized word.
    pub word_restored: bool,
    pub witnesses: ArmWitnesses,
    pub check: EquicontinuityReport,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.periodicity_violations == 0 && self.word_restored && self.check.passed()
    }

    pub fn to_json(&self, alphabet: &crate::config::Alphabet) -> Value {
        let span = |q: &BlockingQuery| {
            let ps: Vec<String> = q.word.support().map(|g| g.to_string()).collect();
            json!(ps)
        };
        json!({
            "normalized_word": self.normalized.to_json(alphabet),
            "period": self.period,
            "periodicity_checked": self.periodicity_checked,
            "periodicity_violations": self.periodicity_violations,
            "word_restored": self.word_restored,
            "left_witness": span(&self.witnesses.left),
            "right_witness": span(&self.witnesses.right),
            "check": self.check.to_json(alphabet),
            "passed": self.passed(),
        })
    }
}

/// From one blocking word to an equicontinuity witness: translate and
/// extend the word to `V_[0,n]`, repeat it with period `n+1`, check the
/// periodicity on `probes` random elements, pick arm copies beyond `±k`
/// and run [`equicontinuity_witness_check`].
#[allow(clippy::too_many_arguments)]
pub fn equicontinuity_pipeline(
    vz: &VZStructure,
    ca: &CellularAutomaton,
    q: &BlockingQuery,
    k: u64,
    probes: u64,
    trials: u64,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<PipelineReport> {
    let fam = vz.family();
    let support: Vec<i64> = q.word.support().map(|g| vz.project_p(g)).collect();
    let (Some(&a), Some(&b)) = (support.iter().min(), support.iter().max()) else {
        return Err(Error::precondition("empty blocking word"));
    };
    let mut full = q.word.clone();
    for g in Section::new(a, b)?.elements(vz) {
        if !full.contains(&g) {
            full.insert(g, Symbol(0));
        }
    }
    let extended = BlockingQuery::new(full, q.region.clone(), q.horizon);
    let normalized = crate::blocking::translate_blocking(fam, &vz.phi_inv(-a), &extended)?;
    let x = periodic_config_from_word(vz, &normalized.word)?;
    let period = b - a + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let shift = vz.phi_inv(period);
    for _ in 0..probes {
        let z = vz.phi_inv(rng.gen_range(-1_000_000..=1_000_000));
        let f = &vz.domain()[rng.gen_range(0..vz.domain().len())];
        let g = fam.multiply(&z, f)?;
        if x.value_at(&fam.multiply(&shift, &g)?) != x.value_at(&g) {
            violations += 1;
        }
    }
    let word_restored = normalized.word.iter().all(|(g, s)| x.value_at(g) == s);
    let witnesses = arm_witnesses_from_period(vz, &normalized, k)?;
    let check = equicontinuity_witness_check(vz, ca, &x, k, &witnesses, trials, seed, opts)?;
    Ok(PipelineReport {
        normalized,
        period,
        periodicity_checked: probes,
        periodicity_violations: violations,
        word_restored,
        witnesses,
        check,
    })
}
