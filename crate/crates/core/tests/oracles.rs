// Worked examples checked against independent brute-force computations.

use std::collections::{BTreeSet, HashMap, VecDeque};

use groupca::blocking::{
    extend_restrict, search_blocking, verify_blocking, BlockingQuery, VerificationMode, VerifyOptions,
};
use groupca::config::{cantor_distance, CantorDistance};
use groupca::engine::{and_ca, dependency_region, identity_ca, xor_ca, xor_wall_ca};
use groupca::freeca::{classify_free, freeblock_ca, nonzero_set, obstacle_config, BETA, IOTA, ONE, ZERO};
use groupca::group::check_ball_inclusion;
use groupca::lift::{RectangleSpec, SubgroupEmbedding};
use groupca::vz::{periodic_config_from_word, Section, VZStructure};
use groupca::{evolve, Configuration, Family, GroupCtx, GroupElement, Pattern, Symbol};

fn int(n: i64) -> GroupElement {
    GroupElement::Int(n)
}

/// Norms by breadth-first search over the Cayley graph.
fn bfs_norms(ctx: &GroupCtx, radius: u64) -> HashMap<GroupElement, u64> {
    let mut seen = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(ctx.identity(), 0);
    queue.push_back(ctx.identity());
    while let Some(g) = queue.pop_front() {
        let d = seen[&g];
        if d == radius {
            continue;
        }
        for e in ctx.generators() {
            let h = ctx.multiply(&g, e).unwrap();
            if !seen.contains_key(&h) {
                seen.insert(h.clone(), d + 1);
                queue.push_back(h);
            }
        }
    }
    seen
}

#[test]
fn norms_match_bfs() {
    for fam in [
        Family::InfiniteDihedral,
        Family::DirectProduct { m: 3 },
        Family::Free { rank: 2 },
        Family::Integers,
    ] {
        let ctx = GroupCtx::new(fam);
        let bfs = bfs_norms(&ctx, 5);
        for (g, d) in &bfs {
            assert_eq!(ctx.norm(g).unwrap(), *d, "{fam} {g}");
        }
        let ball: BTreeSet<GroupElement> = ctx.ball(5).unwrap().into_iter().collect();
        let want: BTreeSet<GroupElement> = bfs.into_keys().collect();
        assert_eq!(ball, want, "{fam}");
    }
    let dinf = GroupCtx::new(Family::InfiniteDihedral);
    assert_eq!(dinf.norm(&dinf.parse_element("(-2,1)").unwrap()).unwrap(), 3);
}

#[test]
fn free_ball_closed_form() {
    let ctx = GroupCtx::free(2);
    for k in 0..=6u32 {
        assert_eq!(ctx.ball(k as u64).unwrap().len() as u64, 2 * 3u64.pow(k) - 1);
    }
}

#[test]
fn dihedral_inverse_by_solving() {
    let dinf = GroupCtx::new(Family::InfiniteDihedral);
    let g = dinf.parse_element("(3,1)").unwrap();
    let solution = dinf
        .ball(8)
        .unwrap()
        .into_iter()
        .find(|h| dinf.multiply(&g, h).unwrap() == dinf.identity())
        .unwrap();
    assert_eq!(dinf.inverse(&g).unwrap(), solution);
    assert_eq!(solution.to_string(), "(3,1)");
    let h = dinf.parse_element("(2,1)").unwrap();
    let k = dinf.parse_element("(3,0)").unwrap();
    assert_eq!(dinf.multiply(&h, &k).unwrap().to_string(), "(-1,1)");
}

#[test]
fn ball_inclusion_against_bfs() {
    let std = GroupCtx::integers();
    let other: GroupCtx = "z:2,3".parse().unwrap();
    // Smallest k2 with B1(1,k1) inside B2(1,k2), computed from BFS norms.
    let oracle = |a: &GroupCtx, b: &GroupCtx, k1: u64| {
        let nb = bfs_norms(b, 20);
        bfs_norms(a, k1).keys().map(|g| nb[g]).max().unwrap()
    };
    for k1 in 0..=4 {
        assert_eq!(check_ball_inclusion(&std, &other, k1).unwrap(), oracle(&std, &other, k1));
        assert_eq!(check_ball_inclusion(&other, &std, k1).unwrap(), oracle(&other, &std, k1));
    }
    assert_eq!(check_ball_inclusion(&std, &other, 1).unwrap(), 2);
    assert_eq!(check_ball_inclusion(&other, &std, 1).unwrap(), 3);
    assert_eq!(check_ball_inclusion(&std, &std, 5).unwrap(), 5);
}

#[test]
fn cantor_distance_examples() {
    let z = GroupCtx::integers();
    let x = Configuration::uniform(Family::Integers, Symbol(0));
    assert_eq!(cantor_distance(&z, &x, &x, 5).unwrap(), CantorDistance::AtMost { radius: 5 });
    let y = x.patched(&Pattern::single(int(-3), Symbol(1)));
    assert_eq!(cantor_distance(&z, &x, &y, 5).unwrap(), CantorDistance::Exact { k: 3 });
    assert_eq!(cantor_distance(&z, &x, &y, 5).unwrap().value(), 0.125);
}

#[test]
fn xor_pascal_row() {
    // Row t of Pascal's triangle mod 2, placed at offsets -t, -t+2, ..., t.
    let pascal = |t: usize| -> HashMap<i64, u8> {
        let mut row = vec![1u8];
        for _ in 0..t {
            let mut next = vec![0u8; row.len() + 1];
            for (i, v) in row.iter().enumerate() {
                next[i] ^= v;
                next[i + 1] ^= v;
            }
            row = next;
        }
        row.iter().enumerate().map(|(i, v)| (2 * i as i64 - t as i64, *v)).collect()
    };
    let z = GroupCtx::integers();
    let x = Configuration::with_base(Family::Integers, Pattern::single(int(0), Symbol(1)), Symbol(0));
    let window = z.ball(3).unwrap();
    let ev = evolve(&xor_ca(), &x, &window, 3).unwrap();
    for t in 0..=3 {
        let row = pascal(t);
        for (i, g) in window.iter().enumerate() {
            let want = row.get(&g.as_int().unwrap()).copied().unwrap_or(0);
            assert_eq!(ev.frames[t][i].0, want, "t={t} g={g}");
        }
    }
    let f3: BTreeSet<i64> = window
        .iter()
        .zip(&ev.frames[3])
        .filter(|(_, s)| s.0 == 1)
        .map(|(g, _)| g.as_int().unwrap())
        .collect();
    assert_eq!(f3, BTreeSet::from([-3, -1, 1, 3]));
}

#[test]
fn dependency_region_examples() {
    let z = GroupCtx::integers();
    let s: Vec<GroupElement> = (-1..=1).map(int).collect();
    let d = dependency_region(&z, &[int(0)], &s, 2).unwrap();
    assert_eq!(d, z.ball(2).unwrap());
    assert_eq!(dependency_region(&z, &[int(4)], &s, 0).unwrap(), vec![int(4)]);
    let f2 = GroupCtx::free(2);
    let nb = f2.ball(2).unwrap();
    assert_eq!(dependency_region(&f2, &[f2.identity()], &nb, 1).unwrap(), f2.ball(2).unwrap());
}

#[test]
fn apply_local_examples() {
    let x = Configuration::with_base(Family::Integers, Pattern::single(int(0), Symbol(1)), Symbol(0));
    assert_eq!(xor_ca().apply_local(&x, &int(1)).unwrap(), Symbol(1));
    assert_eq!(xor_ca().apply_local(&x, &int(0)).unwrap(), Symbol(0));
    assert_eq!(identity_ca(Family::Integers).apply_local(&x, &int(0)).unwrap(), Symbol(1));
}

/// Brute force over every exterior on the full cone, without the library's
/// enumeration order or pruning.
fn brute_blocking(ca: &groupca::CellularAutomaton, q: &BlockingQuery) -> bool {
    let z = GroupCtx::integers();
    let cone = dependency_region(&z, &q.region, ca.neighborhood(), q.horizon).unwrap();
    let ext: Vec<GroupElement> = cone.into_iter().filter(|g| !q.word.contains(g)).collect();
    let k = ca.alphabet().len() as u64;
    let mut reference = None;
    for idx in 0..k.pow(ext.len() as u32) {
        let mut rest = idx;
        let mut p = q.word.clone();
        for g in &ext {
            p.insert(g.clone(), Symbol((rest % k) as u8));
            rest /= k;
        }
        let cfg = Configuration::with_base(Family::Integers, p, Symbol(0));
        let frames = evolve(ca, &cfg, &q.region, q.horizon).unwrap().frames;
        match &reference {
            None => reference = Some(frames),
            Some(r) if *r != frames => return false,
            _ => {}
        }
    }
    true
}

#[test]
fn blocking_verdicts_match_brute_force() {
    let zeros = |r: std::ops::RangeInclusive<i64>| Pattern::from_cells(r.map(|n| (int(n), Symbol(0))));
    let cases = [
        (xor_ca(), BlockingQuery::new(zeros(-2..=2), vec![int(0)], 3)),
        (xor_ca(), BlockingQuery::new(zeros(-1..=1), vec![int(0)], 1)),
        (and_ca(), BlockingQuery::new(zeros(0..=0), vec![int(0)], 5)),
        (and_ca(), BlockingQuery::new(Pattern::single(int(0), Symbol(1)), vec![int(0)], 2)),
        (xor_wall_ca(), BlockingQuery::new(Pattern::single(int(0), Symbol(2)), vec![int(0)], 3)),
    ];
    for (ca, q) in cases {
        let want = brute_blocking(&ca, &q);
        for opts in [VerifyOptions::default(), VerifyOptions::enumeration_only()] {
            let c = verify_blocking(&ca, &q, VerificationMode::Exhaustive, &opts).unwrap();
            assert_eq!(c.is_blocking(), want, "{} {:?}", ca.name(), q.word);
        }
    }
}

#[test]
fn xor_counterexample_at_distance_three() {
    let word = Pattern::from_cells((-2..=2).map(|n| (int(n), Symbol(0))));
    let q = BlockingQuery::new(word, vec![int(0)], 3);
    let c = verify_blocking(&xor_ca(), &q, VerificationMode::Exhaustive, &VerifyOptions::default()).unwrap();
    let cx = c.verdict.counterexample().unwrap();
    let moved: Vec<i64> = c
        .exterior
        .iter()
        .zip(&cx.witness)
        .filter(|(_, s)| s.0 != 0)
        .map(|(g, _)| g.as_int().unwrap())
        .collect();
    assert!(moved.iter().all(|n| n.abs() == 3), "{moved:?}");
}

#[test]
fn extend_restrict_examples() {
    let opts = VerifyOptions::default();
    let q = BlockingQuery::new(Pattern::single(int(0), Symbol(0)), vec![int(0)], 6);
    let wider = Pattern::from_cells([(int(-1), Symbol(1)), (int(0), Symbol(0))]);
    let e = extend_restrict(&q, &wider, &[int(0)]).unwrap();
    assert!(verify_blocking(&and_ca(), &e, VerificationMode::Exhaustive, &opts).unwrap().is_blocking());
    let three = BlockingQuery::new(Pattern::from_cells((-1..=1).map(|n| (int(n), Symbol(0)))), (-1..=1).map(int).collect(), 4);
    let r = extend_restrict(&three, &three.word, &[int(0)]).unwrap();
    assert!(verify_blocking(&and_ca(), &three, VerificationMode::Exhaustive, &opts).unwrap().is_blocking());
    assert!(verify_blocking(&and_ca(), &r, VerificationMode::Exhaustive, &opts).unwrap().is_blocking());
}

#[test]
fn search_examples() {
    let z = GroupCtx::integers();
    let opts = VerifyOptions::default();
    let and = search_blocking(&z, &and_ca(), 0, 0, 8, VerificationMode::Exhaustive, &opts).unwrap();
    assert_eq!(and.query().unwrap().word, Pattern::single(int(0), Symbol(0)));
    let wall = search_blocking(&z, &xor_wall_ca(), 0, 0, 8, VerificationMode::Exhaustive, &opts).unwrap();
    assert_eq!(wall.query().unwrap().word, Pattern::single(int(0), Symbol(2)));
    let xor = search_blocking(&z, &xor_ca(), 1, 3, 6, VerificationMode::Exhaustive, &opts).unwrap();
    assert!(xor.all_refuted());
    let id = search_blocking(&z, &identity_ca(Family::Integers), 2, 2, 4, VerificationMode::Exhaustive, &opts).unwrap();
    assert_eq!(id.found.unwrap().0, 2);
}

#[test]
fn impact_by_enumeration() {
    let vz = VZStructure::new(GroupCtx::new(Family::InfiniteDihedral)).unwrap();
    let fam = vz.family();
    // imp(s) from the definition, with p read off as the first coordinate.
    let p = |g: &GroupElement| match g {
        GroupElement::Dih { n, .. } => *n,
        _ => unreachable!(),
    };
    for s in ["(0,1)", "(1,0)", "(-1,0)", "(0,0)"] {
        let s = fam.parse_element(s).unwrap();
        let want = vz.vertebra(0).iter().map(|g| (p(&fam.multiply(g, &s).unwrap()) - p(g)).unsigned_abs()).max().unwrap();
        assert_eq!(vz.impact(&s).unwrap(), want);
    }
    assert_eq!(vz.impact(&fam.parse_element("(0,1)").unwrap()).unwrap(), 0);
    assert_eq!(vz.impact(&fam.parse_element("(1,0)").unwrap()).unwrap(), 1);
    assert_eq!(VZStructure::new(GroupCtx::integers()).unwrap().delta(&xor_wall_ca()).unwrap(), 1);
}

#[test]
fn section_translate_examples() {
    let dinf = VZStructure::new(GroupCtx::new(Family::InfiniteDihedral)).unwrap();
    let h = dinf.family().parse_element("(3,0)").unwrap();
    assert_eq!(dinf.section_translate(&h, Section::new(0, 1).unwrap()).unwrap(), Section::new(3, 4).unwrap());
    let z = VZStructure::new(GroupCtx::integers()).unwrap();
    assert_eq!(z.section_translate(&int(-2), Section::new(1, 2).unwrap()).unwrap(), Section::new(-1, 0).unwrap());
    assert!(dinf.section_translate(&dinf.family().parse_element("(0,1)").unwrap(), Section::new(0, 0).unwrap()).is_err());
}

#[test]
fn periodic_examples() {
    let z = VZStructure::new(GroupCtx::integers()).unwrap();
    let u = Pattern::from_cells([(int(0), Symbol(0)), (int(1), Symbol(1)), (int(2), Symbol(2))]);
    let x = periodic_config_from_word(&z, &u).unwrap();
    assert_eq!(x.value_at(&int(7)), Symbol(1));
    assert_eq!(x.value_at(&int(-1)), Symbol(2));

    // m((2,ε)) = φ⁻¹(2 mod 2)·φ⁻¹(2)⁻¹·(2,ε) = (0,ε).
    let dinf = VZStructure::new(GroupCtx::new(Family::InfiniteDihedral)).unwrap();
    let fam = dinf.family();
    let cells: Vec<GroupElement> = Section::new(0, 1).unwrap().elements(&dinf);
    assert_eq!(cells.len(), 4);
    let u = Pattern::from_cells(cells.iter().enumerate().map(|(i, g)| (g.clone(), Symbol(i as u8))));
    let x = periodic_config_from_word(&dinf, &u).unwrap();
    for eps in ["0", "1"] {
        let at2 = fam.parse_element(&format!("(2,{eps})")).unwrap();
        let at0 = fam.parse_element(&format!("(0,{eps})")).unwrap();
        assert_eq!(x.value_at(&at2), u.get(&at0).unwrap());
    }
}

#[test]
fn coset_examples() {
    let emb = SubgroupEmbedding::new(2).unwrap();
    let g = |s: &str| emb.big().parse_element(s).unwrap();
    assert_eq!(emb.coset_rep(&g("aaa")).unwrap(), g(""));
    assert_eq!(emb.coset_rep(&g("baa")).unwrap(), g("b"));
    assert_eq!(emb.coset_rep(&g("ab")).unwrap(), g("ab"));
    assert_eq!(emb.decompose(&g("A")).unwrap(), (g(""), -1));
    assert_eq!(emb.omega(&g("aaaaa")).unwrap(), 0);
    assert_eq!(emb.omega(&g("baa")).unwrap(), 1);
    assert_eq!(emb.omega(&g("abAb")).unwrap(), 4);
    assert_eq!(emb.project_pi(&g("baa")).unwrap(), 2);
}

#[test]
fn coset_rep_is_norm_minimal() {
    // For each g, the shortest element of gH found by trying all a-powers.
    let emb = SubgroupEmbedding::new(2).unwrap();
    let fam = emb.big().family();
    for g in emb.big().ball(5).unwrap() {
        let best = (-12..=12)
            .map(|j| fam.multiply(&g, &emb.embed(&int(j)).unwrap()).unwrap())
            .min_by_key(|h| emb.big().norm(h).unwrap())
            .unwrap();
        let rep = emb.coset_rep(&g).unwrap();
        assert_eq!(emb.big().norm(&rep).unwrap(), emb.big().norm(&best).unwrap(), "{g}");
    }
}

#[test]
fn rectangles_by_definition() {
    let emb = SubgroupEmbedding::new(2).unwrap();
    for (k, l) in [(0, 2), (1, 1), (2, 0), (2, 2)] {
        let want: BTreeSet<GroupElement> = emb
            .big()
            .ball(k + l)
            .unwrap()
            .into_iter()
            .filter(|g| emb.omega(g).unwrap() <= k && emb.h_norm(g).unwrap() <= l)
            .collect();
        let got: BTreeSet<GroupElement> = emb.rectangle(RectangleSpec { k, l }).unwrap().into_iter().collect();
        assert_eq!(got, want, "k={k} l={l}");
    }
    let lambda = |k: u64| emb.big().ball(k).unwrap().iter().map(|g| emb.h_norm(g).unwrap()).max().unwrap();
    for k in 0..=3 {
        assert_eq!(emb.lambda_of(k).unwrap(), lambda(k));
    }
}

#[test]
fn pullback_examples() {
    let emb = SubgroupEmbedding::new(2).unwrap();
    let x = Configuration::with_base(Family::Integers, Pattern::single(int(2), Symbol(1)), Symbol(0));
    let xp = emb.pullback_config(&x).unwrap();
    let g = |s: &str| emb.big().parse_element(s).unwrap();
    assert_eq!(xp.value_at(&g("baa")), Symbol(1));
    assert_eq!(xp.value_at(&g("aa")), Symbol(1));
    assert_eq!(xp.value_at(&g("ba")), Symbol(0));
    for h in emb.big().ball(4).unwrap() {
        let want = if emb.project_pi(&h).unwrap() == 2 { Symbol(1) } else { Symbol(0) };
        assert_eq!(xp.value_at(&h), want);
    }
}

#[test]
fn obstacle_examples() {
    let c = obstacle_config(2, 3).unwrap();
    let ctx = GroupCtx::free(2);
    for g in ctx.sphere(2).unwrap() {
        assert_eq!(c.value_at(&g), BETA);
    }
    assert_eq!(c.value_at(&ctx.identity()), IOTA);
    for g in ctx.sphere(3).unwrap() {
        assert!(classify_free(&c, &g).unwrap());
    }
    let d: BTreeSet<GroupElement> = nonzero_set(&c, &ctx.ball(4).unwrap()).into_iter().collect();
    assert_eq!(d, ctx.ball(2).unwrap().into_iter().collect());
}

#[test]
fn single_one_spreads_to_the_unit_ball() {
    let f2 = Family::Free { rank: 2 };
    let ctx = GroupCtx::free(2);
    let x = Configuration::with_base(f2, Pattern::single(f2.identity(), ONE), ZERO);
    let ev = evolve(&freeblock_ca(2), &x, &ctx.ball(2).unwrap(), 1).unwrap();
    for (g, s) in ctx.ball(2).unwrap().iter().zip(&ev.frames[1]) {
        let want = if ctx.norm(g).unwrap() <= 1 { ONE } else { ZERO };
        assert_eq!(*s, want, "{g}");
    }
}
