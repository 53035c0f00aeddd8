mod common;

use proptest::prelude::*;

use svdyn::expansive::{certify_expansive, expansive_candidates, quantize, ExpansiveVerdict};
use svdyn::lifting::match_orbit;
use svdyn::orbits::{extend_orbit, rho, validate_orbit, ExtendPolicy, Flavor, TruncatedOrbitPoint};
use svdyn::shadowing::{decide_finite_shadowing, decide_shadowing_property, delta_candidates, PropertyLimits, Verdict};
use svdyn::space::{FiniteSet, FiniteSpace, Rational, TOL};
use svdyn::svmap::{example_3_11, modulus_chain, symmetrize, tent_family, Relation, System};
use svdyn::SeededRng;

fn relation() -> impl Strategy<Value = Relation> {
    (2usize..=5).prop_flat_map(|n| {
        (
            prop::collection::btree_set(0i64..24, n),
            prop::collection::vec(1usize..(1 << n), n),
        )
            .prop_filter_map("distinct positions", move |(pos, masks)| {
                if pos.len() != n {
                    return None;
                }
                let pos: Vec<Rational> = pos.into_iter().map(|p| Rational::new(p, 24)).collect();
                let space = FiniteSpace::on_line(&pos).ok()?;
                let images = masks.iter().map(|m| FiniteSet::new((0..n).filter(|b| m & (1 << b) != 0))).collect();
                Relation::new(space, images).ok()
            })
    })
}

fn with_sequence() -> impl Strategy<Value = (Relation, Vec<usize>)> {
    relation().prop_flat_map(|f| {
        let n = f.len();
        (Just(f), prop::collection::vec(0..n, 1..6))
    })
}

fn subset(n: usize) -> impl Strategy<Value = FiniteSet> {
    (1usize..(1 << n)).prop_map(move |m| FiniteSet::new((0..n).filter(|b| m & (1 << b) != 0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hausdorff_is_a_metric(f in relation(), seed in any::<u64>()) {
        let n = f.len();
        let s = f.space();
        let mut rng = SeededRng::new(seed);
        let mut pick = || {
            let extra = rng.below(n);
            FiniteSet::new((0..n).filter(|_| rng.below(2) == 1).chain([extra]))
        };
        let (a, b, c) = (pick(), pick(), pick());
        let ab = s.hausdorff(&a, &b).unwrap();
        prop_assert_eq!(ab, s.hausdorff(&b, &a).unwrap());
        prop_assert_eq!(ab == Rational::new(0, 1), a == b);
        prop_assert!(s.hausdorff(&a, &c).unwrap() <= ab + s.hausdorff(&b, &c).unwrap());
    }

    #[test]
    fn witnesses_validate_and_eps_is_monotone((f, xs) in with_sequence()) {
        let mut seen_shadowed = false;
        for e in common::eps_grid(&f) {
            let r = decide_finite_shadowing(&f, &xs, e).unwrap();
            let shadowed = r.verdict == Verdict::Shadowed;
            prop_assert!(!seen_shadowed || shadowed);
            seen_shadowed |= shadowed;
            if let Some(w) = r.witness {
                prop_assert!(validate_orbit(&f, &w));
                prop_assert!(w.iter().zip(&xs).all(|(&a, &b)| f.dist(a, b) < e));
            }
            prop_assert_eq!(shadowed, common::naive_shadowed(&f, &xs, e));
        }
    }

    #[test]
    fn property_is_monotone_in_delta(f in relation()) {
        for e in common::eps_grid(&f) {
            let holds: Vec<bool> = delta_candidates(&f, e)
                .into_iter()
                .map(|d| decide_shadowing_property(&f, e, d, PropertyLimits::default()).unwrap().verdict == Verdict::PropertyHolds)
                .collect();
            prop_assert!(holds.windows(2).all(|w| w[0] || !w[1]));
        }
    }

    #[test]
    fn expansiveness_is_monotone_in_delta(f in relation()) {
        let verdicts: Vec<bool> = expansive_candidates(&f)
            .into_iter()
            .map(|d| certify_expansive(&f, d).unwrap().verdict == ExpansiveVerdict::Expansive)
            .collect();
        prop_assert!(verdicts.windows(2).all(|w| w[0] || !w[1]));
    }

    #[test]
    fn inversion_is_an_involution(f in relation()) {
        if f.is_onto() {
            prop_assert_eq!(f.invert().unwrap().invert().unwrap(), f);
        } else {
            prop_assert!(f.invert().is_err());
        }
    }

    #[test]
    fn preimage_is_adjoint_to_image(f in relation(), a in subset(2)) {
        let pre = f.preimage(&a).unwrap();
        for x in 0..f.len() {
            let hits = f.image(x).iter().any(|y| a.contains(*y));
            prop_assert_eq!(pre.contains(x), hits);
        }
    }

    #[test]
    fn rho_is_symmetric_and_vanishes_on_the_diagonal(seed in any::<u64>()) {
        let f = symmetrize(&tent_family(2.0).unwrap()).unwrap();
        let mut rng = SeededRng::new(seed);
        let u = extend_orbit(&f, &[f.sample(&mut rng)], 12, ExtendPolicy::Seeded(rng.next_u64())).unwrap();
        let v = extend_orbit(&f, &[f.sample(&mut rng)], 12, ExtendPolicy::Seeded(rng.next_u64())).unwrap();
        let u = TruncatedOrbitPoint::new(&f, Flavor::Right, u.points).unwrap();
        let v = TruncatedOrbitPoint::new(&f, Flavor::Right, v.points).unwrap();
        prop_assert_eq!(rho(&f, &u, &u).unwrap().partial, 0.0);
        prop_assert_eq!(rho(&f, &u, &v).unwrap(), rho(&f, &v, &u).unwrap());
    }

    #[test]
    fn tent_preimages_invert_images(x in 0.0f64..2.0) {
        let f = tent_family(2.0).unwrap().into_map();
        for y in f.eval(x).unwrap().points() {
            let pre = f.preimage_points(y).unwrap();
            prop_assert!(pre.iter().any(|&p| (p - x).abs() <= 1e-6), "{x} not among {pre:?}");
        }
    }

    #[test]
    fn matched_orbits_stay_within_delta(seed in any::<u64>(), delta in 0.02f64..0.5) {
        let f = symmetrize(&tent_family(2.0).unwrap()).unwrap();
        let chain = modulus_chain(&f, delta).unwrap();
        let mut rng = SeededRng::new(seed);
        let y = f.sample(&mut rng);
        let x = f.perturb(y, chain.first(), &mut rng);
        let oy = extend_orbit(&f, &[y], chain.depth + 8, ExtendPolicy::Seeded(rng.next_u64())).unwrap();
        let u = TruncatedOrbitPoint::new(&f, Flavor::Right, oy.points).unwrap();
        let m = match_orbit(&f, x, &u, delta).unwrap();
        prop_assert!(rho(&f, &m, &u).unwrap().upper() <= delta);
    }
}

#[test]
fn quantized_images_are_within_half_a_step() {
    let e = example_3_11();
    for h in [2.0 / 32.0, 2.0 / 64.0, 2.0 / 128.0] {
        let q = quantize(&e, h).unwrap();
        for x in 0..q.len() {
            let xv: f64 = q.space().label(x).parse().unwrap();
            let exact = e.eval(xv).unwrap().points();
            let img: Vec<f64> = q.image(x).iter().map(|&y| q.space().label(y).parse().unwrap()).collect();
            assert!(img.iter().all(|&y| exact.iter().any(|&z| (z - y).abs() <= h / 2.0 + TOL)));
            assert!(exact.iter().all(|&z| img.iter().any(|&y| (z - y).abs() <= h / 2.0 + TOL)));
        }
    }
}

#[test]
fn quantized_certificates_agree_across_scales() {
    let e = example_3_11();
    for (h, delta) in [(2.0 / 64.0, 0.25), (2.0 / 128.0, 0.25), (2.0 / 64.0, 0.5)] {
        let coarse = certify_expansive(&quantize(&e, h).unwrap(), delta).unwrap().verdict;
        let fine = certify_expansive(&quantize(&e, h / 2.0).unwrap(), delta).unwrap().verdict;
        assert_eq!(coarse, fine, "h = {h}, δ = {delta}");
    }
}
