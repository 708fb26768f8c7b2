//! Cross-checks between the algebraic code and the enumeration oracle.

use hexext::diagram::{
    compatible_isomorphism, extend_diagram, is_injective_module, obstruction, uniqueness_in,
    DiagramContext, DiagramError,
};
use hexext::ext::{class_of_ses, ext_module};
use hexext::fgmod::PresentedModule;
use hexext::generate::{case_rng, random_diagram, GeneratorConfig};
use hexext::linalg::{to_i64, RingSpec};
use hexext::oracle::{
    brute_equivalent, brute_injective, enumerate_extension_sequences, iso_types, EnumerationBudget,
    FinMap, FiniteModule,
};

const RINGS: [RingSpec; 3] = [RingSpec::IntegersMod(4), RingSpec::IntegersMod(8), RingSpec::IntegersMod(9)];

fn order(m: &PresentedModule) -> u64 {
    to_i64(&m.order().unwrap()).unwrap() as u64
}

fn types_up_to(ring: RingSpec, max: u64) -> Vec<PresentedModule> {
    (1..=max).flat_map(|n| iso_types(ring, n)).collect()
}

#[test]
fn equivalence_of_sequences_matches_class_equality() {
    let budget = EnumerationBudget::default();
    let mut pairs = 0;
    for ring in RINGS {
        let types = types_up_to(ring, 9);
        for q in &types {
            for p in &types {
                if order(q) * order(p) > 9 || order(q) == 1 || order(p) == 1 {
                    continue;
                }
                let ext = ext_module(1, q, p).unwrap();
                let seqs = enumerate_extension_sequences(q, p, &budget).unwrap();
                // stride keeps the quadratic pair count small
                let step = (seqs.len() / 12).max(1);
                let sample: Vec<_> = seqs.iter().step_by(step).collect();
                let classes: Vec<_> = sample.iter().map(|s| class_of_ses(&ext, s).unwrap()).collect();
                for (a, ca) in sample.iter().zip(&classes) {
                    for (b, cb) in sample.iter().zip(&classes) {
                        let brute = brute_equivalent(a, b, &budget).unwrap();
                        assert_eq!(brute, ca == cb, "{ring:?} Q {q:?} P {p:?}");
                        pairs += 1;
                    }
                }
            }
        }
    }
    assert!(pairs > 100);
}

#[test]
fn injectivity_matches_baer_criterion() {
    let budget = EnumerationBudget::default();
    let mut injective = 0;
    for ring in RINGS {
        for p in types_up_to(ring, 16) {
            let brute = brute_injective(&p, &budget).unwrap();
            assert_eq!(is_injective_module(&p), brute, "{ring:?} {p:?}");
            injective += brute as usize;
        }
    }
    assert!(injective >= 6);
}

#[test]
fn compatible_isomorphisms_are_bijections() {
    let budget = EnumerationBudget::default();
    let mut checked = 0;
    for ring in RINGS {
        let cfg = GeneratorConfig::new(ring, 16);
        for k in 0..120 {
            let d = random_diagram(&cfg, &mut case_rng(31, k));
            let ctx = DiagramContext::new(&d).unwrap();
            if !ctx.is_extendable() || !uniqueness_in(&ctx).unique {
                continue;
            }
            let Some(lifts) = ctx.enumerate_lifts().unwrap() else { continue };
            let a = ctx.extension_from_class(&lifts[0]);
            let b = ctx.extension_from_class(lifts.last().unwrap());
            let phi = compatible_isomorphism(&ctx, &a, &b).unwrap();
            let fa = FiniteModule::from_presented(&a.x, &budget).unwrap();
            let fb = FiniteModule::from_presented(&b.x, &budget).unwrap();
            let f = FinMap::from_morphism(&phi, &fb).unwrap();
            assert!(f.is_injective(&fa, &fb) && f.is_surjective(&fa, &fb), "{ring:?} case {k}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn refusal_carries_the_obstruction() {
    let mut refused = 0;
    for ring in RINGS {
        let cfg = GeneratorConfig::new(ring, 16);
        for k in 0..300 {
            let d = random_diagram(&cfg, &mut case_rng(37, k));
            match extend_diagram(&d) {
                Err(DiagramError::NotExtendable(r)) => {
                    let o = obstruction(&d).unwrap();
                    assert_eq!(r.baer_sum, o.baer_sum);
                    assert_eq!(r.yoneda_ef, o.yoneda_ef);
                    assert_eq!(r.yoneda_hg, o.yoneda_hg);
                    assert!(!o.is_zero);
                    refused += 1;
                }
                Ok(_) => assert!(obstruction(&d).unwrap().is_zero),
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(refused > 0);
}
