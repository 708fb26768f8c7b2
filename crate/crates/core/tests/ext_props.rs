use hexext::ext::{
    class_of_ses, connecting_hom, delta1_by_splice, ext_module, ladder_is_exact, ses_of_class,
    yoneda_product, ExtClass, ExtModule, SIGMA,
};
use hexext::fgmod::PresentedModule;
use hexext::generate::{case_rng, random_ses};
use hexext::linalg::{int, to_i64, Int, RingSpec};
use hexext::oracle::iso_types;
use proptest::prelude::*;
use rand::Rng;

fn order(m: &PresentedModule) -> u64 {
    to_i64(&m.order().expect("finite")).unwrap() as u64
}

fn types_up_to(ring: RingSpec, max: u64) -> Vec<PresentedModule> {
    (1..=max).flat_map(|n| iso_types(ring, n)).collect()
}

fn random_class<R: Rng>(ext: &ExtModule, rng: &mut R) -> ExtClass {
    let coords: Vec<Int> = ext
        .orders()
        .iter()
        .map(|o| int(rng.gen_range(0..to_i64(o).unwrap().max(1))))
        .collect();
    ext.class(&coords)
}

#[test]
fn every_class_survives_the_sequence_round_trip() {
    let mut checked = 0;
    for ring in [RingSpec::IntegersMod(4), RingSpec::IntegersMod(8), RingSpec::IntegersMod(9)] {
        let types = types_up_to(ring, 16);
        for q in &types {
            for p in &types {
                if order(q) * order(p) > 16 {
                    continue;
                }
                let ext = ext_module(1, q, p).unwrap();
                for c in ext.classes().unwrap() {
                    let s = ses_of_class(&c);
                    assert_eq!(class_of_ses(&ext, &s).unwrap(), c, "{ring:?} Q {q:?} P {p:?}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn ext2_vanishes_over_the_integers() {
    let z = RingSpec::Integers;
    let mut pool = types_up_to(z, 12);
    pool.push(PresentedModule::free(z, 1));
    pool.push(PresentedModule::diagonal(z, &[int(2), int(0)]));
    for q in &pool {
        for p in &pool {
            assert!(ext_module(2, q, p).unwrap().is_zero_module(), "Q {q:?} P {p:?}");
        }
    }
}

#[test]
fn long_exact_sequence_is_exact() {
    let rings = [RingSpec::IntegersMod(4), RingSpec::IntegersMod(8), RingSpec::IntegersMod(9), RingSpec::Integers];
    for k in 0..500u64 {
        let ring = rings[k as usize % 4];
        let pool = types_up_to(ring, 8);
        let mut rng = case_rng(11, k);
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
        let (a, c, p) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let s = random_ses(&c, &a, &mut rng);
        let h = connecting_hom(&s, &p).unwrap();
        assert!(ladder_is_exact(&h).unwrap(), "{ring:?} case {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// The cocycle product agrees with splicing up to the fixed sign.
    #[test]
    fn yoneda_product_matches_splice(r in 0usize..3, picks in prop::array::uniform3(0usize..32), seed in any::<u64>()) {
        let ring = [RingSpec::IntegersMod(4), RingSpec::IntegersMod(8), RingSpec::IntegersMod(9)][r];
        let pool = types_up_to(ring, 8);
        let [a, c, p] = picks.map(|i| pool[i % pool.len()].clone());
        let mut rng = case_rng(seed, 0);
        let e = random_class(&ext_module(1, &a, &p).unwrap(), &mut rng);
        let g = random_class(&ext_module(1, &c, &a).unwrap(), &mut rng);
        let ext2 = ext_module(2, &c, &p).unwrap();
        let product = yoneda_product(&e, &g, &ext2).unwrap();
        let spliced = delta1_by_splice(&e, &ses_of_class(&g), &ext2).unwrap();
        prop_assert_eq!(product, spliced.scale(&int(SIGMA)));
    }

    #[test]
    fn class_of_ses_is_additive_on_scalars(r in 0usize..4, picks in prop::array::uniform2(0usize..32), seed in any::<u64>(), k in -3i64..=3) {
        let ring = [RingSpec::IntegersMod(4), RingSpec::IntegersMod(8), RingSpec::IntegersMod(9), RingSpec::Integers][r];
        let pool = types_up_to(ring, 12);
        let [q, p] = picks.map(|i| pool[i % pool.len()].clone());
        let ext = ext_module(1, &q, &p).unwrap();
        let c = random_class(&ext, &mut case_rng(seed, 1));
        let kc = c.scale(&int(k));
        prop_assert_eq!(class_of_ses(&ext, &ses_of_class(&kc)).unwrap(), kc);
        prop_assert_eq!(c.add(&c.neg()), ext.zero());
    }
}
