//! Named sample diagrams and seeded random diagrams.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Diagram3x3, SequenceMaps};
use crate::ext::{ext_module, ses_of_class};
use crate::fgmod::{direct_sum, ModuleMorphism, PresentedModule, ShortExactSequence};
use crate::hexagon::{frame_from_diagram, padded_frame, HexagonFrame};
use crate::linalg::{int, ExactMatrix, Int, RingSpec};

fn mor(s: &PresentedModule, t: &PresentedModule, rows: &[Vec<i64>]) -> ModuleMorphism {
    ModuleMorphism::new(s.clone(), t.clone(), ExactMatrix::from_rows(s.ring(), rows)).expect("sample morphism")
}

pub fn split_maps(a: &PresentedModule, c: &PresentedModule) -> SequenceMaps {
    let s = direct_sum(a, c);
    SequenceMaps::new(s.injections[0].clone(), s.projections[1].clone())
}

fn nonsplit4(z2: &PresentedModule) -> SequenceMaps {
    let z4 = PresentedModule::free(z2.ring(), 1);
    SequenceMaps::new(mor(z2, &z4, &[vec![2]]), mor(&z4, z2, &[vec![1]]))
}

/// Over `Z/4` with every corner `Z/2`: the top row and right column are the
/// nonsplit `Z/4`, the other two sequences split. Not extendable.
pub fn example_a() -> Diagram3x3 {
    let z2 = PresentedModule::cyclic(RingSpec::IntegersMod(4), 2);
    Diagram3x3::new(nonsplit4(&z2), split_maps(&z2, &z2), split_maps(&z2, &z2), nonsplit4(&z2))
}

/// Over `Z/4`, every corner `Z/2`, every sequence split.
pub fn all_split() -> Diagram3x3 {
    let z2 = PresentedModule::cyclic(RingSpec::IntegersMod(4), 2);
    Diagram3x3::new(
        split_maps(&z2, &z2),
        split_maps(&z2, &z2),
        split_maps(&z2, &z2),
        split_maps(&z2, &z2),
    )
}

/// Over `Z`: `P = Z`, `R = Z/2`, `S = Z/3`, `Q = Z/6`.
pub fn integer_example() -> Diagram3x3 {
    let z = RingSpec::Integers;
    let zz = PresentedModule::free(z, 1);
    let z2 = PresentedModule::cyclic(z, 2);
    let z3 = PresentedModule::cyclic(z, 3);
    let z6 = PresentedModule::cyclic(z, 6);
    let z12 = PresentedModule::cyclic(z, 12);
    let z18 = PresentedModule::cyclic(z, 18);
    Diagram3x3::new(
        SequenceMaps::new(mor(&zz, &zz, &[vec![2]]), mor(&zz, &z2, &[vec![1]])),
        SequenceMaps::new(mor(&z3, &z18, &[vec![6]]), mor(&z18, &z6, &[vec![1]])),
        SequenceMaps::new(mor(&zz, &zz, &[vec![3]]), mor(&zz, &z3, &[vec![1]])),
        SequenceMaps::new(mor(&z2, &z12, &[vec![6]]), mor(&z12, &z6, &[vec![1]])),
    )
}

/// Over `Z/4` with `P = Z/4` injective and the other corners `Z/2`.
pub fn injective_example() -> Diagram3x3 {
    let r = RingSpec::IntegersMod(4);
    let z4 = PresentedModule::free(r, 1);
    let z2 = PresentedModule::cyclic(r, 2);
    Diagram3x3::new(
        split_maps(&z4, &z2),
        nonsplit4(&z2),
        split_maps(&z4, &z2),
        split_maps(&z2, &z2),
    )
}

/// `A1 = Z/4` mapping mod 2 onto the `P`-summands of the all-split diagram.
pub fn synthetic_frame() -> HexagonFrame {
    let r = RingSpec::IntegersMod(4);
    let z2 = PresentedModule::cyclic(r, 2);
    let z4 = PresentedModule::free(r, 1);
    let f = frame_from_diagram(&all_split());
    let m = mor(&z4, &z2, &[vec![1]]);
    HexagonFrame {
        alpha: f.alpha.compose(&m),
        beta: f.beta.compose(&m),
        ..f
    }
}

/// The synthetic frame with an extra `Z/2` summand in `A1` and in `A4`.
pub fn padded_synthetic_frame() -> HexagonFrame {
    let k = PresentedModule::cyclic(RingSpec::IntegersMod(4), 2);
    padded_frame(&synthetic_frame(), &k, &k)
}

/// A frame whose folded diagram has `P = Z/4`, injective over `Z/4`.
pub fn injective_frame() -> HexagonFrame {
    let r = RingSpec::IntegersMod(4);
    let z2 = PresentedModule::cyclic(r, 2);
    let z4 = PresentedModule::free(r, 1);
    let d = Diagram3x3::new(
        split_maps(&z4, &z2),
        nonsplit4(&z2),
        split_maps(&z4, &z2),
        nonsplit4(&z2),
    );
    frame_from_diagram(&d)
}

/// The frame of the non-extendable sample diagram.
pub fn obstructed_frame() -> HexagonFrame {
    frame_from_diagram(&example_a())
}

/// Per-case generator: case `k` of seed `s` uses ChaCha8 stream `k`.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub ring: RingSpec,
    /// Bound on `|E|, |H|, |F|, |G|` (torsion part over `Z`).
    pub max_order: u64,
    /// Probability that a corner over `Z` carries a free summand.
    pub free_rate: f64,
}

impl GeneratorConfig {
    pub fn new(ring: RingSpec, max_order: u64) -> Self {
        GeneratorConfig {
            ring,
            max_order,
            free_rate: 0.3,
        }
    }
}

fn prime_powers(ring: RingSpec, bound: u64) -> Vec<u64> {
    let mut out = vec![1];
    let primes: Vec<u64> = match ring {
        RingSpec::IntegersMod(m) => (2..=m).filter(|p| m % p == 0 && (2..*p).all(|d| p % d != 0)).collect(),
        RingSpec::Integers => vec![2, 3],
    };
    for p in primes {
        let mut q = p;
        while q <= bound {
            out.push(q);
            q *= p;
        }
    }
    out
}

/// Invariant factors of a random module of order `n` over `ring`.
fn random_orders<R: Rng>(ring: RingSpec, n: u64, rng: &mut R) -> Vec<Int> {
    let cap = ring.modulus().unwrap_or(u64::MAX);
    let mut left = n;
    let mut orders = Vec::new();
    while left > 1 {
        let choices: Vec<u64> = (2..=left)
            .filter(|d| left % d == 0 && (cap == u64::MAX || cap % d == 0))
            .collect();
        let d = choices[rng.gen_range(0..choices.len())];
        orders.push(int(d as i64));
        left /= d;
    }
    orders
}

/// Relations `U · diag(orders)` for a random unimodular `U`.
fn scrambled<R: Rng>(ring: RingSpec, orders: &[Int], free: usize, rng: &mut R) -> PresentedModule {
    let g = orders.len() + free;
    let diag = ExactMatrix::diagonal(ring, g, orders.len(), orders);
    if g < 2 {
        return PresentedModule::new(ring, g, diag).expect("diagonal presentation");
    }
    let mut u = ExactMatrix::identity(ring, g);
    for _ in 0..rng.gen_range(0..3) {
        let i = rng.gen_range(0..g);
        let j = (i + rng.gen_range(1..g)) % g;
        let c = int(rng.gen_range(-2..=2));
        let mut e = ExactMatrix::identity(ring, g);
        e.set(i, j, c);
        u = e.mul(&u);
    }
    PresentedModule::new(ring, g, u.mul(&diag)).expect("scrambled presentation")
}

fn random_module<R: Rng>(cfg: &GeneratorConfig, order: u64, rng: &mut R) -> PresentedModule {
    let orders = random_orders(cfg.ring, order, rng);
    let free = usize::from(cfg.ring.is_integers() && rng.gen_bool(cfg.free_rate));
    scrambled(cfg.ring, &orders, free, rng)
}

/// A random extension of `p` by `q`: zero with probability one third.
pub fn random_ses<R: Rng>(q: &PresentedModule, p: &PresentedModule, rng: &mut R) -> ShortExactSequence {
    let ext = ext_module(1, q, p).expect("Ext¹ of matching rings");
    let coords: Vec<Int> = if rng.gen_bool(1.0 / 3.0) {
        vec![int(0); ext.generators()]
    } else {
        ext.orders()
            .iter()
            .map(|o| {
                let o = crate::linalg::to_i64(o).unwrap_or(0);
                if o == 0 {
                    int(rng.gen_range(-3..=3))
                } else {
                    int(rng.gen_range(0..o))
                }
            })
            .collect()
    };
    ses_of_class(&ext.class(&coords))
}

fn maps(s: &ShortExactSequence) -> SequenceMaps {
    SequenceMaps::new(s.inject().clone(), s.project().clone())
}

/// A random valid diagram: random corners, then a random class for each
/// of the four sequences.
pub fn random_diagram<R: Rng>(cfg: &GeneratorConfig, rng: &mut R) -> Diagram3x3 {
    let powers = prime_powers(cfg.ring, cfg.max_order);
    let (p, r, s, q) = loop {
        let mut pick = || powers[rng.gen_range(0..powers.len())];
        let (p, r, s, q) = (pick(), pick(), pick(), pick());
        let ok = [p * r, p * s, r * q, s * q].iter().all(|&n| n <= cfg.max_order);
        if ok {
            break (p, r, s, q);
        }
    };
    let p = random_module(cfg, p, rng);
    let r = random_module(cfg, r, rng);
    let s = random_module(cfg, s, rng);
    let q = random_module(cfg, q, rng);
    let row_top = random_ses(&r, &p, rng);
    let col_left = random_ses(&s, &p, rng);
    let col_right = random_ses(&q, &r, rng);
    let row_bottom = random_ses(&q, &s, rng);
    Diagram3x3::new(maps(&row_top), maps(&row_bottom), maps(&col_left), maps(&col_right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::validate_diagram1;

    #[test]
    fn samples_are_valid() {
        for d in [example_a(), all_split(), integer_example(), injective_example()] {
            assert!(validate_diagram1(&d).is_empty());
        }
    }

    #[test]
    fn random_diagrams_are_valid_and_reproducible() {
        for ring in [RingSpec::IntegersMod(4), RingSpec::IntegersMod(9), RingSpec::Integers] {
            let cfg = GeneratorConfig::new(ring, 16);
            for k in 0..20 {
                let d = random_diagram(&cfg, &mut case_rng(3, k));
                assert!(validate_diagram1(&d).is_empty(), "{ring:?} case {k}");
                let again = random_diagram(&cfg, &mut case_rng(3, k));
                assert_eq!(format!("{d:?}"), format!("{again:?}"));
                if let Some(m) = ring.modulus() {
                    for x in [d.e(), d.h(), d.f(), d.g()] {
                        assert!(x.order().unwrap() <= int(16) && m > 0);
                    }
                }
            }
        }
    }
}
