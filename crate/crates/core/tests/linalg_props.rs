use hexext::linalg::{int, kernel_columns, snf, solve_linear, to_i64, ExactMatrix, Int, RingSpec};
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;

fn ring_strategy() -> impl Strategy<Value = RingSpec> {
    prop_oneof![
        Just(RingSpec::Integers),
        (2u64..=12).prop_map(RingSpec::IntegersMod),
    ]
}

fn matrix_strategy(max_dim: usize, bound: i64) -> impl Strategy<Value = (RingSpec, Vec<Vec<i64>>)> {
    (ring_strategy(), 1..=max_dim, 1..=max_dim).prop_flat_map(move |(ring, r, c)| {
        (
            Just(ring),
            prop::collection::vec(prop::collection::vec(-bound..=bound, c), r),
        )
    })
}

/// The ideal generated by `d`, as a canonical integer: `gcd(d, m)` over
/// `Z/m`, `|d|` over `Z`.
fn ideal(ring: RingSpec, d: &Int) -> Int {
    match ring.modulus_int() {
        Some(m) => d.gcd(&m),
        None => d.abs(),
    }
}

fn divides(a: &Int, b: &Int) -> bool {
    if a == &int(0) {
        b == &int(0)
    } else {
        (b % a) == int(0)
    }
}

/// Row additions `row_i += k row_j` and swaps, applied to the identity.
fn unimodular(ring: RingSpec, n: usize, ops: &[(usize, usize, i64)]) -> ExactMatrix {
    let mut u = ExactMatrix::identity(ring, n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        let mut e = ExactMatrix::identity(ring, n);
        if i == j {
            if n > 1 {
                let j = (i + 1) % n;
                e.set(i, i, int(0));
                e.set(j, j, int(0));
                e.set(i, j, int(1));
                e.set(j, i, int(1));
            }
        } else {
            e.set(i, j, int(k));
        }
        u = e.mul(&u);
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn snf_is_a_diagonal_factorisation((ring, rows) in matrix_strategy(4, 20)) {
        let a = ExactMatrix::from_rows(ring, &rows);
        let s = snf(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.mul(&s.u_inv), ExactMatrix::identity(ring, a.rows()));
        prop_assert_eq!(s.v.mul(&s.v_inv), ExactMatrix::identity(ring, a.cols()));
        for r in 0..s.d.rows() {
            for c in 0..s.d.cols() {
                if r != c {
                    prop_assert_eq!(s.d.get(r, c), &int(0));
                }
            }
        }
        let diag: Vec<Int> = s.diagonal().iter().map(|d| ideal(ring, d)).collect();
        for w in diag.windows(2) {
            prop_assert!(divides(&w[0], &w[1]), "{:?} not a divisor chain", diag);
        }
    }

    #[test]
    fn invariant_factors_survive_unimodular_change(
        (ring, rows) in matrix_strategy(4, 12),
        left in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..6),
        right in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..6),
    ) {
        let a = ExactMatrix::from_rows(ring, &rows);
        let u = unimodular(ring, a.rows(), &left);
        let v = unimodular(ring, a.cols(), &right).transpose();
        let b = u.mul(&a).mul(&v);
        let fa: Vec<Int> = snf(&a).diagonal().iter().map(|d| ideal(ring, d)).collect();
        let fb: Vec<Int> = snf(&b).diagonal().iter().map(|d| ideal(ring, d)).collect();
        prop_assert_eq!(fa, fb);
    }
}

fn all_vectors(m: i64, n: usize) -> Vec<Vec<Int>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..m).map(move |x| {
                    let mut w = v.clone();
                    w.push(int(x));
                    w
                })
            })
            .collect();
    }
    out
}

fn small_mod_matrix() -> impl Strategy<Value = (u64, Vec<Vec<i64>>, Vec<i64>)> {
    (2u64..=6, 1usize..=3, 1usize..=3).prop_flat_map(|(m, r, c)| {
        let e = 0..m as i64;
        (
            Just(m),
            prop::collection::vec(prop::collection::vec(e.clone(), c), r),
            prop::collection::vec(e, r),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solve_and_kernel_match_enumeration((m, rows, b) in small_mod_matrix()) {
        let ring = RingSpec::IntegersMod(m);
        let a = ExactMatrix::from_rows(ring, &rows);
        let b: Vec<Int> = b.into_iter().map(int).collect();
        let solutions: Vec<Vec<Int>> = all_vectors(m as i64, a.cols())
            .into_iter()
            .filter(|x| a.mul_vec(x) == b)
            .collect();
        let sol = solve_linear(&a, &b);
        match sol {
            Ok(s) => {
                prop_assert!(!solutions.is_empty());
                prop_assert_eq!(a.mul_vec(&s.particular), b.clone());
            }
            Err(_) => prop_assert!(solutions.is_empty()),
        }

        let k = kernel_columns(&a);
        prop_assert!(a.mul(&k).is_zero());
        let zero = vec![int(0); a.rows()];
        let kernel_size = all_vectors(m as i64, a.cols())
            .into_iter()
            .filter(|x| a.mul_vec(x) == zero)
            .count();
        let mut span: Vec<Vec<Int>> = all_vectors(m as i64, k.cols())
            .iter()
            .map(|c| k.mul_vec(c))
            .collect();
        span.sort();
        span.dedup();
        prop_assert_eq!(span.len(), kernel_size);
    }
}

#[test]
fn determinant_of_unimodular_is_a_unit() {
    let ring = RingSpec::Integers;
    let u = unimodular(ring, 4, &[(0, 1, 3), (2, 2, 0), (3, 0, -2), (1, 3, 5)]);
    let d = hexext::linalg::determinant(&u);
    assert_eq!(to_i64(&d).map(i64::abs), Some(1));
}
