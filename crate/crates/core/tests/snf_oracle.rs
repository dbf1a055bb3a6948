//! Smith normal form against determinantal divisors: `d₁⋯d_k` is the gcd of
//! all `k × k` minors, computed here by permutation expansion.

use catfrac::linalg::{invariant_factors, rank, snf, IntMat};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut total = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] as i128 * det(&minor);
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

fn determinantal_divisor(a: &[Vec<i64>], k: usize) -> i128 {
    let (r, c) = (a.len(), a[0].len());
    let mut g = 0i128;
    for rs in subsets(r, k) {
        for cs in subsets(c, k) {
            let m: Vec<Vec<i64>> = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| a[i][j]).collect())
                .collect();
            g = g.gcd(&det(&m));
        }
    }
    g
}

fn by_minors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=a.len().min(a[0].len()) {
        let d = determinantal_divisor(a, k);
        if d == 0 {
            break;
        }
        out.push(BigInt::from(d / prev));
        prev = d;
    }
    out
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn smith_form_matches_minors(a in matrix()) {
        let m = IntMat::from_rows(&a);
        let s = snf(&m);
        prop_assert!(s.verify(&m));
        let expected = by_minors(&a);
        prop_assert_eq!(&s.diag, &expected);
        prop_assert_eq!(invariant_factors(&m), expected.clone());
        prop_assert_eq!(rank(&m), expected.len());
    }
}
