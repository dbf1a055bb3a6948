//! Diagram homs against closed-form counts and naturality replayed square by
//! square; weak-equivalence witnesses replayed against the torsion criterion.

use catfrac::linalg::AbInvariants;
use catfrac::zdiag::{
    hom_group, is_weq, random_diagram, recursive_matches_flat, weq_witness, witness_replay,
    DiagMor, DiagObj, FgAb, MultSetZ,
};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn natural(f: &DiagMor) -> bool {
    let (x, y) = (&f.src, &f.tgt);
    (0..x.num_points()).all(|p| {
        (0..x.shape.len()).all(|axis| match x.succ(p, axis) {
            None => true,
            Some(q) => {
                y.edge(p, axis).after(&f.comps[p]).unwrap()
                    == f.comps[q].after(x.edge(p, axis)).unwrap()
            }
        })
    })
}

fn shape(k: usize) -> Vec<usize> {
    [vec![], vec![1], vec![1, 1]][k].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// `Hom(Z^a ⊕ Z/m, Z^b ⊕ Z/n) = Z^{ab} ⊕ (Z/n)^a ⊕ Z/gcd(m, n)`.
    #[test]
    fn point_homs_have_closed_form(a in 0usize..3, b in 0usize..3, m in 2i64..9, n in 2i64..9) {
        let x = DiagObj::point(FgAb::of(a, &[m]).unwrap());
        let y = DiagObj::point(FgAb::of(b, &[n]).unwrap());
        let h = hom_group(&x, &y).unwrap();
        let mut orders = vec![BigInt::from(0); a * b];
        orders.extend(std::iter::repeat_n(BigInt::from(n), a));
        orders.push(BigInt::from(m.gcd(&n)));
        prop_assert_eq!(h.group.invariants(), AbInvariants::from_cyclic_orders(&orders));
    }

    #[test]
    fn hom_elements_are_natural(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sh = shape(k);
        let x = random_diagram(&mut rng, &sh).unwrap();
        let y = random_diagram(&mut rng, &sh).unwrap();
        prop_assert!(recursive_matches_flat(&x, &y).unwrap());
        let h = hom_group(&x, &y).unwrap();
        for f in h.basis.iter().chain(h.sample(1, 40).unwrap().iter()) {
            prop_assert!(natural(f));
            prop_assert!(h.coords(f).is_some());
        }
    }

    #[test]
    fn witnesses_replay_and_agree_with_torsion(seed in any::<u64>(), k in 0usize..3, inv in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sh = shape(k);
        let s = MultSetZ::new(&[[2i64, 3, 6][inv]]).unwrap();
        let x = random_diagram(&mut rng, &sh).unwrap();
        let y = random_diagram(&mut rng, &sh).unwrap();
        let h = hom_group(&x, &y).unwrap();
        for f in h.sample(2, 30).unwrap().iter().chain([DiagMor::identity(&x)].iter()) {
            match weq_witness(f, &s, 4).unwrap() {
                Some(w) => {
                    prop_assert!(witness_replay(f, &w).unwrap());
                    prop_assert!(is_weq(f, &s));
                }
                None => prop_assert!(f.src != f.tgt || *f != DiagMor::identity(&x)),
            }
        }
    }
}
