//! Nerve levels against direct chain enumeration, plus the chain-complex
//! identities every truncation must satisfy.

use std::sync::OnceLock;

use catfrac::corpus::{corpus, CorpusSpec};
use catfrac::fincat::FinCat;
use catfrac::nerve::{boundary, homology_of, nerve};
use proptest::prelude::*;
use proptest::sample::Index;

fn cats() -> &'static [FinCat] {
    static C: OnceLock<Vec<FinCat>> = OnceLock::new();
    C.get_or_init(|| corpus(CorpusSpec::new(3, 6)).unwrap())
}

/// Composable strings of `k` non-identity morphisms.
fn chains(c: &FinCat, k: usize) -> usize {
    if k == 0 {
        return c.num_objects();
    }
    let nonid: Vec<usize> = c.morphisms().filter(|&m| !c.is_identity(m)).collect();
    let mut ends: Vec<usize> = nonid.iter().map(|&m| c.tgt(m)).collect();
    for _ in 1..k {
        ends = ends
            .iter()
            .flat_map(|&y| {
                nonid
                    .iter()
                    .filter(move |&&m| c.src(m) == y)
                    .map(|&m| c.tgt(m))
            })
            .collect();
    }
    ends.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn levels_count_nondegenerate_chains(i in any::<Index>(), d in 1usize..4) {
        let c = &cats()[i.index(cats().len())];
        let n = nerve(c, d).unwrap();
        for k in 0..=d {
            prop_assert_eq!(n.count(k), chains(c, k), "level {}", k);
        }
        prop_assert_eq!(n.complete, chains(c, d + 1) == 0);
    }

    #[test]
    fn boundary_squares_to_zero(i in any::<Index>(), d in 2usize..4) {
        let c = &cats()[i.index(cats().len())];
        let n = nerve(c, d).unwrap();
        for k in 2..=d {
            prop_assert!(boundary(&n, k - 1).mul(&boundary(&n, k)).is_zero());
        }
    }
}

/// Loop-free categories have finite nerves, so the truncation sees everything.
#[test]
fn complete_nerves_have_matching_euler_characteristic() {
    let mut seen = 0;
    for c in cats().iter().filter(|c| chains(c, 5) == 0) {
        let n = nerve(c, 5).unwrap();
        assert!(n.complete);
        let h = homology_of(&n);
        let by_ranks: i64 = h
            .groups
            .iter()
            .enumerate()
            .map(|(k, g)| {
                if k % 2 == 0 {
                    g.rank as i64
                } else {
                    -(g.rank as i64)
                }
            })
            .sum();
        assert_eq!(n.euler_characteristic(), by_ranks);
        assert_eq!(h.groups[0].rank, components(c));
        seen += 1;
    }
    assert!(seen >= 15, "only {seen} loop-free categories");
}

fn components(c: &FinCat) -> usize {
    let mut p: Vec<usize> = c.objects().collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for m in c.morphisms() {
        let (a, b) = (root(&mut p, c.src(m)), root(&mut p, c.tgt(m)));
        p[a] = b;
    }
    (0..p.len()).filter(|&i| root(&mut p, i) == i).count()
}
