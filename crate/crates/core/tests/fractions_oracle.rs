//! Fractions categories against a direct span-equivalence count, on random
//! right-localizing classes of corpus categories.

use std::sync::{Arc, OnceLock};

use catfrac::corpus::{corpus, CorpusSpec};
use catfrac::fincat::FinCat;
use catfrac::fractions::{localize, q_inverts_check};
use catfrac::morclass::{has_property, MorClass, Property};
use proptest::prelude::*;
use proptest::sample::Index;

fn cats() -> &'static [Arc<FinCat>] {
    static C: OnceLock<Vec<Arc<FinCat>>> = OnceLock::new();
    C.get_or_init(|| {
        corpus(CorpusSpec::new(3, 6))
            .unwrap()
            .into_iter()
            .map(Arc::new)
            .collect()
    })
}

fn root(p: &mut [usize], mut i: usize) -> usize {
    while p[i] != i {
        i = p[i];
    }
    i
}

/// Spans `x ← z → y` with `S`-denominator, glued whenever a common refinement
/// with an `S`-denominator exists.
fn span_classes(c: &FinCat, s: &MorClass, x: usize, y: usize) -> usize {
    let spans: Vec<(usize, usize)> = c
        .morphisms()
        .filter(|&d| s.contains(d) && c.tgt(d) == x)
        .flat_map(|d| c.hom(c.src(d), y).iter().map(move |&f| (d, f)))
        .collect();
    let mut p: Vec<usize> = (0..spans.len()).collect();
    for (i, &(d, f)) in spans.iter().enumerate() {
        for (j, &(d2, f2)) in spans.iter().enumerate() {
            let glued = c.morphisms().any(|u| {
                c.tgt(u) == c.src(d)
                    && c.morphisms().any(|u2| {
                        c.tgt(u2) == c.src(d2)
                            && c.src(u) == c.src(u2)
                            && c.compose(d, u) == c.compose(d2, u2)
                            && s.contains(c.compose(d, u))
                            && c.compose(f, u) == c.compose(f2, u2)
                    })
            });
            if glued {
                let (a, b) = (root(&mut p, i), root(&mut p, j));
                p[a] = b;
            }
        }
    }
    (0..spans.len()).filter(|&i| root(&mut p, i) == i).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hom_sizes_match_span_classes(i in any::<Index>(), mask in any::<u64>()) {
        let c = &cats()[i.index(cats().len())];
        let mut s = MorClass::from_mask(c, mask);
        for x in c.objects() {
            s.insert(c.id(x));
        }
        prop_assume!(has_property(c, Property::RightLocalizing, &s, None).unwrap());
        let fr = localize(c, &s).unwrap();
        prop_assert!(q_inverts_check(&fr).is_holds());
        for x in c.objects() {
            for y in c.objects() {
                prop_assert_eq!(fr.cat.hom(x, y).len(), span_classes(c, &s, x, y));
            }
        }
    }

    #[test]
    fn inverting_identities_changes_nothing(i in any::<Index>()) {
        let c = &cats()[i.index(cats().len())];
        let fr = localize(c, &MorClass::identities(c)).unwrap();
        for x in c.objects() {
            for y in c.objects() {
                prop_assert_eq!(fr.cat.hom(x, y).len(), c.hom(x, y).len());
            }
        }
        let mut image = fr.q.mor_map.clone();
        image.sort_unstable();
        image.dedup();
        prop_assert_eq!(image.len(), c.num_morphisms());
    }
}
