//! Class properties against direct quantifier-by-quantifier definitions that
//! only use `src`, `tgt` and `try_compose`.

use std::sync::OnceLock;

use catfrac::corpus::{corpus, CorpusSpec};
use catfrac::fincat::FinCat;
use catfrac::morclass::{has_property, MorClass, Property};
use proptest::prelude::*;
use proptest::sample::Index;

fn cats() -> &'static [FinCat] {
    static C: OnceLock<Vec<FinCat>> = OnceLock::new();
    C.get_or_init(|| corpus(CorpusSpec::new(3, 6)).unwrap())
}

fn member(mask: u64, m: usize) -> bool {
    mask >> m & 1 == 1
}

fn comp(c: &FinCat, g: usize, f: usize) -> Option<usize> {
    c.try_compose(g, f)
}

fn is_iso(c: &FinCat, f: usize) -> bool {
    c.morphisms().any(|g| {
        let l = comp(c, g, f);
        let r = comp(c, f, g);
        matches!((l, r), (Some(l), Some(r)) if c.is_identity(l) && c.is_identity(r))
    })
}

fn multiplicative(c: &FinCat, s: u64) -> bool {
    let ids = c.objects().all(|x| member(s, c.id(x)));
    let closed = c.morphisms().all(|g| {
        c.morphisms()
            .all(|f| !(member(s, g) && member(s, f)) || comp(c, g, f).is_none_or(|h| member(s, h)))
    });
    ids && closed
}

fn strictly_multiplicative(c: &FinCat, s: u64) -> bool {
    multiplicative(c, s) && c.morphisms().all(|f| !is_iso(c, f) || member(s, f))
}

fn saturated(c: &FinCat, s: u64) -> bool {
    c.morphisms().all(|g| {
        c.morphisms().all(|f| match comp(c, g, f) {
            None => true,
            Some(h) => {
                [member(s, f), member(s, g), member(s, h)]
                    .iter()
                    .filter(|&&b| b)
                    .count()
                    != 2
            }
        })
    })
}

fn permutative(c: &FinCat, s: u64, t: u64) -> bool {
    let ms: Vec<usize> = c.morphisms().collect();
    ms.iter().all(|&a| {
        ms.iter().all(|&b| {
            if !member(s, a) || !member(t, b) || c.tgt(a) != c.tgt(b) {
                return true;
            }
            ms.iter().any(|&a2| {
                ms.iter().any(|&b2| {
                    member(s, a2)
                        && member(t, b2)
                        && c.src(a2) == c.src(b2)
                        && comp(c, b, a2).is_some()
                        && comp(c, b, a2) == comp(c, a, b2)
                })
            })
        })
    })
}

fn reversible(c: &FinCat, s: u64, t: u64) -> bool {
    let ms: Vec<usize> = c.morphisms().collect();
    ms.iter().all(|&a| {
        ms.iter().all(|&a2| {
            let parallel = c.src(a) == c.src(a2) && c.tgt(a) == c.tgt(a2);
            if !parallel || !member(t, a) || !member(t, a2) {
                return true;
            }
            let coequalized = ms.iter().any(|&b| {
                member(s, b) && comp(c, b, a).is_some() && comp(c, b, a) == comp(c, b, a2)
            });
            !coequalized
                || ms.iter().any(|&k| {
                    member(s, k) && comp(c, a, k).is_some() && comp(c, a, k) == comp(c, a2, k)
                })
        })
    })
}

fn cofinal(c: &FinCat, s: u64, t: u64) -> bool {
    let subset = c.morphisms().all(|m| !member(t, m) || member(s, m));
    subset
        && c.morphisms().filter(|&m| member(s, m)).all(|m| {
            c.morphisms()
                .any(|k| member(t, k) && comp(c, m, k).is_some_and(|h| member(t, h)))
        })
}

fn brute(c: &FinCat, p: Property, s: u64, t: u64) -> bool {
    let all = (1u64 << c.num_morphisms()) - 1;
    match p {
        Property::Multiplicative => multiplicative(c, s),
        Property::StrictlyMultiplicative => strictly_multiplicative(c, s),
        Property::Saturated => saturated(c, s),
        Property::RightPermutative => permutative(c, s, t),
        Property::RightReversible => reversible(c, s, t),
        Property::RightOre => permutative(c, s, t) && reversible(c, s, t),
        Property::RightLocalizing => {
            multiplicative(c, s) && permutative(c, s, all) && reversible(c, s, all)
        }
        Property::RightCofinal => cofinal(c, s, t),
    }
}

fn library(c: &FinCat, p: Property, s: u64, t: u64) -> bool {
    let (s, t) = (MorClass::from_mask(c, s), MorClass::from_mask(c, t));
    has_property(c, p, &s, Some(&t)).unwrap()
}

/// Random masks are rarely multiplicative, so half the draws are closed up.
fn closure(c: &FinCat, mut s: u64) -> u64 {
    for x in c.objects() {
        s |= 1 << c.id(x);
    }
    loop {
        let mut next = s;
        for g in c.morphisms().filter(|&g| member(s, g)) {
            for f in c.morphisms().filter(|&f| member(s, f)) {
                if let Some(h) = comp(c, g, f) {
                    next |= 1 << h;
                }
            }
        }
        if next == s {
            return s;
        }
        s = next;
    }
}

#[test]
fn every_property_on_small_categories_exhaustively() {
    for c in cats().iter().filter(|c| c.num_morphisms() <= 4) {
        let n = c.num_morphisms();
        for s in 0..1u64 << n {
            for t in 0..1u64 << n {
                for p in Property::ALL {
                    if !p.is_binary() && t > 0 {
                        continue;
                    }
                    assert_eq!(
                        library(c, p, s, t),
                        brute(c, p, s, t),
                        "{p} s={s:b} t={t:b} on {:?}",
                        c.mor_names()
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn properties_agree_with_definitions(i in any::<Index>(), s in any::<u64>(), t in any::<u64>(), close in any::<bool>()) {
        let c = &cats()[i.index(cats().len())];
        let n = c.num_morphisms();
        let keep = (1u64 << n) - 1;
        let (mut s, mut t) = (s & keep, t & keep);
        if close {
            s = closure(c, s);
            t = closure(c, t) & s;
        }
        for p in Property::ALL {
            prop_assert_eq!(library(c, p, s, t), brute(c, p, s, t), "{} s={:b} t={:b}", p, s, t);
        }
    }

    #[test]
    fn identities_localizing_and_all_saturated(i in any::<Index>()) {
        let c = &cats()[i.index(cats().len())];
        let ids = MorClass::identities(c);
        let all = MorClass::all(c);
        prop_assert!(has_property(c, Property::RightLocalizing, &ids, None).unwrap());
        prop_assert!(has_property(c, Property::StrictlyMultiplicative, &all, None).unwrap());
        prop_assert!(has_property(c, Property::Saturated, &all, None).unwrap());
    }
}
