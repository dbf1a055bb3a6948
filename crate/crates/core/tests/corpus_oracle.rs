//! Independent brute force: every hom-size matrix, every full composition
//! table, associativity checked afterwards, isomorphism classes found by
//! trying every relabeling.

use std::collections::HashSet;

use catfrac::corpus::{for_each_category, CorpusSpec};
use catfrac::fincat::validate_category;

fn perms(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Number of isomorphism classes with `k` objects and `n` morphisms.
fn brute_count(k: usize, n: usize) -> usize {
    let mut classes = HashSet::new();
    // objects 0..k, morphism i < k is id(i)
    let mut ends: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for _ in k..n {
        let mut next = Vec::new();
        for e in &ends {
            for x in 0..k {
                for y in 0..k {
                    let mut e2 = e.clone();
                    e2.push((x, y));
                    next.push(e2);
                }
            }
        }
        ends = next;
    }
    for extra in ends {
        let mut src: Vec<usize> = (0..k).collect();
        let mut tgt: Vec<usize> = (0..k).collect();
        for &(x, y) in &extra {
            src.push(x);
            tgt.push(y);
        }
        let cells: Vec<(usize, usize)> = (k..n)
            .flat_map(|g| (k..n).map(move |f| (g, f)))
            .filter(|&(g, f)| tgt[f] == src[g])
            .collect();
        let choices: Vec<Vec<usize>> = cells
            .iter()
            .map(|&(g, f)| {
                (0..n)
                    .filter(|&h| src[h] == src[f] && tgt[h] == tgt[g])
                    .collect()
            })
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; cells.len()];
        loop {
            let mut comp = vec![usize::MAX; n * n];
            for g in 0..n {
                for f in 0..n {
                    if tgt[f] == src[g] {
                        comp[g * n + f] = if g < k {
                            f
                        } else if f < k {
                            g
                        } else {
                            usize::MAX
                        };
                    }
                }
            }
            for (i, &(g, f)) in cells.iter().enumerate() {
                comp[g * n + f] = choices[i][idx[i]];
            }
            let assoc = (0..n).all(|h| {
                (0..n).all(|g| {
                    (0..n).all(|f| {
                        tgt[f] != src[g]
                            || tgt[g] != src[h]
                            || comp[comp[h * n + g] * n + f] == comp[h * n + comp[g * n + f]]
                    })
                })
            });
            if assoc {
                classes.insert(canonical(k, n, &src, &tgt, &comp));
            }
            let mut i = 0;
            while i < idx.len() {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == idx.len() {
                break;
            }
        }
    }
    classes.len()
}

fn canonical(k: usize, n: usize, src: &[usize], tgt: &[usize], comp: &[usize]) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for op in perms(k) {
        for mp in perms(n - k) {
            // new index of morphism m
            let new = |m: usize| if m < k { op[m] } else { k + mp[m - k] };
            let mut code = vec![0; 2 * n + n * n];
            for m in 0..n {
                code[2 * new(m)] = op[src[m]];
                code[2 * new(m) + 1] = op[tgt[m]];
            }
            let ok = (0..k).all(|x| code[2 * x] == x && code[2 * x + 1] == x);
            if !ok {
                continue;
            }
            for g in 0..n {
                for f in 0..n {
                    let c = comp[g * n + f];
                    code[2 * n + new(g) * n + new(f)] =
                        if c == usize::MAX { usize::MAX } else { new(c) };
                }
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        }
    }
    best.unwrap()
}

#[test]
fn enumerator_matches_brute_force() {
    let st = for_each_category(CorpusSpec::new(4, 4), None, |c| {
        assert!(validate_category(c).is_valid());
        true
    })
    .unwrap();
    assert!(st.complete);
    for &(n, k, count) in &st.counts {
        assert_eq!(count, brute_count(k, n), "n = {n}, k = {k}");
    }
}

#[test]
fn five_morphisms_two_objects() {
    let st = for_each_category(CorpusSpec::new(2, 5), None, |_| true).unwrap();
    let got = st.counts.iter().find(|c| c.0 == 5 && c.1 == 2).unwrap().2;
    assert_eq!(got, brute_count(2, 5));
}

#[test]
fn deadline_stops_early() {
    let past = std::time::Instant::now();
    let st = for_each_category(CorpusSpec::new(3, 6), Some(past), |_| true).unwrap();
    assert!(!st.complete);
    assert!(st.stopped_at.is_some());
}

fn has_zero_object(c: &catfrac::FinCat) -> bool {
    c.objects().any(|z| {
        c.objects()
            .all(|x| c.hom(z, x).len() == 1 && c.hom(x, z).len() == 1)
    })
}

#[test]
fn pointed_restriction_matches_filtering() {
    let spec = CorpusSpec::new(3, 6);
    let mut filtered = 0;
    for_each_category(spec, None, |c| {
        filtered += has_zero_object(c) as usize;
        true
    })
    .unwrap();
    let mut pointed = 0;
    for_each_category(spec.pointed(), None, |c| {
        assert!(has_zero_object(c));
        pointed += 1;
        true
    })
    .unwrap();
    assert_eq!(pointed, filtered);
    assert!(pointed > 0);
}
