use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use catfrac::corpus::{corpus, CorpusSpec};
use catfrac::fractions::localize;
use catfrac::linalg::snf;
use catfrac::morclass::{has_property, MorClass, Property};
use catfrac::nerve::homology;
use catfrac::zdiag::{hom_group, random_diagram};
use catfrac_bench::{dense_matrix, small_corpus};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn enumeration(c: &mut Criterion) {
    c.bench_function("corpus <=2 objects <=5 morphisms", |b| {
        b.iter(|| corpus(black_box(CorpusSpec::new(2, 5))).unwrap().len())
    });
}

fn class_properties(c: &mut Criterion) {
    let cats = small_corpus(2, 4);
    c.bench_function("every property on every class, <=4 morphisms", |b| {
        b.iter(|| {
            let mut holds = 0usize;
            for cat in &cats {
                for mask in 0..1u64 << cat.num_morphisms() {
                    let s = MorClass::from_mask(cat, mask);
                    for p in Property::ALL {
                        holds += has_property(cat, p, &s, Some(&s)).unwrap() as usize;
                    }
                }
            }
            holds
        })
    });
}

fn fractions(c: &mut Criterion) {
    let cats = small_corpus(3, 5);
    c.bench_function("localize at the identities, <=5 morphisms", |b| {
        b.iter(|| {
            cats.iter()
                .map(|cat| {
                    localize(cat, &MorClass::identities(cat))
                        .unwrap()
                        .cat
                        .num_morphisms()
                })
                .sum::<usize>()
        })
    });
}

fn smith(c: &mut Criterion) {
    let a = dense_matrix(12);
    c.bench_function("smith normal form 12x12", |b| {
        b.iter(|| snf(black_box(&a)).rank)
    });
}

fn nerves(c: &mut Criterion) {
    let cats = small_corpus(3, 5);
    c.bench_function("nerve homology to degree 2, <=5 morphisms", |b| {
        b.iter(|| {
            cats.iter()
                .map(|cat| homology(cat, 3).unwrap().groups.len())
                .sum::<usize>()
        })
    });
}

fn diagram_homs(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs: Vec<_> = (0..20)
        .map(|_| {
            (
                random_diagram(&mut rng, &[1, 1]).unwrap(),
                random_diagram(&mut rng, &[1, 1]).unwrap(),
            )
        })
        .collect();
    c.bench_function("square diagram homs", |b| {
        b.iter(|| {
            pairs
                .iter()
                .map(|(x, y)| hom_group(x, y).unwrap().basis.len())
                .sum::<usize>()
        })
    });
}

criterion_group!(
    benches,
    enumeration,
    class_properties,
    fractions,
    smith,
    nerves,
    diagram_homs
);
criterion_main!(benches);
