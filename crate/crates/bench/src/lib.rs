//! Benchmark fixtures.

use std::sync::Arc;

use catfrac::corpus::{corpus, CorpusSpec};
use catfrac::fincat::FinCat;
use catfrac::linalg::IntMat;

pub fn small_corpus(max_objects: usize, max_morphisms: usize) -> Vec<Arc<FinCat>> {
    corpus(CorpusSpec::new(max_objects, max_morphisms))
        .expect("corpus fits the size cap")
        .into_iter()
        .map(Arc::new)
        .collect()
}

/// A dense `n × n` integer matrix with entries in `[-9, 9]` from a fixed linear congruential stream.
pub fn dense_matrix(n: usize) -> IntMat {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state = state
                        .wrapping_mul(6_364_136_223_846_793_005)
                        .wrapping_add(1_442_695_040_888_963_407);
                    (state >> 33) as i64 % 19 - 9
                })
                .collect()
        })
        .collect();
    IntMat::from_rows(&rows)
}
