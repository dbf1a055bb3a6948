//! Decision procedures for morphism classes, categories of fractions,
//! categories with cofibrations and localized diagrams of abelian groups.

pub mod corpus;
pub mod diagcat;
pub mod error;
pub mod fincat;
pub mod fractions;
pub mod linalg;
pub mod morclass;
pub mod nerve;
pub mod verdict;
pub mod waldhausen;
pub mod zdiag;
pub mod zsuite;

pub use error::{Error, Result};
pub use fincat::{FinCat, Functor};
pub use morclass::{MorClass, Property};
pub use verdict::{Instance, Status, Verdict};
