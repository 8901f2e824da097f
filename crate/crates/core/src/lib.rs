//! Basic CCS with flat iteration.
//!
//! The crate provides the term language ([`term`], [`syntax`]), its operational
//! semantics ([`semantics`]), five bisimulation equivalences and their rooted
//! congruences ([`equivalence`]), the axiom systems and an independent proof
//! checker ([`axioms`], [`proof`]), constructive normalization and saturation
//! ([`normalize`]), the translation to prefix iteration ([`rewrite`]), an
//! equational prover ([`prover`]) and elimination of CCS parallel composition
//! ([`parallel`]).

pub mod axioms;
pub mod equivalence;
pub mod error;
pub mod lemmas;
pub mod normalize;
pub mod parallel;
pub mod proof;
pub mod prover;
pub mod rewrite;
pub mod semantics;
pub mod syntax;
pub mod term;

pub use equivalence::RelKind;
pub use error::{Error, ParseError};
pub use syntax::{format_process, parse_process};
pub use term::{Action, Alpha, Label, Process, SumForm};
