//! Sentence derivation under two orderings of the grammatical levels:
//! D-structure, S-structure, LF (the T-model) and F-representation,
//! D-structure, S-structure (the P-model).

pub mod category;
pub mod corpus;
pub mod formal_lang;
pub mod frep;
pub mod gardenpath;
pub mod lexicon_cohort;
pub mod movement;
pub mod pipeline;
pub mod syntax_rep;

pub use category::Category;
