use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Syntactic category tag shared by lexical referents and lexicon entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    N,
    V,
    /// Quantifier word ("everyone").
    Q,
    /// Interrogative word ("who").
    WH,
    DET,
    P,
    /// Auxiliary ("did").
    AUX,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::N,
        Category::V,
        Category::Q,
        Category::WH,
        Category::DET,
        Category::P,
        Category::AUX,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::N => "N",
            Category::V => "V",
            Category::Q => "Q",
            Category::WH => "WH",
            Category::DET => "DET",
            Category::P => "P",
            Category::AUX => "AUX",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}
