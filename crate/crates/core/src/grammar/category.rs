use std::fmt;
use std::str::FromStr;

use crate::error::GrammarError;

/// A morphosyntactic category written as a dotted path, e.g. `V`, `V.pp`, `D.cl`.
///
/// Categories form a partial order under [`Category::refines`]: a longer path
/// refines every prefix of itself, so `=V` selects a `V.pp`-labelled item while
/// agreement parameters can still be keyed on `V.pp` alone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Category {
    segments: Vec<String>,
}

impl Category {
    pub fn new<I, S>(segments: I) -> Result<Self, GrammarError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(GrammarError::InvalidCategory(String::new()));
        }
        for s in &segments {
            if !is_segment(s) {
                return Err(GrammarError::InvalidCategory(segments.join(".")));
            }
        }
        Ok(Category { segments })
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    /// Number of path segments; a more refined category is deeper.
    pub fn depth(&self) -> usize {
        self.segments.len()
    }

    /// True iff `other`'s segments are a prefix of ours.
    pub fn refines(&self, other: &Category) -> bool {
        other.segments.len() <= self.segments.len()
            && other
                .segments
                .iter()
                .zip(&self.segments)
                .all(|(a, b)| a == b)
    }
}

/// Free-function form of [`Category::refines`].
pub fn refines(a: &Category, b: &Category) -> bool {
    a.refines(b)
}

fn is_segment(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Category {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(GrammarError::InvalidCategory(s.to_string()));
        }
        Category::new(s.split('.')).map_err(|_| GrammarError::InvalidCategory(s.to_string()))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}
