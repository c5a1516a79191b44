use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::Category;
use crate::error::GrammarError;

/// An agreement feature: a bare attribute (`num`) or an attribute narrowed to
/// one value (`num.pl`). The bare form stands for the whole attribute, the
/// valued form for a subset of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgrFeature {
    pub attribute: String,
    pub value: Option<String>,
}

impl AgrFeature {
    pub fn bare(attribute: impl Into<String>) -> Self {
        AgrFeature {
            attribute: attribute.into(),
            value: None,
        }
    }

    pub fn valued(attribute: impl Into<String>, value: impl Into<String>) -> Self {
        AgrFeature {
            attribute: attribute.into(),
            value: Some(value.into()),
        }
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for AgrFeature {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || GrammarError::InvalidFeature(s.to_string());
        match s.split_once('.') {
            Some((attr, value)) if is_token(attr) && is_token(value) => {
                Ok(AgrFeature::valued(attr, value))
            }
            Some(_) => Err(bad()),
            None if is_token(s) => Ok(AgrFeature::bare(s)),
            None => Err(bad()),
        }
    }
}

impl fmt::Display for AgrFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Some(v) => write!(f, "{}.{}", self.attribute, v),
            None => f.write_str(&self.attribute),
        }
    }
}

/// A set of agreement features holding at most one entry per attribute.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AgrSet {
    features: BTreeMap<String, Option<String>>,
}

impl AgrSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set, failing if an attribute occurs twice.
    pub fn from_features<I>(features: I) -> Result<Self, GrammarError>
    where
        I: IntoIterator<Item = AgrFeature>,
    {
        let mut set = AgrSet::new();
        for f in features {
            if set.features.contains_key(&f.attribute) {
                return Err(GrammarError::DuplicateAttribute(f.attribute));
            }
            set.features.insert(f.attribute, f.value);
        }
        Ok(set)
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn contains_attribute(&self, attribute: &str) -> bool {
        self.features.contains_key(attribute)
    }

    pub fn get(&self, attribute: &str) -> Option<AgrFeature> {
        self.features.get(attribute).map(|v| AgrFeature {
            attribute: attribute.to_string(),
            value: v.clone(),
        })
    }

    /// Inserts or replaces the entry for the feature's attribute.
    pub fn set(&mut self, feature: AgrFeature) {
        self.features.insert(feature.attribute, feature.value);
    }

    pub fn iter(&self) -> impl Iterator<Item = AgrFeature> + '_ {
        self.features.iter().map(|(a, v)| AgrFeature {
            attribute: a.clone(),
            value: v.clone(),
        })
    }

    pub fn attributes(&self) -> impl Iterator<Item = &str> {
        self.features.keys().map(String::as_str)
    }

    /// The subset of features whose attribute satisfies `keep`.
    pub fn restrict<F: Fn(&str) -> bool>(&self, keep: F) -> AgrSet {
        AgrSet {
            features: self
                .features
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, v)| (a.clone(), v.clone()))
                .collect(),
        }
    }
}

impl FromIterator<AgrFeature> for AgrSet {
    /// Later features overwrite earlier ones with the same attribute.
    fn from_iter<T: IntoIterator<Item = AgrFeature>>(iter: T) -> Self {
        let mut set = AgrSet::new();
        for f in iter {
            set.set(f);
        }
        set
    }
}

impl fmt::Display for AgrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, feat) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{feat}")?;
        }
        f.write_str("}")
    }
}

/// `=X` selects and consumes the matched label; `+X` licenses it without
/// deleting it, which forces the licensed item into memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Select,
    License,
}

impl Polarity {
    pub fn symbol(self) -> char {
        match self {
            Polarity::Select => '=',
            Polarity::License => '+',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpectFeature {
    pub polarity: Polarity,
    pub category: Category,
}

impl ExpectFeature {
    pub fn select(category: Category) -> Self {
        ExpectFeature {
            polarity: Polarity::Select,
            category,
        }
    }

    pub fn license(category: Category) -> Self {
        ExpectFeature {
            polarity: Polarity::License,
            category,
        }
    }

    /// Whether an item labelled `label` can satisfy this expectation.
    pub fn accepts(&self, label: &Category) -> bool {
        label.refines(&self.category)
    }
}

impl FromStr for ExpectFeature {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let polarity = match s.chars().next() {
            Some('=') => Polarity::Select,
            Some('+') => Polarity::License,
            _ => return Err(GrammarError::InvalidFeature(s.to_string())),
        };
        let category = s[1..].parse()?;
        Ok(ExpectFeature { polarity, category })
    }
}

impl fmt::Display for ExpectFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.polarity.symbol(), self.category)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_features() {
        assert_eq!(
            "num.pl".parse::<AgrFeature>().unwrap(),
            AgrFeature::valued("num", "pl")
        );
        assert_eq!("per".parse::<AgrFeature>().unwrap(), AgrFeature::bare("per"));
        assert!("num.".parse::<AgrFeature>().is_err());
        assert!("a.b.c".parse::<AgrFeature>().is_err());

        let e: ExpectFeature = "+D".parse().unwrap();
        assert_eq!(e.polarity, Polarity::License);
        assert_eq!(e.to_string(), "+D");
        assert_eq!("=V.pp".parse::<ExpectFeature>().unwrap().to_string(), "=V.pp");
        assert!("D".parse::<ExpectFeature>().is_err());
    }

    #[test]
    fn agr_set_rejects_duplicate_attribute() {
        let r = AgrSet::from_features(vec![
            AgrFeature::valued("num", "s"),
            AgrFeature::valued("num", "p"),
        ]);
        assert!(matches!(r, Err(GrammarError::DuplicateAttribute(a)) if a == "num"));
    }

    #[test]
    fn agr_set_display_is_sorted() {
        let s: AgrSet = vec![AgrFeature::valued("per", "3"), AgrFeature::bare("gen")]
            .into_iter()
            .collect();
        assert_eq!(s.to_string(), "{gen, per.3}");
    }
}
