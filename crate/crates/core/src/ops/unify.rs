use std::collections::BTreeSet;
use std::fmt;

use crate::grammar::{AgrFeature, AgrSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnifyConflict {
    pub attribute: String,
    pub left: String,
    pub right: String,
}

impl fmt::Display for UnifyConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}.{} vs {}.{}",
            self.attribute, self.attribute, self.left, self.attribute, self.right
        )
    }
}

/// Attribute-wise unification returning the most specific feature for each
/// attribute either side mentions.
///
/// A valued feature is a subset of its bare attribute, so `num ⊔ num.pl =
/// num.pl`; two different values of one attribute do not intersect.
pub fn op_unify(a: &AgrSet, b: &AgrSet) -> Result<AgrSet, UnifyConflict> {
    let attrs: BTreeSet<&str> = a.attributes().chain(b.attributes()).collect();
    let mut out = AgrSet::new();
    for attr in attrs {
        let merged = match (a.get(attr), b.get(attr)) {
            (Some(x), None) | (None, Some(x)) => x,
            (Some(x), Some(y)) => match (&x.value, &y.value) {
                (Some(u), Some(v)) if u != v => {
                    return Err(UnifyConflict {
                        attribute: attr.to_string(),
                        left: u.clone(),
                        right: v.clone(),
                    })
                }
                (Some(_), _) => x,
                (None, _) => y,
            },
            (None, None) => unreachable!(),
        };
        out.set(AgrFeature {
            attribute: attr.to_string(),
            value: merged.value,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn set(s: &[&str]) -> AgrSet {
        AgrSet::from_features(s.iter().map(|f| f.parse().unwrap())).unwrap()
    }

    #[test]
    fn unify_table() {
        assert_eq!(op_unify(&set(&["num"]), &set(&["num.pl"])).unwrap(), set(&["num.pl"]));
        assert_eq!(op_unify(&set(&[]), &set(&["num.pl"])).unwrap(), set(&["num.pl"]));
        assert_eq!(
            op_unify(&set(&["gen.f"]), &set(&["num.pl"])).unwrap(),
            set(&["gen.f", "num.pl"])
        );
        let err = op_unify(&set(&["gen.f", "num.sg"]), &set(&["num.pl"])).unwrap_err();
        assert_eq!(err.attribute, "num");
    }

    /// Oracle: each feature denotes a set of values drawn from a finite
    /// universe (the bare attribute denotes the whole universe). Unification
    /// intersects attribute-wise; an empty intersection is a failure, a full
    /// one maps back to the bare attribute.
    fn oracle(a: &AgrSet, b: &AgrSet) -> Option<AgrSet> {
        let mut universe: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for f in a.iter().chain(b.iter()) {
            let u = universe.entry(f.attribute.clone()).or_default();
            if let Some(v) = f.value {
                u.insert(v);
            }
            u.insert("#other".to_string());
        }
        let denote = |s: &AgrSet, attr: &str| -> BTreeSet<String> {
            match s.get(attr) {
                None => universe[attr].clone(),
                Some(AgrFeature { value: None, .. }) => universe[attr].clone(),
                Some(AgrFeature { value: Some(v), .. }) => [v].into(),
            }
        };
        let mut out = AgrSet::new();
        for attr in universe.keys() {
            let meet: BTreeSet<String> =
                denote(a, attr).intersection(&denote(b, attr)).cloned().collect();
            if meet.is_empty() {
                return None;
            }
            if meet == universe[attr] {
                out.set(AgrFeature::bare(attr.clone()));
            } else {
                out.set(AgrFeature::valued(attr.clone(), meet.into_iter().next().unwrap()));
            }
        }
        Some(out)
    }

    fn arb_set() -> impl Strategy<Value = AgrSet> {
        prop::collection::btree_map(
            prop::sample::select(vec!["num", "gen", "per"]),
            prop::option::of(prop::sample::select(vec!["s", "p", "f", "m"])),
            0..4,
        )
        .prop_map(|m| {
            m.into_iter()
                .map(|(a, v)| AgrFeature {
                    attribute: a.to_string(),
                    value: v.map(str::to_string),
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn agrees_with_subset_oracle(a in arb_set(), b in arb_set()) {
            prop_assert_eq!(op_unify(&a, &b).ok(), oracle(&a, &b));
        }

        #[test]
        fn commutative_and_idempotent(a in arb_set(), b in arb_set()) {
            prop_assert_eq!(op_unify(&a, &b).ok(), op_unify(&b, &a).ok());
            prop_assert_eq!(op_unify(&a, &a).unwrap(), a);
        }
    }
}
