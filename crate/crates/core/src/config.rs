//! JSON interchange formats: the spectrum configuration file and the
//! multiplier file. All rationals are `"p/q"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::isolator::{Audit, MultiplierReport};
use crate::laurent::{GaussianRational, LaurentPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub q: u64,
    pub rank: usize,
    pub weyl: WeylSpec,
    pub places: Vec<PlaceEntry>,
    #[serde(default)]
    pub ramified: Vec<String>,
    pub pi: ParamMap,
    #[serde(default)]
    pub cuspidals: Vec<CuspidalEntry>,
    #[serde(default)]
    pub eisenstein: Vec<EisensteinEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
}

/// Place id to one `[re, im]` pair per coordinate.
pub type ParamMap = BTreeMap<String, Vec<GaussianRational>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceEntry {
    pub id: String,
    pub degree: u32,
}

/// `"symmetric"`, `{"type": "rank1-inversion"}`, or `{"elements": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeylSpec {
    Named(String),
    Typed {
        #[serde(rename = "type")]
        kind: String,
    },
    Elements {
        elements: Vec<ElementEntry>,
    },
}

/// A signed permutation with a 1-based `perm`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspidalEntry {
    pub label: String,
    pub params: ParamMap,
    #[serde(default)]
    pub exceptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EisensteinEntry {
    pub label: String,
    pub beta: ParamMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levi_shift: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<Vec<Vec<i64>>>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// The serialized multiplier: `layout` and `terms` of μ, then the
/// normalization `π(μ')⁻¹` and the construction audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierFile {
    #[serde(flatten)]
    pub mu: LaurentPoly,
    pub normalization: GaussianRational,
    #[serde(default)]
    pub audit: Audit,
}

impl MultiplierFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("multiplier serializes");
        s.push('\n');
        s
    }
}

impl From<&MultiplierReport> for MultiplierFile {
    fn from(r: &MultiplierReport) -> Self {
        Self {
            mu: r.mu.clone(),
            normalization: r.normalization.clone(),
            audit: r.audit.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_spec_forms() {
        let a: WeylSpec = serde_json::from_str(r#""symmetric""#).unwrap();
        assert_eq!(a, WeylSpec::Named("symmetric".into()));
        let b: WeylSpec = serde_json::from_str(r#"{"type": "rank1-inversion"}"#).unwrap();
        assert_eq!(
            b,
            WeylSpec::Typed {
                kind: "rank1-inversion".into()
            }
        );
        let c: WeylSpec = serde_json::from_str(r#"{"elements": [{"perm": [1], "signs": [1]}]}"#).unwrap();
        assert!(matches!(c, WeylSpec::Elements { .. }));
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"q": 2, "rank": 1, "weyl": "symmetric", "places": [], "pi": {}, "extra": 1}"#;
        assert!(ConfigFile::from_json(text).is_err());
    }
}
