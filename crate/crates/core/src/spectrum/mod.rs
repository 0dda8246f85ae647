//! The toy spectrum: a target representation, a finite list of cuspidal
//! representations, and finitely many Eisenstein families, all given by
//! Satake parameters at a finite list of places.

mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigFile, ParamMap, WeylSpec};
use crate::isolator::choose_v_infty;
use crate::laurent::{
    GaussianRational, LaurentPoly, MonomialImage, MonomialMap, SignedPermutation, VariableLayout,
    WeylGroup,
};
use crate::satake::{SearchConfig, UnramifiedRep, DEFAULT_DEGREE_BOUND};
use crate::torus::{same_orbit, BaseField, Place, TorusPoint};

pub use verify::{verify, CuspidalVerdict, FamilyVerdict, VerificationReport};

/// A configuration problem, located by a field path such as `places[2].id`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

/// Parameters at every configured place outside `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRep {
    params: BTreeMap<String, UnramifiedRep>,
}

impl TargetRep {
    pub fn get(&self, place: &str) -> Option<&UnramifiedRep> {
        self.params.get(place)
    }

    /// The canonical parameter at `place`.
    pub fn point(&self, place: &str) -> Option<&TorusPoint> {
        self.params.get(place).map(UnramifiedRep::point)
    }

    pub fn places(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspidalRep {
    pub label: String,
    pub rep: TargetRep,
    pub exceptions: BTreeSet<String>,
}

/// An Eisenstein family: parameters `β_v · u^{n_v·L}` for `u` in an `r`-torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspidalDatum {
    pub label: String,
    pub beta: BTreeMap<String, TorusPoint>,
    /// `d × r` family direction.
    pub levi_shift: Vec<Vec<i64>>,
    /// `d × d` splitting applied to lifted shifts.
    pub ell: Vec<Vec<i64>>,
}

impl CuspidalDatum {
    pub fn beta_at(&self, place: &str) -> Option<&TorusPoint> {
        self.beta.get(place)
    }

    pub fn family_rank(&self) -> usize {
        self.levi_shift.first().map_or(0, Vec::len)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumConfig {
    pub base: BaseField,
    pub rank: usize,
    pub weyl: WeylGroup,
    pub places: Vec<Place>,
    pub ramified: BTreeSet<String>,
    pub target: TargetRep,
    pub cuspidals: Vec<CuspidalRep>,
    pub eisenstein: Vec<CuspidalDatum>,
    pub search: SearchConfig,
}

impl SpectrumConfig {
    pub fn place(&self, id: &str) -> Option<&Place> {
        self.places.iter().find(|p| p.id == id)
    }

    /// Places outside `S`, in configuration order.
    pub fn unramified(&self) -> impl Iterator<Item = &Place> {
        self.places.iter().filter(|p| !self.ramified.contains(&p.id))
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.places.iter().position(|p| p.id == id)
    }

    /// The layout with one rank-`d` block per place in `ids`, in configuration order.
    pub fn layout_for<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Arc<VariableLayout> {
        let set: BTreeSet<&str> = ids.into_iter().collect();
        let blocks = self
            .places
            .iter()
            .filter(|p| set.contains(p.id.as_str()))
            .map(|p| crate::laurent::Block {
                place: p.id.clone(),
                rank: self.rank,
            })
            .collect();
        VariableLayout::new(blocks).expect("place ids are unique").shared()
    }

    /// The evaluation point of `rep` on `layout`.
    pub fn point_on(
        &self,
        layout: &VariableLayout,
        rep: &TargetRep,
    ) -> Result<Vec<GaussianRational>, ConfigError> {
        let mut out = Vec::with_capacity(layout.len());
        for b in layout.blocks() {
            let p = rep.point(&b.place).ok_or_else(|| {
                ConfigError::new(
                    format!("layout.{}", b.place),
                    "no unramified parameter at this place",
                )
            })?;
            if p.dim() != b.rank {
                return Err(ConfigError::new(
                    format!("layout.{}", b.place),
                    format!("block rank {} but parameters have rank {}", b.rank, p.dim()),
                ));
            }
            out.extend_from_slice(p.coords());
        }
        Ok(out)
    }
}

fn identity_matrix(d: usize) -> Vec<Vec<i64>> {
    (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn weyl_from_spec(spec: &WeylSpec, d: usize) -> Result<WeylGroup, ConfigError> {
    let named = |name: &str| -> Result<WeylGroup, ConfigError> {
        match name {
            "trivial" => Ok(WeylGroup::trivial(d)),
            "symmetric" => Ok(WeylGroup::symmetric(d)),
            "rank1-inversion" if d == 1 => Ok(WeylGroup::inversion(1)),
            "rank1-inversion" => Err(ConfigError::new("weyl", format!("rank1-inversion needs rank 1, got {d}"))),
            other => Err(ConfigError::new("weyl", format!("unknown group type {other:?}"))),
        }
    };
    match spec {
        WeylSpec::Named(n) => named(n),
        WeylSpec::Typed { kind } => named(kind),
        WeylSpec::Elements { elements } => {
            let mut ws = Vec::with_capacity(elements.len());
            for (i, e) in elements.iter().enumerate() {
                let path = format!("weyl.elements[{i}]");
                if e.perm.len() != d {
                    return Err(ConfigError::new(path, format!("expected {d} entries")));
                }
                let perm = e
                    .perm
                    .iter()
                    .map(|&p| p.checked_sub(1).ok_or_else(|| ConfigError::new(&path, "perm is 1-based")))
                    .collect::<Result<Vec<_>, _>>()?;
                ws.push(SignedPermutation::new(perm, e.signs.clone()).map_err(|err| ConfigError::new(&path, err))?);
            }
            WeylGroup::new(ws).map_err(|err| ConfigError::new("weyl.elements", err))
        }
    }
}

struct Validator<'a> {
    d: usize,
    weyl: &'a WeylGroup,
    places: &'a [Place],
    ramified: &'a BTreeSet<String>,
}

impl Validator<'_> {
    fn point(&self, path: &str, coords: &[GaussianRational]) -> Result<TorusPoint, ConfigError> {
        if coords.len() != self.d {
            return Err(ConfigError::new(
                path,
                format!("expected {} coordinates, got {}", self.d, coords.len()),
            ));
        }
        TorusPoint::new(coords.to_vec()).map_err(|e| ConfigError::new(path, e))
    }

    /// Checks that `map` has exactly the unramified places as keys.
    fn points(&self, path: &str, map: &ParamMap) -> Result<BTreeMap<String, TorusPoint>, ConfigError> {
        for id in map.keys() {
            if !self.places.iter().any(|p| &p.id == id) {
                return Err(ConfigError::new(format!("{path}.{id}"), "unknown place"));
            }
            if self.ramified.contains(id) {
                return Err(ConfigError::new(format!("{path}.{id}"), "parameter given at a ramified place"));
            }
        }
        let mut out = BTreeMap::new();
        for p in self.places.iter().filter(|p| !self.ramified.contains(&p.id)) {
            let sub = format!("{path}.{}", p.id);
            let coords = map
                .get(&p.id)
                .ok_or_else(|| ConfigError::new(&sub, "missing parameter at unramified place"))?;
            out.insert(p.id.clone(), self.point(&sub, coords)?);
        }
        Ok(out)
    }

    fn rep(&self, path: &str, map: &ParamMap) -> Result<TargetRep, ConfigError> {
        let mut params = BTreeMap::new();
        for (id, pt) in self.points(path, map)? {
            let place = self.places.iter().find(|p| p.id == id).expect("checked").clone();
            let rep = UnramifiedRep::new(place, &pt, self.weyl).map_err(|e| ConfigError::new(format!("{path}.{id}"), e))?;
            params.insert(id, rep);
        }
        Ok(TargetRep { params })
    }

    fn matrix(&self, path: &str, m: &[Vec<i64>], square: bool) -> Result<(), ConfigError> {
        if m.len() != self.d {
            return Err(ConfigError::new(path, format!("expected {} rows", self.d)));
        }
        let cols = m[0].len();
        if cols == 0 || (square && cols != self.d) {
            return Err(ConfigError::new(path, "wrong number of columns"));
        }
        if let Some(i) = m.iter().position(|r| r.len() != cols) {
            return Err(ConfigError::new(format!("{path}[{i}]"), "ragged matrix"));
        }
        Ok(())
    }
}

/// Checks a parsed configuration file and normalizes it.
pub fn validate(file: &ConfigFile) -> Result<SpectrumConfig, ConfigError> {
    let base = BaseField::new(file.q).map_err(|e| ConfigError::new("q", e))?;
    let d = file.rank;
    if d == 0 {
        return Err(ConfigError::new("rank", "rank must be at least 1"));
    }
    let weyl = weyl_from_spec(&file.weyl, d)?;

    let mut places = Vec::with_capacity(file.places.len());
    let mut seen = BTreeSet::new();
    for (i, p) in file.places.iter().enumerate() {
        if p.id.is_empty() || !seen.insert(p.id.clone()) {
            return Err(ConfigError::new(
                format!("places[{i}].id"),
                format!("duplicate or empty place id {:?}", p.id),
            ));
        }
        places.push(Place::new(p.id.clone(), p.degree).map_err(|e| ConfigError::new(format!("places[{i}].degree"), e))?);
    }

    let mut ramified = BTreeSet::new();
    for (i, id) in file.ramified.iter().enumerate() {
        if !seen.contains(id) {
            return Err(ConfigError::new(format!("ramified[{i}]"), format!("unknown place {id:?}")));
        }
        ramified.insert(id.clone());
    }
    choose_v_infty(&places, &ramified)?;

    let v = Validator {
        d,
        weyl: &weyl,
        places: &places,
        ramified: &ramified,
    };
    let target = v.rep("pi", &file.pi)?;

    let mut labels = BTreeSet::new();
    let mut cuspidals = Vec::with_capacity(file.cuspidals.len());
    for (i, c) in file.cuspidals.iter().enumerate() {
        if !labels.insert(c.label.clone()) {
            return Err(ConfigError::new(format!("cuspidals[{i}].label"), "duplicate label"));
        }
        let rep = v.rep(&format!("cuspidals[{i}].params"), &c.params)?;
        let mut exceptions = BTreeSet::new();
        for (k, id) in c.exceptions.iter().enumerate() {
            if !seen.contains(id) {
                return Err(ConfigError::new(format!("cuspidals[{i}].exceptions[{k}]"), "unknown place"));
            }
            exceptions.insert(id.clone());
        }
        cuspidals.push(CuspidalRep {
            label: c.label.clone(),
            rep,
            exceptions,
        });
    }

    let mut eisenstein = Vec::with_capacity(file.eisenstein.len());
    let mut labels = BTreeSet::new();
    for (i, e) in file.eisenstein.iter().enumerate() {
        if !labels.insert(e.label.clone()) {
            return Err(ConfigError::new(format!("eisenstein[{i}].label"), "duplicate label"));
        }
        let beta = v.points(&format!("eisenstein[{i}].beta"), &e.beta)?;
        let levi_shift = e.levi_shift.clone().unwrap_or_else(|| identity_matrix(d));
        v.matrix(&format!("eisenstein[{i}].levi_shift"), &levi_shift, false)?;
        let ell = e.ell.clone().unwrap_or_else(|| identity_matrix(d));
        v.matrix(&format!("eisenstein[{i}].ell"), &ell, true)?;
        eisenstein.push(CuspidalDatum {
            label: e.label.clone(),
            beta,
            levi_shift,
            ell,
        });
    }

    Ok(SpectrumConfig {
        base,
        rank: d,
        weyl,
        places,
        ramified,
        target,
        cuspidals,
        eisenstein,
        search: SearchConfig {
            degree_bound: file.degree_bound.unwrap_or(DEFAULT_DEGREE_BOUND),
        },
    })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SpectrumConfig, ConfigError> {
    let file = ConfigFile::from_json(text).map_err(|e| ConfigError::new("$", e))?;
    validate(&file)
}

/// Applies a signed permutation to a list of monomial images, as the point
/// action `(w·X)[perm[j]] = X[j]^{signs[j]}`.
fn twist_images(images: &[MonomialImage], w: &SignedPermutation) -> Vec<MonomialImage> {
    let mut out = images.to_vec();
    for j in 0..images.len() {
        let src = &images[j];
        out[w.perm()[j]] = if w.signs()[j] == 1 {
            src.clone()
        } else {
            MonomialImage {
                coeff: src.coeff.inv().expect("family constants are nonzero"),
                exponents: src.exponents.iter().map(|k| -k).collect(),
            }
        };
    }
    out
}

/// Substitutes the Eisenstein family of `sigma` into `mu`: each block at `v`
/// becomes `β_v · u^{n_v·L}`, and the blocks at the `v_∞` pair are further
/// moved by `(ω, ω′)`.
pub fn restrict_to_family(
    mu: &LaurentPoly,
    config: &SpectrumConfig,
    sigma: &CuspidalDatum,
    v_inf: (&str, &str),
    twist: (&SignedPermutation, &SignedPermutation),
) -> Result<LaurentPoly, ConfigError> {
    let r = sigma.family_rank();
    let target = VariableLayout::single("u", r).shared();
    let mut images = Vec::with_capacity(mu.layout().len());
    for b in mu.layout().blocks() {
        let path = format!("eisenstein.{}.beta.{}", sigma.label, b.place);
        let place = config
            .place(&b.place)
            .ok_or_else(|| ConfigError::new(&path, "multiplier uses an unknown place"))?;
        let beta = sigma
            .beta_at(&b.place)
            .ok_or_else(|| ConfigError::new(&path, "no β at this place"))?;
        if beta.dim() != b.rank || sigma.levi_shift.len() != b.rank {
            return Err(ConfigError::new(&path, "rank mismatch with the multiplier layout"));
        }
        let n = place.degree as i64;
        let block: Vec<MonomialImage> = (0..b.rank)
            .map(|j| MonomialImage {
                coeff: beta.coords()[j].clone(),
                exponents: sigma.levi_shift[j].iter().map(|&l| l * n).collect(),
            })
            .collect();
        let block = if b.place == v_inf.0 {
            twist_images(&block, twist.0)
        } else if b.place == v_inf.1 {
            twist_images(&block, twist.1)
        } else {
            block
        };
        images.extend(block);
    }
    let map = MonomialMap::new(target, images).map_err(|e| ConfigError::new("eisenstein", e))?;
    mu.substitute(&map).map_err(|e| ConfigError::new("eisenstein", e))
}

/// Same parameter orbit at every configured unramified place outside `exceptions`.
pub fn nearly_equivalent(
    a: &TargetRep,
    b: &TargetRep,
    exceptions: &BTreeSet<String>,
    config: &SpectrumConfig,
) -> bool {
    config
        .unramified()
        .filter(|p| !exceptions.contains(&p.id))
        .all(|p| match (a.point(&p.id), b.point(&p.id)) {
            (Some(x), Some(y)) => same_orbit(x, y, &config.weyl).unwrap_or(false),
            _ => false,
        })
}
