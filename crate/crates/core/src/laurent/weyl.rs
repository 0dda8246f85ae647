//! Signed coordinate permutations and the finite groups they form.

use std::collections::HashSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{GaussianRational, LaurentError};

/// `x ↦ w·x` with `(w·x)[perm[j]] = x[j]^signs[j]`.
///
/// On exponent vectors of Laurent monomials this induces
/// `k'[j] = signs[j] · k[perm[j]]`, so that `p(w·x) = (p∘w)(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    /// `perm` is 0-based; `signs` entries must be ±1.
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self, LaurentError> {
        let d = perm.len();
        if signs.len() != d {
            return Err(LaurentError::Group(format!(
                "perm has length {d} but signs has length {}",
                signs.len()
            )));
        }
        let mut hit = vec![false; d];
        for &p in &perm {
            if p >= d || hit[p] {
                return Err(LaurentError::Group(format!(
                    "{perm:?} is not a permutation of 0..{d}"
                )));
            }
            hit[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(LaurentError::Group(format!("signs {signs:?} must be ±1")));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            perm: (0..d).collect(),
            signs: vec![1; d],
        }
    }

    /// Coordinatewise inversion `x ↦ x⁻¹`.
    pub fn inversion(d: usize) -> Self {
        Self {
            perm: (0..d).collect(),
            signs: vec![-1; d],
        }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self, LaurentError> {
        let d = perm.len();
        Self::new(perm, vec![1; d])
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn is_pure_permutation(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "composing signed permutations of different size");
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let signs = other
            .perm
            .iter()
            .zip(&other.signs)
            .map(|(&j, &s)| s * self.signs[j])
            .collect();
        Self { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let d = self.dim();
        let mut perm = vec![0; d];
        let mut signs = vec![1; d];
        for j in 0..d {
            perm[self.perm[j]] = j;
            signs[self.perm[j]] = self.signs[j];
        }
        Self { perm, signs }
    }

    /// The left action on torus coordinates.
    pub fn apply_point(&self, x: &[GaussianRational]) -> Result<Vec<GaussianRational>, LaurentError> {
        if x.len() != self.dim() {
            return Err(LaurentError::Layout(format!(
                "point of length {} acted on by a signed permutation of size {}",
                x.len(),
                self.dim()
            )));
        }
        let mut out = vec![GaussianRational::default(); x.len()];
        for j in 0..x.len() {
            out[self.perm[j]] = if self.signs[j] == 1 {
                x[j].clone()
            } else {
                x[j].inv().ok_or(LaurentError::ZeroOnTorus)?
            };
        }
        Ok(out)
    }

    /// The induced map on exponent vectors (`act` on monomials).
    pub fn apply_exponents(&self, k: &[i64]) -> Vec<i64> {
        (0..k.len())
            .map(|j| self.signs[j] as i64 * k[self.perm[j]])
            .collect()
    }

    /// Writes the induced exponent map into `out[range]`, reading from `k[range]`.
    pub(crate) fn apply_exponents_in(&self, k: &[i64], offset: usize, out: &mut [i64]) {
        for j in 0..self.dim() {
            out[offset + j] = self.signs[j] as i64 * k[offset + self.perm[j]];
        }
    }
}

/// Which closed-form family of invariant generators a group admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylKind {
    Trivial,
    /// Full symmetric group on the coordinates.
    Symmetric,
    /// `{id, x ↦ x⁻¹}` in rank one.
    Rank1Inversion,
    Other,
}

/// A finite group of signed permutations, with group axioms checked at construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SignedPermutation>", into = "Vec<SignedPermutation>")]
pub struct WeylGroup {
    dim: usize,
    elements: Vec<SignedPermutation>,
}

impl WeylGroup {
    /// Elements keep their given order, except that the identity is moved to
    /// the front and duplicates are dropped.
    pub fn new(elements: Vec<SignedPermutation>) -> Result<Self, LaurentError> {
        let Some(first) = elements.first() else {
            return Err(LaurentError::Group("empty element list".into()));
        };
        let dim = first.dim();
        if elements.iter().any(|w| w.dim() != dim) {
            return Err(LaurentError::Group("elements of different size".into()));
        }
        let mut uniq: Vec<SignedPermutation> = Vec::new();
        for w in elements {
            if !uniq.contains(&w) {
                uniq.push(w);
            }
        }
        let Some(id_pos) = uniq.iter().position(|w| w.is_identity()) else {
            return Err(LaurentError::Group("identity missing".into()));
        };
        let id = uniq.remove(id_pos);
        uniq.insert(0, id);
        let set: HashSet<&SignedPermutation> = uniq.iter().collect();
        for a in &uniq {
            if !set.contains(&a.inverse()) {
                return Err(LaurentError::Group(format!("inverse of {a:?} missing")));
            }
            for b in &uniq {
                if !set.contains(&a.compose(b)) {
                    return Err(LaurentError::Group(format!(
                        "not closed: {a:?} ∘ {b:?} missing"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            elements: uniq,
        })
    }

    pub fn trivial(d: usize) -> Self {
        Self {
            dim: d,
            elements: vec![SignedPermutation::identity(d)],
        }
    }

    /// `S_d` acting by coordinate permutations, in lexicographic order.
    pub fn symmetric(d: usize) -> Self {
        let elements = (0..d)
            .permutations(d)
            .map(|p| SignedPermutation::from_permutation(p).expect("valid permutation"))
            .collect();
        Self::new(elements).expect("S_d is a group")
    }

    /// `{id, x ↦ x⁻¹}` on `d` coordinates (the PGL₂ Weyl group when `d = 1`).
    pub fn inversion(d: usize) -> Self {
        Self::new(vec![
            SignedPermutation::identity(d),
            SignedPermutation::inversion(d),
        ])
        .expect("inversion group is a group")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[SignedPermutation] {
        &self.elements
    }

    pub fn kind(&self) -> WeylKind {
        let d = self.dim;
        if self.order() == 1 {
            WeylKind::Trivial
        } else if self.elements.iter().all(SignedPermutation::is_pure_permutation)
            && self.order() == (1..=d).product::<usize>()
        {
            WeylKind::Symmetric
        } else if d == 1 && self.order() == 2 {
            WeylKind::Rank1Inversion
        } else {
            WeylKind::Other
        }
    }

    /// Index pairs of `W × W` in the order `(1,1), (w,1), …, (1,w'), …`:
    /// the first component varies fastest.
    pub fn pair_indices(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).collect()
    }
}

impl TryFrom<Vec<SignedPermutation>> for WeylGroup {
    type Error = LaurentError;
    fn try_from(v: Vec<SignedPermutation>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<WeylGroup> for Vec<SignedPermutation> {
    fn from(w: WeylGroup) -> Self {
        w.elements
    }
}
