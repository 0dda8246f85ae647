use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Block, GaussianRational, LaurentError, SignedPermutation, VariableLayout, WeylGroup};

/// A multivariate Laurent polynomial over `Q(i)` on a place-tagged layout.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vector, so iteration
/// order (and therefore every serialization) is deterministic. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    layout: Arc<VariableLayout>,
    terms: BTreeMap<Vec<i64>, GaussianRational>,
}

/// Image of one source variable under a monomial substitution:
/// `z_j ↦ coeff · u^exponents`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialImage {
    pub coeff: GaussianRational,
    pub exponents: Vec<i64>,
}

/// A monomial map from a source layout into `target`, one image per source variable.
#[derive(Clone, Debug)]
pub struct MonomialMap {
    target: Arc<VariableLayout>,
    images: Vec<MonomialImage>,
}

impl MonomialMap {
    pub fn new(
        target: Arc<VariableLayout>,
        images: Vec<MonomialImage>,
    ) -> Result<Self, LaurentError> {
        for img in &images {
            if img.coeff.is_zero() {
                return Err(LaurentError::ZeroOnTorus);
            }
            if img.exponents.len() != target.len() {
                return Err(LaurentError::Layout(format!(
                    "image exponent vector has length {}, target layout has {} variables",
                    img.exponents.len(),
                    target.len()
                )));
            }
        }
        Ok(Self { target, images })
    }

    pub fn target(&self) -> &Arc<VariableLayout> {
        &self.target
    }

    pub fn images(&self) -> &[MonomialImage] {
        &self.images
    }

    /// `self` followed by `next`: the composite `z ↦ next(self(z))`.
    pub fn then(&self, next: &MonomialMap) -> Result<MonomialMap, LaurentError> {
        if next.images.len() != self.target.len() {
            return Err(LaurentError::LayoutMismatch);
        }
        let mut images = Vec::with_capacity(self.images.len());
        for img in &self.images {
            let mut coeff = img.coeff.clone();
            let mut exps = vec![0i64; next.target.len()];
            for (k, nimg) in img.exponents.iter().zip(&next.images) {
                if *k == 0 {
                    continue;
                }
                coeff *= &nimg.coeff.pow(*k).ok_or(LaurentError::ZeroOnTorus)?;
                for (e, ne) in exps.iter_mut().zip(&nimg.exponents) {
                    *e = ne
                        .checked_mul(*k)
                        .and_then(|v| e.checked_add(v))
                        .ok_or(LaurentError::ExponentOverflow)?;
                }
            }
            images.push(MonomialImage {
                coeff,
                exponents: exps,
            });
        }
        MonomialMap::new(next.target.clone(), images)
    }
}

impl LaurentPoly {
    pub fn zero(layout: Arc<VariableLayout>) -> Self {
        Self {
            layout,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(layout: Arc<VariableLayout>) -> Self {
        Self::constant(layout, GaussianRational::one())
    }

    pub fn constant(layout: Arc<VariableLayout>, c: GaussianRational) -> Self {
        let mut p = Self::zero(layout);
        if !c.is_zero() {
            let n = p.layout.len();
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn monomial(
        layout: Arc<VariableLayout>,
        exponents: Vec<i64>,
        c: GaussianRational,
    ) -> Result<Self, LaurentError> {
        Self::from_terms(layout, [(exponents, c)])
    }

    /// `z_index^power`.
    pub fn variable(
        layout: Arc<VariableLayout>,
        index: usize,
        power: i64,
    ) -> Result<Self, LaurentError> {
        if index >= layout.len() {
            return Err(LaurentError::Layout(format!(
                "variable {index} out of range for {} variables",
                layout.len()
            )));
        }
        let mut e = vec![0; layout.len()];
        e[index] = power;
        Self::monomial(layout, e, GaussianRational::one())
    }

    /// Sums duplicate exponent vectors and drops zero coefficients.
    pub fn from_terms(
        layout: Arc<VariableLayout>,
        terms: impl IntoIterator<Item = (Vec<i64>, GaussianRational)>,
    ) -> Result<Self, LaurentError> {
        let n = layout.len();
        let mut map: BTreeMap<Vec<i64>, GaussianRational> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != n {
                return Err(LaurentError::Layout(format!(
                    "exponent vector of length {} in a layout with {n} variables",
                    e.len()
                )));
            }
            accumulate(&mut map, e, &c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self { layout, terms: map })
    }

    pub fn layout(&self) -> &Arc<VariableLayout> {
        &self.layout
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &GaussianRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn coefficient(&self, exponents: &[i64]) -> GaussianRational {
        self.terms.get(exponents).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coefficient(&vec![0; self.layout.len()])
    }

    /// Largest `|exponent|` over all terms; 0 for constants and zero.
    pub fn max_abs_exponent(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    fn check_layout(&self, other: &Self) -> Result<(), LaurentError> {
        if self.layout == other.layout {
            Ok(())
        } else {
            Err(LaurentError::LayoutMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_layout(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            accumulate(&mut terms, e.clone(), c);
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Self {
            layout: self.layout.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_layout(other)?;
        let mut acc: HashMap<Vec<i64>, GaussianRational> =
            HashMap::with_capacity(self.terms.len().saturating_mul(other.terms.len()).min(1 << 20));
        let n = self.layout.len();
        let mut key = vec![0i64; n];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                for i in 0..n {
                    key[i] = ea[i]
                        .checked_add(eb[i])
                        .ok_or(LaurentError::ExponentOverflow)?;
                }
                let prod = ca * cb;
                match acc.get_mut(&key) {
                    Some(c) => *c += &prod,
                    None => {
                        acc.insert(key.clone(), prod);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self {
            layout: self.layout.clone(),
            terms,
        })
    }

    pub fn checked_pow(&self, exp: u32) -> Result<Self, LaurentError> {
        let mut acc = Self::one(self.layout.clone());
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Product of a non-empty or empty list (empty product is 1).
    pub fn product<'a>(
        layout: Arc<VariableLayout>,
        factors: impl IntoIterator<Item = &'a LaurentPoly>,
    ) -> Result<Self, LaurentError> {
        let mut acc = Self::one(layout);
        for f in factors {
            acc = acc.checked_mul(f)?;
        }
        Ok(acc)
    }

    pub fn neg(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.layout.clone());
        }
        Self {
            layout: self.layout.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Exact value at a torus point (one nonzero coordinate per variable).
    pub fn evaluate(&self, point: &[GaussianRational]) -> Result<GaussianRational, LaurentError> {
        if point.len() != self.layout.len() {
            return Err(LaurentError::Layout(format!(
                "point of length {} for a layout with {} variables",
                point.len(),
                self.layout.len()
            )));
        }
        if point.iter().any(Zero::is_zero) {
            return Err(LaurentError::ZeroOnTorus);
        }
        let mut powers = PowerCache::new(point);
        let mut total = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (j, &k) in e.iter().enumerate() {
                if k != 0 {
                    t *= powers.get(j, k);
                }
            }
            total += &t;
        }
        Ok(total)
    }

    /// Applies a monomial map; a ring homomorphism into the target layout.
    pub fn substitute(&self, map: &MonomialMap) -> Result<Self, LaurentError> {
        if map.images.len() != self.layout.len() {
            return Err(LaurentError::Layout(format!(
                "substitution has {} images for {} variables",
                map.images.len(),
                self.layout.len()
            )));
        }
        let consts: Vec<GaussianRational> = map.images.iter().map(|m| m.coeff.clone()).collect();
        let mut powers = PowerCache::new(&consts);
        let m = map.target.len();
        let mut acc: BTreeMap<Vec<i64>, GaussianRational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut key = vec![0i64; m];
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                coeff *= powers.get(j, k);
                for (slot, &ie) in key.iter_mut().zip(&map.images[j].exponents) {
                    *slot = ie
                        .checked_mul(k)
                        .and_then(|v| slot.checked_add(v))
                        .ok_or(LaurentError::ExponentOverflow)?;
                }
            }
            accumulate(&mut acc, key, &coeff);
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Self {
            layout: map.target.clone(),
            terms: acc,
        })
    }

    /// `act(p, w)(x) = p(w·x)`, with one signed permutation per block.
    pub fn act(&self, ws: &[SignedPermutation]) -> Result<Self, LaurentError> {
        let blocks = self.layout.blocks();
        if ws.len() != blocks.len() {
            return Err(LaurentError::Layout(format!(
                "{} block actions for {} blocks",
                ws.len(),
                blocks.len()
            )));
        }
        for (w, b) in ws.iter().zip(blocks) {
            if w.dim() != b.rank {
                return Err(LaurentError::Layout(format!(
                    "signed permutation of size {} on block {:?} of rank {}",
                    w.dim(),
                    b.place,
                    b.rank
                )));
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut k = e.clone();
                for (bi, w) in ws.iter().enumerate() {
                    w.apply_exponents_in(e, self.layout.offset(bi), &mut k);
                }
                (k, c.clone())
            })
            .collect();
        Ok(Self {
            layout: self.layout.clone(),
            terms,
        })
    }

    /// Acts on the block for `place` only.
    pub fn act_block(&self, place: &str, w: &SignedPermutation) -> Result<Self, LaurentError> {
        let (bi, off) = self.block_for(place, w.dim())?;
        let _ = bi;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut k = e.clone();
                w.apply_exponents_in(e, off, &mut k);
                (k, c.clone())
            })
            .collect();
        Ok(Self {
            layout: self.layout.clone(),
            terms,
        })
    }

    fn block_for(&self, place: &str, dim: usize) -> Result<(usize, usize), LaurentError> {
        let bi = self
            .layout
            .block_index(place)
            .ok_or_else(|| LaurentError::Layout(format!("no block {place:?} in layout")))?;
        let rank = self.layout.blocks()[bi].rank;
        if rank != dim {
            return Err(LaurentError::Layout(format!(
                "signed permutation of size {dim} on block {place:?} of rank {rank}"
            )));
        }
        Ok((bi, self.layout.offset(bi)))
    }

    /// Averages over `W` acting on the block for `place`.
    pub fn symmetrize_block(&self, place: &str, group: &WeylGroup) -> Result<Self, LaurentError> {
        let (_, off) = self.block_for(place, group.dim())?;
        let mut acc: BTreeMap<Vec<i64>, GaussianRational> = BTreeMap::new();
        for w in group.elements() {
            for (e, c) in &self.terms {
                let mut k = e.clone();
                w.apply_exponents_in(e, off, &mut k);
                accumulate(&mut acc, k, c);
            }
        }
        let scale = GaussianRational::from_ratio(1, group.order() as i64);
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, &c * &scale))
            .collect();
        Ok(Self {
            layout: self.layout.clone(),
            terms,
        })
    }

    /// Projection onto the invariants of the blockwise product group,
    /// `groups[b]` acting on block `b`.
    pub fn symmetrize(&self, groups: &[&WeylGroup]) -> Result<Self, LaurentError> {
        self.check_group_count(groups.len())?;
        let mut p = self.clone();
        for (b, g) in self.layout.blocks().iter().zip(groups) {
            p = p.symmetrize_block(&b.place, g)?;
        }
        Ok(p)
    }

    /// `symmetrize` with the same group on every block.
    pub fn symmetrize_uniform(&self, group: &WeylGroup) -> Result<Self, LaurentError> {
        let groups = vec![group; self.layout.blocks().len()];
        self.symmetrize(&groups)
    }

    pub fn is_invariant_block(&self, place: &str, group: &WeylGroup) -> Result<bool, LaurentError> {
        let (_, off) = self.block_for(place, group.dim())?;
        let mut k = vec![0i64; self.layout.len()];
        for w in group.elements().iter().filter(|w| !w.is_identity()) {
            for (e, c) in &self.terms {
                k.copy_from_slice(e);
                w.apply_exponents_in(e, off, &mut k);
                if self.terms.get(&k) != Some(c) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `act(p, w) = p` for every element of the blockwise product group.
    pub fn is_invariant(&self, groups: &[&WeylGroup]) -> Result<bool, LaurentError> {
        self.check_group_count(groups.len())?;
        for (b, g) in self.layout.blocks().iter().zip(groups) {
            if !self.is_invariant_block(&b.place, g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_invariant_uniform(&self, group: &WeylGroup) -> Result<bool, LaurentError> {
        let groups = vec![group; self.layout.blocks().len()];
        self.is_invariant(&groups)
    }

    fn check_group_count(&self, n: usize) -> Result<(), LaurentError> {
        if n != self.layout.blocks().len() {
            return Err(LaurentError::Layout(format!(
                "{n} groups for {} blocks",
                self.layout.blocks().len()
            )));
        }
        Ok(())
    }

    /// Moves the polynomial into a larger layout that contains every block
    /// of the current one (matched by place id and rank).
    pub fn reembed(&self, target: &Arc<VariableLayout>) -> Result<Self, LaurentError> {
        if &self.layout == target {
            return Ok(self.clone());
        }
        let mut positions = Vec::with_capacity(self.layout.len());
        for b in self.layout.blocks() {
            let tb = target.block(&b.place).ok_or_else(|| {
                LaurentError::Layout(format!("target layout lacks block {:?}", b.place))
            })?;
            if tb.rank != b.rank {
                return Err(LaurentError::Layout(format!(
                    "block {:?} has rank {} but target rank {}",
                    b.place, b.rank, tb.rank
                )));
            }
            let r = target.range(&b.place).expect("block present");
            positions.extend(r);
        }
        let n = target.len();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut k = vec![0i64; n];
                for (&x, &pos) in e.iter().zip(&positions) {
                    k[pos] = x;
                }
                (k, c.clone())
            })
            .collect();
        Ok(Self {
            layout: target.clone(),
            terms,
        })
    }
}

fn accumulate(map: &mut BTreeMap<Vec<i64>, GaussianRational>, key: Vec<i64>, c: &GaussianRational) {
    match map.entry(key) {
        Entry::Occupied(mut o) => *o.get_mut() += c,
        Entry::Vacant(v) => {
            v.insert(c.clone());
        }
    }
}

/// Memoized integer powers of a fixed list of nonzero values.
struct PowerCache<'a> {
    base: &'a [GaussianRational],
    cache: HashMap<(usize, i64), GaussianRational>,
}

impl<'a> PowerCache<'a> {
    fn new(base: &'a [GaussianRational]) -> Self {
        Self {
            base,
            cache: HashMap::new(),
        }
    }

    /// Callers guarantee `base[j] != 0`.
    fn get(&mut self, j: usize, k: i64) -> &GaussianRational {
        let base = self.base;
        self.cache
            .entry((j, k))
            .or_insert_with(|| base[j].pow(k).expect("nonzero base"))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponents: Vec<i64>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRecord {
    layout: Vec<Block>,
    terms: Vec<TermRecord>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rec = PolyRecord {
            layout: self.layout.blocks().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (re, im) = c.to_parts();
                    TermRecord {
                        exponents: e.clone(),
                        re,
                        im,
                    }
                })
                .collect(),
        };
        rec.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rec = PolyRecord::deserialize(deserializer)?;
        let layout = VariableLayout::new(rec.layout).map_err(D::Error::custom)?.shared();
        let mut terms = Vec::with_capacity(rec.terms.len());
        for t in rec.terms {
            let c = GaussianRational::parse_parts(&t.re, &t.im).map_err(D::Error::custom)?;
            terms.push((t.exponents, c));
        }
        LaurentPoly::from_terms(layout, terms).map_err(D::Error::custom)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut names = Vec::with_capacity(self.layout.len());
        for b in self.layout.blocks() {
            for j in 0..b.rank {
                if b.rank == 1 {
                    names.push(b.place.clone());
                } else {
                    names.push(format!("{}.{}", b.place, j + 1));
                }
            }
        }
        // Highest exponents first reads closest to conventional notation.
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(j, &k)| {
                    if k == 1 {
                        names[j].clone()
                    } else {
                        format!("{}^{}", names[j], k)
                    }
                })
                .collect();
            let coeff = c.to_string();
            let simple = c.im().is_zero();
            let negative = simple && coeff.starts_with('-');
            let body = match (mono.is_empty(), c == &GaussianRational::one(), c == &-GaussianRational::one()) {
                (true, _, _) => coeff.trim_start_matches('-').to_string(),
                (false, true, _) | (false, _, true) => mono.join("*"),
                (false, false, false) if simple => {
                    format!("{}*{}", coeff.trim_start_matches('-'), mono.join("*"))
                }
                _ => format!("({})*{}", coeff, mono.join("*")),
            };
            let body = if mono.is_empty() && !simple { format!("({coeff})") } else { body };
            match (idx, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}
