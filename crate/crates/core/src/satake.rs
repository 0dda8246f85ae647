//! Spherical Hecke elements, modeled on the polynomial side of the Satake
//! isomorphism as `W`-invariant Laurent polynomials in one place's block.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{GaussianRational, LaurentError, LaurentPoly, VariableLayout, WeylGroup, WeylKind};
use crate::torus::{orbit, OrbitRep, Place, TorusError, TorusPoint};

pub const DEFAULT_DEGREE_BOUND: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatakeError {
    #[error("Hecke element at {element:?} evaluated on a representation at {rep:?}")]
    PlaceMismatch { element: String, rep: String },
    #[error("polynomial is not invariant under the Weyl group")]
    NotInvariant,
    #[error("target and avoided parameter lie in the same Weyl orbit")]
    SameOrbit,
    #[error("no separating invariant found with exponents up to {bound}")]
    SeparationNotFound { bound: u32 },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

/// A spherical Hecke element at `place`, stored as its Satake transform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphericalHeckeElement {
    place: Place,
    poly: LaurentPoly,
}

impl SphericalHeckeElement {
    pub fn new(place: Place, poly: LaurentPoly, group: &WeylGroup) -> Result<Self, SatakeError> {
        let blocks = poly.layout().blocks();
        if blocks.len() != 1 || blocks[0].place != place.id || blocks[0].rank != group.dim() {
            return Err(LaurentError::Layout(format!(
                "Hecke element at {:?} must live on a single block of rank {}",
                place.id,
                group.dim()
            ))
            .into());
        }
        if !poly.is_invariant_uniform(group)? {
            return Err(SatakeError::NotInvariant);
        }
        Ok(Self { place, poly })
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }

    /// Value on a Satake parameter (any orbit member gives the same value).
    pub fn value_at(&self, point: &TorusPoint) -> Result<GaussianRational, SatakeError> {
        Ok(self.poly.evaluate(point.coords())?)
    }
}

/// An unramified representation at a place, by the `W`-orbit of its parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnramifiedRep {
    pub place: Place,
    pub param: OrbitRep,
}

impl UnramifiedRep {
    pub fn new(place: Place, point: &TorusPoint, group: &WeylGroup) -> Result<Self, SatakeError> {
        Ok(Self {
            place,
            param: orbit(point, group)?,
        })
    }

    pub fn point(&self) -> &TorusPoint {
        self.param.representative()
    }
}

/// `tr π_v(h)`: the Satake transform of `h` at the parameter of `rep`.
pub fn trace(h: &SphericalHeckeElement, rep: &UnramifiedRep) -> Result<GaussianRational, SatakeError> {
    if h.place.id != rep.place.id {
        return Err(SatakeError::PlaceMismatch {
            element: h.place.id.clone(),
            rep: rep.place.id.clone(),
        });
    }
    h.value_at(rep.point())
}

fn block_layout(place: &Place, d: usize) -> std::sync::Arc<VariableLayout> {
    VariableLayout::single(place.id.clone(), d).shared()
}

/// Sum of the distinct monomials in the `W`-orbit of `z^exponents`.
pub fn orbit_sum(
    place: &Place,
    group: &WeylGroup,
    exponents: &[i64],
) -> Result<LaurentPoly, SatakeError> {
    let layout = block_layout(place, group.dim());
    let distinct: BTreeSet<Vec<i64>> = group
        .elements()
        .iter()
        .map(|w| w.apply_exponents(exponents))
        .collect();
    Ok(LaurentPoly::from_terms(
        layout,
        distinct.into_iter().map(|e| (e, GaussianRational::one())),
    )?)
}

fn elementary_symmetric(layout: &std::sync::Arc<VariableLayout>, d: usize, k: usize) -> LaurentPoly {
    let terms = (0..d).combinations(k).map(|idx| {
        let mut e = vec![0; d];
        for i in idx {
            e[i] = 1;
        }
        (e, GaussianRational::one())
    });
    LaurentPoly::from_terms(layout.clone(), terms).expect("well-formed exponent vectors")
}

/// A generating family for the invariant Laurent ring at `place`.
///
/// Symmetric groups get `e_1, …, e_{d-1}, e_d, e_d⁻¹`; the rank-one
/// inversion group gets `z + z⁻¹`; the trivial group gets every `z_i^{±1}`;
/// any other group gets the orbit sums of monomials with exponents in `{-1, 0, 1}`.
pub fn invariant_generators(group: &WeylGroup, place: &Place) -> Vec<SphericalHeckeElement> {
    let d = group.dim();
    let layout = block_layout(place, d);
    let polys: Vec<LaurentPoly> = match group.kind() {
        WeylKind::Trivial => (0..d)
            .flat_map(|i| [1, -1].map(|k| (i, k)))
            .map(|(i, k)| LaurentPoly::variable(layout.clone(), i, k).expect("in range"))
            .collect(),
        WeylKind::Symmetric => {
            let mut v: Vec<LaurentPoly> = (1..d).map(|k| elementary_symmetric(&layout, d, k)).collect();
            v.push(LaurentPoly::monomial(layout.clone(), vec![1; d], GaussianRational::one()).expect("ok"));
            v.push(LaurentPoly::monomial(layout.clone(), vec![-1; d], GaussianRational::one()).expect("ok"));
            v
        }
        WeylKind::Rank1Inversion => vec![orbit_sum(place, group, &[1]).expect("rank one")],
        WeylKind::Other => symmetrized_monomials(place, group, 1, &mut BTreeSet::new()),
    };
    polys
        .into_iter()
        .map(|p| SphericalHeckeElement::new(place.clone(), p, group).expect("generators are invariant"))
        .collect()
}

/// Orbit sums of monomials with `max |k_i| = level`, in lexicographic order of
/// `k`, skipping orbits already in `seen`.
fn symmetrized_monomials(
    place: &Place,
    group: &WeylGroup,
    level: i64,
    seen: &mut BTreeSet<Vec<Vec<i64>>>,
) -> Vec<LaurentPoly> {
    let d = group.dim();
    let mut out = Vec::new();
    for k in (0..d).map(|_| -level..=level).multi_cartesian_product() {
        if k.iter().map(|x| x.abs()).max() != Some(level) {
            continue;
        }
        let p = orbit_sum(place, group, &k).expect("well-formed");
        let key: Vec<Vec<i64>> = p.terms().map(|(e, _)| e.to_vec()).collect();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

/// Search limits for [`separating_invariant`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub degree_bound: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            degree_bound: DEFAULT_DEGREE_BOUND,
        }
    }
}

struct Candidate {
    poly: LaurentPoly,
    at_target: GaussianRational,
    at_avoid: Vec<GaussianRational>,
}

impl Candidate {
    fn new(poly: LaurentPoly, target: &TorusPoint, avoid: &[TorusPoint]) -> Result<Self, SatakeError> {
        let at_target = poly.evaluate(target.coords())?;
        let at_avoid = avoid
            .iter()
            .map(|p| poly.evaluate(p.coords()))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            poly,
            at_target,
            at_avoid,
        })
    }

    fn separates(&self) -> bool {
        self.at_avoid.iter().all(|v| v != &self.at_target)
    }
}

/// Finds an invariant `T` at `place` with `T(target) ≠ T(p)` for every `p` in `avoid`.
///
/// Order: the invariant generators; then orbit sums of monomials by
/// increasing max-exponent up to the bound; then `a·T_i + b·T_j` with
/// `a, b ∈ {1, 2, 3}` over pairs of earlier candidates. The first hit wins.
pub fn separating_invariant(
    target: &TorusPoint,
    avoid: &[TorusPoint],
    group: &WeylGroup,
    place: &Place,
    search: SearchConfig,
) -> Result<SphericalHeckeElement, SatakeError> {
    let target_orbit = orbit(target, group)?;
    for p in avoid {
        if p.dim() != target.dim() {
            return Err(TorusError::Dimension("avoided point has the wrong dimension".into()).into());
        }
        if target_orbit.contains(p) {
            return Err(SatakeError::SameOrbit);
        }
    }

    let mut candidates: Vec<Candidate> = Vec::new();
    let accept = |poly: LaurentPoly| -> Result<SphericalHeckeElement, SatakeError> {
        let h = SphericalHeckeElement::new(place.clone(), poly, group)?;
        let t = h.value_at(target)?;
        for p in avoid {
            assert_ne!(h.value_at(p)?, t, "separation re-check failed");
        }
        Ok(h)
    };

    for h in invariant_generators(group, place) {
        let c = Candidate::new(h.poly, target, avoid)?;
        if c.separates() {
            return accept(c.poly);
        }
        candidates.push(c);
    }

    let mut seen: BTreeSet<Vec<Vec<i64>>> = candidates
        .iter()
        .map(|c| c.poly.terms().map(|(e, _)| e.to_vec()).collect())
        .collect();
    for level in 1..=search.degree_bound as i64 {
        for poly in symmetrized_monomials(place, group, level, &mut seen) {
            let c = Candidate::new(poly, target, avoid)?;
            if c.separates() {
                return accept(c.poly);
            }
            candidates.push(c);
        }
    }

    let weights: Vec<GaussianRational> = (1..=3).map(GaussianRational::from).collect();
    for (i, j) in (0..candidates.len()).tuple_combinations() {
        let (ci, cj) = (&candidates[i], &candidates[j]);
        for a in &weights {
            for b in &weights {
                let t = a * &ci.at_target + b * &cj.at_target;
                let ok = ci
                    .at_avoid
                    .iter()
                    .zip(&cj.at_avoid)
                    .all(|(vi, vj)| a * vi + b * vj != t);
                if ok {
                    let poly = ci.poly.scale(a).checked_add(&cj.poly.scale(b))?;
                    return accept(poly);
                }
            }
        }
    }

    Err(SatakeError::SeparationNotFound {
        bound: search.degree_bound,
    })
}
