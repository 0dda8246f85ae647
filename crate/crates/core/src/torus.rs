//! Places, Satake-parameter torus points, coprime-degree diagonal lifting,
//! and Weyl orbits.
//!
//! All local tori are written in multiplicative coordinates. A base-torus
//! point `u` (a character of the constant field's norm) restricts to `u^n`
//! at a place of degree `n`. For two places of coprime degrees `n1`, `n2`
//! with Bézout identity `a·n1 + b·n2 = 1`, the pair `(u^n1, u^n2)` determines
//! `u = x^a · y^b`, and a pair `(x, y)` lies on the diagonal image exactly
//! when that candidate reproduces both coordinates.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{
    Block, GaussianRational, LaurentError, LaurentPoly, MonomialImage, MonomialMap,
    VariableLayout, WeylGroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("degrees ({0}, {1}) are not coprime")]
    Degree(u32, u32),
    #[error("torus coordinates must be nonzero")]
    ZeroCoordinate,
    #[error("q = {0} is not a prime power >= 2")]
    BaseField(u64),
    #[error("place {0:?} must have degree >= 1")]
    PlaceDegree(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// The constant field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseField {
    q: u64,
}

impl BaseField {
    pub fn new(q: u64) -> Result<Self, TorusError> {
        if q < 2 || smallest_prime_factor(q).is_none_or(|p| !is_power_of(q, p)) {
            return Err(TorusError::BaseField(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q^degree`, if it fits in 128 bits.
    pub fn residue_cardinality(&self, place: &Place) -> Option<u128> {
        (self.q as u128).checked_pow(place.degree)
    }
}

fn smallest_prime_factor(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return Some(p);
        }
        p += 1;
    }
    Some(n)
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// An abstract place: an identifier and its degree over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Place {
    pub id: String,
    pub degree: u32,
}

impl Place {
    pub fn new(id: impl Into<String>, degree: u32) -> Result<Self, TorusError> {
        let id = id.into();
        if degree == 0 {
            return Err(TorusError::PlaceDegree(id));
        }
        Ok(Self { id, degree })
    }
}

/// A point of `(Q(i)^×)^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<GaussianRational>", into = "Vec<GaussianRational>")]
pub struct TorusPoint(Vec<GaussianRational>);

impl TorusPoint {
    pub fn new(coords: Vec<GaussianRational>) -> Result<Self, TorusError> {
        if coords.iter().any(Zero::is_zero) {
            return Err(TorusError::ZeroCoordinate);
        }
        Ok(Self(coords))
    }

    pub fn ones(d: usize) -> Self {
        Self(vec![GaussianRational::one(); d])
    }

    pub fn from_integers(coords: &[i64]) -> Result<Self, TorusError> {
        Self::new(coords.iter().map(|&n| GaussianRational::from(n)).collect())
    }

    pub fn coords(&self) -> &[GaussianRational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn check_dim(&self, other: &Self) -> Result<(), TorusError> {
        if self.dim() != other.dim() {
            return Err(TorusError::Dimension(format!(
                "points of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.check_dim(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect()))
    }

    /// Componentwise `self / other`.
    pub fn div(&self, other: &Self) -> Result<Self, TorusError> {
        self.check_dim(other)?;
        Ok(Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_div(b).expect("torus coordinates are nonzero"))
                .collect(),
        ))
    }

    pub fn pow(&self, k: i64) -> Self {
        Self(
            self.0
                .iter()
                .map(|c| c.pow(k).expect("torus coordinates are nonzero"))
                .collect(),
        )
    }

    /// The image under the cocharacter map with integer matrix `m`:
    /// coordinate `j` of the result is `Π_i self[i]^m[j][i]`.
    pub fn apply_exponent_matrix(&self, m: &[Vec<i64>]) -> Result<Self, TorusError> {
        let mut out = Vec::with_capacity(m.len());
        for row in m {
            if row.len() != self.dim() {
                return Err(TorusError::Dimension(format!(
                    "matrix row of length {} applied to a point of dimension {}",
                    row.len(),
                    self.dim()
                )));
            }
            let mut v = GaussianRational::one();
            for (c, &k) in self.0.iter().zip(row) {
                v *= &c.pow(k).expect("torus coordinates are nonzero");
            }
            out.push(v);
        }
        Ok(Self(out))
    }

    pub fn canonical_key(&self) -> String {
        self.0
            .iter()
            .map(GaussianRational::canonical_key)
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl TryFrom<Vec<GaussianRational>> for TorusPoint {
    type Error = TorusError;
    fn try_from(v: Vec<GaussianRational>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<TorusPoint> for Vec<GaussianRational> {
    fn from(p: TorusPoint) -> Self {
        p.0
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A `W`-orbit, with the lexicographically least serialized point as representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRep {
    representative: TorusPoint,
    points: Vec<TorusPoint>,
}

impl OrbitRep {
    pub fn representative(&self) -> &TorusPoint {
        &self.representative
    }

    /// Orbit members sorted by canonical key.
    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.points.iter().any(|q| q == p)
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }
}

pub fn orbit(point: &TorusPoint, group: &WeylGroup) -> Result<OrbitRep, TorusError> {
    if point.dim() != group.dim() {
        return Err(TorusError::Dimension(format!(
            "point of dimension {} under a group acting on {} coordinates",
            point.dim(),
            group.dim()
        )));
    }
    let mut keyed: Vec<(String, TorusPoint)> = Vec::with_capacity(group.order());
    for w in group.elements() {
        let p = TorusPoint(w.apply_point(point.coords())?);
        let key = p.canonical_key();
        if !keyed.iter().any(|(k, _)| *k == key) {
            keyed.push((key, p));
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let points: Vec<TorusPoint> = keyed.into_iter().map(|(_, p)| p).collect();
    Ok(OrbitRep {
        representative: points[0].clone(),
        points,
    })
}

pub fn same_orbit(p: &TorusPoint, q: &TorusPoint, group: &WeylGroup) -> Result<bool, TorusError> {
    p.check_dim(q)?;
    Ok(orbit(p, group)?.contains(q))
}

/// Bézout data `a·n1 + b·n2 = gcd`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bezout {
    pub gcd: u32,
    pub a: i64,
    pub b: i64,
}

pub fn extended_gcd(n1: u32, n2: u32) -> Bezout {
    let e = (n1 as i64).extended_gcd(&(n2 as i64));
    Bezout {
        gcd: e.gcd as u32,
        a: e.x,
        b: e.y,
    }
}

fn coprime_bezout(n1: u32, n2: u32) -> Result<Bezout, TorusError> {
    let e = extended_gcd(n1, n2);
    if n1 == 0 || n2 == 0 || e.gcd != 1 {
        return Err(TorusError::Degree(n1, n2));
    }
    Ok(e)
}

/// `z ↦ z^{deg v}`, the restriction of a base-torus point to the place `v`.
pub fn embed_diagonal(z: &TorusPoint, v: &Place) -> TorusPoint {
    z.pow(v.degree as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lift {
    Lifted(GaussianRational),
    NotOnDiagonal,
}

/// Recovers `z` with `z^n1 = x` and `z^n2 = y`, or reports that no such `z` exists.
pub fn diagonal_lift(
    x: &GaussianRational,
    y: &GaussianRational,
    n1: u32,
    n2: u32,
) -> Result<Lift, TorusError> {
    let bz = coprime_bezout(n1, n2)?;
    if x.is_zero() || y.is_zero() {
        return Err(TorusError::ZeroCoordinate);
    }
    let z = x.pow(bz.a).expect("nonzero") * y.pow(bz.b).expect("nonzero");
    if z.pow(n1 as i64).as_ref() == Some(x) && z.pow(n2 as i64).as_ref() == Some(y) {
        Ok(Lift::Lifted(z))
    } else {
        Ok(Lift::NotOnDiagonal)
    }
}

/// The layout `[x_place: d, y_place: d]` carrying polynomials on a coprime pair.
pub fn pair_layout(x_place: &str, y_place: &str, d: usize) -> Result<Arc<VariableLayout>, TorusError> {
    Ok(VariableLayout::new(vec![
        Block {
            place: x_place.to_string(),
            rank: d,
        },
        Block {
            place: y_place.to_string(),
            rank: d,
        },
    ])?
    .shared())
}

/// Rewrites a polynomial in base coordinates `u_1..u_d` as a polynomial on
/// the pair of places, via `u_i ↦ x_i^a · y_i^b`.
pub fn lift_poly(
    p: &LaurentPoly,
    n1: u32,
    n2: u32,
    x_place: &str,
    y_place: &str,
) -> Result<LaurentPoly, TorusError> {
    let bz = coprime_bezout(n1, n2)?;
    let blocks = p.layout().blocks();
    if blocks.len() != 1 {
        return Err(TorusError::Dimension(format!(
            "lift_poly expects a single block, got {}",
            blocks.len()
        )));
    }
    let d = blocks[0].rank;
    let target = pair_layout(x_place, y_place, d)?;
    let images = (0..d)
        .map(|i| {
            let mut e = vec![0; 2 * d];
            e[i] = bz.a;
            e[d + i] = bz.b;
            MonomialImage {
                coeff: GaussianRational::one(),
                exponents: e,
            }
        })
        .collect();
    Ok(p.substitute(&MonomialMap::new(target, images)?)?)
}

/// Restriction of `[x: d, y: d]` polynomials to the shifted diagonal family
/// `x_i = beta_x[i]·u_i^n1`, `y_i = beta_y[i]·u_i^n2`.
pub fn shifted_diagonal_map(
    beta_x: &TorusPoint,
    beta_y: &TorusPoint,
    n1: u32,
    n2: u32,
    target: Arc<VariableLayout>,
) -> Result<MonomialMap, TorusError> {
    beta_x.check_dim(beta_y)?;
    let d = beta_x.dim();
    if target.len() != d {
        return Err(TorusError::Dimension(format!(
            "family layout has {} variables, expected {d}",
            target.len()
        )));
    }
    let mut images = Vec::with_capacity(2 * d);
    for (beta, n) in [(beta_x, n1), (beta_y, n2)] {
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = n as i64;
            images.push(MonomialImage {
                coeff: beta.coords()[i].clone(),
                exponents: e,
            });
        }
    }
    Ok(MonomialMap::new(target, images)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64, c: i64, d: i64) -> GaussianRational {
        GaussianRational::from_parts(a, b, c, d)
    }

    #[test]
    fn base_field_prime_powers() {
        for q in [2, 3, 4, 8, 9, 25, 27, 49, 121] {
            assert!(BaseField::new(q).is_ok(), "{q}");
        }
        for q in [0, 1, 6, 10, 12, 18] {
            assert_eq!(BaseField::new(q), Err(TorusError::BaseField(q)));
        }
        let f = BaseField::new(4).unwrap();
        assert_eq!(f.residue_cardinality(&Place::new("v", 3).unwrap()), Some(64));
    }

    #[test]
    fn place_degree_positive() {
        assert!(Place::new("v", 0).is_err());
    }

    #[test]
    fn extended_gcd_examples() {
        assert_eq!(extended_gcd(2, 3), Bezout { gcd: 1, a: -1, b: 1 });
        let e = extended_gcd(5, 5);
        assert_eq!(e.gcd, 5);
        assert_eq!(5 * e.a + 5 * e.b, 5);
        let e = extended_gcd(6, 35);
        assert_eq!(e.gcd, 1);
        assert_eq!(6 * e.a + 35 * e.b, 1);
        assert_eq!((e.a, e.b), (6, -1));
    }

    #[test]
    fn embed_examples() {
        let v1 = Place::new("v", 1).unwrap();
        let v2 = Place::new("w", 2).unwrap();
        let i = TorusPoint::new(vec![GaussianRational::i()]).unwrap();
        assert_eq!(embed_diagonal(&i, &v2), TorusPoint::from_integers(&[-1]).unwrap());
        let z = TorusPoint::new(vec![g(3, 5, 4, 5)]).unwrap();
        assert_eq!(embed_diagonal(&z, &v1), z);
        assert_eq!(
            embed_diagonal(&z, &v2),
            TorusPoint::new(vec![g(-7, 25, 24, 25)]).unwrap()
        );
    }

    #[test]
    fn diagonal_lift_examples() {
        let x = g(-7, 25, 24, 25);
        let y = g(-117, 125, 44, 125);
        assert_eq!(diagonal_lift(&x, &y, 2, 3).unwrap(), Lift::Lifted(g(3, 5, 4, 5)));
        let one = GaussianRational::one();
        let m1 = -GaussianRational::one();
        assert_eq!(diagonal_lift(&one, &m1, 2, 3).unwrap(), Lift::Lifted(m1.clone()));
        assert_eq!(diagonal_lift(&m1, &one, 2, 3).unwrap(), Lift::NotOnDiagonal);
        assert_eq!(diagonal_lift(&one, &one, 2, 4), Err(TorusError::Degree(2, 4)));
        assert_eq!(
            diagonal_lift(&GaussianRational::zero(), &one, 2, 3),
            Err(TorusError::ZeroCoordinate)
        );
    }

    #[test]
    fn zero_coordinate_rejected() {
        assert_eq!(
            TorusPoint::new(vec![GaussianRational::one(), GaussianRational::zero()]),
            Err(TorusError::ZeroCoordinate)
        );
        let bad: Result<TorusPoint, _> = serde_json::from_str(r#"[["0","0"]]"#);
        assert!(bad.is_err());
    }

    #[test]
    fn lift_poly_examples() {
        let u = VariableLayout::single("u", 1).shared();
        let pair = pair_layout("x", "y", 1).unwrap();
        let p = LaurentPoly::variable(u.clone(), 0, 1)
            .unwrap()
            .checked_add(&LaurentPoly::variable(u.clone(), 0, -1).unwrap())
            .unwrap();
        let expect = LaurentPoly::from_terms(
            pair.clone(),
            [
                (vec![-1, 1], GaussianRational::one()),
                (vec![1, -1], GaussianRational::one()),
            ],
        )
        .unwrap();
        assert_eq!(lift_poly(&p, 2, 3, "x", "y").unwrap(), expect);
        assert_eq!(
            lift_poly(&LaurentPoly::one(u.clone()), 2, 3, "x", "y").unwrap(),
            LaurentPoly::one(pair.clone())
        );
        let sq = LaurentPoly::variable(u.clone(), 0, 2).unwrap();
        assert_eq!(
            lift_poly(&sq, 2, 3, "x", "y").unwrap(),
            LaurentPoly::monomial(pair, vec![-2, 2], GaussianRational::one()).unwrap()
        );
        assert!(matches!(
            lift_poly(&sq, 2, 4, "x", "y"),
            Err(TorusError::Degree(2, 4))
        ));
    }

    #[test]
    fn lift_poly_round_trip_through_family() {
        let u = VariableLayout::single("u", 1).shared();
        let p = LaurentPoly::from_terms(
            u.clone(),
            [
                (vec![3], g(1, 2, 0, 1)),
                (vec![-5], g(0, 1, 2, 3)),
                (vec![0], GaussianRational::from(4)),
            ],
        )
        .unwrap();
        let lifted = lift_poly(&p, 3, 4, "x", "y").unwrap();
        let map = shifted_diagonal_map(&TorusPoint::ones(1), &TorusPoint::ones(1), 3, 4, u).unwrap();
        assert_eq!(lifted.substitute(&map).unwrap(), p);
    }

    #[test]
    fn orbit_examples() {
        let inv = WeylGroup::inversion(1);
        let two = TorusPoint::from_integers(&[2]).unwrap();
        let half = TorusPoint::new(vec![GaussianRational::from_ratio(1, 2)]).unwrap();
        let o = orbit(&two, &inv).unwrap();
        assert_eq!(o.len(), 2);
        assert!(o.contains(&two) && o.contains(&half));
        // "1/2|0" < "2|0"
        assert_eq!(o.representative(), &half);
        assert!(same_orbit(&two, &half, &inv).unwrap());

        let s2 = WeylGroup::symmetric(2);
        let a = TorusPoint::from_integers(&[2, 3]).unwrap();
        let b = TorusPoint::from_integers(&[3, 2]).unwrap();
        let c = TorusPoint::from_integers(&[2, 5]).unwrap();
        assert!(same_orbit(&a, &b, &s2).unwrap());
        assert!(!same_orbit(&a, &c, &s2).unwrap());
        assert!(orbit(&two, &s2).is_err());
        // A fixed point has a one-element orbit.
        assert_eq!(orbit(&TorusPoint::from_integers(&[-1]).unwrap(), &inv).unwrap().len(), 1);
    }

    #[test]
    fn exponent_matrix_image() {
        let p = TorusPoint::from_integers(&[2, 3]).unwrap();
        let m = vec![vec![1, 1], vec![0, -1]];
        assert_eq!(
            p.apply_exponent_matrix(&m).unwrap(),
            TorusPoint::new(vec![GaussianRational::from(6), GaussianRational::from_ratio(1, 3)])
                .unwrap()
        );
    }
}
