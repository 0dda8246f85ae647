//! Construction of the isolating multiplier.
//!
//! For each Eisenstein datum σ and each pair `(w, w′) ∈ W × W` a test place
//! `v_{w,w′}` and a Hecke element `T_{w,w′}` there are chosen, together with a
//! polynomial `T_{w,w′,∞}` on the coprime-degree pair `v_∞` that agrees with
//! `T_{w,w′}` along σ's family but not at the twisted parameter of π. The
//! matrix `T_{w,w′} − T_{w,w′,∞}∘(ω,ω′)` is combined by weighted column sums
//! into `μ_σ`, the product of the columns. A further factor `μ₀` separates π
//! from the cuspidal representations that are not nearly equivalent to it.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{
    GaussianRational, LaurentError, LaurentPoly, MonomialImage, MonomialMap, SignedPermutation,
    VariableLayout, WeylGroup,
};
use crate::satake::{separating_invariant, trace, SatakeError, SphericalHeckeElement};
use crate::spectrum::{nearly_equivalent, ConfigError, CuspidalDatum, SpectrumConfig, TargetRep};
use crate::torus::{
    diagonal_lift, embed_diagonal, lift_poly, pair_layout, same_orbit, shifted_diagonal_map, Lift,
    Place, TorusError, TorusPoint,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapReason {
    NoCandidates,
    AllFail,
}

impl fmt::Display for CapReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapReason::NoCandidates => write!(f, "no candidate test places are configured"),
            CapReason::AllFail => write!(f, "all candidate test places fail the test-place condition"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsolatorError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(
        "CAPDetected: π is CAP relative to the configured data for Eisenstein datum {sigma:?}, \
         case (w,w') = {pair} [{case}]: {reason}"
    )]
    CapDetected {
        sigma: String,
        pair: PairLabel,
        case: CaseTag,
        reason: CapReason,
    },
    #[error(transparent)]
    Separation(#[from] SatakeError),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// `(w, w′)` by 1-based positions in the Weyl group's element list (`w1` is the identity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLabel(pub usize, pub usize);

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(w{}, w{})", self.0 + 1, self.1 + 1)
    }
}

/// Whether the shift `λ_∞ = α^{(w,w′)} − β` at `v_∞` lies on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseTag {
    /// The lift `λ♯` in base coordinates.
    Diagonal { lambda: TorusPoint },
    /// 1-based coordinate whose pair does not lift.
    OffDiagonal { coordinate: usize },
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::Diagonal { lambda } => write!(f, "diagonal, λ♯ = {lambda}"),
            CaseTag::OffDiagonal { coordinate } => write!(f, "off-diagonal at coordinate {coordinate}"),
        }
    }
}

/// The first coprime-degree pair outside `excluded`, in configuration order.
pub fn choose_v_infty(places: &[Place], excluded: &BTreeSet<String>) -> Result<(Place, Place), ConfigError> {
    let free: Vec<&Place> = places.iter().filter(|p| !excluded.contains(&p.id)).collect();
    for (i, a) in free.iter().enumerate() {
        for b in &free[i + 1..] {
            if num_integer::gcd(a.degree, b.degree) == 1 {
                return Ok(((*a).clone(), (*b).clone()));
            }
        }
    }
    Err(ConfigError::new("places", "no coprime-degree pair outside S"))
}

/// Coordinatewise diagonal lifting of `α_i / β_i`.
pub fn classify_lambda_infty(
    alpha_twisted: &[(GaussianRational, GaussianRational)],
    beta_infty: &[(GaussianRational, GaussianRational)],
    n1: u32,
    n2: u32,
) -> Result<CaseTag, TorusError> {
    if alpha_twisted.len() != beta_infty.len() {
        return Err(TorusError::Dimension("α and β have different ranks".into()));
    }
    let mut lambda = Vec::with_capacity(alpha_twisted.len());
    for (i, ((a1, a2), (b1, b2))) in alpha_twisted.iter().zip(beta_infty).enumerate() {
        let r1 = a1.checked_div(b1).ok_or(TorusError::ZeroCoordinate)?;
        let r2 = a2.checked_div(b2).ok_or(TorusError::ZeroCoordinate)?;
        match diagonal_lift(&r1, &r2, n1, n2)? {
            Lift::Lifted(z) => lambda.push(z),
            Lift::NotOnDiagonal => return Ok(CaseTag::OffDiagonal { coordinate: i + 1 }),
        }
    }
    Ok(CaseTag::Diagonal {
        lambda: TorusPoint::new(lambda)?,
    })
}

fn zip_pairs(x: &TorusPoint, y: &TorusPoint) -> Vec<(GaussianRational, GaussianRational)> {
    x.coords().iter().cloned().zip(y.coords().iter().cloned()).collect()
}

/// The points of σ's family at `v` that π's parameter there must avoid.
fn points_to_avoid(
    case: &CaseTag,
    v: &Place,
    sigma: &CuspidalDatum,
) -> Result<Vec<TorusPoint>, IsolatorError> {
    let beta = sigma
        .beta_at(&v.id)
        .ok_or_else(|| ConfigError::new(format!("eisenstein.{}.beta.{}", sigma.label, v.id), "missing β"))?;
    Ok(match case {
        CaseTag::Diagonal { lambda } => {
            let shifted = beta.mul(&embed_diagonal(lambda, v))?;
            let split = lambda.apply_exponent_matrix(&sigma.ell)?;
            let through_ell = beta.mul(&embed_diagonal(&split, v))?;
            if through_ell == shifted {
                vec![shifted]
            } else {
                vec![through_ell, shifted]
            }
        }
        CaseTag::OffDiagonal { .. } => vec![beta.clone()],
    })
}

fn place_ok(
    case: &CaseTag,
    v: &Place,
    pi: &TargetRep,
    sigma: &CuspidalDatum,
    weyl: &WeylGroup,
) -> Result<bool, IsolatorError> {
    let alpha = pi
        .point(&v.id)
        .ok_or_else(|| ConfigError::new(format!("pi.{}", v.id), "missing parameter"))?;
    for p in points_to_avoid(case, v, sigma)? {
        if same_orbit(alpha, &p, weyl)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Picks the first candidate (unused ones first) where π's parameter is off
/// σ's family in the sense required by `case`.
pub fn select_test_place<'a>(
    case: &CaseTag,
    candidates: &'a [Place],
    pi: &TargetRep,
    sigma: &CuspidalDatum,
    weyl: &WeylGroup,
    used: &BTreeSet<String>,
) -> Result<Result<&'a Place, CapReason>, IsolatorError> {
    if candidates.is_empty() {
        return Ok(Err(CapReason::NoCandidates));
    }
    let (fresh, reused): (Vec<&Place>, Vec<&Place>) = candidates.iter().partition(|p| !used.contains(&p.id));
    for v in fresh.into_iter().chain(reused) {
        if place_ok(case, v, pi, sigma, weyl)? {
            return Ok(Ok(v));
        }
    }
    Ok(Err(CapReason::AllFail))
}

/// `D = x_i^{n2}·y_i^{−n1} − β1_i^{n2}·β2_i^{−n1}` on the `v_∞` layout; it
/// vanishes identically on the β-shifted diagonal.
pub fn vanishing_on_shifted_diagonal(
    beta_x: &TorusPoint,
    beta_y: &TorusPoint,
    coordinate: usize,
    n1: u32,
    n2: u32,
    layout: &Arc<VariableLayout>,
) -> Result<LaurentPoly, IsolatorError> {
    let d = beta_x.dim();
    if coordinate == 0 || coordinate > d || layout.len() != 2 * d {
        return Err(IsolatorError::Internal(format!(
            "witness coordinate {coordinate} for rank {d}"
        )));
    }
    let i = coordinate - 1;
    let mut e = vec![0; 2 * d];
    e[i] = n2 as i64;
    e[d + i] = -(n1 as i64);
    let c = beta_x.coords()[i].pow(n2 as i64).expect("nonzero")
        * beta_y.coords()[i].pow(-(n1 as i64)).expect("nonzero");
    let mono = LaurentPoly::monomial(layout.clone(), e, GaussianRational::one())?;
    Ok(mono.checked_sub(&LaurentPoly::constant(layout.clone(), c))?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TInfty {
    pub poly: LaurentPoly,
    /// The multiple of the vanishing polynomial added in the off-diagonal case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<u8>,
}

/// Inputs to [`build_t_infty`] describing one `(w, w′)` pair.
pub struct PairInputs<'a> {
    pub case: &'a CaseTag,
    pub test_place: &'a Place,
    pub beta_v: &'a TorusPoint,
    pub alpha_v: &'a TorusPoint,
    pub v_inf: (&'a Place, &'a Place),
    pub beta_inf: (&'a TorusPoint, &'a TorusPoint),
    pub alpha_twisted: (&'a TorusPoint, &'a TorusPoint),
}

/// `u ↦ β·u^n` from a rank-`d` block to the base torus `u`.
fn family_map(beta: &TorusPoint, n: u32, target: &Arc<VariableLayout>) -> Result<MonomialMap, LaurentError> {
    let d = beta.dim();
    let images = (0..d)
        .map(|j| {
            let mut e = vec![0; d];
            e[j] = n as i64;
            MonomialImage {
                coeff: beta.coords()[j].clone(),
                exponents: e,
            }
        })
        .collect();
    MonomialMap::new(target.clone(), images)
}

/// Builds `T_∞` on the `v_∞` pair with `T_∞(β_∞·(u^{n1}, u^{n2})) = T(β_v·u^{n_v})`
/// identically in `u` and `T_∞(α^{(w,w′)}) ≠ T(α_v)`.
pub fn build_t_infty(t: &SphericalHeckeElement, inp: &PairInputs<'_>) -> Result<TInfty, IsolatorError> {
    let (x, y) = inp.v_inf;
    let (n1, n2) = (x.degree, y.degree);
    let d = inp.beta_v.dim();
    let base = VariableLayout::single("u", d).shared();
    let pair = pair_layout(&x.id, &y.id, d)?;

    let p = t.poly().substitute(&family_map(inp.beta_v, inp.test_place.degree, &base)?)?;
    let lifted = lift_poly(&p, n1, n2, &x.id, &y.id)?;
    let unshift = {
        let inverses = inp.beta_inf.0.coords().iter().chain(inp.beta_inf.1.coords());
        let images = inverses
            .enumerate()
            .map(|(slot, b)| {
                let mut e = vec![0; 2 * d];
                e[slot] = 1;
                MonomialImage {
                    coeff: b.inv().expect("nonzero"),
                    exponents: e,
                }
            })
            .collect();
        MonomialMap::new(pair.clone(), images)?
    };
    let mut poly = lifted.substitute(&unshift)?;

    let alpha_inf: Vec<GaussianRational> = inp
        .alpha_twisted
        .0
        .coords()
        .iter()
        .chain(inp.alpha_twisted.1.coords())
        .cloned()
        .collect();
    let t_alpha_v = t.value_at(inp.alpha_v)?;
    let mut correction = None;
    if let CaseTag::OffDiagonal { coordinate } = inp.case {
        let dpoly = vanishing_on_shifted_diagonal(inp.beta_inf.0, inp.beta_inf.1, *coordinate, n1, n2, &pair)?;
        let d_alpha = dpoly.evaluate(&alpha_inf)?;
        if d_alpha.is_zero() {
            return Err(IsolatorError::Internal(
                "vanishing polynomial is zero at the twisted parameter".into(),
            ));
        }
        let base_value = poly.evaluate(&alpha_inf)?;
        let c = [1u8, 2]
            .into_iter()
            .find(|&c| &base_value + &(GaussianRational::from(c as i64) * &d_alpha) != t_alpha_v)
            .expect("at most one multiple of a nonzero value can fail");
        poly = poly.checked_add(&dpoly.scale(&GaussianRational::from(c as i64)))?;
        correction = Some(c);
    }

    let family = shifted_diagonal_map(inp.beta_inf.0, inp.beta_inf.1, n1, n2, base)?;
    if poly.substitute(&family)? != p {
        return Err(IsolatorError::Internal("T_∞ does not agree with T along the family".into()));
    }
    if poly.evaluate(&alpha_inf)? == t_alpha_v {
        return Err(IsolatorError::Internal(
            "T_∞ agrees with T at the twisted parameter".into(),
        ));
    }
    Ok(TInfty { poly, correction })
}

/// One row of the matrix: the chosen place and Hecke elements for a pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOutcome {
    pub pair: (usize, usize),
    pub case: CaseTag,
    pub place: Place,
    pub t: SphericalHeckeElement,
    pub t_infty: TInfty,
}

fn twist_on(
    layout: &VariableLayout,
    v_inf: (&str, &str),
    w: &SignedPermutation,
    w2: &SignedPermutation,
) -> Vec<SignedPermutation> {
    layout
        .blocks()
        .iter()
        .map(|b| {
            if b.place == v_inf.0 {
                w.clone()
            } else if b.place == v_inf.1 {
                w2.clone()
            } else {
                SignedPermutation::identity(b.rank)
            }
        })
        .collect()
}

/// Entries `T_r − T_{r,∞}∘(ω,ω′)_c` on `layout`, rows and columns in `W × W` pair order.
pub fn assemble_matrix(
    rows: &[PairOutcome],
    weyl: &WeylGroup,
    layout: &Arc<VariableLayout>,
    v_inf: (&str, &str),
) -> Result<Vec<Vec<LaurentPoly>>, IsolatorError> {
    let elems = weyl.elements();
    let twists: Vec<Vec<SignedPermutation>> = weyl
        .pair_indices()
        .into_iter()
        .map(|(i, j)| twist_on(layout, v_inf, &elems[i], &elems[j]))
        .collect();
    rows.iter()
        .map(|r| {
            let t = r.t.poly().reembed(layout)?;
            let ti = r.t_infty.poly.reembed(layout)?;
            twists
                .iter()
                .map(|tw| Ok(t.checked_sub(&ti.act(tw)?)?))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub t: u64,
    pub c: Vec<GaussianRational>,
}

/// `C_i = t^{i−1}` for the least positive integer `t` making every weighted
/// column sum `Σ_i C_i·M_ij` nonzero.
pub fn choose_constants(values: &[Vec<GaussianRational>]) -> Result<Constants, IsolatorError> {
    let n = values.len();
    if values.iter().any(|r| r.len() != n) {
        return Err(IsolatorError::Internal("matrix of values is not square".into()));
    }
    if (0..n).any(|i| values[i][i].is_zero()) {
        return Err(IsolatorError::Internal("zero on the diagonal of the value matrix".into()));
    }
    let limit = (n as u64).pow(2).max(1);
    for t in 1..=limit {
        let tq = GaussianRational::from(t as i64);
        let mut c = Vec::with_capacity(n);
        let mut acc = GaussianRational::one();
        for _ in 0..n {
            c.push(acc.clone());
            acc *= &tq;
        }
        let ok = (0..n).all(|j| {
            let s = (0..n).fold(GaussianRational::zero(), |s, i| s + &c[i] * &values[i][j]);
            !s.is_zero()
        });
        if ok {
            return Ok(Constants { t, c });
        }
    }
    Err(IsolatorError::Internal(format!("no t ≤ {limit} separates the columns")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairAudit {
    pub pair: PairLabel,
    pub case: CaseTag,
    pub place: String,
    pub t: LaurentPoly,
    pub t_infty: TInfty,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaAudit {
    pub label: String,
    pub v_infty: [String; 2],
    pub pairs: Vec<PairAudit>,
    /// `M[r][c]` at π's parameters.
    pub matrix_values: Vec<Vec<GaussianRational>>,
    pub constants: Constants,
    /// `Σ_r C_r·M[r][c]`, the value of each column factor at π.
    pub column_values: Vec<GaussianRational>,
    /// `S_σ`: every place the factor depends on.
    pub places: Vec<String>,
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step2Factor {
    pub label: String,
    pub place: String,
    pub t: LaurentPoly,
    pub trace: GaussianRational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step2Audit {
    pub factors: Vec<Step2Factor>,
    /// Cuspidals nearly equivalent to π; left alone.
    pub nearly_equivalent: Vec<String>,
    /// Cuspidals not nearly equivalent to π but with no separating place
    /// outside `S ∪ ⋃ S_σ`; left out of `μ₀`.
    pub ambiguous: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_infty: Option<[String; 2]>,
    pub eisenstein: Vec<SigmaAudit>,
    pub step2: Step2Audit,
    pub places: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierReport {
    pub mu: LaurentPoly,
    pub normalization: GaussianRational,
    pub audit: Audit,
    /// `μ₀` and each `μ_σ`, on their own layouts.
    pub factors: Vec<LaurentPoly>,
}

fn beta_at<'a>(sigma: &'a CuspidalDatum, place: &str) -> Result<&'a TorusPoint, IsolatorError> {
    sigma
        .beta_at(place)
        .ok_or_else(|| ConfigError::new(format!("eisenstein.{}.beta.{place}", sigma.label), "missing β").into())
}

fn pi_at<'a>(pi: &'a TargetRep, place: &str) -> Result<&'a TorusPoint, IsolatorError> {
    pi.point(place)
        .ok_or_else(|| ConfigError::new(format!("pi.{place}"), "missing parameter").into())
}

fn check_invariant(p: &LaurentPoly, config: &SpectrumConfig, what: &str) -> Result<(), IsolatorError> {
    for b in p.layout().blocks() {
        if !p.is_invariant_block(&b.place, &config.weyl)? {
            return Err(IsolatorError::Internal(format!(
                "{what} is not invariant in the block at {:?}",
                b.place
            )));
        }
    }
    Ok(())
}

/// `μ_σ` for one Eisenstein datum, with its audit.
pub fn build_mu_sigma(
    config: &SpectrumConfig,
    sigma: &CuspidalDatum,
    v_inf: (&Place, &Place),
) -> Result<(LaurentPoly, SigmaAudit), IsolatorError> {
    let weyl = &config.weyl;
    let pi = &config.target;
    let (x, y) = v_inf;
    let alpha1 = pi_at(pi, &x.id)?;
    let alpha2 = pi_at(pi, &y.id)?;
    let beta1 = beta_at(sigma, &x.id)?;
    let beta2 = beta_at(sigma, &y.id)?;
    let candidates: Vec<Place> = config
        .unramified()
        .filter(|p| p.id != x.id && p.id != y.id)
        .cloned()
        .collect();

    let elems = weyl.elements();
    let mut used = BTreeSet::new();
    let mut rows = Vec::new();
    for (i, j) in weyl.pair_indices() {
        let a1 = TorusPoint::new(elems[i].apply_point(alpha1.coords())?)?;
        let a2 = TorusPoint::new(elems[j].apply_point(alpha2.coords())?)?;
        let case = classify_lambda_infty(&zip_pairs(&a1, &a2), &zip_pairs(beta1, beta2), x.degree, y.degree)?;
        let v = match select_test_place(&case, &candidates, pi, sigma, weyl, &used)? {
            Ok(v) => v.clone(),
            Err(reason) => {
                return Err(IsolatorError::CapDetected {
                    sigma: sigma.label.clone(),
                    pair: PairLabel(i, j),
                    case,
                    reason,
                })
            }
        };
        used.insert(v.id.clone());
        let alpha_v = pi_at(pi, &v.id)?;
        let beta_v = beta_at(sigma, &v.id)?;
        let avoid = match &case {
            CaseTag::Diagonal { lambda } => vec![beta_v.mul(&embed_diagonal(lambda, &v))?],
            CaseTag::OffDiagonal { .. } => vec![beta_v.clone()],
        };
        let t = separating_invariant(alpha_v, &avoid, weyl, &v, config.search).map_err(|e| match e {
            SatakeError::SameOrbit => IsolatorError::Internal("test place condition not met".into()),
            other => other.into(),
        })?;
        let t_infty = build_t_infty(
            &t,
            &PairInputs {
                case: &case,
                test_place: &v,
                beta_v,
                alpha_v,
                v_inf,
                beta_inf: (beta1, beta2),
                alpha_twisted: (&a1, &a2),
            },
        )?;
        rows.push(PairOutcome {
            pair: (i, j),
            case,
            place: v,
            t,
            t_infty,
        });
    }

    let mut ids: BTreeSet<&str> = used.iter().map(String::as_str).collect();
    ids.insert(&x.id);
    ids.insert(&y.id);
    let layout = config.layout_for(ids);
    let matrix = assemble_matrix(&rows, weyl, &layout, (&x.id, &y.id))?;
    let point = config.point_on(&layout, pi)?;
    let values = matrix
        .iter()
        .map(|row| row.iter().map(|e| e.evaluate(&point)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    for (k, row) in values.iter().enumerate() {
        if row[k].is_zero() {
            return Err(IsolatorError::Internal(format!("diagonal entry {k} vanishes at π")));
        }
    }
    let constants = choose_constants(&values)?;

    let n = rows.len();
    let mut mu = LaurentPoly::one(layout.clone());
    let mut column_values = Vec::with_capacity(n);
    for col in 0..n {
        let mut column = LaurentPoly::zero(layout.clone());
        for (r, row) in matrix.iter().enumerate() {
            column = column.checked_add(&row[col].scale(&constants.c[r]))?;
        }
        let value = column.evaluate(&point)?;
        if value.is_zero() {
            return Err(IsolatorError::Internal(format!("column {col} vanishes at π")));
        }
        column_values.push(value);
        mu = mu.checked_mul(&column)?;
    }
    check_invariant(&mu, config, "μ_σ")?;
    if mu.evaluate(&point)?.is_zero() {
        return Err(IsolatorError::Internal("μ_σ vanishes at π".into()));
    }

    let audit = SigmaAudit {
        label: sigma.label.clone(),
        v_infty: [x.id.clone(), y.id.clone()],
        pairs: rows
            .into_iter()
            .map(|r| PairAudit {
                pair: PairLabel(r.pair.0, r.pair.1),
                case: r.case,
                place: r.place.id,
                t: r.t.poly().clone(),
                t_infty: r.t_infty,
            })
            .collect(),
        matrix_values: values,
        constants,
        column_values,
        places: layout.blocks().iter().map(|b| b.place.clone()).collect(),
        terms: mu.num_terms(),
    };
    Ok((mu, audit))
}

/// `μ₀ = Π (T_{v_j} − tr π_{j,v_j}(T_{v_j}))` over the cuspidals not nearly
/// equivalent to π, each `v_j` outside `excluded`.
pub fn build_mu_zero(
    config: &SpectrumConfig,
    excluded: &BTreeSet<String>,
) -> Result<(LaurentPoly, Step2Audit), IsolatorError> {
    let pi = &config.target;
    let mut audit = Step2Audit::default();
    let mut factors: Vec<LaurentPoly> = Vec::new();
    for c in &config.cuspidals {
        if nearly_equivalent(pi, &c.rep, &c.exceptions, config) {
            audit.nearly_equivalent.push(c.label.clone());
            continue;
        }
        let mut chosen = None;
        for v in config.unramified().filter(|p| !excluded.contains(&p.id)) {
            let a = pi_at(pi, &v.id)?;
            let b = pi_at(&c.rep, &v.id)?;
            if !same_orbit(a, b, &config.weyl)? {
                chosen = Some((v, a, b));
                break;
            }
        }
        let Some((v, a, b)) = chosen else {
            audit.ambiguous.push(c.label.clone());
            continue;
        };
        let t = separating_invariant(a, std::slice::from_ref(b), &config.weyl, v, config.search)?;
        let rep = c.rep.get(&v.id).expect("parameter present");
        let tr = trace(&t, rep)?;
        let factor = t
            .poly()
            .checked_sub(&LaurentPoly::constant(t.poly().layout().clone(), tr.clone()))?;
        factors.push(factor);
        audit.factors.push(Step2Factor {
            label: c.label.clone(),
            place: v.id.clone(),
            t: t.poly().clone(),
            trace: tr,
        });
    }
    let layout = config.layout_for(audit.factors.iter().map(|f| f.place.as_str()));
    let mut mu0 = LaurentPoly::one(layout.clone());
    for f in &factors {
        mu0 = mu0.checked_mul(&f.reembed(&layout)?)?;
    }
    Ok((mu0, audit))
}

/// The full construction: `μ = π(μ′)⁻¹·μ′` with `μ′ = μ₀·Π_σ μ_σ`.
pub fn build_mu(config: &SpectrumConfig) -> Result<MultiplierReport, IsolatorError> {
    let mut audit = Audit::default();
    let mut sigma_factors = Vec::new();
    let mut excluded = config.ramified.clone();
    if !config.eisenstein.is_empty() {
        let (x, y) = choose_v_infty(&config.places, &config.ramified)?;
        audit.v_infty = Some([x.id.clone(), y.id.clone()]);
        for sigma in &config.eisenstein {
            let (mu_s, a) = build_mu_sigma(config, sigma, (&x, &y))?;
            excluded.extend(a.places.iter().cloned());
            audit.eisenstein.push(a);
            sigma_factors.push(mu_s);
        }
    }
    let (mu0, step2) = build_mu_zero(config, &excluded)?;
    audit.step2 = step2;

    let mut factors = vec![mu0];
    factors.extend(sigma_factors);
    let ids: BTreeSet<String> = factors
        .iter()
        .flat_map(|f| f.layout().blocks().iter().map(|b| b.place.clone()))
        .collect();
    let layout = config.layout_for(ids.iter().map(String::as_str));
    let mut mu = LaurentPoly::one(layout.clone());
    for f in &factors {
        mu = mu.checked_mul(&f.reembed(&layout)?)?;
    }
    let point = config.point_on(&layout, &config.target)?;
    let value = mu.evaluate(&point)?;
    let normalization = value
        .inv()
        .ok_or_else(|| IsolatorError::Internal("μ′ vanishes at π".into()))?;
    check_invariant(&mu, config, "μ")?;
    let mu = mu.scale(&normalization);
    audit.places = layout.blocks().iter().map(|b| b.place.clone()).collect();
    Ok(MultiplierReport {
        mu,
        normalization,
        audit,
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64, c: i64, d: i64) -> GaussianRational {
        GaussianRational::from_parts(a, b, c, d)
    }

    fn n(k: i64) -> GaussianRational {
        GaussianRational::from(k)
    }

    fn places(degrees: &[u32]) -> Vec<Place> {
        degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| Place::new(format!("p{i}"), d).unwrap())
            .collect()
    }

    #[test]
    fn v_infty_choice() {
        let none = BTreeSet::new();
        let (a, b) = choose_v_infty(&places(&[2, 3, 4]), &none).unwrap();
        assert_eq!((a.degree, b.degree), (2, 3));
        assert!(choose_v_infty(&places(&[2, 4, 6]), &none).is_err());
        let (a, b) = choose_v_infty(&places(&[1, 1]), &none).unwrap();
        assert_eq!((a.degree, b.degree), (1, 1));
        let s: BTreeSet<String> = ["p0".to_string()].into();
        let (a, b) = choose_v_infty(&places(&[1, 2, 3]), &s).unwrap();
        assert_eq!((a.id.as_str(), b.id.as_str()), ("p1", "p2"));
    }

    #[test]
    fn classification_examples() {
        let one = (n(1), n(1));
        let alpha = (g(-7, 25, 24, 25), g(-117, 125, 44, 125));
        assert_eq!(
            classify_lambda_infty(&[alpha], std::slice::from_ref(&one), 2, 3).unwrap(),
            CaseTag::Diagonal {
                lambda: TorusPoint::new(vec![g(3, 5, 4, 5)]).unwrap()
            }
        );
        assert_eq!(
            classify_lambda_infty(&[(n(-1), n(1))], std::slice::from_ref(&one), 2, 3).unwrap(),
            CaseTag::OffDiagonal { coordinate: 1 }
        );
        let beta = [(n(2), n(5)), (n(3), n(7))];
        assert_eq!(
            classify_lambda_infty(&beta, &beta, 2, 3).unwrap(),
            CaseTag::Diagonal {
                lambda: TorusPoint::ones(2)
            }
        );
    }

    #[test]
    fn vanishing_polynomial_examples() {
        let l = pair_layout("x", "y", 1).unwrap();
        let one = TorusPoint::ones(1);
        let d = vanishing_on_shifted_diagonal(&one, &one, 1, 2, 3, &l).unwrap();
        let expect = LaurentPoly::from_terms(l.clone(), [(vec![3, -2], n(1)), (vec![0, 0], n(-1))]).unwrap();
        assert_eq!(d, expect);
        assert_eq!(d.evaluate(&[n(-1), n(1)]).unwrap(), n(-2));
        let u = VariableLayout::single("u", 1).shared();
        let fam = shifted_diagonal_map(&one, &one, 2, 3, u).unwrap();
        assert!(d.substitute(&fam).unwrap().is_zero());

        let two = TorusPoint::from_integers(&[2]).unwrap();
        let d = vanishing_on_shifted_diagonal(&two, &one, 1, 2, 3, &l).unwrap();
        assert_eq!(d.constant_term(), n(-8));
    }

    fn inversion_element(place: &Place) -> SphericalHeckeElement {
        let l = VariableLayout::single(place.id.clone(), 1).shared();
        let p = LaurentPoly::variable(l.clone(), 0, 1)
            .unwrap()
            .checked_add(&LaurentPoly::variable(l, 0, -1).unwrap())
            .unwrap();
        SphericalHeckeElement::new(place.clone(), p, &WeylGroup::inversion(1)).unwrap()
    }

    #[test]
    fn t_infty_examples() {
        let v = Place::new("v", 1).unwrap();
        let x = Place::new("x", 2).unwrap();
        let y = Place::new("y", 3).unwrap();
        let t = inversion_element(&v);
        let one = TorusPoint::ones(1);
        let alpha_v = TorusPoint::from_integers(&[2]).unwrap();
        // λ♯ = 3 with β = 1: 3 + 1/3 ≠ 2 + 1/2 at v.
        let ax = TorusPoint::from_integers(&[9]).unwrap();
        let ay = TorusPoint::from_integers(&[27]).unwrap();
        let case = CaseTag::Diagonal {
            lambda: TorusPoint::from_integers(&[3]).unwrap(),
        };
        let built = build_t_infty(
            &t,
            &PairInputs {
                case: &case,
                test_place: &v,
                beta_v: &one,
                alpha_v: &alpha_v,
                v_inf: (&x, &y),
                beta_inf: (&one, &one),
                alpha_twisted: (&ax, &ay),
            },
        )
        .unwrap();
        let l = pair_layout("x", "y", 1).unwrap();
        let expect = LaurentPoly::from_terms(l.clone(), [(vec![-1, 1], n(1)), (vec![1, -1], n(1))]).unwrap();
        assert_eq!(built.poly, expect);
        assert_eq!(built.correction, None);

        // β_∞ = (2, 2): (x/2)⁻¹(y/2) + (x/2)(y/2)⁻¹ = x⁻¹y + xy⁻¹ here, since the
        // shifts cancel in both monomials.
        let b2 = TorusPoint::from_integers(&[2]).unwrap();
        let ax = TorusPoint::from_integers(&[18]).unwrap();
        let ay = TorusPoint::from_integers(&[54]).unwrap();
        let built = build_t_infty(
            &t,
            &PairInputs {
                case: &case,
                test_place: &v,
                beta_v: &one,
                alpha_v: &alpha_v,
                v_inf: (&x, &y),
                beta_inf: (&b2, &b2),
                alpha_twisted: (&ax, &ay),
            },
        )
        .unwrap();
        assert_eq!(built.poly, expect);

        let b3 = TorusPoint::from_integers(&[3]).unwrap();
        let built = build_t_infty(
            &t,
            &PairInputs {
                case: &case,
                test_place: &v,
                beta_v: &one,
                alpha_v: &alpha_v,
                v_inf: (&x, &y),
                beta_inf: (&b2, &b3),
                alpha_twisted: (&TorusPoint::from_integers(&[18]).unwrap(), &TorusPoint::from_integers(&[81]).unwrap()),
            },
        )
        .unwrap();
        // (x/2)⁻¹(y/3) = (2/3)x⁻¹y
        assert_eq!(built.poly.coefficient(&[-1, 1]), GaussianRational::from_ratio(2, 3));
        assert_eq!(built.poly.coefficient(&[1, -1]), GaussianRational::from_ratio(3, 2));
    }

    #[test]
    fn t_infty_off_diagonal_adds_correction() {
        let v = Place::new("v", 1).unwrap();
        let x = Place::new("x", 2).unwrap();
        let y = Place::new("y", 3).unwrap();
        let t = inversion_element(&v);
        let one = TorusPoint::ones(1);
        let ax = TorusPoint::from_integers(&[-1]).unwrap();
        let ay = TorusPoint::from_integers(&[1]).unwrap();
        let case = CaseTag::OffDiagonal { coordinate: 1 };
        let alpha_v = TorusPoint::from_integers(&[2]).unwrap();
        let built = build_t_infty(
            &t,
            &PairInputs {
                case: &case,
                test_place: &v,
                beta_v: &one,
                alpha_v: &alpha_v,
                v_inf: (&x, &y),
                beta_inf: (&one, &one),
                alpha_twisted: (&ax, &ay),
            },
        )
        .unwrap();
        // Lifted part is -2 at (-1, 1) and D is -2 there; T(α_v) = 5/2.
        assert_eq!(built.correction, Some(1));
        assert_eq!(built.poly.evaluate(&[n(-1), n(1)]).unwrap(), n(-4));

        // At α = (-1, -1) the lifted part is 2 and D is -2; with α_v = i the
        // first multiple collides with T(i) = 0.
        let m1 = TorusPoint::from_integers(&[-1]).unwrap();
        let alpha_v = TorusPoint::new(vec![GaussianRational::i()]).unwrap();
        let built = build_t_infty(
            &t,
            &PairInputs {
                case: &case,
                test_place: &v,
                beta_v: &one,
                alpha_v: &alpha_v,
                v_inf: (&x, &y),
                beta_inf: (&one, &one),
                alpha_twisted: (&m1, &m1),
            },
        )
        .unwrap();
        assert_eq!(built.correction, Some(2));
        assert_eq!(built.poly.evaluate(&[n(-1), n(-1)]).unwrap(), n(-2));
    }

    #[test]
    fn constants_examples() {
        let id = vec![vec![n(1), n(0)], vec![n(0), n(1)]];
        assert_eq!(choose_constants(&id).unwrap().c, vec![n(1), n(1)]);
        let m = vec![vec![n(1), n(-1)], vec![n(1), n(1)]];
        let c = choose_constants(&m).unwrap();
        assert_eq!((c.t, c.c), (2, vec![n(1), n(2)]));
        assert_eq!(choose_constants(&[vec![n(5)]]).unwrap().c, vec![n(1)]);
        assert!(matches!(
            choose_constants(&[vec![n(0)]]),
            Err(IsolatorError::Internal(_))
        ));
    }
}
