use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{nearly_equivalent, restrict_to_family, ConfigError, SpectrumConfig};
use crate::isolator::choose_v_infty;
use crate::laurent::{GaussianRational, LaurentPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyVerdict {
    pub label: String,
    /// Indices of `(ω, ω′)` into the Weyl group's element list.
    pub twist: [usize; 2],
    pub zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspidalVerdict {
    pub label: String,
    pub nearly_equivalent: bool,
    pub value: GaussianRational,
    /// Nearly equivalent cuspidals are not required to vanish.
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub families: Vec<FamilyVerdict>,
    pub cuspidals: Vec<CuspidalVerdict>,
    pub target_value: GaussianRational,
    pub target_pass: bool,
    pub invariant: bool,
    /// Invariance of each separately supplied factor.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factor_invariance: Vec<bool>,
    pub pass: bool,
}

impl VerificationReport {
    /// One line per failing check.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for f in self.families.iter().filter(|f| !f.zero) {
            out.push(format!(
                "family {:?} twist ({}, {}) is not annihilated",
                f.label, f.twist[0], f.twist[1]
            ));
        }
        for c in self.cuspidals.iter().filter(|c| !c.pass) {
            out.push(format!("cuspidal {:?} has value {}", c.label, c.value));
        }
        if !self.target_pass {
            out.push(format!("target value is {}, expected 1", self.target_value));
        }
        if !self.invariant {
            out.push("multiplier is not blockwise Weyl invariant".into());
        }
        for (i, ok) in self.factor_invariance.iter().enumerate() {
            if !ok {
                out.push(format!("factor {i} is not blockwise Weyl invariant"));
            }
        }
        out
    }
}

fn blockwise_invariant(p: &LaurentPoly, config: &SpectrumConfig) -> bool {
    p.layout()
        .blocks()
        .iter()
        .all(|b| b.rank == config.rank && p.is_invariant_block(&b.place, &config.weyl).unwrap_or(false))
}

/// Checks a multiplier against the spectrum: annihilation of every twisted
/// Eisenstein family, vanishing at non-equivalent cuspidals, value 1 at π,
/// and blockwise Weyl invariance. Errors only on malformed input.
pub fn verify(
    mu: &LaurentPoly,
    factors: &[LaurentPoly],
    config: &SpectrumConfig,
) -> Result<VerificationReport, ConfigError> {
    for b in mu.layout().blocks() {
        let path = format!("multiplier.layout.{}", b.place);
        if config.place(&b.place).is_none() {
            return Err(ConfigError::new(path, "unknown place"));
        }
        if config.ramified.contains(&b.place) {
            return Err(ConfigError::new(path, "ramified place"));
        }
        if b.rank != config.rank {
            return Err(ConfigError::new(path, format!("rank {} but configuration rank {}", b.rank, config.rank)));
        }
    }

    // Zero tests are unaffected by a nonzero scalar, and dividing out one
    // coefficient keeps the rest small when μ carries a large normalization.
    let content = mu.terms().next().map(|(_, c)| c.inv().expect("stored coefficients are nonzero"));
    let reduced = match &content {
        Some(c) => mu.scale(c),
        None => mu.clone(),
    };
    let unreduce = |v: GaussianRational| match &content {
        Some(c) => v.checked_div(c).expect("nonzero"),
        None => v,
    };

    let (v1, v2) = choose_v_infty(&config.places, &config.ramified)?;
    let elems = config.weyl.elements();
    let mut families = Vec::new();
    for sigma in &config.eisenstein {
        for (i, j) in config.weyl.pair_indices() {
            let r = restrict_to_family(&reduced, config, sigma, (&v1.id, &v2.id), (&elems[i], &elems[j]))?;
            families.push(FamilyVerdict {
                label: sigma.label.clone(),
                twist: [i, j],
                zero: r.is_zero(),
            });
        }
    }

    let mut cuspidals = Vec::new();
    for c in &config.cuspidals {
        let near = nearly_equivalent(&config.target, &c.rep, &c.exceptions, config);
        let point = config.point_on(mu.layout(), &c.rep)?;
        let value = unreduce(
            reduced
                .evaluate(&point)
                .map_err(|e| ConfigError::new(format!("cuspidals.{}", c.label), e))?,
        );
        cuspidals.push(CuspidalVerdict {
            label: c.label.clone(),
            nearly_equivalent: near,
            pass: near || value.is_zero(),
            value,
        });
    }

    let point = config.point_on(mu.layout(), &config.target)?;
    let target_value = unreduce(reduced.evaluate(&point).map_err(|e| ConfigError::new("pi", e))?);
    let target_pass = target_value.is_one();
    let invariant = blockwise_invariant(mu, config);
    let factor_invariance: Vec<bool> = factors.iter().map(|f| blockwise_invariant(f, config)).collect();

    let pass = families.iter().all(|f| f.zero)
        && cuspidals.iter().all(|c| c.pass)
        && target_pass
        && invariant
        && factor_invariance.iter().all(|&b| b);
    Ok(VerificationReport {
        families,
        cuspidals,
        target_value,
        target_pass,
        invariant,
        factor_invariance,
        pass,
    })
}
