//! Bundled demonstration spectra.

/// `PGL₂` over `F_2`: rank one, a Borel Eisenstein family, one cuspidal
/// separated in Step 2 and one nearly equivalent to π.
pub const PGL2: &str = include_str!("../data/pgl2.json");

/// Rank two with `W = S₂`.
pub const RANK2: &str = include_str!("../data/rank2.json");

pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "pgl2" => Some(PGL2),
        "rank2" => Some(RANK2),
        _ => None,
    }
}
