//! Named bordism pipelines: structure module → resolution → chart →
//! collapse certificate → groups, with odd-primary constants attached.

use std::fmt;

use thiserror::Error;

use crate::catalog::catalog;
use crate::decompose::{decompose_through, iso_up_to_degree, IsoResult, ModuleDecomposition};
use crate::ext::{assemble_groups, collapse_certificate, ext_of, ExtChart, ExtError, GroupEntry};
use crate::groups::AbelianGroup;
use crate::module::GradedA1Module;
use crate::space::{named_structure, SpaceError, STRUCTURE_NAMES};

/// Highest degree a pipeline will report: the spin → ko approximation is an
/// isomorphism on homotopy only below degree 8.
pub const CONNECTIVITY_BOUND: i32 = 7;

/// Adams filtration searched by every pipeline.
pub const PIPELINE_MAX_S: usize = 12;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown pipeline {0:?}")]
    UnknownPipeline(String),
    #[error("degree {0} is beyond the connectivity bound: MTSpin → ko is only 7-connected, so degrees above {CONNECTIVITY_BOUND} are refused")]
    BeyondConnectivity(i32),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Ext(#[from] ExtError),
}

/// Odd-primary information merged into a 2-primary answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OddPart {
    /// A documented constant together with where it comes from.
    Documented { value: String, source: &'static str },
    AssumedTrivial,
}

impl fmt::Display for OddPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Documented { value, source } => write!(f, "{value} [{source}]"),
            Self::AssumedTrivial => write!(f, "assumed trivial"),
        }
    }
}

/// Certification flags carried by each reported group.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub certified: bool,
    pub tower_at_boundary: bool,
    pub notes: Vec<String>,
}

/// One bordism group: 2-primary structure plus odd-primary provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub degree: i32,
    pub free_rank: usize,
    /// Orders of the cyclic 2-power summands, largest first.
    pub torsion: Vec<u64>,
    pub odd_part: OddPart,
    pub flags: Flags,
}

impl GroupDescriptor {
    #[must_use]
    pub fn group(&self) -> AbelianGroup {
        AbelianGroup::new(self.free_rank, self.torsion.iter().map(|o| o.trailing_zeros()).collect())
    }

    fn from_entry(e: &GroupEntry, odd_part: OddPart) -> Self {
        Self {
            degree: e.degree,
            free_rank: e.group.free_rank,
            torsion: e.group.torsion.iter().map(|&k| 1u64 << k).collect(),
            odd_part,
            flags: Flags { certified: e.certified, tower_at_boundary: e.tower_at_boundary, notes: e.notes.clone() },
        }
    }
}

/// A registered pipeline.
#[derive(Clone, Copy, Debug)]
pub struct PipelineInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub default_through: i32,
    odd: fn(i32) -> OddPart,
}

impl PipelineInfo {
    #[must_use]
    pub fn odd_part(&self, degree: i32) -> OddPart {
        (self.odd)(degree)
    }
}

fn assumed(_: i32) -> OddPart {
    OddPart::AssumedTrivial
}

fn gm_odd(k: i32) -> OddPart {
    let value = match k {
        0 => "Z[1/2]",
        4 => "Z[1/2]^2",
        _ => "0",
    };
    OddPart::Documented { value: value.into(), source: "GM odd-primary lemma: base change to MTSO kills the twist; AHSS for Ω^SO(BO2)[1/2]" }
}

fn no_odd_torsion(source: &'static str) -> impl Fn(i32) -> OddPart {
    move |_| OddPart::Documented { value: "no odd torsion".into(), source }
}

fn spin_o2_odd(k: i32) -> OddPart {
    no_odd_torsion("spin-O2: no odd-primary torsion, argued as for GM")(k)
}

fn sigma_bo2_odd(k: i32) -> OddPart {
    no_odd_torsion("Ω^Spin((BO2)^{σ-1}): no odd-primary torsion in the complementary summand")(k)
}

fn pin_minus_o2_odd(k: i32) -> OddPart {
    no_odd_torsion("pin⁻-O2: odd-primary argument as in the other computations")(k)
}

pub const PIPELINES: [PipelineInfo; 13] = [
    PipelineInfo { name: "GM", description: "Guillou–Marin: (MO2, 0, U)-twisted spin", default_through: 5, odd: gm_odd },
    PipelineInfo { name: "KTminus", description: "Kirby–Taylor pin⁻ pairs", default_through: 4, odd: assumed },
    PipelineInfo { name: "KTplus", description: "Kirby–Taylor pin⁺ pairs", default_through: 4, odd: assumed },
    PipelineInfo { name: "FK", description: "Freedman–Kirby: (BSO2, w2)-twisted spin", default_through: 4, odd: assumed },
    PipelineInfo { name: "FKO", description: "unoriented Freedman–Kirby", default_through: 4, odd: assumed },
    PipelineInfo { name: "SpinO2", description: "spin-O2", default_through: 5, odd: spin_o2_odd },
    PipelineInfo { name: "SigmaBO2", description: "Ω^Spin((BO2)^{σ-1})", default_through: 5, odd: sigma_bo2_odd },
    PipelineInfo { name: "TauMinus", description: "Ω^Spin(BO1×BO2; τ⁻)", default_through: 3, odd: assumed },
    PipelineInfo { name: "TauPlus", description: "Ω^Spin(BO1×BO2; τ⁺)", default_through: 4, odd: assumed },
    PipelineInfo { name: "PinMinusO2", description: "pin⁻-O2", default_through: 4, odd: pin_minus_o2_odd },
    PipelineInfo { name: "PinMinus", description: "pin⁻", default_through: 6, odd: assumed },
    PipelineInfo { name: "PinPlus", description: "pin⁺", default_through: 4, odd: assumed },
    PipelineInfo { name: "MV_a_ab", description: "Ω^Spin(BO1×BO1; a, ab)", default_through: 4, odd: assumed },
];

#[must_use]
pub fn pipeline_info(name: &str) -> Option<&'static PipelineInfo> {
    PIPELINES.iter().find(|p| p.name == name)
}

/// The chart behind a pipeline: window `max_t = through + S + 1`, module known
/// six degrees further so that every stage of the resolution is exact.
///
/// # Errors
/// Unknown names and degrees past the connectivity bound.
pub fn pipeline_chart(name: &str, through: i32) -> Result<ExtChart, PipelineError> {
    if pipeline_info(name).is_none() && !STRUCTURE_NAMES.contains(&name) {
        return Err(PipelineError::UnknownPipeline(name.to_string()));
    }
    if through > CONNECTIVITY_BOUND {
        return Err(PipelineError::BeyondConnectivity(through));
    }
    let max_t = through + PIPELINE_MAX_S as i32 + 1;
    let m = named_structure(name, max_t + 6)?;
    Ok(ext_of(&m, PIPELINE_MAX_S, max_t)?)
}

/// Bordism groups of a named structure in degrees `0..=through`.
///
/// # Errors
/// Unknown names, `through > 7`, or a failing resolution.
pub fn run_pipeline(name: &str, through: i32) -> Result<Vec<GroupDescriptor>, PipelineError> {
    let info = pipeline_info(name).ok_or_else(|| PipelineError::UnknownPipeline(name.to_string()))?;
    let chart = pipeline_chart(name, through)?;
    let cert = collapse_certificate(&chart);
    let report = assemble_groups(&chart, &cert, through);
    Ok(report.entries.iter().filter(|e| e.degree >= 0).map(|e| GroupDescriptor::from_entry(e, info.odd_part(e.degree))).collect())
}

/// Generic catalog candidates, in the order they are tried.
pub const CANDIDATES: [&str; 7] = ["M1", "M0", "R3", "R2", "J", "Q", "F2"];

/// Known summands of a structure, listed as (catalog name, degree).
#[must_use]
pub fn reference_summands(name: &str) -> Option<&'static [(&'static str, i32)]> {
    Some(match name {
        "GM" => &[("M1", 0), ("M0", 4), ("F2", 6)],
        "SpinO2" => &[("R2", 0), ("A1free", 3), ("Q", 4), ("A1free", 5)],
        "J⊗PinMinus" => &[("R3", 0), ("A1free", 1), ("A1free", 2)],
        "KTminus" | "KTplus" => &[("A1free", 0), ("A1free", 2), ("A1free", 4), ("A1free", 4), ("A1free", 4)],
        "TauMinusComplement" => &[("A1free", 2), ("A1free", 3), ("A1free", 4), ("M1", 4)],
        "PinMinusO2" => &[("R3", 0), ("A1free", 1), ("A1free", 2), ("A1free", 2), ("A1free", 3), ("A1free", 4), ("A1free", 4)],
        _ => return None,
    })
}

fn catalog_module(name: &str) -> GradedA1Module {
    catalog(name, 16).expect("catalog names are valid")
}

/// Splits off free summands, then matches catalog pieces: the structure's
/// reference summands first, then the generic candidates.
///
/// # Errors
/// Unknown names and negative degrees.
pub fn decompose_structure(name: &str, n: i32) -> Result<ModuleDecomposition, PipelineError> {
    let m = named_structure(name, n + 6)?;
    let hints: Vec<(String, i32, GradedA1Module)> = reference_summands(name)
        .unwrap_or(&[])
        .iter()
        .map(|&(c, d)| (c.to_string(), d, catalog_module(c)))
        .collect();
    let candidates: Vec<(String, GradedA1Module)> = CANDIDATES.iter().map(|&c| (c.to_string(), catalog_module(c))).collect();
    Ok(decompose_through(&m, n, &hints, &candidates))
}

/// Summands of a decomposition as sorted (name, degree) pairs, free summands named "A1free".
#[must_use]
pub fn summand_list(d: &ModuleDecomposition) -> Vec<(String, i32)> {
    let mut out: Vec<(String, i32)> = d.summands.iter().map(|(s, _)| match s {
        crate::decompose::Summand::Free { degree, .. } => ("A1free".to_string(), *degree),
        crate::decompose::Summand::Catalog { name, degree } => (name.clone(), *degree),
    }).collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    out
}

/// Whether a structure is isomorphic through degree `n` to the sum of its
/// reference summands, independently of the decomposition search.
///
/// # Errors
/// Unknown names.
pub fn matches_reference(name: &str, n: i32) -> Result<IsoResult, PipelineError> {
    let m = named_structure(name, n + 6)?.quotient_above(n);
    let mut sum = GradedA1Module::zero("reference");
    for &(c, d) in reference_summands(name).unwrap_or(&[]) {
        if d <= n {
            sum = sum.direct_sum(&catalog_module(c).suspend(d));
        }
    }
    Ok(iso_up_to_degree(&m, &sum.quotient_above(n), n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups(name: &str, through: i32) -> Vec<String> {
        run_pipeline(name, through).unwrap().iter().map(|g| g.group().to_string()).collect()
    }

    #[test]
    fn refuses_beyond_seven() {
        let err = run_pipeline("GM", 8).unwrap_err();
        assert!(matches!(err, PipelineError::BeyondConnectivity(8)));
        assert!(err.to_string().contains("7-connected"));
    }

    #[test]
    fn unknown_pipeline() {
        assert!(matches!(run_pipeline("Nope", 3), Err(PipelineError::UnknownPipeline(_))));
    }

    #[test]
    fn pin_plus_classical() {
        assert_eq!(groups("PinPlus", 4), ["Z/2", "0", "Z/2", "Z/2", "Z/16"]);
    }

    #[test]
    fn gm_odd_part_is_documented() {
        let g = run_pipeline("GM", 4).unwrap();
        assert_eq!(g[4].odd_part, gm_odd(4));
        assert!(g[4].odd_part.to_string().starts_with("Z[1/2]^2"));
        assert_eq!(run_pipeline("FK", 1).unwrap()[0].odd_part, OddPart::AssumedTrivial);
    }
}
