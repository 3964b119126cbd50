//! Filtrations by finite-index normal subgroups and the RFRS conditions.
//!
//! A chain `G = G_0 > G_1 > ⋯` satisfies the conditions at step `i` when
//! `G_{i+1}` is normal of finite index in `G` and contains the kernel of
//! `G_i → G_i^{ab} ⊗ Q`. That kernel is the isolator of `[G_i, G_i]` inside
//! `G_i`, computed exactly on the induced presentation.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{parse_int_row, IntMatrix, LatticeIndex};
use crate::nilpotent::{GroupElement, PcPresentation};
use crate::subgroup::{
    enumerate_normal_subgroups, index, induced_presentation, intersect, is_normal, InducedPresentation,
    Subgroup,
};

#[derive(Clone, Debug)]
pub struct Filtration {
    ambient: PcPresentation,
    chain: Vec<Subgroup>,
}

impl Filtration {
    /// Checks that the chain starts at the whole group, descends strictly and
    /// consists of finite-index subgroups.
    pub fn new(ambient: PcPresentation, chain: Vec<Subgroup>) -> Result<Self> {
        let Some(first) = chain.first() else {
            return Err(Error::MalformedChain("empty chain".into()));
        };
        if chain.iter().any(|s| s.ambient_dim() != ambient.generator_count()) {
            return Err(Error::AmbientMismatch);
        }
        if first != &Subgroup::whole(&ambient) {
            return Err(Error::MalformedChain("the first term must be the whole group".into()));
        }
        for (i, s) in chain.iter().enumerate() {
            if !s.is_full_rank() {
                return Err(Error::MalformedChain(format!("term {i} has infinite index")));
            }
        }
        for (i, w) in chain.windows(2).enumerate() {
            if w[0] == w[1] || !w[1].is_subgroup_of(&ambient, &w[0]) {
                return Err(Error::MalformedChain(format!(
                    "term {} is not a proper subgroup of term {i}",
                    i + 1
                )));
            }
        }
        Ok(Self { ambient, chain })
    }

    /// Chain file: blocks of generator rows separated by blank lines, one
    /// block per term.
    pub fn parse(ambient: PcPresentation, text: &str) -> Result<Self> {
        let chain = parse_subgroup_blocks(&ambient, text)?;
        Self::new(ambient, chain)
    }

    pub fn ambient(&self) -> &PcPresentation {
        &self.ambient
    }

    pub fn chain(&self) -> &[Subgroup] {
        &self.chain
    }
}

/// Parses blank-line separated blocks of coordinate rows into subgroups.
pub fn parse_subgroup_blocks(p: &PcPresentation, text: &str) -> Result<Vec<Subgroup>> {
    let n = p.generator_count();
    let mut blocks: Vec<Vec<Vec<BigInt>>> = vec![Vec::new()];
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !blocks.last().expect("nonempty").is_empty() {
                blocks.push(Vec::new());
            }
            continue;
        }
        let row = parse_int_row(line)?;
        if row.len() != n {
            return Err(Error::Parse(format!("expected {n} integers in `{line}`")));
        }
        blocks.last_mut().expect("nonempty").push(row);
    }
    if blocks.last().is_some_and(Vec::is_empty) {
        blocks.pop();
    }
    blocks
        .into_iter()
        .map(|rows| Subgroup::from_matrix(p, &IntMatrix::from_rows(n, rows)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    /// `G_{i+1}` is normal in `G`.
    pub normal: bool,
    /// `[G : G_{i+1}]`.
    pub index: BigInt,
    /// `ker(G_i → G_i^{ab} ⊗ Q) ⊆ G_{i+1}`.
    pub kernel_contained: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RfrsReport {
    pub steps: Vec<StepReport>,
    pub overall: bool,
    /// Intersection of the finite chain, i.e. its last term.
    pub intersection: Subgroup,
}

/// The kernel of `S → S^{ab} ⊗ Q` as an ambient subgroup.
pub fn rational_ab_kernel(p: &PcPresentation, s: &Subgroup) -> Result<Subgroup> {
    let ind = induced_presentation(p, s)?;
    let q = &ind.presentation;
    let derived = q
        .lower_central_series()
        .get(1)
        .cloned()
        .unwrap_or_else(|| Subgroup::trivial(q));
    let iso = q.isolator(&derived)?;
    Ok(ind.subgroup_to_ambient(p, &iso))
}

pub fn verify_rfrs_chain(f: &Filtration) -> Result<RfrsReport> {
    let p = &f.ambient;
    if p.class() > 2 {
        return Err(Error::ClassTooLarge(p.class()));
    }
    let mut steps = Vec::new();
    for w in f.chain.windows(2) {
        let kernel = rational_ab_kernel(p, &w[0])?;
        let index = match index(p, &w[1])? {
            LatticeIndex::Finite(k) => k,
            LatticeIndex::Infinite => return Err(Error::InfiniteIndex),
        };
        steps.push(StepReport {
            normal: is_normal(p, &w[1]),
            index,
            kernel_contained: kernel.is_subgroup_of(p, &w[1]),
        });
    }
    let overall = steps.iter().all(|s| s.normal && s.kernel_contained);
    Ok(RfrsReport {
        steps,
        overall,
        intersection: f.chain.last().expect("nonempty chain").clone(),
    })
}

/// Order of the image of `z` in `S^{ab}` (`None` when infinite), or `None`
/// overall when `z ∉ S`.
fn ab_order_in(p: &PcPresentation, s: &Subgroup, z: &GroupElement) -> Result<Option<Option<BigInt>>> {
    let ind: InducedPresentation = induced_presentation(p, s)?;
    let Some(local) = ind.from_ambient(p, z) else {
        return Ok(None);
    };
    Ok(Some(ind.presentation.abelianization().order(&local)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrappedWitness {
    pub witness: GroupElement,
    /// Order of the image of the witness in `G_i^{ab}`, for every term.
    pub orders: Vec<BigInt>,
}

/// A central element that lies in every term of the chain with torsion image
/// in each term's abelianization. `None` for abelian groups or when some
/// term loses the element.
pub fn trapped_central_witness(f: &Filtration) -> Result<Option<TrappedWitness>> {
    let report = verify_rfrs_chain(f)?;
    if let Some(i) = report
        .steps
        .iter()
        .position(|s| !s.normal || !s.kernel_contained)
    {
        return Err(Error::ChainFailsConditions(i));
    }
    let p = &f.ambient;
    let Some(z) = p.center_ab_report().kernel_witness else {
        return Ok(None);
    };
    let mut orders = Vec::new();
    for s in &f.chain {
        match ab_order_in(p, s, &z)? {
            Some(Some(k)) => orders.push(k),
            _ => return Ok(None),
        }
    }
    Ok(Some(TrappedWitness { witness: z, orders }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCertificate {
    pub witness: GroupElement,
    pub index_bound: u64,
    pub depth_note: String,
    /// Normal subgroups of index at most the bound.
    pub checked_subgroups: usize,
    /// Those among them that do not contain the witness.
    pub excluding_witness: usize,
    pub all_pass: bool,
}

/// Certifies that a central witness `z` can never be removed by a chain whose
/// terms have index at most `max_index`: every normal subgroup of that index
/// containing `z` sees `z` as torsion in its abelianization, so the kernel
/// condition forces `z` into the next term. Since `z ∈ G_0`, induction keeps
/// `z` in every term and the chain cannot be exhaustive.
pub fn obstruction_certificate(p: &PcPresentation, max_index: u64) -> Result<ObstructionCertificate> {
    if p.class() > 2 {
        return Err(Error::ClassTooLarge(p.class()));
    }
    let z = p
        .center_ab_report()
        .kernel_witness
        .ok_or_else(|| Error::InvalidPresentation("abelian groups have no trapped central witness".into()))?;
    let subgroups = enumerate_normal_subgroups(p, max_index)?;
    let results: Vec<Option<bool>> = subgroups
        .par_iter()
        .map(|s| {
            ab_order_in(p, s, &z).map(|r| r.map(|order| order.is_some()))
        })
        .collect::<Result<_>>()?;
    let excluding = results.iter().filter(|r| r.is_none()).count();
    let all_pass = results.iter().flatten().all(|&torsion| torsion);
    Ok(ObstructionCertificate {
        witness: z,
        index_bound: max_index,
        depth_note: format!(
            "covers chains whose terms all have index at most {max_index}; \
             {excluding} normal subgroups exclude the witness and so cannot occur as terms"
        ),
        checked_subgroups: subgroups.len(),
        excluding_witness: excluding,
        all_pass,
    })
}

/// `{G_i ∩ H}`, as a chain in the induced presentation of `H`, with repeated
/// terms collapsed.
pub fn restrict_chain(f: &Filtration, h: &Subgroup) -> Result<(Filtration, InducedPresentation)> {
    let p = &f.ambient;
    if h.ambient_dim() != p.generator_count() {
        return Err(Error::AmbientMismatch);
    }
    let ind = induced_presentation(p, h)?;
    let mut chain: Vec<Subgroup> = Vec::new();
    for g in &f.chain {
        let meet = intersect(p, g, h)?;
        let local = ind
            .subgroup_from_ambient(p, &meet)
            .expect("intersection lies in the subgroup");
        if chain.last() != Some(&local) {
            chain.push(local);
        }
    }
    Ok((Filtration::new(ind.presentation.clone(), chain)?, ind))
}
