//! Subgroups of nilpotent presentations in Mal'cev coordinates.
//!
//! Every subgroup is stored as a canonical induced sequence (echelon form with
//! positive pivots, reduced above pivots by group multiplication). When the
//! ambient class is at most 2 and the subgroup is, as a set, a sublattice of
//! `Z^n`, its basis is the Hermite normal form of that lattice instead. Either
//! way equal subgroups have equal bases.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hnf_basis, lattice_intersection, lattice_member, IntMatrix, LatticeIndex};
use crate::nilpotent::{GroupElement, PcPresentation};
use crate::pcgs::{self, Exps};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    n: usize,
    basis: IntMatrix,
    seq: Vec<Exps>,
    lattice: bool,
}

/// Default cap on the number of Hermite forms examined by
/// [`enumerate_normal_subgroups`].
pub const DEFAULT_CANDIDATE_CAP: u64 = 2_000_000;

impl Subgroup {
    /// Wraps the output of the closure engine.
    pub(crate) fn from_sequence(p: &PcPresentation, seq: Vec<Exps>) -> Self {
        let n = p.generator_count();
        let as_matrix = |rows: &[Exps]| IntMatrix::from_rows(n, rows.to_vec()).expect("width n");
        if p.class() <= 2 {
            let h = hnf_basis(&as_matrix(&seq));
            if lattice_is_subgroup(p, &h) && (0..h.rows()).all(|i| pcgs::sift(p, &seq, h.row(i)).is_some()) {
                return Self {
                    n,
                    basis: h,
                    seq,
                    lattice: true,
                };
            }
        }
        Self {
            n,
            basis: as_matrix(&seq),
            seq,
            lattice: false,
        }
    }

    /// Subgroup generated by `gens` and their conjugates under `normalizers`.
    pub(crate) fn generated(p: &PcPresentation, gens: Vec<Exps>, normalizers: &[Exps]) -> Self {
        let gens = gens.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
        Self::from_sequence(p, pcgs::close(p, gens, normalizers))
    }

    pub fn whole(p: &PcPresentation) -> Self {
        let n = p.generator_count();
        Self::from_sequence(p, IntMatrix::identity(n).to_rows())
    }

    pub fn trivial(p: &PcPresentation) -> Self {
        Self::from_sequence(p, Vec::new())
    }

    /// Subgroup generated by the rows of `m`.
    pub fn from_matrix(p: &PcPresentation, m: &IntMatrix) -> Result<Self> {
        if m.cols() != p.generator_count() {
            return Err(Error::DimensionMismatch {
                expected: p.generator_count(),
                got: m.cols(),
            });
        }
        Ok(Self::generated(p, m.to_rows(), &[]))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Canonical basis rows.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Whether the subgroup equals the integer span of its coordinate vectors.
    pub fn is_lattice(&self) -> bool {
        self.lattice
    }

    /// Hirsch length of the subgroup (its rank as a lattice).
    pub fn hirsch_length(&self) -> usize {
        self.seq.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.seq.len() == self.n
    }

    pub(crate) fn rows(&self) -> Vec<Exps> {
        self.seq.clone()
    }

    /// Generators forming a polycyclic sequence of the subgroup.
    pub fn generators(&self) -> Vec<GroupElement> {
        self.basis.to_rows().into_iter().map(GroupElement::new).collect()
    }

    pub fn contains(&self, p: &PcPresentation, g: &GroupElement) -> bool {
        g.len() == self.n && pcgs::sift(p, &self.seq, g.exps()).is_some()
    }

    /// Is `self` a subgroup of `other`?
    pub fn is_subgroup_of(&self, p: &PcPresentation, other: &Subgroup) -> bool {
        self.seq.iter().all(|s| pcgs::sift(p, &other.seq, s).is_some())
    }
}

/// For class ≤ 2 presentations `β(a, b) = a·b − a − b` is bilinear, and a
/// lattice is closed under multiplication and inversion iff `β` of every
/// ordered pair of basis rows lies in it.
fn lattice_is_subgroup(p: &PcPresentation, h: &IntMatrix) -> bool {
    let rows = h.to_rows();
    rows.iter().all(|a| {
        rows.iter().all(|b| {
            let mut ab = a.clone();
            p.mul_assign_exps(&mut ab, b);
            let beta: Vec<BigInt> = ab
                .iter()
                .zip(a.iter().zip(b))
                .map(|(s, (x, y))| s - x - y)
                .collect();
            beta.iter().all(Zero::is_zero) || lattice_member(h, &beta).expect("width n")
        })
    })
}

fn check_dims(p: &PcPresentation, s: &Subgroup) -> Result<()> {
    if s.n != p.generator_count() {
        return Err(Error::AmbientMismatch);
    }
    Ok(())
}

/// Smallest subgroup containing `gens`.
pub fn subgroup_closure(p: &PcPresentation, gens: &[GroupElement]) -> Result<Subgroup> {
    for g in gens {
        if g.len() != p.generator_count() {
            return Err(Error::DimensionMismatch {
                expected: p.generator_count(),
                got: g.len(),
            });
        }
    }
    Ok(Subgroup::generated(
        p,
        gens.iter().map(|g| g.exps().to_vec()).collect(),
        &[],
    ))
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure(p: &PcPresentation, gens: &[GroupElement]) -> Result<Subgroup> {
    let base = subgroup_closure(p, gens)?;
    let normalizers: Vec<Exps> = p.generators().into_iter().map(GroupElement::into_exps).collect();
    Ok(Subgroup::generated(p, base.rows(), &normalizers))
}

/// `[G : S]`: the product of the pivots of an induced sequence, or infinite
/// when the Hirsch length drops.
pub fn index(p: &PcPresentation, s: &Subgroup) -> Result<LatticeIndex> {
    check_dims(p, s)?;
    if !s.is_full_rank() {
        return Ok(LatticeIndex::Infinite);
    }
    let mut k = BigInt::one();
    for (i, row) in s.seq.iter().enumerate() {
        k *= &row[i];
    }
    Ok(LatticeIndex::Finite(k))
}

/// `[B : A]` for `A ≤ B`, both of finite index.
pub fn relative_index(p: &PcPresentation, a: &Subgroup, b: &Subgroup) -> Result<LatticeIndex> {
    if !a.is_subgroup_of(p, b) {
        return Err(Error::MalformedChain("not a subgroup of the larger term".into()));
    }
    match (index(p, a)?, index(p, b)?) {
        (LatticeIndex::Finite(x), LatticeIndex::Finite(y)) => Ok(LatticeIndex::Finite(x / y)),
        _ => Ok(LatticeIndex::Infinite),
    }
}

/// Are the conjugates of `s` by all generators and their inverses in `s`?
pub fn is_normal(p: &PcPresentation, s: &Subgroup) -> bool {
    if check_dims(p, s).is_err() {
        return false;
    }
    let conjugators: Vec<Exps> = (0..p.generator_count())
        .flat_map(|k| {
            let g = p.generator(k).into_exps();
            let gi = p.inverse_exps(&g);
            [g, gi]
        })
        .collect();
    s.seq.iter().all(|r| {
        conjugators.iter().all(|g| {
            // r · [r, g] = g⁻¹ r g
            let mut c = r.clone();
            p.mul_assign_exps(&mut c, &p.commutator_exps(r, g));
            pcgs::sift(p, &s.seq, &c).is_some()
        })
    })
}

/// `S₁ ∩ S₂` for lattice subgroups of a class ≤ 2 presentation.
pub fn intersect(p: &PcPresentation, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
    if a.n != b.n {
        return Err(Error::AmbientMismatch);
    }
    check_dims(p, a)?;
    if p.class() > 2 {
        return Err(Error::ClassTooLarge(p.class()));
    }
    if !a.lattice || !b.lattice {
        return Err(Error::NotALattice);
    }
    let m = lattice_intersection(&a.basis, &b.basis)?;
    let s = Subgroup::generated(p, m.to_rows(), &[]);
    debug_assert!(s.lattice && s.basis == m);
    Ok(s)
}

/// Subgroup generated by `a` and `b`.
pub fn join(p: &PcPresentation, a: &Subgroup, b: &Subgroup) -> Result<Subgroup> {
    if a.n != b.n {
        return Err(Error::AmbientMismatch);
    }
    check_dims(p, a)?;
    let mut rows = a.rows();
    rows.extend(b.rows());
    Ok(Subgroup::generated(p, rows, &[]))
}

/// Number of Hermite forms with the given diagonal.
fn candidates_for(diag: &[u64]) -> u64 {
    diag.iter()
        .enumerate()
        .map(|(j, &d)| d.saturating_pow(j as u32))
        .fold(1u64, u64::saturating_mul)
}

fn diagonals(n: usize, bound: u64) -> Vec<Vec<u64>> {
    fn go(n: usize, bound: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for d in 1..=bound {
            cur.push(d);
            go(n, bound / d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, bound, &mut Vec::new(), &mut out);
    out
}

/// All normal subgroups of index at most `max_index` of a class ≤ 2
/// presentation, sorted by index and then basis.
///
/// Only full-rank lattice subgroups are produced. In the Heisenberg group and
/// in free abelian groups every finite-index normal subgroup is a lattice;
/// in general the result is the list of normal lattice subgroups.
pub fn enumerate_normal_subgroups(p: &PcPresentation, max_index: u64) -> Result<Vec<Subgroup>> {
    enumerate_normal_subgroups_capped(p, max_index, DEFAULT_CANDIDATE_CAP)
}

pub fn enumerate_normal_subgroups_capped(
    p: &PcPresentation,
    max_index: u64,
    cap: u64,
) -> Result<Vec<Subgroup>> {
    if p.class() > 2 {
        return Err(Error::ClassTooLarge(p.class()));
    }
    let n = p.generator_count();
    let diags = diagonals(n, max_index);
    let total = diags
        .iter()
        .map(|d| candidates_for(d))
        .fold(0u64, u64::saturating_add);
    if total > cap {
        return Err(Error::ResourceLimit(format!(
            "{total} candidate lattices exceed the cap of {cap}"
        )));
    }
    let mut found: Vec<Subgroup> = diags
        .par_iter()
        .flat_map_iter(|diag| {
            let mut hits = Vec::new();
            for_each_hermite_form(diag, |h| {
                if lattice_is_subgroup(p, h) {
                    let s = Subgroup::from_sequence(p, h.to_rows());
                    if is_normal(p, &s) {
                        let s = Subgroup::generated(p, h.to_rows(), &[]);
                        debug_assert_eq!(&s.basis, h);
                        hits.push(s);
                    }
                }
            });
            hits
        })
        .collect();
    found.sort_by(|a, b| {
        let ia = index(p, a).expect("same ambient");
        let ib = index(p, b).expect("same ambient");
        ia.cmp(&ib).then_with(|| a.basis.cmp(&b.basis))
    });
    found.dedup();
    Ok(found)
}

/// Calls `f` on every upper triangular Hermite form with diagonal `diag`.
fn for_each_hermite_form(diag: &[u64], mut f: impl FnMut(&IntMatrix)) {
    let n = diag.len();
    let mut h = IntMatrix::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        h[(i, i)] = BigInt::from(d);
    }
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    fn go(
        k: usize,
        slots: &[(usize, usize)],
        diag: &[u64],
        h: &mut IntMatrix,
        f: &mut impl FnMut(&IntMatrix),
    ) {
        if k == slots.len() {
            f(h);
            return;
        }
        let (i, j) = slots[k];
        for v in 0..diag[j] {
            h[(i, j)] = BigInt::from(v);
            go(k + 1, slots, diag, h, f);
        }
        h[(i, j)] = BigInt::zero();
    }
    go(0, &slots, diag, &mut h, &mut f);
}

/// A subgroup presented on its own polycyclic generators, with the inclusion
/// into the ambient group.
#[derive(Clone, Debug)]
pub struct InducedPresentation {
    pub presentation: PcPresentation,
    /// Ambient coordinates of each generator of `presentation`.
    pub inclusion: Vec<GroupElement>,
}

impl InducedPresentation {
    /// Image of an element in ambient coordinates.
    pub fn to_ambient(&self, ambient: &PcPresentation, g: &GroupElement) -> GroupElement {
        let seq: Vec<Exps> = self.inclusion.iter().map(|e| e.exps().to_vec()).collect();
        GroupElement::new(pcgs::evaluate(ambient, &seq, g.exps()))
    }

    /// Coordinates in the subgroup of an ambient element, if it lies there.
    pub fn from_ambient(&self, ambient: &PcPresentation, g: &GroupElement) -> Option<GroupElement> {
        let seq: Vec<Exps> = self.inclusion.iter().map(|e| e.exps().to_vec()).collect();
        pcgs::sift(ambient, &seq, g.exps()).map(GroupElement::new)
    }

    /// Image of a subgroup of the induced presentation in the ambient group.
    pub fn subgroup_to_ambient(&self, ambient: &PcPresentation, s: &Subgroup) -> Subgroup {
        let rows = s
            .rows()
            .into_iter()
            .map(|r| self.to_ambient(ambient, &GroupElement::new(r)).into_exps())
            .collect();
        Subgroup::generated(ambient, rows, &[])
    }

    /// Preimage of an ambient subgroup contained in this one.
    pub fn subgroup_from_ambient(&self, ambient: &PcPresentation, s: &Subgroup) -> Option<Subgroup> {
        let rows = s
            .rows()
            .into_iter()
            .map(|r| self.from_ambient(ambient, &GroupElement::new(r)).map(GroupElement::into_exps))
            .collect::<Option<Vec<_>>>()?;
        Some(Subgroup::generated(&self.presentation, rows, &[]))
    }
}

/// Presentation of `s` on its basis rows, with commutators rewritten in those
/// rows.
pub fn induced_presentation(p: &PcPresentation, s: &Subgroup) -> Result<InducedPresentation> {
    check_dims(p, s)?;
    let gens: Vec<Exps> = s.basis.to_rows();
    let r = gens.len();
    let mut relations = Vec::new();
    for j in 0..r {
        for i in 0..j {
            let c = p.commutator_exps(&gens[j], &gens[i]);
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            let coeffs = pcgs::sift(p, &gens, &c).ok_or_else(|| {
                Error::InvalidPresentation("subgroup basis is not closed under commutators".into())
            })?;
            relations.push(((i, j), coeffs));
        }
    }
    Ok(InducedPresentation {
        presentation: PcPresentation::new(r, relations)?,
        inclusion: gens.into_iter().map(GroupElement::new).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[i64]) -> GroupElement {
        GroupElement::from_i64(v)
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn close(p: &PcPresentation, gens: &[&[i64]]) -> Subgroup {
        subgroup_closure(p, &gens.iter().map(|g| e(g)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn closures() {
        let h = PcPresentation::heisenberg();
        assert_eq!(close(&h, &[&[1, 0, 0], &[0, 1, 0]]), Subgroup::whole(&h));
        let s = close(&h, &[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(s.basis(), &m(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert!(s.is_lattice());
        assert_eq!(close(&h, &[]), Subgroup::trivial(&h));
        assert_eq!(close(&h, &[]).hirsch_length(), 0);
    }

    #[test]
    fn closure_is_not_the_lattice_hull() {
        // (1,1,0)·(1,-1,0) = (2,0,-1): the subgroup leaves the span of its
        // generators' coordinates, which contains (2,0,0) instead
        let h = PcPresentation::heisenberg();
        let s = close(&h, &[&[1, 1, 0], &[1, -1, 0], &[0, 0, 2]]);
        assert!(!s.is_lattice());
        assert!(s.contains(&h, &e(&[2, 0, -1])));
        assert!(!s.contains(&h, &e(&[2, 0, 0])));
        assert_eq!(index(&h, &s).unwrap(), LatticeIndex::Finite(4.into()));
    }

    #[test]
    fn indices() {
        let h = PcPresentation::heisenberg();
        assert_eq!(index(&h, &Subgroup::whole(&h)).unwrap(), LatticeIndex::Finite(1.into()));
        let s = close(&h, &[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(index(&h, &s).unwrap(), LatticeIndex::Finite(2.into()));
        let t = close(&h, &[&[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(index(&h, &t).unwrap(), LatticeIndex::Infinite);
    }

    #[test]
    fn normality() {
        let h = PcPresentation::heisenberg();
        assert!(is_normal(&h, &close(&h, &[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]])));
        assert!(!is_normal(&h, &close(&h, &[&[1, 0, 0], &[0, 0, 2]])));
        assert!(is_normal(&h, &h.center()));
    }

    #[test]
    fn intersections() {
        let h = PcPresentation::heisenberg();
        let a = close(&h, &[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let b = close(&h, &[&[1, 0, 0], &[0, 2, 0], &[0, 0, 1]]);
        let c = intersect(&h, &a, &b).unwrap();
        assert_eq!(c.basis(), &m(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 1]]));
        assert_eq!(intersect(&h, &a, &Subgroup::whole(&h)).unwrap(), a);
        assert_eq!(intersect(&h, &a, &a).unwrap(), a);
        let other = Subgroup::whole(&PcPresentation::free_abelian(2));
        assert_eq!(intersect(&h, &a, &other), Err(Error::AmbientMismatch));
    }

    #[test]
    fn enumeration_examples() {
        let z = PcPresentation::free_abelian(1);
        let subs = enumerate_normal_subgroups(&z, 3).unwrap();
        let bases: Vec<_> = subs.iter().map(|s| s.basis().clone()).collect();
        assert_eq!(bases, vec![m(&[&[1]]), m(&[&[2]]), m(&[&[3]])]);

        let h = PcPresentation::heisenberg();
        assert_eq!(enumerate_normal_subgroups(&h, 1).unwrap(), vec![Subgroup::whole(&h)]);
        let subs = enumerate_normal_subgroups(&h, 2).unwrap();
        assert_eq!(subs.len(), 4);
        for s in &subs[1..] {
            assert_eq!(index(&h, s).unwrap(), LatticeIndex::Finite(2.into()));
            assert!(s.contains(&h, &e(&[0, 0, 1])));
        }
        assert!(matches!(
            enumerate_normal_subgroups_capped(&h, 64, 10),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn induced_presentations() {
        let h = PcPresentation::heisenberg();
        let whole = induced_presentation(&h, &Subgroup::whole(&h)).unwrap();
        assert_eq!(whole.presentation, h);

        let s = close(&h, &[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let ind = induced_presentation(&h, &s).unwrap();
        // [y, u] = z⁻², i.e. [u, y] = z²
        assert_eq!(ind.presentation.commutator_relation(0, 1), e(&[0, 0, -2]));
        let ab = ind.presentation.abelianization().structure();
        assert_eq!(ab.free_rank, 2);
        assert_eq!(ab.invariant_factors, vec![BigInt::from(2)]);

        let a = PcPresentation::free_abelian(2);
        let t = close(&a, &[&[2, 0], &[0, 2]]);
        assert_eq!(induced_presentation(&a, &t).unwrap().presentation, a);
    }

    #[test]
    fn induced_inclusion_round_trip() {
        let h = PcPresentation::heisenberg();
        let s = close(&h, &[&[2, 0, 0], &[0, 3, 0], &[0, 0, 1]]);
        let ind = induced_presentation(&h, &s).unwrap();
        let q = &ind.presentation;
        for a in q.generators() {
            for b in q.generators() {
                let lhs = ind.to_ambient(&h, &q.multiply(&a, &b));
                let rhs = h.multiply(&ind.to_ambient(&h, &a), &ind.to_ambient(&h, &b));
                assert_eq!(lhs, rhs);
            }
        }
        let g = e(&[4, -3, 7]);
        let local = ind.from_ambient(&h, &g).unwrap();
        assert_eq!(ind.to_ambient(&h, &local), g);
        assert!(ind.from_ambient(&h, &e(&[1, 0, 0])).is_none());
    }
}
