//! Finitely generated torsion-free nilpotent groups given by power-commutator
//! presentations over a Mal'cev basis.
//!
//! Generators `g_1, …, g_n` come with commutator relations
//! `[g_j, g_i] = g_{j+1}^{e_{j+1}} ⋯ g_n^{e_n}` for `i < j`, with the convention
//! `[a, b] = a⁻¹b⁻¹ab`. Every element has a unique normal form
//! `g_1^{a_1} ⋯ g_n^{a_n}` and is stored as its exponent vector. Because the
//! relations are triangular, the subgroups `G_k = ⟨g_k, …, g_n⟩` form a central
//! series with infinite cyclic factors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{left_kernel, saturate, IntMatrix, QuotientImage, QuotientMap};
use crate::linalg::AbelianGroupStructure;
use crate::pcgs::{self, Exps};
use crate::subgroup::Subgroup;

/// Normal-form exponent vector `g_1^{a_1} ⋯ g_n^{a_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    exps: Vec<BigInt>,
}

impl GroupElement {
    pub fn new(exps: Vec<BigInt>) -> Self {
        Self { exps }
    }

    pub fn from_i64(exps: &[i64]) -> Self {
        Self::new(exps.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![BigInt::zero(); n])
    }

    /// The generator `g_k` (0-based).
    pub fn generator(n: usize, k: usize) -> Self {
        let mut e = Self::identity(n);
        e.exps[k] = BigInt::one();
        e
    }

    pub fn exps(&self) -> &[BigInt] {
        &self.exps
    }

    pub fn into_exps(self) -> Vec<BigInt> {
        self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exps.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Conjugation tables for one generator `g_k`: images of `g_j` (`j > k`) under
/// `t ↦ g_k⁻¹ t g_k` and under its inverse.
#[derive(Clone, Debug, Default)]
struct ConjTable {
    by_gen: Vec<Exps>,
    by_inverse: Vec<Exps>,
}

#[derive(Clone, Debug)]
pub struct PcPresentation {
    n: usize,
    class: usize,
    /// `commutators[j][i]` holds `[g_j, g_i]` for `i < j`.
    commutators: Vec<Vec<Exps>>,
    central: Vec<bool>,
    conj: Vec<ConjTable>,
}

impl PartialEq for PcPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.commutators == other.commutators
    }
}

impl Eq for PcPresentation {}

/// Past this many collection steps for a single generator power, the
/// conjugation automorphism is raised to the power by squaring instead.
const DIRECT_STEPS: u32 = 4;

impl PcPresentation {
    /// Builds a presentation from `((i, j), [g_j, g_i])` entries with `i < j`
    /// (0-based). Missing pairs commute. Fails unless every value is supported
    /// strictly above `j` and collection is associative on generator triples.
    pub fn new(n: usize, relations: Vec<((usize, usize), Vec<BigInt>)>) -> Result<Self> {
        let mut commutators = vec![vec![vec![BigInt::zero(); n]; n]; n];
        for ((i, j), value) in relations {
            if i >= j || j >= n {
                return Err(Error::InvalidPresentation(format!(
                    "relation index pair ({i}, {j}) must satisfy i < j < {n}"
                )));
            }
            if value.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: value.len(),
                });
            }
            if value[..=j].iter().any(|x| !x.is_zero()) {
                return Err(Error::InvalidPresentation(format!(
                    "[g{}, g{}] must involve only generators after g{}",
                    j + 1,
                    i + 1,
                    j + 1
                )));
            }
            commutators[j][i] = value;
        }
        let central = (0..n)
            .map(|k| {
                (0..n).all(|m| {
                    let (hi, lo) = if k > m { (k, m) } else { (m, k) };
                    hi == lo || commutators[hi][lo].iter().all(Zero::is_zero)
                })
            })
            .collect();
        let mut p = Self {
            n,
            class: 0,
            commutators,
            central,
            conj: vec![ConjTable::default(); n],
        };
        p.build_conjugation_tables();
        p.check_consistency()?;
        p.class = p.lower_central_rows().len().saturating_sub(1);
        if p.class == 2 {
            for j in 0..n {
                for i in 0..j {
                    let ok = p.commutators[j][i]
                        .iter()
                        .enumerate()
                        .all(|(k, x)| x.is_zero() || p.central[k]);
                    if !ok {
                        return Err(Error::InvalidPresentation(format!(
                            "class-2 commutator [g{}, g{}] leaves the span of central generators",
                            j + 1,
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn generator_count(&self) -> usize {
        self.n
    }

    /// Nilpotency class (0 for the trivial group, 1 for abelian groups).
    pub fn class(&self) -> usize {
        self.class
    }

    pub fn central_flags(&self) -> &[bool] {
        &self.central
    }

    pub fn is_abelian(&self) -> bool {
        self.class <= 1
    }

    /// `[g_j, g_i]` for `i < j`.
    pub fn commutator_relation(&self, i: usize, j: usize) -> GroupElement {
        GroupElement::new(self.commutators[j][i].clone())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.n)
    }

    pub fn generator(&self, k: usize) -> GroupElement {
        GroupElement::generator(self.n, k)
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.n).map(|k| self.generator(k)).collect()
    }

    // -- standard families -------------------------------------------------

    /// `⟨x, y, z | [x,y] = z, z central⟩`.
    pub fn heisenberg() -> Self {
        Self::unitriangular(3)
    }

    pub fn free_abelian(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("free abelian presentation is consistent")
    }

    /// Upper unitriangular `n×n` integer matrices. The Mal'cev basis is the
    /// elementary matrices `E + e_{ab}` ordered by `(b − a, a)`.
    pub fn unitriangular(n: usize) -> Self {
        let positions = unitriangular_positions(n);
        let m = positions.len();
        let index_of = |a: usize, b: usize| {
            positions
                .iter()
                .position(|&q| q == (a, b))
                .expect("position exists")
        };
        let mut relations = Vec::new();
        for lo in 0..m {
            for hi in lo + 1..m {
                // [x_{kl}, x_{ij}] with x_{kl} = g_hi, x_{ij} = g_lo
                let (i, j) = positions[lo];
                let (k, l) = positions[hi];
                let mut v = vec![BigInt::zero(); m];
                if l == i {
                    v[index_of(k, j)] = BigInt::one();
                } else if k == j {
                    v[index_of(i, l)] = -BigInt::one();
                } else {
                    continue;
                }
                relations.push(((lo, hi), v));
            }
        }
        Self::new(m, relations).expect("unitriangular presentation is consistent")
    }

    /// Generators of `p` followed by generators of `q`.
    pub fn direct_product(p: &Self, q: &Self) -> Self {
        let n = p.n + q.n;
        let mut relations = Vec::new();
        for j in 0..p.n {
            for i in 0..j {
                let c = &p.commutators[j][i];
                if c.iter().any(|x| !x.is_zero()) {
                    let mut v = c.clone();
                    v.resize(n, BigInt::zero());
                    relations.push(((i, j), v));
                }
            }
        }
        for j in 0..q.n {
            for i in 0..j {
                let c = &q.commutators[j][i];
                if c.iter().any(|x| !x.is_zero()) {
                    let mut v = vec![BigInt::zero(); p.n];
                    v.extend(c.iter().cloned());
                    relations.push(((p.n + i, p.n + j), v));
                }
            }
        }
        Self::new(n, relations).expect("direct product of consistent presentations")
    }

    /// Parses a builder expression: `heisenberg`, `ut(n)`, `free_abelian(n)`,
    /// `direct_product(A, B)`.
    pub fn build_standard(name: &str) -> Result<Self> {
        let mut parser = BuilderParser {
            src: name.as_bytes(),
            pos: 0,
        };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(Error::UnsupportedFamily(name.to_string()));
        }
        Ok(p)
    }

    // -- element arithmetic ------------------------------------------------

    /// Normal form of a word given as `(generator, exponent)` letters.
    pub fn collect(&self, word: &[(usize, BigInt)]) -> Result<GroupElement> {
        let mut x = vec![BigInt::zero(); self.n];
        for (k, e) in word {
            if *k >= self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: *k + 1,
                });
            }
            self.mul_gen_pow(&mut x, *k, e);
        }
        Ok(GroupElement::new(x))
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut x = a.exps.clone();
        self.mul_assign_exps(&mut x, &b.exps);
        GroupElement::new(x)
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        GroupElement::new(self.inverse_exps(&a.exps))
    }

    pub fn power(&self, a: &GroupElement, k: &BigInt) -> GroupElement {
        GroupElement::new(self.power_exps(&a.exps, k))
    }

    /// `b⁻¹ a b`.
    pub fn conjugate(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut x = self.inverse_exps(&b.exps);
        self.mul_assign_exps(&mut x, &a.exps);
        self.mul_assign_exps(&mut x, &b.exps);
        GroupElement::new(x)
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement::new(self.commutator_exps(&a.exps, &b.exps))
    }

    pub(crate) fn commutator_exps(&self, a: &[BigInt], b: &[BigInt]) -> Exps {
        let mut x = self.inverse_exps(a);
        let bi = self.inverse_exps(b);
        self.mul_assign_exps(&mut x, &bi);
        self.mul_assign_exps(&mut x, a);
        self.mul_assign_exps(&mut x, b);
        x
    }

    pub(crate) fn mul_assign_exps(&self, x: &mut Exps, y: &[BigInt]) {
        for (k, e) in y.iter().enumerate() {
            if !e.is_zero() {
                self.mul_gen_pow(x, k, e);
            }
        }
    }

    pub(crate) fn inverse_exps(&self, a: &[BigInt]) -> Exps {
        let mut x = vec![BigInt::zero(); self.n];
        for k in (0..self.n).rev() {
            if !a[k].is_zero() {
                self.mul_gen_pow(&mut x, k, &-&a[k]);
            }
        }
        x
    }

    pub(crate) fn power_exps(&self, a: &[BigInt], k: &BigInt) -> Exps {
        let mut acc = vec![BigInt::zero(); self.n];
        if k.is_zero() || a.iter().all(Zero::is_zero) {
            return acc;
        }
        let mut base = if k.is_negative() {
            self.inverse_exps(a)
        } else {
            a.to_vec()
        };
        let mut e = k.abs();
        let two = BigInt::from(2);
        loop {
            if e.is_odd() {
                self.mul_assign_exps(&mut acc, &base);
            }
            e /= &two;
            if e.is_zero() {
                break;
            }
            let b2 = base.clone();
            self.mul_assign_exps(&mut base, &b2);
        }
        acc
    }

    /// `x ← x · g_k^s`.
    ///
    /// Writing `x = P · T` with `P = g_1^{x_1} ⋯ g_k^{x_k}` and `T` the tail on
    /// generators after `k`, `x · g_k^s = (P g_k^s) · φ^s(T)` where `φ` is
    /// conjugation by `g_k`, an automorphism of `⟨g_{k+1}, …, g_n⟩`.
    fn mul_gen_pow(&self, x: &mut [BigInt], k: usize, s: &BigInt) {
        if s.is_zero() {
            return;
        }
        if x[k + 1..].iter().all(Zero::is_zero) {
            x[k] += s;
            return;
        }
        let steps = s.abs();
        if steps <= BigInt::from(DIRECT_STEPS) {
            let forward = s.is_positive();
            let mut count = steps;
            while !count.is_zero() {
                let images = if forward {
                    &self.conj[k].by_gen
                } else {
                    &self.conj[k].by_inverse
                };
                let tail = self.apply_automorphism(k, images, x);
                x[k] += if forward { BigInt::one() } else { -BigInt::one() };
                x[k + 1..].clone_from_slice(&tail[k + 1..]);
                count -= 1;
            }
        } else {
            let images = self.automorphism_power(k, s);
            let tail = self.apply_automorphism(k, &images, x);
            x[k] += s;
            x[k + 1..].clone_from_slice(&tail[k + 1..]);
        }
    }

    /// Applies an automorphism of `⟨g_{k+1}, …⟩`, given by generator images, to
    /// the tail of `w` (coordinates after `k`).
    fn apply_automorphism(&self, k: usize, images: &[Exps], w: &[BigInt]) -> Exps {
        let mut acc = vec![BigInt::zero(); self.n];
        for j in k + 1..self.n {
            if !w[j].is_zero() {
                let t = self.power_exps(&images[j], &w[j]);
                self.mul_assign_exps(&mut acc, &t);
            }
        }
        acc
    }

    fn automorphism_power(&self, k: usize, s: &BigInt) -> Vec<Exps> {
        let base_images = if s.is_positive() {
            &self.conj[k].by_gen
        } else {
            &self.conj[k].by_inverse
        };
        let mut base = base_images.clone();
        let mut acc: Vec<Exps> = (0..self.n)
            .map(|j| GroupElement::generator(self.n, j).exps)
            .collect();
        let mut e = s.abs();
        let two = BigInt::from(2);
        loop {
            if e.is_odd() {
                acc = (0..self.n)
                    .map(|j| {
                        if j > k {
                            self.apply_automorphism(k, &base, &acc[j])
                        } else {
                            acc[j].clone()
                        }
                    })
                    .collect();
            }
            e /= &two;
            if e.is_zero() {
                break;
            }
            base = (0..self.n)
                .map(|j| {
                    if j > k {
                        self.apply_automorphism(k, &base, &base[j])
                    } else {
                        base[j].clone()
                    }
                })
                .collect();
        }
        acc
    }

    fn build_conjugation_tables(&mut self) {
        let n = self.n;
        for k in (0..n).rev() {
            let mut by_gen = vec![Vec::new(); n];
            let mut by_inverse = vec![Vec::new(); n];
            for j in k + 1..n {
                let mut img = self.commutators[j][k].clone();
                img[j] = BigInt::one();
                by_gen[j] = img;
            }
            // φ⁻¹(g_j) = g_j · φ⁻¹(u_j⁻¹) where φ(g_j) = g_j u_j; u_j lives
            // above j, so filling j downwards only uses images already known
            for j in (k + 1..n).rev() {
                let u_inv = self.inverse_exps(&self.commutators[j][k]);
                let mut img = self.apply_automorphism(k, &by_inverse, &u_inv);
                img[j] = BigInt::one();
                by_inverse[j] = img;
            }
            for j in 0..=k {
                by_gen[j] = GroupElement::generator(n, j).exps;
                by_inverse[j] = GroupElement::generator(n, j).exps;
            }
            self.conj[k] = ConjTable { by_gen, by_inverse };
        }
    }

    /// Associativity of collection on all triples of generators and their
    /// inverses.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.n;
        let letters: Vec<Exps> = (0..n)
            .flat_map(|k| {
                let g = GroupElement::generator(n, k).exps;
                let gi = self.inverse_exps(&g);
                [g, gi]
            })
            .collect();
        for a in &letters {
            for b in &letters {
                let mut ab = a.clone();
                self.mul_assign_exps(&mut ab, b);
                for c in &letters {
                    let mut left = ab.clone();
                    self.mul_assign_exps(&mut left, c);
                    let mut bc = b.clone();
                    self.mul_assign_exps(&mut bc, c);
                    let mut right = a.clone();
                    self.mul_assign_exps(&mut right, &bc);
                    if left != right {
                        return Err(Error::InvalidPresentation(format!(
                            "collection is not associative on {} {} {}",
                            GroupElement::new(a.clone()),
                            GroupElement::new(b.clone()),
                            GroupElement::new(c.clone())
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    // -- structure -----------------------------------------------------------

    fn lower_central_rows(&self) -> Vec<Vec<Exps>> {
        let gens: Vec<Exps> = (0..self.n)
            .map(|k| GroupElement::generator(self.n, k).exps)
            .collect();
        let mut terms = vec![gens.clone()];
        loop {
            let last = terms.last().expect("nonempty");
            if last.is_empty() {
                break;
            }
            let comms: Vec<Exps> = last
                .iter()
                .flat_map(|a| gens.iter().map(move |g| (a, g)))
                .map(|(a, g)| self.commutator_exps(a, g))
                .filter(|c| c.iter().any(|x| !x.is_zero()))
                .collect();
            terms.push(pcgs::close(self, comms, &gens));
        }
        terms
    }

    /// `γ_1 = G ⊇ γ_2 ⊇ … ⊇ γ_{c+1} = 1`, with `γ_{k+1} = [γ_k, G]`.
    pub fn lower_central_series(&self) -> Vec<Subgroup> {
        self.lower_central_rows()
            .into_iter()
            .map(|rows| Subgroup::from_sequence(self, rows))
            .collect()
    }

    /// Free ranks of the successive quotients `γ_k / γ_{k+1}`.
    pub fn lower_central_ranks(&self) -> Vec<usize> {
        let rows = self.lower_central_rows();
        rows.windows(2).map(|w| w[0].len() - w[1].len()).collect()
    }

    /// Sum of the free ranks of the lower central quotients.
    pub fn hirsch_rank(&self) -> usize {
        self.lower_central_ranks().iter().sum()
    }

    /// Hirsch rank of `G/N` for a normal subgroup `N`, summed over the lower
    /// central quotients `γ_k N / γ_{k+1} N`.
    pub fn quotient_hirsch_rank(&self, normal: &Subgroup) -> usize {
        let n_rows = normal.rows();
        let terms: Vec<usize> = self
            .lower_central_rows()
            .into_iter()
            .map(|mut rows| {
                rows.extend(n_rows.iter().cloned());
                pcgs::close(self, rows, &[]).len()
            })
            .collect();
        terms.windows(2).map(|w| w[0] - w[1]).sum()
    }

    /// `{x ∈ H : [x, h] = 1}` for `H` given by an induced sequence.
    fn centralizer_rows(&self, subgroup: Vec<Exps>, h: &[BigInt]) -> Vec<Exps> {
        let mut c = subgroup;
        for layer in 0..self.n {
            // x ↦ coordinate `layer` of [x, h] is a homomorphism on c
            let values: Vec<BigInt> = c
                .iter()
                .map(|x| self.commutator_exps(x, h)[layer].clone())
                .collect();
            if values.iter().all(Zero::is_zero) {
                continue;
            }
            let mut g = BigInt::zero();
            let mut lambda = vec![BigInt::zero(); c.len()];
            for (idx, v) in values.iter().enumerate() {
                let eg = g.extended_gcd(v);
                for l in lambda.iter_mut() {
                    *l *= &eg.x;
                }
                lambda[idx] = eg.y.clone();
                g = eg.gcd;
            }
            let t = pcgs::evaluate(self, &c, &lambda);
            let t_inv = self.inverse_exps(&t);
            let gens: Vec<Exps> = c
                .iter()
                .zip(&values)
                .map(|(x, v)| {
                    let mut u = x.clone();
                    let tp = self.power_exps(&t_inv, &(v / &g));
                    self.mul_assign_exps(&mut u, &tp);
                    u
                })
                .filter(|u| u.iter().any(|x| !x.is_zero()))
                .collect();
            c = pcgs::close(self, gens, &[t]);
        }
        c
    }

    /// The center, found by intersecting generator centralizers layer by layer
    /// down the central series; each layer is an integer linear condition.
    pub fn center(&self) -> Subgroup {
        let mut rows: Vec<Exps> = (0..self.n)
            .map(|k| GroupElement::generator(self.n, k).exps)
            .collect();
        for k in 0..self.n {
            let g = GroupElement::generator(self.n, k).exps;
            rows = self.centralizer_rows(rows, &g);
        }
        Subgroup::from_sequence(self, rows)
    }

    pub fn abelianization(&self) -> Abelianization {
        let mut rels = Vec::new();
        for j in 0..self.n {
            for i in 0..j {
                let c = &self.commutators[j][i];
                if c.iter().any(|x| !x.is_zero()) {
                    rels.push(c.clone());
                }
            }
        }
        let r = IntMatrix::from_rows(self.n, rels).expect("consistent widths");
        Abelianization {
            map: QuotientMap::new(&r),
        }
    }

    /// Is the image of `g` in the abelianization a torsion element?
    pub fn rational_ab_kernel_member(&self, g: &GroupElement) -> bool {
        self.abelianization()
            .project(g)
            .map(|img| img.is_torsion())
            .unwrap_or(false)
    }

    /// Smallest isolated subgroup containing `s`. For a lattice subgroup of a
    /// class ≤ 2 group this is the saturation of its coordinate lattice.
    pub fn isolator(&self, s: &Subgroup) -> Result<Subgroup> {
        if self.class > 2 {
            return Err(Error::ClassTooLarge(self.class));
        }
        if !s.is_lattice() {
            return Err(Error::NotALattice);
        }
        let sat = saturate(s.basis());
        let iso = Subgroup::generated(self, sat.to_rows(), &[]);
        if !iso.is_lattice() || iso.basis() != &sat {
            return Err(Error::NotALattice);
        }
        Ok(iso)
    }

    /// Center and its image in the abelianization. For a nonabelian group a
    /// central element of infinite order with torsion abelianization image is
    /// returned as witness.
    pub fn center_ab_report(&self) -> CenterAbReport {
        let center = self.center();
        let ab = self.abelianization();
        let basis: Vec<Exps> = center.rows();
        let free_rows: Vec<Vec<BigInt>> = basis
            .iter()
            .map(|z| ab.map.project(z).expect("dimension matches").free)
            .collect();
        let free_rank = ab.structure().free_rank;
        let f = IntMatrix::from_rows(free_rank, free_rows).expect("consistent widths");
        let kernel = left_kernel(&f);
        let kernel_witness = (kernel.rows() > 0).then(|| {
            let mut k = kernel.row_vec(0);
            let content = k.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            for x in k.iter_mut() {
                *x /= &content;
            }
            GroupElement::new(pcgs::evaluate(self, &basis, &k))
        });
        CenterAbReport {
            center_basis: basis.into_iter().map(GroupElement::new).collect(),
            injective: kernel_witness.is_none(),
            kernel_witness,
        }
    }

    /// Parses the text format: a line `n class`, then lines `i j : e_{j+1} … e_n`
    /// (1-based, `i < j`) giving the exponents of `[g_j, g_i]`. Lines starting
    /// with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `n class` header".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token `{t}`"))))
            .collect::<Result<_>>()?;
        let [n, class] = nums[..] else {
            return Err(Error::Parse("header must be `n class`".into()));
        };
        let mut relations = Vec::new();
        for line in lines {
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing `:` in `{line}`")))?;
            let idx: Vec<usize> = lhs
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad index `{t}`"))))
                .collect::<Result<_>>()?;
            let [i, j] = idx[..] else {
                return Err(Error::Parse(format!("expected `i j` in `{line}`")));
            };
            if i == 0 || j == 0 || i >= j || j > n {
                return Err(Error::Parse(format!("indices must satisfy 1 <= i < j <= n in `{line}`")));
            }
            let tail = crate::linalg::parse_int_row(rhs)?;
            if tail.len() != n - j {
                return Err(Error::Parse(format!(
                    "expected {} exponents after `:` in `{line}`",
                    n - j
                )));
            }
            let mut v = vec![BigInt::zero(); j];
            v.extend(tail);
            relations.push(((i - 1, j - 1), v));
        }
        let p = Self::new(n, relations)?;
        if p.class != class {
            return Err(Error::InvalidPresentation(format!(
                "declared class {class} but the lower central series gives {}",
                p.class
            )));
        }
        Ok(p)
    }
}

impl FromStr for PcPresentation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for PcPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.class)?;
        for j in 0..self.n {
            for i in 0..j {
                let c = &self.commutators[j][i];
                if c.iter().any(|x| !x.is_zero()) {
                    let tail: Vec<String> = c[j + 1..].iter().map(|x| x.to_string()).collect();
                    writeln!(f, "{} {} : {}", i + 1, j + 1, tail.join(" "))?;
                }
            }
        }
        Ok(())
    }
}

fn unitriangular_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for dist in 1..n {
        for a in 0..n - dist {
            out.push((a, a + dist));
        }
    }
    out
}

/// Unitriangular matrix of a normal-form element of `ut(n)`, i.e. the ordered
/// product of `E + a·e_{ij}` over the Mal'cev basis.
pub fn unitriangular_matrix(n: usize, g: &GroupElement) -> IntMatrix {
    let mut acc = IntMatrix::identity(n);
    for ((a, b), e) in unitriangular_positions(n).into_iter().zip(g.exps()) {
        let mut m = IntMatrix::identity(n);
        m[(a, b)] = e.clone();
        acc = acc.mul(&m).expect("square");
    }
    acc
}

/// `N → N^{ab}` in Smith coordinates.
#[derive(Clone, Debug)]
pub struct Abelianization {
    map: QuotientMap,
}

impl Abelianization {
    pub fn structure(&self) -> AbelianGroupStructure {
        self.map.structure()
    }

    pub fn project(&self, g: &GroupElement) -> Result<QuotientImage> {
        self.map.project(g.exps())
    }

    /// Order of the image of `g`; `None` for infinite order.
    pub fn order(&self, g: &GroupElement) -> Result<Option<BigInt>> {
        self.map.order(g.exps())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterAbReport {
    pub center_basis: Vec<GroupElement>,
    /// Central element of infinite order whose abelianization image is torsion.
    pub kernel_witness: Option<GroupElement>,
    /// Whether `Z(N) → N^{ab}` is injective.
    pub injective: bool,
}

struct BuilderParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl BuilderParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self) -> Error {
        Error::UnsupportedFamily(String::from_utf8_lossy(self.src).into_owned())
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).to_lowercase()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err())
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.ident().parse().map_err(|_| self.err())
    }

    fn expr(&mut self) -> Result<PcPresentation> {
        match self.ident().as_str() {
            "heisenberg" => Ok(PcPresentation::heisenberg()),
            "ut" => {
                self.expect(b'(')?;
                let n = self.number()?;
                self.expect(b')')?;
                if n == 0 {
                    return Err(self.err());
                }
                Ok(PcPresentation::unitriangular(n))
            }
            "free_abelian" => {
                self.expect(b'(')?;
                let n = self.number()?;
                self.expect(b')')?;
                if n == 0 {
                    return Err(self.err());
                }
                Ok(PcPresentation::free_abelian(n))
            }
            "direct_product" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(PcPresentation::direct_product(&a, &b))
            }
            _ => Err(self.err()),
        }
    }
}
