//! Induced polycyclic sequences.
//!
//! A subgroup of a presentation is described by elements `s_1, …, s_r` in
//! echelon form: their leading coordinates are strictly increasing and every
//! element of the subgroup is uniquely `s_1^{k_1} ⋯ s_r^{k_r}`. The closure
//! routine builds such a sequence from arbitrary generators by sifting with
//! extended gcds and then closing under commutators, which works in any
//! nilpotency class because the generator series is central.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::nilpotent::PcPresentation;

pub(crate) type Exps = Vec<BigInt>;

pub(crate) fn leading(v: &[BigInt]) -> Option<usize> {
    v.iter().position(|x| !x.is_zero())
}

struct Builder<'a> {
    p: &'a PcPresentation,
    slots: Vec<Option<Exps>>,
    dirty: BTreeSet<usize>,
}

impl<'a> Builder<'a> {
    fn new(p: &'a PcPresentation) -> Self {
        Self {
            p,
            slots: vec![None; p.generator_count()],
            dirty: BTreeSet::new(),
        }
    }

    /// Sifts `g` into the slots. Displaced elements go back on the queue.
    fn insert(&mut self, mut g: Exps, queue: &mut VecDeque<Exps>) {
        let p = self.p;
        loop {
            let Some(d) = leading(&g) else { return };
            match &self.slots[d] {
                None => {
                    if g[d].is_negative() {
                        g = p.inverse_exps(&g);
                    }
                    self.slots[d] = Some(g);
                    self.dirty.insert(d);
                    return;
                }
                Some(s) => {
                    let a = &s[d];
                    let e = &g[d];
                    if e.is_multiple_of(a) {
                        let q = e / a;
                        let mut t = p.power_exps(s, &-q);
                        p.mul_assign_exps(&mut t, &g);
                        g = t;
                    } else {
                        let eg = a.extended_gcd(e);
                        let mut fresh = p.power_exps(s, &eg.x);
                        let gy = p.power_exps(&g, &eg.y);
                        p.mul_assign_exps(&mut fresh, &gy);
                        let old = self.slots[d].replace(fresh).expect("slot occupied");
                        self.dirty.insert(d);
                        queue.push_back(old);
                        queue.push_back(g);
                        return;
                    }
                }
            }
        }
    }

    fn run(mut self, gens: Vec<Exps>, normalizers: &[Exps]) -> Vec<Exps> {
        let p = self.p;
        let mut queue: VecDeque<Exps> = gens.into();
        loop {
            while let Some(g) = queue.pop_front() {
                self.insert(g, &mut queue);
            }
            if self.dirty.is_empty() {
                break;
            }
            let dirty: Vec<usize> = std::mem::take(&mut self.dirty).into_iter().collect();
            let current: Vec<Exps> = self.slots.iter().flatten().cloned().collect();
            for d in dirty {
                let Some(a) = self.slots[d].clone() else { continue };
                for b in current.iter().chain(normalizers) {
                    let c = p.commutator_exps(&a, b);
                    if leading(&c).is_some() {
                        queue.push_back(c);
                    }
                }
            }
        }
        let mut rows: Vec<Exps> = self.slots.into_iter().flatten().collect();
        reduce(p, &mut rows);
        rows
    }
}

/// Reduces each row at the later pivot columns into `[0, pivot)` by right
/// multiplication with powers of the later rows.
fn reduce(p: &PcPresentation, rows: &mut [Exps]) {
    let pivots: Vec<usize> = rows.iter().map(|r| leading(r).expect("nonzero row")).collect();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let d = pivots[j];
            let q = rows[i][d].div_floor(&rows[j][d]);
            if !q.is_zero() {
                let t = p.power_exps(&rows[j], &-q);
                let mut r = rows[i].clone();
                p.mul_assign_exps(&mut r, &t);
                rows[i] = r;
            }
        }
    }
}

/// Canonical induced sequence of the subgroup generated by `gens` and closed
/// under conjugation by `normalizers`.
pub(crate) fn close(p: &PcPresentation, gens: Vec<Exps>, normalizers: &[Exps]) -> Vec<Exps> {
    Builder::new(p).run(gens, normalizers)
}

/// Exponents `k` with `g = s_1^{k_1} ⋯ s_r^{k_r}`, or `None` when `g` is not
/// in the subgroup.
pub(crate) fn sift(p: &PcPresentation, seq: &[Exps], g: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = g.to_vec();
    let mut coeffs = Vec::with_capacity(seq.len());
    for s in seq {
        let d = leading(s).expect("nonzero row");
        if rest[..d].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let (k, r) = rest[d].div_rem(&s[d]);
        if !r.is_zero() {
            return None;
        }
        if !k.is_zero() {
            let mut t = p.power_exps(s, &-&k);
            p.mul_assign_exps(&mut t, &rest);
            rest = t;
        }
        coeffs.push(k);
    }
    if rest.iter().all(Zero::is_zero) {
        Some(coeffs)
    } else {
        None
    }
}

/// `s_1^{k_1} ⋯ s_r^{k_r}`.
pub(crate) fn evaluate(p: &PcPresentation, seq: &[Exps], coeffs: &[BigInt]) -> Exps {
    let mut acc = vec![BigInt::zero(); p.generator_count()];
    for (s, k) in seq.iter().zip(coeffs) {
        if !k.is_zero() {
            let t = p.power_exps(s, k);
            p.mul_assign_exps(&mut acc, &t);
        }
    }
    acc
}
