use num_bigint::BigInt;
use proptest::prelude::*;

use nilrfrs::linalg::{IntMatrix, LatticeIndex};
use nilrfrs::nilpotent::{GroupElement, PcPresentation};
use nilrfrs::subgroup::{
    enumerate_normal_subgroups, index, induced_presentation, intersect, is_normal, relative_index, subgroup_closure,
    Subgroup,
};

type V = [i64; 3];

fn hmul(a: V, b: V) -> V {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2] - a[1] * b[0]]
}

fn hinv(a: V) -> V {
    [-a[0], -a[1], -a[2] - a[0] * a[1]]
}

/// Membership in the row span of an upper triangular basis.
fn in_lattice(h: &[V], v: V) -> bool {
    let mut r = v;
    for (i, row) in h.iter().enumerate() {
        if r[i] % row[i] != 0 {
            return false;
        }
        let q = r[i] / row[i];
        for j in 0..3 {
            r[j] -= q * row[j];
        }
    }
    r == [0, 0, 0]
}

fn span_box(h: &[V], k: i64) -> Vec<V> {
    let mut out = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            for c in -k..=k {
                out.push([
                    a * h[0][0] + b * h[1][0] + c * h[2][0],
                    a * h[0][1] + b * h[1][1] + c * h[2][1],
                    a * h[0][2] + b * h[1][2] + c * h[2][2],
                ]);
            }
        }
    }
    out
}

/// All upper triangular Hermite bases of `Z^3` with determinant at most `bound`
/// whose span is a normal subgroup of the Heisenberg group.
fn brute_force_normal(bound: i64) -> Vec<Vec<V>> {
    let mut out = Vec::new();
    for d0 in 1..=bound {
        for d1 in 1..=bound / d0 {
            for d2 in 1..=bound / (d0 * d1) {
                for e01 in 0..d1 {
                    for e02 in 0..d2 {
                        for e12 in 0..d2 {
                            let h = vec![[d0, e01, e02], [0, d1, e12], [0, 0, d2]];
                            let elems = span_box(&h, 2);
                            let closed = elems.iter().all(|&x| {
                                in_lattice(&h, hinv(x)) && elems.iter().all(|&y| in_lattice(&h, hmul(x, y)))
                            });
                            let conj = [[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]];
                            let normal = elems
                                .iter()
                                .all(|&x| conj.iter().all(|&g| in_lattice(&h, hmul(hmul(hinv(g), x), g))));
                            if closed && normal {
                                out.push(h);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn rows_of(s: &Subgroup) -> Vec<V> {
    s.basis()
        .to_rows()
        .iter()
        .map(|r| {
            let v: Vec<i64> = r.iter().map(|x| i64::try_from(x).unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

fn gens(p: &PcPresentation, rows: &[Vec<i64>]) -> Subgroup {
    subgroup_closure(p, &rows.iter().map(|r| GroupElement::from_i64(r)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn heisenberg_enumeration_matches_brute_force() {
    let p = PcPresentation::heisenberg();
    for bound in 1..=8 {
        let mut expected = brute_force_normal(bound);
        expected.sort_by_key(|h| (h[0][0] * h[1][1] * h[2][2], h.clone()));
        let found: Vec<Vec<V>> = enumerate_normal_subgroups(&p, bound as u64)
            .unwrap()
            .iter()
            .map(rows_of)
            .collect();
        assert_eq!(found, expected, "bound {bound}");
    }
}

#[test]
fn free_abelian_plane_counts() {
    // Z^2 has σ(k) subgroups of index k
    let p = PcPresentation::free_abelian(2);
    let sigma = |k: u64| (1..=k).filter(|d| k.is_multiple_of(*d)).sum::<u64>();
    for bound in 1..=12u64 {
        let n = enumerate_normal_subgroups(&p, bound).unwrap().len() as u64;
        assert_eq!(n, (1..=bound).map(sigma).sum::<u64>());
    }
}

#[test]
fn enumerated_subgroups_are_nonabelian() {
    let p = PcPresentation::heisenberg();
    for s in enumerate_normal_subgroups(&p, 8).unwrap() {
        let ind = induced_presentation(&p, &s).unwrap();
        assert!(!ind.presentation.is_abelian(), "{}", s.basis());
        assert_eq!(ind.presentation.hirsch_rank(), p.hirsch_rank());
        assert!(is_normal(&p, &s));
    }
}

fn full_rank_rows() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1i64..=4, 1i64..=4, 1i64..=4, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_map(|(a, b, c, d, e, f)| vec![vec![a, d, e], vec![0, b, f], vec![0, 0, c]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn index_is_multiplicative(r1 in full_rank_rows(), r2 in full_rank_rows()) {
        let p = PcPresentation::heisenberg();
        let s1 = gens(&p, &r1);
        // s2 = subgroup generated by s1 and the products of its generators with r2
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for g in s1.generators() {
            for r in &r2 {
                let h = p.power(&g, &BigInt::from(r.iter().map(|x| x.abs()).max().unwrap().max(1)));
                rows.push(h.exps().iter().map(|x| i64::try_from(x).unwrap()).collect());
            }
        }
        let s2 = gens(&p, &rows);
        prop_assert!(s2.is_subgroup_of(&p, &s1));
        let (LatticeIndex::Finite(i1), LatticeIndex::Finite(i2), LatticeIndex::Finite(rel)) =
            (index(&p, &s1).unwrap(), index(&p, &s2).unwrap(), relative_index(&p, &s2, &s1).unwrap())
        else {
            return Err(TestCaseError::fail("infinite index"));
        };
        prop_assert_eq!(i2, i1 * rel);
    }

    #[test]
    fn induced_inclusion_is_a_homomorphism(r in full_rank_rows()) {
        let p = PcPresentation::heisenberg();
        let s = gens(&p, &r);
        let ind = induced_presentation(&p, &s).unwrap();
        let q = &ind.presentation;
        prop_assert_eq!(q.hirsch_rank(), p.hirsch_rank());
        for a in q.generators() {
            for b in q.generators() {
                prop_assert_eq!(
                    ind.to_ambient(&p, &q.multiply(&a, &b)),
                    p.multiply(&ind.to_ambient(&p, &a), &ind.to_ambient(&p, &b))
                );
            }
        }
    }

    #[test]
    fn closure_is_closed(r in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 0..4)) {
        let p = PcPresentation::heisenberg();
        let s = gens(&p, &r);
        for g in &r {
            prop_assert!(s.contains(&p, &GroupElement::from_i64(g)));
        }
        let gs = s.generators();
        for a in &gs {
            prop_assert!(s.contains(&p, &p.inverse(a)));
            for b in &gs {
                prop_assert!(s.contains(&p, &p.multiply(a, b)));
            }
        }
        // canonical: regenerating from the basis gives the same subgroup
        let again = gens(&p, &s.basis().to_rows().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect::<Vec<_>>());
        prop_assert_eq!(again, s);
    }

    #[test]
    fn intersection_is_set_intersection(r1 in full_rank_rows(), r2 in full_rank_rows()) {
        let p = PcPresentation::heisenberg();
        let (a, b) = (gens(&p, &r1), gens(&p, &r2));
        if !(a.is_lattice() && b.is_lattice()) {
            return Ok(());
        }
        let c = intersect(&p, &a, &b).unwrap();
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                for z in -4i64..=4 {
                    let g = GroupElement::from_i64(&[x, y, z]);
                    prop_assert_eq!(c.contains(&p, &g), a.contains(&p, &g) && b.contains(&p, &g));
                }
            }
        }
    }
}

#[test]
fn class_three_closure_and_index() {
    let p = PcPresentation::unitriangular(4);
    let s = subgroup_closure(&p, &[GroupElement::from_i64(&[1, 0, 0, 0, 0, 0]), GroupElement::from_i64(&[0, 1, 0, 0, 0, 0])])
        .unwrap();
    // ⟨x12, x23⟩ contains x13 = [x12, x23]
    assert!(s.contains(&p, &GroupElement::from_i64(&[0, 0, 0, 1, 0, 0])));
    assert_eq!(index(&p, &s).unwrap(), LatticeIndex::Infinite);
    let whole = Subgroup::whole(&p);
    assert_eq!(index(&p, &whole).unwrap(), LatticeIndex::Finite(1.into()));
    assert!(is_normal(&p, &p.center()));
    assert_eq!(
        p.center().basis(),
        &IntMatrix::from_i64(&[&[0, 0, 0, 0, 0, 1]])
    );
}
