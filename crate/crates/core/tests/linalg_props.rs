use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use nilrfrs::linalg::{
    abelian_group_from_relations, finite_order_semisimple_check, hnf, is_unipotent, lattice_index, lattice_member,
    snf, IntMatrix,
};

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |v| {
            let rows: Vec<Vec<BigInt>> = v.chunks(c).map(|ch| ch.iter().map(|&x| x.into()).collect()).collect();
            IntMatrix::from_rows(c, rows).unwrap()
        })
    })
}

/// Cofactor expansion, independent of the elimination code.
fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from gcds of k×k minors.
fn determinantal_factors(a: &[Vec<i64>], cols: usize) -> (usize, Vec<i64>) {
    let rows = a.len();
    let mut divisors = vec![1i64];
    for k in 1..=rows.min(cols) {
        let mut g = 0i64;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let factors = divisors.windows(2).map(|w| w[1] / w[0]).collect();
    (rank, factors)
}

fn to_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect())
        .collect()
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.determinant().unwrap().abs() == BigInt::one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn smith_form_reconstructs(a in matrix(5, 9)) {
        let s = snf(&a);
        prop_assert!(is_unimodular(&s.u) && is_unimodular(&s.v));
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                prop_assert!(i == j || s.d[(i, j)].is_zero());
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
    }

    #[test]
    fn hermite_form_reconstructs(a in matrix(5, 9)) {
        let (h, u) = hnf(&a);
        prop_assert!(is_unimodular(&u));
        prop_assert_eq!(u.mul(&a).unwrap(), h.clone());
        let mut last_pivot: Option<usize> = None;
        for i in 0..h.rows() {
            match h.row(i).iter().position(|x| !x.is_zero()) {
                None => {
                    prop_assert!((i..h.rows()).all(|k| h.row(k).iter().all(Zero::is_zero)));
                    break;
                }
                Some(p) => {
                    prop_assert!(last_pivot.is_none_or(|q| p > q));
                    prop_assert!(h[(i, p)].is_positive());
                    for k in 0..i {
                        prop_assert!(!h[(k, p)].is_negative() && h[(k, p)] < h[(i, p)]);
                    }
                    last_pivot = Some(p);
                }
            }
        }
    }

    #[test]
    fn smith_diagonal_matches_determinantal_divisors(a in matrix(4, 4)) {
        let s = snf(&a);
        let (rank, factors) = determinantal_factors(&to_i64(&a), a.cols());
        prop_assert_eq!(s.rank(), rank);
        let diag: Vec<i64> = s.diagonal()[..rank].iter().map(|x| i64::try_from(x).unwrap()).collect();
        prop_assert_eq!(diag, factors);
    }

    #[test]
    fn index_is_invariant_under_unimodular_rows(a in matrix(3, 6), ops in prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..8)) {
        let n = a.cols();
        let rows = a.rows();
        let mut b = a.to_rows();
        for (i, j, k) in ops {
            let (i, j) = (i % rows, j % rows);
            if i != j {
                let rj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(rj) {
                    *x += y * k;
                }
            }
        }
        prop_assert_eq!(lattice_index(&a), lattice_index(&IntMatrix::from_rows(n, b).unwrap()));
    }

    #[test]
    fn membership_of_combinations(a in matrix(4, 6), coeffs in prop::collection::vec(-5i64..=5, 4)) {
        let n = a.cols();
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in coeffs.iter().take(a.rows()).enumerate() {
            for (j, x) in v.iter_mut().enumerate() {
                *x += &a[(i, j)] * c;
            }
        }
        prop_assert!(lattice_member(&a, &v).unwrap());
    }

    #[test]
    fn abelian_quotient_agrees_with_counting(a in matrix(3, 4)) {
        // |Hom(Z^n / R, Z/k)| = k^free · Π gcd(d_i, k), counted directly
        let n = a.cols();
        let st = abelian_group_from_relations(&a);
        let rows = to_i64(&a);
        for k in 2..=6i64 {
            let mut count = 0u64;
            let total = (k as u64).pow(n as u32);
            for code in 0..total {
                let x: Vec<i64> = (0..n).map(|i| ((code / (k as u64).pow(i as u32)) % k as u64) as i64).collect();
                if rows.iter().all(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>().rem_euclid(k) == 0) {
                    count += 1;
                }
            }
            let mut expected = (k as u64).pow(st.free_rank as u32);
            for d in &st.invariant_factors {
                expected *= i64::try_from(d).unwrap().gcd(&k) as u64;
            }
            prop_assert_eq!(count, expected, "k = {}", k);
        }
    }
}

#[test]
fn finite_order_classes_of_gl2() {
    let cases: [(&[&[i64]], u64); 7] = [
        (&[&[1, 0], &[0, 1]], 1),
        (&[&[-1, 0], &[0, -1]], 2),
        (&[&[1, 0], &[0, -1]], 2),
        (&[&[0, 1], &[1, 0]], 2),
        (&[&[0, -1], &[1, -1]], 3),
        (&[&[0, -1], &[1, 0]], 4),
        (&[&[0, -1], &[1, 1]], 6),
    ];
    for (rows, order) in cases {
        let a = IntMatrix::from_i64(rows);
        let r = finite_order_semisimple_check(&a).unwrap();
        assert_eq!(r.order, Some(order), "{a}");
        assert_eq!(is_unipotent(&a).unwrap(), order == 1, "{a}");
        assert_eq!(r.unipotent, order == 1);
    }
    let shear = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
    let r = finite_order_semisimple_check(&shear).unwrap();
    assert_eq!(r.order, None);
    assert!(r.unipotent);
}
