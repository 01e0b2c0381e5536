mod common;

use std::collections::BTreeMap;

use conley_core::algebra::novikov::NovikovSeries;
use conley_core::algebra::ring::{Ring, RingElem};
use conley_core::homology::complex::{homology_novikov, homology_z, GradedModule, IntegerHomology, PChainComplex};
use conley_core::homology::matrix::RingMatrix;
use conley_core::homology::smith::smith_normal_form;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Dense = Vec<Vec<BigInt>>;

fn random_dense(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Dense {
    (0..m).map(|_| (0..n).map(|_| common::int(rng, -6, 6)).collect()).collect()
}

fn zeros(m: usize, n: usize) -> Dense {
    vec![vec![BigInt::zero(); n]; m]
}

fn eye(n: usize) -> Dense {
    let mut a = zeros(n, n);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    a
}

/// A random unimodular matrix together with its inverse, as a product of
/// elementary moves.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Dense, Dense) {
    let (mut p, mut q) = (eye(n), eye(n));
    if n < 2 {
        return (p, q);
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = common::int(rng, -2, 2);
        // p <- (1 + c e_ij) p, q <- q (1 - c e_ij)
        for k in 0..n {
            let v = &c * &p[j][k];
            p[i][k] += v;
        }
        for row in q.iter_mut() {
            let v = &c * &row[i];
            row[j] -= v;
        }
    }
    (p, q)
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn complex_z(dims: [usize; 3], d1: &Dense, d2: &Dense) -> PChainComplex {
    let [n0, n1, n2] = dims;
    let module = GradedModule::new(BTreeMap::from([(0, ids("a", n0)), (1, ids("b", n1)), (2, ids("c", n2))])).unwrap();
    let mut boundary = BTreeMap::new();
    if n0 > 0 && n1 > 0 {
        boundary.insert(1, RingMatrix::from_int_rows(ids("a", n0), ids("b", n1), d1).unwrap());
    }
    if n1 > 0 && n2 > 0 {
        boundary.insert(2, RingMatrix::from_int_rows(ids("b", n1), ids("c", n2), d2).unwrap());
    }
    PChainComplex::new(module, Ring::Integer, boundary).unwrap()
}

/// Invariant factors of a diagonal matrix, from ratios of minor gcds.
fn invariant_factors(diag: &[BigInt]) -> Vec<BigInt> {
    let n = diag.len();
    let mut a = zeros(n, n);
    for (i, x) in diag.iter().enumerate() {
        a[i][i] = x.clone();
    }
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=n {
        let g = common::minor_gcd(&a, k);
        if g.is_zero() {
            break;
        }
        let f = &g / &prev;
        if !f.is_one() {
            out.push(f);
        }
        prev = g;
    }
    out
}

fn nonzero_diag(rng: &mut ChaCha8Rng, r: usize) -> Vec<BigInt> {
    (0..r)
        .map(|_| {
            let x = common::int(rng, 1, 6);
            if rng.gen_bool(0.5) { -x } else { x }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn smith_agrees_with_minor_gcds(seed in any::<u64>(), m in 1usize..=5, n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_dense(&mut rng, m, n);
        let s = smith_normal_form(&a, m, n);
        if let Err(e) = common::smith_oracle(&a, &s.divisors) {
            prop_assert!(false, "{:?}: {}", a, e);
        }
        prop_assert!(common::det(&s.u).abs().is_one());
        prop_assert!(common::det(&s.v).abs().is_one());
        prop_assert_eq!(common::matmul(&common::matmul(&s.u, &a), &s.v), s.d.clone());
        for w in s.divisors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    /// A complex in standard form, disguised by unimodular changes of basis
    /// in every degree, has the homology read off the standard form.
    #[test]
    fn homology_survives_change_of_basis(seed in any::<u64>(), n0 in 0usize..=3, n1 in 0usize..=4, n2 in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r2 = rng.gen_range(0..=n1.min(n2));
        let r1 = rng.gen_range(0..=(n1 - r2).min(n0));
        let (a, b) = (nonzero_diag(&mut rng, r2), nonzero_diag(&mut rng, r1));
        let mut d2 = zeros(n1, n2);
        for (i, x) in a.iter().enumerate() {
            d2[i][i] = x.clone();
        }
        let mut d1 = zeros(n0, n1);
        for (i, x) in b.iter().enumerate() {
            d1[i][r2 + i] = x.clone();
        }
        let (p0, _) = unimodular(&mut rng, n0);
        let (p1, p1_inv) = unimodular(&mut rng, n1);
        let (_, p2_inv) = unimodular(&mut rng, n2);
        let d1 = if n0 * n1 > 0 { common::matmul(&common::matmul(&p0, &d1), &p1_inv) } else { d1 };
        let d2 = if n1 * n2 > 0 { common::matmul(&common::matmul(&p1, &d2), &p2_inv) } else { d2 };

        let c = complex_z([n0, n1, n2], &d1, &d2);
        prop_assert!(c.verify_boundary_squared().passed());
        let h = homology_z(&c).unwrap();
        let expect = |n: usize, betti: usize, torsion: Vec<BigInt>| (n > 0).then_some(IntegerHomology { betti, torsion });
        prop_assert_eq!(h.get(&0).cloned(), expect(n0, n0 - r1, invariant_factors(&b)));
        prop_assert_eq!(h.get(&1).cloned(), expect(n1, n1 - r1 - r2, invariant_factors(&a)));
        prop_assert_eq!(h.get(&2).cloned(), expect(n2, n2 - r2, vec![]));
    }

    #[test]
    fn homology_ignores_generator_order(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_dense(&mut rng, m, n);
        let c = complex_z([m, n, 0], &a, &zeros(n, 0));
        let mut rows: Vec<usize> = (0..m).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        for i in (1..m).rev() { rows.swap(i, rng.gen_range(0..=i)); }
        for i in (1..n).rev() { cols.swap(i, rng.gen_range(0..=i)); }
        let row_ids: Vec<String> = rows.iter().map(|&i| format!("a{i}")).collect();
        let col_ids: Vec<String> = cols.iter().map(|&j| format!("b{j}")).collect();
        let shuffled: Dense = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect();
        let module = GradedModule::new(BTreeMap::from([(0, row_ids.clone()), (1, col_ids.clone())])).unwrap();
        let c2 = PChainComplex::new(
            module,
            Ring::Integer,
            BTreeMap::from([(1, RingMatrix::from_int_rows(row_ids, col_ids, &shuffled).unwrap())]),
        )
        .unwrap();
        prop_assert_eq!(homology_z(&c).unwrap(), homology_z(&c2).unwrap());
    }

    #[test]
    fn novikov_homology_ignores_unit_rescaling(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = Ring::Novikov { variable: "t".into(), precision: 24 };
        let entry = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..=3);
            NovikovSeries::laurent(rng.gen_range(0..=2), common::coeffs(rng, len), 24)
        };
        let a: Vec<Vec<NovikovSeries>> = (0..m).map(|_| (0..n).map(|_| entry(&mut rng)).collect()).collect();
        let j = rng.gen_range(0..n);
        let u = common::unit_series(&mut rng, 24);
        let build = |scale: bool| {
            let entries = (0..m).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| {
                let x = if scale && c == j { a[r][c].mul(&u) } else { a[r][c].clone() };
                (r, c, RingElem::Series(x))
            });
            let mat = RingMatrix::from_entries(&ring, ids("a", m), ids("b", n), entries).unwrap();
            let module = GradedModule::new(BTreeMap::from([(0, ids("a", m)), (1, ids("b", n))])).unwrap();
            PChainComplex::new(module, ring.clone(), BTreeMap::from([(1, mat)])).unwrap()
        };
        let plain = homology_novikov(&build(false));
        prop_assume!(plain.is_ok());
        let scaled = homology_novikov(&build(true));
        prop_assume!(scaled.is_ok());
        let (h, k) = (plain.unwrap(), scaled.unwrap());
        for (deg, g) in &h.degrees {
            let other = &k.degrees[deg];
            prop_assert_eq!(g.rank, other.rank);
            prop_assert_eq!(g.divisors.len(), other.divisors.len());
            for (x, y) in g.divisors.iter().zip(&other.divisors) {
                prop_assert!(x.eq_to_precision(y), "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>(), dims in prop::array::uniform4(1usize..=3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [p, q, r, s] = dims;
        let mat = |rng: &mut ChaCha8Rng, rows: &str, m: usize, cols: &str, n: usize| {
            RingMatrix::from_int_rows(ids(rows, m), ids(cols, n), &random_dense(rng, m, n)).unwrap()
        };
        let a = mat(&mut rng, "p", p, "q", q);
        let b = mat(&mut rng, "q", q, "r", r);
        let c = mat(&mut rng, "r", r, "s", s);
        let lhs = a.compose(&b).unwrap().compose(&c).unwrap();
        let rhs = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        let dense = common::matmul(&common::matmul(&a.to_dense_int().unwrap(), &b.to_dense_int().unwrap()), &c.to_dense_int().unwrap());
        prop_assert_eq!(lhs.to_dense_int().unwrap(), dense);
    }
}
