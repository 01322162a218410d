use grained::poly::{int, rat, RationalPoly};
use grained::sturmverify::*;
use grained::Error;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(c: &[BigRational]) -> RationalPoly {
    RationalPoly::new(c.to_vec())
}

fn mul(a: &RationalPoly, b: &RationalPoly) -> RationalPoly {
    let mut out = vec![BigRational::zero(); a.coeffs().len() + b.coeffs().len() - 1];
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    RationalPoly::new(out)
}

#[test]
fn g34_matches_nested_form() {
    let t = RationalPoly::x();
    let u = RationalPoly::from_i64(&[1, -1]);
    let tu = mul(&t, &u);
    let c = |n, d| RationalPoly::constant(rat(n, d));
    let add = |a: RationalPoly, b: RationalPoly| {
        let n = a.coeffs().len().max(b.coeffs().len());
        RationalPoly::new((0..n).map(|i| a.coeff(i) + b.coeff(i)).collect())
    };
    let u2 = mul(&u, &u);
    let t2 = mul(&t, &t);

    let inner4 = add(
        add(mul(&c(119, 144), &u2), mul(&c(89, 144), &t2)),
        mul(&tu, &c(407, 288)),
    );
    let inner3 = add(
        add(mul(&c(245, 96), &u), mul(&c(103, 24), &t)),
        mul(&tu, &inner4),
    );
    let inner2 = add(
        add(mul(&c(481, 96), &u2), mul(&c(35, 24), &t2)),
        mul(&tu, &inner3),
    );
    let nested = add(
        add(mul(&c(1, 12), &u), mul(&c(5, 6), &t)),
        mul(&tu, &inner2),
    );

    let g = build_g(3, 4).unwrap();
    let u3 = mul(&u2, &u);
    assert_eq!(mul(&nested, &u3), g);
    assert_eq!(reduced_g(3, 4).unwrap(), nested);
}

#[test]
fn table_for_three_to_seven() {
    let rows = sturm_table(&[3, 4, 5, 6, 7]).unwrap();
    let got: Vec<(u32, u32, usize)> = rows.iter().map(|r| (r.k, r.min_s, r.degree)).collect();
    assert_eq!(
        got,
        vec![(3, 4, 11), (4, 3, 13), (5, 4, 21), (6, 5, 31), (7, 6, 43)]
    );
    let csv = sturm_table_csv(&rows);
    assert!(csv.starts_with("k,min_s,degree,elapsed_secs\n"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn below_min_s_fails() {
    for (k, s) in [(3, 3), (4, 2), (5, 3), (6, 4)] {
        assert!(!verify_positivity(k, s).unwrap(), "k={k} s={s}");
    }
}

#[test]
fn out_of_range_arguments() {
    assert!(matches!(build_f(1), Err(Error::InvalidParams(_))));
    assert!(verify_positivity(2, 3).is_err());
    assert!(min_s(2).is_err());
    assert!(min_s(10).is_err());
    let z = RationalPoly::zero();
    assert!(matches!(
        sturm_root_count(&z, &int(0), &int(1)),
        Err(Error::Precondition(_))
    ));
    let q = RationalPoly::from_i64(&[1, 1]);
    assert!(sturm_root_count(&q, &int(1), &int(0)).is_err());
}

#[test]
fn substitution_agrees_with_pointwise_eval() {
    let f = build_f(4).unwrap();
    let sig = sigma(3);
    let g = f.substitute_tau(&sig);
    for n in 0..=10 {
        let t = rat(n, 10);
        assert_eq!(g.eval(&t), f.eval(&sig.eval(&t), &t));
    }
}

// Exact spot evaluation on a dense rational grid agrees with the Sturm verdict.
#[test]
fn dense_grid_positivity() {
    for (k, s) in [(3, 4), (4, 3), (5, 4), (6, 5)] {
        let h = reduced_g(k, s).unwrap();
        assert!(build_g(k, s).unwrap().eval(&BigRational::zero()).is_positive());
        for n in 1..400 {
            let v = h.eval(&rat(n, 400));
            assert!(v.is_positive(), "k={k} s={s} T={n}/400");
        }
    }
    // and for a failing pair the grid finds the sign change
    let h = reduced_g(3, 3).unwrap();
    let neg = (1..400).any(|n| !h.eval(&rat(n, 400)).is_positive());
    let g0 = build_g(3, 3).unwrap().eval(&BigRational::zero());
    assert!(neg || !g0.is_positive());
}

// Polynomials built from known factors: distinct rational roots (with
// multiplicities) times quadratics without real roots.
fn constructed(
    roots: &[(i64, i64, u32)],
    quads: &[(i64, i64)],
    scale: i64,
) -> (RationalPoly, Vec<BigRational>) {
    let mut poly = RationalPoly::constant(int(scale));
    let mut rs = Vec::new();
    for &(n, d, m) in roots {
        let r = rat(n, d);
        if rs.contains(&r) {
            continue;
        }
        for _ in 0..m {
            poly = mul(&poly, &p(&[-r.clone(), BigRational::one()]));
        }
        rs.push(r);
    }
    // (T − a)² + b with b > 0
    for &(a, b) in quads {
        let a = rat(a, 7);
        let b = rat(b.abs() + 1, 5);
        poly = mul(&poly, &p(&[&a * &a + b, -(int(2) * a), BigRational::one()]));
    }
    (poly, rs)
}

fn interval_count(rs: &[BigRational], a: &BigRational, b: &BigRational) -> usize {
    rs.iter().filter(|r| *r > a && *r < b).count()
}

fn check_constructed(roots: &[(i64, i64, u32)], quads: &[(i64, i64)], scale: i64, a: i64, b: i64) {
    let (poly, rs) = constructed(roots, quads, scale);
    let (a, b) = (rat(a, 3), rat(b, 3));
    if a >= b || rs.contains(&a) || rs.contains(&b) {
        return;
    }
    let got = sturm_root_count(&poly, &a, &b).unwrap();
    assert_eq!(got, interval_count(&rs, &a, &b), "poly {poly:?} on ]{a}, {b}[");
}

#[test]
fn twenty_seeded_constructed_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let nroots = rng.gen_range(0..=5);
        let roots: Vec<(i64, i64, u32)> = (0..nroots)
            .map(|_| (rng.gen_range(-30..30), rng.gen_range(1..8), rng.gen_range(1..=2)))
            .collect();
        let nq = rng.gen_range(0..=2);
        let quads: Vec<(i64, i64)> = (0..nq)
            .map(|_| (rng.gen_range(-20..20), rng.gen_range(0..10)))
            .collect();
        let scale = if rng.gen_bool(0.5) { 3 } else { -2 };
        let (poly, _) = constructed(&roots, &quads, scale);
        assert!(poly.degree().unwrap_or(0) <= 14);
        check_constructed(&roots, &quads, scale, -100, 100);
        check_constructed(&roots, &quads, scale, -5, 7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sturm_counts_constructed_roots(
        roots in prop::collection::vec((-40i64..40, 1i64..9, 1u32..3), 0..5),
        quads in prop::collection::vec((-20i64..20, 0i64..10), 0..3),
        neg in any::<bool>(),
        a in -60i64..60,
        w in 1i64..80,
    ) {
        check_constructed(&roots, &quads, if neg { -5 } else { 1 }, a, a + w);
    }
}
