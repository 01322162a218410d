use grained::closedform::{self, c_hat, interval_factor, Method, ShapeParams};
use grained::exact::{kappa_exact, pi_exact, ExactCounter};
use grained::integral::*;
use grained::primes::{log_integral, ErrorBoundMode};
use grained::quad::{integrate, Tolerance};
use grained::{Error, GrainParams};
use proptest::prelude::*;

const RIEMANN: ErrorBoundMode = ErrorBoundMode::Riemann;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn li(x: f64) -> f64 {
    log_integral(x).unwrap()
}

fn tight() -> Tolerance {
    Tolerance {
        rel: 1e-13,
        abs: 0.0,
        max_depth: 50,
    }
}

// κ̃²(x) = ∫_B^{min(C, x/B)} (li(min(C, x/p)) − li(B)) / ln p dp
fn kappa2_oracle(b: f64, c: f64, x: f64) -> f64 {
    let top = c.min(x / b);
    let r = integrate(
        |p| (li(c.min(x / p)) - li(b)) / p.ln(),
        b,
        top,
        &[x / c],
        tight(),
    );
    assert!(r.converged);
    r.value
}

fn e_hat(p: f64) -> f64 {
    RIEMANN.bound(p).unwrap()
}

fn e_hat_d(p: f64) -> f64 {
    RIEMANN.derivative(p).unwrap()
}

// κ̂²(x) for x ∈ [B², BC] from its explicit double integral
fn kappa2_hat_oracle(b: f64, x: f64) -> f64 {
    let top = x / b;
    let inner = |p: f64| {
        let r = integrate(
            |q| e_hat_d(q) / p.ln() + e_hat_d(p) / q.ln() + e_hat_d(p) * e_hat_d(q),
            b,
            x / p,
            &[],
            tight(),
        );
        r.value
    };
    let dbl = integrate(inner, b, top, &[], tight()).value;
    dbl + 4.0 * e_hat(b) * (li(top) - li(b)) + 4.0 * e_hat(b) * e_hat(top)
}

#[test]
fn kappa2_tilde_against_double_integral() {
    let (b, c) = (1000u64, 10_000u64);
    let p = GrainParams::new(b, c, 2).unwrap();
    let eng = Engine::for_params(&p, Method::Kappa, None, QuadratureConfig::default()).unwrap();
    for i in 0..=24 {
        let x = 1e6 * (1e8f64 / 1e6).powf(i as f64 / 24.0);
        let got = eng.tilde(2, x).unwrap();
        let want = kappa2_oracle(b as f64, c as f64, x);
        assert!(rel(got, want) < 1e-9 || (got - want).abs() < 1e-9, "x={x}: {got} vs {want}");
    }
}

#[test]
fn kappa2_hat_against_double_integral() {
    let p = GrainParams::new(3000, 22_202, 2).unwrap();
    let eng = Engine::for_params(&p, Method::Kappa, Some(RIEMANN), QuadratureConfig::default())
        .unwrap();
    for i in 1..=10 {
        let x = 9e6 * (22_202.0f64 / 3000.0).powf(i as f64 / 10.0);
        let got = eng.hat(2, x).unwrap();
        let want = kappa2_hat_oracle(3000.0, x);
        assert!(rel(got, want) < 1e-8, "x={x}: {got} vs {want}");
    }
}

#[test]
fn sandwich_against_exact_counts() {
    for k in [2u32, 3] {
        let p = GrainParams::from_exponent(3000, 1.25, k).unwrap();
        let eng =
            Engine::for_params(&p, Method::Kappa, Some(RIEMANN), QuadratureConfig::default())
                .unwrap();
        let counter = ExactCounter::for_params(&p).unwrap();
        let lo = 3000f64.powi(k as i32) * 0.9;
        let hi = (p.c as f64).powi(k as i32) * 1.1;
        let n = if k == 2 { 30 } else { 12 };
        for i in 0..=n {
            let x = lo * (hi / lo).powf(i as f64 / n as f64);
            let (t, h) = eng.values(k, x).unwrap();
            let exact = counter.kappa(k, x).unwrap() as f64;
            assert!((exact - t).abs() <= h, "k={k} x={x}: {exact} vs {t} ± {h}");
        }
    }
}

#[test]
fn kappa_between_lambda_and_its_shrink() {
    for (b, c) in [(3000u64, 22_202u64), (10_000, 1_000_000)] {
        let p = GrainParams::new(b, c, 3).unwrap();
        let sp = ShapeParams::from_grain(&p).unwrap();
        let cfg = QuadratureConfig::default();
        let kap = Engine::for_params(&p, Method::Kappa, Some(RIEMANN), cfg).unwrap();
        let lam = Engine::for_params(&p, Method::Lambda, Some(RIEMANN), cfg).unwrap();
        for k in 1..=3u32 {
            let spk = ShapeParams { k, ..sp };
            let lf = interval_factor(Method::Lambda, sp.alpha, k);
            // absolute slack against the size of the functions near the top
            let lt_top = closedform::lambda_tilde(&spk, k as f64);
            let lh_top = lam.values(k, spk.x_of_xi(k as f64)).unwrap().1;
            let ef = interval_factor(Method::Eta, sp.alpha, k);
            for i in 0..=40 {
                let xi = k as f64 * i as f64 / 40.0;
                let x = spk.x_of_xi(xi);
                let (kt, kh) = kap.values(k, x).unwrap();
                let lt = closedform::lambda_tilde(&spk, xi);
                let et = closedform::eta_tilde(&spk, xi);
                let (_, lh) = lam.values(k, x).unwrap();
                let slack = 1e-7 * lt + 1e-10 * lt_top;
                assert!(kt <= lt + slack && kt >= lf * lt - slack, "k={k} ξ={xi}");
                assert!(kt <= et + slack && kt >= ef * et - slack, "η k={k} ξ={xi}");
                let hs = 1e-7 * lh + 1e-10 * lh_top;
                assert!(kh <= lh + hs && kh >= lf * lh - hs, "hat k={k} ξ={xi}");
            }
        }
    }
}

#[test]
fn quadrature_paths_match_closed_forms() {
    let cfg = QuadratureConfig::default();
    for k in 1..=4u32 {
        let sp = ShapeParams::new(1e6, 0.3, k).unwrap();
        for i in 0..=16 {
            let xi = 0.05 + (k as f64 - 0.1) * i as f64 / 16.0;
            let lq = lambda_tilde_quad(&sp, k, xi, cfg).unwrap();
            let lc = closedform::lambda_tilde(&sp, xi);
            assert!(rel(lq, lc) < 1e-8, "λ k={k} ξ={xi}: {lq} vs {lc}");
            let eq = eta_tilde_quad(&sp, k, xi, cfg).unwrap();
            let ec = closedform::eta_tilde(&sp, xi);
            assert!(rel(eq, ec) < 1e-8, "η k={k} ξ={xi}: {eq} vs {ec}");
        }
    }
}

#[test]
fn nu_lies_between_eta_and_lambda_factors() {
    let cfg = QuadratureConfig::default();
    let sp = ShapeParams::new(1e6, 0.25, 3).unwrap();
    let p = GrainParams::new(1_000_000, 1e6f64.powf(1.25).round() as u64, 3).unwrap();
    let kap = Engine::for_params(&p, Method::Kappa, None, cfg).unwrap();
    let nf = interval_factor(Method::Nu, sp.alpha, 3);
    for i in 1..=12 {
        let xi = 3.0 * i as f64 / 13.0;
        let x = sp.x_of_xi(xi);
        let nu = nu_tilde(&sp, 3, xi, cfg).unwrap();
        let kt = kap.tilde(3, x).unwrap();
        assert!(kt <= nu * (1.0 + 1e-6) && kt >= nf * nu * (1.0 - 1e-6), "ξ={xi}");
    }
}

#[test]
fn error_transport_is_monotone() {
    let p = GrainParams::from_exponent(3000, 1.25, 3).unwrap();
    let eng = Engine::for_params(&p, Method::Kappa, Some(RIEMANN), QuadratureConfig::default())
        .unwrap();
    let lo = 2.5e10f64;
    let hi = (p.c as f64).powi(3) * 1.2;
    let mut last = 0.0;
    for i in 0..=200 {
        let x = lo * (hi / lo).powf(i as f64 / 200.0);
        let (t, h) = eng.values(3, x).unwrap();
        assert!(t + h >= last * (1.0 - 1e-9), "x={x}");
        last = t + h;
    }
}

#[test]
fn continuous_across_case_boundaries() {
    let p = GrainParams::from_exponent(3000, 1.25, 3).unwrap();
    let eng = Engine::for_params(&p, Method::Kappa, Some(RIEMANN), QuadratureConfig::default())
        .unwrap();
    for j in 0..=3 {
        let xb = p.case_boundary_f64(j);
        let (tl, hl) = eng.values(3, xb * (1.0 - 1e-10)).unwrap();
        let (tr, hr) = eng.values(3, xb * (1.0 + 1e-10)).unwrap();
        let scale = eng.values(3, xb * 2.0).unwrap().0;
        assert!((tl - tr).abs() <= 1e-7 * scale, "j={j}: {tl} vs {tr}");
        if j == 0 {
            // the point terms switch on together at B^k: a jump of (2Ê(B))^k
            let jump = (2.0 * e_hat(3000.0)).powi(3);
            assert!(hl == 0.0 && rel(hr, jump) < 1e-8, "{hr} vs {jump}");
        } else {
            assert!((hl - hr).abs() <= 1e-7 * scale, "j={j}: {hl} vs {hr}");
        }
    }
}

#[test]
fn lambda_hat_within_c_hat() {
    let cfg = QuadratureConfig::default();
    for mode in [ErrorBoundMode::Riemann, ErrorBoundMode::Dusart] {
        for k in 1..=4u32 {
            let sp = ShapeParams::new(1e6, 0.25, k).unwrap();
            let ch = c_hat(k, sp.b, sp.alpha, mode).unwrap();
            for i in 0..=20 {
                let xi = -0.5 + (k as f64 + 1.0) * i as f64 / 20.0;
                let v = lambda_hat_norm(&sp, k, xi, mode, cfg).unwrap();
                assert!(v >= 0.0 && v <= ch, "{mode:?} k={k} ξ={xi}: {v} > {ch}");
            }
        }
    }
}

#[test]
fn pi_estimates_cover_exact_counts() {
    let cfg = QuadratureConfig::default();
    let p = GrainParams::from_exponent(3000, 1.25, 2).unwrap();
    for i in 0..=10 {
        let x = 9e6 * 1.2 * (p.c as f64 / 3000.0).powf(2.0 * i as f64 / 10.0) * 0.9;
        let pi = pi_exact(&p, x).unwrap() as f64;
        let t = pi_tilde(&p, x, cfg).unwrap();
        let h = pi_hat(&p, x, RIEMANN, cfg).unwrap();
        assert!((pi - t).abs() <= h, "x={x}");
        let h1 = pi_hat_with(&p, x, RIEMANN, cfg, true).unwrap();
        assert_eq!(h, h1);
    }
    let p1 = p.with_k(1);
    let a = pi_hat_with(&p1, 1e4, RIEMANN, cfg, false).unwrap();
    let b = pi_hat_with(&p1, 1e4, RIEMANN, cfg, true).unwrap();
    assert!((a - b - 1e4 / 3000.0).abs() < 1e-9);
}

#[test]
fn main_bound_at_desk_scale() {
    let p = GrainParams::from_exponent(3000, 1.25, 2).unwrap();
    let ln_b = 3000f64.ln();
    let lo = 9e6 * 1.5;
    let hi = (p.c as f64).powi(2) * 0.5;
    for i in 0..=20 {
        let x = lo * (hi / lo).powf(i as f64 / 20.0);
        let mb = main_bound(&p, x, 0.5, RIEMANN).unwrap();
        assert!(mb.a_lo < mb.a_hi);
        let count = pi_exact(&p, x).unwrap() as f64;
        assert!(mb.admits(count, x, ln_b), "x={x}");
    }
    assert!(matches!(main_bound(&p, lo * 0.9, 0.5, RIEMANN), Err(Error::Domain(_))));
    assert!(main_bound(&p.with_k(1), lo, 0.5, RIEMANN).is_err());
}

#[test]
fn enclosure_ordering_at_application_scale() {
    let sp = ShapeParams::new(1.1e9, ((1u64 << 37) - 1) as f64, 4).unwrap();
    let sp = ShapeParams {
        alpha: sp.alpha.ln() / 1.1e9f64.ln() - 1.0,
        ..sp
    };
    let cfg = QuadratureConfig::default();
    let eng = Engine::for_shape(&sp, Method::Kappa, 4, Some(RIEMANN), cfg).unwrap();
    for i in 1..10 {
        let xi = 4.0 * i as f64 / 10.0;
        let x = sp.x_of_xi(xi);
        let l = estimate_closed(Method::Lambda, &sp, x, RIEMANN).unwrap();
        let e = estimate_closed(Method::Eta, &sp, x, RIEMANN).unwrap();
        let k = estimate_kappa(&eng, 4, x).unwrap();
        assert!(l.lower <= e.lower && e.upper <= l.upper, "ξ={xi}");
        assert!(e.contains(k.center()) && l.contains(k.center()), "ξ={xi}");
        assert!(k.lower <= k.upper);
    }
}

#[test]
fn argument_checks() {
    let cfg = QuadratureConfig::default();
    assert!(Engine::new(10.0, 5.0, Method::Kappa, 2, None, cfg).is_err());
    assert!(Engine::new(3000.0, 1e5, Method::Kappa, 5, None, cfg).is_err());
    let bad = QuadratureConfig {
        rel_tol: 0.0,
        ..cfg
    };
    assert!(bad.validate().is_err());
    let eng = Engine::new(3000.0, 1e5, Method::Kappa, 2, None, cfg).unwrap();
    assert!(eng.hat(2, 1e7).is_err());
    let sp = ShapeParams::new(1e6, 0.25, 2).unwrap();
    assert!(estimate_closed(Method::Nu, &sp, 1e12, RIEMANN).is_err());
    assert!(estimate_nu(&eng, &sp, 1e12, RIEMANN).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_sandwich_on_random_small_instances(
        b in 2700u64..6000,
        s in 1.1f64..1.4,
        t in 0.0f64..1.0,
    ) {
        let p = GrainParams::from_exponent(b, s, 2).unwrap();
        let lo = (b as f64).powi(2);
        let hi = (p.c as f64).powi(2);
        let x = lo * (hi / lo).powf(t);
        let eng = Engine::for_params(&p, Method::Kappa, Some(RIEMANN), QuadratureConfig::default())
            .unwrap();
        let (kt, kh) = eng.values(2, x).unwrap();
        let exact = kappa_exact(&p, x).unwrap() as f64;
        prop_assert!((exact - kt).abs() <= kh);
    }
}
