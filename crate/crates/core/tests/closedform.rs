use grained::closedform::*;
use grained::ErrorBoundMode;
use proptest::prelude::*;
use statrs::function::gamma::gamma_lr;
use std::f64::consts::{LN_2, PI};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn fact(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[test]
fn interval_factors() {
    assert!((interval_factor(Method::Lambda, 0.2327, 4) - 0.434).abs() < 1e-3);
    assert!((interval_factor(Method::Nu, 0.2327, 4) - 0.957).abs() < 1e-3);
    assert!((interval_factor(Method::Eta, 0.2327, 4) - 0.978).abs() < 1e-3);
    assert_eq!(interval_factor(Method::Kappa, 0.2327, 4), 1.0);
}

#[test]
fn constants() {
    let m = ErrorBoundMode::Riemann;
    assert_eq!(c_hat(0, 1e6, 0.25, m).unwrap(), 0.0);
    let c1 = 2.25 * 1e6f64.ln() / (8.0 * PI * 0.25 * 1000.0);
    assert!(rel(c_hat(1, 1e6, 0.25, m).unwrap(), c1) < 1e-14);
    assert!((c1 - 4.946e-3).abs() < 2e-6);
    assert!(c_hat(3, 1e6, 0.25, m).unwrap() <= 0.14);
    assert!(c_hat(1, 2000.0, 0.25, m).is_err());
    assert!(c_hat(1, 1e5, 0.25, ErrorBoundMode::Dusart).is_err());
    assert_eq!(c_check(2, 1.0).unwrap(), 1.0 / 32.0);
    assert_eq!(c_check(1, 1.0).unwrap(), 1.0 / 16.0);
    assert!((c_check(4, 0.5).unwrap() - 1.6276e-4).abs() < 1e-8);
    assert!(c_check(2, 1.5).is_err());
}

#[test]
fn c_hat_simple_bound_holds() {
    for k in 2..=6 {
        assert!(c_hat(k, 1e6, 0.25, ErrorBoundMode::Riemann).unwrap() <= c_hat_simple_bound(k, 1e6, 0.25));
    }
}

#[test]
fn lambda_and_eta_examples() {
    let sp = ShapeParams::new(2f64.powf(1.0 / 0.2327), 0.2327, 1).unwrap();
    assert!((sp.theta() - LN_2).abs() < 1e-12);
    assert!(rel(lambda_norm(&sp, 1.0), 0.5 / LN_2) < 1e-13);
    assert!(rel(lambda_norm(&sp, 0.5), (1.0 - 2f64.powf(-0.5)) / LN_2) < 1e-13);
    assert_eq!(lambda_norm(&sp, 0.0), 0.0);
    let te = LN_2 - 1.2327f64.ln();
    assert!(rel(sp.theta_eta(), te) < 1e-12);
    assert!(rel(eta_norm(&sp, 1.0), (1.0 - (-te).exp()) / te) < 1e-12);
    assert_eq!(eta_norm(&sp, 0.0), 0.0);
    let sp2 = ShapeParams { k: 2, ..sp };
    assert!(rel(eta_norm(&sp2, 2.0), ((1.0 - (-te).exp()) / te).powi(2)) < 1e-12);
}

#[test]
fn lambda_hat_one_examples() {
    let sp = ShapeParams::new(1e6, 0.25, 1).unwrap();
    assert_eq!(lambda_hat_norm_1(&sp, -1.0).unwrap(), 0.0);
    let want = 2.0 / (8.0 * PI * 0.25) * 1e6f64.ln() * 1e-3;
    assert!(rel(lambda_hat_norm_1(&sp, 0.0).unwrap(), want) < 1e-13);
    assert!((want - 4.398e-3).abs() < 1e-6);
    assert!(lambda_hat_norm_1(&sp, 60.0).unwrap() < 1e-30);
}

#[test]
fn unimodal_and_bounded() {
    for k in 1..=7u32 {
        for theta in [LN_2, 2.0, 5.0] {
            let n = 2000;
            let vals: Vec<f64> = (0..=n)
                .map(|i| lambda_norm_theta(k, theta, (k as f64 + 1.0) * i as f64 / n as f64))
                .collect();
            let top = vals
                .iter()
                .enumerate()
                .fold(0, |m, (i, v)| if *v > vals[m] { i } else { m });
            assert!(vals[..=top].windows(2).all(|w| w[1] >= w[0] - 1e-15));
            assert!(vals[top..].windows(2).all(|w| w[1] <= w[0] + 1e-15));
            let xi_top = (k as f64 + 1.0) * top as f64 / n as f64;
            assert!(xi_top >= k as f64 / 2.0 - 1e-3, "k={k} θ={theta}");
            if let Some(xh) = xi_half(k, theta) {
                assert!((xh - xi_top).abs() < 2e-3 * k as f64);
            }
            assert!(vals.iter().all(|&v| v <= 1.0 / theta));
        }
    }
}

#[test]
fn hypothesis_report() {
    let h = lower_bound_hypothesis(4, 5.0, 0.5);
    assert!(h.theta_ok && h.epsilon_ok);
    assert!(h.xi_half.is_some());
    assert!(!lower_bound_hypothesis(4, 0.5, 0.5).theta_ok);
}

proptest! {
    #[test]
    fn three_forms_agree(k in 1u32..=7, ti in 0usize..3, f in -0.07f64..1.07) {
        let theta = [LN_2, 2.0, 5.0][ti];
        let xi = f * k as f64;
        let a = lambda_norm_theta(k, theta, xi);
        let b = lambda_norm_derivative_sum(k, theta, xi);
        let c = lambda_norm_integral(k, theta, xi, 1e-12);
        if a.abs() > 1e-30 {
            prop_assert!(rel(b, a) < 1e-9 && rel(c, a) < 1e-9, "{} {} {}", a, b, c);
        } else {
            prop_assert!(b.abs() < 1e-28 && c.abs() < 1e-28);
        }
    }

    #[test]
    fn endpoint_identity(k in 1u32..=7, theta in 0.3f64..8.0) {
        let want = ((1.0 - (-theta).exp()) / theta).powi(k as i32);
        prop_assert!(rel(lambda_norm_theta(k, theta, k as f64), want) < 1e-12);
    }

    #[test]
    fn cutexp_vs_incomplete_gamma(k in 1u32..12, z in 0.01f64..30.0) {
        let want = z.exp() * gamma_lr(k as f64, z);
        prop_assert!(rel(cutexp(k, z), want) < 1e-10);
    }

    #[test]
    fn small_xi_bounds(k in 2u32..=7, theta in 0.3f64..8.0, xi in 0.0f64..1.0) {
        let v = lambda_norm_theta(k, theta, xi);
        prop_assert!(v <= xi.powi(k as i32) / fact(k) * (1.0 + 1e-12));
        if theta >= 16f64.ln() / k as f64 {
            let lb = (-(4f64.ln().powi(2)) / theta).exp() / theta * xi.powi(k as i32) / fact(k);
            prop_assert!(v >= lb * (1.0 - 1e-12));
        }
    }

    #[test]
    fn right_end_lower_bound(k in 3u32..=7, theta in 0.3f64..8.0, f in 0.0f64..1.0) {
        let xi = k as f64 - 1.0 + f;
        let v = lambda_norm_theta(k, theta, xi);
        let lb = (1.0 - (-theta).exp()).powi(k as i32) / theta * (k as f64 - xi).powi(k as i32 - 1) / fact(k - 1);
        prop_assert!(v >= lb * (1.0 - 1e-10));
    }

    #[test]
    fn exp_bracket(ti in 0usize..4, f in 0.0f64..1.0) {
        let vt = [0.1, 1.0, LN_2, 5.0][ti];
        let z = f * vt;
        let tau = (1.0 - (-vt).exp()) / vt;
        let m = 1.0 - (-z).exp();
        prop_assert!(tau * z <= m * (1.0 + 1e-15) && m <= z);
    }

    #[test]
    fn kernel_ratios(alpha in 0.01f64..3.0, rho in 0.0f64..1.0, lb in 3.0f64..40.0) {
        let lp = (1.0 + rho * alpha) * lb;
        let r = lb / lp;
        prop_assert!(1.0 / (1.0 + alpha) <= r + 1e-15 && r <= 1.0);
        let eta = (-rho * alpha.ln_1p()).exp() / lb;
        let q = (1.0 / lp) / eta;
        let l = alpha.ln_1p();
        let qmin = (l / alpha) * (1.0 + alpha).powf(1.0 / l - 1.0 / alpha);
        prop_assert!(q <= 1.0 + 1e-12 && q >= qmin * (1.0 - 1e-12));
        // the minimum sits where d/dϱ [ϱ ln(1+α) − ln(1+ϱα)] = 0
        let at = 1.0 / l - 1.0 / alpha;
        prop_assert!((0.0..=1.0).contains(&at));
        let q_at = (1.0 / ((1.0 + at * alpha) * lb)) / ((-at * l).exp() / lb);
        prop_assert!(rel(q_at, qmin) < 1e-10);
    }

    #[test]
    fn c_hat_bound_in_range(k in 2u32..=6, e in 4.0f64..12.0, alpha in 0.05f64..2.0) {
        let b = 10f64.powf(e);
        prop_assume!(alpha >= b.ln() / b.sqrt() && b.ln().powi(2) <= b.sqrt());
        let c = c_hat(k, b, alpha, ErrorBoundMode::Riemann).unwrap();
        prop_assert!(c <= c_hat_simple_bound(k, b, alpha));
    }
}
