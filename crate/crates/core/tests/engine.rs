//! Cross-module checks: the same quantity reached by two routes.

use qinvert_core::arith::{rat, rational_to_f64, QLaurent};
use qinvert_core::asymptotics::{l_as_q_series, limit_constant_l, AsymptoticContext};
use qinvert_core::formal::{borel_1_over_q, verify_formal_solution_spec};
use qinvert_core::inversion::{right_inverse_exact, right_inverse_numeric, right_inverse_capped};
use qinvert_core::qbig::analyze;
use qinvert_core::ring::approx_eq;
use qinvert_core::{right_inverse, Inversion, Mode, PhiSpec};

fn half_half() -> PhiSpec {
    PhiSpec::explicit(vec![rat(1, 2), rat(1, 2)]).unwrap()
}

#[test]
fn exact_coefficients_evaluate_to_numeric_ones() {
    for spec in [PhiSpec::catalan(), half_half(), "alt:explicit:1/3,2/3".parse().unwrap()] {
        let exact = right_inverse_exact(&spec, 12).unwrap();
        for q in [0.4, 0.9, 1.3] {
            let num = right_inverse_numeric(&spec, 12, q).unwrap();
            for (n, t) in exact.t.iter().enumerate() {
                let v = t.eval(q).unwrap();
                assert!(approx_eq(v, num.t[n], 1e-12), "{spec} q={q} t_{n}: {v} vs {}", num.t[n]);
            }
        }
    }
}

#[test]
fn capped_solver_is_a_truncation() {
    let full = right_inverse_exact(&half_half(), 10).unwrap();
    let capped = right_inverse_capped(&half_half(), 10, 5).unwrap();
    for (a, b) in full.t.iter().zip(&capped.t) {
        assert_eq!(&a.truncate_above(5), b);
    }
}

#[test]
fn dispatch_matches_direct_calls() {
    let json = match right_inverse(&PhiSpec::catalan(), 4, Mode::Exact).unwrap() {
        Inversion::Exact(r) => r.to_json(),
        Inversion::Numeric(_) => unreachable!(),
    };
    assert_eq!(json["t"][3], serde_json::to_value(QLaurent::from_ints(&[1, 1, 2, 1])).unwrap());
    assert!(matches!(right_inverse(&PhiSpec::catalan(), 4, Mode::Numeric(1.0)), Err(qinvert_core::Error::InvalidQ(_))));
}

#[test]
fn right_inverse_is_a_formal_solution() {
    let g = right_inverse_exact(&half_half(), 9).unwrap().g;
    assert!(verify_formal_solution_spec(&g, &half_half()).unwrap().is_zero());
}

#[test]
fn unroofed_series_has_q_polynomial_coefficients() {
    // B_{1/q;1} g has coefficient q^{C(n,2)} g_n = t_{n-1}.
    let r = right_inverse_exact(&PhiSpec::catalan(), 8).unwrap();
    let b = borel_1_over_q(&r.g);
    for n in 1..=8 {
        assert_eq!(b.coeff(n), &r.t[n - 1]);
    }
}

#[test]
fn limit_series_sums_to_limit_constant() {
    let spec = half_half();
    let series = l_as_q_series(&spec, 60).unwrap();
    let q: f64 = 0.3;
    let summed: f64 = series.iter().enumerate().map(|(j, c)| rational_to_f64(c) * q.powi(j as i32)).sum();
    let ctx = AsymptoticContext::new(&spec, q).unwrap();
    assert!((summed - limit_constant_l(&ctx)).abs() < 1e-12);
}

#[test]
fn q_above_one_agrees_with_direct_solver() {
    let r = analyze(&PhiSpec::catalan(), 2.0, 30, 1e-14).unwrap();
    let direct = right_inverse_numeric(&PhiSpec::catalan(), 30, 2.0).unwrap();
    for n in 1..=30 {
        assert!(approx_eq(r.g[n], direct.g.coeffs()[n], 1e-10), "g_{n}");
    }
}
