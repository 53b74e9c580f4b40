//! Floating-point modules checked against the exact-rational algebra.

use jacobi_core::exactalg::{jacobi_coefficients, Rational};
use jacobi_core::polycore::{eval_jacobi, squared_norm};
use jacobi_core::quadrature::{default_node_count, fourier_coefficients, gauss_jacobi, TensorGrid};
use jacobi_core::spectral::synthesize;
use jacobi_core::{Basis, Expansion, ParamPair, ParamVector};
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PARAMS: [(i64, i64, i64, i64); 6] = [
    (0, 1, 0, 1),
    (-1, 2, -1, 2),
    (1, 2, 3, 2),
    (-3, 4, 2, 1),
    (5, 1, -9, 10),
    (7, 3, 1, 5),
];

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn horner(c: &[Rational], x: &Rational) -> Rational {
    c.iter()
        .rev()
        .fold(Rational::zero(), |acc, ci| &(&acc * x) + ci)
}

#[test]
fn recurrence_matches_rodrigues_on_41_interior_points() {
    for &(an, ad, bn, bd) in &PARAMS {
        let (a, b) = (q(an, ad), q(bn, bd));
        let pair = ParamPair::new(a.to_f64().unwrap(), b.to_f64().unwrap()).unwrap();
        for k in 0..=20 {
            let c = jacobi_coefficients(&a, &b, k);
            let exact: Vec<f64> = (0..=40)
                .map(|j| horner(&c, &q(j - 20, 21)).to_f64().unwrap())
                .collect();
            let scale = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (j, want) in exact.iter().enumerate() {
                let x = (j as f64 - 20.0) / 21.0;
                let got = eval_jacobi(pair, k, x).unwrap();
                assert!(
                    (got - want).abs() <= 1e-12 * scale,
                    "α={a} β={b} k={k} x={x}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn gauss_jacobi_reproduces_norms() {
    for &(an, ad, bn, bd) in &PARAMS {
        let pair = ParamPair::new(an as f64 / ad as f64, bn as f64 / bd as f64).unwrap();
        let rule = gauss_jacobi(pair, 24).unwrap();
        for k in 0..=20 {
            let got = rule.integrate(|x| eval_jacobi(pair, k, x).unwrap().powi(2));
            let want = squared_norm(pair, k);
            assert!((got - want).abs() <= 1e-12 * want, "k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn analysis_inverts_synthesis() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (d, cap) in [(1, 12), (2, 6), (3, 3)] {
        let params = ParamVector::new(&vec![-0.5; d], &vec![1.25; d]).unwrap();
        let f = Expansion::random(params.clone(), Basis::Standard, cap, &mut rng).unwrap();
        let grid = TensorGrid::gauss(&params, default_node_count(cap)).unwrap();
        let g = fourier_coefficients(|x| synthesize(&f, x).unwrap(), &params, cap, &grid).unwrap();
        let err = g.max_coefficient_difference(&f).unwrap();
        assert!(err < 1e-12, "d={d}: {err}");
    }
}
