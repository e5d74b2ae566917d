use proptest::prelude::*;

use taylorlab_core::field::{build_sir, Monomial, PolynomialVectorField};
use taylorlab_core::series::generate_taylor_solution;
use taylorlab_core::{ModelInstance, TruncatedSeries};

fn monomial(dim: usize) -> impl Strategy<Value = (f64, Vec<u32>)> {
    (-3.0f64..3.0, prop::collection::vec(0u32..3, dim))
}

fn field_with_state() -> impl Strategy<Value = (PolynomialVectorField, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|dim| {
        let eqs = prop::collection::vec(prop::collection::vec(monomial(dim), 0..5), dim);
        let state = prop::collection::vec(-2.0f64..2.0, dim);
        (eqs, state).prop_map(move |(eqs, state)| {
            let equations = eqs
                .into_iter()
                .map(|eq| {
                    eq.into_iter()
                        .map(|(c, e)| Monomial::new(c, e).unwrap())
                        .collect()
                })
                .collect();
            (PolynomialVectorField::new(dim, equations).unwrap(), state)
        })
    })
}

/// Term-by-term evaluation with explicit loops: (value, sum of |terms|).
fn naive_eval(field: &PolynomialVectorField, state: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for eq in field.equations() {
        let mut sum = 0.0;
        let mut mag = 0.0;
        for m in eq {
            let mut term = m.coefficient();
            for (j, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    term *= state[j];
                }
            }
            sum += term;
            mag += term.abs();
        }
        out.push((sum, mag));
    }
    out
}

/// `[t^k] P_i(series)` through plain truncated-series arithmetic.
fn field_of_series(
    field: &PolynomialVectorField,
    series: &[TruncatedSeries],
) -> Vec<TruncatedSeries> {
    let order = series[0].order();
    field
        .equations()
        .iter()
        .map(|eq| {
            let mut acc = TruncatedSeries::constant(0.0, order).unwrap();
            for m in eq {
                let mut term = TruncatedSeries::constant(m.coefficient(), order).unwrap();
                for (j, &e) in m.exponents().iter().enumerate() {
                    for _ in 0..e {
                        term = term.try_mul(&series[j]).unwrap();
                    }
                }
                acc = acc.try_add(&term).unwrap();
            }
            acc
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evaluate_matches_naive((field, state) in field_with_state()) {
        let fast = field.evaluate(&state).unwrap();
        for (v, (naive, mag)) in fast.iter().zip(naive_eval(&field, &state)) {
            prop_assert!((v - naive).abs() <= 1e-14 * mag.max(1e-300) + 1e-300,
                "{} vs {} (scale {})", v, naive, mag);
        }
    }

    #[test]
    fn series_satisfies_ode((field, state) in field_with_state(), order in 2usize..9) {
        let model = ModelInstance::custom(field.clone(), state, "random").unwrap();
        let Ok(sol) = generate_taylor_solution(&model, order) else { return Ok(()); };
        let rhs = field_of_series(&field, sol.components());
        for (s, p) in sol.components().iter().zip(&rhs) {
            let ds = s.derivative();
            for k in 0..order {
                let (a, b) = (ds.coefficient(k), p.coefficient(k));
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0),
                    "k={}: {} vs {}", k, a, b);
            }
        }
    }

    #[test]
    fn sir_rates_sum_to_zero(x in 0.0f64..100.0, y in 0.0f64..100.0, z in 0.0f64..100.0) {
        let field = build_sir(0.01, 0.02).unwrap();
        let v = field.evaluate(&[x, y, z]).unwrap();
        prop_assert!((v[0] + v[1] + v[2]).abs() < 1e-12);
    }

    #[test]
    fn cauchy_product_commutes(a in prop::collection::vec(-5.0f64..5.0, 1..12),
                               b in prop::collection::vec(-5.0f64..5.0, 1..12)) {
        let n = a.len().min(b.len());
        let sa = TruncatedSeries::new(a[..n].to_vec()).unwrap();
        let sb = TruncatedSeries::new(b[..n].to_vec()).unwrap();
        let ab = sa.try_mul(&sb).unwrap();
        let ba = sb.try_mul(&sa).unwrap();
        for k in 0..n {
            prop_assert!((ab.coefficient(k) - ba.coefficient(k)).abs() < 1e-12);
        }
        // near t = 0 the truncated product matches the product of values
        let t = 1e-4;
        let full = sa.eval(t) * sb.eval(t);
        prop_assert!((ab.eval(t) - full).abs() < 1e-6 * (1.0 + full.abs()));
    }
}
