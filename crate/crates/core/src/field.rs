//! Autonomous polynomial vector fields and the three model systems.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// A single term `coefficient * x_0^e_0 * ... * x_{d-1}^e_{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    coefficient: f64,
    exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coefficient: f64, exponents: Vec<u32>) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "monomial coefficient must be finite, got {coefficient}"
            )));
        }
        Ok(Self {
            coefficient,
            exponents,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Nested Horner scheme for one polynomial: `coeffs[e]` multiplies `x_var^e`.
#[derive(Debug, Clone, PartialEq)]
enum Horner {
    Const(f64),
    Poly { var: usize, coeffs: Vec<Horner> },
}

impl Horner {
    fn build(terms: &[(f64, &[u32])], var: usize, dimension: usize) -> Self {
        if var == dimension {
            return Horner::Const(terms.iter().map(|t| t.0).sum());
        }
        let top = terms.iter().map(|t| t.1[var]).max().unwrap_or(0);
        if top == 0 {
            return Self::build(terms, var + 1, dimension);
        }
        let coeffs = (0..=top)
            .map(|e| {
                let group: Vec<(f64, &[u32])> =
                    terms.iter().filter(|t| t.1[var] == e).copied().collect();
                Self::build(&group, var + 1, dimension)
            })
            .collect();
        Horner::Poly { var, coeffs }
    }

    fn eval(&self, state: &[f64]) -> f64 {
        match self {
            Horner::Const(c) => *c,
            Horner::Poly { var, coeffs } => {
                let x = state[*var];
                let (last, rest) = coeffs.split_last().expect("at least one coefficient");
                rest.iter()
                    .rev()
                    .fold(last.eval(state), |acc, c| acc * x + c.eval(state))
            }
        }
    }
}

/// One right-hand side as `x^common * R(x)` with `R` in nested Horner form.
#[derive(Debug, Clone, PartialEq)]
struct FactoredPolynomial {
    common: Vec<u32>,
    rest: Horner,
}

impl FactoredPolynomial {
    fn new(terms: &[Monomial], dimension: usize) -> Self {
        let common: Vec<u32> = if terms.is_empty() {
            vec![0; dimension]
        } else {
            (0..dimension)
                .map(|j| terms.iter().map(|m| m.exponents[j]).min().unwrap_or(0))
                .collect()
        };
        let reduced: Vec<Vec<u32>> = terms
            .iter()
            .map(|m| {
                m.exponents
                    .iter()
                    .zip(&common)
                    .map(|(e, g)| e - g)
                    .collect()
            })
            .collect();
        let view: Vec<(f64, &[u32])> = terms
            .iter()
            .zip(&reduced)
            .map(|(m, e)| (m.coefficient, e.as_slice()))
            .collect();
        Self {
            common,
            rest: Horner::build(&view, 0, dimension),
        }
    }

    fn eval(&self, state: &[f64]) -> f64 {
        self.common
            .iter()
            .zip(state)
            .fold(self.rest.eval(state), |acc, (&g, &x)| match g {
                0 => acc,
                1 => x * acc,
                _ => x.powi(g as i32) * acc,
            })
    }
}

/// `dx_i/dt = P_i(x)` with every `P_i` a sum of [`Monomial`]s.
///
/// Evaluation pulls the common monomial factor out of each right-hand side
/// and runs a nested Horner scheme on the remainder, so `x (a - b y)` is
/// computed in that factored form rather than as `a x - b x y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialVectorField {
    dimension: usize,
    equations: Vec<Vec<Monomial>>,
    plans: Vec<FactoredPolynomial>,
}

impl PolynomialVectorField {
    pub fn new(dimension: usize, equations: Vec<Vec<Monomial>>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if equations.len() != dimension {
            return Err(Error::InvalidArgument(format!(
                "expected {dimension} equations, got {}",
                equations.len()
            )));
        }
        for (i, eq) in equations.iter().enumerate() {
            if let Some(m) = eq.iter().find(|m| m.exponents.len() != dimension) {
                return Err(Error::InvalidArgument(format!(
                    "equation {i}: monomial has {} exponents, dimension is {dimension}",
                    m.exponents.len()
                )));
            }
        }
        let plans = equations
            .iter()
            .map(|eq| FactoredPolynomial::new(eq, dimension))
            .collect();
        Ok(Self {
            dimension,
            equations,
            plans,
        })
    }

    /// Builds a field from `(coefficient, exponents)` tuples.
    pub fn from_terms(dimension: usize, terms: &[&[(f64, &[u32])]]) -> Result<Self> {
        let equations = terms
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|&(c, e)| Monomial::new(c, e.to_vec()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dimension, equations)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn equations(&self) -> &[Vec<Monomial>] {
        &self.equations
    }

    pub fn evaluate(&self, state: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dimension];
        self.evaluate_into(state, &mut out)?;
        Ok(out)
    }

    pub fn evaluate_into(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        if state.len() != self.dimension || out.len() != self.dimension {
            return Err(Error::InvalidArgument(format!(
                "state has length {}, field dimension is {}",
                state.len(),
                self.dimension
            )));
        }
        for (o, plan) in out.iter_mut().zip(&self.plans) {
            *o = plan.eval(state);
        }
        Ok(())
    }

    /// The field of the same system run backwards in time.
    pub fn time_reversed(&self) -> Self {
        let equations = self
            .equations
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|m| Monomial {
                        coefficient: -m.coefficient,
                        exponents: m.exponents.clone(),
                    })
                    .collect()
            })
            .collect();
        Self::new(self.dimension, equations).expect("negation keeps the field valid")
    }
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be strictly positive, got {value}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LvParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl LvParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        require_positive("a", a)?;
        require_positive("b", b)?;
        require_positive("c", c)?;
        require_positive("d", d)?;
        Ok(Self { a, b, c, d })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirParams {
    pub beta: f64,
    pub gamma: f64,
}

impl SirParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        require_positive("beta", beta)?;
        require_positive("gamma", gamma)?;
        Ok(Self { beta, gamma })
    }

    /// Susceptible count at which infectives peak.
    pub fn threshold(&self) -> f64 {
        self.gamma / self.beta
    }
}

/// Which system a [`ModelInstance`] represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Riccati,
    LotkaVolterra(LvParams),
    Sir(SirParams),
    /// Any other polynomial field; no model-specific analyses apply.
    Custom,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Riccati => "riccati",
            Model::LotkaVolterra(_) => "lotka_volterra",
            Model::Sir(_) => "sir",
            Model::Custom => "custom",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Model::Riccati | Model::Custom => Vec::new(),
            Model::LotkaVolterra(LvParams { a, b, c, d }) => {
                vec![("a", a), ("b", b), ("c", c), ("d", d)]
            }
            Model::Sir(SirParams { beta, gamma }) => vec![("beta", beta), ("gamma", gamma)],
        }
    }
}

/// A vector field together with its parameters and initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    model: Model,
    field: PolynomialVectorField,
    initial_state: Vec<f64>,
    label: String,
}

impl ModelInstance {
    /// `dY/dt = 2Y - Y^2 + 1`, `Y(0) = y0`.
    pub fn riccati(y0: f64) -> Result<Self> {
        build_riccati(y0)
    }

    pub fn lotka_volterra(params: LvParams, x0: f64, y0: f64) -> Result<Self> {
        let field = build_lotka_volterra(params.a, params.b, params.c, params.d)?;
        let state = vec![x0, y0];
        require_non_negative_state(&state)?;
        Ok(Self {
            model: Model::LotkaVolterra(params),
            field,
            initial_state: state,
            label: format!("lotka_volterra x0={x0} y0={y0}"),
        })
    }

    pub fn sir(params: SirParams, x0: f64, y0: f64, z0: f64) -> Result<Self> {
        let field = build_sir(params.beta, params.gamma)?;
        let state = vec![x0, y0, z0];
        require_non_negative_state(&state)?;
        Ok(Self {
            model: Model::Sir(params),
            field,
            initial_state: state,
            label: format!("sir x0={x0} y0={y0} z0={z0}"),
        })
    }

    pub fn custom(
        field: PolynomialVectorField,
        initial_state: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if initial_state.len() != field.dimension() {
            return Err(Error::InvalidArgument(format!(
                "initial state has length {}, field dimension is {}",
                initial_state.len(),
                field.dimension()
            )));
        }
        if initial_state.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "initial state must be finite".into(),
            ));
        }
        Ok(Self {
            model: Model::Custom,
            field,
            initial_state,
            label: label.into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same model restarted from a different state.
    pub fn with_initial_state(&self, state: Vec<f64>) -> Result<Self> {
        if state.len() != self.field.dimension() || state.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "initial state must be {} finite values",
                self.field.dimension()
            )));
        }
        Ok(Self {
            initial_state: state,
            ..self.clone()
        })
    }

    /// The backwards-in-time system, as a [`Model::Custom`] instance.
    pub fn time_reversed(&self) -> Self {
        Self {
            model: Model::Custom,
            field: self.field.time_reversed(),
            initial_state: self.initial_state.clone(),
            label: format!("{} (time reversed)", self.label),
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn field(&self) -> &PolynomialVectorField {
        &self.field
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.initial_state
    }

    pub fn dimension(&self) -> usize {
        self.field.dimension()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn component_names(&self) -> Vec<String> {
        match self.model {
            Model::Riccati => vec!["Y".into()],
            Model::LotkaVolterra(_) => vec!["x".into(), "y".into()],
            Model::Sir(_) => vec!["x".into(), "y".into(), "z".into()],
            Model::Custom => (0..self.dimension()).map(|i| format!("u{i}")).collect(),
        }
    }
}

fn require_non_negative_state(state: &[f64]) -> Result<()> {
    if state.iter().all(|v| v.is_finite() && *v >= 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "population initial state must be finite and non-negative, got {state:?}"
        )))
    }
}

pub fn build_riccati(y0: f64) -> Result<ModelInstance> {
    if !y0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "y0 must be finite, got {y0}"
        )));
    }
    let field = PolynomialVectorField::from_terms(1, &[&[(1.0, &[0]), (2.0, &[1]), (-1.0, &[2])]])?;
    Ok(ModelInstance {
        model: Model::Riccati,
        field,
        initial_state: vec![y0],
        label: format!("riccati y0={y0}"),
    })
}

/// `dx/dt = ax - bxy`, `dy/dt = -cy + dxy`.
pub fn build_lotka_volterra(a: f64, b: f64, c: f64, d: f64) -> Result<PolynomialVectorField> {
    LvParams::new(a, b, c, d)?;
    PolynomialVectorField::from_terms(
        2,
        &[
            &[(a, &[1, 0]), (-b, &[1, 1])],
            &[(-c, &[0, 1]), (d, &[1, 1])],
        ],
    )
}

/// `dx/dt = -βxy`, `dy/dt = βxy - γy`, `dz/dt = γy`.
pub fn build_sir(beta: f64, gamma: f64) -> Result<PolynomialVectorField> {
    SirParams::new(beta, gamma)?;
    PolynomialVectorField::from_terms(
        3,
        &[
            &[(-beta, &[1, 1, 0])],
            &[(beta, &[1, 1, 0]), (-gamma, &[0, 1, 0])],
            &[(gamma, &[0, 1, 0])],
        ],
    )
}

/// Fixed points of the prey-predator system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LvFixedPoints {
    pub saddle: (f64, f64),
    pub center: (f64, f64),
}

pub fn lv_fixed_points(a: f64, b: f64, c: f64, d: f64) -> Result<LvFixedPoints> {
    LvParams::new(a, b, c, d)?;
    Ok(LvFixedPoints {
        saddle: (0.0, 0.0),
        center: (c / d, a / b),
    })
}

/// Attracting stationary value of the Riccati model, `1 + √2`.
pub const RICCATI_STABLE: f64 = 1.0 + SQRT_2;
/// Repelling stationary value of the Riccati model, `1 - √2`.
pub const RICCATI_UNSTABLE: f64 = 1.0 - SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(a: f64, b: f64, c: f64, d: f64) -> PolynomialVectorField {
        build_lotka_volterra(a, b, c, d).unwrap()
    }

    #[test]
    fn riccati_terms_and_values() {
        let m = build_riccati(0.0).unwrap();
        let terms: Vec<(f64, Vec<u32>)> = m.field().equations()[0]
            .iter()
            .map(|t| (t.coefficient(), t.exponents().to_vec()))
            .collect();
        assert_eq!(terms, vec![(1.0, vec![0]), (2.0, vec![1]), (-1.0, vec![2])]);
        assert_eq!(m.initial_state(), &[0.0]);
        assert_eq!(m.field().evaluate(&[0.0]).unwrap(), vec![1.0]);
        assert!(m.field().evaluate(&[RICCATI_STABLE]).unwrap()[0].abs() < 1e-14);
        assert_eq!(m.field().evaluate(&[5.0]).unwrap(), vec![-14.0]);
    }

    #[test]
    fn riccati_rejects_non_finite() {
        assert!(matches!(
            build_riccati(f64::NAN),
            Err(Error::InvalidArgument(_))
        ));
        assert!(build_riccati(f64::INFINITY).is_err());
    }

    #[test]
    fn lotka_volterra_values() {
        let f = lv(1.0, 1.0, 0.1, 1.0);
        let v = f.evaluate(&[14.0, 18.0]).unwrap();
        assert_eq!(v[0], -238.0);
        assert!((v[1] - 250.2).abs() < 1e-12);
        assert_eq!(
            lv(1.0, 1.0, 1.0, 1.0).evaluate(&[3.0, 2.0]).unwrap(),
            vec![-3.0, 4.0]
        );
        assert_eq!(f.evaluate(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn lotka_volterra_rejects_non_positive() {
        assert!(build_lotka_volterra(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(build_lotka_volterra(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(lv_fixed_points(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn fixed_points_annihilate_field() {
        for &(a, b, c, d) in &[
            (1.0, 1.0, 0.1, 1.0),
            (1.0, 1.0, 1.0, 1.0),
            (0.7, 2.5, 0.3, 1.9),
        ] {
            let fp = lv_fixed_points(a, b, c, d).unwrap();
            let f = lv(a, b, c, d);
            for p in [fp.saddle, fp.center] {
                let v = f.evaluate(&[p.0, p.1]).unwrap();
                assert!(v.iter().all(|x| x.abs() < 1e-12), "{v:?} at {p:?}");
            }
        }
        let case1 = lv_fixed_points(1.0, 1.0, 0.1, 1.0).unwrap();
        assert_eq!(case1.saddle, (0.0, 0.0));
        assert_eq!(case1.center, (0.1, 1.0));
        assert_eq!(
            lv_fixed_points(1.0, 1.0, 1.0, 1.0).unwrap().center,
            (1.0, 1.0)
        );
    }

    #[test]
    fn sir_values() {
        let f = build_sir(0.01, 0.02).unwrap();
        let v = f.evaluate(&[20.0, 15.0, 10.0]).unwrap();
        assert!((v[0] + 3.0).abs() < 1e-12);
        assert!((v[1] - 2.7).abs() < 1e-12);
        assert!((v[2] - 0.3).abs() < 1e-12);
        assert_eq!(f.evaluate(&[12.0, 0.0, 7.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        let g = build_sir(1.0, 1.0).unwrap();
        assert_eq!(
            g.evaluate(&[20.0, 4.0, 10.0]).unwrap(),
            vec![-80.0, 76.0, 4.0]
        );
        assert!(build_sir(0.0, 1.0).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let f = build_sir(1.0, 1.0).unwrap();
        assert!(matches!(
            f.evaluate(&[1.0, 2.0]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(PolynomialVectorField::from_terms(2, &[&[(1.0, &[1])], &[]]).is_err());
        assert!(PolynomialVectorField::new(0, vec![]).is_err());
        assert!(Monomial::new(f64::NAN, vec![1]).is_err());
    }

    #[test]
    fn instance_validation() {
        let p = SirParams::new(0.01, 0.02).unwrap();
        assert!(ModelInstance::sir(p, 20.0, -1.0, 0.0).is_err());
        let q = LvParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(ModelInstance::lotka_volterra(q, 3.0, 2.0).is_ok());
        assert!(ModelInstance::lotka_volterra(q, f64::NAN, 2.0).is_err());
    }

    #[test]
    fn time_reversal_negates() {
        let f = build_sir(0.3, 0.1).unwrap();
        let s = [4.0, 2.0, 1.0];
        let fwd = f.evaluate(&s).unwrap();
        let back = f.time_reversed().evaluate(&s).unwrap();
        for (u, v) in fwd.iter().zip(&back) {
            assert_eq!(*u, -*v);
        }
    }
}
