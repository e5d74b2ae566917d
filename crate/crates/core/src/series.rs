//! Truncated power series in `t` and the Taylor coefficient recursion.
//!
//! Substituting `x_i(t) = Σ c_{i,k} t^k` into `dx_i/dt = P_i(x)` and matching
//! powers of `t` gives `(k + 1) c_{i,k+1} = [t^k] P_i(x(t))`. The right-hand
//! side only involves coefficients up to `k`, so the coefficients follow one
//! order at a time. Every monomial keeps a chain of partial Cauchy products
//! that grows by one coefficient per order, which makes the whole recursion
//! `O(N^2)` in the series order.

use crate::error::{Error, Result};
use crate::field::ModelInstance;

/// Order used when none is requested; matches the fifth-degree expansions
/// the perturbative methods report.
pub const DEFAULT_SERIES_ORDER: usize = 5;

/// Coefficients `c_0 ..= c_N` of `Σ c_k t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coefficients: Vec<f64>,
}

impl TruncatedSeries {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "series needs at least one coefficient".into(),
            ));
        }
        if let Some(k) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("coefficient {k} is not finite")));
        }
        Ok(Self { coefficients })
    }

    /// `value + 0 t + ... + 0 t^order`.
    pub fn constant(value: f64, order: usize) -> Result<Self> {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Self::new(c)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "series orders differ: {} vs {}",
                self.order(),
                other.order()
            )))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Self::new(
            self.coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Cauchy product truncated at the common order.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.coefficients.len();
        let c = (0..n)
            .map(|k| cauchy_term(&self.coefficients, &other.coefficients, k))
            .collect();
        Self::new(c)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(self.coefficients.iter().map(|c| c * factor).collect())
    }

    /// Term-by-term derivative; the result has order `N - 1` (order 0 for a constant).
    pub fn derivative(&self) -> Self {
        if self.coefficients.len() == 1 {
            return Self {
                coefficients: vec![0.0],
            };
        }
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        Self { coefficients }
    }

    /// Same series truncated to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        let n = (order + 1).min(self.coefficients.len());
        Self {
            coefficients: self.coefficients[..n].to_vec(),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c)
    }
}

pub fn series_add(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.try_add(b)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.try_mul(b)
}

pub fn eval_series(s: &TruncatedSeries, t: f64) -> f64 {
    s.eval(t)
}

#[inline]
fn cauchy_term(a: &[f64], b: &[f64], k: usize) -> f64 {
    (0..=k).map(|i| a[i] * b[k - i]).sum()
}

/// Per-component Taylor series of one model's solution about `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    components: Vec<TruncatedSeries>,
    model: ModelInstance,
}

impl SeriesSolution {
    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TruncatedSeries {
        &self.components[i]
    }

    pub fn model(&self) -> &ModelInstance {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.components.iter().map(|s| s.eval(t)).collect()
    }
}

/// One monomial's running product `coef * f_0 * f_1 * ...`, stored as the
/// coefficient sequences of each partial product.
struct ProductChain {
    coefficient: f64,
    factors: Vec<usize>,
    partials: Vec<Vec<f64>>,
}

impl ProductChain {
    fn new(coefficient: f64, exponents: &[u32], capacity: usize) -> Self {
        let factors: Vec<usize> = exponents
            .iter()
            .enumerate()
            .flat_map(|(j, &e)| std::iter::repeat_n(j, e as usize))
            .collect();
        let partials = factors
            .iter()
            .map(|_| Vec::with_capacity(capacity))
            .collect();
        Self {
            coefficient,
            factors,
            partials,
        }
    }

    /// Appends coefficient `k` to every partial product and returns the
    /// `t^k` coefficient of the full monomial.
    fn advance(&mut self, coeffs: &[Vec<f64>], k: usize) -> f64 {
        if self.factors.is_empty() {
            return if k == 0 { self.coefficient } else { 0.0 };
        }
        let first = coeffs[self.factors[0]][k];
        self.partials[0].push(first);
        for r in 1..self.factors.len() {
            let (done, rest) = self.partials.split_at_mut(r);
            let value = cauchy_term(&done[r - 1], &coeffs[self.factors[r]], k);
            rest[0].push(value);
        }
        self.coefficient * self.partials[self.factors.len() - 1][k]
    }
}

/// Order-`order` Taylor expansion of the model's solution about `t = 0`.
pub fn generate_taylor_solution(model: &ModelInstance, order: usize) -> Result<SeriesSolution> {
    if order < 1 {
        return Err(Error::InvalidArgument(
            "series order must be at least 1".into(),
        ));
    }
    let field = model.field();
    let dim = field.dimension();
    let mut coeffs: Vec<Vec<f64>> = model
        .initial_state()
        .iter()
        .map(|&x0| {
            let mut c = Vec::with_capacity(order + 1);
            c.push(x0);
            c
        })
        .collect();
    let mut chains: Vec<Vec<ProductChain>> = field
        .equations()
        .iter()
        .map(|eq| {
            eq.iter()
                .map(|m| ProductChain::new(m.coefficient(), m.exponents(), order + 1))
                .collect()
        })
        .collect();

    // The first-order coefficient is the field at the initial state; take it
    // from the field's own evaluation so it matches bit for bit.
    let slope = field.evaluate(model.initial_state())?;
    for k in 0..order {
        let mut next: Vec<f64> = chains
            .iter_mut()
            .map(|eq| {
                let rhs: f64 = eq.iter_mut().map(|ch| ch.advance(&coeffs, k)).sum();
                rhs / (k + 1) as f64
            })
            .collect();
        if k == 0 {
            next.clone_from(&slope);
        }
        for (i, v) in next.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "component {i}: coefficient {} overflowed",
                    k + 1
                )));
            }
            coeffs[i].push(v);
        }
    }
    debug_assert!(coeffs.iter().all(|c| c.len() == order + 1) && coeffs.len() == dim);

    let components = coeffs
        .into_iter()
        .map(TruncatedSeries::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesSolution {
        components,
        model: model.clone(),
    })
}
