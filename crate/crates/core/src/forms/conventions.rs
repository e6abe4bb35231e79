use crate::chart::Point;
use crate::error::Result;

use super::classical::ClassicalForm;
use super::combinatorial::CombinatorialForm;
use super::multicovector::Multicovector;

/// Ratio between a combinatorial value and its classical counterpart,
/// collected over a corpus. `zero_agreement` stays true as long as one side
/// vanishes exactly when the other does.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioStats {
    pub ratios: Vec<f64>,
    pub zero_agreement: bool,
    pub counterexamples: usize,
}

impl RatioStats {
    pub fn new() -> Self {
        RatioStats {
            ratios: Vec::new(),
            zero_agreement: true,
            counterexamples: 0,
        }
    }

    pub fn mean(&self) -> f64 {
        if self.ratios.is_empty() {
            return f64::NAN;
        }
        self.ratios.iter().sum::<f64>() / self.ratios.len() as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        if self.ratios.is_empty() {
            return f64::NAN;
        }
        let m = self.mean();
        (self.ratios.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / self.ratios.len() as f64)
            .sqrt()
    }

    /// Records one comparison. A sample counts towards the ratio only when
    /// the classical side is nonzero; the combinatorial side must then be a
    /// multiple of it.
    pub fn record(&mut self, combinatorial: &Multicovector, classical: &Multicovector, tol: f64) {
        let comb_zero = combinatorial.max_abs() <= tol;
        let class_zero = classical.max_abs() <= tol;
        if comb_zero != class_zero {
            self.zero_agreement = false;
            self.counterexamples += 1;
            return;
        }
        if let Some(r) = combinatorial.ratio_to(classical, tol) {
            let residual = combinatorial
                .sub(&classical.scale(r))
                .map(|d| d.max_abs())
                .unwrap_or(f64::INFINITY);
            if residual > tol * (1.0 + classical.max_abs()) {
                self.counterexamples += 1;
            }
            self.ratios.push(r);
        }
    }
}

impl Default for RatioStats {
    fn default() -> Self {
        Self::new()
    }
}

/// Measured comparison constants for `d` and `∧`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionConstants {
    /// `κ_p` indexed by `p`.
    pub kappa: Vec<(usize, RatioStats)>,
    /// `μ_{k,l}` indexed by `(k, l)`.
    pub mu: Vec<((usize, usize), RatioStats)>,
}

/// Compares `extract(d_comb(θ))` with `d_classical(ω̄)` at one point.
pub fn compare_d(
    form: &ClassicalForm,
    at: &Point,
    tol: f64,
) -> Result<(Multicovector, Multicovector)> {
    let comb = CombinatorialForm::from_classical(form)
        .d()
        .extract_classical(at, tol)?;
    let class = form.exterior_derivative().at(at)?;
    Ok((comb, class))
}

/// Compares `extract(θ_a ∧ θ_b)` with the classical wedge at one point.
pub fn compare_wedge(
    a: &ClassicalForm,
    b: &ClassicalForm,
    at: &Point,
    tol: f64,
) -> Result<(Multicovector, Multicovector)> {
    let comb = CombinatorialForm::from_classical(a)
        .wedge(&CombinatorialForm::from_classical(b))?
        .extract_classical(at, tol)?;
    let class = a.wedge(b)?.at(at)?;
    Ok((comb, class))
}

/// Accumulates `κ_p` over `(form, point)` samples.
pub fn measure_kappa<'a>(
    samples: impl IntoIterator<Item = (&'a ClassicalForm, &'a Point)>,
    tol: f64,
) -> Result<RatioStats> {
    let mut stats = RatioStats::new();
    for (form, at) in samples {
        let (comb, class) = compare_d(form, at, tol)?;
        stats.record(&comb, &class, tol);
    }
    Ok(stats)
}

/// Accumulates `μ_{k,l}` over `(a, b, point)` samples.
pub fn measure_mu<'a>(
    samples: impl IntoIterator<Item = (&'a ClassicalForm, &'a ClassicalForm, &'a Point)>,
    tol: f64,
) -> Result<RatioStats> {
    let mut stats = RatioStats::new();
    for (a, b, at) in samples {
        let (comb, class) = compare_wedge(a, b, at, tol)?;
        stats.record(&comb, &class, tol);
    }
    Ok(stats)
}
