//! The operator kernel φ and its derived N-function machinery.
//!
//! A [`PhiSpec`] packages a kernel `φ:(0,∞)→(0,∞)` together with
//!
//! - the N-function `Φ(t) = ∫₀ᵗ φ(s)·s ds` and its inverse `Φ⁻¹`,
//! - `h(t) = φ(t)·t` (extended by `h(0) = 0`) and its inverse `h⁻¹`,
//! - the growth indices `(l, m)` bounding `φ(t)t²/Φ(t)` and `(l₁, m₁)`
//!   bounding `Φ″(t)t/Φ′(t)`,
//! - the sandwich functions `ξ₁..ξ₄` / `η₁..η₄` built from those indices.
//!
//! Built-in families cover the classical Laplacian, the p-Laplacian, the
//! (p&q)-Laplacian, two nonlinear-elasticity kernels and a plasticity kernel
//! with logarithmic growth; arbitrary kernels come in as callables or as
//! tabulated samples interpolated by a monotone spline.
//!
//! Closed forms are attached wherever the family admits them; everything else
//! goes through adaptive quadrature and bracketed inversion. Indices are
//! hardcoded only where exact (power-type kernels); otherwise they are
//! estimated as grid inf/sup with a declared safety margin, since the global
//! bounds are not otherwise computable.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bracket;
use crate::error::{Error, Result};
use crate::interp::LogLogInterp;
use crate::quad::{self, QuadOpts};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Safety factor applied to sampled index estimates: the infimum is shrunk
/// and the supremum grown by this fraction.
pub const DEFAULT_INDEX_SAFETY: f64 = 0.01;

/// Kernel family tag.
#[derive(Clone, Debug, PartialEq)]
pub enum PhiFamily {
    /// `φ(t) = 2`: the classical Laplacian (note `Δ_φ = Δ` only up to the
    /// constant factor 2, which this crate does not drop).
    ConstantTwo,
    /// `φ(t) = p·t^{p-2}`, `p > 1`: the p-Laplacian.
    Power { p: f64 },
    /// `φ(t) = p·t^{p-2} + q·t^{q-2}`, `1 < p < q`: the (p&q)-Laplacian.
    PQ { p: f64, q: f64 },
    /// `φ(t) = 2γ(1+t²)^{γ-1}`, `γ > 1`: nonlinear elasticity.
    Elasticity { gamma: f64 },
    /// `φ(t) = γ(√(1+t²)-1)^{γ-1}/√(1+t²)`, `γ > 1`: nonlinear elasticity.
    ElasticitySqrt { gamma: f64 },
    /// `φ(t) = (p·t^{p-2}(1+t)ln(1+t) + t^{p-1})/(1+t)`, `p > 1`: plasticity
    /// with logarithmic hardening. (The source model additionally ties `p` to
    /// the dimension via `(-1+√(1+4N))/2 > 1`; that constraint is recorded
    /// here but not enforced.)
    PlasticityLog { p: f64 },
    /// User-supplied kernel (callable or tabulated samples).
    Custom { label: String },
}

impl fmt::Display for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFamily::ConstantTwo => write!(f, "constant-two"),
            PhiFamily::Power { p } => write!(f, "power(p={p})"),
            PhiFamily::PQ { p, q } => write!(f, "p-and-q(p={p},q={q})"),
            PhiFamily::Elasticity { gamma } => write!(f, "elasticity(gamma={gamma})"),
            PhiFamily::ElasticitySqrt { gamma } => write!(f, "elasticity-sqrt(gamma={gamma})"),
            PhiFamily::PlasticityLog { p } => write!(f, "plasticity-log(p={p})"),
            PhiFamily::Custom { label } => write!(f, "custom({label})"),
        }
    }
}

/// Growth index quadruple: `l ≤ φ(t)t²/Φ(t) ≤ m` and `l₁ ≤ Φ″(t)t/Φ′(t) ≤ m₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Indices {
    pub l: f64,
    pub m: f64,
    pub l1: f64,
    pub m1: f64,
    /// True when the quadruple is a closed form, false when grid-estimated.
    pub exact: bool,
}

/// Tag selecting one of the eight sandwich functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SandwichFn {
    /// `min{t^l, t^m}`
    Xi1,
    /// `max{t^l, t^m}`
    Xi2,
    /// `min{t^{l₁}, t^{m₁}}`
    Xi3,
    /// `max{t^{l₁}, t^{m₁}}`
    Xi4,
    /// `min{t^{1/l}, t^{1/m}}`
    Eta1,
    /// `max{t^{1/l}, t^{1/m}}`
    Eta2,
    /// `min{t^{1/l₁}, t^{1/m₁}}`
    Eta3,
    /// `max{t^{1/l₁}, t^{1/m₁}}`
    Eta4,
}

/// Immutable descriptor of a φ-Laplacian kernel.
#[derive(Clone)]
pub struct PhiSpec {
    family: PhiFamily,
    phi: ScalarFn,
    indices: Indices,
    phi_big_closed: Option<ScalarFn>,
    phi_big_inv_closed: Option<ScalarFn>,
    h_inv_closed: Option<ScalarFn>,
}

impl fmt::Debug for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiSpec")
            .field("family", &self.family)
            .field("indices", &self.indices)
            .finish()
    }
}

impl PhiSpec {
    /// `φ(t) = 2`, the classical Laplacian kernel.
    pub fn constant_two() -> Self {
        Self::constant(2.0).expect("2 > 0")
    }

    /// `φ(t) = c` for a constant `c > 0`; `Φ(t) = c·t²/2`, `h(t) = c·t`.
    /// `c = 1` gives `h = id`, handy for classical ODE fixtures.
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "constant kernel needs c > 0, got {c}"
            )));
        }
        let family = if c == 2.0 {
            PhiFamily::ConstantTwo
        } else {
            PhiFamily::Custom {
                label: format!("constant({c})"),
            }
        };
        Ok(PhiSpec {
            family,
            phi: Arc::new(move |_| c),
            indices: Indices {
                l: 2.0,
                m: 2.0,
                l1: 1.0,
                m1: 1.0,
                exact: true,
            },
            phi_big_closed: Some(Arc::new(move |t| 0.5 * c * t * t)),
            phi_big_inv_closed: Some(Arc::new(move |y: f64| (2.0 * y / c).sqrt())),
            h_inv_closed: Some(Arc::new(move |s| s / c)),
        })
    }

    /// `φ(t) = p·t^{p-2}`: `Φ(t) = t^p`, `h(t) = p·t^{p-1}`, all closed form.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidSpec(format!("power kernel needs p > 1, got {p}")));
        }
        Ok(PhiSpec {
            family: PhiFamily::Power { p },
            phi: Arc::new(move |t: f64| p * t.powf(p - 2.0)),
            indices: Indices {
                l: p,
                m: p,
                l1: p - 1.0,
                m1: p - 1.0,
                exact: true,
            },
            phi_big_closed: Some(Arc::new(move |t: f64| t.powf(p))),
            phi_big_inv_closed: Some(Arc::new(move |y: f64| y.powf(1.0 / p))),
            h_inv_closed: Some(Arc::new(move |s: f64| (s / p).powf(1.0 / (p - 1.0)))),
        })
    }

    /// `φ(t) = p·t^{p-2} + q·t^{q-2}` with `1 < p < q`: `Φ(t) = t^p + t^q`.
    pub fn p_and_q(p: f64, q: f64) -> Result<Self> {
        if !(p > 1.0 && q > p && q.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "p-and-q kernel needs 1 < p < q, got p={p}, q={q}"
            )));
        }
        let phi: ScalarFn = Arc::new(move |t: f64| p * t.powf(p - 2.0) + q * t.powf(q - 2.0));
        let closed: ScalarFn = Arc::new(move |t: f64| t.powf(p) + t.powf(q));
        Self::with_estimated_indices(PhiFamily::PQ { p, q }, phi, Some(closed), None, None)
    }

    /// `φ(t) = 2γ(1+t²)^{γ-1}` with `γ > 1`: `Φ(t) = (1+t²)^γ - 1`.
    pub fn elasticity(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "elasticity kernel needs gamma > 1, got {gamma}"
            )));
        }
        let phi: ScalarFn =
            Arc::new(move |t: f64| 2.0 * gamma * (1.0 + t * t).powf(gamma - 1.0));
        // (1+t²)^γ - 1 via expm1 to avoid cancellation at small t.
        let closed: ScalarFn = Arc::new(move |t: f64| (gamma * (t * t).ln_1p()).exp_m1());
        let inv: ScalarFn =
            Arc::new(move |y: f64| (y.ln_1p() / gamma).exp_m1().max(0.0).sqrt());
        Self::with_estimated_indices(
            PhiFamily::Elasticity { gamma },
            phi,
            Some(closed),
            Some(inv),
            None,
        )
    }

    /// `φ(t) = γ(√(1+t²)-1)^{γ-1}/√(1+t²)` with `γ > 1`:
    /// `Φ(t) = (√(1+t²)-1)^γ`.
    pub fn elasticity_sqrt(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            // At gamma = 1 the ratio φt²/Φ has infimum exactly 1, so the
            // l > 1 growth hypothesis fails; reject up front.
            return Err(Error::InvalidSpec(format!(
                "elasticity-sqrt kernel needs gamma > 1, got {gamma}"
            )));
        }
        // √(1+t²) - 1 computed as t²/(√(1+t²)+1) to avoid cancellation.
        let root_m1 = |t: f64| t * t / ((1.0 + t * t).sqrt() + 1.0);
        let phi: ScalarFn = Arc::new(move |t: f64| {
            gamma * root_m1(t).powf(gamma - 1.0) / (1.0 + t * t).sqrt()
        });
        let closed: ScalarFn = Arc::new(move |t: f64| root_m1(t).powf(gamma));
        let inv: ScalarFn = Arc::new(move |y: f64| {
            let w = y.powf(1.0 / gamma);
            (w * (w + 2.0)).sqrt()
        });
        Self::with_estimated_indices(
            PhiFamily::ElasticitySqrt { gamma },
            phi,
            Some(closed),
            Some(inv),
            None,
        )
    }

    /// `φ(t) = (p·t^{p-2}(1+t)ln(1+t) + t^{p-1})/(1+t)` with `p > 1`:
    /// `Φ(t) = t^p·ln(1+t)`.
    pub fn plasticity_log(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "plasticity-log kernel needs p > 1, got {p}"
            )));
        }
        let phi: ScalarFn =
            Arc::new(move |t: f64| p * t.powf(p - 2.0) * t.ln_1p() + t.powf(p - 1.0) / (1.0 + t));
        let closed: ScalarFn = Arc::new(move |t: f64| t.powf(p) * t.ln_1p());
        Self::with_estimated_indices(
            PhiFamily::PlasticityLog { p },
            phi,
            Some(closed),
            None,
            None,
        )
    }

    /// Arbitrary positive kernel supplied as a callable.
    pub fn custom(label: impl Into<String>, phi: ScalarFn) -> Result<Self> {
        Self::with_estimated_indices(
            PhiFamily::Custom {
                label: label.into(),
            },
            phi,
            None,
            None,
            None,
        )
    }

    /// Kernel tabulated as `(t, φ(t))` pairs on strictly increasing `t > 0`,
    /// interpolated by a monotone spline in log-log coordinates (power-law
    /// extension outside the table span).
    pub fn from_table(label: impl Into<String>, ts: &[f64], phis: &[f64]) -> Result<Self> {
        let interp = LogLogInterp::new(ts, phis)?;
        let phi: ScalarFn = Arc::new(move |t: f64| interp.eval(t));
        Self::with_estimated_indices(
            PhiFamily::Custom {
                label: label.into(),
            },
            phi,
            None,
            None,
            None,
        )
    }

    fn with_estimated_indices(
        family: PhiFamily,
        phi: ScalarFn,
        phi_big_closed: Option<ScalarFn>,
        phi_big_inv_closed: Option<ScalarFn>,
        h_inv_closed: Option<ScalarFn>,
    ) -> Result<Self> {
        let mut spec = PhiSpec {
            family,
            phi,
            indices: Indices {
                l: f64::NAN,
                m: f64::NAN,
                l1: f64::NAN,
                m1: f64::NAN,
                exact: false,
            },
            phi_big_closed,
            phi_big_inv_closed,
            h_inv_closed,
        };
        spec.validate_samples()?;
        spec.indices = estimate_indices(&spec, &default_index_grid(), DEFAULT_INDEX_SAFETY)?;
        if !(spec.indices.l > 1.0) {
            return Err(Error::InvalidSpec(format!(
                "kernel {} fails the growth hypothesis: estimated l = {} is not > 1",
                spec.family, spec.indices.l
            )));
        }
        if !(spec.indices.l1 > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "kernel {} fails the curvature hypothesis: estimated l1 = {} is not > 0",
                spec.family, spec.indices.l1
            )));
        }
        Ok(spec)
    }

    /// Sampled positivity of φ and strict monotonicity of `h(t) = φ(t)·t`.
    fn validate_samples(&self) -> Result<()> {
        let grid = log_grid(1e-6, 1e6, 97);
        let mut prev_h = 0.0;
        for &t in &grid {
            let p = (self.phi)(t);
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "kernel {} is not positive at t = {t:e} (phi = {p})",
                    self.family
                )));
            }
            let h = p * t;
            if h <= prev_h {
                return Err(Error::InvalidSpec(format!(
                    "kernel {}: h(t) = phi(t)·t is not strictly increasing near t = {t:e}",
                    self.family
                )));
            }
            prev_h = h;
        }
        Ok(())
    }

    pub fn family(&self) -> &PhiFamily {
        &self.family
    }

    pub fn indices(&self) -> Indices {
        self.indices
    }

    /// Replaces the stored indices (e.g. with a re-estimate on a custom grid).
    pub fn with_indices(mut self, indices: Indices) -> Self {
        self.indices = indices;
        self
    }

    /// Drops all closed forms so `Φ`, `Φ⁻¹` and `h⁻¹` go through quadrature
    /// and bracketing. Used to cross-check the numeric path against closed
    /// forms.
    pub fn without_closed_forms(mut self) -> Self {
        self.phi_big_closed = None;
        self.phi_big_inv_closed = None;
        self.h_inv_closed = None;
        self
    }

    /// The kernel `φ(t)` itself, `t > 0`.
    pub fn phi(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    /// `Φ(t) = ∫₀ᵗ φ(s)·s ds` for `t ≥ 0`.
    pub fn big_phi(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain(format!("Phi needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if let Some(closed) = &self.phi_big_closed {
            return Ok(closed(t));
        }
        let phi = self.phi.clone();
        quad::integrate(move |s| phi(s) * s, 0.0, t, QuadOpts::default()).map(|r| r.value)
    }

    /// Functional inverse of `Φ`, by bracketing when no closed form exists.
    pub fn big_phi_inv(&self, y: f64) -> Result<f64> {
        if y < 0.0 || !y.is_finite() {
            return Err(Error::domain(format!("Phi inverse needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if let Some(closed) = &self.phi_big_inv_closed {
            return Ok(closed(y));
        }
        bracket::invert_increasing(
            |t| self.big_phi(t).unwrap_or(f64::INFINITY),
            y,
            "Phi inverse",
        )
    }

    /// `h(t) = φ(t)·t`, extended continuously by `h(0) = 0`.
    pub fn h(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain(format!("h needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok((self.phi)(t) * t)
    }

    /// Functional inverse of `h`, with `h⁻¹(0) = 0`.
    pub fn h_inv(&self, s: f64) -> Result<f64> {
        if s < 0.0 || !s.is_finite() {
            return Err(Error::domain(format!("h inverse needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        if let Some(closed) = &self.h_inv_closed {
            return Ok(closed(s));
        }
        let phi = self.phi.clone();
        bracket::invert_increasing(move |t| if t == 0.0 { 0.0 } else { phi(t) * t }, s, "h inverse")
    }

    /// Sandwich function value at `t ≥ 0`.
    pub fn xi_eta(&self, which: SandwichFn, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain(format!("sandwich functions need t >= 0, got {t}")));
        }
        let Indices { l, m, l1, m1, .. } = self.indices;
        let (a, b, take_min) = match which {
            SandwichFn::Xi1 => (l, m, true),
            SandwichFn::Xi2 => (l, m, false),
            SandwichFn::Xi3 => (l1, m1, true),
            SandwichFn::Xi4 => (l1, m1, false),
            SandwichFn::Eta1 => (1.0 / l, 1.0 / m, true),
            SandwichFn::Eta2 => (1.0 / l, 1.0 / m, false),
            SandwichFn::Eta3 => (1.0 / l1, 1.0 / m1, true),
            SandwichFn::Eta4 => (1.0 / l1, 1.0 / m1, false),
        };
        let (pa, pb) = (t.powf(a), t.powf(b));
        Ok(if take_min { pa.min(pb) } else { pa.max(pb) })
    }

    /// Degree `p` when `Φ` is exactly homogeneous (`Φ(t) = c·t^p`), i.e. the
    /// indices are closed-form with `l = m`. Enables analytic classifier
    /// routes for power-type kernels.
    pub fn exact_homogeneous_degree(&self) -> Option<f64> {
        let i = self.indices;
        (i.exact && i.l == i.m).then_some(i.l)
    }

    pub fn describe(&self) -> String {
        self.family.to_string()
    }
}

/// Default index-estimation grid: log-spaced over `[1e-6, 1e6]`.
pub fn default_index_grid() -> Vec<f64> {
    log_grid(1e-6, 1e6, 481)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (ll, lh) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (ll + (lh - ll) * i as f64 / (n - 1) as f64).exp())
        .collect();
    // Pin the endpoints exactly (exp/ln round-trip drifts by an ulp).
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Estimates the index quadruple as grid inf/sup of the two growth ratios,
/// with the infimum shrunk and the supremum grown by `safety`.
///
/// Families with exact closed-form indices (power-type kernels) return those
/// directly. `Φ″` in the second ratio is a central difference of
/// `Φ′(t) = φ(t)·t` with step `t·1e-5`.
pub fn estimate_indices(spec: &PhiSpec, grid: &[f64], safety: f64) -> Result<Indices> {
    if spec.indices.exact {
        return Ok(spec.indices);
    }
    if grid.len() < 200 {
        return Err(Error::domain(format!(
            "index estimation needs >= 200 grid points, got {}",
            grid.len()
        )));
    }
    let (lo, hi) = (grid[0], *grid.last().unwrap());
    if lo > 1e-6 || hi < 1e6 {
        return Err(Error::domain(format!(
            "index estimation grid must span [1e-6, 1e6], got [{lo:e}, {hi:e}]"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("index grid must be increasing".to_string()));
    }

    // Phi on the grid: closed form, or one cumulative quadrature sweep.
    let mut big_phi = Vec::with_capacity(grid.len());
    if let Some(closed) = &spec.phi_big_closed {
        big_phi.extend(grid.iter().map(|&t| closed(t)));
    } else {
        let phi = &spec.phi;
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &t in grid {
            acc += quad::integrate(|s| phi(s) * s, prev, t, QuadOpts::default())?.value;
            big_phi.push(acc);
            prev = t;
        }
    }

    let mut l = f64::INFINITY;
    let mut m = f64::NEG_INFINITY;
    let mut l1 = f64::INFINITY;
    let mut m1 = f64::NEG_INFINITY;
    for (&t, &ph) in grid.iter().zip(big_phi.iter()) {
        if !(ph > 0.0) {
            return Err(Error::numeric(
                "index estimation",
                format!("Phi({t:e}) = {ph:e} is not positive"),
                ph,
            ));
        }
        let ratio_growth = spec.phi(t) * t * t / ph;
        l = l.min(ratio_growth);
        m = m.max(ratio_growth);

        let dt = t * 1e-5;
        let h_plus = spec.phi(t + dt) * (t + dt);
        let h_minus = spec.phi(t - dt) * (t - dt);
        let second = (h_plus - h_minus) / (2.0 * dt);
        let ratio_curv = second * t / (spec.phi(t) * t);
        l1 = l1.min(ratio_curv);
        m1 = m1.max(ratio_curv);
    }

    Ok(Indices {
        l: l * (1.0 - safety),
        m: m * (1.0 + safety),
        l1: l1 * (1.0 - safety),
        m1: m1 * (1.0 + safety),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_phi_closed_form() {
        // Phi(t) = t^p; at p = 2, Phi(3) = 9
        let spec = PhiSpec::power(2.0).unwrap();
        assert_eq!(spec.big_phi(3.0).unwrap(), 9.0);
        assert_eq!(spec.big_phi(0.0).unwrap(), 0.0);
    }

    #[test]
    fn pq_quadrature_matches_analytic() {
        // Forced quadrature of ∫₀¹ (2s + 4s³) ds against t² + t⁴ at t = 1.
        let spec = PhiSpec::p_and_q(2.0, 4.0).unwrap().without_closed_forms();
        let v = spec.big_phi(1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn phi_inverse_examples() {
        let spec = PhiSpec::power(3.0).unwrap();
        assert!((spec.big_phi_inv(8.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(spec.big_phi_inv(0.0).unwrap(), 0.0);

        // plasticity-log(p=2): root of t² ln(1+t) = 1, frozen from a
        // high-precision bisection against the closed-form Phi.
        let spec = PhiSpec::plasticity_log(2.0).unwrap();
        let root = spec.big_phi_inv(1.0).unwrap();
        assert!(
            (root - 1.144_790_101_692_639).abs() < 1e-9,
            "got {root}"
        );
        // Round-trip through the numeric path as an independent route.
        let numeric = spec.without_closed_forms().big_phi_inv(1.0).unwrap();
        assert!((numeric - root).abs() < 1e-8);
    }

    #[test]
    fn phi_inv_rejects_negative() {
        let spec = PhiSpec::power(2.0).unwrap();
        assert!(matches!(spec.big_phi_inv(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn h_and_inverse_examples() {
        // power(p): h(t) = p t^{p-1}, h_inv(s) = (s/p)^{1/(p-1)}
        let spec = PhiSpec::power(3.0).unwrap();
        assert!((spec.h(2.0).unwrap() - 12.0).abs() < 1e-12);
        assert!((spec.h_inv(12.0).unwrap() - 2.0).abs() < 1e-12);

        // constant-two: h(t) = 2t, h_inv(6) = 3
        let spec = PhiSpec::constant_two();
        assert_eq!(spec.h_inv(6.0).unwrap(), 3.0);

        // elasticity(gamma=2): h(1) = 2·2·(1+1)·1 = 8
        let spec = PhiSpec::elasticity(2.0).unwrap();
        assert!((spec.h(1.0).unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(spec.h(0.0).unwrap(), 0.0);
        assert_eq!(spec.h_inv(0.0).unwrap(), 0.0);
    }

    #[test]
    fn indices_power_exact() {
        let spec = PhiSpec::power(2.5).unwrap();
        let idx = spec.indices();
        assert_eq!((idx.l, idx.m, idx.l1, idx.m1), (2.5, 2.5, 1.5, 1.5));
        assert!(idx.exact);

        let idx = PhiSpec::constant_two().indices();
        assert_eq!((idx.l, idx.m, idx.l1, idx.m1), (2.0, 2.0, 1.0, 1.0));
    }

    #[test]
    fn indices_pq_estimated_within_one_percent() {
        let idx = PhiSpec::p_and_q(2.0, 4.0).unwrap().indices();
        assert!(!idx.exact);
        // The 1% bound is met up to the finite-difference noise floor of the
        // curvature ratio (~1e-11), hence the hair of slack.
        let tol = 0.01 + 1e-9;
        assert!((idx.l - 2.0).abs() / 2.0 <= tol, "l = {}", idx.l);
        assert!((idx.m - 4.0).abs() / 4.0 <= tol, "m = {}", idx.m);
        assert!((idx.l1 - 1.0).abs() <= tol, "l1 = {}", idx.l1);
        assert!((idx.m1 - 3.0).abs() / 3.0 <= tol, "m1 = {}", idx.m1);
    }

    #[test]
    fn sandwich_function_examples() {
        let spec = PhiSpec::power(2.0).unwrap();
        assert_eq!(spec.xi_eta(SandwichFn::Xi1, 3.0).unwrap(), 9.0);
        for which in [
            SandwichFn::Xi1,
            SandwichFn::Xi2,
            SandwichFn::Xi3,
            SandwichFn::Xi4,
            SandwichFn::Eta1,
            SandwichFn::Eta2,
            SandwichFn::Eta3,
            SandwichFn::Eta4,
        ] {
            assert_eq!(spec.xi_eta(which, 1.0).unwrap(), 1.0);
        }

        // p-and-q(2,4): xi2(0.5) = max{0.5^l, 0.5^m} with estimated indices
        // near (2, 4), so the value sits at 0.5² up to the safety margin.
        let spec = PhiSpec::p_and_q(2.0, 4.0).unwrap();
        let idx = spec.indices();
        let v = spec.xi_eta(SandwichFn::Xi2, 0.5).unwrap();
        assert_eq!(v, 0.5_f64.powf(idx.l).max(0.5_f64.powf(idx.m)));
        assert!((v - 0.25).abs() < 0.01, "got {v}");
    }

    #[test]
    fn custom_table_kernel_round_trips() {
        // Tabulate the p-Laplacian kernel at p = 3 and check h inversion.
        let ts = log_grid(1e-7, 1e7, 200);
        let phis: Vec<f64> = ts.iter().map(|t| 3.0 * t).collect();
        let spec = PhiSpec::from_table("tabulated-cubic", &ts, &phis).unwrap();
        for &t in &[1e-3, 0.7, 12.0, 4.2e3] {
            let h = spec.h(t).unwrap();
            let back = spec.h_inv(h).unwrap();
            assert!((back - t).abs() / t < 1e-9, "t={t} back={back}");
        }
        assert!((spec.indices().l - 3.0).abs() < 0.05);
    }

    #[test]
    fn nonpositive_kernel_rejected() {
        let r = PhiSpec::custom("bad", Arc::new(|t: f64| t - 1.0));
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn degenerate_elasticity_sqrt_rejected() {
        assert!(PhiSpec::elasticity_sqrt(1.0).is_err());
    }
}
