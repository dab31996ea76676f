//! Nonlinearity and weight descriptors.
//!
//! [`NonlinearitySpec`] models `f: [0,∞) → [0,∞)` with `f(0) = 0`, `f > 0` on
//! `(0,∞)`, together with the antiderivative `F(t) = ∫₀ᵗ f`, the partial
//! integral `G(x,y) = F(y) − F(x)`, the monotone envelopes
//! `f̲(t) = inf_{s≥t} f(s)` and `f̄(t) = sup_{0≤s≤t} f(s)`, and the transform
//! `𝓕(t) = (t/2)·f(t)^{-1/l₁}` used by the entire-space estimates.
//!
//! [`WeightSpec`] carries the radial bounds `a̲(r) ≤ ā(r)` of a weight (equal
//! for radially symmetric weights), the oscillation `a_osc = ā − a̲`, optional
//! ball envelopes `a_*`/`a*`, and the averaged mass
//! `𝓐_ρ(s) = s^{1-N} ∫₀ˢ t^{N-1} ρ(t) dt`.

use std::fmt;
use std::sync::Arc;

use crate::bracket::{self, Direction};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::nfunction::{log_grid, ScalarFn};
use crate::quad::{self, QuadOpts};

/// A labelled nonnegative function of the radius.
#[derive(Clone)]
pub struct RadialFn {
    f: ScalarFn,
    label: String,
}

impl RadialFn {
    pub fn new(label: impl Into<String>, f: ScalarFn) -> Self {
        RadialFn {
            f,
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        RadialFn {
            f: Arc::new(move |_| c),
            label: format!("constant({c})"),
        }
    }

    /// Tabulated radial function; boundary-tangent extension, clamped at 0.
    pub fn from_table(label: impl Into<String>, rs: &[f64], values: &[f64]) -> Result<Self> {
        let interp = MonotoneCubic::new(rs.to_vec(), values.to_vec())?;
        Ok(RadialFn {
            f: Arc::new(move |r| interp.eval(r).max(0.0)),
            label: label.into(),
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialFn({})", self.label)
    }
}

/// Nonlinearity family tag.
#[derive(Clone, Debug, PartialEq)]
pub enum NlFamily {
    /// `f(s) = s^γ`, `γ > 0`.
    Power { gamma: f64 },
    /// `f(s) = eˢ - 1`.
    Exponential,
    Custom { label: String },
}

impl fmt::Display for NlFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NlFamily::Power { gamma } => write!(f, "power(gamma={gamma})"),
            NlFamily::Exponential => write!(f, "exponential"),
            NlFamily::Custom { label } => write!(f, "custom({label})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneHint {
    NonDecreasing,
    Unknown,
}

/// Immutable descriptor of the absorption nonlinearity.
#[derive(Clone)]
pub struct NonlinearitySpec {
    family: NlFamily,
    f: ScalarFn,
    f_big_closed: Option<ScalarFn>,
    monotone: MonotoneHint,
    tail_exponent: Option<f64>,
}

impl fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearitySpec")
            .field("family", &self.family)
            .field("monotone", &self.monotone)
            .field("tail_exponent", &self.tail_exponent)
            .finish()
    }
}

impl NonlinearitySpec {
    /// `f(s) = s^γ` with `γ > 0`; `F(t) = t^{γ+1}/(γ+1)`.
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "power nonlinearity needs gamma > 0, got {gamma}"
            )));
        }
        Ok(NonlinearitySpec {
            family: NlFamily::Power { gamma },
            f: Arc::new(move |s: f64| s.powf(gamma)),
            f_big_closed: Some(Arc::new(move |t: f64| {
                t.powf(gamma + 1.0) / (gamma + 1.0)
            })),
            monotone: MonotoneHint::NonDecreasing,
            tail_exponent: Some(gamma),
        })
    }

    /// `f(s) = eˢ - 1`; `F(t) = eᵗ - t - 1`.
    pub fn exponential() -> Self {
        NonlinearitySpec {
            family: NlFamily::Exponential,
            f: Arc::new(|s: f64| s.exp_m1()),
            f_big_closed: Some(Arc::new(|t: f64| t.exp_m1() - t)),
            monotone: MonotoneHint::NonDecreasing,
            tail_exponent: None,
        }
    }

    /// User-supplied nonlinearity.
    pub fn custom(
        label: impl Into<String>,
        f: ScalarFn,
        f_big_closed: Option<ScalarFn>,
        monotone: MonotoneHint,
        tail_exponent: Option<f64>,
    ) -> Result<Self> {
        let spec = NonlinearitySpec {
            family: NlFamily::Custom {
                label: label.into(),
            },
            f,
            f_big_closed,
            monotone,
            tail_exponent,
        };
        spec.validate_samples()?;
        Ok(spec)
    }

    /// Like [`custom`](Self::custom) but skips the positivity validation.
    /// Intended for degenerate probes such as `f ≡ 0` (zero right-hand side).
    pub fn custom_unchecked(
        label: impl Into<String>,
        f: ScalarFn,
        monotone: MonotoneHint,
    ) -> Self {
        NonlinearitySpec {
            family: NlFamily::Custom {
                label: label.into(),
            },
            f,
            f_big_closed: None,
            monotone,
            tail_exponent: None,
        }
    }

    /// Tabulated `(s, f(s))` pairs; the first row must be `(0, 0)`.
    pub fn from_table(
        label: impl Into<String>,
        ss: &[f64],
        values: &[f64],
        monotone: MonotoneHint,
    ) -> Result<Self> {
        if ss.first() != Some(&0.0) || values.first() != Some(&0.0) {
            return Err(Error::InvalidSpec(
                "nonlinearity tables must start with the row (0, 0)".to_string(),
            ));
        }
        let interp = MonotoneCubic::new(ss.to_vec(), values.to_vec())?;
        Self::custom(
            label,
            Arc::new(move |s| interp.eval(s).max(0.0)),
            None,
            monotone,
            None,
        )
    }

    fn validate_samples(&self) -> Result<()> {
        let z = (self.f)(0.0);
        if !(z.abs() <= 1e-12) {
            return Err(Error::InvalidSpec(format!(
                "nonlinearity must vanish at 0, got f(0) = {z}"
            )));
        }
        let grid = log_grid(1e-6, 1e6, 49);
        let mut prev = 0.0;
        for &s in &grid {
            let v = (self.f)(s);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "nonlinearity must be positive and finite for s > 0; f({s:e}) = {v}"
                )));
            }
            if self.monotone == MonotoneHint::NonDecreasing && v < prev {
                return Err(Error::InvalidSpec(format!(
                    "nonlinearity declared non-decreasing but f decreases near s = {s:e}"
                )));
            }
            prev = v;
        }
        Ok(())
    }

    pub fn family(&self) -> &NlFamily {
        &self.family
    }

    pub fn monotone_hint(&self) -> MonotoneHint {
        self.monotone
    }

    /// Asymptotic growth order of `f`, when known (`γ` for the power family).
    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    pub fn f(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    /// `F(t) = ∫₀ᵗ f(s) ds`.
    pub fn big_f(&self, t: f64) -> Result<f64> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain(format!("F needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if let Some(closed) = &self.f_big_closed {
            return Ok(closed(t));
        }
        let f = self.f.clone();
        quad::integrate(move |s| f(s), 0.0, t, QuadOpts::default()).map(|r| r.value)
    }

    /// Drops the closed-form antiderivative (quadrature cross-checks).
    pub fn without_closed_forms(mut self) -> Self {
        self.f_big_closed = None;
        self
    }

    /// `G(x, y) = ∫ₓʸ f = F(y) − F(x)` for `0 ≤ x ≤ y`.
    pub fn g_partial(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0 <= x && x <= y) {
            return Err(Error::domain(format!(
                "G needs 0 <= x <= y, got x={x}, y={y}"
            )));
        }
        Ok((self.big_f(y)? - self.big_f(x)?).max(0.0))
    }

    /// `f̲(t) = inf {f(s) : s ≥ t}` truncated at the horizon `t_max`.
    ///
    /// For a declared non-decreasing `f` the infimum sits at the left
    /// endpoint and `f(t)` is returned exactly; otherwise a dense grid of
    /// `[t, t_max]` is refined until the running infimum is stable to `1e-8`
    /// relative.
    pub fn envelope_lower(&self, t: f64, t_max: f64) -> Result<f64> {
        if !(0.0 <= t && t <= t_max) {
            return Err(Error::domain(format!(
                "envelope needs 0 <= t <= t_max, got t={t}, t_max={t_max}"
            )));
        }
        if self.monotone == MonotoneHint::NonDecreasing {
            return Ok(self.f(t));
        }
        Ok(self.grid_extremum(t, t_max, true))
    }

    /// `f̄(t) = sup {f(s) : 0 ≤ s ≤ t}`.
    pub fn envelope_upper(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("envelope needs t >= 0, got {t}")));
        }
        if self.monotone == MonotoneHint::NonDecreasing {
            return Ok(self.f(t));
        }
        Ok(self.grid_extremum(0.0, t, false))
    }

    fn grid_extremum(&self, lo: f64, hi: f64, take_min: bool) -> f64 {
        if hi <= lo {
            return self.f(lo);
        }
        let mut n = 4096usize;
        let mut best = f64::NAN;
        loop {
            let mut acc = if take_min {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            for i in 0..=n {
                let s = lo + (hi - lo) * i as f64 / n as f64;
                let v = self.f(s);
                acc = if take_min { acc.min(v) } else { acc.max(v) };
            }
            if !best.is_nan() && (acc - best).abs() <= 1e-8 * best.abs().max(1e-300) {
                return acc;
            }
            best = acc;
            n *= 2;
            if n > 1 << 22 {
                return best; // refinement cap; best grid value stands
            }
        }
    }

    /// `𝓕(t) = (t/2)·f(t)^{-1/l₁}` for `t > 0` with `f(t) > 0`.
    pub fn cal_f(&self, l1: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("calF needs t > 0, got {t}")));
        }
        if !(l1 > 0.0) {
            return Err(Error::domain(format!("calF needs l1 > 0, got {l1}")));
        }
        let ft = self.f(t);
        if !(ft > 0.0) {
            return Err(Error::domain(format!(
                "calF needs f(t) > 0, got f({t}) = {ft}"
            )));
        }
        Ok(0.5 * t * ft.powf(-1.0 / l1))
    }

    /// Scans `𝓕` for strict monotonicity on the log-spaced `scan_range` and
    /// reports its direction. A violation is a structural error naming the
    /// offending interval.
    ///
    /// `𝓕` may be increasing or decreasing: for the power family
    /// `𝓕(s) = s^{(l₁-γ)/l₁}/2`, rising when `γ < l₁` and falling when
    /// `γ > l₁`. Either direction is accepted; only non-monotonicity is
    /// rejected.
    pub fn cal_f_direction(&self, l1: f64, scan_range: (f64, f64)) -> Result<Direction> {
        let (lo, hi) = scan_range;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::domain(format!(
                "calF scan range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        let grid = log_grid(lo, hi, 301);
        let first = self.cal_f(l1, grid[0])?;
        let last = self.cal_f(l1, grid[grid.len() - 1])?;
        let dir = if last >= first {
            Direction::Increasing
        } else {
            Direction::Decreasing
        };
        let mut prev = first;
        for w in grid.windows(2) {
            let v = self.cal_f(l1, w[1])?;
            let ok = match dir {
                Direction::Increasing => v >= prev * (1.0 - 1e-12),
                Direction::Decreasing => v <= prev * (1.0 + 1e-12),
            };
            if !ok {
                return Err(Error::Structural(format!(
                    "calF is not monotone on the scanned range: direction flips on [{:e}, {:e}]",
                    w[0], w[1]
                )));
            }
            prev = v;
        }
        Ok(dir)
    }

    /// Inverts `𝓕` at `y` after a monotonicity scan over `scan_range`.
    pub fn cal_f_inv(&self, l1: f64, y: f64, scan_range: (f64, f64)) -> Result<f64> {
        let dir = self.cal_f_direction(l1, scan_range)?;
        self.cal_f_inv_with_direction(l1, y, dir)
    }

    /// Inverts `𝓕` with a known direction (skips the scan; used in loops).
    pub fn cal_f_inv_with_direction(&self, l1: f64, y: f64, dir: Direction) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::domain(format!("calF inverse needs y > 0, got {y}")));
        }
        bracket::invert_monotone(
            |t| self.cal_f(l1, t).unwrap_or(f64::NAN),
            y,
            dir,
            1.0,
            "calF inverse",
        )
    }

    pub fn describe(&self) -> String {
        self.family.to_string()
    }
}

/// Selector for the radial component feeding `𝓐_ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightComponent {
    /// `a̲(r) = min {a(x) : |x| = r}`
    Lower,
    /// `ā(r) = max {a(x) : |x| = r}`
    Upper,
    /// `a_osc(r) = ā(r) − a̲(r)`
    Osc,
    /// `a_*(r) = min {a(x) : |x| ≤ r}`
    BallLower,
    /// `a*(r) = max {a(x) : |x| ≤ r}`
    BallUpper,
}

/// Radial bound data of the weight `a(x)`.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    lower: RadialFn,
    upper: RadialFn,
    ball_lower: Option<RadialFn>,
    ball_upper: Option<RadialFn>,
}

impl WeightSpec {
    /// Radially symmetric weight: `a̲ = ā = ρ`.
    pub fn radial(rho: RadialFn) -> Self {
        WeightSpec {
            lower: rho.clone(),
            upper: rho,
            ball_lower: None,
            ball_upper: None,
        }
    }

    /// General weight with spherical bounds `a̲ ≤ ā` (checked on samples).
    pub fn bounds(lower: RadialFn, upper: RadialFn) -> Result<Self> {
        for &r in &sample_radii() {
            let (lo, up) = (lower.eval(r), upper.eval(r));
            if !(lo >= 0.0 && up >= 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "weight bounds must be nonnegative; at r = {r:e} got ({lo}, {up})"
                )));
            }
            if lo > up * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::InvalidSpec(format!(
                    "weight bounds must satisfy lower <= upper; violated at r = {r:e} ({lo} > {up})"
                )));
            }
        }
        Ok(WeightSpec {
            lower,
            upper,
            ball_lower: None,
            ball_upper: None,
        })
    }

    /// Attaches ball envelopes `a_*(r) = min_{|x|≤r} a` (nonincreasing) and
    /// `a*(r) = max_{|x|≤r} a` (nondecreasing); both checked on samples.
    pub fn with_ball_envelopes(mut self, ball_lower: RadialFn, ball_upper: RadialFn) -> Result<Self> {
        let radii = sample_radii();
        for w in radii.windows(2) {
            if ball_lower.eval(w[1]) > ball_lower.eval(w[0]) * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::InvalidSpec(format!(
                    "ball minimum envelope must be nonincreasing; violated on [{:e}, {:e}]",
                    w[0], w[1]
                )));
            }
            if ball_upper.eval(w[1]) * (1.0 + 1e-12) + 1e-300 < ball_upper.eval(w[0]) {
                return Err(Error::InvalidSpec(format!(
                    "ball maximum envelope must be nondecreasing; violated on [{:e}, {:e}]",
                    w[0], w[1]
                )));
            }
        }
        self.ball_lower = Some(ball_lower);
        self.ball_upper = Some(ball_upper);
        Ok(self)
    }

    pub fn lower(&self) -> &RadialFn {
        &self.lower
    }

    pub fn upper(&self) -> &RadialFn {
        &self.upper
    }

    /// `a_osc(r) = ā(r) − a̲(r)`, with negative round-off clamped to 0.
    pub fn osc(&self, r: f64) -> f64 {
        (self.upper.eval(r) - self.lower.eval(r)).max(0.0)
    }

    /// True when the two spherical bounds are the same object or everywhere
    /// equal on samples (radially symmetric weight).
    pub fn is_radial(&self) -> bool {
        sample_radii().iter().all(|&r| self.osc(r) == 0.0)
    }

    /// Evaluates the selected component at radius `r`.
    pub fn component(&self, which: WeightComponent, r: f64) -> Result<f64> {
        Ok(match which {
            WeightComponent::Lower => self.lower.eval(r),
            WeightComponent::Upper => self.upper.eval(r),
            WeightComponent::Osc => self.osc(r),
            WeightComponent::BallLower => self
                .ball_lower
                .as_ref()
                .ok_or_else(|| Error::Config("ball minimum envelope not configured".to_string()))?
                .eval(r),
            WeightComponent::BallUpper => self
                .ball_upper
                .as_ref()
                .ok_or_else(|| Error::Config("ball maximum envelope not configured".to_string()))?
                .eval(r),
        })
    }

    pub fn component_label(&self, which: WeightComponent) -> String {
        match which {
            WeightComponent::Lower => format!("lower[{}]", self.lower.label()),
            WeightComponent::Upper => format!("upper[{}]", self.upper.label()),
            WeightComponent::Osc => "osc".to_string(),
            WeightComponent::BallLower => "ball-lower".to_string(),
            WeightComponent::BallUpper => "ball-upper".to_string(),
        }
    }

    /// `𝓐_ρ(s) = s^{1-N} ∫₀ˢ t^{N-1} ρ(t) dt` for the selected component,
    /// extended continuously by `𝓐_ρ(0) = 0`.
    pub fn weight_a(&self, which: WeightComponent, s: f64, n_dim: u32) -> Result<f64> {
        if n_dim < 1 {
            return Err(Error::domain("dimension must be >= 1".to_string()));
        }
        if s < 0.0 || !s.is_finite() {
            return Err(Error::domain(format!("weight mass needs s >= 0, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let n = n_dim as f64;
        let mass = quad::integrate(
            |t: f64| t.powf(n - 1.0) * self.component(which, t).unwrap_or(f64::NAN),
            0.0,
            s,
            QuadOpts::default(),
        )?
        .value;
        Ok(s.powf(1.0 - n) * mass)
    }
}

fn sample_radii() -> Vec<f64> {
    let mut radii = vec![0.0];
    radii.extend(log_grid(1e-6, 1e4, 41));
    radii
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_f_power_and_exponential() {
        let nl = NonlinearitySpec::power(2.0).unwrap();
        assert!((nl.big_f(3.0).unwrap() - 9.0).abs() < 1e-12);
        assert_eq!(nl.big_f(0.0).unwrap(), 0.0);

        // F(1) = e - 2 for f(s) = e^s - 1; quadrature route cross-checked.
        let nl = NonlinearitySpec::exponential();
        let closed = nl.big_f(1.0).unwrap();
        assert!((closed - 0.718_281_828_459_045_2).abs() < 1e-12);
        let numeric = nl.clone().without_closed_forms().big_f(1.0).unwrap();
        assert!((numeric - closed).abs() < 1e-10);
    }

    #[test]
    fn g_partial_examples() {
        let nl = NonlinearitySpec::power(1.0).unwrap();
        assert!((nl.g_partial(1.0, 2.0).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(nl.g_partial(2.0, 2.0).unwrap(), 0.0);
        assert!(nl.g_partial(2.0, 1.0).is_err());

        // gamma = 1/2: G(0,4) = (2/3)·4^{3/2} = 16/3, against the quadrature
        // route as the independent oracle.
        let nl = NonlinearitySpec::power(0.5).unwrap();
        let closed = nl.g_partial(0.0, 4.0).unwrap();
        assert!((closed - 16.0 / 3.0).abs() < 1e-12);
        let numeric = nl.clone().without_closed_forms().g_partial(0.0, 4.0).unwrap();
        assert!((numeric - closed).abs() < 1e-9);
    }

    #[test]
    fn g_additivity() {
        let nl = NonlinearitySpec::power(3.0).unwrap();
        let (x, y, z) = (0.3, 1.7, 9.2);
        let lhs = nl.g_partial(x, z).unwrap();
        let rhs = nl.g_partial(x, y).unwrap() + nl.g_partial(y, z).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
    }

    #[test]
    fn envelopes_for_monotone_f_are_f() {
        let nl = NonlinearitySpec::power(2.0).unwrap();
        for &t in &[0.0, 0.5, 3.0, 40.0] {
            assert_eq!(nl.envelope_lower(t, 1e6).unwrap(), nl.f(t));
            assert_eq!(nl.envelope_upper(t).unwrap(), nl.f(t));
        }
    }

    #[test]
    fn envelope_of_oscillating_f() {
        let nl = NonlinearitySpec::custom(
            "s(2+sin s)",
            Arc::new(|s: f64| s * (2.0 + s.sin())),
            None,
            MonotoneHint::Unknown,
            None,
        )
        .unwrap();
        assert_eq!(nl.envelope_lower(0.0, 100.0).unwrap(), 0.0);
        // Frozen oracle: dense-grid minimum of s(2+sin s) over [pi, 100]
        // (1e5-point brute force gives 4.600423928995955).
        let v = nl.envelope_lower(std::f64::consts::PI, 100.0).unwrap();
        assert!((v - 4.600_423_9).abs() < 1e-6, "got {v}");
        // Envelope bounds f pointwise.
        for &t in &[1.0, 4.0, 20.0] {
            assert!(nl.envelope_lower(t, 100.0).unwrap() <= nl.f(t) + 1e-12);
            assert!(nl.envelope_upper(t).unwrap() >= nl.f(t) - 1e-12);
        }
    }

    #[test]
    fn cal_f_power_rule_and_inverse() {
        // power(gamma): calF(s) = s^{(l1-gamma)/l1}/2
        let nl = NonlinearitySpec::power(1.0).unwrap();
        let v = nl.cal_f(2.0, 4.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12); // (4/2)·4^{-1/2} = 1
        for &s in &[0.3, 2.0, 50.0] {
            let direct = nl.cal_f(2.0, s).unwrap();
            let rule = 0.5 * s.powf((2.0 - 1.0) / 2.0);
            assert!((direct - rule).abs() < 1e-12 * rule.max(1.0));
        }
        let inv = nl.cal_f_inv(2.0, 1.0, (1e-6, 1e6)).unwrap();
        assert!((inv - 4.0).abs() < 1e-8, "got {inv}");
    }

    #[test]
    fn cal_f_non_monotone_is_structural_error() {
        // f chosen so calF = (s/2)/f(s) oscillates: f(s) = s·(2 + sin s)
        // gives calF = 1/(2(2+sin s)) with l1 = 1, which is non-monotone.
        let nl = NonlinearitySpec::custom(
            "osc",
            Arc::new(|s: f64| s * (2.0 + s.sin())),
            None,
            MonotoneHint::Unknown,
            None,
        )
        .unwrap();
        match nl.cal_f_direction(1.0, (0.1, 100.0)) {
            Err(Error::Structural(msg)) => assert!(msg.contains("monotone")),
            other => panic!("expected structural error, got {other:?}"),
        }
    }

    #[test]
    fn weight_mass_examples() {
        // rho ≡ 1: A(s) = s/N for any N
        let ws = WeightSpec::radial(RadialFn::constant(1.0));
        for n in [1u32, 2, 3, 7] {
            let v = ws.weight_a(WeightComponent::Lower, 2.0, n).unwrap();
            assert!((v - 2.0 / n as f64).abs() < 1e-10, "N={n} gave {v}");
        }
        assert_eq!(ws.weight_a(WeightComponent::Upper, 0.0, 3).unwrap(), 0.0);

        // rho(t) = t, N = 1: A(s) = s²/2
        let ws = WeightSpec::radial(RadialFn::new("t", Arc::new(|t| t)));
        let v = ws.weight_a(WeightComponent::Lower, 3.0, 1).unwrap();
        assert!((v - 4.5).abs() < 1e-10);

        // rho = 1/(1+t²), N = 3, s = 2: (2 − arctan 2)/4, frozen from the
        // closed-form antiderivative t − arctan t.
        let ws = WeightSpec::radial(RadialFn::new(
            "1/(1+t^2)",
            Arc::new(|t: f64| 1.0 / (1.0 + t * t)),
        ));
        let v = ws.weight_a(WeightComponent::Lower, 2.0, 3).unwrap();
        assert!((v - 0.223_212_820_551_477_37).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn weight_mass_vanishes_at_origin() {
        let ws = WeightSpec::radial(RadialFn::constant(5.0));
        let v = ws.weight_a(WeightComponent::Lower, 1e-8, 3).unwrap();
        assert!(v.abs() < 1e-7);
    }

    #[test]
    fn oscillation_clamped_nonnegative() {
        let ws = WeightSpec::bounds(
            RadialFn::new("1-e^-r", Arc::new(|r: f64| -(-r).exp_m1())),
            RadialFn::constant(1.0),
        )
        .unwrap();
        assert!(!ws.is_radial());
        for &r in &[0.0, 0.5, 3.0] {
            let osc = ws.osc(r);
            assert!((osc - (-r as f64).exp()).abs() < 1e-12);
        }
        assert!(ws.component(WeightComponent::BallLower, 1.0).is_err());
    }

    #[test]
    fn misordered_bounds_rejected() {
        let r = WeightSpec::bounds(RadialFn::constant(2.0), RadialFn::constant(1.0));
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }
}
