//! Bracketed inversion of monotone scalar maps.
//!
//! Every functional inverse in the crate (`Φ⁻¹`, `h⁻¹`, `𝓕⁻¹`, shooting on
//! initial data) goes through these routines: grow a bracket geometrically,
//! then bisect. No derivative-based iteration is used anywhere, so merely
//! monotone (not differentiable) inputs converge unconditionally.

use crate::error::{Error, Result};

/// Relative tolerance used by the inverse maps of the crate.
pub const INV_REL_TOL: f64 = 1e-12;

const MAX_GROW: usize = 1100;
const MAX_BISECT: usize = 220;

/// Inverts a nondecreasing map `f` at `target`, assuming `f(0) = 0` and
/// `f` unbounded. The bracket is grown geometrically from `[0, 1]`.
pub fn invert_increasing<F: Fn(f64) -> f64>(f: F, target: f64, context: &str) -> Result<f64> {
    if !target.is_finite() {
        return Err(Error::domain(format!(
            "{context}: target {target} is not finite"
        )));
    }
    if target < 0.0 {
        return Err(Error::domain(format!(
            "{context}: target {target} is negative"
        )));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut f_hi = f(hi);
    let mut grow = 0;
    while f_hi < target {
        lo = hi;
        hi *= 2.0;
        f_hi = f(hi);
        grow += 1;
        if grow > MAX_GROW || !hi.is_finite() {
            return Err(Error::numeric(
                context,
                format!("bracket growth exhausted at hi={hi:e} for target {target:e}"),
                hi,
            ));
        }
    }
    bisect_increasing(&f, lo, hi, target, context)
}

/// Bisection on `[lo, hi]` for a nondecreasing `f` with
/// `f(lo) <= target <= f(hi)`. Converges to relative width [`INV_REL_TOL`].
pub fn bisect_increasing<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    context: &str,
) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::domain(format!("{context}: bad bracket [{lo}, {hi}]")));
    }
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= INV_REL_TOL * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Direction of a monotone scalar map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Inverts a strictly monotone map of known direction at `target`, growing
/// the bracket geometrically from `seed > 0` in both directions.
///
/// Unlike [`invert_increasing`] this does not assume `f(0) = 0`; it is used
/// for maps defined on `(0, ∞)` such as `𝓕`.
pub fn invert_monotone<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    direction: Direction,
    seed: f64,
    context: &str,
) -> Result<f64> {
    if !target.is_finite() {
        return Err(Error::domain(format!(
            "{context}: target {target} is not finite"
        )));
    }
    let seed = if seed > 0.0 && seed.is_finite() { seed } else { 1.0 };
    // Orient as increasing via sign flip.
    let sign = match direction {
        Direction::Increasing => 1.0,
        Direction::Decreasing => -1.0,
    };
    let g = |t: f64| sign * f(t);
    let goal = sign * target;

    let mut lo = seed;
    let mut hi = seed;
    let mut grow = 0;
    while g(lo) > goal {
        lo *= 0.5;
        grow += 1;
        if grow > MAX_GROW || lo < f64::MIN_POSITIVE {
            return Err(Error::domain(format!(
                "{context}: target {target:e} below the attainable range (bracket shrunk to {lo:e})"
            )));
        }
    }
    grow = 0;
    while g(hi) < goal {
        hi *= 2.0;
        grow += 1;
        if grow > MAX_GROW || !hi.is_finite() {
            return Err(Error::domain(format!(
                "{context}: target {target:e} above the attainable range (bracket grown to {hi:e})"
            )));
        }
    }
    for _ in 0..MAX_BISECT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < goal {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= INV_REL_TOL * hi.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_cubic() {
        let x = invert_increasing(|t| t * t * t, 8.0, "cube").unwrap();
        assert!((x - 2.0).abs() < 1e-11);
    }

    #[test]
    fn zero_target_is_zero() {
        assert_eq!(invert_increasing(|t| 5.0 * t, 0.0, "lin").unwrap(), 0.0);
    }

    #[test]
    fn negative_target_is_domain_error() {
        assert!(matches!(
            invert_increasing(|t| t, -1.0, "lin"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn large_target_grows_bracket() {
        let x = invert_increasing(|t| t.powi(2), 1e12, "sq").unwrap();
        assert!((x - 1e6).abs() / 1e6 < 1e-11);
    }

    #[test]
    fn decreasing_map_inverted() {
        let x = invert_monotone(|t| 1.0 / t, 0.25, Direction::Decreasing, 1.0, "recip").unwrap();
        assert!((x - 4.0).abs() < 1e-10);
    }

    #[test]
    fn monotone_out_of_range_reports_domain() {
        let r = invert_monotone(|t: f64| t.atan(), 2.0, Direction::Increasing, 1.0, "atan");
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
