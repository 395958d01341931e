//! Closure-start pressure ratio from sheet geometry.
//!
//! The ratio `rho = p_close_start / p_c` is modelled as a separable product
//! `rho0 · f_a(a) · f_b(b) · f_d(d)` with each factor equal to 1 at the
//! baseline geometry (a, b, d) = (15, 15, 4) mm. Each factor is a
//! piecewise-linear interpolant through a few anchor points and is held
//! constant outside them.
//!
//! - `b` (chamber length across the path): about 1 up to 15 mm, falling to
//!   0.1 at 25 mm. A wider chamber pushes harder on the path.
//! - `a` (chamber length along the path): 0.4 at 5 mm rising to 1 at the
//!   baseline. Short chambers buckle the path sharply.
//! - `d` (path width): increasing across 3.5..4.5 mm; at 3 mm or less the
//!   path does not pass air at all.

use std::fmt;

use thiserror::Error;

use crate::pneumatic::{FstParams, BASELINE_SUPPLY_KPA};
use crate::scalar::Scalar;

/// Ratio at the baseline geometry.
pub const BASELINE_RHO: f64 = 1.0;
pub const BASELINE_A_MM: f64 = 15.0;
pub const BASELINE_B_MM: f64 = 15.0;
pub const BASELINE_D_MM: f64 = 4.0;
/// Path width at or below which no air passes.
pub const BLOCKED_WIDTH_MM: f64 = 3.0;

const A_ANCHORS: &[(f64, f64)] = &[(5.0, 0.4), (15.0, 1.0)];
const B_ANCHORS: &[(f64, f64)] = &[(10.0, 1.0), (15.0, 1.0), (25.0, 0.1)];
const D_ANCHORS: &[(f64, f64)] = &[(3.5, 0.5), (4.0, 1.0), (4.5, 2.0)];

/// Reopening and full-closure pressures relative to the closure start.
pub const CLOSE_END_RATIO: f64 = 1.5;
pub const REOPEN_RATIO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("main path width d = {d} mm is too narrow for air to pass (must exceed {BLOCKED_WIDTH_MM} mm)")]
    BlockedGeometry { d: f64 },
    #[error("chamber dimensions must be positive (a = {a} mm, b = {b} mm)")]
    NonPositive { a: f64, b: f64 },
    #[error("ratio {rho} with p_c = {p_c} kPa gives a closure start outside (0, 2·p_c)")]
    RatioOutOfRange { rho: f64, p_c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignAxis {
    A,
    B,
    D,
}

impl fmt::Display for DesignAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DesignAxis::A => "a",
            DesignAxis::B => "b",
            DesignAxis::D => "d",
        })
    }
}

/// Sheet dimensions in mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryPoint<T> {
    /// Chamber length parallel to the main path.
    pub a: T,
    /// Chamber length perpendicular to the main path.
    pub b: T,
    /// Main path width.
    pub d: T,
}

impl<T: Scalar> GeometryPoint<T> {
    pub fn new(a: T, b: T, d: T) -> Self {
        Self { a, b, d }
    }

    pub fn baseline() -> Self {
        Self::new(T::lit(BASELINE_A_MM), T::lit(BASELINE_B_MM), T::lit(BASELINE_D_MM))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureRatio<T> {
    pub rho: T,
    /// Pressure held across the blocked path, kPa.
    pub p_c: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoEstimate<T> {
    pub ratio: ClosureRatio<T>,
    /// Axes whose value lies outside the anchored range; the factor was
    /// held at its nearest anchor.
    pub extrapolated: Vec<DesignAxis>,
}

/// Piecewise-linear interpolation, constant outside the anchors. Returns
/// the value and whether `x` fell outside the anchored range.
fn interpolate<T: Scalar>(anchors: &[(f64, f64)], x: T) -> (T, bool) {
    let (x0, y0) = anchors[0];
    let (xn, yn) = anchors[anchors.len() - 1];
    if x < T::lit(x0) {
        return (T::lit(y0), true);
    }
    if x > T::lit(xn) {
        return (T::lit(yn), true);
    }
    for w in anchors.windows(2) {
        let ((xa, ya), (xb, yb)) = (w[0], w[1]);
        if x <= T::lit(xb) {
            let f = (x - T::lit(xa)) / T::lit(xb - xa);
            return (T::lit(ya) + f * T::lit(yb - ya), false);
        }
    }
    (T::lit(yn), false)
}

/// Estimates the closure-start ratio for a geometry, with `p_c` at the
/// baseline supply pressure.
pub fn rho_estimate<T: Scalar>(g: &GeometryPoint<T>) -> Result<RhoEstimate<T>, DesignError> {
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    if !(g.d > T::lit(BLOCKED_WIDTH_MM)) {
        return Err(DesignError::BlockedGeometry { d: f(g.d) });
    }
    if !(g.a > T::zero() && g.b > T::zero()) || !g.a.is_finite() || !g.b.is_finite() || !g.d.is_finite() {
        return Err(DesignError::NonPositive { a: f(g.a), b: f(g.b) });
    }
    let mut extrapolated = Vec::new();
    let mut rho = T::lit(BASELINE_RHO);
    for (axis, anchors, x) in [
        (DesignAxis::A, A_ANCHORS, g.a),
        (DesignAxis::B, B_ANCHORS, g.b),
        (DesignAxis::D, D_ANCHORS, g.d),
    ] {
        let (factor, outside) = interpolate(anchors, x);
        if outside {
            extrapolated.push(axis);
        }
        rho = rho * factor;
    }
    Ok(RhoEstimate {
        ratio: ClosureRatio {
            rho,
            p_c: T::lit(BASELINE_SUPPLY_KPA),
        },
        extrapolated,
    })
}

/// Valve thresholds for a given ratio: closure starts at `rho·p_c`, is
/// complete at 1.5× that and reopens at 0.5×. Conductances and gate
/// capacitance stay at baseline.
pub fn thresholds_from_rho<T: Scalar>(r: &ClosureRatio<T>, p_c: T) -> Result<FstParams<T>, DesignError> {
    let p_start = r.rho * p_c;
    if !(p_start > T::zero() && p_start < p_c + p_c) || !p_start.is_finite() {
        return Err(DesignError::RatioOutOfRange {
            rho: r.rho.to_f64().unwrap_or(f64::NAN),
            p_c: p_c.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(FstParams {
        p_close_start: p_start,
        p_close_end: T::lit(CLOSE_END_RATIO) * p_start,
        p_reopen: T::lit(REOPEN_RATIO) * p_start,
        ..FstParams::baseline()
    })
}
