//! Small floating point helpers shared by the geometry modules.

use core::f64::consts::PI;

/// Relative slack used when comparing side lengths against the reverse
/// triangle inequality.
pub(crate) const LENGTH_REL_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}

#[inline]
pub(crate) fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn asinh(x: f64) -> f64 {
    libm::asinh(x)
}

#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

/// `acosh(1 + e)` for `e >= 0`, without the cancellation of the naive form.
#[inline]
pub(crate) fn acosh_1p(e: f64) -> f64 {
    2.0 * libm::asinh(libm::sqrt(0.5 * e.max(0.0)))
}

/// `acos(1 - e)` for `e` in `[0, 2]`, without the cancellation of the naive form.
#[inline]
pub(crate) fn acos_1m(e: f64) -> f64 {
    2.0 * libm::asin(libm::sqrt((0.5 * e).clamp(0.0, 1.0)))
}

/// `2 sinh²(x/2) = cosh(x) - 1`.
#[inline]
pub(crate) fn cosh_m1(x: f64) -> f64 {
    let h = libm::sinh(0.5 * x);
    2.0 * h * h
}

/// `2 sin²(x/2) = 1 - cos(x)`.
#[inline]
pub(crate) fn one_m_cos(x: f64) -> f64 {
    let h = libm::sin(0.5 * x);
    2.0 * h * h
}

/// Maps an angle difference into `(-π, π]`.
pub(crate) fn wrap_pi(d: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = d - two_pi * libm::floor((d + PI) / two_pi);
    if w <= -PI {
        w += two_pi;
    }
    w
}

/// `a >= b` up to the relative length slack.
#[inline]
pub(crate) fn ge_rel(a: f64, b: f64) -> bool {
    a >= b - LENGTH_REL_TOL * b.abs().max(a.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_inverse_forms_match_naive_ones() {
        for &e in &[1e-3, 0.25, 1.0, 3.5] {
            assert!((acosh_1p(e) - libm::acosh(1.0 + e)).abs() < 1e-13);
        }
        for &e in &[1e-3, 0.25, 1.0, 1.9] {
            assert!((acos_1m(e) - libm::acos(1.0 - e)).abs() < 1e-13);
        }
        assert!((cosh_m1(0.7) - (libm::cosh(0.7) - 1.0)).abs() < 1e-15);
        assert!((one_m_cos(0.7) - (1.0 - libm::cos(0.7))).abs() < 1e-15);
    }

    #[test]
    fn wrap_pi_stays_in_half_open_interval() {
        for &d in &[0.0, 3.0, -3.0, 7.0, -7.0, PI, -PI, 13.0 * PI] {
            let w = wrap_pi(d);
            assert!(w > -PI && w <= PI, "{d} -> {w}");
            let k = (d - w) / (2.0 * PI);
            assert!((k - libm::round(k)).abs() < 1e-12);
        }
    }
}
