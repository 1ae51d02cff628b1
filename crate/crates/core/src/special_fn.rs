//! Bessel and Hankel functions of integer order on the real line.
//!
//! The cylinder functions `J_n` and `Y_n` come from the `libm` port of the
//! FreeBSD msun routines (ascending polynomial fits near the origin, Hankel
//! asymptotics with rational corrections for large argument, Miller backward
//! recurrence for `J_n` when `n > x`). Everything the boundary kernels need is
//! layered on top: derivatives, `H_n^(1)`, and zeros of `J_n`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant, 20 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Bessel function of the first kind `J_n(x)`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    match n {
        0 => libm::j0(x),
        1 => libm::j1(x),
        _ => libm::jn(n as i32, x),
    }
}

/// Bessel function of the second kind `Y_n(x)` for `x > 0`.
///
/// Returns `-inf` at the origin and NaN for negative arguments, matching the
/// conventions of the underlying routines.
pub fn bessel_y(n: u32, x: f64) -> f64 {
    match n {
        0 => libm::y0(x),
        1 => libm::y1(x),
        _ => libm::yn(n as i32, x),
    }
}

/// `J'_n(x)` from `J'_n = (J_{n-1} - J_{n+1}) / 2`, with `J'_0 = -J_1`.
pub fn bessel_j_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
    }
}

/// `Y'_n(x)`, same recurrence as [`bessel_j_prime`].
pub fn bessel_y_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_y(1, x)
    } else {
        0.5 * (bessel_y(n - 1, x) - bessel_y(n + 1, x))
    }
}

/// Hankel function of the first kind `H_n^(1)(x) = J_n(x) + i Y_n(x)`.
///
/// Coincident source/target points never reach this function: the kernel
/// code substitutes analytic limits on the diagonal.
pub fn hankel1(n: u32, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "hankel1 requires a finite positive argument, got {x}"
        )));
    }
    Ok(Complex64::new(bessel_j(n, x), bessel_y(n, x)))
}

/// `H_0^(1)(x)` and `H_1^(1)(x)` together, for kernel evaluation.
#[inline]
pub(crate) fn hankel01(x: f64) -> (Complex64, Complex64) {
    (
        Complex64::new(libm::j0(x), libm::y0(x)),
        Complex64::new(libm::j1(x), libm::y1(x)),
    )
}

/// The `k`-th positive zero `j_{n,k}` of `J_n` (`k >= 1`).
///
/// Zeros are bracketed by scanning upward from `x = n` (no positive zero of
/// `J_n` lies below `n`) in steps much smaller than the zero spacing, then
/// bisected down to adjacent floating-point numbers.
pub fn bessel_zero(n: u32, k: u32) -> f64 {
    assert!(k >= 1, "zero index is 1-based");
    let f = |x: f64| bessel_j(n, x);
    let step = 0.25;
    let mut lo = (n as f64).max(step);
    let mut f_lo = f(lo);
    let mut found = 0;
    loop {
        let hi = lo + step;
        let f_hi = f(hi);
        if f_lo == 0.0 {
            found += 1;
            if found == k {
                return lo;
            }
        } else if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
            found += 1;
            if found == k {
                return bisect(f, lo, hi);
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
}

/// Bisection to machine resolution on a sign-changing bracket.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `J_n(x) = (1/2π) ∫ cos(nτ − x sin τ) dτ`; the trapezoidal rule is
    /// exact up to `J_{M−n}(x)`-sized terms for a periodic integrand.
    fn j_integral(n: u32, x: f64) -> f64 {
        let m = 1024;
        let h = 2.0 * PI / m as f64;
        (0..m)
            .map(|k| {
                let tau = k as f64 * h;
                (n as f64 * tau - x * tau.sin()).cos()
            })
            .sum::<f64>()
            / m as f64
    }

    const GRID: [f64; 4] = [0.1, 1.0, 10.0, 50.0];

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j(5, 0.0), 0.0);
        assert!((bessel_j_prime(1, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn j_matches_integral_representation() {
        for n in 0..=20u32 {
            for &x in &[0.3, 1.0, 2.5, 7.0, 13.7, 29.0, 55.5, 99.0] {
                let a = bessel_j(n, x);
                let b = j_integral(n, x);
                let scale = a.abs().max(1e-3 * (2.0 / (PI * x)).sqrt());
                assert!(
                    (a - b).abs() <= 1e-14 * scale.max(1.0) + 2e-16,
                    "n={n} x={x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn negative_argument_parity() {
        for n in 0..6u32 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((bessel_j(n, -3.3) - sign * bessel_j(n, 3.3)).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_identity_order_zero() {
        for &x in &[0.0, 0.5, 3.0, 17.0] {
            assert_eq!(bessel_j_prime(0, x), -bessel_j(1, x));
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        for n in 0..8u32 {
            for &x in &[0.7, 4.0, 12.0] {
                let fd = (bessel_j(n, x + h) - bessel_j(n, x - h)) / (2.0 * h);
                assert!((fd - bessel_j_prime(n, x)).abs() < 1e-9);
                let fdy = (bessel_y(n, x + h) - bessel_y(n, x - h)) / (2.0 * h);
                let dy = bessel_y_prime(n, x);
                assert!((fdy - dy).abs() < 1e-7 * dy.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn wronskian() {
        for n in 0..=10u32 {
            for &x in &GRID {
                let w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x);
                let expect = 2.0 / (PI * x);
                assert!(
                    ((w - expect) / expect).abs() <= 1e-12,
                    "n={n} x={x} w={w} expect={expect}"
                );
            }
        }
    }

    #[test]
    fn three_term_recurrence() {
        for n in 1..=10u32 {
            for &x in &GRID {
                let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
                let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
                let scale = lhs.abs().max(rhs.abs()).max(bessel_j(n - 1, x).abs());
                assert!((lhs - rhs).abs() <= 1e-12 * scale, "J n={n} x={x}");

                let lhs = bessel_y(n - 1, x) + bessel_y(n + 1, x);
                let rhs = 2.0 * n as f64 / x * bessel_y(n, x);
                let scale = lhs.abs().max(rhs.abs()).max(bessel_y(n + 1, x).abs());
                assert!((lhs - rhs).abs() <= 1e-12 * scale, "Y n={n} x={x}");
            }
        }
    }

    #[test]
    fn hankel_reference_value() {
        let h = hankel1(0, 1.0).unwrap();
        assert!((h.re - 0.7651976865579666).abs() < 1e-15);
        assert!((h.im - 0.0882569642156769).abs() < 1e-15);
    }

    #[test]
    fn hankel_real_part_is_j() {
        for &x in &[1e-8, 0.01, 2.0, 40.0, 100.0] {
            assert_eq!(hankel1(0, x).unwrap().re, bessel_j(0, x));
            assert_eq!(hankel1(3, x).unwrap().re, bessel_j(3, x));
        }
    }

    #[test]
    fn hankel_log_singularity() {
        for &x in &[1e-8, 1e-6, 1e-4] {
            let im = hankel1(0, x).unwrap().im;
            let asym = 2.0 / PI * ((x / 2.0).ln() + EULER_GAMMA);
            assert!((im - asym).abs() < 1e-6 * asym.abs(), "x={x}");
        }
    }

    #[test]
    fn hankel_domain_error() {
        assert!(hankel1(0, 0.0).is_err());
        assert!(hankel1(1, -1.0).is_err());
        assert!(hankel1(1, f64::NAN).is_err());
    }

    #[test]
    fn zeros_reference_values() {
        assert!((bessel_zero(0, 1) - 2.404825557695773).abs() < 1e-12);
        assert!((bessel_zero(1, 2) - 7.015586669815619).abs() < 1e-12);
        assert!((bessel_zero(1, 1) - 3.831705970207512).abs() < 1e-12);
        assert!(bessel_j(1, 7.01558666981562).abs() < 1e-12);
    }

    #[test]
    fn zeros_are_roots_and_increase() {
        for n in 0..12u32 {
            let mut prev = 0.0;
            for k in 1..8u32 {
                let z = bessel_zero(n, k);
                assert!(bessel_j(n, z).abs() <= 1e-12, "n={n} k={k}");
                assert!(z > prev);
                prev = z;
            }
        }
        assert!(bessel_zero(0, 2) > bessel_zero(0, 1));
    }

    #[test]
    fn derivative_zero_used_in_disk_analysis() {
        let z = bisect(|x| bessel_j_prime(1, x), 1.0, 2.5);
        assert!((z - 1.84118378134066).abs() < 1e-12);
        assert!(bessel_j_prime(1, 1.84118378134066).abs() < 1e-12);
    }
}
