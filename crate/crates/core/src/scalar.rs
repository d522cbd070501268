//! Scalar abstraction used by potentials and the grounding oracle.
//!
//! Potentials are stored in log space, so the only requirement on the number
//! type is that it behaves like a float (`ln`, `exp`, `powf`). `f64` is the
//! workhorse; `f32` is supported for memory-constrained runs.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn ln_add<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Log-sum-exp of a slice; `-inf` for an empty slice.
pub fn ln_sum<T: Scalar>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() || max == T::infinity() {
        return max;
    }
    let s: T = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// `ln v` for a non-negative value, mapping 0 to `-inf`.
pub fn ln_of<T: Scalar>(v: T) -> T {
    if v == T::zero() {
        T::neg_infinity()
    } else {
        v.ln()
    }
}

/// `k * x` where `x` may be `-inf`; `0 * -inf` is treated as `0` (i.e. `0^0 = 1`).
pub fn ln_pow<T: Scalar>(x: T, k: T) -> T {
    if k == T::zero() {
        T::zero()
    } else {
        x * k
    }
}

/// Relative closeness check used throughout the oracles.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Closeness of two values given by their logarithms, in relative terms on the
/// linear scale.
pub fn ln_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs().exp_m1() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_sum_matches_direct() {
        let xs = [0.5f64.ln(), 1.5f64.ln(), 2.0f64.ln()];
        assert!((ln_sum(&xs).exp() - 4.0).abs() < 1e-12);
        assert_eq!(ln_sum::<f64>(&[]), f64::NEG_INFINITY);
        assert_eq!(ln_sum(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_add_handles_zero() {
        assert_eq!(ln_add(f64::NEG_INFINITY, 1.0), 1.0);
        assert!((ln_add(0.0f64, 0.0).exp() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_power_of_zero_is_one() {
        assert_eq!(ln_pow(f64::NEG_INFINITY, 0.0), 0.0);
        assert_eq!(ln_pow(f64::NEG_INFINITY, 2.0), f64::NEG_INFINITY);
    }

    #[test]
    fn f32_is_a_scalar() {
        let xs = [1.0f32.ln(), 3.0f32.ln()];
        assert!((ln_sum(&xs).exp() - 4.0).abs() < 1e-5);
    }
}
