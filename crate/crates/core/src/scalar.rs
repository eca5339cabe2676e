//! Scalar abstraction so the solver stack runs on `f32` or `f64`.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type underlying all vectors, matrices and tolerances.
///
/// `f64` is the default throughout the crate; `f32` is supported for
/// quick-and-dirty runs where memory or speed matters more than accuracy.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Lossy view of this scalar as `f64` (for serialization and display).
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl<T> Scalar for T where T: RealField + Copy + FromPrimitive + ToPrimitive {}

/// Convert an `f64` constant or sample into the scalar type.
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 must convert to scalar")
}

/// Complex number over the crate's scalar type.
pub type Cx<T> = Complex<T>;

/// Shorthand for a complex zero.
pub fn czero<T: Scalar>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

/// Modulus of a complex number over a generic scalar.
pub fn cnorm<T: Scalar>(z: Cx<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// `exp(-j 2 pi theta)` — the unit phasor every steering vector is built from.
pub fn unit_phasor<T: Scalar>(theta: T) -> Cx<T> {
    let ang = -T::two_pi() * theta;
    Complex::new(ang.cos(), ang.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phasor_quarter_turn() {
        let z = unit_phasor::<f64>(0.25);
        assert!((z.re).abs() < 1e-15);
        assert!((z.im + 1.0).abs() < 1e-15);
    }

    #[test]
    fn real_roundtrip_f32() {
        let x: f32 = real(0.5);
        assert_eq!(x, 0.5f32);
    }
}
