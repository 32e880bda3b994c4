//! Automorphisms of the unit disk, `m_a(z) = (z + a) / (1 + conj(a) z)`,
//! restricted to the boundary circle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::wrap_angle;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskAutomorphism {
    a: Complex64,
}

impl DiskAutomorphism {
    pub fn new(a: Complex64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Möbius parameter must satisfy |a| < 1, got |a| = {}",
                a.norm()
            )));
        }
        Ok(Self { a })
    }

    pub fn parameter(&self) -> Complex64 {
        self.a
    }

    pub fn inverse(&self) -> Self {
        Self { a: -self.a }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z + self.a) / (Complex64::new(1.0, 0.0) + self.a.conj() * z)
    }

    /// Boundary angle map `θ ↦ arg m_a(e^{iθ})`, wrapped into `[0, 2π)`.
    pub fn map_angle(&self, theta: f64) -> f64 {
        wrap_angle(self.apply(Complex64::cis(theta)).arg())
    }

    /// `|m_a'(e^{iθ})| = (1 − |a|²) / |1 + conj(a) e^{iθ}|²`.
    pub fn boundary_derivative(&self, theta: f64) -> f64 {
        let denom = Complex64::new(1.0, 0.0) + self.a.conj() * Complex64::cis(theta);
        (1.0 - self.a.norm_sqr()) / denom.norm_sqr()
    }

    /// Angular displacement `arg m_a(e^{i(θ+δ)}) − arg m_a(e^{iθ})`, accurate
    /// to full relative precision in `δ` (no cancellation for tiny offsets).
    pub fn angle_increment(&self, theta: f64, delta: f64) -> f64 {
        let z = Complex64::cis(theta);
        // e^{iδ} − 1 without cancellation.
        let half = 0.5 * delta;
        let s = half.sin();
        let expm1 = Complex64::new(-2.0 * s * s, delta.sin());
        let one = Complex64::new(1.0, 0.0);
        let num = z * expm1 * (1.0 - self.a.norm_sqr());
        let den = (one + self.a.conj() * z * (one + expm1)) * (z + self.a);
        let rho = num / den;
        rho.im.atan2(1.0 + rho.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn rejects_parameters_outside_the_disk() {
        assert!(DiskAutomorphism::new(Complex64::new(1.0, 0.0)).is_err());
        assert!(DiskAutomorphism::new(Complex64::new(0.6, 0.8)).is_err());
        assert!(DiskAutomorphism::new(Complex64::new(0.6, 0.7)).is_ok());
    }

    #[test]
    fn inverse_undoes_the_map() {
        let m = DiskAutomorphism::new(Complex64::new(0.5, 0.2)).unwrap();
        for j in 0..16 {
            let theta = TAU * j as f64 / 16.0;
            let back = m.inverse().map_angle(m.map_angle(theta));
            let diff = (back - theta).rem_euclid(TAU);
            assert!(diff.min(TAU - diff) < 1e-13);
        }
    }

    #[test]
    fn increment_matches_finite_difference_and_tiny_offsets() {
        let m = DiskAutomorphism::new(Complex64::new(0.3, -0.4)).unwrap();
        let theta = 1.1;
        let d = 1e-3;
        let direct = (m.apply(Complex64::cis(theta + d)) / m.apply(Complex64::cis(theta))).arg();
        assert!((m.angle_increment(theta, d) - direct).abs() < 1e-15);
        let tiny = 1e-200;
        let inc = m.angle_increment(theta, tiny);
        let rel = inc / (tiny * m.boundary_derivative(theta));
        assert!((rel - 1.0).abs() < 1e-12);
    }
}
