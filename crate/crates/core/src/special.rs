//! Complex special functions: the Gamma function via the Lanczos
//! approximation (g = 7, 9 coefficients, the GSL set), with the reflection
//! formula for the left half-plane.

use crate::C64;

const G: f64 = 7.0;

// Lanczos coefficients (g = 7, n = 9), as in the GNU Scientific Library.
const P: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Complex Gamma function.
///
/// Relative accuracy is ~1e-13 away from the poles at 0, -1, -2, ...
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        let s = (C64::new(pi, 0.0) * z).sin();
        if s.norm() == 0.0 {
            return C64::new(f64::INFINITY, 0.0);
        }
        C64::new(pi, 0.0) / (s * gamma(C64::new(1.0, 0.0) - z))
    } else {
        let z = z - 1.0;
        let mut acc = C64::new(P[0], 0.0);
        for (i, &p) in P.iter().enumerate().skip(1) {
            acc += C64::new(p, 0.0) / (z + i as f64);
        }
        let t = z + G + 0.5;
        let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
        sqrt_two_pi * t.powc(z + 0.5) * (-t).exp() * acc
    }
}

/// True when z is within `eps` of a non-positive integer (a Gamma pole).
pub fn near_gamma_pole(z: C64, eps: f64) -> Option<u32> {
    if z.im.abs() > eps {
        return None;
    }
    let r = z.re.round();
    if r <= 0.0 && (z.re - r).abs() <= eps {
        Some((-r) as u32)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_values() {
        for (n, want) in [(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (4.0, 6.0), (5.0, 24.0)] {
            let g = gamma(C64::new(n, 0.0));
            assert!((g.re - want).abs() < 1e-10 * want, "Gamma({n}) = {g}");
            assert!(g.im.abs() < 1e-10);
        }
    }

    #[test]
    fn half_integer() {
        let g = gamma(C64::new(0.5, 0.0));
        assert!((g.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reflection_consistency() {
        // Gamma(z) Gamma(1-z) = pi / sin(pi z) at a generic complex point
        let z = C64::new(0.3, 0.7);
        let lhs = gamma(z) * gamma(C64::new(1.0, 0.0) - z);
        let pi = std::f64::consts::PI;
        let rhs = C64::new(pi, 0.0) / (C64::new(pi, 0.0) * z).sin();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn conjugate_symmetry() {
        let z = C64::new(1.3, -0.8);
        let a = gamma(z);
        let b = gamma(z.conj()).conj();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn pole_detection() {
        assert_eq!(near_gamma_pole(C64::new(0.0, 0.0), 1e-9), Some(0));
        assert_eq!(near_gamma_pole(C64::new(-3.0, 0.0), 1e-9), Some(3));
        assert_eq!(near_gamma_pole(C64::new(0.5, 0.0), 1e-9), None);
        assert_eq!(near_gamma_pole(C64::new(-1.0, 0.5), 1e-9), None);
    }
}
