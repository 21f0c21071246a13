//! Real local-field conventions: additive characters with their self-dual
//! measures, multiplicative characters, and the Borel modular character.
//!
//! The default additive character is psi(x) = exp(2 pi i x), whose self-dual
//! measure is Lebesgue measure; every constant downstream is pinned by this
//! choice. A configurable hbar exists to exercise the change-of-character
//! covariance.

use crate::{C64, Error, Result};
use std::f64::consts::PI;

/// The additive character psi(x) = exp(i * sign * hbar * x) of the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditiveCharacter {
    hbar: f64,
    sign: i8,
}

impl Default for AdditiveCharacter {
    fn default() -> Self {
        AdditiveCharacter { hbar: 2.0 * PI, sign: 1 }
    }
}

impl AdditiveCharacter {
    pub fn new(hbar: f64, sign: i8) -> Result<Self> {
        if hbar == 0.0 || !hbar.is_finite() {
            return Err(Error::domain("additive character requires hbar != 0"));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::domain("additive character sign must be +1 or -1"));
        }
        Ok(AdditiveCharacter { hbar, sign })
    }

    /// The standard character exp(2 pi i x).
    pub fn standard() -> Self {
        Self::default()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Effective frequency: psi(x) = exp(i * hbar_eff * x).
    pub fn hbar_eff(&self) -> f64 {
        self.sign as f64 * self.hbar
    }

    /// psi(x).
    pub fn eval(&self, x: f64) -> C64 {
        let t = self.hbar_eff() * x;
        C64::new(t.cos(), t.sin())
    }

    /// The inverse character psi^{-1}.
    pub fn inverse(&self) -> Self {
        AdditiveCharacter { hbar: self.hbar, sign: -self.sign }
    }

    /// The rescaled character x -> psi(a x).
    pub fn rescale(&self, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::domain("psi rescale factor must be nonzero"));
        }
        let h = self.hbar * a;
        Ok(AdditiveCharacter { hbar: h.abs(), sign: if h * self.sign as f64 >= 0.0 { self.sign } else { -self.sign } })
    }

    /// Scale factor of the self-dual measure against Lebesgue measure:
    /// sqrt(|hbar| / 2 pi). Fourier inversion with this measure is exact.
    pub fn self_dual_measure_factor(&self) -> f64 {
        (self.hbar.abs() / (2.0 * PI)).sqrt()
    }
}

/// A character of the nonzero reals, chi(x) = sgn(x)^parity |x|^exponent,
/// or its unramified p-adic counterpart |x|_p^exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicativeCharacter {
    pub parity: u8,
    pub exponent: C64,
}

impl MultiplicativeCharacter {
    pub fn new(parity: u8, exponent: C64) -> Self {
        MultiplicativeCharacter { parity: parity % 2, exponent }
    }

    pub fn trivial() -> Self {
        MultiplicativeCharacter { parity: 0, exponent: C64::new(0.0, 0.0) }
    }

    /// Even unitary character |x|^{it}.
    pub fn unitary(t: f64) -> Self {
        MultiplicativeCharacter { parity: 0, exponent: C64::new(0.0, t) }
    }

    pub fn is_even(&self) -> bool {
        self.parity == 0
    }

    /// Unitary exactly when Re(exponent) = 0.
    pub fn is_unitary(&self) -> bool {
        self.exponent.re == 0.0
    }

    pub fn inverse(&self) -> Self {
        MultiplicativeCharacter { parity: self.parity, exponent: -self.exponent }
    }

    /// chi(x) = sgn(x)^parity |x|^exponent for x != 0.
    pub fn eval(&self, x: f64) -> Result<C64> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::domain("multiplicative character evaluated at 0"));
        }
        let sgn = if x < 0.0 && self.parity == 1 { -1.0 } else { 1.0 };
        let l = x.abs().ln();
        Ok((self.exponent * l).exp() * sgn)
    }
}

/// Modular character of the upper-triangular Borel of GL_n at a diagonal
/// torus point: prod_{i<j} |a_i / a_j|.
pub fn modular_character_gln(a: &[f64]) -> Result<f64> {
    let mut out = 1.0;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 || !ai.is_finite() {
            return Err(Error::domain("torus point with a zero entry"));
        }
        for &aj in &a[i + 1..] {
            if aj == 0.0 || !aj.is_finite() {
                return Err(Error::domain("torus point with a zero entry"));
            }
            out *= (ai / aj).abs();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_identities() {
        let psi = AdditiveCharacter::standard();
        assert!((psi.eval(0.0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((psi.eval(0.25) - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((psi.inverse().eval(0.25) - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((psi.self_dual_measure_factor() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn additive_modulus_one() {
        let psi = AdditiveCharacter::new(3.7, -1).unwrap();
        for &x in &[0.1, -2.3, 17.0] {
            assert!((psi.eval(x).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rescale_composes() {
        let psi = AdditiveCharacter::standard();
        let p4 = psi.rescale(4.0).unwrap();
        assert!((p4.hbar_eff() - 8.0 * PI).abs() < 1e-12);
        let back = p4.rescale(0.25).unwrap();
        assert!((back.hbar_eff() - psi.hbar_eff()).abs() < 1e-12);
        let neg = psi.rescale(-1.0).unwrap();
        assert_eq!(neg.sign(), -1);
    }

    #[test]
    fn mult_examples() {
        let triv = MultiplicativeCharacter::new(0, C64::new(0.0, 0.0));
        assert!((triv.eval(-3.0).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        let sgn = MultiplicativeCharacter::new(1, C64::new(0.0, 0.0));
        assert!((sgn.eval(-3.0).unwrap() - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let sq = MultiplicativeCharacter::new(0, C64::new(2.0, 0.0));
        assert!((sq.eval(-3.0).unwrap() - C64::new(9.0, 0.0)).norm() < 1e-12);
        assert!(MultiplicativeCharacter::trivial().eval(0.0).is_err());
    }

    #[test]
    fn unitary_modulus() {
        let chi = MultiplicativeCharacter::new(1, C64::new(0.0, 1.3));
        for &x in &[0.2, -0.7, 5.0, -11.0] {
            assert!((chi.eval(x).unwrap().norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_cancels() {
        let chi = MultiplicativeCharacter::new(1, C64::new(0.4, -0.9));
        for &x in &[0.2, -0.7, 5.0] {
            let p = chi.eval(x).unwrap() * chi.inverse().eval(x).unwrap();
            assert!((p - C64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn modular_character_values() {
        assert!((modular_character_gln(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((modular_character_gln(&[4.0, 1.0]).unwrap() - 4.0).abs() < 1e-15);
        assert!((modular_character_gln(&[2.0, 1.0, 0.5]).unwrap() - 16.0).abs() < 1e-12);
        assert!(modular_character_gln(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn modular_reversal_inverts() {
        let a = [2.0, -0.3, 1.7, 0.9];
        let mut rev = a;
        rev.reverse();
        let p = modular_character_gln(&a).unwrap() * modular_character_gln(&rev).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }
}
