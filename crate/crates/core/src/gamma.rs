//! Formal products of abelian local gamma factors: closed-form evaluation,
//! the change-of-character covariance, and cancellation of inverse pairs.
//!
//! The closed form is pinned operationally: for the standard character
//! psi(x) = exp(2 pi i x) with Lebesgue (self-dual) measure and a character
//! chi = sgn^eps |.|^z, the factor defined by
//!     Z(1-s, chi^{-1}, F phi) = gamma(chi, s, psi) Z(s, chi, phi)
//! evaluates to
//!     even:  pi^{w - 1/2} Gamma((1-w)/2) / Gamma(w/2),        w = s + z,
//!     odd:  -i pi^{w - 1/2} Gamma(1 - w/2) / Gamma((1+w)/2),
//! which the quadrature oracle in `zeta` confirms. A general psi is reduced
//! to the standard one through gamma(chi, s, psi(a.)) = chi(a)|a|^{s-1/2}
//! gamma(chi, s, psi).

use crate::field::{AdditiveCharacter, MultiplicativeCharacter};
use crate::special::{gamma as cgamma, near_gamma_pole};
use crate::{C64, Error, Rat, Result};
use num_traits::Zero;
use std::f64::consts::PI;

const POLE_EPS: f64 = 1e-9;

/// Outcome of a closed-form gamma evaluation: either a value or a pole flag
/// carrying the order, so grid sweeps can skip poles without unwinding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaValue {
    Value(C64),
    Pole { order: u32 },
}

impl GammaValue {
    pub fn value(self) -> Result<C64> {
        match self {
            GammaValue::Value(v) => Ok(v),
            GammaValue::Pole { order } => Err(Error::Pole { order, location: "gamma factor".into() }),
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, GammaValue::Pole { .. })
    }
}

/// Real-place gamma factor gamma(chi, s, psi) in closed form.
pub fn gamma_real(chi: &MultiplicativeCharacter, s: C64, psi: &AdditiveCharacter) -> GammaValue {
    let w = s + chi.exponent;
    let half = C64::new(0.5, 0.0);
    let one = C64::new(1.0, 0.0);
    let base = if chi.is_even() {
        // pi^{w-1/2} Gamma((1-w)/2) / Gamma(w/2)
        let num_arg = (one - w) * half;
        let den_arg = w * half;
        if let Some(k) = near_gamma_pole(num_arg, POLE_EPS) {
            let _ = k;
            return GammaValue::Pole { order: 1 };
        }
        let mut v = cgamma(num_arg) / cgamma(den_arg);
        v *= C64::new(PI, 0.0).powc(w - half);
        v
    } else {
        // -i pi^{w-1/2} Gamma(1-w/2) / Gamma((1+w)/2)
        let num_arg = one - w * half;
        let den_arg = (one + w) * half;
        if near_gamma_pole(num_arg, POLE_EPS).is_some() {
            return GammaValue::Pole { order: 1 };
        }
        let mut v = cgamma(num_arg) / cgamma(den_arg);
        v *= C64::new(PI, 0.0).powc(w - half);
        v * C64::new(0.0, -1.0)
    };
    // reduce psi = exp(i hbar_eff x) to the standard exp(2 pi i x):
    // psi = psi_std(c .) with c = hbar_eff / 2 pi.
    let c = psi.hbar_eff() / (2.0 * PI);
    let mut v = base;
    if (c - 1.0).abs() > 0.0 {
        let chi_c = match chi.eval(c) {
            Ok(x) => x,
            Err(_) => return GammaValue::Pole { order: 0 },
        };
        v *= chi_c * (C64::new(c.abs().ln(), 0.0) * (s - half)).exp();
    }
    GammaValue::Value(v)
}

/// Unramified p-adic gamma factor for chi = |.|_p^z, psi of conductor zero:
/// L(chi^{-1}, 1-s) / L(chi, s) with L(|.|^z, s) = (1 - p^{-(s+z)})^{-1}.
pub fn gamma_padic_unramified(p: u64, z: C64, s: C64) -> GammaValue {
    let lp = (p as f64).ln();
    let w = s + z;
    // gamma = (1 - p^{-w}) / (1 - p^{w-1})
    let num = C64::new(1.0, 0.0) - (-w * lp).exp();
    let den = C64::new(1.0, 0.0) - ((w - 1.0) * lp).exp();
    if den.norm() < POLE_EPS {
        return GammaValue::Pole { order: 1 };
    }
    GammaValue::Value(num / den)
}

/// One formal gamma-factor atom gamma(chi o lambda, s, psi^sign), where
/// lambda is a rational cocharacter recorded by its coefficients against the
/// (at most two) coordinates of the torus, and the contained psi may carry a
/// rescale factor from the change-of-character formula.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaAtom {
    /// Cocharacter coefficients against the torus coordinates. Rank-one
    /// products use only the first entry; the GL_2-torus variant uses both.
    pub coeff: [Rat; 2],
    /// Spectral shift s.
    pub shift: C64,
    /// +1 for psi, -1 for psi^{-1}.
    pub psi_sign: i8,
    /// Rescale factor a in psi(a .); 1 when untouched.
    pub psi_scale: f64,
}

impl GammaAtom {
    pub fn new(coeff: Rat, shift: C64, psi_sign: i8) -> Self {
        GammaAtom { coeff: [coeff, Rat::zero()], shift, psi_sign, psi_scale: 1.0 }
    }

    pub fn new2(c1: Rat, c2: Rat, shift: C64, psi_sign: i8) -> Self {
        GammaAtom { coeff: [c1, c2], shift, psi_sign, psi_scale: 1.0 }
    }

    /// The character chi o lambda for spectral parameters chi = (chi_1[, chi_2]).
    /// Refused when a non-integral coefficient meets an odd character.
    pub fn effective_character(&self, chi: &[MultiplicativeCharacter]) -> Result<MultiplicativeCharacter> {
        let mut parity: i64 = 0;
        let mut exponent = C64::new(0.0, 0.0);
        for (k, c) in self.coeff.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let comp = chi.get(k).ok_or_else(|| {
                Error::domain(format!("atom references torus coordinate {k} but only {} spectral characters given", chi.len()))
            })?;
            if !c.is_integer() && comp.parity == 1 {
                return Err(Error::refused(
                    "half-integral cocharacter coefficient applied to an odd character",
                ));
            }
            if c.is_integer() {
                parity += c.to_integer() * comp.parity as i64;
            }
            let cf = *c.numer() as f64 / *c.denom() as f64;
            exponent += comp.exponent * cf;
        }
        Ok(MultiplicativeCharacter::new((parity.rem_euclid(2)) as u8, exponent))
    }

    /// Closed-form value at spectral parameters chi and base character psi,
    /// honoring the atom's psi-sign and scale marking.
    pub fn eval(&self, chi: &[MultiplicativeCharacter], psi: &AdditiveCharacter) -> Result<GammaValue> {
        let eff = self.effective_character(chi)?;
        let mut p = *psi;
        if self.psi_sign < 0 {
            p = p.inverse();
        }
        if self.psi_scale != 1.0 {
            p = p.rescale(self.psi_scale)?;
        }
        Ok(gamma_real(&eff, self.shift, &p))
    }

    /// Value with the scale marking ignored: the product evaluator carries
    /// the scale content in its prefactor terms instead (the two encode the
    /// same change-of-character formula and must not both apply).
    fn eval_unscaled(&self, chi: &[MultiplicativeCharacter], psi: &AdditiveCharacter) -> Result<GammaValue> {
        let eff = self.effective_character(chi)?;
        let p = if self.psi_sign < 0 { psi.inverse() } else { *psi };
        Ok(gamma_real(&eff, self.shift, &p))
    }

    /// The formally inverse atom under gamma(chi,s,psi) gamma(chi^{-1},1-s,psi^{-1}) = 1.
    fn is_inverse_pair(&self, other: &Self) -> bool {
        self.coeff[0] == -other.coeff[0]
            && self.coeff[1] == -other.coeff[1]
            && (self.shift + other.shift - C64::new(1.0, 0.0)).norm() < 1e-12
            && self.psi_sign == -other.psi_sign
            && (self.psi_scale - other.psi_scale).abs() < 1e-15
    }
}

/// A symbolic prefactor monomial chi(base)^{chi_coeff} |base|^{abs_exp}
/// accumulated by psi-rescaling; evaluated once spectral parameters are known.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefactorTerm {
    pub base: f64,
    pub chi_coeff: [Rat; 2],
    pub abs_exp: C64,
}

/// A formal multiset of gamma atoms with a scalar (possibly symbolic) prefactor.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProduct {
    pub atoms: Vec<GammaAtom>,
    pub scalar: C64,
    pub prefactor_terms: Vec<PrefactorTerm>,
}

impl GammaProduct {
    /// The empty product: the multiplicative identity.
    pub fn one() -> Self {
        GammaProduct { atoms: Vec::new(), scalar: C64::new(1.0, 0.0), prefactor_terms: Vec::new() }
    }

    pub fn from_atoms(atoms: Vec<GammaAtom>) -> Self {
        GammaProduct { atoms, scalar: C64::new(1.0, 0.0), prefactor_terms: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.atoms.is_empty()
            && (self.scalar - C64::new(1.0, 0.0)).norm() < 1e-15
            && self.prefactor_terms.is_empty()
    }

    /// Evaluate the whole product at spectral parameters chi and base psi.
    /// A pole in any atom surfaces as a pole flag. Atom scale markings are
    /// not applied here: for products built by `rescale_psi` the rescaling
    /// content lives in the prefactor terms, and the marked product equals
    /// the original formula read at the rescaled character.
    pub fn eval(&self, chi: &[MultiplicativeCharacter], psi: &AdditiveCharacter) -> Result<GammaValue> {
        let mut acc = self.scalar;
        for term in &self.prefactor_terms {
            acc *= eval_prefactor_term(term, chi)?;
        }
        for atom in &self.atoms {
            match atom.eval_unscaled(chi, psi)? {
                GammaValue::Value(v) => acc *= v,
                GammaValue::Pole { order } => return Ok(GammaValue::Pole { order }),
            }
        }
        Ok(GammaValue::Value(acc))
    }

    /// Numeric prefactor at concrete spectral parameters (scalar times the
    /// accumulated rescale monomials).
    pub fn prefactor_value(&self, chi: &[MultiplicativeCharacter]) -> Result<C64> {
        let mut acc = self.scalar;
        for term in &self.prefactor_terms {
            acc *= eval_prefactor_term(term, chi)?;
        }
        Ok(acc)
    }

    /// Replace psi by psi(a .) in every atom; the prefactor picks up
    /// chi_atom(a) |a|^{s_atom - 1/2} per atom.
    pub fn rescale_psi(&self, a: f64) -> Result<GammaProduct> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::domain("psi rescale factor must be nonzero"));
        }
        let mut out = self.clone();
        if a == 1.0 {
            return Ok(out);
        }
        let mut chi_coeff = [Rat::zero(), Rat::zero()];
        let mut abs_exp = C64::new(0.0, 0.0);
        for atom in &mut out.atoms {
            chi_coeff[0] += atom.coeff[0];
            chi_coeff[1] += atom.coeff[1];
            abs_exp += atom.shift - 0.5;
            atom.psi_scale *= a;
        }
        out.prefactor_terms.push(PrefactorTerm { base: a, chi_coeff, abs_exp });
        Ok(out)
    }

    /// Cancel inverse pairs under gamma(chi,s,psi) gamma(chi^{-1},1-s,psi^{-1}) = 1.
    /// No-op on irreducible products; the result evaluates identically wherever
    /// both are pole-free.
    pub fn simplify(&self) -> GammaProduct {
        let mut atoms: Vec<Option<GammaAtom>> = self.atoms.iter().cloned().map(Some).collect();
        for i in 0..atoms.len() {
            if atoms[i].is_none() {
                continue;
            }
            for j in i + 1..atoms.len() {
                if atoms[j].is_none() {
                    continue;
                }
                let cancel = {
                    let ai = atoms[i].as_ref().unwrap();
                    let aj = atoms[j].as_ref().unwrap();
                    ai.is_inverse_pair(aj)
                };
                if cancel {
                    atoms[i] = None;
                    atoms[j] = None;
                    break;
                }
            }
        }
        GammaProduct {
            atoms: atoms.into_iter().flatten().collect(),
            scalar: self.scalar,
            prefactor_terms: self.prefactor_terms.clone(),
        }
    }
}

fn eval_prefactor_term(term: &PrefactorTerm, chi: &[MultiplicativeCharacter]) -> Result<C64> {
    let mut acc = (term.abs_exp * term.base.abs().ln()).exp();
    for (k, c) in term.chi_coeff.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let comp = chi
            .get(k)
            .ok_or_else(|| Error::domain("prefactor references missing spectral character"))?;
        if !c.is_integer() && comp.parity == 1 && term.base < 0.0 {
            return Err(Error::refused(
                "prefactor needs a half-integral power of an odd character at a negative base",
            ));
        }
        let cf = *c.numer() as f64 / *c.denom() as f64;
        // sgn part
        if comp.parity == 1 && term.base < 0.0 && c.is_integer() {
            if c.to_integer().abs() % 2 == 1 {
                acc = -acc;
            }
        }
        acc *= (comp.exponent * cf * term.base.abs().ln()).exp();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_psi() -> AdditiveCharacter {
        AdditiveCharacter::standard()
    }

    #[test]
    fn even_trivial_half() {
        // the Gaussian e^{-pi x^2} is Fourier-self-dual, so gamma = 1 at s = 1/2
        let chi = MultiplicativeCharacter::trivial();
        let g = gamma_real(&chi, C64::new(0.5, 0.0), &std_psi()).value().unwrap();
        assert!((g - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn odd_half_is_minus_i() {
        let chi = MultiplicativeCharacter::new(1, C64::new(0.0, 0.0));
        let g = gamma_real(&chi, C64::new(0.5, 0.0), &std_psi()).value().unwrap();
        assert!((g - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn inversion_identity() {
        // gamma(chi,s,psi) gamma(chi^{-1},1-s,psi^{-1}) = 1
        let psi = std_psi();
        for (eps, z, s) in [
            (0u8, C64::new(0.3, 0.0), C64::new(0.6, 0.0)),
            (1, C64::new(0.2, 0.0), C64::new(0.8, 0.0)),
            (0, C64::new(0.0, 0.4), C64::new(0.5, 0.7)),
            (1, C64::new(-0.1, 0.3), C64::new(0.4, -0.2)),
        ] {
            let chi = MultiplicativeCharacter::new(eps, z);
            let g1 = gamma_real(&chi, s, &psi).value().unwrap();
            let g2 = gamma_real(&chi.inverse(), C64::new(1.0, 0.0) - s, &psi.inverse())
                .value()
                .unwrap();
            assert!((g1 * g2 - C64::new(1.0, 0.0)).norm() < 1e-10, "eps={eps} z={z} s={s}");
        }
    }

    #[test]
    fn unitary_on_critical_line() {
        let psi = std_psi();
        for (eps, t, u) in [(0u8, 0.7, 0.9), (1, -1.3, 0.2), (0, 2.1, -1.7)] {
            let chi = MultiplicativeCharacter::new(eps, C64::new(0.0, t));
            let g = gamma_real(&chi, C64::new(0.5, u), &psi).value().unwrap();
            assert!((g.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pole_flags() {
        // even case has poles at w = 1 + 2k
        let chi = MultiplicativeCharacter::trivial();
        assert!(gamma_real(&chi, C64::new(1.0, 0.0), &std_psi()).is_pole());
        assert!(gamma_real(&chi, C64::new(3.0, 0.0), &std_psi()).is_pole());
        // odd case at w = 2 + 2k
        let sgn = MultiplicativeCharacter::new(1, C64::new(0.0, 0.0));
        assert!(gamma_real(&sgn, C64::new(2.0, 0.0), &std_psi()).is_pole());
        assert!(!gamma_real(&sgn, C64::new(1.0, 0.0), &std_psi()).is_pole());
    }

    #[test]
    fn padic_examples() {
        // (1 - 2^{-2}) / (1 - 2^{2-1}) = (3/4) / (-1) = -0.75
        let g = gamma_padic_unramified(2, C64::new(0.0, 0.0), C64::new(2.0, 0.0))
            .value()
            .unwrap();
        assert!((g - C64::new(-0.75, 0.0)).norm() < 1e-14);
        // modulus 1 on the critical line
        for t in [0.3, -1.1, 2.7] {
            let g = gamma_padic_unramified(3, C64::new(0.0, 0.0), C64::new(0.5, t))
                .value()
                .unwrap();
            assert!((g.norm() - 1.0).abs() < 1e-13);
        }
        // at s = 1/2 real and self-inverse-conjugate
        let g = gamma_padic_unramified(2, C64::new(0.0, 0.0), C64::new(0.5, 0.0))
            .value()
            .unwrap();
        assert!(g.im.abs() < 1e-14);
        assert!((g * g.conj() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn padic_inversion() {
        for (p, z, s) in [
            (2u64, C64::new(0.0, 0.0), C64::new(2.0, 0.0)),
            (5, C64::new(0.2, 0.3), C64::new(0.4, -0.8)),
        ] {
            let g1 = gamma_padic_unramified(p, z, s).value().unwrap();
            let g2 = gamma_padic_unramified(p, -z, C64::new(1.0, 0.0) - s).value().unwrap();
            assert!((g1 * g2 - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn rescale_identity_and_roundtrip() {
        let prod = GammaProduct::from_atoms(vec![
            GammaAtom::new(Rat::new(1, 2), C64::new(0.5, 0.0), -1),
            GammaAtom::new(Rat::new(-1, 1), C64::new(0.0, 0.0), 1),
        ]);
        let same = prod.rescale_psi(1.0).unwrap();
        assert_eq!(prod, same);
        let there = prod.rescale_psi(3.0).unwrap();
        let back = there.rescale_psi(1.0 / 3.0).unwrap();
        let chi = [MultiplicativeCharacter::unitary(0.7)];
        let p0 = prod.prefactor_value(&chi).unwrap();
        let p1 = back.prefactor_value(&chi).unwrap();
        assert!((p0 - p1).norm() < 1e-12);
        for (a, b) in prod.atoms.iter().zip(back.atoms.iter()) {
            assert!((a.psi_scale - b.psi_scale).abs() < 1e-12);
        }
    }

    #[test]
    fn rescale_single_trivial_atom() {
        // gamma(trivial, s, psi), a = 4: prefactor 4^{s-1/2}
        let s = C64::new(0.8, 0.3);
        let prod = GammaProduct::from_atoms(vec![GammaAtom::new(Rat::zero(), s, 1)]);
        let r = prod.rescale_psi(4.0).unwrap();
        let chi = [MultiplicativeCharacter::trivial()];
        let pf = r.prefactor_value(&chi).unwrap();
        let want = (C64::new(4.0f64.ln(), 0.0) * (s - 0.5)).exp();
        assert!((pf - want).norm() < 1e-12);
        // and the atom now carries psi(4 .), consistent with direct closed form
        let psi = std_psi();
        let v_re = r.eval(&chi, &psi).unwrap().value().unwrap();
        let direct = gamma_real(&MultiplicativeCharacter::trivial(), s, &psi.rescale(4.0).unwrap())
            .value()
            .unwrap();
        assert!((v_re - direct).norm() < 1e-11 * direct.norm());
    }

    #[test]
    fn simplify_inverse_pair() {
        let s = C64::new(0.3, 0.4);
        let prod = GammaProduct::from_atoms(vec![
            GammaAtom::new(Rat::new(1, 2), s, 1),
            GammaAtom::new(Rat::new(-1, 2), C64::new(1.0, 0.0) - s, -1),
        ]);
        let simp = prod.simplify();
        assert!(simp.is_identity());
        // empty product simplifies to itself
        assert!(GammaProduct::one().simplify().is_identity());
    }

    #[test]
    fn simplify_preserves_value() {
        let s = C64::new(0.3, 0.4);
        let prod = GammaProduct::from_atoms(vec![
            GammaAtom::new(Rat::new(1, 2), C64::new(1.0, 0.0), -1),
            GammaAtom::new(Rat::new(1, 2), C64::new(0.0, 0.0), 1),
            GammaAtom::new(Rat::new(-1, 1), C64::new(0.0, 0.0), 1),
            GammaAtom::new(Rat::new(1, 2), C64::new(0.0, 0.0), -1),
            GammaAtom::new(Rat::new(-1, 2), C64::new(0.0, 0.0), 1),
            GammaAtom::new(Rat::new(1, 4), s, 1),
        ]);
        let simp = prod.simplify();
        assert_eq!(simp.atoms.len(), prod.atoms.len() - 2);
        let psi = std_psi();
        for t in [0.31, -0.9, 1.7, 2.4] {
            let chi = [MultiplicativeCharacter::unitary(t)];
            let a = prod.eval(&chi, &psi).unwrap().value().unwrap();
            let b = simp.eval(&chi, &psi).unwrap().value().unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        }
    }

    #[test]
    fn refuses_half_coefficient_on_odd_character() {
        let atom = GammaAtom::new(Rat::new(1, 2), C64::new(0.5, 0.0), 1);
        let odd = [MultiplicativeCharacter::new(1, C64::new(0.0, 0.3))];
        assert!(atom.eval(&odd, &std_psi()).is_err());
    }
}
