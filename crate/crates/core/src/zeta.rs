//! Tate zeta integrals by quadrature: the convention oracle for the
//! closed-form gamma factors, plus the oscillatory kernel-multiplier
//! integrals used to predict Mellin multipliers of convolution operators.

use crate::field::{AdditiveCharacter, MultiplicativeCharacter};
use crate::packet::GaussianWavePacket;
use crate::quad::{bump, Estimate, OscillatoryIntegrand, QuadratureSpec};
use crate::{C64, Error, Result};

/// Specification of one Tate zeta integral Z(s, chi, phi) with phi a 1-D
/// Gaussian wave packet.
#[derive(Debug, Clone)]
pub struct TateZetaSpec {
    pub packet: GaussianWavePacket,
    pub chi: MultiplicativeCharacter,
    pub s: C64,
    /// Base node count per unit log-length (the budget).
    pub nodes_per_unit: usize,
    /// Additive character fixing phases inside the packet.
    pub psi: AdditiveCharacter,
}

impl TateZetaSpec {
    pub fn new(packet: GaussianWavePacket, chi: MultiplicativeCharacter, s: C64, psi: AdditiveCharacter) -> Result<Self> {
        if packet.dim != 1 {
            return Err(Error::domain("Tate integral expects a one-variable packet"));
        }
        Ok(TateZetaSpec { packet, chi, s, nodes_per_unit: 600, psi })
    }
}

const JET_DEGREE: usize = 6;

/// Taylor coefficients of the packet at 0 up to JET_DEGREE, as complex
/// numbers: phi(x) = p(x) exp(-l (x-c)^2 + i h mu x).
fn taylor_jet(phi: &GaussianWavePacket, psi: &AdditiveCharacter) -> Vec<C64> {
    let l = phi.width.get(0, 0);
    let c = phi.center[0];
    let mu = phi.phase[0];
    let h = psi.hbar_eff();
    // exponent: -l c^2 + beta x - l x^2, beta = 2 l c + i h mu
    let beta = C64::new(2.0 * l * c, h * mu);
    let lead = C64::new(-l * c * c, 0.0).exp();
    // series of exp(beta x - l x^2)
    let mut series = vec![C64::new(0.0, 0.0); JET_DEGREE + 1];
    series[0] = C64::new(1.0, 0.0);
    let mut term = vec![C64::new(0.0, 0.0); JET_DEGREE + 1];
    term[0] = C64::new(1.0, 0.0);
    for k in 1..=JET_DEGREE {
        // term_k = term_{k-1} * (beta x - l x^2) / k
        let mut next = vec![C64::new(0.0, 0.0); JET_DEGREE + 1];
        for d in 0..JET_DEGREE {
            if term[d].norm() == 0.0 {
                continue;
            }
            if d + 1 <= JET_DEGREE {
                next[d + 1] += term[d] * beta / k as f64;
            }
            if d + 2 <= JET_DEGREE {
                next[d + 2] += term[d] * C64::new(-l, 0.0) / k as f64;
            }
        }
        term = next;
        for d in 0..=JET_DEGREE {
            series[d] += term[d];
        }
    }
    // multiply by polynomial amplitude
    let mut out = vec![C64::new(0.0, 0.0); JET_DEGREE + 1];
    for (idx, coef) in &phi.poly.terms {
        let d0 = idx[0] as usize;
        for d in 0..=JET_DEGREE.saturating_sub(d0) {
            out[d + d0] += *coef * series[d];
        }
    }
    for v in &mut out {
        *v *= lead;
    }
    out
}

fn jet_eval(jet: &[C64], x: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in jet.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn trapezoid_complex(f: impl Fn(f64) -> C64, lo: f64, hi: f64, n: usize) -> C64 {
    let h = (hi - lo) / n as f64;
    let mut acc = (f(lo) + f(hi)) * 0.5;
    for i in 1..n {
        acc += f(lo + i as f64 * h);
    }
    acc * h
}

/// Z(s, chi, phi) = int phi(x) chi(x) |x|^s d^x x with an absolute error
/// estimate. Analytic continuation outside the convergence strip is by
/// subtracting the Taylor jet of phi at 0 on |x| <= 1 and integrating the
/// jet terms in closed form; a pole of a jet term surfaces as Error::Pole.
pub fn tate_zeta_numeric(spec: &TateZetaSpec) -> Result<Estimate> {
    let phi = &spec.packet;
    if phi.is_zero() {
        return Ok(Estimate::exact(C64::new(0.0, 0.0)));
    }
    let w = spec.s + spec.chi.exponent;
    if w.re <= -(JET_DEGREE as f64) {
        return Err(Error::domain(format!(
            "Re(s+z) = {} below the continued strip (> -{JET_DEGREE})",
            w.re
        )));
    }
    let eps = spec.chi.parity;
    let jet = taylor_jet(phi, &spec.psi);

    // closed-form jet part over |x| <= 1
    let mut jet_part = C64::new(0.0, 0.0);
    for (k, &a) in jet.iter().enumerate() {
        let parity_factor = if (k as u8 + eps) % 2 == 0 { 2.0 } else { 0.0 };
        if parity_factor == 0.0 || a.norm() == 0.0 {
            continue;
        }
        let denom = w + k as f64;
        if denom.norm() < 1e-9 {
            return Err(Error::Pole { order: 1, location: format!("Tate integral at s+z = -{k}") });
        }
        jet_part += a * parity_factor / denom;
    }

    // remainder on |x| <= 1: t in [-t0, 0]
    let t0 = 10.0_f64.min(40.0 / (w.re + JET_DEGREE as f64 + 1.0).max(1.0)).max(4.0);
    // outer region: t in [0, t1]
    let l = phi.width.get(0, 0);
    let c = phi.center[0].abs();
    let x_max = c + (45.0 / l).sqrt();
    let t1 = x_max.ln().max(0.5) + 0.2;

    let integrand = |t: f64, sign: f64, subtract_jet: bool| -> C64 {
        let x = sign * t.exp();
        let mut v = phi.eval(&[x], &spec.psi);
        if subtract_jet {
            v -= jet_eval(&jet, x);
        }
        let sgn_f = if sign < 0.0 && eps == 1 { -1.0 } else { 1.0 };
        v * sgn_f * (w * t).exp()
    };

    let eval_all = |scale: usize| -> C64 {
        let n_in = (spec.nodes_per_unit as f64 * t0) as usize * scale;
        let n_out = (spec.nodes_per_unit as f64 * t1) as usize * scale;
        let mut acc = C64::new(0.0, 0.0);
        for sign in [1.0, -1.0] {
            acc += trapezoid_complex(|t| integrand(t, sign, true), -t0, 0.0, n_in.max(64));
            acc += trapezoid_complex(|t| integrand(t, sign, false), 0.0, t1, n_out.max(64));
        }
        acc
    };

    let v1 = eval_all(1);
    let v2 = eval_all(2);
    let err = (v2 - v1).norm() / 3.0;
    let value = v2 + (v2 - v1) / 3.0 + jet_part;
    Ok(Estimate { value, abs_error: err.max(1e-15 * value.norm()), converged: true })
}

/// Quadrature oracle for the gamma factor: the ratio
/// Z(1-s, chi^{-1}, F phi) / Z(s, chi, phi), with F the psi-Fourier transform.
pub fn gamma_via_zeta_oracle(
    chi: &MultiplicativeCharacter,
    s: C64,
    psi: &AdditiveCharacter,
    phi: &GaussianWavePacket,
) -> Result<C64> {
    let fhat = phi.fourier(psi)?;
    let z_num = tate_zeta_numeric(&TateZetaSpec::new(fhat, chi.inverse(), C64::new(1.0, 0.0) - s, *psi)?)?;
    let z_den = tate_zeta_numeric(&TateZetaSpec::new(phi.clone(), *chi, s, *psi)?)?;
    if z_den.value.norm() < 1e-12 {
        return Err(Error::Quadrature("oracle denominator vanished".into()));
    }
    Ok(z_num.value / z_den.value)
}

/// Oscillatory Mellin integral int |x|^{a} exp(i h x) chi_arg(x) d^x x,
/// evaluated with the smooth-cutoff stage machinery. This is the predicted
/// multiplier of a convolution kernel |x|^{a} e^{i h x} d^x x.
pub fn oscillatory_mellin(
    abs_exp: C64,
    hbar_eff: f64,
    chi_arg: &MultiplicativeCharacter,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let w = abs_exp + chi_arg.exponent;
    if w.re <= 0.0 {
        return Err(Error::domain("oscillatory Mellin needs Re(exponent sum) > 0"));
    }
    let eps = chi_arg.parity;
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for sign in [1.0f64, -1.0] {
        let sgn_f = if sign < 0.0 && eps == 1 { -1.0 } else { 1.0 };
        let amp = move |t: &[f64]| (w * t[0]).exp() * sgn_f;
        let ph = move |t: &[f64]| hbar_eff * sign * t[0].exp();
        let f = OscillatoryIntegrand { dim: 1, amplitude: &amp, phase: &ph };
        let e = crate::quad::oscillatory_integral(&f, q)?;
        total += e.value;
        err += e.abs_error;
    }
    Ok(Estimate { value: total, abs_error: err, converged: err <= q.tolerance })
}

/// Partial geometric Tate sums at a prime p with the characteristic function
/// of the integers as test vector: the independent oracle for the unramified
/// p-adic gamma factor. Inside the strip 0 < Re(s+z) < 1 both sums are
/// evaluated by direct partial summation; outside, the divergent side is
/// replaced by the closed geometric form, which is its Abel regularization.
pub fn padic_tate_ratio(p: u64, z: C64, s: C64, terms: usize) -> Result<C64> {
    let lp = (p as f64).ln();
    let w = s + z;
    let sum = |expo: C64| -> C64 {
        // sum_{k>=0} p^{-k expo}
        let r = (-expo * lp).exp();
        if r.norm() < 0.999 {
            let mut acc = C64::new(0.0, 0.0);
            let mut term = C64::new(1.0, 0.0);
            for _ in 0..terms {
                acc += term;
                term *= r;
            }
            acc
        } else {
            C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - r)
        }
    };
    let num = sum(C64::new(1.0, 0.0) - w); // Z(1-s, chi^{-1}, 1_Zp^)
    let den = sum(w); // Z(s, chi, 1_Zp)
    if den.norm() < 1e-14 {
        return Err(Error::Quadrature("p-adic oracle denominator vanished".into()));
    }
    Ok(num / den)
}

/// Smooth-cutoff weight in the log coordinate; exposed for grid convolutions.
pub fn log_bump(t: f64, r: f64, w: f64) -> f64 {
    bump(t, r, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma_real;
    use std::f64::consts::PI;

    fn psi() -> AdditiveCharacter {
        AdditiveCharacter::standard()
    }

    #[test]
    fn zeta_gaussian_at_one() {
        // int e^{-pi x^2} |x| d^x x = pi^{-1/2} Gamma(1/2) = 1
        let spec = TateZetaSpec::new(
            GaussianWavePacket::standard(1),
            MultiplicativeCharacter::trivial(),
            C64::new(1.0, 0.0),
            psi(),
        )
        .unwrap();
        let e = tate_zeta_numeric(&spec).unwrap();
        assert!((e.value - C64::new(1.0, 0.0)).norm() < 1e-9, "{:?}", e);
    }

    #[test]
    fn zeta_gaussian_at_two() {
        // int e^{-pi x^2} |x|^2 d^x x = pi^{-1} Gamma(1) = 1/pi
        let spec = TateZetaSpec::new(
            GaussianWavePacket::standard(1),
            MultiplicativeCharacter::trivial(),
            C64::new(2.0, 0.0),
            psi(),
        )
        .unwrap();
        let e = tate_zeta_numeric(&spec).unwrap();
        assert!((e.value - C64::new(1.0 / PI, 0.0)).norm() < 1e-9, "{:?}", e);
        assert!(e.value.re > 0.0);
    }

    #[test]
    fn zeta_zero_packet() {
        let spec = TateZetaSpec::new(
            GaussianWavePacket::zero(1),
            MultiplicativeCharacter::trivial(),
            C64::new(1.0, 0.0),
            psi(),
        )
        .unwrap();
        assert_eq!(tate_zeta_numeric(&spec).unwrap().value, C64::new(0.0, 0.0));
    }

    #[test]
    fn zeta_pole_flagged() {
        let spec = TateZetaSpec::new(
            GaussianWavePacket::standard(1),
            MultiplicativeCharacter::trivial(),
            C64::new(0.0, 0.0),
            psi(),
        )
        .unwrap();
        assert!(matches!(tate_zeta_numeric(&spec), Err(Error::Pole { .. })));
    }

    #[test]
    fn zeta_continuation_matches_gamma_functional_equation() {
        // at Re(w) < 0 the continued integral must still satisfy the
        // functional equation with the closed-form gamma factor
        let chi = MultiplicativeCharacter::new(0, C64::new(0.0, 0.6));
        let s = C64::new(-0.4, 0.3);
        let g_closed = gamma_real(&chi, s, &psi()).value().unwrap();
        let g_oracle = gamma_via_zeta_oracle(&chi, s, &psi(), &GaussianWavePacket::standard(1)).unwrap();
        assert!(
            (g_closed - g_oracle).norm() < 1e-6 * g_closed.norm(),
            "closed {g_closed} oracle {g_oracle}"
        );
    }

    #[test]
    fn oracle_pins_convention_even_and_odd() {
        let psi = psi();
        // even at a complex point
        let chi = MultiplicativeCharacter::new(0, C64::new(0.0, 0.7));
        let s = C64::new(0.5, 0.7);
        let closed = gamma_real(&chi, s, &psi).value().unwrap();
        let oracle = gamma_via_zeta_oracle(&chi, s, &psi, &GaussianWavePacket::standard(1)).unwrap();
        assert!((closed - oracle).norm() < 1e-6 * closed.norm());
        // odd with phi = x e^{-pi x^2}
        let chi = MultiplicativeCharacter::new(1, C64::new(0.0, 0.0));
        let s = C64::new(0.5, 0.0);
        let phi = GaussianWavePacket::new(
            1,
            crate::packet::Poly::coordinate(1, 0),
            crate::packet::Mat::scaled_identity(1, PI),
            vec![0.0],
            vec![0.0],
        )
        .unwrap();
        let closed = gamma_real(&chi, s, &psi).value().unwrap();
        let oracle = gamma_via_zeta_oracle(&chi, s, &psi, &phi).unwrap();
        assert!((closed - oracle).norm() < 1e-6, "closed {closed} oracle {oracle}");
    }

    #[test]
    fn nonstandard_psi_consistency() {
        // the oracle with a rescaled psi must match the closed form's
        // change-of-character reduction
        let psi4 = AdditiveCharacter::new(8.0 * PI, 1).unwrap(); // psi(4 .)
        let chi = MultiplicativeCharacter::new(0, C64::new(0.0, -0.4));
        let s = C64::new(0.5, 0.2);
        let closed = gamma_real(&chi, s, &psi4).value().unwrap();
        let oracle = gamma_via_zeta_oracle(&chi, s, &psi4, &GaussianWavePacket::standard(1)).unwrap();
        assert!((closed - oracle).norm() < 1e-6 * closed.norm(), "closed {closed} oracle {oracle}");
    }

    #[test]
    fn oscillatory_mellin_matches_gamma() {
        // int psi^{-1}(x) chi(x) |x|^{1/2} d^x x = gamma(chi^{-1}, 1/2, psi)
        let chi = MultiplicativeCharacter::unitary(0.8);
        let q = QuadratureSpec { radius: 4.0, width: 1.5, nodes_per_axis: 1400, tolerance: 1e-4, ..Default::default() };
        let m = oscillatory_mellin(C64::new(0.5, 0.0), -psi().hbar_eff(), &chi, &q).unwrap();
        let g = gamma_real(&chi.inverse(), C64::new(0.5, 0.0), &psi()).value().unwrap();
        assert!((m.value - g).norm() < 2e-4, "mult {:?} gamma {}", m, g);
    }

    #[test]
    fn padic_oracle_matches_closed_form() {
        use crate::gamma::gamma_padic_unramified;
        for (p, z, s) in [
            (2u64, C64::new(0.0, 0.0), C64::new(2.0, 0.0)),
            (2, C64::new(0.0, 0.0), C64::new(0.5, 0.0)),
            (3, C64::new(0.1, 0.2), C64::new(0.4, 0.9)),
            (5, C64::new(0.0, -0.7), C64::new(0.3, 0.0)),
        ] {
            let closed = gamma_padic_unramified(p, z, s).value().unwrap();
            let oracle = padic_tate_ratio(p, z, s, 4000).unwrap();
            assert!((closed - oracle).norm() < 1e-9, "p={p} closed {closed} oracle {oracle}");
        }
    }
}
