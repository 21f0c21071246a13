//! Transfer operators between Kuznetsov and rank-one test data, as numerical
//! multiplicative convolutions on the quotient-line coordinate, and the
//! Tate-integral predictions of their Mellin multipliers.

use crate::cases::{DualType, RankOneCase};
use crate::field::{AdditiveCharacter, MultiplicativeCharacter};
use crate::grid::TorusHalfDensity;
use crate::mellin::{convolve_axis, ConvOrientation, MultKernel};
use crate::quad::{Estimate, QuadratureSpec};
use crate::zeta::oscillatory_mellin;
use crate::{C64, Error, Rat, Result};

fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Kernel densities of the transfer operator against additive measure:
/// |x|^{1/2 - s_i} psi(x) dx (SL2 dual) or |x|^{1 - s_0} psi(x) dx (PGL2).
pub fn transfer_kernels(case: &RankOneCase, psi: &AdditiveCharacter) -> Vec<MultKernel> {
    match case.dual {
        DualType::Sl2 { s1, s2 } => vec![
            MultKernel::transfer(C64::new(0.5 - rat_f64(s1), 0.0), psi),
            MultKernel::transfer(C64::new(0.5 - rat_f64(s2), 0.0), psi),
        ],
        DualType::Pgl2 { s0 } => vec![MultKernel::transfer(C64::new(1.0 - rat_f64(s0), 0.0), psi)],
    }
}

/// The power of the quotient coordinate multiplying the convolved data:
/// |xi|^{s1 - 1/2} or |zeta|^{s0 - 1}.
pub fn transfer_power(case: &RankOneCase) -> f64 {
    match case.dual {
        DualType::Sl2 { s1, .. } => rat_f64(s1) - 0.5,
        DualType::Pgl2 { s0 } => rat_f64(s0) - 1.0,
    }
}

/// Apply the transfer operator to a sampled density on the quotient line:
/// convolve with the case kernels (innermost kernel first), then multiply by
/// the coordinate power. Returns the result and the worst per-node error
/// estimate from the convolution stages.
pub fn transfer_apply(
    case: &RankOneCase,
    f: &TorusHalfDensity,
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
) -> Result<(TorusHalfDensity, f64)> {
    if f.dim() != 1 {
        return Err(Error::domain("transfer operator expects a one-axis density"));
    }
    let kernels = transfer_kernels(case, psi);
    let mut data = f.clone();
    let mut worst: f64 = 0.0;
    for k in kernels.iter().rev() {
        let (next, err) = convolve_axis(&data, 0, k, ConvOrientation::OutOverArg, None, q)?;
        data = next;
        worst = worst.max(err);
    }
    let p = transfer_power(case);
    if p != 0.0 {
        let axis = data.axes[0];
        for (i, v) in data.data.iter_mut().enumerate() {
            let x = axis.node_value(i);
            *v *= x.abs().powf(p);
        }
    }
    Ok((data, worst))
}

/// Predicted Mellin multiplier of a single transfer kernel at chi,
/// by the oscillatory Tate integral int k(x) chi^{-1}(x) d^x x.
pub fn kernel_multiplier_prediction(
    kernel: &MultKernel,
    chi: &MultiplicativeCharacter,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    oscillatory_mellin(kernel.abs_exp, kernel.hbar_eff, &chi.inverse(), q)
}

/// The shifted character chi |.|^{-power} at which the input Mellin data is
/// read when measuring the multiplier of the full operator.
pub fn shifted_character(case: &RankOneCase, chi: &MultiplicativeCharacter) -> MultiplicativeCharacter {
    MultiplicativeCharacter::new(chi.parity, chi.exponent - C64::new(transfer_power(case), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::{builtin_case_table, find_case};
    use crate::grid::{mellin_numeric, AxisSpec};

    fn psi() -> AdditiveCharacter {
        AdditiveCharacter::standard()
    }

    fn log_gaussian(radius: f64, count: usize) -> TorusHalfDensity {
        TorusHalfDensity::from_fn(vec![AxisSpec::new(radius, count).unwrap()], |x| {
            let t = x[0].abs().ln();
            C64::new((-1.5 * t * t).exp(), 0.0)
        })
    }

    #[test]
    fn zero_maps_to_zero() {
        let table = builtin_case_table();
        let case = find_case(&table, "D2").unwrap();
        let f = TorusHalfDensity::zeros(vec![AxisSpec::new(4.0, 64).unwrap()]);
        let q = QuadratureSpec { radius: 1.0, width: 0.5, ..Default::default() };
        let (g, _) = transfer_apply(case, &f, &psi(), &q).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn a1_convolutions_commute() {
        // s1 = s2 for A1, so the two kernels are identical and the order swap
        // reproduces the same values
        let table = builtin_case_table();
        let case = find_case(&table, "A1").unwrap();
        let kernels = transfer_kernels(case, &psi());
        assert_eq!(kernels.len(), 2);
        assert!((kernels[0].abs_exp - kernels[1].abs_exp).norm() < 1e-15);
        let f = log_gaussian(5.0, 160);
        let q = QuadratureSpec { radius: 1.2, width: 0.35, oversample: 4, ..Default::default() };
        let (g1, _) = convolve_axis(&f, 0, &kernels[0], ConvOrientation::OutOverArg, None, &q).unwrap();
        let (g12, _) = convolve_axis(&g1, 0, &kernels[1], ConvOrientation::OutOverArg, None, &q).unwrap();
        let (g2, _) = convolve_axis(&f, 0, &kernels[1], ConvOrientation::OutOverArg, None, &q).unwrap();
        let (g21, _) = convolve_axis(&g2, 0, &kernels[0], ConvOrientation::OutOverArg, None, &q).unwrap();
        let num: f64 = g12
            .data
            .iter()
            .zip(g21.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(num <= 1e-10 * g12.max_abs().max(1e-300));
    }

    #[test]
    fn d2_multiplier_matches_tate_integral() {
        // Mellin multiplier of the D2 transfer at chi = |.|^{it} equals the
        // kernel's oscillatory Tate integral
        let table = builtin_case_table();
        let case = find_case(&table, "D2").unwrap();
        let f = log_gaussian(6.0, 512);
        let q = QuadratureSpec {
            radius: 1.5,
            width: 0.4,
            oversample: 6,
            tolerance: 1e-3,
            ..Default::default()
        };
        let (g, _) = transfer_apply(case, &f, &psi(), &q).unwrap();
        let qm = QuadratureSpec { radius: 4.0, width: 1.5, nodes_per_axis: 1600, tolerance: 1e-4, ..Default::default() };
        for t in [0.0, 1.0, -1.7] {
            let chi = MultiplicativeCharacter::unitary(t);
            let shifted = shifted_character(case, &chi);
            let measured = mellin_numeric(&g, &chi).unwrap() / mellin_numeric(&f, &shifted).unwrap();
            let kernel = &transfer_kernels(case, &psi())[0];
            let predicted = kernel_multiplier_prediction(kernel, &shifted, &qm).unwrap().value;
            assert!(
                (measured - predicted).norm() < 2e-3 * predicted.norm().max(1.0),
                "t = {t}: measured {measured} predicted {predicted}"
            );
        }
    }
}
