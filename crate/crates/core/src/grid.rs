//! Signed logarithmic grids over (R^x)^n and sampled half-densities on them.
//!
//! Per axis the grid carries two sign sheets (+ first, - second); each sheet
//! holds `count` log-magnitude nodes exp(+-R k / (count/2)), k = 1..count/2,
//! ascending in log |x|. The node set excludes |x| = 1 (no t = 0 node) and
//! is symmetric about it, with a doubled central gap; trapezoid weights are
//! computed from the node spacing directly.

use crate::field::MultiplicativeCharacter;
use crate::{C64, Error, Result};

/// One axis of a signed log grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    /// Log radius: magnitudes range over [exp(-radius), exp(radius)].
    pub radius: f64,
    /// Nodes per sign sheet; must be even.
    pub count: usize,
}

impl AxisSpec {
    pub fn new(radius: f64, count: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain("axis radius must be positive"));
        }
        if count < 2 || count % 2 != 0 {
            return Err(Error::domain("axis node count must be even and >= 2"));
        }
        Ok(AxisSpec { radius, count })
    }

    /// Log coordinates of one sheet, ascending.
    pub fn log_nodes(&self) -> Vec<f64> {
        let m = self.count / 2;
        let mut t = Vec::with_capacity(self.count);
        for k in (1..=m).rev() {
            t.push(-self.radius * k as f64 / m as f64);
        }
        for k in 1..=m {
            t.push(self.radius * k as f64 / m as f64);
        }
        t
    }

    /// Trapezoid weights matching `log_nodes` (with respect to d^x measure).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let t = self.log_nodes();
        let n = t.len();
        let mut w = vec![0.0; n];
        for i in 0..n {
            let lo = if i == 0 { t[0] } else { (t[i - 1] + t[i]) / 2.0 };
            let hi = if i == n - 1 { t[n - 1] } else { (t[i] + t[i + 1]) / 2.0 };
            w[i] = hi - lo;
        }
        // end cells extend half a step outward
        let h = self.radius / (self.count / 2) as f64;
        w[0] += h / 2.0;
        w[n - 1] += h / 2.0;
        w
    }

    /// Total stored values along this axis (both sheets).
    pub fn len(&self) -> usize {
        2 * self.count
    }

    /// Signed coordinate of the in-axis index (sheet-major: + then -).
    pub fn node_value(&self, idx: usize) -> f64 {
        let t = self.log_nodes();
        if idx < self.count {
            t[idx].exp()
        } else {
            -(t[idx - self.count].exp())
        }
    }
}

/// A sampled half-density coefficient on a signed log grid over (R^x)^n,
/// stored against the reference half-density of the grid measure
/// (prod_i d^x a_i)^(1/2). Sheet ordering is + first, - second, row-major
/// across axes.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusHalfDensity {
    pub axes: Vec<AxisSpec>,
    pub data: Vec<C64>,
}

impl TorusHalfDensity {
    pub fn zeros(axes: Vec<AxisSpec>) -> Self {
        let len = axes.iter().map(|a| a.len()).product();
        TorusHalfDensity { axes, data: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Fill from a coefficient function of the signed coordinates.
    pub fn from_fn(axes: Vec<AxisSpec>, f: impl Fn(&[f64]) -> C64 + Sync) -> Self {
        let mut out = Self::zeros(axes);
        let dims: Vec<usize> = out.axes.iter().map(|a| a.len()).collect();
        let coords: Vec<Vec<f64>> = out
            .axes
            .iter()
            .map(|a| (0..a.len()).map(|i| a.node_value(i)).collect())
            .collect();
        let n = out.data.len();
        let mut idx = vec![0usize; dims.len()];
        let mut x = vec![0.0; dims.len()];
        for flat in 0..n {
            let mut rem = flat;
            for (k, &d) in dims.iter().enumerate().rev() {
                idx[k] = rem % d;
                rem /= d;
            }
            for k in 0..dims.len() {
                x[k] = coords[k][idx[k]];
            }
            out.data[flat] = f(&x);
        }
        out
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (k, &i) in idx.iter().enumerate() {
            flat = flat * self.axes[k].len() + i;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: C64) {
        let f = self.flat_index(idx);
        self.data[f] = v;
    }

    /// Coordinates of a flat index.
    pub fn coords(&self, mut flat: usize) -> Vec<f64> {
        let dims: Vec<usize> = self.axes.iter().map(|a| a.len()).collect();
        let mut idx = vec![0usize; dims.len()];
        for (k, &d) in dims.iter().enumerate().rev() {
            idx[k] = flat % d;
            flat /= d;
        }
        idx.iter().enumerate().map(|(k, &i)| self.axes[k].node_value(i)).collect()
    }

    pub fn scale(&self, c: C64) -> Self {
        TorusHalfDensity {
            axes: self.axes.clone(),
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.axes != other.axes {
            return Err(Error::domain("grid mismatch in half-density addition"));
        }
        Ok(TorusHalfDensity {
            axes: self.axes.clone(),
            data: self.data.iter().zip(other.data.iter()).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Mellin pairing of a one-axis half-density: integral of f(x) chi^{-1}(x)
/// against the grid measure d^x, by the trapezoid rule on both sheets.
pub fn mellin_numeric(f: &TorusHalfDensity, chi: &MultiplicativeCharacter) -> Result<C64> {
    if f.dim() != 1 {
        return Err(Error::domain("mellin_numeric expects a one-axis density"));
    }
    let axis = f.axes[0];
    let t = axis.log_nodes();
    let w = axis.trapezoid_weights();
    let inv = chi.inverse();
    let mut acc = C64::new(0.0, 0.0);
    for (sheet, sign) in [(0usize, 1.0f64), (1, -1.0)] {
        for (j, (&tj, &wj)) in t.iter().zip(w.iter()).enumerate() {
            let x = sign * tj.exp();
            let v = f.data[sheet * axis.count + j];
            if v.norm() == 0.0 {
                continue;
            }
            acc += v * inv.eval(x)? * wj;
        }
    }
    Ok(acc)
}

/// Flags accuracy loss of the Mellin pairing outside the strip the grid
/// resolves: the boundary samples times the edge weight must be negligible.
pub fn mellin_strip_flag(f: &TorusHalfDensity, chi: &MultiplicativeCharacter, tol: f64) -> bool {
    let axis = f.axes[0];
    let rz = chi.exponent.re.abs();
    let edge = (rz * axis.radius).exp();
    let m = axis.count / 2;
    let mut boundary: f64 = 0.0;
    for sheet in 0..2 {
        boundary = boundary.max(f.data[sheet * axis.count].norm());
        boundary = boundary.max(f.data[sheet * axis.count + axis.count - 1].norm());
        boundary = boundary.max(f.data[sheet * axis.count + m - 1].norm());
        boundary = boundary.max(f.data[sheet * axis.count + m].norm());
    }
    boundary * edge > tol * f.max_abs().max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_layout() {
        let a = AxisSpec::new(2.0, 8).unwrap();
        let t = a.log_nodes();
        assert_eq!(t.len(), 8);
        assert!((t[0] + 2.0).abs() < 1e-15);
        assert!((t[7] - 2.0).abs() < 1e-15);
        // symmetric, no zero node
        for (u, v) in t.iter().zip(t.iter().rev()) {
            assert!((u + v).abs() < 1e-15);
        }
        assert!(t.iter().all(|&x| x != 0.0));
        assert_eq!(a.len(), 16);
        // + sheet first
        assert!(a.node_value(0) > 0.0);
        assert!(a.node_value(8) < 0.0);
    }

    #[test]
    fn weights_cover_range() {
        let a = AxisSpec::new(3.0, 64).unwrap();
        let w: f64 = a.trapezoid_weights().iter().sum();
        // total measure of [-R-h/2, R-?]: 2R + h (end cells padded by h/2)
        let h = 3.0 / 32.0;
        assert!((w - (6.0 + h)).abs() < 1e-12);
    }

    #[test]
    fn coefficient_array_length() {
        let axes = vec![AxisSpec::new(1.0, 6).unwrap(), AxisSpec::new(2.0, 4).unwrap()];
        let f = TorusHalfDensity::zeros(axes);
        assert_eq!(f.len(), 12 * 8);
    }

    #[test]
    fn mellin_log_gaussian() {
        // f = exp(-(log|x|)^2) on both sheets, chi trivial:
        // integral = 2 int exp(-t^2) dt = 2 sqrt(pi)
        let axes = vec![AxisSpec::new(6.0, 512).unwrap()];
        let f = TorusHalfDensity::from_fn(axes, |x| {
            let t = x[0].abs().ln();
            C64::new((-t * t).exp(), 0.0)
        });
        let v = mellin_numeric(&f, &MultiplicativeCharacter::trivial()).unwrap();
        let want = 2.0 * std::f64::consts::PI.sqrt();
        assert!((v.re - want).abs() < 1e-6, "{} vs {}", v.re, want);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn mellin_zero_and_sign_character() {
        let axes = vec![AxisSpec::new(5.0, 256).unwrap()];
        let zero = TorusHalfDensity::zeros(axes.clone());
        let v = mellin_numeric(&zero, &MultiplicativeCharacter::unitary(0.7)).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));

        // f supported on + sheet only: sgn-part is invisible
        let mut f = TorusHalfDensity::zeros(axes);
        let n = f.axes[0].count;
        for j in 0..n {
            let t = f.axes[0].log_nodes()[j];
            f.data[j] = C64::new((-t * t).exp(), 0.0); // + sheet block
        }
        let chi_even = MultiplicativeCharacter::new(0, C64::new(0.0, 0.9));
        let chi_odd = MultiplicativeCharacter::new(1, C64::new(0.0, 0.9));
        let a = mellin_numeric(&f, &chi_even).unwrap();
        let b = mellin_numeric(&f, &chi_odd).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn mellin_second_order_convergence() {
        // halving the spacing reduces the error on the log-Gaussian by >= 4x
        let want = 2.0 * std::f64::consts::PI.sqrt();
        let err = |count: usize| {
            let axes = vec![AxisSpec::new(6.0, count).unwrap()];
            let f = TorusHalfDensity::from_fn(axes, |x| {
                let t = x[0].abs().ln();
                C64::new((-t * t).exp(), 0.0)
            });
            (mellin_numeric(&f, &MultiplicativeCharacter::trivial()).unwrap().re - want).abs()
        };
        let e1 = err(48);
        let e2 = err(96);
        assert!(e1 > 4.0 * e2, "e1 = {e1}, e2 = {e2}");
    }

    #[test]
    fn mellin_linear() {
        let axes = vec![AxisSpec::new(4.0, 128).unwrap()];
        let f = TorusHalfDensity::from_fn(axes.clone(), |x| {
            let t = x[0].abs().ln();
            C64::new((-t * t).exp(), 0.3 * (-t * t * 0.5).exp())
        });
        let g = TorusHalfDensity::from_fn(axes, |x| {
            let t = x[0].abs().ln();
            C64::new((-(t - 0.3) * (t - 0.3)).exp(), 0.0)
        });
        let chi = MultiplicativeCharacter::unitary(1.3);
        let a = C64::new(0.7, -0.2);
        let combo = f.scale(a).add(&g).unwrap();
        let lhs = mellin_numeric(&combo, &chi).unwrap();
        let rhs = mellin_numeric(&f, &chi).unwrap() * a + mellin_numeric(&g, &chi).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
