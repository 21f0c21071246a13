//! Kuznetsov orbital integrals on GL_n (n <= 3), the Hankel transform for
//! the standard L-function as an operator chain on sampled torus data, and
//! the commuting-square verification against the matrix Fourier transform.
//!
//! Conventions (kept in one place so a sign bug cannot hide in two):
//!   - w is the all-ones antidiagonal permutation matrix;
//!   - the Bruhat parametrization is a -> w a, and the orbital integral is
//!       O_a(Phi) = int Phi(n1 w a n2) psi^{-1}(n1 n2) dn1 dn2
//!     with Haar measure = Lebesgue in the above-diagonal coordinates;
//!   - Mat_n* is identified with Mat_n by the trace pairing, the embedding
//!     GL_n -> Mat_n* is g -> g^{-1}, and the dual-side pushforward at the
//!     Hankel output parameter b reduces to the orbital integral at the
//!     reversed-inverse torus point (1/b_n, ..., 1/b_1) with the inverse
//!     unipotent character;
//!   - half-density coefficients are reported against the Haar reference
//!     (prod d^x a_i)^{1/2}, so the Mat_n-side pushforward of Phi |dX|^{1/2}
//!     has coefficient delta^{1/2}(a) |prod a_i|^{n/2} O_a(Phi).

use crate::field::{modular_character_gln, AdditiveCharacter};
use crate::grid::{AxisSpec, TorusHalfDensity};
use crate::mellin::{convolve_axis, convolve_last_axis_at, ConvOrientation, MultKernel};
use crate::packet::{gaussian_integral_poly, CMat, GaussianWavePacket, Mat, Poly};
use crate::quad::{bump, oscillatory_integral, Estimate, OscillatoryIntegrand, QuadratureSpec};
use crate::{C64, Error, Result};
use rayon::prelude::*;

/// The all-ones antidiagonal permutation matrix.
pub fn antidiagonal(n: usize) -> Mat {
    let mut w = Mat::zeros(n);
    for i in 0..n {
        w.set(i, n - 1 - i, 1.0);
    }
    w
}

/// vec(row-major) of n1 w a n2 for the unipotent coordinates; n = 2 uses
/// coords (x, y), n = 3 uses (x1, x2, x3, y1, y2, y3) with x3, y3 the
/// corner entries.
fn bruhat_matrix(n: usize, a: &[f64], u: &[f64], out: &mut [f64]) {
    match n {
        2 => {
            let (x, y) = (u[0], u[1]);
            let (a1, a2) = (a[0], a[1]);
            out[0] = a1 * x;
            out[1] = a1 * x * y + a2;
            out[2] = a1;
            out[3] = a1 * y;
        }
        3 => {
            let (x1, x2, x3) = (u[0], u[1], u[2]);
            let (y1, y2, y3) = (u[3], u[4], u[5]);
            let (a1, a2, a3) = (a[0], a[1], a[2]);
            out[0] = x3 * a1;
            out[1] = y1 * x3 * a1 + x1 * a2;
            out[2] = y3 * x3 * a1 + y2 * x1 * a2 + a3;
            out[3] = x2 * a1;
            out[4] = y1 * x2 * a1 + a2;
            out[5] = y3 * x2 * a1 + y2 * a2;
            out[6] = a1;
            out[7] = y1 * a1;
            out[8] = y3 * a1;
        }
        _ => unreachable!(),
    }
}

/// Unipotent character sum (superdiagonal coordinates of n1 plus n2).
fn character_sum(n: usize, u: &[f64]) -> f64 {
    match n {
        2 => u[0] + u[1],
        3 => u[0] + u[1] + u[3] + u[4],
        _ => unreachable!(),
    }
}

/// Decay radius of a packet: |arg| beyond which the Gaussian part is below
/// 1e-18 in every direction.
fn packet_reach(phi: &GaussianWavePacket) -> f64 {
    let eig = phi.width.sym_eigenvalues();
    let lmin = eig.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-12);
    let cnorm = phi.center.iter().map(|c| c * c).sum::<f64>().sqrt();
    cnorm + (42.0 / lmin).sqrt()
}

/// Adapt a quadrature spec to the torus point: the unipotent coordinates
/// scale like the inverse of the torus entries that multiply them (all but
/// the last entry, which only appears additively).
fn adapt_spec(base: &QuadratureSpec, phi: &GaussianWavePacket, a: &[f64], n: usize) -> QuadratureSpec {
    let reach = packet_reach(phi);
    let amin = a[..n - 1]
        .iter()
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    let radius = (reach / amin).min(120.0).max(1.0);
    let spacing = 2.0 * base.radius / (base.nodes_per_axis.max(2) - 1) as f64;
    let max_nodes = if n == 2 { 4096 } else { 72 };
    let nodes = ((2.0 * radius / spacing).ceil() as usize + 1).min(max_nodes).max(16);
    QuadratureSpec { radius, nodes_per_axis: nodes, ..*base }
}

/// delta^{1/2}(a) O_a(Phi) with the character sign selectable: -1 gives the
/// orbital character psi^{-1}, +1 the dual-side character psi.
pub fn kuznetsov_orbital_signed(
    phi: &GaussianWavePacket,
    a: &[f64],
    psi: &AdditiveCharacter,
    char_sign: f64,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let n = a.len();
    if !(1..=3).contains(&n) {
        return Err(Error::domain("orbital integrals support n in {1, 2, 3}"));
    }
    if a.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::domain("torus point with a zero entry"));
    }
    if phi.dim != n * n {
        return Err(Error::domain("packet dimension must be n^2"));
    }
    let dh = modular_character_gln(a)?.sqrt();
    if n == 1 {
        return Ok(Estimate::exact(phi.eval(&[a[0]], psi)));
    }
    if phi.is_zero() {
        return Ok(Estimate::exact(C64::new(0.0, 0.0)));
    }
    // quick bound: the integrand never exceeds the Gaussian at the best
    // unipotent point; skip when hopeless
    let eig = phi.width.sym_eigenvalues();
    let lmin = eig.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-12);
    let anorm: f64 = a.iter().map(|v| v * v).sum();
    let cnorm = phi.center.iter().map(|c| c * c).sum::<f64>().sqrt();
    let dist = anorm.sqrt() - cnorm;
    if dist > 0.0 && lmin * dist * dist > 60.0 {
        return Ok(Estimate { value: C64::new(0.0, 0.0), abs_error: 1e-22, converged: true });
    }
    let spec = adapt_spec(q, phi, a, n);
    let k = n * (n - 1);
    let h = char_sign * psi.hbar_eff();
    let amp = move |u: &[f64]| {
        let mut m = [0.0f64; 9];
        bruhat_matrix(n, a, u, &mut m[..n * n]);
        phi.eval(&m[..n * n], psi)
    };
    let ph = move |u: &[f64]| h * character_sum(n, u);
    let f = OscillatoryIntegrand { dim: k, amplitude: &amp, phase: &ph };
    let e = oscillatory_integral(&f, &spec)?;
    Ok(Estimate { value: e.value * dh, abs_error: e.abs_error * dh, converged: e.converged })
}

/// The spec'd orbital: delta^{1/2}(a) O_a(Phi) with the psi^{-1} character.
pub fn kuznetsov_orbital(
    phi: &GaussianWavePacket,
    a: &[f64],
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    kuznetsov_orbital_signed(phi, a, psi, -1.0, q)
}

/// Fourier transform on Mat_n as a function of the Mat_n*-matrix coordinate
/// under the trace pairing: F(Phi)(B) = int Phi(X) psi(-tr(X B)) dX.
pub fn fourier_matn(phi: &GaussianWavePacket, psi: &AdditiveCharacter) -> Result<GaussianWavePacket> {
    let d = phi.dim;
    let n = (d as f64).sqrt().round() as usize;
    if n * n != d {
        return Err(Error::domain("fourier_matn expects a packet on Mat_n"));
    }
    let fdot = phi.fourier(psi)?;
    // tr(X B) = dot(vec X, vec B^T): compose with the transpose permutation
    let mut perm = Mat::zeros(d);
    for i in 0..n {
        for j in 0..n {
            perm.set(i * n + j, j * n + i, 1.0);
        }
    }
    fdot.compose_linear(&perm)
}

/// Linear map m -> u m u' on Mat_n, as a matrix on vec(row-major).
pub fn conjugation_matrix(u: &Mat, uprime: &Mat) -> Mat {
    let n = u.n;
    let d = n * n;
    let mut l = Mat::zeros(d);
    for i in 0..n {
        for j in 0..n {
            // image of E_ij
            for r in 0..n {
                for c in 0..n {
                    // (u E_ij u')_{rc} = u_{ri} u'_{jc}
                    l.set(r * n + c, i * n + j, u.get(r, i) * uprime.get(j, c));
                }
            }
        }
    }
    l
}

/// Haar-reference half-density coefficient of the Mat_n-side pushforward,
/// sampled on the grid: delta^{1/2}(a) |prod a_i|^{n/2} O_a(Phi). Nodes whose
/// log-coordinates fall outside the per-axis window are left at zero; the
/// first-axis window can be much narrower than the others because the
/// orbital integrals decay superexponentially as |a_1| -> 0 but only like a
/// power as the later coordinates shrink.
pub fn orbital_half_density(
    phi: &GaussianWavePacket,
    axes: Vec<AxisSpec>,
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
    windows: &[(f64, f64)],
) -> Result<(TorusHalfDensity, f64)> {
    let n = axes.len();
    if windows.len() != n {
        return Err(Error::domain("one sampling window per axis required"));
    }
    let mut grid = TorusHalfDensity::zeros(axes);
    let total = grid.len();
    let results: Vec<Result<(C64, f64)>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let a = grid.coords(flat);
            for (v, w) in a.iter().zip(windows.iter()) {
                let t = v.abs().ln();
                if t < w.0 || t > w.1 {
                    return Ok((C64::new(0.0, 0.0), 0.0));
                }
            }
            let est = kuznetsov_orbital(phi, &a, psi, q)?;
            let det: f64 = a.iter().map(|v| v.abs()).product();
            let dress = det.powf(n as f64 / 2.0);
            Ok((est.value * dress, est.abs_error * dress))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (flat, r) in results.into_iter().enumerate() {
        let (v, e) = r?;
        grid.data[flat] = v;
        worst = worst.max(e);
    }
    Ok((grid, worst))
}

/// Hankel transform of the standard L-function as the operator chain
/// F_{-eps_n} then multiplication by psi(a_n / a_{n-1}), ..., down to
/// F_{-eps_1}, acting on grid data. Full-grid evaluation.
pub fn hankel_std(
    f: &TorusHalfDensity,
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
) -> Result<(TorusHalfDensity, f64)> {
    let n = f.dim();
    if n == 0 {
        return Err(Error::domain("empty density"));
    }
    let kernel = MultKernel::hankel(psi);
    let mut data = f.clone();
    let mut worst: f64 = 0.0;
    let h = psi.hbar_eff();
    for axis in (0..n).rev() {
        let pre: Option<Box<dyn Fn(&[f64], f64) -> C64 + Sync>> = if axis + 1 < n {
            Some(Box::new(move |coords: &[f64], u: f64| {
                let t = h * coords[axis + 1] / u;
                C64::new(t.cos(), t.sin())
            }))
        } else {
            None
        };
        let (next, err) = convolve_axis(
            &data,
            axis,
            &kernel,
            ConvOrientation::ArgOverOut,
            pre.as_deref().map(|p| p as &(dyn Fn(&[f64], f64) -> C64 + Sync)),
            q,
        )?;
        data = next;
        worst = worst.max(err);
    }
    Ok((data, worst))
}

/// Targeted Hankel evaluation at a single output point b (chain mode).
pub fn hankel_eval_at(
    f: &TorusHalfDensity,
    b: &[f64],
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let n = f.dim();
    if b.len() != n {
        return Err(Error::domain("output point dimension mismatch"));
    }
    if b.iter().any(|&v| v == 0.0) {
        return Err(Error::domain("output point with zero entry"));
    }
    let kernel = MultKernel::hankel(psi);
    let h = psi.hbar_eff();
    let mut data = f.clone();
    let mut err_acc: f64 = 0.0;
    for axis in (0..n).rev() {
        let pre: Option<Box<dyn Fn(f64) -> C64 + Sync>> = if axis + 1 < n {
            let bnext = b[axis + 1];
            Some(Box::new(move |u: f64| {
                let t = h * bnext / u;
                C64::new(t.cos(), t.sin())
            }))
        } else {
            None
        };
        let (next, err) = convolve_last_axis_at(
            &data,
            &kernel,
            ConvOrientation::ArgOverOut,
            b[axis],
            pre.as_deref().map(|p| p as &(dyn Fn(f64) -> C64 + Sync)),
            q,
        )?;
        data = next;
        err_acc += err;
    }
    let value = data.data[0];
    Ok(Estimate { value, abs_error: err_acc, converged: err_acc <= q.tolerance })
}

/// Direct evaluation of the explicit Hankel integral at b for n <= 2:
/// a raw lattice sum over the sampled data with smooth-cutoff stages; the
/// error estimate adds a half-lattice resolution probe.
pub fn hankel_direct_at(
    f: &TorusHalfDensity,
    b: &[f64],
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let n = f.dim();
    if n > 2 {
        return Err(Error::domain("direct Hankel mode supports n <= 2"));
    }
    let h = psi.hbar_eff();
    let eval_stage = |r_cut: f64, stride: usize| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        match n {
            1 => {
                let axis = f.axes[0];
                let t = axis.log_nodes();
                let w = axis.trapezoid_weights();
                for sheet in 0..2 {
                    let sign = if sheet == 0 { 1.0 } else { -1.0 };
                    for j in (0..axis.count).step_by(stride) {
                        let v = f.data[sheet * axis.count + j];
                        if v.norm() == 0.0 {
                            continue;
                        }
                        let u = sign * t[j].exp();
                        let p = u / b[0];
                        let weight = w[j] * bump(t[j], r_cut, q.width) * stride as f64;
                        let phase = -h * p;
                        acc += v * C64::new(0.0, phase).exp() * (p.abs().sqrt() * weight);
                    }
                }
            }
            2 => {
                let ax0 = f.axes[0];
                let ax1 = f.axes[1];
                let t0 = ax0.log_nodes();
                let w0 = ax0.trapezoid_weights();
                let t1 = ax1.log_nodes();
                let w1 = ax1.trapezoid_weights();
                for s0 in 0..2 {
                    let sg0 = if s0 == 0 { 1.0 } else { -1.0 };
                    for j0 in (0..ax0.count).step_by(stride) {
                        let u1 = sg0 * t0[j0].exp();
                        let b0w = w0[j0] * bump(t0[j0], r_cut, q.width) * stride as f64;
                        if b0w == 0.0 {
                            continue;
                        }
                        let p1 = u1 / b[0];
                        let row = (s0 * ax0.count + j0) * ax1.len();
                        for s1 in 0..2 {
                            let sg1 = if s1 == 0 { 1.0 } else { -1.0 };
                            for j1 in (0..ax1.count).step_by(stride) {
                                let v = f.data[row + s1 * ax1.count + j1];
                                if v.norm() == 0.0 {
                                    continue;
                                }
                                let u2 = sg1 * t1[j1].exp();
                                let b1w = w1[j1] * bump(t1[j1], r_cut, q.width) * stride as f64;
                                if b1w == 0.0 {
                                    continue;
                                }
                                let p2 = u2 / b[1];
                                let phase = h * (-p1 - p2 + b[1] / u1);
                                let mag = (p1.abs() * p2.abs()).sqrt();
                                acc += v * C64::new(0.0, phase).exp() * (mag * b0w * b1w);
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        acc
    };
    let r_grid = f.axes[0].radius;
    let mut vals = Vec::new();
    for j in 0..q.stages {
        let r = (q.radius * q.stage_growth.powi(j as i32)).min(r_grid);
        vals.push(eval_stage(r, 1));
    }
    let value = *vals.last().unwrap();
    let mut err = if vals.len() >= 2 {
        (vals[vals.len() - 1] - vals[vals.len() - 2]).norm()
    } else {
        f64::INFINITY
    };
    // resolution probe
    let coarse = eval_stage((q.radius * q.stage_growth.powi(q.stages as i32 - 1)).min(r_grid), 2);
    err += (value - coarse).norm() / 3.0;
    Ok(Estimate { value, abs_error: err.max(1e-16 * value.norm()), converged: err <= q.tolerance })
}

/// The dual-side (Mat_n*) pushforward coefficient at the Hankel output
/// parameter b: delta^{1/2}(b) |prod b_i|^{-n/2} O^{psi}_{(1/b_n,...,1/b_1)}
/// applied to the Fourier transform.
pub fn matstar_half_density_at(
    phi_hat: &GaussianWavePacket,
    b: &[f64],
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let n = b.len();
    if b.iter().any(|&v| v == 0.0) {
        return Err(Error::domain("output point with zero entry"));
    }
    let c: Vec<f64> = b.iter().rev().map(|&v| 1.0 / v).collect();
    let est = kuznetsov_orbital_signed(phi_hat, &c, psi, 1.0, q)?;
    // kuznetsov_orbital_signed includes delta^{1/2}(c) = delta^{1/2}(b)
    let det: f64 = b.iter().map(|v| v.abs()).product();
    let dress = det.powf(-(n as f64) / 2.0);
    Ok(Estimate { value: est.value * dress, abs_error: est.abs_error * dress, converged: est.converged })
}

/// One point of the commuting-square comparison.
#[derive(Debug, Clone)]
pub struct SquarePoint {
    pub b: Vec<f64>,
    pub lhs: C64,
    pub rhs_chain: C64,
    pub rhs_direct: Option<C64>,
    pub lhs_err: f64,
    pub rhs_err: f64,
    pub modes_agree: bool,
}

/// Parameters of the commuting-square verification.
#[derive(Debug, Clone)]
pub struct SquareParams {
    pub grid_radius: f64,
    pub grid_count: usize,
    /// Per-axis sampling windows in the log coordinate.
    pub windows: Vec<(f64, f64)>,
    pub q_orbital: QuadratureSpec,
    pub q_conv: QuadratureSpec,
    pub with_direct: bool,
}

/// Run the commuting-square verification for Phi on Mat_n over b-points.
pub fn verify_commuting_square(
    phi: &GaussianWavePacket,
    n: usize,
    b_points: &[Vec<f64>],
    psi: &AdditiveCharacter,
    params: &SquareParams,
) -> Result<Vec<SquarePoint>> {
    let axes: Vec<AxisSpec> = (0..n)
        .map(|_| AxisSpec::new(params.grid_radius, params.grid_count))
        .collect::<Result<_>>()?;
    let (f, sample_err) = orbital_half_density(phi, axes, psi, &params.q_orbital, &params.windows)?;
    let phi_hat = fourier_matn(phi, psi)?;
    let mut out = Vec::with_capacity(b_points.len());
    for b in b_points {
        let lhs = matstar_half_density_at(&phi_hat, b, psi, &params.q_orbital)?;
        let chain = hankel_eval_at(&f, b, psi, &params.q_conv)?;
        let direct = if params.with_direct && n <= 2 {
            Some(hankel_direct_at(&f, b, psi, &params.q_conv)?)
        } else {
            None
        };
        let modes_agree = match &direct {
            Some(d) => (d.value - chain.value).norm() <= (d.abs_error + chain.abs_error).max(1e-12),
            None => true,
        };
        out.push(SquarePoint {
            b: b.clone(),
            lhs: lhs.value,
            rhs_chain: chain.value,
            rhs_direct: direct.as_ref().map(|d| d.value),
            lhs_err: lhs.abs_error,
            rhs_err: chain.abs_error + sample_err,
            modes_agree,
        });
    }
    Ok(out)
}

/// Two-step factorization of the n = 3 orbital integral: the inner GL_2
/// Kuznetsov integral of the partially integrated function Phi_1, with the
/// corner integrals in closed form. Returns delta^{1/2}(a) O_a(Phi).
pub fn twostep_orbital_n3(
    phi: &GaussianWavePacket,
    a: &[f64; 3],
    psi: &AdditiveCharacter,
    q: &QuadratureSpec,
) -> Result<Estimate> {
    if a.iter().any(|&v| v == 0.0) {
        return Err(Error::domain("torus point with a zero entry"));
    }
    if phi.dim != 9 {
        return Err(Error::domain("packet must live on Mat_3"));
    }
    let h = psi.hbar_eff();
    let a1 = a[0];

    // Phi_1(g) = int Phi(u1 w3 diag(a1, g) u2) psi^{-1}(v + p) du dv dp dq,
    // with the (u, v)-integral in closed form conditionally on (p, q).
    let phi1 = |g: [f64; 4]| -> Result<Estimate> {
        let amp = |pq: &[f64]| -> C64 {
            let (p, qq) = (pq[0], pq[1]);
            // matrix m = base + u*R + v*S (row-major 3x3)
            // base = X u2 with X = [[0,g00,g01],[0,g10,g11],[a1,0,0]]
            let base = [
                0.0, g[0], g[1],
                0.0, g[2], g[3],
                a1, p * a1, qq * a1,
            ];
            let r3 = [a1, p * a1, qq * a1];
            let mut rdir = [0.0f64; 9];
            let mut sdir = [0.0f64; 9];
            rdir[..3].copy_from_slice(&r3);
            sdir[3..6].copy_from_slice(&r3);
            // exponent of Phi at m(u,v): quadratic in (u,v)
            // Phi = poly * exp(-(m-c)^T L (m-c) + i h mu^T m)
            let l = &phi.width;
            let d = 9usize;
            let mut q2 = CMat::zeros(2);
            let mut lvec = [C64::new(0.0, 0.0); 2];
            let mut dirs = [[0.0f64; 9]; 2];
            dirs[0] = rdir;
            dirs[1] = sdir;
            // quadratic block: dirs_i^T L dirs_j
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for r in 0..d {
                        if dirs[i][r] == 0.0 {
                            continue;
                        }
                        for c in 0..d {
                            s += dirs[i][r] * l.get(r, c) * dirs[j][c];
                        }
                    }
                    q2.set(i, j, C64::new(s, 0.0));
                }
            }
            // linear terms: -2 (base - c)^T L dir + i h mu . dir, plus the
            // character -i h (v + p): v adds to the second variable
            let mut basec = [0.0f64; 9];
            for r in 0..d {
                basec[r] = base[r] - phi.center[r];
            }
            for (i, dir) in dirs.iter().enumerate() {
                let mut s = 0.0;
                let mut mph = 0.0;
                for r in 0..d {
                    if dir[r] == 0.0 {
                        continue;
                    }
                    mph += phi.phase[r] * dir[r];
                    for c in 0..d {
                        s += basec[c] * l.get(c, r) * dir[r];
                    }
                }
                lvec[i] = C64::new(-2.0 * s, h * mph);
            }
            lvec[1] += C64::new(0.0, -h);
            // constant: -(base-c)^T L (base-c) + i h mu . base - i h p
            let mut c0r = 0.0;
            let mut c0i = 0.0;
            for r in 0..d {
                c0i += phi.phase[r] * base[r];
                for c in 0..d {
                    c0r += basec[r] * l.get(r, c) * basec[c];
                }
            }
            let c0 = C64::new(-c0r, h * c0i - h * p);
            // polynomial amplitude composed into (u, v)
            let poly2 = compose_poly_uv(&phi.poly, &base, &dirs[0], &dirs[1]);
            match gaussian_integral_poly(&q2, &lvec, c0, &poly2) {
                Ok(v) => v,
                Err(_) => C64::new(f64::NAN, 0.0),
            }
        };
        let ph = |_: &[f64]| 0.0;
        let f = OscillatoryIntegrand { dim: 2, amplitude: &amp, phase: &ph };
        let reach = packet_reach(phi);
        let spec = QuadratureSpec {
            radius: (reach / a1.abs().min(1.0)).min(60.0).max(2.0),
            nodes_per_axis: q.nodes_per_axis.max(64),
            ..*q
        };
        oscillatory_integral(&f, &spec)
    };

    // outer GL_2 Kuznetsov over (t, t'):
    // g(t, t') = nu1(t) w2 diag(a2, a3) nu2(t') = [[t a2, t a2 t' + a3],[a2, a2 t']]
    let (a2, a3) = (a[1], a[2]);
    let reach = packet_reach(phi);
    let outer_radius = (reach / (a2.abs().min(1.0))).min(60.0).max(2.0);
    let spacing = 2.0 * q.radius / (q.nodes_per_axis.max(2) - 1) as f64;
    let nodes = (((2.0 * outer_radius / spacing).ceil() as usize) + 1).min(512).max(32);
    let outer_spec = QuadratureSpec { radius: outer_radius, nodes_per_axis: nodes, ..*q };
    let amp_err = std::sync::Mutex::new(0.0f64);
    let amp = |tt: &[f64]| -> C64 {
        let (t, tp) = (tt[0], tt[1]);
        let g = [t * a2, t * a2 * tp + a3, a2, a2 * tp];
        match phi1(g) {
            Ok(e) => {
                let mut guard = amp_err.lock().unwrap();
                *guard = guard.max(e.abs_error);
                e.value
            }
            Err(_) => C64::new(f64::NAN, 0.0),
        }
    };
    let ph = |tt: &[f64]| -h * (tt[0] + tt[1]);
    let f = OscillatoryIntegrand { dim: 2, amplitude: &amp, phase: &ph };
    let e = oscillatory_integral(&f, &outer_spec)?;
    let dh = modular_character_gln(a)?.sqrt();
    let inner_err = *amp_err.lock().unwrap();
    Ok(Estimate {
        value: e.value * dh,
        abs_error: (e.abs_error + inner_err * outer_radius * outer_radius) * dh,
        converged: e.converged,
    })
}

/// Compose a 9-variable polynomial with the affine map
/// m = base + u R + v S into a polynomial in (u, v).
fn compose_poly_uv(poly: &Poly, base: &[f64; 9], r: &[f64; 9], s: &[f64; 9]) -> Poly {
    let mut out = Poly::zero(2);
    for (idx, coef) in &poly.terms {
        let mut term = Poly::constant(2, *coef);
        for (i, &e) in idx.iter().enumerate() {
            for _ in 0..e {
                let mut lin = Poly::constant(2, C64::new(base[i], 0.0));
                if r[i] != 0.0 {
                    lin = lin.add(&Poly::coordinate(2, 0).scale(C64::new(r[i], 0.0)));
                }
                if s[i] != 0.0 {
                    lin = lin.add(&Poly::coordinate(2, 1).scale(C64::new(s[i], 0.0)));
                }
                term = term.mul(&lin);
            }
        }
        out = out.add(&term);
    }
    out
}
