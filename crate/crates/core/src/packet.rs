//! Gaussian wave packets: polynomial x Gaussian x linear phase on a real
//! vector space. The class is closed under Fourier transform, partial
//! Fourier transform and invertible linear substitution, so every operation
//! on test functions outside the two quadrature entry points stays in closed
//! form.

use crate::field::AdditiveCharacter;
use crate::{C64, Error, Result};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Sparse polynomial in `dim` variables over the complex numbers, keyed by
/// exponent multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub dim: usize,
    pub terms: BTreeMap<Vec<u8>, C64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Poly::zero(dim);
        if c.norm() > 0.0 {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C64::new(1.0, 0.0))
    }

    pub fn monomial(dim: usize, idx: &[u8], c: C64) -> Self {
        assert_eq!(idx.len(), dim);
        let mut p = Poly::zero(dim);
        p.terms.insert(idx.to_vec(), c);
        p
    }

    /// x_j as a polynomial.
    pub fn coordinate(dim: usize, j: usize) -> Self {
        let mut idx = vec![0u8; dim];
        idx[j] = 1;
        Self::monomial(dim, &idx, C64::new(1.0, 0.0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, idx: Vec<u8>, c: C64) {
        if c.norm() == 0.0 {
            return;
        }
        let e = self.terms.entry(idx).or_insert(C64::new(0.0, 0.0));
        *e += c;
        if e.norm() < 1e-300 {
            // drop exact-zero cancellations
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert(k.clone(), *v);
        }
        out.prune();
        out
    }

    pub fn scale(&self, c: C64) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (k, v) in &self.terms {
            out.insert(k.clone(), *v * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim);
        let mut out = Poly::zero(self.dim);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let idx: Vec<u8> = ka.iter().zip(kb.iter()).map(|(a, b)| a + b).collect();
                out.insert(idx, *va * *vb);
            }
        }
        out.prune();
        out
    }

    /// d/dx_j.
    pub fn diff(&self, j: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (k, v) in &self.terms {
            if k[j] == 0 {
                continue;
            }
            let mut idx = k.clone();
            idx[j] -= 1;
            out.insert(idx, *v * k[j] as f64);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, v) in &self.terms {
            let mut m = 1.0;
            for (xi, &e) in x.iter().zip(k.iter()) {
                for _ in 0..e {
                    m *= xi;
                }
            }
            acc += *v * m;
        }
        acc
    }

    /// Substitute x_i = sum_j L[i][j] y_j + t_i.
    pub fn compose_affine(&self, l: &Mat, t: &[f64]) -> Poly {
        assert_eq!(l.n, self.dim);
        let mut out = Poly::zero(self.dim);
        // linear forms per variable
        let lin: Vec<Poly> = (0..self.dim)
            .map(|i| {
                let mut p = Poly::constant(self.dim, C64::new(t[i], 0.0));
                for j in 0..self.dim {
                    if l.get(i, j) != 0.0 {
                        p = p.add(&Poly::coordinate(self.dim, j).scale(C64::new(l.get(i, j), 0.0)));
                    }
                }
                p
            })
            .collect();
        for (k, v) in &self.terms {
            let mut term = Poly::constant(self.dim, *v);
            for (i, &e) in k.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&lin[i]);
                }
            }
            out = out.add(&term);
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| v.norm() > 0.0);
    }
}

/// Dense square matrix, row-major; small dimensions only.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    m.set(i, j, m.get(i, j) + a * other.get(k, j));
                }
            }
        }
        m
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// LU decomposition with partial pivoting; returns (det, inverse).
    pub fn det_inverse(&self) -> Result<(f64, Mat)> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Mat::identity(n);
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col].abs() < 1e-300 {
                return Err(Error::domain("singular matrix"));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    inv.data.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for j in 0..n {
                a[col * n + j] /= d;
                inv.data[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv.data[r * n + j] -= f * inv.data[col * n + j];
                }
            }
        }
        Ok((det, inv))
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = self.data.clone();
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
            if off < 1e-26 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = 0.5 * (aqq - app) / apq;
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).collect()
    }
}

/// p(x) exp(-(x-c)^T L (x-c)) exp(i hbar mu^T x) on R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianWavePacket {
    pub dim: usize,
    pub poly: Poly,
    pub width: Mat,
    pub phase: Vec<f64>,
    pub center: Vec<f64>,
}

impl GaussianWavePacket {
    pub fn new(dim: usize, poly: Poly, width: Mat, phase: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        if poly.dim != dim || width.n != dim || phase.len() != dim || center.len() != dim {
            return Err(Error::domain("wave packet dimension mismatch"));
        }
        if poly.total_degree() > 4 {
            return Err(Error::domain("wave packet amplitude degree exceeds 4"));
        }
        // symmetry + positive definiteness, checked by diagonalization
        for i in 0..dim {
            for j in 0..dim {
                if (width.get(i, j) - width.get(j, i)).abs() > 1e-12 {
                    return Err(Error::domain("width matrix must be symmetric"));
                }
            }
        }
        let eig = width.sym_eigenvalues();
        if eig.iter().any(|&l| l <= 0.0) {
            return Err(Error::domain("width matrix must be positive definite"));
        }
        Ok(GaussianWavePacket { dim, poly, width, phase, center })
    }

    /// The standard packet exp(-pi |x|^2).
    pub fn standard(dim: usize) -> Self {
        GaussianWavePacket {
            dim,
            poly: Poly::one(dim),
            width: Mat::scaled_identity(dim, PI),
            phase: vec![0.0; dim],
            center: vec![0.0; dim],
        }
    }

    /// exp(-lambda |x|^2).
    pub fn isotropic(dim: usize, lambda: f64) -> Result<Self> {
        Self::new(dim, Poly::one(dim), Mat::scaled_identity(dim, lambda), vec![0.0; dim], vec![0.0; dim])
    }

    pub fn zero(dim: usize) -> Self {
        GaussianWavePacket {
            dim,
            poly: Poly::zero(dim),
            width: Mat::scaled_identity(dim, PI),
            phase: vec![0.0; dim],
            center: vec![0.0; dim],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, x: &[f64], psi: &AdditiveCharacter) -> C64 {
        let d = self.dim;
        let mut u = vec![0.0; d];
        for i in 0..d {
            u[i] = x[i] - self.center[i];
        }
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += u[i] * self.width.get(i, j) * u[j];
            }
        }
        let mut ph = 0.0;
        for i in 0..d {
            ph += self.phase[i] * x[i];
        }
        let h = psi.hbar_eff();
        self.poly.eval(x) * C64::new(-q, h * ph).exp()
    }

    /// Fourier transform with kernel psi(-<x,y>) and the self-dual measure,
    /// relative to the dot product on R^d. Exact on the class.
    pub fn fourier(&self, psi: &AdditiveCharacter) -> Result<GaussianWavePacket> {
        let d = self.dim;
        let h = psi.hbar_eff();
        let m = psi.self_dual_measure_factor().powi(d as i32);
        let (det, li) = self.width.det_inverse()?;
        // base transform of the degree-0 part exp(-(x-c)^T L (x-c) + i h mu x):
        //   C0 exp(-(y-mu)^T L' (y-mu)) exp(-i h c y),  L' = (h^2/4) L^{-1},
        //   C0 = m pi^{d/2} det(L)^{-1/2} exp(i h mu^T c)
        let mut lp = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                lp.set(i, j, 0.25 * h * h * li.get(i, j));
            }
        }
        let mudotc: f64 = self.phase.iter().zip(self.center.iter()).map(|(a, b)| a * b).sum();
        let c0 = C64::new(0.0, h * mudotc).exp() * m * PI.powf(d as f64 / 2.0) / det.sqrt();
        let base = GaussianWavePacket {
            dim: d,
            poly: Poly::constant(d, c0),
            width: lp,
            phase: self.center.iter().map(|&v| -v).collect(),
            center: self.phase.clone(),
        };
        // polynomial part: F(x^a f) = (i/h)^{|a|} D_y^a F(f)
        let mut out_poly = Poly::zero(d);
        let i_over_h = C64::new(0.0, 1.0 / h);
        for (idx, coef) in &self.poly.terms {
            // start from the constant-1 amplitude and differentiate
            let mut q = Poly::one(d);
            let mut order = 0u32;
            for (j, &e) in idx.iter().enumerate() {
                for _ in 0..e {
                    q = diff_amplitude(&q, &base, h, j);
                    order += 1;
                }
            }
            out_poly = out_poly.add(&q.scale(*coef * i_over_h.powu(order)));
        }
        let out_poly = out_poly.mul(&Poly::constant(d, c0));
        GaussianWavePacket::new(d, out_poly, base.width, base.phase, base.center)
    }

    /// Substitute x -> L x for invertible L; stays in the class.
    pub fn compose_linear(&self, l: &Mat) -> Result<GaussianWavePacket> {
        let d = self.dim;
        if l.n != d {
            return Err(Error::domain("substitution dimension mismatch"));
        }
        let (_, linv) = l.det_inverse()?;
        let lt = l.transpose();
        let width = lt.matmul(&self.width).matmul(l);
        let center = linv.matvec(&self.center);
        let phase = lt.matvec(&self.phase);
        let poly = self.poly.compose_affine(l, &vec![0.0; d]);
        GaussianWavePacket::new(d, poly, width, phase, center)
    }

    /// Pointwise (coefficient-wise) distance to another packet with identical
    /// Gaussian data; infinity when the Gaussian data differ.
    pub fn coefficient_distance(&self, other: &GaussianWavePacket) -> f64 {
        let gauss_close = self
            .width
            .data
            .iter()
            .zip(other.width.data.iter())
            .all(|(a, b)| (a - b).abs() < 1e-9 * (1.0 + a.abs()))
            && self
                .center
                .iter()
                .zip(other.center.iter())
                .all(|(a, b)| (a - b).abs() < 1e-9 * (1.0 + a.abs()))
            && self
                .phase
                .iter()
                .zip(other.phase.iter())
                .all(|(a, b)| (a - b).abs() < 1e-9 * (1.0 + a.abs()));
        if !gauss_close {
            return f64::INFINITY;
        }
        let mut keys: std::collections::BTreeSet<Vec<u8>> = self.poly.terms.keys().cloned().collect();
        keys.extend(other.poly.terms.keys().cloned());
        let mut d: f64 = 0.0;
        for k in keys {
            let a = self.poly.terms.get(&k).copied().unwrap_or(C64::new(0.0, 0.0));
            let b = other.poly.terms.get(&k).copied().unwrap_or(C64::new(0.0, 0.0));
            d = d.max((a - b).norm());
        }
        d
    }
}

/// One derivative step of q(y) exp(-(y-c)^T L (y-c) + i h mu y) in direction j,
/// returning the new amplitude polynomial.
fn diff_amplitude(q: &Poly, base: &GaussianWavePacket, h: f64, j: usize) -> Poly {
    let d = base.dim;
    // dq/dy_j + q * (-2 L (y-c))_j + q * i h mu_j
    let mut lin = Poly::constant(d, C64::new(0.0, h * base.phase[j]));
    for k in 0..d {
        let l = base.width.get(j, k);
        if l == 0.0 {
            continue;
        }
        lin = lin.add(&Poly::coordinate(d, k).scale(C64::new(-2.0 * l, 0.0)));
        lin = lin.add(&Poly::constant(d, C64::new(2.0 * l * base.center[k], 0.0)));
    }
    q.diff(j).add(&q.mul(&lin))
}

// ---------------------------------------------------------------------------
// Complex Gaussian integrals (internal engine for closed-form leaf integrals)
// ---------------------------------------------------------------------------

/// Complex symmetric matrix, row-major.
#[derive(Debug, Clone)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn det_inverse(&self) -> Result<(C64, CMat)> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = CMat::zeros(n);
        for i in 0..n {
            inv.set(i, i, C64::new(1.0, 0.0));
        }
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].norm() > a[piv * n + col].norm() {
                    piv = r;
                }
            }
            if a[piv * n + col].norm() < 1e-300 {
                return Err(Error::domain("singular complex matrix"));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    inv.data.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for j in 0..n {
                a[col * n + j] /= d;
                inv.data[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let t = a[col * n + j] * f;
                    a[r * n + j] -= t;
                    let t = inv.data[col * n + j] * f;
                    inv.data[r * n + j] -= t;
                }
            }
        }
        Ok((det, inv))
    }
}

/// sqrt(det Q) with the branch fixed by continuous deformation from Re(Q),
/// which is assumed positive definite (so its determinant is positive).
pub fn sqrt_det_branch(q: &CMat) -> Result<C64> {
    let n = q.n;
    let steps = 32;
    let mut prev_arg = 0.0f64;
    let mut total_arg = 0.0f64;
    let mut last_mag = 0.0f64;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let mut qt = CMat::zeros(n);
        for i in 0..n * n {
            let re = q.data[i].re;
            let im = q.data[i].im * t;
            qt.data[i] = C64::new(re, im);
        }
        let (det, _) = qt.det_inverse()?;
        let arg = det.arg();
        if k == 0 {
            prev_arg = arg;
            total_arg = arg;
        } else {
            let mut d = arg - prev_arg;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            total_arg += d;
            prev_arg = arg;
        }
        last_mag = det.norm();
    }
    Ok(C64::from_polar(last_mag.sqrt(), 0.5 * total_arg))
}

/// Gaussian moments E[eta^idx] for eta with zero mean and symmetric
/// "covariance" C (E[eta_i eta_j] = C_ij), by Isserlis pairings.
fn gaussian_moment(c: &CMat, idx: &[usize]) -> C64 {
    if idx.is_empty() {
        return C64::new(1.0, 0.0);
    }
    if idx.len() % 2 == 1 {
        return C64::new(0.0, 0.0);
    }
    // pair the first element with each other element, recurse
    let mut acc = C64::new(0.0, 0.0);
    for k in 1..idx.len() {
        let pair = c.get(idx[0], idx[k]);
        if pair.norm() == 0.0 {
            continue;
        }
        let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
        for (m, &v) in idx.iter().enumerate() {
            if m != 0 && m != k {
                rest.push(v);
            }
        }
        acc += pair * gaussian_moment(c, &rest);
    }
    acc
}

/// Closed form of the k-dimensional integral
///   int q(eta) exp(-eta^T Q eta + l^T eta + c0) d eta,
/// with Re(Q) positive definite. Lebesgue measure.
pub fn gaussian_integral_poly(q: &CMat, l: &[C64], c0: C64, poly: &Poly) -> Result<C64> {
    let n = q.n;
    let (_, qinv) = q.det_inverse()?;
    let sqrt_det = sqrt_det_branch(q)?;
    // stationary point m = Q^{-1} l / 2
    let mut m = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            m[i] += qinv.get(i, j) * l[j] * 0.5;
        }
    }
    // exponent constant: c0 + l^T m / 2 = c0 + l^T Q^{-1} l / 4
    let mut cc = c0;
    for i in 0..n {
        cc += l[i] * m[i] * 0.5;
    }
    // covariance C = Q^{-1} / 2
    let mut cov = CMat::zeros(n);
    for i in 0..n * n {
        cov.data[i] = qinv.data[i] * 0.5;
    }
    // E[poly(m + eta)]: expand each monomial
    let mut expect = C64::new(0.0, 0.0);
    for (kidx, coef) in &poly.terms {
        // multinomial expansion of prod_i (m_i + eta_i)^{e_i}
        // enumerate how many eta's to take from each factor
        let vars: Vec<(usize, u8)> = kidx.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
        expect += *coef * expand_expectation(&vars, 0, &m, &cov, C64::new(1.0, 0.0), &mut Vec::new());
    }
    Ok(expect * cc.exp() * C64::new(PI, 0.0).powf(n as f64 / 2.0) / sqrt_det)
}

fn expand_expectation(
    vars: &[(usize, u8)],
    pos: usize,
    m: &[C64],
    cov: &CMat,
    coef: C64,
    etas: &mut Vec<usize>,
) -> C64 {
    if pos == vars.len() {
        return coef * gaussian_moment(cov, etas);
    }
    let (i, e) = vars[pos];
    let mut acc = C64::new(0.0, 0.0);
    // choose k eta's out of e from this variable
    for k in 0..=e {
        let binom = binomial(e as u64, k as u64) as f64;
        let mcoef = m[i].powu((e - k) as u32) * binom;
        let before = etas.len();
        for _ in 0..k {
            etas.push(i);
        }
        acc += expand_expectation(vars, pos + 1, m, cov, coef * mcoef, etas);
        etas.truncate(before);
    }
    acc
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1u64;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi() -> AdditiveCharacter {
        AdditiveCharacter::standard()
    }

    #[test]
    fn standard_gaussian_self_dual() {
        let g = GaussianWavePacket::standard(3);
        let f = g.fourier(&psi()).unwrap();
        assert!(g.coefficient_distance(&f) < 1e-12);
    }

    #[test]
    fn fourier_inversion_on_class() {
        // polynomial amplitude, anisotropic width, phase and center
        let dim = 2;
        let poly = Poly::one(dim)
            .add(&Poly::coordinate(dim, 0).scale(C64::new(0.7, -0.3)))
            .add(&Poly::monomial(dim, &[1, 2], C64::new(-0.4, 0.1)));
        let mut w = Mat::scaled_identity(dim, PI);
        w.set(0, 1, 0.4);
        w.set(1, 0, 0.4);
        let g = GaussianWavePacket::new(dim, poly, w, vec![0.3, -0.8], vec![0.1, 0.25]).unwrap();
        let back = g.fourier(&psi()).unwrap().fourier(&psi().inverse()).unwrap();
        assert!(g.coefficient_distance(&back) < 1e-12, "dist = {}", g.coefficient_distance(&back));
    }

    #[test]
    fn monomial_rule_one_dim() {
        // F(x e^{-pi x^2}) = -i y e^{-pi y^2}
        let g = GaussianWavePacket::new(
            1,
            Poly::coordinate(1, 0),
            Mat::scaled_identity(1, PI),
            vec![0.0],
            vec![0.0],
        )
        .unwrap();
        let f = g.fourier(&psi()).unwrap();
        let want = GaussianWavePacket::new(
            1,
            Poly::coordinate(1, 0).scale(C64::new(0.0, -1.0)),
            Mat::scaled_identity(1, PI),
            vec![0.0],
            vec![0.0],
        )
        .unwrap();
        assert!(f.coefficient_distance(&want) < 1e-12);
    }

    #[test]
    fn fourier_matches_pointwise_quadrature() {
        // crude Riemann check of the closed form at one point
        let g = GaussianWavePacket::new(
            1,
            Poly::one(1).add(&Poly::coordinate(1, 0).scale(C64::new(0.5, 0.2))),
            Mat::scaled_identity(1, 2.0),
            vec![0.4],
            vec![-0.3],
        )
        .unwrap();
        let f = g.fourier(&psi()).unwrap();
        let y = 0.7;
        let n = 40000;
        let lim = 12.0;
        let dx = 2.0 * lim / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let x = -lim + (i as f64 + 0.5) * dx;
            let ph = C64::new(0.0, -psi().hbar_eff() * x * y).exp();
            acc += g.eval(&[x], &psi()) * ph;
        }
        acc *= dx * psi().self_dual_measure_factor();
        let closed = f.eval(&[y], &psi());
        assert!((acc - closed).norm() < 1e-8, "{acc} vs {closed}");
    }

    #[test]
    fn linear_substitution() {
        let g = GaussianWavePacket::new(
            2,
            Poly::coordinate(2, 1),
            Mat::scaled_identity(2, PI),
            vec![0.2, -0.1],
            vec![0.3, 0.6],
        )
        .unwrap();
        let l = Mat::from_rows(&[&[2.0, 1.0], &[0.0, -1.0]]);
        let h = g.compose_linear(&l).unwrap();
        for x in [[0.3, -0.5], [1.1, 0.2]] {
            let lx = l.matvec(&x);
            let a = g.eval(&lx, &psi());
            let b = h.eval(&x, &psi());
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn packet_rejects_bad_width() {
        let mut w = Mat::scaled_identity(2, 1.0);
        w.set(0, 0, -1.0);
        assert!(GaussianWavePacket::new(2, Poly::one(2), w, vec![0.0; 2], vec![0.0; 2]).is_err());
    }

    #[test]
    fn complex_gaussian_integral_matches_real_case() {
        // int exp(-2 x^2 - y^2 + x) dx dy
        let mut q = CMat::zeros(2);
        q.set(0, 0, C64::new(2.0, 0.0));
        q.set(1, 1, C64::new(1.0, 0.0));
        let l = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let v = gaussian_integral_poly(&q, &l, C64::new(0.0, 0.0), &Poly::one(2)).unwrap();
        let want = (PI / 2.0f64).sqrt() * PI.sqrt() * (1.0f64 / 8.0).exp();
        assert!((v - C64::new(want, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_gaussian_with_polynomial() {
        // int x^2 exp(-a x^2) dx = sqrt(pi)/(2 a^{3/2}), with complex a
        let a = C64::new(1.5, 0.7);
        let mut q = CMat::zeros(1);
        q.set(0, 0, a);
        let p = Poly::monomial(1, &[2], C64::new(1.0, 0.0));
        let v = gaussian_integral_poly(&q, &[C64::new(0.0, 0.0)], C64::new(0.0, 0.0), &p).unwrap();
        let want = C64::new(PI, 0.0).sqrt() / (a.sqrt() * a * 2.0);
        assert!((v - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn complex_gaussian_oscillatory() {
        // int exp(-(1+i) x^2 + 3 i x) dx against direct quadrature
        let mut q = CMat::zeros(1);
        q.set(0, 0, C64::new(1.0, 1.0));
        let l = vec![C64::new(0.0, 3.0)];
        let v = gaussian_integral_poly(&q, &l, C64::new(0.0, 0.0), &Poly::one(1)).unwrap();
        let n = 400000;
        let lim = 30.0;
        let dx = 2.0 * lim / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let x = -lim + (i as f64 + 0.5) * dx;
            acc += (C64::new(-(x * x), -(x * x)) + C64::new(0.0, 3.0 * x)).exp();
        }
        acc *= dx;
        assert!((v - acc).norm() < 1e-7, "{v} vs {acc}");
    }
}
