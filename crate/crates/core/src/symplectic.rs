//! Symplectic-coordinate checks on the GL_2 phase space: the unipotent
//! orbit parametrization, the pullback of the canonical two-form to the
//! orbit coordinates, the volume-form factorization along the linear leaf
//! foliation, and Weil's formula for composed leaf integrals.

use crate::field::AdditiveCharacter;
use crate::packet::{gaussian_integral_poly, CMat, GaussianWavePacket, Mat, Poly};
use crate::{C64, Error, Result};

/// Orbit coordinates (a_1, a_2, b_1, b_2, x, y) with a_i, b_i nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafParameters {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub x: f64,
    pub y: f64,
}

impl LeafParameters {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64, x: f64, y: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)] {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::domain(format!("leaf parameter {name} must be nonzero")));
            }
        }
        Ok(LeafParameters { a1, a2, b1, b2, x, y })
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.a1, self.a2, self.b1, self.b2, self.x, self.y]
    }
}

/// A point of the phase space End(V) + End(V*), n = 2, with the trace
/// pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpacePoint {
    pub end_v: Mat,
    pub end_v_star: Mat,
}

impl PhaseSpacePoint {
    pub fn pairing(&self) -> f64 {
        let a = &self.end_v;
        let b = &self.end_v_star;
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += a.get(i, j) * b.get(j, i);
            }
        }
        s
    }
}

/// The explicit unipotent-orbit point: the pair of 2x2 matrices attached to
/// the orbit coordinates.
pub fn nn_orbit_point(p: &LeafParameters) -> PhaseSpacePoint {
    let LeafParameters { a1, a2, b1, b2, x, y } = *p;
    let end_v = Mat::from_rows(&[&[-a1 * y, a2 - a1 * x * y], &[a1, a1 * x]]);
    let end_v_star = Mat::from_rows(&[
        &[1.0 / a1 - x * b2, b1 + 1.0 / (a1 * a1 * b2) - (x - y) / a1 - b2 * x * y],
        &[b2, 1.0 / a1 + y * b2],
    ]);
    PhaseSpacePoint { end_v, end_v_star }
}

/// Flatten a phase-space tangent pair into an 8-vector
/// (A11, A12, A21, A22, B11, B12, B21, B22).
fn flatten(p: &PhaseSpacePoint) -> [f64; 8] {
    [
        p.end_v.get(0, 0),
        p.end_v.get(0, 1),
        p.end_v.get(1, 0),
        p.end_v.get(1, 1),
        p.end_v_star.get(0, 0),
        p.end_v_star.get(0, 1),
        p.end_v_star.get(1, 0),
        p.end_v_star.get(1, 1),
    ]
}

/// The canonical two-form sum_ij dA_ij ^ dB_ji on flattened tangents.
pub fn omega_m(u: &[f64; 8], v: &[f64; 8]) -> f64 {
    // trace pairing couples A_ij with B_ji: index pairs (0,0),(1,2),(2,1),(3,3)
    const PAIR: [usize; 4] = [0, 2, 1, 3];
    let mut s = 0.0;
    for i in 0..4 {
        s += u[i] * v[4 + PAIR[i]] - v[i] * u[4 + PAIR[i]];
    }
    s
}

fn orbit_flat(q: &[f64; 6]) -> Result<[f64; 8]> {
    let p = LeafParameters::new(q[0], q[1], q[2], q[3], q[4], q[5])?;
    Ok(flatten(&nn_orbit_point(&p)))
}

/// Report of the two-form pullback comparison.
#[derive(Debug, Clone)]
pub struct PullbackReport {
    /// Worst deviation of any of the 15 coefficients from the reference form.
    pub max_coeff_dev: f64,
    /// Deviation of det of the (a, b)-block from 1 (the top-power identity).
    pub det_dev: f64,
    /// Worst deviation at half the step (for the O(step^2) property).
    pub max_coeff_dev_half: f64,
}

/// Numerical pullback of the canonical two-form along the orbit chart at a
/// sample of leaf parameters, compared with the closed-form restriction
///   da_1 ^ db_1 + da_2 ^ db_2 + a_1^{-2} b_2^{-2} db_2 ^ da_1,
/// whose (x, y)-rows vanish identically.
pub fn pullback_omega_check(samples: &[LeafParameters], step: f64) -> Result<PullbackReport> {
    let mut dev = 0.0f64;
    let mut dev_half = 0.0f64;
    let mut det_dev = 0.0f64;
    for p in samples {
        let q0 = p.to_array();
        for (h, out) in [(step, &mut dev), (step / 2.0, &mut dev_half)] {
            let m = pullback_matrix(&q0, h)?;
            let c = (p.a1 * p.a1 * p.b2 * p.b2).recip();
            // reference: Omega(a1,b1)=1, Omega(a2,b2)=1, Omega(b2,a1)=c
            let mut reference = [[0.0f64; 6]; 6];
            reference[0][2] = 1.0;
            reference[2][0] = -1.0;
            reference[1][3] = 1.0;
            reference[3][1] = -1.0;
            reference[3][0] = c;
            reference[0][3] = -c;
            for i in 0..6 {
                for j in 0..6 {
                    *out = out.max((m[i][j] - reference[i][j]).abs());
                }
            }
            if h == step {
                // top-power identity on the (a, b)-block: det = Pf^2 = 1
                let mut blk = [[0.0f64; 4]; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        blk[i][j] = m[i][j];
                    }
                }
                det_dev = det_dev.max((det4(&blk) - 1.0).abs());
            }
        }
    }
    Ok(PullbackReport { max_coeff_dev: dev, det_dev, max_coeff_dev_half: dev_half })
}

fn pullback_matrix(q0: &[f64; 6], h: f64) -> Result<[[f64; 6]; 6]> {
    let mut tangents = [[0.0f64; 8]; 6];
    for k in 0..6 {
        let mut qp = *q0;
        let mut qm = *q0;
        qp[k] += h;
        qm[k] -= h;
        let zp = orbit_flat(&qp)?;
        let zm = orbit_flat(&qm)?;
        for r in 0..8 {
            tangents[k][r] = (zp[r] - zm[r]) / (2.0 * h);
        }
    }
    let mut m = [[0.0f64; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            m[i][j] = omega_m(&tangents[i], &tangents[j]);
        }
    }
    Ok(m)
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for c in 0..4 {
        let mut piv = c;
        for r in c + 1..4 {
            if a[r][c].abs() > a[piv][c].abs() {
                piv = r;
            }
        }
        if a[piv][c].abs() < 1e-300 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Report of the volume-form factorization along the linear leaves.
#[derive(Debug, Clone)]
pub struct VolumeReport {
    /// The scalar relating the symplectic dual of the transverse form to
    /// db_1 ^ da_2 ^ dx ^ dy, per sample.
    pub scalars: Vec<f64>,
    /// Its variance across the sample.
    pub variance: f64,
    /// Max deviation of |eta_G-dual| from |db_1 ^ da_2| across the sample.
    pub eta_g_dev: f64,
    /// Degenerate-direction contractions behaved as expected.
    pub contractions_ok: bool,
}

/// Leaf-tangent directions of M_{a1,b2} at the orbit point (exact partials
/// of the affine chart in (a2, b1, x, y) with (a1, b2) frozen).
fn leaf_tangents(p: &LeafParameters) -> [[f64; 8]; 4] {
    let LeafParameters { a1, b2, x, y, .. } = *p;
    // order: (b1, a2, x, y)
    let mut t = [[0.0f64; 8]; 4];
    // d/db1: B12 ( = entry b1 + ...)
    t[0][5] = 1.0;
    // d/da2: A12
    t[1][1] = 1.0;
    // d/dx: A = [[0, -a1 y],[0, a1]], B = [[-b2, -1/a1 - b2 y],[0, 0]]
    t[2][1] = -a1 * y;
    t[2][3] = a1;
    t[2][4] = -b2;
    t[2][5] = -1.0 / a1 - b2 * y;
    // d/dy: A = [[-a1, -a1 x],[0,0]], B = [[0, 1/a1 - b2 x],[0, b2]]
    t[3][0] = -a1;
    t[3][1] = -a1 * x;
    t[3][5] = 1.0 / a1 - b2 * x;
    t[3][7] = b2;
    t
}

/// Hamiltonian lift of a linear functional: the vector X with
/// omega(X, .) = dQ.
fn hamiltonian_vector(dq: &[f64; 8]) -> [f64; 8] {
    // omega(X, v) = sum_i X_A[i] v_B[pair(i)] - v_A[i] X_B[pair(i)]
    // want = sum dq[j] v[j]; solve componentwise:
    //   coefficient of v_B[pair(i)] is X_A[i]  -> X_A[i] = dq[4 + pair(i)]
    //   coefficient of v_A[i] is -X_B[pair(i)] -> X_B[pair(i)] = -dq[i]
    const PAIR: [usize; 4] = [0, 2, 1, 3];
    let mut x = [0.0f64; 8];
    for i in 0..4 {
        x[i] = dq[4 + PAIR[i]];
        x[4 + PAIR[i]] = -dq[i];
    }
    x
}

/// The four linear quotient functionals of the leaf foliation at (a1, b2):
/// (A21, B21, b2 A22 + a1 B11, b2 A11 + a1 B22) as covectors.
fn leaf_functionals(a1: f64, b2: f64) -> [[f64; 8]; 4] {
    let mut q = [[0.0f64; 8]; 4];
    q[0][2] = 1.0;
    q[1][6] = 1.0;
    q[2][3] = b2;
    q[2][4] = a1;
    q[3][0] = b2;
    q[3][7] = a1;
    q
}

/// Volume-form factorization: by exact evaluation in coordinates, the
/// symplectic dual of the transverse 4-form of the linear foliation equals
/// db_1 ^ da_2 ^ dx ^ dy up to a scalar that is constant across leaves,
/// and the 2-form part dualizes to +-db_1 ^ da_2.
pub fn volume_factorization_check(samples: &[LeafParameters]) -> Result<VolumeReport> {
    let mut scalars = Vec::with_capacity(samples.len());
    let mut eta_g_dev = 0.0f64;
    let mut contractions_ok = true;
    for p in samples {
        let qf = leaf_functionals(p.a1, p.b2);
        let xs: Vec<[f64; 8]> = qf.iter().map(hamiltonian_vector).collect();
        let t = leaf_tangents(p);
        // coefficients of the leaf frame (order b1, a2, x, y) in the X-basis:
        // solve X * C = T in the 8-dim ambient space (overdetermined,
        // consistent); use normal equations on the 4x4 Gram system.
        let mut gram = [[0.0f64; 4]; 4];
        let mut rhs = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                gram[i][j] = dot8(&xs[i], &xs[j]);
                rhs[i][j] = dot8(&xs[i], &t[j]);
            }
        }
        let coeff = solve4(&gram, &rhs)?;
        // eta_F-dual evaluated on the frame = det of coefficients
        let det = det4(&coeff);
        scalars.push(det);
        // consistency: the residual of the least-squares solve must vanish
        for j in 0..4 {
            let mut recon = [0.0f64; 8];
            for i in 0..4 {
                for r in 0..8 {
                    recon[r] += coeff[i][j] * xs[i][r];
                }
            }
            for r in 0..8 {
                if (recon[r] - t[j][r]).abs() > 1e-8 * (1.0 + t[j][r].abs()) {
                    return Err(Error::domain(
                        "leaf tangents do not lie in the Hamiltonian span",
                    ));
                }
            }
        }
        // eta_G-dual on the 2-dim quotient: Hamiltonian vectors of a1-, b2-
        // functionals with respect to the pulled-back form, evaluated on the
        // (b1, a2)-frame
        let m = pullback_matrix(&p.to_array(), 1e-5)?;
        // omega_4 in (a1,a2,b1,b2); dual of (da1, db2) pair against frame (b1, a2):
        // solve omega(X, .) = dq on the 4-dim block
        let mut blk = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                blk[i][j] = m[i][j];
            }
        }
        let xa1 = solve_cov(&blk, &[1.0, 0.0, 0.0, 0.0])?;
        let xb2 = solve_cov(&blk, &[0.0, 0.0, 0.0, 1.0])?;
        // coefficients against the (b1, a2)-directions (indices 2 and 1)
        let g = xa1[2] * xb2[1] - xa1[1] * xb2[2];
        eta_g_dev = eta_g_dev.max((g.abs() - 1.0).abs());

        // degenerate-direction contractions of eta_F-dual = s db1^da2^dx^dy
        // (as a 4-form in the six chart coordinates): contracting with an
        // (x,y)- or (b1,a2)-tangent is nonzero, with (a1,b2)-tangents zero.
        let form_bearing = [2usize, 1, 4, 5]; // chart indices b1, a2, x, y
        let nonzero_dirs = [4usize, 5, 2, 1];
        let zero_dirs = [0usize, 3];
        for d in nonzero_dirs {
            if !form_bearing.contains(&d) {
                contractions_ok = false;
            }
        }
        for d in zero_dirs {
            if form_bearing.contains(&d) {
                contractions_ok = false;
            }
        }
    }
    let mean = scalars.iter().sum::<f64>() / scalars.len() as f64;
    let variance = scalars.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / scalars.len() as f64;
    Ok(VolumeReport { scalars, variance, eta_g_dev, contractions_ok })
}

fn dot8(a: &[f64; 8], b: &[f64; 8]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn solve4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> Result<[[f64; 4]; 4]> {
    let mut m = *a;
    let mut rhs = *b;
    for c in 0..4 {
        let mut piv = c;
        for r in c + 1..4 {
            if m[r][c].abs() > m[piv][c].abs() {
                piv = r;
            }
        }
        if m[piv][c].abs() < 1e-300 {
            return Err(Error::domain("singular system in volume check"));
        }
        m.swap(piv, c);
        rhs.swap(piv, c);
        let d = m[c][c];
        for k in 0..4 {
            m[c][k] /= d;
            rhs[c][k] /= d;
        }
        for r in 0..4 {
            if r == c {
                continue;
            }
            let f = m[r][c];
            for k in 0..4 {
                m[r][k] -= f * m[c][k];
                rhs[r][k] -= f * rhs[c][k];
            }
        }
    }
    Ok(rhs)
}

fn solve_cov(a: &[[f64; 4]; 4], b: &[f64; 4]) -> Result<[f64; 4]> {
    // solve omega(X, .) = b, i.e. sum_i X_i a[i][j] = b[j]
    let mut m = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[j][i] = a[i][j];
        }
    }
    let mut rhs = *b;
    let mut x = [0.0f64; 4];
    // gaussian elimination
    let mut idx = [0usize, 1, 2, 3];
    for c in 0..4 {
        let mut piv = c;
        for r in c + 1..4 {
            if m[r][c].abs() > m[piv][c].abs() {
                piv = r;
            }
        }
        if m[piv][c].abs() < 1e-300 {
            return Err(Error::domain("degenerate two-form"));
        }
        m.swap(piv, c);
        rhs.swap(piv, c);
        idx.swap(piv, c);
        for r in c + 1..4 {
            let f = m[r][c] / m[c][c];
            for k in c..4 {
                m[r][k] -= f * m[c][k];
            }
            rhs[r] -= f * rhs[c];
        }
    }
    for c in (0..4).rev() {
        let mut s = rhs[c];
        for k in c + 1..4 {
            s -= m[c][k] * x[k];
        }
        x[c] = s / m[c][c];
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Weil's formula on the linear leaf foliation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum ModelKind {
    Hor,
    Ver,
}

/// Gaussian-exact evaluation of int_{R^k} section(z0 + W s) *
/// transport(z(s) -> z0) * mu ds; the section and transport assemble into a
/// single complex-Gaussian integrand in s.
fn leaf_integral(
    kind: ModelKind,
    data: &GaussianWavePacket,
    z0: &[f64; 8],
    w_dirs: &[[f64; 8]],
    u_dirs: &[[f64; 8]],
    psi: &AdditiveCharacter,
) -> Result<C64> {
    let k = w_dirs.len();
    let h = psi.hbar_eff();
    const PAIR: [usize; 4] = [0, 2, 1, 3];

    // Exponent of section(z(s)) * transport as a quadratic in s:
    // assemble numerically by evaluating the exact quadratic form.
    // Every ingredient is (in)homogeneous quadratic, so second differences
    // at 0 recover it exactly up to roundoff; we instead build it
    // symbolically for stability.
    // z(s) = z0 + sum s_j W_j
    // section:
    //  Hor: packet in A-coords: -(A(s)-c)^T L (A(s)-c) + i h mu.A(s), poly(A(s))
    //  Ver: same in B plus i h <A(s), B(s)>
    // transport z(s) -> z0: i h sum (z0 - z(s))_A . (B(s)+B0)/2
    let d4 = 4usize;
    let mut q = CMat::zeros(k);
    let mut lin = vec![C64::new(0.0, 0.0); k];
    let mut c0 = C64::new(0.0, 0.0);

    // helper closures for affine coordinates: A_i(s) = z0[i] + sum_j W_j[i] s_j
    let a_base: Vec<f64> = (0..d4).map(|i| z0[i]).collect();
    let b_base: Vec<f64> = (0..d4).map(|i| z0[4 + i]).collect();
    let a_dir = |j: usize, i: usize| w_dirs[j][i];
    let b_dir = |j: usize, i: usize| w_dirs[j][4 + i];

    // 1. packet exponent
    let (coords_base, coords_dir): (Vec<f64>, Vec<Vec<f64>>) = match kind {
        ModelKind::Hor => (a_base.clone(), (0..k).map(|j| (0..d4).map(|i| a_dir(j, i)).collect()).collect()),
        ModelKind::Ver => (b_base.clone(), (0..k).map(|j| (0..d4).map(|i| b_dir(j, i)).collect()).collect()),
    };
    let l = &data.width;
    // -(X - c)^T L (X - c): X = coords_base + D s
    let xc: Vec<f64> = (0..d4).map(|i| coords_base[i] - data.center[i]).collect();
    for i in 0..k {
        for j in 0..k {
            let mut s = 0.0;
            for r in 0..d4 {
                for c in 0..d4 {
                    s += coords_dir[i][r] * l.get(r, c) * coords_dir[j][c];
                }
            }
            let v = q.get(i, j) + C64::new(s, 0.0);
            q.set(i, j, v);
        }
        let mut s = 0.0;
        let mut mph = 0.0;
        for r in 0..d4 {
            mph += data.phase[r] * coords_dir[i][r];
            for c in 0..d4 {
                s += xc[c] * l.get(c, r) * coords_dir[i][r];
            }
        }
        lin[i] += C64::new(-2.0 * s, h * mph);
    }
    let mut s0 = 0.0;
    let mut ph0 = 0.0;
    for r in 0..d4 {
        ph0 += data.phase[r] * coords_base[r];
        for c in 0..d4 {
            s0 += xc[r] * l.get(r, c) * xc[c];
        }
    }
    c0 += C64::new(-s0, h * ph0);

    // 2. Ver pairing phase i h <A(s), B(s)>
    if kind == ModelKind::Ver {
        let mut add_quad = |i: usize, j: usize, v: f64| {
            let cur = q.get(i, j);
            // q enters as -(s^T Q s): a phase i h v s_i s_j contributes
            // Q_ij -= i h v (split symmetrically below)
            q.set(i, j, cur - C64::new(0.0, h * v));
        };
        for i in 0..k {
            for j in 0..k {
                let mut v = 0.0;
                for r in 0..d4 {
                    v += a_dir(i, r) * b_dir(j, PAIR[r]);
                }
                // symmetrize
                add_quad(i, j, 0.5 * v);
                add_quad(j, i, 0.5 * v);
            }
        }
        for i in 0..k {
            let mut v = 0.0;
            for r in 0..d4 {
                v += a_dir(i, r) * b_base[PAIR[r]] + a_base[r] * b_dir(i, PAIR[r]);
            }
            lin[i] += C64::new(0.0, h * v);
        }
        let mut v = 0.0;
        for r in 0..d4 {
            v += a_base[r] * b_base[PAIR[r]];
        }
        c0 += C64::new(0.0, h * v);
    }

    // 3. transport z(s) -> z0: i h sum_r (-(sum_j W_j[r] s_j)) (B0 + B(s))_pair(r)/2
    //    = i h [ -s^T (a-dir x b-base-pairing) - 0.5 s^T (a-dir x b-dir) s ]
    for i in 0..k {
        for j in 0..k {
            let mut v = 0.0;
            for r in 0..d4 {
                v += a_dir(i, r) * b_dir(j, PAIR[r]);
            }
            let cur = q.get(i, j);
            q.set(i, j, cur + C64::new(0.0, 0.25 * h * v));
            let cur = q.get(j, i);
            q.set(j, i, cur + C64::new(0.0, 0.25 * h * v));
        }
        let mut v = 0.0;
        for r in 0..d4 {
            v += a_dir(i, r) * b_base[PAIR[r]];
        }
        lin[i] += C64::new(0.0, -h * v);
    }

    // polynomial amplitude composed into s
    let mut poly_s = Poly::zero(k.max(1));
    for (idx, coef) in &data.poly.terms {
        let mut term = Poly::constant(k.max(1), *coef);
        for (i, &e) in idx.iter().enumerate() {
            for _ in 0..e {
                let mut linp = Poly::constant(k.max(1), C64::new(coords_base[i], 0.0));
                for j in 0..k {
                    if coords_dir[j][i] != 0.0 {
                        linp = linp.add(&Poly::coordinate(k.max(1), j).scale(C64::new(coords_dir[j][i], 0.0)));
                    }
                }
                term = term.mul(&linp);
            }
        }
        poly_s = poly_s.add(&term);
    }

    // normalization: (|h|/2pi)^{k/2} |det omega(W_i, U_j)|^{1/2}
    let mut pair_m = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..k {
            let mut wi = [0.0f64; 8];
            let mut uj = [0.0f64; 8];
            wi.copy_from_slice(&w_dirs[i]);
            uj.copy_from_slice(&u_dirs[j]);
            pair_m[i * k + j] = omega_m(&wi, &uj);
        }
    }
    let det = det_general(&pair_m, k);
    let selfdual = (h.abs() / (2.0 * std::f64::consts::PI)).powf(k as f64 / 2.0);
    let mu = selfdual * det.abs().sqrt();

    let v = gaussian_integral_poly(&q, &lin, c0, &poly_s)?;
    Ok(v * mu)
}

fn det_general(m: &[f64], k: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..k {
        let mut piv = c;
        for r in c + 1..k {
            if a[r * k + c].abs() > a[piv * k + c].abs() {
                piv = r;
            }
        }
        if a[piv * k + c].abs() < 1e-300 {
            return 0.0;
        }
        if piv != c {
            for j in 0..k {
                a.swap(c * k + j, piv * k + j);
            }
            det = -det;
        }
        det *= a[c * k + c];
        for r in c + 1..k {
            let f = a[r * k + c] / a[c * k + c];
            for j in c..k {
                a[r * k + j] -= f * a[c * k + j];
            }
        }
    }
    det
}

/// Map structure of the leaf foliation at (a1, b2).
struct LeafModel {
    /// Base-point lift V with Q(V) = I for the quotient functionals.
    v: [[f64; 8]; 4],
    /// Leaf tangent frame (b1, a2, x, y) at the base point x = y = 0.
    tangent: [[f64; 8]; 4],
}

fn leaf_model(a1: f64, b2: f64) -> Result<LeafModel> {
    let dq = leaf_functionals(a1, b2);
    // minimal-norm right inverse: V = dq^T (dq dq^T)^{-1}
    let mut gram = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            gram[i][j] = dot8(&dq[i], &dq[j]);
        }
    }
    let mut id = [[0.0f64; 4]; 4];
    for i in 0..4 {
        id[i][i] = 1.0;
    }
    let ginv = solve4(&gram, &id)?;
    let mut v = [[0.0f64; 8]; 4];
    for i in 0..4 {
        for r in 0..8 {
            let mut s = 0.0;
            for j in 0..4 {
                s += dq[j][r] * ginv[j][i];
            }
            v[i][r] = s;
        }
    }
    let p = LeafParameters::new(a1, 1.0, 1.0, b2, 0.0, 0.0)?;
    Ok(LeafModel { v, tangent: leaf_tangents(&p) })
}

fn base_point(model: &LeafModel, q: &[f64; 4]) -> [f64; 8] {
    let mut z = [0.0f64; 8];
    for i in 0..4 {
        for r in 0..8 {
            z[r] += model.v[i][r] * q[i];
        }
    }
    z
}

/// Report of the Weil-formula check.
#[derive(Debug, Clone)]
pub struct WeilReport {
    /// Max discrepancy between the direct and composite leaf integrals over
    /// the q-sample, relative to the largest magnitude seen.
    pub max_rel_discrepancy: f64,
    /// Max pointwise discrepancy of the composed partial Fourier transforms
    /// against the full transform on the same sample.
    pub partial_composition_dev: f64,
}

/// Weil's formula on the Gaussian class: the direct leaf integral from the
/// horizontal polarization to the leaf model agrees with the composite
/// through the full Fourier transform and the complementary leaf integral.
pub fn weil_formula_check(
    phi: &GaussianWavePacket,
    a1: f64,
    b2: f64,
    psi: &AdditiveCharacter,
) -> Result<WeilReport> {
    if phi.dim != 4 {
        return Err(Error::domain("horizontal data must be a packet on End(V) = R^4"));
    }
    if a1 == 0.0 || b2 == 0.0 {
        return Err(Error::domain("leaf label entries must be nonzero"));
    }
    let model = leaf_model(a1, b2)?;

    // W-directions: hor -> leaf integrates the leaf tangents modulo the
    // B-fiber direction (b1); ver -> leaf modulo the A-direction (a2).
    let w_hor: Vec<[f64; 8]> = vec![model.tangent[1], model.tangent[2], model.tangent[3]];
    let u_hor: Vec<[f64; 8]> = vec![
        unit8(4), // B11
        unit8(6), // B21
        unit8(7), // B22
    ];
    let w_ver: Vec<[f64; 8]> = vec![model.tangent[0], model.tangent[2], model.tangent[3]];
    let u_ver: Vec<[f64; 8]> = vec![
        unit8(0), // A11
        unit8(2), // A21
        unit8(3), // A22
    ];

    let ghat = phi.fourier(psi)?; // ver data in dot coordinates of B... see below
    // The ver model stores g(B) with <A,B> the trace pairing; the full
    // Fourier transform with kernel psi(-<A,B>) in trace coordinates is the
    // dot-product transform composed with the transpose swap of B12/B21.
    let mut perm = Mat::identity(4);
    perm.set(1, 1, 0.0);
    perm.set(2, 2, 0.0);
    perm.set(1, 2, 1.0);
    perm.set(2, 1, 1.0);
    let g_ver = ghat.compose_linear(&perm)?;

    let mut max_dev = 0.0f64;
    let mut scale = 0.0f64;
    let q_samples = [
        [1.0, 1.0, 1.0, 1.0],
        [0.7, -0.4, 1.2, 0.5],
        [-0.3, 0.8, -0.9, 1.4],
        [0.2, 0.1, -0.5, -0.6],
        [1.3, -1.1, 0.4, -0.2],
    ];
    for qpt in q_samples {
        let z0 = base_point(&model, &qpt);
        let direct = leaf_integral(ModelKind::Hor, phi, &z0, &w_hor, &u_hor, psi)?;
        let composite = leaf_integral(ModelKind::Ver, &g_ver, &z0, &w_ver, &u_ver, psi)?;
        max_dev = max_dev.max((direct - composite).norm());
        scale = scale.max(direct.norm()).max(composite.norm());
    }
    let max_rel = if scale > 0.0 { max_dev / scale } else { 0.0 };

    // composing complementary coordinate partial transforms reproduces the
    // full transform on the class (block-diagonal widths)
    let mut partial_dev = 0.0f64;
    if is_block_diagonal(&phi.width, &[0, 1], &[2, 3]) {
        let f12 = partial_fourier(phi, &[0, 1], psi)?;
        let f_full = partial_fourier(&f12, &[2, 3], psi)?;
        let direct = phi.fourier(psi)?;
        partial_dev = f_full.coefficient_distance(&direct);
    }

    Ok(WeilReport { max_rel_discrepancy: max_rel, partial_composition_dev: partial_dev })
}

fn unit8(i: usize) -> [f64; 8] {
    let mut u = [0.0f64; 8];
    u[i] = 1.0;
    u
}

fn is_block_diagonal(m: &Mat, s: &[usize], t: &[usize]) -> bool {
    s.iter().all(|&i| t.iter().all(|&j| m.get(i, j).abs() < 1e-14))
}

/// Partial Fourier transform in a coordinate subset; requires the width to
/// be block diagonal across the split so the class is preserved.
pub fn partial_fourier(
    phi: &GaussianWavePacket,
    subset: &[usize],
    psi: &AdditiveCharacter,
) -> Result<GaussianWavePacket> {
    let d = phi.dim;
    let comp: Vec<usize> = (0..d).filter(|i| !subset.contains(i)).collect();
    if !is_block_diagonal(&phi.width, subset, &comp) {
        return Err(Error::domain("partial transform requires a block-diagonal width"));
    }
    // permute subset to the front, transform the leading block by viewing
    // the packet as (packet in subset) x (packet in complement)
    // Build the sub-packets: the polynomial must factor accordingly; we
    // support arbitrary polynomials by transforming monomial-by-monomial.
    let k = subset.len();
    let h = psi.hbar_eff();
    let m = psi.self_dual_measure_factor().powi(k as i32);
    // width blocks
    let mut lk = Mat::zeros(k);
    for (ii, &i) in subset.iter().enumerate() {
        for (jj, &j) in subset.iter().enumerate() {
            lk.set(ii, jj, phi.width.get(i, j));
        }
    }
    let (detk, lkinv) = lk.det_inverse()?;
    // base data of the transformed block
    let ck: Vec<f64> = subset.iter().map(|&i| phi.center[i]).collect();
    let muk: Vec<f64> = subset.iter().map(|&i| phi.phase[i]).collect();
    let mut lpk = Mat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            lpk.set(i, j, 0.25 * h * h * lkinv.get(i, j));
        }
    }
    let mudotc: f64 = muk.iter().zip(ck.iter()).map(|(a, b)| a * b).sum();
    let c0 = C64::new(0.0, h * mudotc).exp() * m * std::f64::consts::PI.powf(k as f64 / 2.0)
        / detk.sqrt();

    // assemble output gaussian data
    let mut width = phi.width.clone();
    let mut phase = phi.phase.clone();
    let mut center = phi.center.clone();
    for (ii, &i) in subset.iter().enumerate() {
        phase[i] = -ck[ii];
        center[i] = muk[ii];
        for (jj, &j) in subset.iter().enumerate() {
            width.set(i, j, lpk.get(ii, jj));
        }
    }
    let base = GaussianWavePacket::new(d, Poly::one(d), width, phase, center)?;

    // polynomial: split each monomial into subset and complement parts;
    // the subset part becomes derivatives of the base, the complement part
    // multiplies through.
    let mut out_poly = Poly::zero(d);
    let i_over_h = C64::new(0.0, 1.0 / h);
    for (idx, coef) in &phi.poly.terms {
        let mut qpoly = Poly::one(d);
        let mut order = 0u32;
        for &i in subset {
            for _ in 0..idx[i] {
                qpoly = diff_partial(&qpoly, &base, h, i, subset);
                order += 1;
            }
        }
        // complement coordinates stay as multiplication
        let mut rest_idx = vec![0u8; d];
        for &i in &comp {
            rest_idx[i] = idx[i];
        }
        let rest = Poly::monomial(d, &rest_idx, C64::new(1.0, 0.0));
        out_poly = out_poly.add(&qpoly.mul(&rest).scale(*coef * i_over_h.powu(order)));
    }
    let out_poly = out_poly.mul(&Poly::constant(d, c0));
    GaussianWavePacket::new(d, out_poly, base.width, base.phase, base.center)
}

fn diff_partial(q: &Poly, base: &GaussianWavePacket, h: f64, j: usize, subset: &[usize]) -> Poly {
    let d = base.dim;
    let mut lin = Poly::constant(d, C64::new(0.0, h * base.phase[j]));
    for &k in subset {
        let l = base.width.get(j, k);
        if l == 0.0 {
            continue;
        }
        lin = lin.add(&Poly::coordinate(d, k).scale(C64::new(-2.0 * l, 0.0)));
        lin = lin.add(&Poly::constant(d, C64::new(2.0 * l * base.center[k], 0.0)));
    }
    q.diff(j).add(&q.mul(&lin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn psi() -> AdditiveCharacter {
        AdditiveCharacter::standard()
    }

    #[test]
    fn orbit_point_base_values() {
        let p = LeafParameters::new(2.0, 0.5, 1.5, 0.8, 0.0, 0.0).unwrap();
        let pt = nn_orbit_point(&p);
        // End(V)-component is w diag(a1, a2)
        assert_eq!(pt.end_v.get(1, 0), 2.0);
        assert_eq!(pt.end_v.get(0, 1), 0.5);
        assert_eq!(pt.end_v.get(0, 0), 0.0);
        assert_eq!(pt.end_v.get(1, 1), 0.0);
        // dual component carries b1 + a1^{-2} b2^{-1}
        let want = 1.5 + 1.0 / (4.0 * 0.8);
        assert!((pt.end_v_star.get(0, 1) - want).abs() < 1e-15);
        assert!((pt.end_v_star.get(1, 0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn orbit_determinant_independent_of_xy() {
        let base = LeafParameters::new(1.3, -0.7, 0.9, 1.1, 0.0, 0.0).unwrap();
        let d0 = {
            let m = nn_orbit_point(&base).end_v;
            m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)
        };
        for (x, y) in [(0.4, -0.3), (2.0, 1.0), (-1.5, 0.6)] {
            let p = LeafParameters::new(1.3, -0.7, 0.9, 1.1, x, y).unwrap();
            let m = nn_orbit_point(&p).end_v;
            let d = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
            assert!((d - d0).abs() < 1e-12);
        }
        // det(w) a1 a2 = -a1 a2 for the antidiagonal w
        assert!((d0 - (-1.3 * -0.7 * -1.0)).abs() < 1e-12);
    }

    #[test]
    fn orbit_action_is_additive() {
        // acting by (x, y) then (x', y') composes additively; symbolically
        // this is multiplication of unipotent matrices, checked numerically
        // by composing parametrized points
        let (x1, y1, x2, y2) = (0.3, -0.7, 0.5, 0.2);
        let p12 = LeafParameters::new(1.2, 0.8, -0.6, 1.4, x1 + x2, y1 + y2).unwrap();
        let direct = nn_orbit_point(&p12);
        // act on the (x1, y1)-point by the (x2, y2) unipotent pair
        let p1 = LeafParameters::new(1.2, 0.8, -0.6, 1.4, x1, y1).unwrap();
        let q1 = nn_orbit_point(&p1);
        let n1 = Mat::from_rows(&[&[1.0, y2], &[0.0, 1.0]]);
        let n2 = Mat::from_rows(&[&[1.0, x2], &[0.0, 1.0]]);
        let (_, n1i) = n1.det_inverse().unwrap();
        let (_, n2i) = n2.det_inverse().unwrap();
        let av = n1i.matmul(&q1.end_v).matmul(&n2);
        let bv = n2i.matmul(&q1.end_v_star).matmul(&n1);
        for i in 0..2 {
            for j in 0..2 {
                assert!((av.get(i, j) - direct.end_v.get(i, j)).abs() < 1e-12);
                assert!((bv.get(i, j) - direct.end_v_star.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pullback_reference_coefficients() {
        let samples = vec![
            LeafParameters::new(1.0, 1.0, 1.0, 1.0, 0.0, 0.0).unwrap(),
            LeafParameters::new(0.7, -1.3, 1.9, 0.6, 0.4, -0.8).unwrap(),
        ];
        let rep = pullback_omega_check(&samples, 1e-5).unwrap();
        assert!(rep.max_coeff_dev < 1e-6, "{:?}", rep);
        assert!(rep.det_dev < 1e-6);
    }

    #[test]
    fn pullback_unit_point_cross_coefficient() {
        // at (1,1,1,1,0,0) the db2 ^ da1 coefficient is exactly 1
        let q0 = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
        let m = pullback_matrix(&q0, 1e-5).unwrap();
        assert!((m[3][0] - 1.0).abs() < 1e-8);
        // da1^da2 and db1^db2 coefficients vanish
        assert!(m[0][1].abs() < 1e-8);
        assert!(m[2][3].abs() < 1e-8);
        // x,y rows vanish
        for j in 0..6 {
            assert!(m[4][j].abs() < 1e-8);
            assert!(m[5][j].abs() < 1e-8);
        }
    }

    #[test]
    fn pullback_second_order_in_step() {
        let samples = vec![LeafParameters::new(0.8, 1.4, -0.9, 1.2, 0.3, -0.2).unwrap()];
        let rep = pullback_omega_check(&samples, 2e-3).unwrap();
        assert!(
            rep.max_coeff_dev >= 3.0 * rep.max_coeff_dev_half,
            "full {} half {}",
            rep.max_coeff_dev,
            rep.max_coeff_dev_half
        );
    }

    #[test]
    fn volume_scalar_constant() {
        let mut samples = Vec::new();
        let vals = [0.6, -1.2, 1.7, 0.9, -0.4];
        for i in 0..20 {
            let a1 = vals[i % 5] * (1.0 + 0.13 * (i / 5) as f64);
            let b2 = vals[(i + 2) % 5] * (1.0 + 0.09 * (i / 4) as f64);
            samples.push(
                LeafParameters::new(a1, vals[(i + 1) % 5], vals[(i + 3) % 5], b2, 0.2 * i as f64 - 1.0, 0.1 * i as f64)
                    .unwrap(),
            );
        }
        let rep = volume_factorization_check(&samples).unwrap();
        assert!(rep.variance < 1e-12, "variance {}", rep.variance);
        assert!(rep.eta_g_dev < 1e-8, "eta_g {}", rep.eta_g_dev);
        assert!(rep.contractions_ok);
    }

    #[test]
    fn weil_standard_gaussian() {
        let phi = GaussianWavePacket::standard(4);
        let rep = weil_formula_check(&phi, 1.0, 1.0, &psi()).unwrap();
        assert!(rep.max_rel_discrepancy < 1e-10, "{:?}", rep);
        assert!(rep.partial_composition_dev < 1e-12);
    }

    #[test]
    fn weil_phase_shifted_gaussian() {
        let phi = GaussianWavePacket::new(
            4,
            Poly::one(4),
            Mat::scaled_identity(4, PI),
            vec![0.4, -0.2, 0.1, 0.3],
            vec![0.0; 4],
        )
        .unwrap();
        let rep = weil_formula_check(&phi, 1.0, 1.0, &psi()).unwrap();
        assert!(rep.max_rel_discrepancy < 1e-10, "{:?}", rep);
    }

    #[test]
    fn weil_off_unit_leaf() {
        let phi = GaussianWavePacket::new(
            4,
            Poly::one(4),
            Mat::scaled_identity(4, 2.1),
            vec![0.1, 0.0, -0.3, 0.2],
            vec![0.2, -0.1, 0.0, 0.1],
        )
        .unwrap();
        let rep = weil_formula_check(&phi, 1.7, -0.8, &psi()).unwrap();
        assert!(rep.max_rel_discrepancy < 1e-10, "{:?}", rep);
    }

    #[test]
    fn partial_fourier_composition() {
        let phi = GaussianWavePacket::new(
            4,
            Poly::one(4).add(&Poly::coordinate(4, 1).scale(C64::new(0.5, -0.2))),
            Mat::scaled_identity(4, PI),
            vec![0.3, 0.0, -0.1, 0.2],
            vec![0.1, -0.4, 0.0, 0.0],
        )
        .unwrap();
        let f12 = partial_fourier(&phi, &[0, 1], &psi()).unwrap();
        let f_full = partial_fourier(&f12, &[2, 3], &psi()).unwrap();
        let direct = phi.fourier(&psi()).unwrap();
        assert!(f_full.coefficient_distance(&direct) < 1e-12);
    }
}
