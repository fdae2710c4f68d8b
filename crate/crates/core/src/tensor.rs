//! Symmetric second-order tensors in 3D plus rank-4 operators in Mandel
//! notation.
//!
//! Stress, strain, and backstress tensors all use [`SymTensor3`]. Shear
//! components store plain tensor values (the `xy` field of a strain tensor is
//! eps_xy = gamma_xy / 2, never the engineering shear). Double contractions
//! therefore weight the three shear entries by 2; that weighting lives in
//! exactly two places (`ddot` and the Mandel conversion) so the factor cannot
//! leak into invariants such as J2.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Symmetric second-order tensor in 3D, six stored components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub yz: f64,
    pub zx: f64,
}

impl SymTensor3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);

    pub const fn new(xx: f64, yy: f64, zz: f64, xy: f64, yz: f64, zx: f64) -> Self {
        Self { xx, yy, zz, xy, yz, zx }
    }

    pub const fn diag(xx: f64, yy: f64, zz: f64) -> Self {
        Self::new(xx, yy, zz, 0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    /// p * I.
    pub const fn spherical(p: f64) -> Self {
        Self::diag(p, p, p)
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    /// Mean (hydrostatic) part, trace/3.
    pub fn mean(&self) -> f64 {
        self.trace() / 3.0
    }

    /// Deviatoric part. `dev(T) + mean(T)*I == T` holds exactly.
    pub fn dev(&self) -> Self {
        let m = self.mean();
        Self::new(self.xx - m, self.yy - m, self.zz - m, self.xy, self.yz, self.zx)
    }

    /// Double contraction T:S. Shear terms carry the factor 2.
    pub fn ddot(&self, other: &Self) -> f64 {
        self.xx * other.xx
            + self.yy * other.yy
            + self.zz * other.zz
            + 2.0 * (self.xy * other.xy + self.yz * other.yz + self.zx * other.zx)
    }

    /// Tensor norm sqrt(T:T).
    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    /// Second deviatoric invariant, J2 = 1/2 dev(T):dev(T).
    pub fn j2(&self) -> f64 {
        let s = self.dev();
        0.5 * s.ddot(&s)
    }

    /// Von Mises norm sqrt(3 J2).
    pub fn von_mises(&self) -> f64 {
        (3.0 * self.j2()).sqrt()
    }

    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        Self::new(
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[1][2] + m[2][1]),
            0.5 * (m[2][0] + m[0][2]),
        )
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.xx, self.xy, self.zx],
            [self.xy, self.yy, self.yz],
            [self.zx, self.yz, self.zz],
        ]
    }

    /// Mandel 6-vector (xx, yy, zz, sqrt2*xy, sqrt2*yz, sqrt2*zx). Preserves
    /// contractions: `a.ddot(b)` equals the Euclidean dot of the vectors.
    pub fn to_mandel(&self) -> [f64; 6] {
        [
            self.xx,
            self.yy,
            self.zz,
            SQRT_2 * self.xy,
            SQRT_2 * self.yz,
            SQRT_2 * self.zx,
        ]
    }

    pub fn from_mandel(v: &[f64; 6]) -> Self {
        Self::new(v[0], v[1], v[2], v[3] / SQRT_2, v[4] / SQRT_2, v[5] / SQRT_2)
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite()
            && self.yy.is_finite()
            && self.zz.is_finite()
            && self.xy.is_finite()
            && self.yz.is_finite()
            && self.zx.is_finite()
    }

    /// Spectral decomposition, eigenvalues descending.
    pub fn principal(&self) -> PrincipalDecomposition {
        let (vals, vecs) = jacobi_eigen(self.to_matrix());
        // Stable descending order; ties keep the Jacobi (coordinate-preferred)
        // axis order so repeated eigenvalues stay reproducible.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
        let mut values = [0.0; 3];
        let mut directions = [[0.0; 3]; 3];
        for (slot, &i) in idx.iter().enumerate() {
            values[slot] = vals[i];
            let mut e = [vecs[0][i], vecs[1][i], vecs[2][i]];
            // Deterministic sign: largest-magnitude component positive.
            let mut dom = 0;
            for c in 1..3 {
                if e[c].abs() > e[dom].abs() {
                    dom = c;
                }
            }
            if e[dom] < 0.0 {
                e = [-e[0], -e[1], -e[2]];
            }
            directions[slot] = e;
        }
        PrincipalDecomposition { values, directions }
    }

    /// Projection onto non-negative principal values.
    pub fn tensile_part(&self) -> Self {
        let p = self.principal();
        let mut out = Self::ZERO;
        for k in 0..3 {
            let lam = ramp(p.values[k]);
            if lam != 0.0 {
                out += rank_one(lam, &p.directions[k]);
            }
        }
        out
    }

    /// Projection onto non-positive principal values.
    pub fn compressive_part(&self) -> Self {
        let p = self.principal();
        let mut out = Self::ZERO;
        for k in 0..3 {
            let lam = -ramp(-p.values[k]);
            if lam != 0.0 {
                out += rank_one(lam, &p.directions[k]);
            }
        }
        out
    }
}

fn rank_one(lam: f64, e: &[f64; 3]) -> SymTensor3 {
    SymTensor3::new(
        lam * e[0] * e[0],
        lam * e[1] * e[1],
        lam * e[2] * e[2],
        lam * e[0] * e[1],
        lam * e[1] * e[2],
        lam * e[2] * e[0],
    )
}

/// Macaulay bracket: x for x > 0, else 0.
pub fn ramp(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

impl Add for SymTensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.xx + o.xx,
            self.yy + o.yy,
            self.zz + o.zz,
            self.xy + o.xy,
            self.yz + o.yz,
            self.zx + o.zx,
        )
    }
}

impl AddAssign for SymTensor3 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for SymTensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for SymTensor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = Self;
    fn mul(self, f: f64) -> Self {
        Self::new(
            self.xx * f,
            self.yy * f,
            self.zz * f,
            self.xy * f,
            self.yz * f,
            self.zx * f,
        )
    }
}

/// Eigen-pairs of a symmetric tensor, values descending, directions
/// orthonormal.
#[derive(Debug, Clone, Copy)]
pub struct PrincipalDecomposition {
    pub values: [f64; 3],
    pub directions: [[f64; 3]; 3],
}

impl PrincipalDecomposition {
    /// Sum of lambda_k e_k (x) e_k.
    pub fn reassemble(&self) -> SymTensor3 {
        let mut out = SymTensor3::ZERO;
        for k in 0..3 {
            out += rank_one(self.values[k], &self.directions[k]);
        }
        out
    }
}

/// Cyclic Jacobi iteration. Returns (diagonal values, eigenvector columns).
/// Diagonal inputs rotate zero times, so coordinate axes come back verbatim.
fn jacobi_eigen(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for _ in 0..64 {
        let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            a[p][p] -= t * apq;
            a[q][q] += t * apq;
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            let r = 3 - p - q;
            let arp = a[r][p];
            let arq = a[r][q];
            a[r][p] = c * arp - s * arq;
            a[p][r] = a[r][p];
            a[r][q] = s * arp + c * arq;
            a[q][r] = a[r][q];
            for row in 0..3 {
                let vrp = v[row][p];
                let vrq = v[row][q];
                v[row][p] = c * vrp - s * vrq;
                v[row][q] = s * vrp + c * vrq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Rank-4 operator on symmetric tensors, stored as a 6x6 matrix in the Mandel
/// basis. Symmetry of the operator is symmetry of the matrix; no shear-factor
/// bookkeeping is needed anywhere downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent {
    pub m: [[f64; 6]; 6],
}

impl Tangent {
    pub const ZERO: Self = Self { m: [[0.0; 6]; 6] };

    pub fn identity() -> Self {
        let mut m = [[0.0; 6]; 6];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { m }
    }

    /// Deviatoric projector P = I - 1/3 i (x) i.
    pub fn dev_projector() -> Self {
        let mut t = Self::identity();
        for i in 0..3 {
            for j in 0..3 {
                t.m[i][j] -= 1.0 / 3.0;
            }
        }
        t
    }

    /// Volumetric projector 1/3 i (x) i.
    pub fn vol_projector() -> Self {
        let mut m = [[0.0; 6]; 6];
        for row in m.iter_mut().take(3) {
            for e in row.iter_mut().take(3) {
                *e = 1.0 / 3.0;
            }
        }
        Self { m }
    }

    /// Dyadic product a (x) b in the Mandel basis.
    pub fn outer(a: &SymTensor3, b: &SymTensor3) -> Self {
        let av = a.to_mandel();
        let bv = b.to_mandel();
        let mut m = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] = av[i] * bv[j];
            }
        }
        Self { m }
    }

    pub fn apply(&self, t: &SymTensor3) -> SymTensor3 {
        let v = t.to_mandel();
        let mut out = [0.0; 6];
        for i in 0..6 {
            for j in 0..6 {
                out[i] += self.m[i][j] * v[j];
            }
        }
        SymTensor3::from_mandel(&out)
    }

    /// Matrix product self * rhs.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut m = [[0.0; 6]; 6];
        for i in 0..6 {
            for k in 0..6 {
                let a = self.m[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..6 {
                    m[i][j] += a * rhs.m[k][j];
                }
            }
        }
        Self { m }
    }

    pub fn transpose(&self) -> Self {
        let mut m = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] = self.m[j][i];
            }
        }
        Self { m }
    }

    pub fn symmetrized(&self) -> Self {
        let t = self.transpose();
        (*self + t) * 0.5
    }

    pub fn frob_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

impl Add for Tangent {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self.m;
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] += o.m[i][j];
            }
        }
        Self { m }
    }
}

impl Sub for Tangent {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o * -1.0
    }
}

impl Mul<f64> for Tangent {
    type Output = Self;
    fn mul(self, f: f64) -> Self {
        let mut m = self.m;
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e *= f;
            }
        }
        Self { m }
    }
}
