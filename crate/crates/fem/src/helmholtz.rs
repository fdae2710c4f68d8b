//! Nonlocal regularization by a screened Poisson (Helmholtz) solve.
//!
//! The nodal field `kbar` satisfies `kbar - ell^2 lap(kbar) = k` with natural
//! (zero-flux) boundaries, discretized as `(M + ell^2 K) kbar = f` where `M`
//! is the row-sum lumped mass matrix, `K` the standard diffusion matrix, and
//! `f_a = integral N_a k dV` with the source sampled at Gauss points. Lumping
//! keeps the operator an M-matrix on cube meshes, so the smoothed field obeys
//! the discrete maximum principle, and `K 1 = 0` makes the lumped volume mean
//! of `kbar` equal the quadrature mean of the source. With `ell = 0` the
//! system is diagonal and the solve reduces to a local least-squares
//! projection of the Gauss-point source onto the nodes.

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::mesh::Mesh;
use crate::shape::{gauss_points, shape_eval, NGAUSS};
use crate::FemError;

/// Nodal nonlocal field together with the length scale that produced it.
#[derive(Debug, Clone)]
pub struct NonlocalField {
    pub values: Vec<f64>,
    pub ell: f64,
}

impl NonlocalField {
    pub fn zero(nnodes: usize, ell: f64) -> Self {
        Self {
            values: vec![0.0; nnodes],
            ell,
        }
    }
}

/// Factorized Helmholtz operator for a fixed mesh and length scale.
///
/// Geometry does not change between solves, so the Cholesky factor and the
/// per-point quadrature data are built once and reused for every source.
pub struct HelmholtzOperator {
    chol: CscCholesky<f64>,
    mass: Vec<f64>,
    /// Shape values and `detJ * w` per element and Gauss point.
    gp_data: Vec<[([f64; 8], f64); NGAUSS]>,
    ell: f64,
    nnodes: usize,
}

impl HelmholtzOperator {
    pub fn new(mesh: &Mesh, ell: f64) -> Result<Self, FemError> {
        if ell < 0.0 || !ell.is_finite() {
            return Err(FemError::Mesh(format!("length scale must be finite and >= 0, got {ell}")));
        }
        let n = mesh.nodes.len();
        let mut coo = CooMatrix::new(n, n);
        let mut mass = vec![0.0; n];
        let mut gp_data = Vec::with_capacity(mesh.elements.len());
        for (e, conn) in mesh.elements.iter().enumerate() {
            let coords = mesh.element_coords(e);
            let mut per_gp = [([0.0; 8], 0.0); NGAUSS];
            for (g, (xi, w)) in gauss_points().into_iter().enumerate() {
                let ev = shape_eval(&coords, xi).map_err(|s| FemError::SingularJacobian {
                    element: e,
                    detj: s.detj,
                })?;
                let dv = ev.detj * w;
                per_gp[g] = (ev.n, dv);
                for (a, &na) in conn.iter().zip(&ev.n) {
                    // Row-sum lumping: sum_b N_a N_b = N_a.
                    mass[*a] += na * dv;
                }
                if ell > 0.0 {
                    let l2 = ell * ell;
                    for (a, ga) in conn.iter().zip(&ev.grad) {
                        for (b, gb) in conn.iter().zip(&ev.grad) {
                            let k = ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2];
                            coo.push(*a, *b, l2 * k * dv);
                        }
                    }
                }
            }
            gp_data.push(per_gp);
        }
        for (a, &m) in mass.iter().enumerate() {
            coo.push(a, a, m);
        }
        let csc = CscMatrix::from(&coo);
        let chol = CscCholesky::factor(&csc)
            .map_err(|e| FemError::LinearSolve(format!("Helmholtz operator not SPD: {e:?}")))?;
        Ok(Self {
            chol,
            mass,
            gp_data,
            ell,
            nnodes: n,
        })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// Lumped nodal masses (integration weights of the nodal field).
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Smooths a Gauss-point source, indexed `source[element][gp]`.
    pub fn solve(&self, mesh: &Mesh, source: &[[f64; NGAUSS]]) -> Result<NonlocalField, FemError> {
        if source.len() != mesh.elements.len() || self.nnodes != mesh.nodes.len() {
            return Err(FemError::Mesh(format!(
                "source for {} elements does not match operator assembled on {}",
                source.len(),
                self.gp_data.len()
            )));
        }
        let mut rhs = vec![0.0; self.nnodes];
        for ((conn, per_gp), src) in mesh.elements.iter().zip(&self.gp_data).zip(source) {
            for ((n, dv), &k) in per_gp.iter().zip(src) {
                for (a, &na) in conn.iter().zip(n) {
                    rhs[*a] += na * k * dv;
                }
            }
        }
        let b = DMatrix::from_column_slice(self.nnodes, 1, &rhs);
        let x = self.chol.solve(&b);
        Ok(NonlocalField {
            values: x.column(0).iter().copied().collect(),
            ell: self.ell,
        })
    }
}

/// One-shot smoothing; prefer [`HelmholtzOperator`] for repeated solves.
pub fn solve_nonlocal(mesh: &Mesh, ell: f64, source: &[[f64; NGAUSS]]) -> Result<NonlocalField, FemError> {
    HelmholtzOperator::new(mesh, ell)?.solve(mesh, source)
}

/// Evaluates a nodal field at every Gauss point of every element.
pub fn interpolate_at_gauss(mesh: &Mesh, values: &[f64]) -> Vec<[f64; NGAUSS]> {
    assert_eq!(values.len(), mesh.nodes.len(), "nodal field length mismatch");
    let mut out = Vec::with_capacity(mesh.elements.len());
    for conn in &mesh.elements {
        let mut at_gp = [0.0; NGAUSS];
        for (g, (xi, _)) in gauss_points().into_iter().enumerate() {
            let n = crate::shape::shape_values(xi);
            at_gp[g] = conn.iter().zip(&n).map(|(&a, &na)| values[a] * na).sum();
        }
        out.push(at_gp);
    }
    out
}

/// Volume average of a Gauss-point field.
pub fn volume_mean_gp(mesh: &Mesh, field: &[[f64; NGAUSS]]) -> Result<f64, FemError> {
    let mut num = 0.0;
    let mut vol = 0.0;
    for (e, src) in field.iter().enumerate() {
        let coords = mesh.element_coords(e);
        for ((xi, w), &k) in gauss_points().into_iter().zip(src) {
            let ev = shape_eval(&coords, xi).map_err(|s| FemError::SingularJacobian {
                element: e,
                detj: s.detj,
            })?;
            num += k * ev.detj * w;
            vol += ev.detj * w;
        }
    }
    Ok(num / vol)
}

/// Volume average of a nodal field using lumped-mass weights.
pub fn volume_mean_nodal(mesh: &Mesh, values: &[f64]) -> Result<f64, FemError> {
    let op = HelmholtzOperator::new(mesh, 0.0)?;
    let num: f64 = op.mass.iter().zip(values).map(|(m, v)| m * v).sum();
    let vol: f64 = op.mass.iter().sum();
    Ok(num / vol)
}
