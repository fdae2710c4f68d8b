//! Momentum-balance assembly: strain-displacement operators, Gauss-point
//! state, external loads, and the tangent stiffness.
//!
//! Displacements use three dofs per node, `dof = 3 * node + direction`.
//! Strain and stress pass through the six-component Mandel convention, so the
//! per-node block of the strain-displacement matrix `B` carries `1/sqrt(2)`
//! on the shear rows and `B^T s` is work-conjugate without extra weights.
//! The dilatation rows of `B` are replaced by their element volume average
//! (mean-dilatation treatment), which keeps coarse meshes from locking under
//! isochoric plastic flow while leaving affine fields exact. The stiffness
//! integrates `B^T (S D) B`, where `D` is the algorithmic effective-stress
//! tangent and `S` the nominal scaling of the frozen damage state; the
//! product is symmetrized element by element before scatter.

use nalgebra_sparse::CooMatrix;
use plastdam::damage::DamageState;
use plastdam::material::MaterialParams;
use plastdam::plasticity::{PlasticState, SolverConfig, UpdateResult};
use plastdam::tensor::SymTensor3;

use crate::mesh::Mesh;
use crate::shape::{face_gauss, gauss_points, quad_derivs, quad_values, shape_eval, NGAUSS};
use crate::FemError;

pub fn dof(node: usize, dir: usize) -> usize {
    3 * node + dir
}

/// Committed history of one Gauss point.
#[derive(Debug, Clone)]
pub struct GaussPointRecord {
    pub plastic: PlasticState,
    pub damage: DamageState,
    /// Effective stress at the last committed state.
    pub sigma_eff: SymTensor3,
}

impl GaussPointRecord {
    pub fn virgin(n_backstresses: usize) -> Self {
        Self {
            plastic: PlasticState::new(n_backstresses),
            damage: DamageState::virgin(),
            sigma_eff: SymTensor3::ZERO,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dirichlet {
    pub node: usize,
    pub dir: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PointLoad {
    pub node: usize,
    pub dir: usize,
    pub value: f64,
}

/// Uniform traction vector on one boundary face, force per area.
#[derive(Debug, Clone, Copy)]
pub struct FaceTraction {
    pub element: usize,
    pub face: usize,
    pub traction: [f64; 3],
}

#[derive(Debug, Clone, Default)]
pub struct Loads {
    pub dirichlet: Vec<Dirichlet>,
    pub point: Vec<PointLoad>,
    pub tractions: Vec<FaceTraction>,
}

impl Loads {
    pub fn fix_nodes(&mut self, nodes: &[usize], dirs: &[usize]) {
        for &node in nodes {
            for &dir in dirs {
                self.dirichlet.push(Dirichlet { node, dir, value: 0.0 });
            }
        }
    }

    pub fn prescribe_nodes(&mut self, nodes: &[usize], dir: usize, value: f64) {
        for &node in nodes {
            self.dirichlet.push(Dirichlet { node, dir, value });
        }
    }
}

/// Split of the global dofs into free unknowns and prescribed values.
#[derive(Debug, Clone)]
pub struct DofPartition {
    /// Global dof of each free unknown.
    pub free: Vec<usize>,
    /// Free index per global dof, `None` when prescribed.
    pub index: Vec<Option<usize>>,
    pub prescribed: Vec<(usize, f64)>,
}

impl DofPartition {
    pub fn new(nnodes: usize, dirichlet: &[Dirichlet]) -> Result<Self, FemError> {
        let n = 3 * nnodes;
        let mut value: Vec<Option<f64>> = vec![None; n];
        for d in dirichlet {
            if d.node >= nnodes || d.dir >= 3 {
                return Err(FemError::Mesh(format!(
                    "Dirichlet constraint on node {} dir {} is out of range",
                    d.node, d.dir
                )));
            }
            let g = dof(d.node, d.dir);
            if let Some(prev) = value[g] {
                if prev != d.value {
                    return Err(FemError::Mesh(format!(
                        "conflicting Dirichlet values {prev} and {} on node {} dir {}",
                        d.value, d.node, d.dir
                    )));
                }
            }
            value[g] = Some(d.value);
        }
        let mut free = Vec::new();
        let mut index = vec![None; n];
        let mut prescribed = Vec::new();
        for (g, v) in value.iter().enumerate() {
            match v {
                Some(val) => prescribed.push((g, *val)),
                None => {
                    index[g] = Some(free.len());
                    free.push(g);
                }
            }
        }
        Ok(Self {
            free,
            index,
            prescribed,
        })
    }

    /// Writes the prescribed values into a full displacement vector.
    pub fn impose(&self, u: &mut [f64]) {
        for &(g, v) in &self.prescribed {
            u[g] = v;
        }
    }
}

/// Consistent nodal forces of the point loads and face tractions.
pub fn external_force(mesh: &Mesh, loads: &Loads) -> Result<Vec<f64>, FemError> {
    let mut f = vec![0.0; 3 * mesh.nodes.len()];
    for p in &loads.point {
        if p.node >= mesh.nodes.len() || p.dir >= 3 {
            return Err(FemError::Mesh(format!(
                "point load on node {} dir {} is out of range",
                p.node, p.dir
            )));
        }
        f[dof(p.node, p.dir)] += p.value;
    }
    for t in &loads.tractions {
        if t.element >= mesh.elements.len() || t.face >= 6 {
            return Err(FemError::Mesh(format!(
                "traction on element {} face {} is out of range",
                t.element, t.face
            )));
        }
        let nodes = mesh.face_nodes(t.element, t.face);
        let corners: Vec<[f64; 3]> = nodes.iter().map(|&n| mesh.nodes[n]).collect();
        for (xi, w) in face_gauss() {
            let n = quad_values(xi);
            let d = quad_derivs(xi);
            let mut t1 = [0.0; 3];
            let mut t2 = [0.0; 3];
            for (da, p) in d.iter().zip(&corners) {
                for i in 0..3 {
                    t1[i] += da[0] * p[i];
                    t2[i] += da[1] * p[i];
                }
            }
            let cx = t1[1] * t2[2] - t1[2] * t2[1];
            let cy = t1[2] * t2[0] - t1[0] * t2[2];
            let cz = t1[0] * t2[1] - t1[1] * t2[0];
            let da = (cx * cx + cy * cy + cz * cz).sqrt();
            for (a, &node) in nodes.iter().enumerate() {
                for i in 0..3 {
                    f[dof(node, i)] += n[a] * t.traction[i] * da * w;
                }
            }
        }
    }
    Ok(f)
}

/// Mandel strain-displacement rows for one node gradient.
fn b_block(g: &[f64; 3]) -> [[f64; 3]; 6] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [g[0], 0.0, 0.0],
        [0.0, g[1], 0.0],
        [0.0, 0.0, g[2]],
        [s * g[1], s * g[0], 0.0],
        [0.0, s * g[2], s * g[1]],
        [s * g[2], 0.0, s * g[0]],
    ]
}

/// Trial state of one Gauss point inside a Newton iteration.
#[derive(Debug, Clone)]
pub struct GpTrial {
    pub update: UpdateResult,
    pub sigma_nom: SymTensor3,
}

/// One full residual (and optionally stiffness) assembly pass.
pub struct Assembled {
    /// Internal force on all dofs.
    pub f_int: Vec<f64>,
    pub trial: Vec<Vec<GpTrial>>,
    /// Stiffness on the free dofs, present when requested.
    pub stiffness: Option<CooMatrix<f64>>,
}

/// Integrates every Gauss point from its committed record at the strain of
/// `u` with damage frozen, scattering internal force and tangent stiffness.
#[allow(clippy::too_many_arguments)]
pub fn assemble(
    mesh: &Mesh,
    materials: &[MaterialParams],
    cfg: &SolverConfig,
    records: &[Vec<GaussPointRecord>],
    frozen_damage: &[Vec<DamageState>],
    u: &[f64],
    part: &DofPartition,
    with_stiffness: bool,
) -> Result<Assembled, FemError> {
    let nf = part.free.len();
    let mut f_int = vec![0.0; 3 * mesh.nodes.len()];
    let mut coo = with_stiffness.then(|| CooMatrix::new(nf, nf));
    let mut trial = Vec::with_capacity(mesh.elements.len());

    for (e, conn) in mesh.elements.iter().enumerate() {
        let mat = materials
            .get(mesh.materials[e])
            .ok_or_else(|| FemError::Mesh(format!("element {e} uses undefined material slot {}", mesh.materials[e])))?;
        let coords = mesh.element_coords(e);
        let mut ue = [0.0; 24];
        for (a, &n) in conn.iter().enumerate() {
            for i in 0..3 {
                ue[3 * a + i] = u[dof(n, i)];
            }
        }
        let mut fe = [0.0; 24];
        let mut ke = [[0.0; 24]; 24];
        let mut gp_trials = Vec::with_capacity(NGAUSS);

        // Element volume and volume-averaged shape gradients for the
        // mean-dilatation rows of B.
        let gauss = gauss_points();
        let mut evals = [None; NGAUSS];
        let mut volume = 0.0;
        let mut gbar = [0.0; 24];
        for (slot, (xi, w)) in evals.iter_mut().zip(gauss) {
            let ev = shape_eval(&coords, xi).map_err(|s| FemError::SingularJacobian {
                element: e,
                detj: s.detj,
            })?;
            let dv = ev.detj * w;
            volume += dv;
            for (a, ga) in ev.grad.iter().enumerate() {
                for i in 0..3 {
                    gbar[3 * a + i] += ga[i] * dv;
                }
            }
            *slot = Some(ev);
        }
        for v in &mut gbar {
            *v /= volume;
        }

        for (g, (_, w)) in gauss.into_iter().enumerate() {
            let ev = evals[g].expect("evaluated above");
            let dv = ev.detj * w;
            let mut b = [[0.0; 24]; 6];
            for (a, ga) in ev.grad.iter().enumerate() {
                let blk = b_block(ga);
                for r in 0..6 {
                    for c in 0..3 {
                        b[r][3 * a + c] = blk[r][c];
                    }
                }
            }
            // Swap the pointwise dilatation for its element average: column
            // 3a+i sums grad_a[i] over the normal rows.
            for (c, &gb) in gbar.iter().enumerate() {
                let shift = (gb - (b[0][c] + b[1][c] + b[2][c])) / 3.0;
                for row in b.iter_mut().take(3) {
                    row[c] += shift;
                }
            }
            let mut em = [0.0; 6];
            for r in 0..6 {
                em[r] = b[r].iter().zip(&ue).map(|(bi, ui)| bi * ui).sum();
            }
            let eps = SymTensor3::from_mandel(&em);

            let update = mat
                .plasticity
                .integrate(&records[e][g].plastic, &eps, cfg)
                .map_err(|source| FemError::Material { element: e, gp: g, source })?;
            let dmg = &frozen_damage[e][g];
            let sigma_nom = mat.damage.map(&update.sigma_eff, dmg);
            let sm = sigma_nom.to_mandel();
            for (c, fc) in fe.iter_mut().enumerate() {
                let mut v = 0.0;
                for r in 0..6 {
                    v += b[r][c] * sm[r];
                }
                *fc += v * dv;
            }

            if with_stiffness {
                let scale = mat.damage.nominal_scaling(dmg, update.sigma_eff.mean());
                let m = scale.compose(&update.tangent);
                // K_e += B^T (S D) B dv, built through the 6x24 product first.
                let mut mb = [[0.0; 24]; 6];
                for r in 0..6 {
                    for c in 0..24 {
                        let mut v = 0.0;
                        for k in 0..6 {
                            v += m.m[r][k] * b[k][c];
                        }
                        mb[r][c] = v;
                    }
                }
                for r in 0..24 {
                    for c in 0..24 {
                        let mut v = 0.0;
                        for k in 0..6 {
                            v += b[k][r] * mb[k][c];
                        }
                        ke[r][c] += v * dv;
                    }
                }
            }
            gp_trials.push(GpTrial { update, sigma_nom });
        }

        for (a, &n) in conn.iter().enumerate() {
            for i in 0..3 {
                f_int[dof(n, i)] += fe[3 * a + i];
            }
        }
        if let Some(coo) = coo.as_mut() {
            for r in 0..24 {
                let gr = dof(conn[r / 3], r % 3);
                let Some(fr) = part.index[gr] else { continue };
                for c in 0..24 {
                    let gc = dof(conn[c / 3], c % 3);
                    let Some(fc) = part.index[gc] else { continue };
                    // Element-level symmetrization of the unsymmetric tangent.
                    coo.push(fr, fc, 0.5 * (ke[r][c] + ke[c][r]));
                }
            }
        }
        trial.push(gp_trials);
    }

    Ok(Assembled {
        f_int,
        trial,
        stiffness: coo,
    })
}
