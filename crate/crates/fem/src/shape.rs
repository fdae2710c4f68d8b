//! Trilinear hexahedron shape functions and Gauss quadrature.
//!
//! Corner `a` carries the sign triple `(xi_a, eta_a, zeta_a)` and the basis
//! `N_a = (1 + xi_a xi)(1 + eta_a eta)(1 + zeta_a zeta) / 8`. The 2x2x2 Gauss
//! rule places one point per octant at `+-1/sqrt(3)` with unit weight, indexed
//! in the same corner order. Physical gradients come from the isoparametric
//! Jacobian `J_ij = dx_i/dxi_j`; a non-positive or non-finite determinant is
//! reported so assembly can name the offending element.

/// Sign triples of the eight corners, matching mesh connectivity order.
pub const CORNER_SIGNS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

pub const NGAUSS: usize = 8;

const G: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)

/// Quadrature points and weights of the 2x2x2 rule, one per octant.
pub fn gauss_points() -> [([f64; 3], f64); NGAUSS] {
    let mut pts = [([0.0; 3], 1.0); NGAUSS];
    for (p, s) in pts.iter_mut().zip(&CORNER_SIGNS) {
        p.0 = [G * s[0], G * s[1], G * s[2]];
    }
    pts
}

pub fn shape_values(xi: [f64; 3]) -> [f64; 8] {
    let mut n = [0.0; 8];
    for (na, s) in n.iter_mut().zip(&CORNER_SIGNS) {
        *na = 0.125 * (1.0 + s[0] * xi[0]) * (1.0 + s[1] * xi[1]) * (1.0 + s[2] * xi[2]);
    }
    n
}

/// Derivatives `dN_a/dxi_j` in the reference cube.
pub fn shape_derivs(xi: [f64; 3]) -> [[f64; 3]; 8] {
    let mut d = [[0.0; 3]; 8];
    for (da, s) in d.iter_mut().zip(&CORNER_SIGNS) {
        let fx = 1.0 + s[0] * xi[0];
        let fy = 1.0 + s[1] * xi[1];
        let fz = 1.0 + s[2] * xi[2];
        *da = [
            0.125 * s[0] * fy * fz,
            0.125 * fx * s[1] * fz,
            0.125 * fx * fy * s[2],
        ];
    }
    d
}

#[derive(Debug, Clone, Copy)]
pub struct SingularJacobian {
    pub detj: f64,
}

/// Shape values, physical gradients `dN_a/dx_i`, and `det J` at one point.
#[derive(Debug, Clone, Copy)]
pub struct ShapeEval {
    pub n: [f64; 8],
    pub grad: [[f64; 3]; 8],
    pub detj: f64,
}

pub fn shape_eval(coords: &[[f64; 3]; 8], xi: [f64; 3]) -> Result<ShapeEval, SingularJacobian> {
    let n = shape_values(xi);
    let dref = shape_derivs(xi);
    let mut j = [[0.0; 3]; 3];
    for (x, d) in coords.iter().zip(&dref) {
        for r in 0..3 {
            for c in 0..3 {
                j[r][c] += x[r] * d[c];
            }
        }
    }
    let detj = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
        - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    if !(detj > 0.0) || !detj.is_finite() {
        return Err(SingularJacobian { detj });
    }
    let inv = [
        [
            (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / detj,
            (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / detj,
            (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / detj,
        ],
        [
            (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / detj,
            (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / detj,
            (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / detj,
        ],
        [
            (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / detj,
            (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / detj,
            (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / detj,
        ],
    ];
    // dN/dx_i = sum_j dN/dxi_j * dxi_j/dx_i, and inv[j][i] = dxi_j/dx_i.
    let mut grad = [[0.0; 3]; 8];
    for (ga, da) in grad.iter_mut().zip(&dref) {
        for i in 0..3 {
            ga[i] = da[0] * inv[0][i] + da[1] * inv[1][i] + da[2] * inv[2][i];
        }
    }
    Ok(ShapeEval { n, grad, detj })
}

/// Bilinear quad basis for face integration, corners `(-1,-1),(1,-1),(1,1),(-1,1)`.
pub fn quad_values(xi: [f64; 2]) -> [f64; 4] {
    [
        0.25 * (1.0 - xi[0]) * (1.0 - xi[1]),
        0.25 * (1.0 + xi[0]) * (1.0 - xi[1]),
        0.25 * (1.0 + xi[0]) * (1.0 + xi[1]),
        0.25 * (1.0 - xi[0]) * (1.0 + xi[1]),
    ]
}

pub fn quad_derivs(xi: [f64; 2]) -> [[f64; 2]; 4] {
    [
        [-0.25 * (1.0 - xi[1]), -0.25 * (1.0 - xi[0])],
        [0.25 * (1.0 - xi[1]), -0.25 * (1.0 + xi[0])],
        [0.25 * (1.0 + xi[1]), 0.25 * (1.0 + xi[0])],
        [-0.25 * (1.0 + xi[1]), 0.25 * (1.0 - xi[0])],
    ]
}

pub fn face_gauss() -> [([f64; 2], f64); 4] {
    [
        ([-G, -G], 1.0),
        ([G, -G], 1.0),
        ([G, G], 1.0),
        ([-G, G], 1.0),
    ]
}
