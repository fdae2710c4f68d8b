//! Hexahedral mesh container, structured box generator, and plain-text IO.
//!
//! Element connectivity lists eight node indices in the standard trilinear
//! order: the four nodes of the bottom face counter-clockwise about +z, then
//! the top face in the same order. The text format is line-oriented:
//!
//! ```text
//! nodes N elements M
//! <node id> <x> <y> <z>          (N lines, ids 0..N-1 in order)
//! <elem id> <n1> ... <n8> <mat>  (M lines, ids 0..M-1 in order)
//! ```
//!
//! Coordinates are written with the shortest decimal representation that
//! round-trips `f64` exactly, so write-then-parse reproduces the mesh bit for
//! bit.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::FemError;

/// Local node indices of the six hexahedron faces, each a closed quad loop.
/// Face order: -x, +x, -y, +y, -z, +z.
pub const FACE_NODES: [[usize; 4]; 6] = [
    [0, 4, 7, 3],
    [1, 2, 6, 5],
    [0, 1, 5, 4],
    [3, 7, 6, 2],
    [0, 3, 2, 1],
    [4, 5, 6, 7],
];

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 3]>,
    /// Node indices per element, trilinear corner order.
    pub elements: Vec<[usize; 8]>,
    /// Material slot per element (an index the caller interprets).
    pub materials: Vec<usize>,
}

impl Mesh {
    pub fn new(
        nodes: Vec<[f64; 3]>,
        elements: Vec<[usize; 8]>,
        materials: Vec<usize>,
    ) -> Result<Self, FemError> {
        if materials.len() != elements.len() {
            return Err(FemError::Mesh(format!(
                "{} elements but {} material entries",
                elements.len(),
                materials.len()
            )));
        }
        for (e, conn) in elements.iter().enumerate() {
            for &n in conn {
                if n >= nodes.len() {
                    return Err(FemError::Mesh(format!(
                        "element {e} references node {n} but only {} nodes exist",
                        nodes.len()
                    )));
                }
            }
        }
        Ok(Self {
            nodes,
            elements,
            materials,
        })
    }

    /// Structured grid of `nx * ny * nz` hexahedra filling `[0,lx] x [0,ly] x [0,lz]`,
    /// all elements in material slot 0.
    pub fn box_grid(lx: f64, ly: f64, lz: f64, nx: usize, ny: usize, nz: usize) -> Self {
        assert!(nx > 0 && ny > 0 && nz > 0, "grid needs at least one element per axis");
        assert!(lx > 0.0 && ly > 0.0 && lz > 0.0, "box lengths must be positive");
        let (mx, my, mz) = (nx + 1, ny + 1, nz + 1);
        let mut nodes = Vec::with_capacity(mx * my * mz);
        for k in 0..mz {
            for j in 0..my {
                for i in 0..mx {
                    nodes.push([
                        lx * i as f64 / nx as f64,
                        ly * j as f64 / ny as f64,
                        lz * k as f64 / nz as f64,
                    ]);
                }
            }
        }
        let id = |i: usize, j: usize, k: usize| i + mx * (j + my * k);
        let mut elements = Vec::with_capacity(nx * ny * nz);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    elements.push([
                        id(i, j, k),
                        id(i + 1, j, k),
                        id(i + 1, j + 1, k),
                        id(i, j + 1, k),
                        id(i, j, k + 1),
                        id(i + 1, j, k + 1),
                        id(i + 1, j + 1, k + 1),
                        id(i, j + 1, k + 1),
                    ]);
                }
            }
        }
        let materials = vec![0; elements.len()];
        Self {
            nodes,
            elements,
            materials,
        }
    }

    /// Keeps elements where `keep(index, centroid)` is true, dropping the rest
    /// and compacting the node list so no orphan nodes remain.
    pub fn retain_elements(&self, mut keep: impl FnMut(usize, [f64; 3]) -> bool) -> Self {
        let mut new_index = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        let mut elements = Vec::new();
        let mut materials = Vec::new();
        for (e, conn) in self.elements.iter().enumerate() {
            if !keep(e, self.element_centroid(e)) {
                continue;
            }
            let mut mapped = [0usize; 8];
            for (slot, &n) in mapped.iter_mut().zip(conn) {
                if new_index[n] == usize::MAX {
                    new_index[n] = nodes.len();
                    nodes.push(self.nodes[n]);
                }
                *slot = new_index[n];
            }
            elements.push(mapped);
            materials.push(self.materials[e]);
        }
        Self {
            nodes,
            elements,
            materials,
        }
    }

    pub fn element_centroid(&self, e: usize) -> [f64; 3] {
        let mut c = [0.0; 3];
        for &n in &self.elements[e] {
            for (ci, xi) in c.iter_mut().zip(&self.nodes[n]) {
                *ci += xi / 8.0;
            }
        }
        c
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 3]; 8] {
        let mut coords = [[0.0; 3]; 8];
        for (slot, &n) in coords.iter_mut().zip(&self.elements[e]) {
            *slot = self.nodes[n];
        }
        coords
    }

    /// Node indices whose coordinates satisfy the predicate.
    pub fn nodes_where(&self, mut pred: impl FnMut([f64; 3]) -> bool) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&n| pred(self.nodes[n])).collect()
    }

    /// Global node indices of one face of one element, outward order.
    pub fn face_nodes(&self, elem: usize, face: usize) -> [usize; 4] {
        let conn = &self.elements[elem];
        let mut out = [0usize; 4];
        for (slot, &local) in out.iter_mut().zip(&FACE_NODES[face]) {
            *slot = conn[local];
        }
        out
    }

    /// All `(element, face)` pairs not shared with a neighbouring element.
    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<[usize; 4], usize> = HashMap::new();
        for e in 0..self.elements.len() {
            for f in 0..6 {
                let mut key = self.face_nodes(e, f);
                key.sort_unstable();
                *count.entry(key).or_insert(0) += 1;
            }
        }
        let mut out = Vec::new();
        for e in 0..self.elements.len() {
            for f in 0..6 {
                let mut key = self.face_nodes(e, f);
                key.sort_unstable();
                if count[&key] == 1 {
                    out.push((e, f));
                }
            }
        }
        out
    }

    /// Boundary faces whose four nodes all satisfy the predicate.
    pub fn faces_where(&self, mut pred: impl FnMut([f64; 3]) -> bool) -> Vec<(usize, usize)> {
        self.boundary_faces()
            .into_iter()
            .filter(|&(e, f)| {
                self.face_nodes(e, f)
                    .iter()
                    .all(|&n| pred(self.nodes[n]))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "nodes {} elements {}", self.nodes.len(), self.elements.len()).unwrap();
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(s, "{} {} {} {}", i, p[0], p[1], p[2]).unwrap();
        }
        for (e, conn) in self.elements.iter().enumerate() {
            write!(s, "{e}").unwrap();
            for &n in conn {
                write!(s, " {n}").unwrap();
            }
            writeln!(s, " {}", self.materials[e]).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, FemError> {
        let bad = |msg: String| FemError::Mesh(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty mesh file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "nodes" || h[2] != "elements" {
            return Err(bad(format!("malformed header '{header}'")));
        }
        let n: usize = h[1].parse().map_err(|_| bad(format!("bad node count '{}'", h[1])))?;
        let m: usize = h[3]
            .parse()
            .map_err(|_| bad(format!("bad element count '{}'", h[3])))?;

        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| bad(format!("missing node line {i}")))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad(format!("node line {i} has {} fields, expected 4", f.len())));
            }
            let id: usize = f[0].parse().map_err(|_| bad(format!("bad node id '{}'", f[0])))?;
            if id != i {
                return Err(bad(format!("node ids must be sequential, got {id} at line {i}")));
            }
            let mut p = [0.0; 3];
            for (slot, tok) in p.iter_mut().zip(&f[1..]) {
                *slot = tok
                    .parse()
                    .map_err(|_| bad(format!("bad coordinate '{tok}' in node {i}")))?;
            }
            nodes.push(p);
        }

        let mut elements = Vec::with_capacity(m);
        let mut materials = Vec::with_capacity(m);
        for e in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing element line {e}")))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 10 {
                return Err(bad(format!(
                    "element line {e} has {} fields, expected 10",
                    f.len()
                )));
            }
            let id: usize = f[0].parse().map_err(|_| bad(format!("bad element id '{}'", f[0])))?;
            if id != e {
                return Err(bad(format!("element ids must be sequential, got {id} at line {e}")));
            }
            let mut conn = [0usize; 8];
            for (slot, tok) in conn.iter_mut().zip(&f[1..9]) {
                *slot = tok
                    .parse()
                    .map_err(|_| bad(format!("bad node index '{tok}' in element {e}")))?;
            }
            let mat: usize = f[9]
                .parse()
                .map_err(|_| bad(format!("bad material slot '{}' in element {e}", f[9])))?;
            elements.push(conn);
            materials.push(mat);
        }
        if lines.next().is_some() {
            return Err(bad("trailing content after last element line".into()));
        }
        Self::new(nodes, elements, materials)
    }
}
