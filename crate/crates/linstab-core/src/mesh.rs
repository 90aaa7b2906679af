//! Compact oriented cell complexes with metric data.
//!
//! Three families are supported: uniform circles, subdivided icospheres
//! (circumcentric duals with barycentric fallback per non-well-centered
//! triangle) and flat cubical tori up to dimension 4. All complexes are
//! closed. Positive orientation of a cell is defined by the lexicographic
//! order of its vertex tuple; incidence signs follow from that convention.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Signature {
    Riemannian,
    /// Metadata-level Lorentzian support: the designated axis flips its sign
    /// in every Hodge weight. Only cubical tori accept this.
    Lorentzian {
        timelike_axis: usize,
    },
}

/// Extra structure retained by each constructor; the cubical lattice data is
/// what the wedge quadrature and the Fourier homology path key off.
#[derive(Debug, Clone, Serialize)]
pub enum ComplexKind {
    Circle {
        n_edges: usize,
    },
    Icosphere {
        subdivisions: usize,
        /// Triangles whose circumcenter falls outside; these used barycentric
        /// dual weights.
        non_well_centered: Vec<usize>,
    },
    Torus {
        d: usize,
        m_per_axis: usize,
        spacing: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct CellTable {
    /// Sorted vertex tuple per cell; positive orientation is the
    /// lexicographic order of this tuple.
    pub vertices: Vec<Vec<usize>>,
}

impl CellTable {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct CellComplex {
    pub dimension: usize,
    pub signature: Signature,
    pub kind: ComplexKind,
    /// cells[k] lists the k-cells.
    pub cells: Vec<CellTable>,
    /// boundary[k] maps k-chains to (k-1)-chains; boundary[0] is empty.
    pub boundary: Vec<SparseMatrix>,
    /// primal_volumes[k][cell] > 0; 0-cells carry unit measure.
    pub primal_volumes: Vec<Vec<f64>>,
    /// dual_volumes[k][cell] is the measure of the dual (n-k)-cell; the dual
    /// of a top cell is a point with unit measure. Individual entries may be
    /// negative on non-well-centered triangles (signed circumcentric duals).
    pub dual_volumes: Vec<Vec<f64>>,
    pub vertex_coords: Vec<Vec<f64>>,
    /// metric_signs[k][cell]: Hodge weight sign, -1 when a Lorentzian
    /// timelike axis is spanned by the cell.
    pub metric_signs: Vec<Vec<f64>>,
}

/// A chain with integer coefficients, the pairing partner of a cochain.
#[derive(Debug, Clone, Serialize)]
pub struct Chain {
    pub degree: usize,
    pub dual: bool,
    /// (cell id, multiplicity)
    pub coeffs: Vec<(usize, i64)>,
}

impl CellComplex {
    pub fn n_cells(&self, degree: usize) -> usize {
        self.cells[degree].len()
    }

    /// Hodge star ratio |dual cell| / |primal cell| with metric sign.
    pub fn star_weight(&self, degree: usize, cell: usize) -> f64 {
        self.metric_signs[degree][cell] * self.dual_volumes[degree][cell]
            / self.primal_volumes[degree][cell]
    }

    /// Inner-product weights for cochain coefficients of the given degree;
    /// the dual flag selects the reciprocal (dual cells pair against primal
    /// volumes).
    pub fn inner_weights(&self, degree: usize, dual: bool) -> Vec<f64> {
        if !dual {
            (0..self.n_cells(degree))
                .map(|c| self.star_weight(degree, c))
                .collect()
        } else {
            // Dual p-cochains are indexed by primal (n-p)-cells.
            let k = self.dimension - degree;
            (0..self.n_cells(k))
                .map(|c| 1.0 / self.star_weight(k, c))
                .collect()
        }
    }

    /// Checks that the boundary of the boundary vanishes identically.
    /// Incidence entries are small integers, so the products are exact.
    pub fn verify_boundary_squares_to_zero(&self) -> bool {
        for k in 2..=self.dimension {
            let bb = self.boundary[k - 1].matmul(&self.boundary[k]);
            if bb.nnz() != 0 {
                return false;
            }
        }
        true
    }

    /// Signed sum of cochain coefficients over the chain cells. Exact
    /// pairing, no quadrature.
    pub fn chain_integral(&self, values: &ndarray::Array2<f64>, chain: &Chain) -> Vec<f64> {
        let comp = values.ncols();
        let mut out = vec![0.0; comp];
        for &(cell, mult) in &chain.coeffs {
            for j in 0..comp {
                out[j] += mult as f64 * values[[cell, j]];
            }
        }
        out
    }

    /// The number of primal cells a chain of the given degree/flag indexes.
    pub fn chain_index_count(&self, degree: usize, dual: bool) -> usize {
        if dual {
            self.n_cells(self.dimension - degree)
        } else {
            self.n_cells(degree)
        }
    }

    pub fn boundary_of_chain(&self, chain: &Chain) -> Result<Chain> {
        if chain.degree == 0 {
            return Ok(Chain {
                degree: 0,
                dual: chain.dual,
                coeffs: Vec::new(),
            });
        }
        let mat = if !chain.dual {
            self.boundary[chain.degree].clone()
        } else {
            // Boundary of dual chains is the transpose of the dual coboundary
            // one degree down (see calculus::exterior_derivative).
            let k = self.dimension - chain.degree + 1;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            self.boundary[k].transpose().scale(sign)
        };
        let mat_t = mat.transpose();
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for &(cell, mult) in &chain.coeffs {
            for (c, v) in mat_t.row(cell) {
                *acc.entry(c).or_insert(0) += mult * v as i64;
            }
        }
        let mut coeffs: Vec<(usize, i64)> = acc.into_iter().filter(|&(_, m)| m != 0).collect();
        coeffs.sort_unstable();
        Ok(Chain {
            degree: chain.degree - 1,
            dual: chain.dual,
            coeffs,
        })
    }

    /// JSON document with cells, incidence triplets, volumes and coordinates,
    /// for debugging and for external verification scripts.
    pub fn export_json(&self) -> serde_json::Value {
        let incidence: Vec<serde_json::Value> = (1..=self.dimension)
            .map(|k| {
                let trip: Vec<(usize, usize, i64)> = self.boundary[k]
                    .triplets()
                    .into_iter()
                    .map(|(r, c, v)| (r, c, v as i64))
                    .collect();
                serde_json::json!({ "degree": k, "triplets": trip })
            })
            .collect();
        serde_json::json!({
            "dimension": self.dimension,
            "signature": self.signature,
            "kind": self.kind,
            "cells": self.cells,
            "incidence": incidence,
            "primal_volumes": self.primal_volumes,
            "dual_volumes": self.dual_volumes,
            "coords": self.vertex_coords,
        })
    }
}

fn simplicial_boundary(cells: &CellTable, lower: &CellTable) -> SparseMatrix {
    let index: HashMap<&[usize], usize> = lower
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let mut triplets = Vec::new();
    for (id, verts) in cells.vertices.iter().enumerate() {
        for omit in 0..verts.len() {
            let mut face: Vec<usize> = verts.clone();
            face.remove(omit);
            let fid = index[face.as_slice()];
            let sign = if omit % 2 == 0 { 1.0 } else { -1.0 };
            triplets.push((fid, id, sign));
        }
    }
    SparseMatrix::from_triplets(lower.len(), cells.len(), triplets)
}

/// Uniform 1-complex on the circle with intrinsic edge length
/// circumference / n_edges. Combinatorially and metrically identical to
/// `build_torus(1, n_edges, circumference, Riemannian)`.
pub fn build_circle(n_edges: usize, circumference: f64) -> Result<CellComplex> {
    if n_edges < 3 {
        return Err(Error::MeshConstruction(format!(
            "circle needs at least 3 edges, got {n_edges}"
        )));
    }
    if !(circumference > 0.0) {
        return Err(Error::MeshConstruction(
            "circumference must be positive".into(),
        ));
    }
    let mut complex = build_torus(1, n_edges, circumference, Signature::Riemannian)?;
    complex.kind = ComplexKind::Circle { n_edges };
    Ok(complex)
}

/// Axis subsets of {0..d-1} of size k in lexicographic order.
pub fn axis_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, d: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..d {
            current.push(i);
            rec(i + 1, d, k, current, out);
            current.pop();
        }
    }
    rec(0, d, k, &mut current, &mut out);
    out
}

/// Lattice helpers for the cubical torus: cell id = set_index * m^d + vertex
/// linear index, vertex linear index in row-major coordinate order.
#[derive(Debug, Clone)]
pub struct TorusIndex {
    pub d: usize,
    pub m: usize,
    pub subsets: Vec<Vec<Vec<usize>>>,
}

impl TorusIndex {
    pub fn new(d: usize, m: usize) -> Self {
        let subsets = (0..=d).map(|k| axis_subsets(d, k)).collect();
        Self { d, m, subsets }
    }

    pub fn n_vertices(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn vertex_id(&self, coords: &[usize]) -> usize {
        let mut id = 0;
        for &c in coords {
            id = id * self.m + (c % self.m);
        }
        id
    }

    pub fn vertex_coords(&self, mut id: usize) -> Vec<usize> {
        let mut coords = vec![0; self.d];
        for i in (0..self.d).rev() {
            coords[i] = id % self.m;
            id /= self.m;
        }
        coords
    }

    pub fn cell_id(&self, set_index: usize, vertex: usize) -> usize {
        set_index * self.n_vertices() + vertex
    }

    pub fn cell_parts(&self, id: usize) -> (usize, usize) {
        let nv = self.n_vertices();
        (id / nv, id % nv)
    }

    pub fn shifted(&self, vertex: usize, axis: usize, by: usize) -> usize {
        let mut coords = self.vertex_coords(vertex);
        coords[axis] = (coords[axis] + by) % self.m;
        self.vertex_id(&coords)
    }

    pub fn set_index(&self, degree: usize, axes: &[usize]) -> usize {
        self.subsets[degree]
            .iter()
            .position(|s| s == axes)
            .expect("axis set not found")
    }
}

/// Corner vertices of the cube (base, axes), sorted ascending.
fn cube_corners(idx: &TorusIndex, base: usize, axes: &[usize]) -> Vec<usize> {
    let mut corners = vec![base];
    for &a in axes {
        let mut next: Vec<usize> = corners.iter().map(|&v| idx.shifted(v, a, 1)).collect();
        corners.append(&mut next);
    }
    corners.sort_unstable();
    corners.dedup();
    corners
}

/// Flat cubical torus T^d with m cells per axis and uniform spacing.
pub fn build_torus(
    d: usize,
    m_per_axis: usize,
    side_length: f64,
    signature: Signature,
) -> Result<CellComplex> {
    if d == 0 || d > 4 {
        return Err(Error::MeshConstruction(format!(
            "torus dimension {d} outside 1..=4"
        )));
    }
    if m_per_axis < 3 {
        return Err(Error::MeshConstruction(format!(
            "need at least 3 cells per axis, got {m_per_axis}"
        )));
    }
    if !(side_length > 0.0) {
        return Err(Error::MeshConstruction("side length must be positive".into()));
    }
    let top_cells = (m_per_axis as f64).powi(d as i32);
    if top_cells > 1e5 {
        return Err(Error::MeshConstruction(format!(
            "mesh of {top_cells} top cells exceeds the 1e5 desk-scale budget"
        )));
    }
    if let Signature::Lorentzian { timelike_axis } = signature {
        if timelike_axis >= d {
            return Err(Error::MeshConstruction(format!(
                "timelike axis {timelike_axis} out of range for T^{d}"
            )));
        }
    }

    let idx = TorusIndex::new(d, m_per_axis);
    let nv = idx.n_vertices();
    let h = side_length / m_per_axis as f64;

    let mut cells = Vec::with_capacity(d + 1);
    let mut primal_volumes = Vec::with_capacity(d + 1);
    let mut dual_volumes = Vec::with_capacity(d + 1);
    let mut metric_signs = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let sets = &idx.subsets[k];
        let mut table = Vec::with_capacity(sets.len() * nv);
        let mut signs = Vec::with_capacity(sets.len() * nv);
        for set in sets {
            let sign = match signature {
                Signature::Riemannian => 1.0,
                Signature::Lorentzian { timelike_axis } => {
                    if set.contains(&timelike_axis) {
                        -1.0
                    } else {
                        1.0
                    }
                }
            };
            for v in 0..nv {
                table.push(cube_corners(&idx, v, set));
                signs.push(sign);
            }
        }
        cells.push(CellTable { vertices: table });
        primal_volumes.push(vec![h.powi(k as i32); sets.len() * nv]);
        dual_volumes.push(vec![h.powi((d - k) as i32); sets.len() * nv]);
        metric_signs.push(signs);
    }

    // Cubical boundary via the product rule
    // d(e_{i1} x ... x e_{ik}) = sum_j (-1)^{j-1} (top_j - bottom_j).
    let mut boundary = vec![SparseMatrix::zeros(0, 0)];
    for k in 1..=d {
        let sets = idx.subsets[k].clone();
        let mut triplets = Vec::new();
        for (si, set) in sets.iter().enumerate() {
            for v in 0..nv {
                let id = idx.cell_id(si, v);
                for (j, &axis) in set.iter().enumerate() {
                    let mut sub = set.clone();
                    sub.remove(j);
                    let sub_si = idx.set_index(k - 1, &sub);
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let top = idx.cell_id(sub_si, idx.shifted(v, axis, 1));
                    let bottom = idx.cell_id(sub_si, v);
                    triplets.push((top, id, sign));
                    triplets.push((bottom, id, -sign));
                }
            }
        }
        boundary.push(SparseMatrix::from_triplets(
            cells[k - 1].len(),
            cells[k].len(),
            triplets,
        ));
    }

    let vertex_coords = (0..nv)
        .map(|v| {
            idx.vertex_coords(v)
                .into_iter()
                .map(|c| c as f64 * h)
                .collect()
        })
        .collect();

    let complex = CellComplex {
        dimension: d,
        signature,
        kind: ComplexKind::Torus {
            d,
            m_per_axis,
            spacing: h,
        },
        cells,
        boundary,
        primal_volumes,
        dual_volumes,
        vertex_coords,
        metric_signs,
    };
    debug_assert!(complex.verify_boundary_squares_to_zero());
    Ok(complex)
}

fn sub(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Circumcenter of a triangle, in ambient 3-space (lies in the triangle
/// plane).
fn circumcenter(a: &[f64], b: &[f64], c: &[f64]) -> [f64; 3] {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ab2 = dot3(&ab, &ab);
    let ac2 = dot3(&ac, &ac);
    let n = cross3(&ab, &ac);
    let n2 = dot3(&n, &n);
    // center = a + (|ac|^2 (n x ab) + |ab|^2 (ac x n)) / (2 |n|^2)
    let t1 = cross3(&n, &ab);
    let t2 = cross3(&ac, &n);
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = a[i] + (ac2 * t1[i] + ab2 * t2[i]) / (2.0 * n2);
    }
    out
}

/// Triangulated unit sphere: icosahedron subdivided `subdivisions` times,
/// vertices projected to radius 1. Circumcentric duals, with barycentric
/// weights on any non-well-centered triangle.
pub fn build_icosphere(subdivisions: usize) -> Result<CellComplex> {
    if subdivisions > 6 {
        return Err(Error::MeshConstruction(format!(
            "icosphere subdivision {subdivisions} exceeds the desk-scale cap of 6"
        )));
    }

    // Icosahedron on the unit sphere.
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let s = 1.0 / (1.0 + phi * phi).sqrt();
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut coords: Vec<Vec<f64>> = raw
        .iter()
        .map(|p| vec![p[0] * s, p[1] * s, p[2] * s])
        .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mids = [0usize; 3];
            for (i, (a, b)) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])].iter().enumerate() {
                let key = (*a.min(b), *a.max(b));
                mids[i] = *midpoint.entry(key).or_insert_with(|| {
                    let pa = &coords[key.0];
                    let pb = &coords[key.1];
                    let mut p = vec![
                        (pa[0] + pb[0]) / 2.0,
                        (pa[1] + pb[1]) / 2.0,
                        (pa[2] + pb[2]) / 2.0,
                    ];
                    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                    p.iter_mut().for_each(|x| *x /= r);
                    coords.push(p);
                    coords.len() - 1
                });
            }
            new_faces.push([f[0], mids[0], mids[2]]);
            new_faces.push([f[1], mids[1], mids[0]]);
            new_faces.push([f[2], mids[2], mids[1]]);
            new_faces.push([mids[0], mids[1], mids[2]]);
        }
        faces = new_faces;
    }

    let nv = coords.len();
    let mut face_tuples: Vec<Vec<usize>> = faces
        .iter()
        .map(|f| {
            let mut t = f.to_vec();
            t.sort_unstable();
            t
        })
        .collect();
    face_tuples.sort_unstable();
    face_tuples.dedup();

    let mut edge_set: Vec<Vec<usize>> = Vec::new();
    for f in &face_tuples {
        edge_set.push(vec![f[0], f[1]]);
        edge_set.push(vec![f[0], f[2]]);
        edge_set.push(vec![f[1], f[2]]);
    }
    edge_set.sort_unstable();
    edge_set.dedup();

    let cells = vec![
        CellTable {
            vertices: (0..nv).map(|v| vec![v]).collect(),
        },
        CellTable {
            vertices: edge_set,
        },
        CellTable {
            vertices: face_tuples,
        },
    ];

    let boundary = vec![
        SparseMatrix::zeros(0, 0),
        simplicial_boundary(&cells[1], &cells[0]),
        simplicial_boundary(&cells[2], &cells[1]),
    ];

    // Metric data: chord edge lengths, flat triangle areas, circumcentric
    // dual lengths/areas accumulated per face.
    let edge_index: HashMap<(usize, usize), usize> = cells[1]
        .vertices
        .iter()
        .enumerate()
        .map(|(i, e)| ((e[0], e[1]), i))
        .collect();

    let ne = cells[1].len();
    let nf = cells[2].len();
    let mut edge_len = vec![0.0; ne];
    for (i, e) in cells[1].vertices.iter().enumerate() {
        edge_len[i] = norm3(&sub(&coords[e[1]], &coords[e[0]]));
    }

    let mut face_area = vec![0.0; nf];
    let mut dual_edge = vec![0.0; ne];
    let mut dual_vertex = vec![0.0; nv];
    let mut non_well_centered = Vec::new();

    for (fi, f) in cells[2].vertices.iter().enumerate() {
        let pts = [&coords[f[0]], &coords[f[1]], &coords[f[2]]];
        let ab = sub(pts[1], pts[0]);
        let ac = sub(pts[2], pts[0]);
        let area = 0.5 * norm3(&cross3(&ab, &ac));
        face_area[fi] = area;

        let cc = circumcenter(pts[0], pts[1], pts[2]);
        // Signed distance from the circumcenter to each edge, positive when
        // the circumcenter lies on the same side as the opposite vertex.
        let mut well_centered = true;
        let mut contrib = [[0.0; 2]; 3]; // per local edge: (h_signed, |e|/2)
        for (le, (a, b, opp)) in [
            (f[0], f[1], f[2]),
            (f[0], f[2], f[1]),
            (f[1], f[2], f[0]),
        ]
        .iter()
        .enumerate()
        {
            let pa = &coords[*a];
            let pb = &coords[*b];
            let po = &coords[*opp];
            let eab = sub(pb, pa);
            let elen = norm3(&eab);
            let mid = [
                (pa[0] + pb[0]) / 2.0,
                (pa[1] + pb[1]) / 2.0,
                (pa[2] + pb[2]) / 2.0,
            ];
            let to_cc = sub(&cc, &mid);
            let to_opp = sub(po, &mid);
            // Component of both vectors orthogonal to the edge, within the
            // face plane; the sign is the relative orientation.
            let t = [eab[0] / elen, eab[1] / elen, eab[2] / elen];
            let perp_cc = [
                to_cc[0] - dot3(&to_cc, &t) * t[0],
                to_cc[1] - dot3(&to_cc, &t) * t[1],
                to_cc[2] - dot3(&to_cc, &t) * t[2],
            ];
            let perp_opp = [
                to_opp[0] - dot3(&to_opp, &t) * t[0],
                to_opp[1] - dot3(&to_opp, &t) * t[1],
                to_opp[2] - dot3(&to_opp, &t) * t[2],
            ];
            let h = norm3(&perp_cc) * dot3(&perp_cc, &perp_opp).signum();
            if h < 0.0 {
                well_centered = false;
            }
            contrib[le] = [h, elen / 2.0];
        }

        if well_centered {
            for (le, (a, b, _)) in [
                (f[0], f[1], f[2]),
                (f[0], f[2], f[1]),
                (f[1], f[2], f[0]),
            ]
            .iter()
            .enumerate()
            {
                let ei = edge_index[&(*a, *b)];
                let [h, half] = contrib[le];
                dual_edge[ei] += h;
                // Kite pieces: each endpoint of the edge picks up the right
                // triangle (vertex, midpoint, circumcenter).
                dual_vertex[*a] += 0.5 * half * h;
                dual_vertex[*b] += 0.5 * half * h;
            }
        } else {
            non_well_centered.push(fi);
            // Barycentric fallback for this face only.
            let bc = [
                (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0,
                (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0,
                (pts[0][2] + pts[1][2] + pts[2][2]) / 3.0,
            ];
            for (a, b, _) in [(f[0], f[1], f[2]), (f[0], f[2], f[1]), (f[1], f[2], f[0])] {
                let ei = edge_index[&(a, b)];
                let pa = &coords[a];
                let pb = &coords[b];
                let mid = [
                    (pa[0] + pb[0]) / 2.0,
                    (pa[1] + pb[1]) / 2.0,
                    (pa[2] + pb[2]) / 2.0,
                ];
                dual_edge[ei] += norm3(&sub(&bc, &mid));
                dual_vertex[a] += face_area[fi] / 3.0 / 2.0;
                dual_vertex[b] += face_area[fi] / 3.0 / 2.0;
            }
        }
    }

    let complex = CellComplex {
        dimension: 2,
        signature: Signature::Riemannian,
        kind: ComplexKind::Icosphere {
            subdivisions,
            non_well_centered,
        },
        primal_volumes: vec![vec![1.0; nv], edge_len, face_area],
        dual_volumes: vec![dual_vertex, dual_edge, vec![1.0; nf]],
        cells,
        boundary,
        vertex_coords: coords,
        metric_signs: vec![vec![1.0; nv], vec![1.0; ne], vec![1.0; nf]],
    };
    debug_assert!(complex.verify_boundary_squares_to_zero());
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_counts_and_lengths() {
        let c = build_circle(4, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(c.n_cells(0), 4);
        assert_eq!(c.n_cells(1), 4);
        for &l in &c.primal_volumes[1] {
            assert!((l - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        }
        assert!(c.verify_boundary_squares_to_zero());
    }

    #[test]
    fn circle_rejects_small() {
        assert!(build_circle(2, 1.0).is_err());
    }

    #[test]
    fn circle_dual_partition_is_exact() {
        let c = build_circle(256, 2.0 * std::f64::consts::PI).unwrap();
        let total: f64 = c.dual_volumes[0].iter().sum();
        assert_eq!(total, 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn icosahedron_combinatorics() {
        let c = build_icosphere(0).unwrap();
        assert_eq!((c.n_cells(0), c.n_cells(1), c.n_cells(2)), (12, 30, 20));
        assert!(c.verify_boundary_squares_to_zero());
    }

    #[test]
    fn icosphere_euler_characteristic() {
        for s in 0..4 {
            let c = build_icosphere(s).unwrap();
            let chi = c.n_cells(0) as i64 - c.n_cells(1) as i64 + c.n_cells(2) as i64;
            assert_eq!(chi, 2, "V-E+F at subdivision {s}");
            assert_eq!(c.n_cells(0), 10 * 4usize.pow(s as u32) + 2);
            assert_eq!(c.n_cells(1), 30 * 4usize.pow(s as u32));
            assert_eq!(c.n_cells(2), 20 * 4usize.pow(s as u32));
        }
    }

    #[test]
    fn icosphere_dual_area_converges_to_sphere_area() {
        let c = build_icosphere(2).unwrap();
        let total: f64 = c.dual_volumes[0].iter().sum();
        let t_area: f64 = c.primal_volumes[2].iter().sum();
        let sphere = 4.0 * std::f64::consts::PI;
        // circumcentric duals partition each triangle exactly
        assert!((total - t_area).abs() < 1e-10 * sphere);
        assert!((total - sphere).abs() / sphere < 0.02);
    }

    #[test]
    fn icosphere_rejects_deep_subdivision() {
        assert!(build_icosphere(7).is_err());
    }

    #[test]
    fn torus_cell_counts() {
        let c = build_torus(3, 4, 2.0 * std::f64::consts::PI, Signature::Riemannian).unwrap();
        assert_eq!(
            (c.n_cells(0), c.n_cells(1), c.n_cells(2), c.n_cells(3)),
            (64, 192, 192, 64)
        );
        assert!(c.verify_boundary_squares_to_zero());
    }

    #[test]
    fn torus_4d_boundary_squares_to_zero() {
        let c = build_torus(4, 4, 2.0 * std::f64::consts::PI, Signature::Riemannian).unwrap();
        let counts: Vec<usize> = (0..=4).map(|k| c.n_cells(k)).collect();
        assert_eq!(counts, vec![256, 1024, 1536, 1024, 256]);
        assert!(c.verify_boundary_squares_to_zero());
    }

    #[test]
    fn torus_1d_matches_circle() {
        let a = build_circle(8, 3.0).unwrap();
        let b = build_torus(1, 8, 3.0, Signature::Riemannian).unwrap();
        assert_eq!(a.cells[1].vertices, b.cells[1].vertices);
        assert_eq!(a.boundary[1], b.boundary[1]);
        assert_eq!(a.primal_volumes, b.primal_volumes);
        assert_eq!(a.dual_volumes, b.dual_volumes);
        assert_eq!(a.vertex_coords, b.vertex_coords);
    }

    #[test]
    fn torus_rejects_oversize_and_bad_axis() {
        assert!(build_torus(4, 20, 1.0, Signature::Riemannian).is_err());
        assert!(build_torus(2, 4, 1.0, Signature::Lorentzian { timelike_axis: 2 }).is_err());
    }

    #[test]
    fn lorentzian_signs_follow_timelike_axis() {
        let c = build_torus(2, 4, 1.0, Signature::Lorentzian { timelike_axis: 0 }).unwrap();
        let idx = TorusIndex::new(2, 4);
        let sx = idx.set_index(1, &[0]);
        let sy = idx.set_index(1, &[1]);
        assert_eq!(c.metric_signs[1][idx.cell_id(sx, 0)], -1.0);
        assert_eq!(c.metric_signs[1][idx.cell_id(sy, 0)], 1.0);
        assert_eq!(c.metric_signs[2][0], -1.0);
        assert_eq!(c.metric_signs[0][0], 1.0);
    }
}
