//! Discrete wedge products.
//!
//! The product scheme is one-point-per-top-cell quadrature: interpolate each
//! cochain to a constant form on every top cell (face averages on cubes,
//! Whitney forms at the barycenter on triangles), multiply pointwise as
//! constant-coefficient forms, and re-integrate over cells, averaging the
//! contributions of the top cells incident to each output cell. First-order
//! accurate in the mesh size and exact for constant-coefficient inputs on
//! flat tori. The cubical cup product is kept alongside as an independent
//! collation scheme for cross-checks.

use super::{Cochain, Slot};
use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::mesh::{CellComplex, ComplexKind, TorusIndex};
use std::sync::Arc;

/// How coefficient rows combine under the product.
enum Combiner<'a> {
    /// scalar x scalar -> scalar, or scalar x vector -> vector
    Multiply,
    /// [a ^ b]^c = c^c_{de} a^d b^e
    Bracket(&'a LieAlgebra),
    /// <a ^ b> = K_{de} a^d b^e
    Killing(&'a LieAlgebra),
}

impl Combiner<'_> {
    fn out_comp(&self, a_comp: usize, b_comp: usize) -> usize {
        match self {
            Combiner::Multiply => a_comp.max(b_comp),
            Combiner::Bracket(g) => g.dim,
            Combiner::Killing(_) => 1,
        }
    }

    fn accumulate(&self, a: &[f64], b: &[f64], scale: f64, out: &mut [f64]) {
        match self {
            Combiner::Multiply => {
                if a.len() == 1 {
                    for (o, bv) in out.iter_mut().zip(b) {
                        *o += scale * a[0] * bv;
                    }
                } else if b.len() == 1 {
                    for (o, av) in out.iter_mut().zip(a) {
                        *o += scale * av * b[0];
                    }
                } else {
                    debug_assert_eq!(a.len(), b.len());
                    for i in 0..a.len() {
                        out[i] += scale * a[i] * b[i];
                    }
                }
            }
            Combiner::Bracket(g) => {
                for c in 0..g.dim {
                    let mut acc = 0.0;
                    for d in 0..g.dim {
                        for e in 0..g.dim {
                            acc += g.structure[[c, d, e]] * a[d] * b[e];
                        }
                    }
                    out[c] += scale * acc;
                }
            }
            Combiner::Killing(g) => {
                let mut acc = 0.0;
                for d in 0..g.dim {
                    for e in 0..g.dim {
                        acc += g.killing[[d, e]] * a[d] * b[e];
                    }
                }
                out[0] += scale * acc;
            }
        }
    }
}

fn product_checks(a: &Cochain, b: &Cochain) -> Result<()> {
    if !Arc::ptr_eq(&a.complex, &b.complex) {
        return Err(Error::ComplexMismatch);
    }
    if a.dual || b.dual {
        return Err(Error::SlotMismatch(
            "wedge products expect primal cochains".into(),
        ));
    }
    let n = a.complex.dimension;
    if a.degree + b.degree > n {
        return Err(Error::DegreeOutOfRange {
            degree: a.degree + b.degree,
            n,
            reason: "wedge degree exceeds the complex dimension",
        });
    }
    Ok(())
}

/// Permutation sign of the concatenation (set_a, set_b) relative to the
/// sorted union; both inputs sorted ascending and disjoint.
fn shuffle_sign(set_a: &[usize], set_b: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for &i in set_a {
        for &j in set_b {
            if i > j {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn subsets_of(axes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &a in axes {
        let mut extended: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.push(a);
                t
            })
            .collect();
        out.append(&mut extended);
    }
    out
}

fn complement(d: usize, set: &[usize]) -> Vec<usize> {
    (0..d).filter(|a| !set.contains(a)).collect()
}

fn wedge_with(a: &Cochain, b: &Cochain, combiner: &Combiner) -> Result<Cochain> {
    product_checks(a, b)?;
    let (p, q) = (a.degree, b.degree);
    let out_comp = combiner.out_comp(a.comp_dim(), b.comp_dim());

    // 0-form factors multiply pointwise: average the 0-form over the other
    // cell's own vertices.
    if p == 0 || q == 0 {
        return wedge_zero_form(a, b, combiner, out_comp);
    }

    match a.complex.kind {
        ComplexKind::Torus { d, m_per_axis, spacing } => {
            wedge_cubical(a, b, combiner, out_comp, d, m_per_axis, spacing)
        }
        ComplexKind::Icosphere { .. } => wedge_whitney_triangles(a, b, combiner, out_comp),
        ComplexKind::Circle { .. } => unreachable!("p+q <= 1 on the circle"),
    }
}

fn wedge_zero_form(
    a: &Cochain,
    b: &Cochain,
    combiner: &Combiner,
    out_comp: usize,
) -> Result<Cochain> {
    let (zero, other, swapped) = if a.degree == 0 {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let mut out = Cochain::zeros(&a.complex, other.degree, false, out_comp);
    let cells = &a.complex.cells[other.degree];
    for (id, verts) in cells.vertices.iter().enumerate() {
        let mut avg = vec![0.0; zero.comp_dim()];
        for &v in verts {
            for j in 0..zero.comp_dim() {
                avg[j] += zero.values[[v, j]];
            }
        }
        for x in &mut avg {
            *x /= verts.len() as f64;
        }
        let row: Vec<f64> = other.values.row(id).to_vec();
        let mut acc = vec![0.0; out_comp];
        if swapped {
            combiner.accumulate(&row, &avg, 1.0, &mut acc);
        } else {
            combiner.accumulate(&avg, &row, 1.0, &mut acc);
        }
        for j in 0..out_comp {
            out.values[[id, j]] = acc[j];
        }
    }
    Ok(out)
}

fn wedge_cubical(
    a: &Cochain,
    b: &Cochain,
    combiner: &Combiner,
    out_comp: usize,
    d: usize,
    m: usize,
    h: f64,
) -> Result<Cochain> {
    let (p, q) = (a.degree, b.degree);
    let idx = TorusIndex::new(d, m);
    let nv = idx.n_vertices();
    let sets_p = idx.subsets[p].clone();
    let sets_q = idx.subsets[q].clone();
    let sets_pq = idx.subsets[p + q].clone();

    // (I, I') -> (J index, shuffle sign), for disjoint pairs.
    let mut pairings = Vec::new();
    for (ia, set_a) in sets_p.iter().enumerate() {
        for (ib, set_b) in sets_q.iter().enumerate() {
            if set_a.iter().any(|x| set_b.contains(x)) {
                continue;
            }
            let mut union: Vec<usize> = set_a.iter().chain(set_b.iter()).copied().collect();
            union.sort_unstable();
            let j = sets_pq.iter().position(|s| s == &union).expect("union set");
            pairings.push((ia, ib, j, shuffle_sign(set_a, set_b)));
        }
    }

    // Face-average reconstruction offsets per axis set.
    let offsets_p: Vec<Vec<Vec<usize>>> = sets_p
        .iter()
        .map(|s| subsets_of(&complement(d, s)))
        .collect();
    let offsets_q: Vec<Vec<Vec<usize>>> = sets_q
        .iter()
        .map(|s| subsets_of(&complement(d, s)))
        .collect();
    let spread_pq: Vec<Vec<Vec<usize>>> = sets_pq
        .iter()
        .map(|s| subsets_of(&complement(d, s)))
        .collect();

    let vol_p = h.powi(p as i32);
    let vol_q = h.powi(q as i32);
    let vol_pq = h.powi((p + q) as i32);
    let share = (1usize << (d - p - q)) as f64;

    let mut out = Cochain::zeros(&a.complex, p + q, false, out_comp);
    let mut abar = vec![vec![0.0; a.comp_dim()]; sets_p.len()];
    let mut bbar = vec![vec![0.0; b.comp_dim()]; sets_q.len()];
    let mut contrib = vec![vec![0.0; out_comp]; sets_pq.len()];

    let shift_many = |v: usize, axes: &[usize]| -> usize {
        let mut w = v;
        for &ax in axes {
            w = idx.shifted(w, ax, 1);
        }
        w
    };

    for u in 0..nv {
        for (si, offs) in offsets_p.iter().enumerate() {
            let acc = &mut abar[si];
            acc.iter_mut().for_each(|x| *x = 0.0);
            for off in offs {
                let cell = idx.cell_id(si, shift_many(u, off));
                for j in 0..acc.len() {
                    acc[j] += a.values[[cell, j]];
                }
            }
            let denom = offs.len() as f64 * vol_p;
            acc.iter_mut().for_each(|x| *x /= denom);
        }
        for (si, offs) in offsets_q.iter().enumerate() {
            let acc = &mut bbar[si];
            acc.iter_mut().for_each(|x| *x = 0.0);
            for off in offs {
                let cell = idx.cell_id(si, shift_many(u, off));
                for j in 0..acc.len() {
                    acc[j] += b.values[[cell, j]];
                }
            }
            let denom = offs.len() as f64 * vol_q;
            acc.iter_mut().for_each(|x| *x /= denom);
        }
        for row in &mut contrib {
            row.iter_mut().for_each(|x| *x = 0.0);
        }
        for &(ia, ib, j, sign) in &pairings {
            combiner.accumulate(&abar[ia], &bbar[ib], sign * vol_pq, &mut contrib[j]);
        }
        for (j, spread) in spread_pq.iter().enumerate() {
            for off in spread {
                let cell = idx.cell_id(j, shift_many(u, off));
                for comp in 0..out_comp {
                    out.values[[cell, comp]] += contrib[j][comp] / share;
                }
            }
        }
    }
    Ok(out)
}

fn tri_vec(a: &[f64], b: &[f64]) -> [f64; 3] {
    [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Triangle wedge of two 1-cochains: Whitney interpolation evaluated at the
/// barycenter, exterior product of the resulting constant 1-forms,
/// re-integrated over the (lexicographically oriented) triangle.
fn wedge_whitney_triangles(
    a: &Cochain,
    b: &Cochain,
    combiner: &Combiner,
    out_comp: usize,
) -> Result<Cochain> {
    let complex = &a.complex;
    let edge_index: std::collections::HashMap<(usize, usize), usize> = complex.cells[1]
        .vertices
        .iter()
        .enumerate()
        .map(|(i, e)| ((e[0], e[1]), i))
        .collect();
    let mut out = Cochain::zeros(complex, 2, false, out_comp);
    for (fi, f) in complex.cells[2].vertices.iter().enumerate() {
        let pts = [
            &complex.vertex_coords[f[0]],
            &complex.vertex_coords[f[1]],
            &complex.vertex_coords[f[2]],
        ];
        let e01 = tri_vec(pts[0], pts[1]);
        let e02 = tri_vec(pts[0], pts[2]);
        let nrm = cross(&e01, &e02);
        let two_area = dot(&nrm, &nrm).sqrt();
        let nhat = [nrm[0] / two_area, nrm[1] / two_area, nrm[2] / two_area];
        // grad lambda_i = nhat x (edge opposite vertex i) / (2 area)
        let grads = [
            cross(&nhat, &tri_vec(pts[1], pts[2])),
            cross(&nhat, &tri_vec(pts[2], pts[0])),
            cross(&nhat, &tri_vec(pts[0], pts[1])),
        ];
        let grads: Vec<[f64; 3]> = grads
            .iter()
            .map(|g| [g[0] / two_area, g[1] / two_area, g[2] / two_area])
            .collect();
        let local_edges = [(0usize, 1usize), (0, 2), (1, 2)];
        // constant Whitney 1-form per component: sum_e c_e (grad_j - grad_i)/3
        let mut wa = vec![[0.0f64; 3]; a.comp_dim()];
        let mut wb = vec![[0.0f64; 3]; b.comp_dim()];
        for &(li, lj) in &local_edges {
            let eid = edge_index[&(f[li], f[lj])];
            for comp in 0..a.comp_dim() {
                let c = a.values[[eid, comp]] / 3.0;
                for x in 0..3 {
                    wa[comp][x] += c * (grads[lj][x] - grads[li][x]);
                }
            }
            for comp in 0..b.comp_dim() {
                let c = b.values[[eid, comp]] / 3.0;
                for x in 0..3 {
                    wb[comp][x] += c * (grads[lj][x] - grads[li][x]);
                }
            }
        }
        // integrate the constant 2-form over the oriented triangle:
        // (wa x wb) . nhat * area, accumulated through the combiner
        let area = two_area / 2.0;
        let mut acc = vec![0.0; out_comp];
        match combiner {
            Combiner::Multiply => {
                let v = dot(&cross(&wa[0], &wb[0]), &nhat) * area;
                acc[0] += v;
            }
            Combiner::Bracket(g) => {
                for c in 0..g.dim {
                    for dcomp in 0..g.dim {
                        for e in 0..g.dim {
                            let s = g.structure[[c, dcomp, e]];
                            if s != 0.0 {
                                acc[c] += s * dot(&cross(&wa[dcomp], &wb[e]), &nhat) * area;
                            }
                        }
                    }
                }
            }
            Combiner::Killing(g) => {
                for dcomp in 0..g.dim {
                    for e in 0..g.dim {
                        let kv = g.killing[[dcomp, e]];
                        if kv != 0.0 {
                            acc[0] += kv * dot(&cross(&wa[dcomp], &wb[e]), &nhat) * area;
                        }
                    }
                }
            }
        }
        for j in 0..out_comp {
            out.values[[fi, j]] = acc[j];
        }
    }
    Ok(out)
}

/// Wedge of scalar cochains (a 0-form factor may be vector-valued, in which
/// case it scales through).
pub fn wedge(a: &Cochain, b: &Cochain) -> Result<Cochain> {
    if a.comp_dim() > 1 && b.comp_dim() > 1 {
        return Err(Error::SlotMismatch(
            "plain wedge needs a scalar factor; use bracket_wedge or killing_pair".into(),
        ));
    }
    let mut out = wedge_with(a, b, &Combiner::Multiply)?;
    out.algebra = a.algebra.clone().or_else(|| b.algebra.clone());
    Ok(out)
}

/// Wedge on the form part, commutator on the Lie coefficients.
pub fn bracket_wedge(a: &Cochain, b: &Cochain) -> Result<Cochain> {
    let g = match (&a.algebra, &b.algebra) {
        (Some(ga), Some(gb)) if Arc::ptr_eq(ga, gb) => Arc::clone(ga),
        _ => return Err(Error::AlgebraMismatch),
    };
    let mut out = wedge_with(a, b, &Combiner::Bracket(&g))?;
    out.algebra = Some(g);
    Ok(out)
}

/// Wedge on the form part, Killing contraction on the Lie coefficients;
/// output is scalar.
pub fn killing_pair(a: &Cochain, b: &Cochain) -> Result<Cochain> {
    let g = match (&a.algebra, &b.algebra) {
        (Some(ga), Some(gb)) if Arc::ptr_eq(ga, gb) => Arc::clone(ga),
        _ => return Err(Error::AlgebraMismatch),
    };
    wedge_with(a, b, &Combiner::Killing(&g))
}

/// Pointwise Killing pairing of a constant Lie coefficient against a
/// Lie-valued cochain (the 0-form wedge with a field-independent epsilon);
/// valid on primal and dual cochains alike since no interpolation is needed.
pub fn killing_pair_constant(eps: &[f64], c: &Cochain) -> Result<Cochain> {
    let g = c.algebra.as_ref().ok_or(Error::AlgebraMismatch)?;
    if eps.len() != g.dim {
        return Err(Error::AlgebraMismatch);
    }
    let mut out = Cochain::zeros(&c.complex, c.degree, c.dual, 1);
    for cell in 0..c.n_cells() {
        let mut acc = 0.0;
        for d in 0..g.dim {
            for e in 0..g.dim {
                acc += g.killing[[d, e]] * eps[d] * c.values[[cell, e]];
            }
        }
        out.values[[cell, 0]] = acc;
    }
    Ok(out)
}

/// Shift-identified Hodge star on flat tori: primal p-cochain to primal
/// (n-p)-cochain at the same lattice site, carrying the orientation shuffle
/// sign and the metric sign. Exact for constant-coefficient cochains, O(h)
/// otherwise (the identification slides dual cells by half a lattice step).
pub fn star_flat(c: &Cochain) -> Result<Cochain> {
    let ComplexKind::Torus { d, m_per_axis, spacing } = c.complex.kind else {
        return Err(Error::SlotMismatch("star_flat needs a flat torus".into()));
    };
    if c.dual {
        return Err(Error::SlotMismatch("star_flat acts on primal cochains".into()));
    }
    let p = c.degree;
    let idx = TorusIndex::new(d, m_per_axis);
    let nv = idx.n_vertices();
    let sets = &idx.subsets[p];
    let scale = spacing.powi((d - p) as i32) / spacing.powi(p as i32);
    let mut out = Cochain::zeros(&c.complex, d - p, false, c.comp_dim());
    out.algebra = c.algebra.clone();
    for (si, set) in sets.iter().enumerate() {
        let comp_set = complement(d, set);
        let co_si = idx.set_index(d - p, &comp_set);
        let sign = shuffle_sign(set, &comp_set);
        for v in 0..nv {
            let src = idx.cell_id(si, v);
            let dst = idx.cell_id(co_si, v);
            let metric = c.complex.metric_signs[p][src];
            for j in 0..c.comp_dim() {
                out.values[[dst, j]] = sign * metric * scale * c.values[[src, j]];
            }
        }
    }
    Ok(out)
}

/// Inverse of `star_flat`: star_flat(star_flat(c)) = epsilon_p c.
pub fn star_flat_inverse(c: &Cochain) -> Result<Cochain> {
    let n = c.complex.dimension;
    let eps = super::epsilon_sign(n, n - c.degree, c.complex.signature);
    Ok(star_flat(c)?.scaled(eps))
}

/// Reinterpret a dual cochain on a flat torus as a primal cochain of the
/// same form degree via the half-shift cell identification. Composed with
/// the diagonal star this reproduces `star_flat`.
pub fn dual_to_primal_shift(c: &Cochain) -> Result<Cochain> {
    let ComplexKind::Torus { d, m_per_axis, .. } = c.complex.kind else {
        return Err(Error::SlotMismatch(
            "dual-to-primal identification needs a flat torus".into(),
        ));
    };
    if !c.dual {
        return Err(Error::SlotMismatch("expected a dual cochain".into()));
    }
    let p = c.degree; // dual form degree; indexed by primal (d-p)-cells
    let idx = TorusIndex::new(d, m_per_axis);
    let nv = idx.n_vertices();
    let mut out = Cochain::zeros(&c.complex, p, false, c.comp_dim());
    out.algebra = c.algebra.clone();
    for (si, set) in idx.subsets[d - p].iter().enumerate() {
        let comp_set = complement(d, set);
        let co_si = idx.set_index(p, &comp_set);
        let sign = shuffle_sign(set, &comp_set);
        for v in 0..nv {
            let src = idx.cell_id(si, v);
            let dst = idx.cell_id(co_si, v);
            for j in 0..c.comp_dim() {
                out.values[[dst, j]] = sign * c.values[[src, j]];
            }
        }
    }
    Ok(out)
}

/// Cubical cup product (front-face / back-face collation). Satisfies the
/// Leibniz rule exactly and agrees with the wedge on constant-coefficient
/// cochains; serves as the independent oracle for the quadrature wedge.
pub fn cup_product(a: &Cochain, b: &Cochain) -> Result<Cochain> {
    product_checks(a, b)?;
    let ComplexKind::Torus { d, m_per_axis, .. } = a.complex.kind else {
        return Err(Error::SlotMismatch("cup product needs a cubical torus".into()));
    };
    if a.comp_dim() != 1 || b.comp_dim() != 1 {
        return Err(Error::SlotMismatch("cup product oracle is scalar".into()));
    }
    let (p, q) = (a.degree, b.degree);
    let idx = TorusIndex::new(d, m_per_axis);
    let nv = idx.n_vertices();
    let sets_p = &idx.subsets[p];
    let sets_q = &idx.subsets[q];
    let sets_pq = &idx.subsets[p + q];
    let mut out = Cochain::zeros(&a.complex, p + q, false, 1);
    for (ia, set_a) in sets_p.iter().enumerate() {
        for (ib, set_b) in sets_q.iter().enumerate() {
            if set_a.iter().any(|x| set_b.contains(x)) {
                continue;
            }
            let mut union: Vec<usize> = set_a.iter().chain(set_b.iter()).copied().collect();
            union.sort_unstable();
            let j = sets_pq.iter().position(|s| s == &union).expect("union");
            let sign = shuffle_sign(set_a, set_b);
            for v in 0..nv {
                let mut w = v;
                for &ax in set_a {
                    w = idx.shifted(w, ax, 1);
                }
                let front = idx.cell_id(ia, v);
                let back = idx.cell_id(ib, w);
                let dst = idx.cell_id(j, v);
                out.values[[dst, 0]] += sign * a.values[[front, 0]] * b.values[[back, 0]];
            }
        }
    }
    Ok(out)
}

/// Constant-coefficient cochain on a flat torus: for each listed axis set,
/// every cell with that axis set gets coefficient (form value) * h^degree.
pub fn torus_constant_cochain(
    complex: &Arc<CellComplex>,
    degree: usize,
    components: &[(Vec<usize>, Vec<f64>)],
    comp_dim: usize,
) -> Result<Cochain> {
    let ComplexKind::Torus { d, m_per_axis, spacing } = complex.kind else {
        return Err(Error::SlotMismatch("constant cochain needs a torus".into()));
    };
    let idx = TorusIndex::new(d, m_per_axis);
    let nv = idx.n_vertices();
    let vol = spacing.powi(degree as i32);
    let mut out = Cochain::zeros(complex, degree, false, comp_dim);
    for (axes, coeff) in components {
        let si = idx.set_index(degree, axes);
        for v in 0..nv {
            let cell = idx.cell_id(si, v);
            for j in 0..comp_dim {
                out.values[[cell, j]] += coeff[j] * vol;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{exterior_derivative, hodge_star, inner_product, norm};
    use crate::mesh::{build_icosphere, build_torus, Signature};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn t3(m: usize) -> Arc<CellComplex> {
        Arc::new(build_torus(3, m, TAU, Signature::Riemannian).unwrap())
    }

    #[test]
    fn zero_form_wedge_is_pointwise_square() {
        let complex = t3(4);
        let mut c = Cochain::zeros(&complex, 0, false, 1);
        let mut rng = StdRng::seed_from_u64(1);
        c.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        let w = wedge(&c, &c).unwrap();
        for v in 0..complex.n_cells(0) {
            assert_eq!(w.values[[v, 0]], c.values[[v, 0]] * c.values[[v, 0]]);
        }
    }

    #[test]
    fn constant_dx_dy_wedge_on_t3() {
        let complex = t3(4);
        let dx = torus_constant_cochain(&complex, 1, &[(vec![0], vec![1.0])], 1).unwrap();
        let dy = torus_constant_cochain(&complex, 1, &[(vec![1], vec![1.0])], 1).unwrap();
        let w = wedge(&dx, &dy).unwrap();
        let expect = torus_constant_cochain(&complex, 2, &[(vec![0, 1], vec![1.0])], 1).unwrap();
        let diff = w.sub(&expect).unwrap().max_abs();
        assert!(diff <= 1e-12, "diff {diff}");
        // coefficient per square = product of edge coefficients
        let h = TAU / 4.0;
        let idx = TorusIndex::new(3, 4);
        let sxy = idx.set_index(2, &[0, 1]);
        assert!((w.values[[idx.cell_id(sxy, 0), 0]] - h * h).abs() < 1e-12);
    }

    #[test]
    fn wedge_graded_antisymmetry_exact() {
        let complex = t3(4);
        let mut rng = StdRng::seed_from_u64(2);
        let mut a = Cochain::zeros(&complex, 1, false, 1);
        let mut b = Cochain::zeros(&complex, 1, false, 1);
        a.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        b.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        let diff = ab.add(&ba).unwrap().max_abs();
        assert_eq!(diff, 0.0, "graded antisymmetry must be exact");
    }

    #[test]
    fn cup_and_wedge_agree_on_constants() {
        let complex = t3(5);
        let a = torus_constant_cochain(&complex, 1, &[(vec![0], vec![0.7]), (vec![2], vec![-0.3])], 1)
            .unwrap();
        let b = torus_constant_cochain(&complex, 1, &[(vec![1], vec![1.1])], 1).unwrap();
        let w = wedge(&a, &b).unwrap();
        let cup = cup_product(&a, &b).unwrap();
        assert!(w.sub(&cup).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn cup_leibniz_rule_exact() {
        let complex = t3(4);
        let mut rng = StdRng::seed_from_u64(3);
        let mut a = Cochain::zeros(&complex, 1, false, 1);
        let mut b = Cochain::zeros(&complex, 1, false, 1);
        a.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        b.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        let lhs = exterior_derivative(&cup_product(&a, &b).unwrap()).unwrap();
        let da_b = cup_product(&exterior_derivative(&a).unwrap(), &b).unwrap();
        let a_db = cup_product(&a, &exterior_derivative(&b).unwrap()).unwrap();
        let rhs = da_b.sub(&a_db).unwrap(); // (-1)^{|a|} with |a| = 1
        let diff = lhs.sub(&rhs).unwrap().max_abs();
        assert!(diff <= 1e-13, "cup Leibniz: {diff}");
    }

    #[test]
    fn bracket_wedge_abelian_directions_vanish() {
        let g = Arc::new(LieAlgebra::su2());
        let complex = t3(4);
        let c = torus_constant_cochain(&complex, 1, &[(vec![0], vec![1.0, 0.0, 0.0]), (vec![1], vec![1.0, 0.0, 0.0])], 3)
            .unwrap()
            .with_algebra(&g);
        let bb = bracket_wedge(&c, &c).unwrap();
        assert_eq!(bb.max_abs(), 0.0);
    }

    #[test]
    fn bracket_wedge_odd_degree_symmetrization() {
        let g = Arc::new(LieAlgebra::su2());
        let complex = t3(4);
        let a = torus_constant_cochain(&complex, 1, &[(vec![0], vec![1.0, 0.0, 0.0])], 3)
            .unwrap()
            .with_algebra(&g);
        let b = torus_constant_cochain(&complex, 1, &[(vec![1], vec![0.0, 1.0, 0.0])], 3)
            .unwrap()
            .with_algebra(&g);
        // for odd-degree forms [a^b] = [b^a]; the symmetrization doubles it
        let ab = bracket_wedge(&a, &b).unwrap();
        let ba = bracket_wedge(&b, &a).unwrap();
        let sum = ab.add(&ba).unwrap();
        let expect =
            torus_constant_cochain(&complex, 2, &[(vec![0, 1], vec![0.0, 0.0, 2.0])], 3).unwrap();
        assert!(sum.sub(&expect).unwrap().max_abs() <= 1e-12);
        assert!(ab.sub(&ba).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn trilinear_compatibility_identity() {
        // <a ^ [b ^ c]> = <[a ^ b] ^ c> for constant-coefficient forms
        let g = Arc::new(LieAlgebra::su2());
        let complex = t3(4);
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..10 {
            let mut coeff = || {
                let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                v
            };
            let a = torus_constant_cochain(&complex, 1, &[(vec![0], coeff())], 3)
                .unwrap()
                .with_algebra(&g);
            let b = torus_constant_cochain(&complex, 1, &[(vec![1], coeff())], 3)
                .unwrap()
                .with_algebra(&g);
            let c = torus_constant_cochain(&complex, 1, &[(vec![2], coeff())], 3)
                .unwrap()
                .with_algebra(&g);
            let lhs = killing_pair(&a, &bracket_wedge(&b, &c).unwrap()).unwrap();
            let rhs = killing_pair(&bracket_wedge(&a, &b).unwrap(), &c).unwrap();
            let diff = lhs.sub(&rhs).unwrap().max_abs();
            assert!(diff <= 1e-12 * lhs.max_abs().max(1.0));
        }
    }

    #[test]
    fn killing_pair_orthogonal_generators() {
        let g = Arc::new(LieAlgebra::su2());
        let complex = t3(4);
        let a = torus_constant_cochain(&complex, 1, &[(vec![0], vec![1.0, 0.0, 0.0])], 3)
            .unwrap()
            .with_algebra(&g);
        let b = torus_constant_cochain(&complex, 1, &[(vec![1], vec![0.0, 1.0, 0.0])], 3)
            .unwrap()
            .with_algebra(&g);
        let kp = killing_pair(&a, &b).unwrap();
        assert_eq!(kp.max_abs(), 0.0);
    }

    #[test]
    fn killing_triple_su2_value() {
        // <e3 ^ [e1 dx ^ e2 dy]> = K_33 (dx ^ dy part), K_33 = -2
        let g = Arc::new(LieAlgebra::su2());
        let complex = t3(4);
        let a = torus_constant_cochain(&complex, 1, &[(vec![0], vec![1.0, 0.0, 0.0])], 3)
            .unwrap()
            .with_algebra(&g);
        let b = torus_constant_cochain(&complex, 1, &[(vec![1], vec![0.0, 1.0, 0.0])], 3)
            .unwrap()
            .with_algebra(&g);
        let br = bracket_wedge(&a, &b).unwrap(); // e3 dx^dy
        let kp = killing_pair_constant(&[0.0, 0.0, 1.0], &br).unwrap();
        let expect = torus_constant_cochain(&complex, 2, &[(vec![0, 1], vec![-2.0])], 1).unwrap();
        assert!(kp.sub(&expect).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn star_flat_double_is_epsilon_and_matches_diagonal_star() {
        let complex = t3(4);
        let mut rng = StdRng::seed_from_u64(5);
        for p in 0..=3 {
            let mut c = Cochain::zeros(&complex, p, false, 1);
            c.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
            let ss = star_flat(&star_flat(&c).unwrap()).unwrap();
            let eps = crate::calculus::epsilon_sign(3, p, Signature::Riemannian);
            assert!(ss.sub(&c.scaled(eps)).unwrap().max_abs() <= 1e-14);
            let via_shift = dual_to_primal_shift(&hodge_star(&c).unwrap()).unwrap();
            assert!(via_shift.sub(&star_flat(&c).unwrap()).unwrap().max_abs() <= 1e-12);
        }
    }

    #[test]
    fn star_flat_symmetry_of_hodge_pairing() {
        // <a ^ *b> = <b ^ *a> for equal-degree Lie-valued constants
        let g = Arc::new(LieAlgebra::su2());
        let complex = t3(4);
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..10 {
            let mut a = Cochain::zeros(&complex, 1, false, 3).with_algebra(&g);
            let mut b = Cochain::zeros(&complex, 1, false, 3).with_algebra(&g);
            a.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
            b.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
            let lhs = killing_pair(&a, &star_flat(&b).unwrap()).unwrap();
            let rhs = killing_pair(&b, &star_flat(&a).unwrap()).unwrap();
            let scale = norm(&a) * norm(&b);
            let diff = lhs.sub(&rhs).unwrap().max_abs();
            assert!(diff <= 1e-12 * scale.max(1.0), "diff {diff}");
        }
    }

    #[test]
    fn whitney_wedge_antisymmetry_on_sphere() {
        let complex = Arc::new(build_icosphere(1).unwrap());
        let mut rng = StdRng::seed_from_u64(7);
        let mut a = Cochain::zeros(&complex, 1, false, 1);
        let mut b = Cochain::zeros(&complex, 1, false, 1);
        a.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        b.values.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        assert_eq!(ab.add(&ba).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn whitney_wedge_of_exact_forms_integrates_to_zero() {
        // dX ^ dY = d(X dY) is exact, so its total over the closed PL
        // surface vanishes; the Whitney wedge reproduces the PL integral.
        let complex = Arc::new(build_icosphere(3).unwrap());
        let x = Cochain::scalar_from_values(
            &complex,
            0,
            false,
            complex.vertex_coords.iter().map(|p| p[0]).collect(),
        )
        .unwrap();
        let y = Cochain::scalar_from_values(
            &complex,
            0,
            false,
            complex.vertex_coords.iter().map(|p| p[1]).collect(),
        )
        .unwrap();
        let dx = exterior_derivative(&x).unwrap();
        let dy = exterior_derivative(&y).unwrap();
        let w = wedge(&dx, &dy).unwrap();
        let total: f64 = (0..complex.n_cells(2)).map(|f| w.values[[f, 0]]).sum();
        assert!(total.abs() < 1e-10, "total {total}");
        // <dx, dx> approximates the Dirichlet energy of the l = 1 harmonic,
        // l(l+1) * (4 pi / 3) = 8 pi / 3
        let ip = inner_product(&dx, &dx).unwrap();
        let expect = 8.0 * std::f64::consts::PI / 3.0;
        assert!((ip - expect).abs() < 0.05 * expect, "got {ip}");
    }
}
