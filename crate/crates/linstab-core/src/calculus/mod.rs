//! Discrete form calculus on cell complexes: coboundary, diagonal Hodge
//! stars, codifferential, inner products, and Lie-algebra-valued extensions.
//!
//! Conventions. A primal p-cochain stores one coefficient (the integral over
//! the cell) per p-cell; a dual p-cochain stores one coefficient per dual
//! p-cell, which is indexed by its primal (n-p)-cell. The double star obeys
//! star(star(c)) = epsilon_p c with epsilon_p = (-1)^{p(n-p)+(n-s)/2}, s the
//! metric signature. The codifferential is the exact inner-product adjoint of
//! the coboundary, which coincides with (-1)^p star^{-1} d star for the dual
//! coboundary convention used here; `codifferential_star_route` spells that
//! composition out and the tests pin the sign per (n, p, signature).

pub mod products;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::mesh::{CellComplex, Chain, Signature};
use crate::sparse::SparseMatrix;
use ndarray::Array2;
use std::sync::Arc;

/// Where an operator argument or value lives: form degree, primal or dual
/// placement, and coefficient dimension (1 for scalar, dim g for Lie-valued).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub degree: usize,
    pub dual: bool,
    pub comp_dim: usize,
}

impl Slot {
    pub fn scalar(degree: usize, dual: bool) -> Self {
        Slot {
            degree,
            dual,
            comp_dim: 1,
        }
    }

    pub fn valued(degree: usize, dual: bool, comp_dim: usize) -> Self {
        Slot {
            degree,
            dual,
            comp_dim,
        }
    }
}

/// A degree-p discrete form: one coefficient row per p-cell.
#[derive(Debug, Clone)]
pub struct Cochain {
    pub complex: Arc<CellComplex>,
    pub algebra: Option<Arc<LieAlgebra>>,
    pub degree: usize,
    pub dual: bool,
    pub values: Array2<f64>,
}

impl Cochain {
    pub fn zeros(complex: &Arc<CellComplex>, degree: usize, dual: bool, comp_dim: usize) -> Self {
        let n_cells = complex.chain_index_count(degree, dual);
        Cochain {
            complex: Arc::clone(complex),
            algebra: None,
            degree,
            dual,
            values: Array2::zeros((n_cells, comp_dim)),
        }
    }

    pub fn zeros_like(other: &Cochain) -> Self {
        let mut c = Self::zeros(
            &other.complex,
            other.degree,
            other.dual,
            other.values.ncols(),
        );
        c.algebra = other.algebra.clone();
        c
    }

    pub fn scalar_from_values(
        complex: &Arc<CellComplex>,
        degree: usize,
        dual: bool,
        values: Vec<f64>,
    ) -> Result<Self> {
        let n_cells = complex.chain_index_count(degree, dual);
        if values.len() != n_cells {
            return Err(Error::SlotMismatch(format!(
                "expected {n_cells} coefficients, got {}",
                values.len()
            )));
        }
        Ok(Cochain {
            complex: Arc::clone(complex),
            algebra: None,
            degree,
            dual,
            values: Array2::from_shape_vec((n_cells, 1), values).expect("shape"),
        })
    }

    pub fn with_algebra(mut self, algebra: &Arc<LieAlgebra>) -> Self {
        assert_eq!(self.values.ncols(), algebra.dim);
        self.algebra = Some(Arc::clone(algebra));
        self
    }

    pub fn slot(&self) -> Slot {
        Slot {
            degree: self.degree,
            dual: self.dual,
            comp_dim: self.values.ncols(),
        }
    }

    pub fn n_cells(&self) -> usize {
        self.values.nrows()
    }

    pub fn comp_dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.mapv_inplace(|v| v * s);
        out
    }

    pub fn add(&self, other: &Cochain) -> Result<Self> {
        self.check_same_slot(other)?;
        let mut out = self.clone();
        out.values = &out.values + &other.values;
        Ok(out)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Self> {
        self.check_same_slot(other)?;
        let mut out = self.clone();
        out.values = &out.values - &other.values;
        Ok(out)
    }

    pub fn check_same_slot(&self, other: &Cochain) -> Result<()> {
        if !Arc::ptr_eq(&self.complex, &other.complex) {
            return Err(Error::ComplexMismatch);
        }
        if self.degree != other.degree || self.dual != other.dual {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        if self.values.ncols() != other.values.ncols() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }

    pub fn from_flat(template: &Cochain, flat: &[f64]) -> Self {
        let mut out = Cochain::zeros_like(template);
        let comp = out.values.ncols();
        for (i, v) in flat.iter().enumerate() {
            out.values[[i / comp, i % comp]] = *v;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Pairing with an integer chain of matching degree and placement.
    pub fn integrate_over(&self, chain: &Chain) -> Result<Vec<f64>> {
        if chain.degree != self.degree || chain.dual != self.dual {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: chain.degree,
            });
        }
        Ok(self.complex.chain_integral(&self.values, chain))
    }
}

/// Sign of the double Hodge star on p-forms.
pub fn epsilon_sign(n: usize, p: usize, signature: Signature) -> f64 {
    let s = match signature {
        Signature::Riemannian => n as i64,
        Signature::Lorentzian { .. } => n as i64 - 2,
    };
    let exponent = (p * (n - p)) as i64 + (n as i64 - s) / 2;
    if exponent % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coboundary. On primal p-cochains this is the transpose of the boundary
/// matrix; on dual p-cochains the dual coboundary carries the sign
/// (-1)^{n-p} relative to the transposed primal boundary.
pub fn exterior_derivative(c: &Cochain) -> Result<Cochain> {
    let n = c.complex.dimension;
    if c.degree >= n {
        return Err(Error::DegreeOutOfRange {
            degree: c.degree,
            n,
            reason: "exterior derivative of a top form",
        });
    }
    let values = if !c.dual {
        c.complex.boundary[c.degree + 1]
            .transpose()
            .matmul_dense(&c.values)
    } else {
        let k = n - c.degree; // dual cells are indexed by primal k-cells
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c.complex.boundary[k].matmul_dense(&c.values).mapv(|v| sign * v)
    };
    Ok(Cochain {
        complex: Arc::clone(&c.complex),
        algebra: c.algebra.clone(),
        degree: c.degree + 1,
        dual: c.dual,
        values,
    })
}

/// Diagonal Hodge star; toggles the dual flag. Primal to dual scales by the
/// metric-signed volume ratio, dual to primal by its inverse times the
/// epsilon sign, so the double star identity holds by construction.
pub fn hodge_star(c: &Cochain) -> Result<Cochain> {
    let n = c.complex.dimension;
    let mut out_values = c.values.clone();
    if !c.dual {
        for cell in 0..c.n_cells() {
            let w = c.complex.star_weight(c.degree, cell);
            for j in 0..c.comp_dim() {
                out_values[[cell, j]] *= w;
            }
        }
    } else {
        let k = n - c.degree;
        let eps = epsilon_sign(n, k, c.complex.signature);
        for cell in 0..c.n_cells() {
            let w = c.complex.star_weight(k, cell);
            for j in 0..c.comp_dim() {
                out_values[[cell, j]] *= eps / w;
            }
        }
    }
    Ok(Cochain {
        complex: Arc::clone(&c.complex),
        algebra: c.algebra.clone(),
        degree: n - c.degree,
        dual: !c.dual,
        values: out_values,
    })
}

/// Codifferential on primal cochains: the exact adjoint of the coboundary in
/// the diagonal inner products, delta = M_{p-1}^{-1} boundary_p M_p.
pub fn codifferential(c: &Cochain) -> Result<Cochain> {
    if c.dual {
        return Err(Error::SlotMismatch(
            "codifferential is provided for primal cochains".into(),
        ));
    }
    if c.degree == 0 {
        return Err(Error::DegreeOutOfRange {
            degree: 0,
            n: c.complex.dimension,
            reason: "codifferential of a 0-form",
        });
    }
    let p = c.degree;
    let mut weighted = c.values.clone();
    for cell in 0..c.n_cells() {
        let w = c.complex.star_weight(p, cell);
        for j in 0..c.comp_dim() {
            weighted[[cell, j]] *= w;
        }
    }
    let mut values = c.complex.boundary[p].matmul_dense(&weighted);
    for cell in 0..values.nrows() {
        let w = c.complex.star_weight(p - 1, cell);
        for j in 0..values.ncols() {
            values[[cell, j]] /= w;
        }
    }
    Ok(Cochain {
        complex: Arc::clone(&c.complex),
        algebra: c.algebra.clone(),
        degree: p - 1,
        dual: false,
        values,
    })
}

/// The composition (-1)^p star^{-1} d star, kept as an independent route for
/// the sign tests; star^{-1} here is the literal matrix inverse of the
/// primal-to-dual star on (p-1)-cochains.
pub fn codifferential_star_route(c: &Cochain) -> Result<Cochain> {
    if c.dual || c.degree == 0 {
        return Err(Error::SlotMismatch(
            "star-route codifferential expects a primal p>=1 cochain".into(),
        ));
    }
    let p = c.degree;
    let n = c.complex.dimension;
    let starred = hodge_star(c)?;
    let d_starred = exterior_derivative(&starred)?;
    // invert the primal (p-1) -> dual (n-p+1) star
    let mut values = d_starred.values;
    for cell in 0..values.nrows() {
        let w = c.complex.star_weight(p - 1, cell);
        for j in 0..values.ncols() {
            values[[cell, j]] /= w;
        }
    }
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    values.mapv_inplace(|v| sign * v);
    Ok(Cochain {
        complex: Arc::clone(&c.complex),
        algebra: c.algebra.clone(),
        degree: p - 1,
        dual: false,
        values,
    })
}

fn component_weights(algebra: Option<&Arc<LieAlgebra>>, comp: usize, absolute: bool) -> Array2<f64> {
    match algebra {
        Some(g) => {
            if absolute {
                g.killing_abs()
            } else {
                g.killing.clone()
            }
        }
        None => Array2::eye(comp),
    }
}

/// L2 pairing sum over cells of w_cell * K_de a^d b^e. Lie-valued inputs
/// contract through the Killing form.
pub fn inner_product(a: &Cochain, b: &Cochain) -> Result<f64> {
    a.check_same_slot(b)?;
    let comp = a.comp_dim();
    let k = component_weights(a.algebra.as_ref(), comp, false);
    let w = a.complex.inner_weights(a.degree, a.dual);
    let mut acc = 0.0;
    for cell in 0..a.n_cells() {
        for d in 0..comp {
            for e in 0..comp {
                acc += w[cell] * k[[d, e]] * a.values[[cell, d]] * b.values[[cell, e]];
            }
        }
    }
    Ok(acc)
}

/// Norm in the positive-definite variant of the inner product (absolute
/// metric weights, |K| on the Lie factor); used for tolerances.
pub fn norm(c: &Cochain) -> f64 {
    let comp = c.comp_dim();
    let k = component_weights(c.algebra.as_ref(), comp, true);
    let w = c.complex.inner_weights(c.degree, c.dual);
    let mut acc = 0.0;
    for cell in 0..c.n_cells() {
        for d in 0..comp {
            for e in 0..comp {
                acc += w[cell].abs() * k[[d, e]] * c.values[[cell, d]] * c.values[[cell, e]];
            }
        }
    }
    acc.max(0.0).sqrt()
}

/// A sparse operator between slots, acting per coefficient component.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub matrix: SparseMatrix,
    pub domain: Slot,
    pub codomain: Slot,
    pub label: String,
}

impl LinearOperator {
    pub fn new(matrix: SparseMatrix, domain: Slot, codomain: Slot, label: &str) -> Self {
        LinearOperator {
            matrix,
            domain,
            codomain,
            label: label.to_string(),
        }
    }

    pub fn apply(&self, c: &Cochain) -> Result<Cochain> {
        let slot = c.slot();
        if slot.degree != self.domain.degree
            || slot.dual != self.domain.dual
            || slot.comp_dim != self.domain.comp_dim
        {
            return Err(Error::SlotMismatch(format!(
                "operator {} expects (degree {}, dual {}, comp {}), got (degree {}, dual {}, comp {})",
                self.label,
                self.domain.degree,
                self.domain.dual,
                self.domain.comp_dim,
                slot.degree,
                slot.dual,
                slot.comp_dim
            )));
        }
        if self.matrix.ncols() != c.n_cells() {
            return Err(Error::SlotMismatch(format!(
                "operator {} has {} columns but cochain has {} cells",
                self.label,
                self.matrix.ncols(),
                c.n_cells()
            )));
        }
        Ok(Cochain {
            complex: Arc::clone(&c.complex),
            algebra: c.algebra.clone(),
            degree: self.codomain.degree,
            dual: self.codomain.dual,
            values: self.matrix.matmul_dense(&c.values),
        })
    }

    pub fn compose(&self, inner: &LinearOperator) -> LinearOperator {
        assert_eq!(self.domain.degree, inner.codomain.degree);
        assert_eq!(self.domain.dual, inner.codomain.dual);
        LinearOperator {
            matrix: self.matrix.matmul(&inner.matrix),
            domain: inner.domain,
            codomain: self.codomain,
            label: format!("{} . {}", self.label, inner.label),
        }
    }

    /// Inner-product transpose: A* = M_dom^{-1} A^T M_cod. The Lie factor
    /// cancels because operators act componentwise.
    pub fn adjoint(&self, complex: &CellComplex) -> LinearOperator {
        let w_dom = complex.inner_weights(self.domain.degree, self.domain.dual);
        let w_cod = complex.inner_weights(self.codomain.degree, self.codomain.dual);
        let inv_dom: Vec<f64> = w_dom.iter().map(|w| 1.0 / w).collect();
        let matrix = self
            .matrix
            .transpose()
            .scale_cols(&w_cod)
            .scale_rows(&inv_dom);
        LinearOperator {
            matrix,
            domain: self.codomain,
            codomain: self.domain,
            label: format!("{}*", self.label),
        }
    }
}

/// Coboundary as an operator on the given slot.
pub fn coboundary_operator(complex: &CellComplex, slot: Slot) -> LinearOperator {
    let n = complex.dimension;
    assert!(slot.degree < n);
    let matrix = if !slot.dual {
        complex.boundary[slot.degree + 1].transpose()
    } else {
        let k = n - slot.degree;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        complex.boundary[k].scale(sign)
    };
    LinearOperator::new(
        matrix,
        slot,
        Slot {
            degree: slot.degree + 1,
            ..slot
        },
        "d",
    )
}

/// Codifferential as an operator on primal p-cochains.
pub fn codifferential_operator(complex: &CellComplex, slot: Slot) -> LinearOperator {
    assert!(!slot.dual && slot.degree >= 1);
    let p = slot.degree;
    let w_p: Vec<f64> = (0..complex.n_cells(p))
        .map(|c| complex.star_weight(p, c))
        .collect();
    let w_pm1_inv: Vec<f64> = (0..complex.n_cells(p - 1))
        .map(|c| 1.0 / complex.star_weight(p - 1, c))
        .collect();
    let matrix = complex.boundary[p]
        .scale_cols(&w_p)
        .scale_rows(&w_pm1_inv);
    LinearOperator::new(
        matrix,
        slot,
        Slot {
            degree: p - 1,
            ..slot
        },
        "delta",
    )
}

/// Primal-to-dual Hodge star as an operator.
pub fn star_operator(complex: &CellComplex, slot: Slot) -> LinearOperator {
    assert!(!slot.dual);
    let p = slot.degree;
    let n = complex.dimension;
    let diag: Vec<f64> = (0..complex.n_cells(p))
        .map(|c| complex.star_weight(p, c))
        .collect();
    LinearOperator::new(
        SparseMatrix::diagonal(&diag),
        slot,
        Slot {
            degree: n - p,
            dual: true,
            comp_dim: slot.comp_dim,
        },
        "star",
    )
}
