//! Finite-dimensional Lie algebras in a fixed ordered basis: structure
//! constants, Killing form, bracket and invariance checks.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, Array3};
use ndarray_linalg::Eigh;

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    pub name: String,
    pub dim: usize,
    /// c[[a, b, c]] = c^a_{bc}, so [e_b, e_c] = c^a_{bc} e_a.
    pub structure: Array3<f64>,
    /// Killing form K_ab = c^c_{ad} c^d_{bc}, computed from the structure
    /// constants.
    pub killing: Array2<f64>,
}

impl LieAlgebra {
    /// Validates antisymmetry, the Jacobi identity, invariance of the
    /// Killing form and nondegeneracy; the Killing form itself is derived
    /// from the structure constants.
    pub fn from_structure_constants(name: &str, structure: Array3<f64>) -> Result<Self> {
        let dim = structure.shape()[0];
        if structure.shape() != [dim, dim, dim] {
            return Err(Error::InvalidAlgebra("structure tensor not cubic".into()));
        }
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    if (structure[[a, b, c]] + structure[[a, c, b]]).abs() > 1e-12 {
                        return Err(Error::InvalidAlgebra(format!(
                            "antisymmetry fails at c^{a}_{{{b}{c}}}"
                        )));
                    }
                }
            }
        }
        // Jacobi: c^e_{ad} c^d_{bc} + c^e_{bd} c^d_{ca} + c^e_{cd} c^d_{ab} = 0
        for e in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    for c in 0..dim {
                        let mut acc = 0.0;
                        for d in 0..dim {
                            acc += structure[[e, a, d]] * structure[[d, b, c]]
                                + structure[[e, b, d]] * structure[[d, c, a]]
                                + structure[[e, c, d]] * structure[[d, a, b]];
                        }
                        if acc.abs() > 1e-12 {
                            return Err(Error::InvalidAlgebra(format!(
                                "Jacobi identity fails at ({e},{a},{b},{c}): {acc:e}"
                            )));
                        }
                    }
                }
            }
        }
        let mut killing = Array2::zeros((dim, dim));
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = 0.0;
                for c in 0..dim {
                    for d in 0..dim {
                        acc += structure[[c, a, d]] * structure[[d, b, c]];
                    }
                }
                killing[[a, b]] = acc;
            }
        }
        // Invariance <[a,b],c> = <a,[b,c]>.
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let mut lhs = 0.0;
                    let mut rhs = 0.0;
                    for e in 0..dim {
                        lhs += structure[[e, a, b]] * killing[[e, c]];
                        rhs += structure[[e, b, c]] * killing[[a, e]];
                    }
                    if (lhs - rhs).abs() > 1e-12 {
                        return Err(Error::InvalidAlgebra(format!(
                            "Killing invariance fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let (eigs, _) = killing
            .eigh(ndarray_linalg::UPLO::Lower)
            .map_err(|e| Error::InvalidAlgebra(format!("Killing eigensolve: {e}")))?;
        let min_abs = eigs.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let max_abs = eigs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if min_abs <= 1e-10 * max_abs.max(1.0) {
            return Err(Error::InvalidAlgebra(
                "Killing form is degenerate; algebra is not semi-simple".into(),
            ));
        }
        Ok(Self {
            name: name.to_string(),
            dim,
            structure,
            killing,
        })
    }

    /// su(2) with c^k_{ij} = epsilon_{ijk}; its Killing form works out to
    /// -2 * identity.
    pub fn su2() -> Self {
        let mut c = Array3::zeros((3, 3, 3));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[[k, i, j]] = levi_civita(i, j, k);
                }
            }
        }
        Self::from_structure_constants("su2", c).expect("su(2) structure constants")
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for a in 0..self.dim {
            let mut acc = 0.0;
            for b in 0..self.dim {
                for c in 0..self.dim {
                    acc += self.structure[[a, b, c]] * x[b] * y[c];
                }
            }
            out[a] = acc;
        }
        out
    }

    pub fn killing_pair(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                acc += self.killing[[a, b]] * x[a] * y[b];
            }
        }
        acc
    }

    /// |K| in the spectral sense; positive definite weight used by the
    /// numerical kernel machinery (pairings and charges use K itself).
    pub fn killing_abs(&self) -> Array2<f64> {
        let (eigs, vecs) = self
            .killing
            .eigh(ndarray_linalg::UPLO::Lower)
            .expect("killing eigensolve");
        let abs = Array1::from_iter(eigs.iter().map(|v| v.abs()));
        let scaled = &vecs * &abs.broadcast((self.dim, self.dim)).unwrap();
        scaled.dot(&vecs.t())
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_killing_is_minus_two_identity() {
        let g = LieAlgebra::su2();
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == b { -2.0 } else { 0.0 };
                assert!((g.killing[[a, b]] - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn su2_bracket_cyclic() {
        let g = LieAlgebra::su2();
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert_eq!(g.bracket(&e1, &e2), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_non_jacobi() {
        let mut c = Array3::zeros((2, 2, 2));
        c[[0, 0, 1]] = 1.0;
        c[[0, 1, 0]] = -1.0;
        c[[1, 0, 1]] = 1.0;
        c[[1, 1, 0]] = -1.0;
        // a 2d algebra with [e0,e1] = e0 + e1 satisfies Jacobi but has a
        // degenerate Killing form; it must be rejected as non-semi-simple
        assert!(LieAlgebra::from_structure_constants("aff", c).is_err());
    }
}
