//! Algebra morphisms of W induced by linear maps on rows or on columns.
//!
//! In the faithful model ξ_{i,a} = e_i f_a (with {e_i} and {f_a} two sets of
//! anticommuting generators) a canonical monomial is ±e_S f_T, so a linear
//! map on the e's (or on the f's) acts on m(S,T) through the minors of the
//! map: m(S,T) ↦ Σ_U det(R[U,S]) m(U,T).

use nalgebra::DMatrix;

use super::{bits, subsets, Context, Monomial, NilElement};
use crate::error::{Error, Result};

/// Determinant by cofactor expansion; exact on small integer matrices.
pub(crate) fn small_det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => {
            let mut acc = 0.0;
            for j in 0..n {
                if m[0][j] == 0.0 {
                    continue;
                }
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * m[0][j] * small_det(&minor);
            }
            acc
        }
    }
}

fn minor(map: &DMatrix<f64>, targets: &[usize], sources: &[usize]) -> f64 {
    let m: Vec<Vec<f64>> = targets
        .iter()
        .map(|&u| sources.iter().map(|&s| map[(u, s)]).collect())
        .collect();
    small_det(&m)
}

impl NilElement {
    /// The morphism W(k,n) → W(k',n) induced by `ξ_{j,a} ↦ Σ_i map[(i,j)]·ξ_{i,a}`;
    /// `map` is k'×k.
    pub fn map_rows(&self, map: &DMatrix<f64>) -> Result<NilElement> {
        let ctx = self.context();
        if map.ncols() != ctx.rows {
            return Err(Error::DimensionMismatch {
                expected: ctx.rows,
                got: map.ncols(),
            });
        }
        let target = Context::new(map.nrows(), ctx.cols);
        let mut out = NilElement::zero(target);
        for (m, c) in self.terms() {
            let src = bits(m.rows);
            for u in subsets(target.rows, src.len()) {
                let det = minor(map, &bits(u), &src);
                if det != 0.0 {
                    out.insert(
                        Monomial {
                            rows: u,
                            cols: m.cols,
                        },
                        c * det,
                    );
                }
            }
        }
        Ok(out)
    }

    /// The morphism W(k,m) → W(k,n) induced by `ζ_{j,α} ↦ Σ_a map[(a,α)]·ξ_{j,a}`;
    /// `map` is n×m and shared by every row.
    pub fn substitute_columns(&self, map: &DMatrix<f64>) -> Result<NilElement> {
        let ctx = self.context();
        if map.ncols() != ctx.cols {
            return Err(Error::DimensionMismatch {
                expected: ctx.cols,
                got: map.ncols(),
            });
        }
        let target = Context::new(ctx.rows, map.nrows());
        let mut out = NilElement::zero(target);
        for (m, c) in self.terms() {
            let src = bits(m.cols);
            for u in subsets(target.cols, src.len()) {
                let det = minor(map, &bits(u), &src);
                if det != 0.0 {
                    out.insert(
                        Monomial {
                            rows: m.rows,
                            cols: u,
                        },
                        c * det,
                    );
                }
            }
        }
        Ok(out)
    }

    fn check_row(&self, row: usize) -> Result<()> {
        let bound = self.context().rows;
        if row < bound {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: row, bound })
        }
    }

    /// Degeneracy `x_j = x_i`: `ξ_{j,a} ↦ ξ_{i,a}`.
    pub fn identify_rows(&self, i: usize, j: usize) -> Result<NilElement> {
        self.check_row(i)?;
        self.check_row(j)?;
        let k = self.context().rows;
        let mut map = DMatrix::identity(k, k);
        map[(j, j)] = 0.0;
        map[(i, j)] += 1.0;
        self.map_rows(&map)
    }

    /// Degeneracy `x_j = x_0`: `ξ_{j,a} ↦ 0`.
    pub fn zero_row(&self, j: usize) -> Result<NilElement> {
        self.check_row(j)?;
        let k = self.context().rows;
        let mut map = DMatrix::identity(k, k);
        map[(j, j)] = 0.0;
        self.map_rows(&map)
    }

    /// Vertex permutation: `ξ_{j,a} ↦ ξ_{σ(j),a}`.
    pub fn permute_rows(&self, sigma: &[usize]) -> Result<NilElement> {
        let k = self.context().rows;
        if sigma.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: sigma.len(),
            });
        }
        let mut seen = vec![false; k];
        for &s in sigma {
            if s >= k || seen[s] {
                return Err(Error::IndexOutOfRange { index: s, bound: k });
            }
            seen[s] = true;
        }
        let mut map = DMatrix::zeros(k, k);
        for (j, &s) in sigma.iter().enumerate() {
            map[(s, j)] = 1.0;
        }
        self.map_rows(&map)
    }
}
