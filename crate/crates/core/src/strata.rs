//! Symplectic splittings of `ℤ^{2g}`, the stratum maps ψ_σ assembling block
//! length functions, and the test of whether a length function splits.

use num_traits::Zero;
use rayon::prelude::*;

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::field::Rational;
use crate::lattices::LengthFunction;
use crate::matk::MatK;
use crate::scalars::Algebra;
use crate::symplectic::{is_unimodular, standard_j};

pub const SPLIT_TOL: f64 = 1e-9;

/// A decomposition `ℤ^{2g} = ⊕ Λ_j` into symplectically orthogonal,
/// nondegenerate sublattices. Block `j` is spanned by the columns of `basis`
/// listed in `blocks[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSplitting {
    g: usize,
    blocks: Vec<Vec<usize>>,
    basis: Dense<Rational>,
    inverse: Dense<Rational>,
}

impl SymplecticSplitting {
    pub fn new(g: usize, blocks: Vec<Vec<usize>>, basis: Option<Dense<Rational>>) -> Result<Self> {
        let n = 2 * g;
        let basis = basis.unwrap_or_else(|| Dense::identity(n));
        if basis.rows() != n || basis.cols() != n {
            return Err(Error::InvalidSplitting(format!("basis must be {n}×{n}")));
        }
        if !is_unimodular(&basis) {
            return Err(Error::InvalidSplitting("basis is not unimodular".into()));
        }
        let j = standard_j::<Rational>(g);
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() || block.len() % 2 == 1 {
                return Err(Error::InvalidSplitting(format!(
                    "block {block:?} has odd or zero size"
                )));
            }
            for &i in block {
                if i >= n || seen[i] {
                    return Err(Error::InvalidSplitting(format!(
                        "index {i} is out of range or repeated"
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSplitting(
                "blocks do not cover the basis".into(),
            ));
        }
        for (a, sa) in blocks.iter().enumerate() {
            let ba = basis.select_columns(sa);
            for (b, sb) in blocks.iter().enumerate() {
                let form = ba.transpose().matmul(&j).matmul(&basis.select_columns(sb));
                if a == b {
                    if form.determinant().is_zero() {
                        return Err(Error::InvalidSplitting(format!("block {a} is degenerate")));
                    }
                } else if !form.is_zero_matrix() {
                    return Err(Error::InvalidSplitting(format!(
                        "blocks {a} and {b} are not symplectically orthogonal"
                    )));
                }
            }
        }
        let inverse = basis.inverse(0.0).expect("unimodular");
        Ok(Self {
            g,
            blocks,
            basis,
            inverse,
        })
    }

    /// The single-block splitting.
    pub fn trivial(g: usize) -> Self {
        Self::new(g, vec![(0..2 * g).collect()], None).expect("valid")
    }

    /// Splitting along coordinate pairs `{p_i, q_i}` grouped by `groups`
    /// (each a list of pair indices), then moved by the symplectic `basis`.
    pub fn from_pairs(
        g: usize,
        groups: &[Vec<usize>],
        basis: Option<Dense<Rational>>,
    ) -> Result<Self> {
        let blocks = groups
            .iter()
            .map(|grp| {
                grp.iter()
                    .copied()
                    .chain(grp.iter().map(|&i| g + i))
                    .collect()
            })
            .collect();
        Self::new(g, blocks, basis)
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn basis(&self) -> &Dense<Rational> {
        &self.basis
    }

    /// Genus of each block.
    pub fn genera(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len() / 2).collect()
    }

    /// `(ξ_σ⁻¹)_j`: the block-`j` coordinates of a vector of `ℤ^{2g}`.
    pub fn component(&self, j: usize) -> Dense<Rational> {
        self.inverse.select_rows(&self.blocks[j])
    }

    /// `ξ_σ`: assembles block coordinates into a vector of `ℤ^{2g}`.
    pub fn assemble(&self, parts: &[Vec<Rational>]) -> Vec<Rational> {
        let n = 2 * self.g;
        let mut out = vec![Rational::zero(); n];
        for (block, coords) in self.blocks.iter().zip(parts) {
            for (&col, c) in block.iter().zip(coords) {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = o.clone() + self.basis[(i, col)].clone() * c.clone();
                }
            }
        }
        out
    }

    /// True when every block of `self` lies in a block of `other`.
    pub fn refines(&self, other: &Self) -> bool {
        if self.g != other.g {
            return false;
        }
        self.blocks.iter().all(|s| {
            let bs = self.basis.select_columns(s);
            other.blocks.iter().any(|t| {
                let bt = other.basis.select_columns(t);
                bt.hstack(&bs).rank(0.0) == bt.rank(0.0)
            })
        })
    }
}

/// `ℓ(ω)² = Σ_j ℓ_j((ξ_σ⁻¹)_j ω)²`, i.e. `G = Σ_j R_jᵀ G_j R_j`.
pub fn psi_sigma(splitting: &SymplecticSplitting, grams: &[MatK]) -> Result<LengthFunction> {
    if grams.len() != splitting.blocks.len() {
        return Err(Error::SizeMismatch {
            expected: splitting.blocks.len(),
            got: grams.len(),
        });
    }
    let n = 2 * splitting.g;
    let mut g = Dense::<f64>::zeros(n, n);
    for (j, gj) in grams.iter().enumerate() {
        if gj.algebra() != Algebra::R {
            return Err(Error::TagMismatch {
                left: Algebra::R,
                right: gj.algebra(),
            });
        }
        if gj.size() != splitting.blocks[j].len() {
            return Err(Error::SizeMismatch {
                expected: splitting.blocks[j].len(),
                got: gj.size(),
            });
        }
        let r = splitting.component(j).to_f64();
        let gd = Dense::from_fn(gj.size(), gj.size(), |a, b| gj.get(a, b).re());
        g = g.add(&r.transpose().matmul(&gd).matmul(&r));
    }
    Ok(LengthFunction::new(MatK::from_real(Algebra::R, &g)))
}

fn real_gram(l: &LengthFunction) -> Result<Dense<f64>> {
    if l.algebra() != Algebra::R {
        return Err(Error::TagMismatch {
            left: Algebra::R,
            right: l.algebra(),
        });
    }
    let g = l.gram();
    Ok(Dense::from_fn(g.size(), g.size(), |a, b| g.get(a, b).re()))
}

fn block_of(splitting: &SymplecticSplitting) -> Vec<usize> {
    let mut owner = vec![0; 2 * splitting.g];
    for (j, block) in splitting.blocks.iter().enumerate() {
        for &i in block {
            owner[i] = j;
        }
    }
    owner
}

/// Whether the Gram matrix is block diagonal in the splitting basis, within
/// `tol` relative to its largest diagonal entry.
pub fn splits_along(l: &LengthFunction, splitting: &SymplecticSplitting, tol: f64) -> Result<bool> {
    let g = real_gram(l)?;
    if g.rows() != 2 * splitting.g {
        return Err(Error::SizeMismatch {
            expected: 2 * splitting.g,
            got: g.rows(),
        });
    }
    let b = splitting.basis.to_f64();
    let h = b.transpose().matmul(&g).matmul(&b);
    let scale = (0..h.rows()).map(|i| h[(i, i)].abs()).fold(0.0, f64::max);
    let owner = block_of(splitting);
    for a in 0..h.rows() {
        for c in 0..h.cols() {
            if owner[a] != owner[c] && h[(a, c)].abs() > tol * scale.max(f64::MIN_POSITIVE) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Independent form of [`splits_along`] through the quadratic identity
/// `ℓ(v_a + v_b)² = ℓ(v_a)² + ℓ(v_b)²` for basis vectors in distinct blocks.
pub fn splits_along_by_probes(
    l: &LengthFunction,
    splitting: &SymplecticSplitting,
    tol: f64,
) -> Result<bool> {
    let g = real_gram(l)?;
    let b = splitting.basis.to_f64();
    let n = 2 * splitting.g;
    let col = |a: usize| b.column(a);
    let len_sq = |v: &[f64]| g.quadratic(v);
    let owner = block_of(splitting);
    let scale = (0..n).map(|a| len_sq(&col(a))).fold(0.0, f64::max);
    for a in 0..n {
        for c in a + 1..n {
            if owner[a] == owner[c] {
                continue;
            }
            let (va, vc) = (col(a), col(c));
            let sum: Vec<f64> = va.iter().zip(&vc).map(|(x, y)| x + y).collect();
            let gap = len_sq(&sum) - len_sq(&va) - len_sq(&vc);
            if gap.abs() > 2.0 * tol * scale.max(f64::MIN_POSITIVE) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Indices of the candidates `ℓ` splits along, in input order.
    pub accepted: Vec<usize>,
    /// Accepted candidates not strictly refined by another accepted one.
    pub finest: Vec<usize>,
}

pub fn detect_splitting(
    l: &LengthFunction,
    candidates: &[SymplecticSplitting],
    tol: f64,
) -> Result<Detection> {
    let verdicts: Vec<bool> = candidates
        .par_iter()
        .map(|s| splits_along(l, s, tol))
        .collect::<Result<_>>()?;
    let accepted: Vec<usize> = (0..candidates.len()).filter(|&i| verdicts[i]).collect();
    let strictly_finer = |a: usize, b: usize| {
        candidates[a].refines(&candidates[b]) && !candidates[b].refines(&candidates[a])
    };
    let finest = accepted
        .iter()
        .copied()
        .filter(|&i| !accepted.iter().any(|&k| strictly_finer(k, i)))
        .collect();
    Ok(Detection { accepted, finest })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> MatK {
        MatK::real_diagonal(Algebra::R, d)
    }

    #[test]
    fn assembly_example() {
        let s = SymplecticSplitting::new(2, vec![vec![0, 2], vec![1, 3]], None).unwrap();
        let l = psi_sigma(&s, &[diag(&[4.0, 0.25]), diag(&[1.0, 1.0])]).unwrap();
        assert!(l.gram().distance(&diag(&[4.0, 1.0, 0.25, 1.0])) < 1e-15);
        assert!(splits_along(&l, &s, SPLIT_TOL).unwrap());
    }

    #[test]
    fn trivial_splitting() {
        let s = SymplecticSplitting::trivial(2);
        let g = diag(&[1.0, 2.0, 3.0, 4.0]);
        let l = psi_sigma(&s, std::slice::from_ref(&g)).unwrap();
        assert!(l.gram().distance(&g) < 1e-15);
        assert!(splits_along(&l, &s, SPLIT_TOL).unwrap());
    }

    #[test]
    fn off_block_entry_breaks_splitting() {
        let s = SymplecticSplitting::from_pairs(2, &[vec![0], vec![1]], None).unwrap();
        let mut g = diag(&[1.0, 1.0, 1.0, 1.0]);
        g.set(0, 1, crate::scalars::Scalar::real(Algebra::R, 0.1));
        g.set(1, 0, crate::scalars::Scalar::real(Algebra::R, 0.1));
        let l = LengthFunction::new(g);
        assert!(!splits_along(&l, &s, SPLIT_TOL).unwrap());
        assert!(!splits_along_by_probes(&l, &s, SPLIT_TOL).unwrap());
    }

    #[test]
    fn invalid_splittings() {
        // p1 with p2 is isotropic
        assert!(SymplecticSplitting::new(2, vec![vec![0, 1], vec![2, 3]], None).is_err());
        assert!(SymplecticSplitting::new(1, vec![vec![0]], None).is_err());
        assert!(SymplecticSplitting::new(1, vec![vec![0, 1], vec![1, 0]], None).is_err());
    }

    #[test]
    fn identity_detection() {
        let split = SymplecticSplitting::from_pairs(2, &[vec![0], vec![1]], None).unwrap();
        let l = LengthFunction::new(diag(&[1.0; 4]));
        let d = detect_splitting(
            &l,
            &[SymplecticSplitting::trivial(2), split.clone()],
            SPLIT_TOL,
        )
        .unwrap();
        assert_eq!(d.accepted, vec![0, 1]);
        assert_eq!(d.finest, vec![1]);
        assert!(split.refines(&SymplecticSplitting::trivial(2)));
    }
}
