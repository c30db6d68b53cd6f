//! Random generators for scalars, matrices and lattices used by the property
//! suites.

use rand::Rng;

use crate::dense::Dense;
use crate::field::{rational, Field, Rational};
use crate::matk::{complete_orthonormal, orthogonal_residual, MatK, VecK};
use crate::octo::HermitianOct;
use crate::scalars::{Algebra, Scalar};
use crate::strata::SymplecticSplitting;

pub fn scalar<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra) -> Scalar {
    let coords = (0..algebra.dim())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    Scalar::new(algebra, coords).expect("length matches")
}

/// Rational scalar with coordinates `n / den`, `|n| ≤ bound`, `den ∈ 1..=max_den`.
pub fn rational_scalar<R: Rng + ?Sized>(
    rng: &mut R,
    algebra: Algebra,
    bound: i64,
    max_den: i64,
) -> Scalar<Rational> {
    let coords = (0..algebra.dim())
        .map(|_| rational(rng.gen_range(-bound..=bound), rng.gen_range(1..=max_den)))
        .collect();
    Scalar::new(algebra, coords).expect("length matches")
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> VecK {
    (0..m).map(|_| scalar(rng, algebra)).collect()
}

pub fn rational_vector<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> VecK<Rational> {
    (0..m)
        .map(|_| rational_scalar(rng, algebra, 5, 4))
        .collect()
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> MatK {
    MatK::from_fn(algebra, m, |_, _| scalar(rng, algebra))
}

pub fn rational_matrix<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> MatK<Rational> {
    MatK::from_fn(algebra, m, |_, _| rational_scalar(rng, algebra, 5, 4))
}

/// Random matrix with Dieudonné determinant bounded away from zero.
pub fn invertible<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> MatK {
    loop {
        let g = matrix(rng, algebra, m);
        let det = g.dieudonne_det().expect("associative algebra");
        if det > 0.05 {
            return g;
        }
    }
}

/// Random element of the unit-determinant slice.
pub fn special<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> MatK {
    invertible(rng, algebra, m)
        .normalize_det()
        .expect("invertible")
}

/// Haar-like unitary obtained by orthonormalizing random columns.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> MatK {
    let mut cols: Vec<VecK> = Vec::with_capacity(m);
    while cols.len() < m {
        let x = vector(rng, algebra, m);
        let r = orthogonal_residual(&cols, &x);
        let r = orthogonal_residual(&cols, &r);
        let n = r.iter().map(|s| s.norm_sq()).sum::<f64>().sqrt();
        if n > 1e-3 {
            cols.push(r.iter().map(|s| s.scale(&(1.0 / n))).collect());
        }
    }
    MatK::from_columns(algebra, &complete_orthonormal(algebra, m, &cols))
}

/// Random positive semidefinite `B B*` of the given rank.
pub fn psd_of_rank<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize, rank: usize) -> MatK {
    let b = MatK::from_fn(algebra, m, |_, j| {
        if j < rank {
            scalar(rng, algebra)
        } else {
            Scalar::zero(algebra)
        }
    });
    b.mul(&b.adjoint()).hermitian_part()
}

/// `U diag(1, …, 1, 0, …, 0) U*` with `rank` ones and random unitary `U`.
pub fn projection_of_rank<R: Rng + ?Sized>(
    rng: &mut R,
    algebra: Algebra,
    m: usize,
    rank: usize,
) -> MatK {
    let u = unitary(rng, algebra, m);
    let d: Vec<f64> = (0..m).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    u.mul(&MatK::real_diagonal(algebra, &d))
        .mul(&u.adjoint())
        .hermitian_part()
}

/// Random element of `GL_n(ℤ)` as a product of elementary moves.
pub fn unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Dense<Rational> {
    let mut u = Dense::<Rational>::identity(n);
    for _ in 0..3 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        match rng.gen_range(0..3) {
            0 if a != b => {
                let q = Rational::from_i64(rng.gen_range(-2..=2));
                for i in 0..n {
                    let v = u[(i, a)].clone() + q.clone() * u[(i, b)].clone();
                    u[(i, a)] = v;
                }
            }
            1 => u.swap_cols(a, b),
            _ => {
                for i in 0..n {
                    let v = -u[(i, a)].clone();
                    u[(i, a)] = v;
                }
            }
        }
    }
    u
}

fn symmetric<R: Rng + ?Sized>(rng: &mut R, g: usize, den: i64) -> Dense<Rational> {
    let mut s = Dense::<Rational>::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            let v = rational(rng.gen_range(-2..=2), rng.gen_range(1..=den));
            s[(i, j)] = v.clone();
            s[(j, i)] = v;
        }
    }
    s
}

fn block(
    a: &Dense<Rational>,
    b: &Dense<Rational>,
    c: &Dense<Rational>,
    d: &Dense<Rational>,
) -> Dense<Rational> {
    let g = a.rows();
    Dense::from_fn(2 * g, 2 * g, |i, j| match (i < g, j < g) {
        (true, true) => a[(i, j)].clone(),
        (true, false) => b[(i, j - g)].clone(),
        (false, true) => c[(i - g, j)].clone(),
        (false, false) => d[(i - g, j - g)].clone(),
    })
}

/// Product of symplectic transvections `[[I, S], [0, I]]`, `[[I, 0], [S, I]]`
/// and `[[M, 0], [0, M⁻ᵀ]]`. Integral when `den = 1`.
pub fn symplectic_matrix<R: Rng + ?Sized>(rng: &mut R, g: usize, den: i64) -> Dense<Rational> {
    let id = Dense::<Rational>::identity(g);
    let zero = Dense::<Rational>::zeros(g, g);
    let mut acc = Dense::<Rational>::identity(2 * g);
    for _ in 0..4 {
        let factor = match rng.gen_range(0..3) {
            0 => block(&id, &symmetric(rng, g, den), &zero, &id),
            1 => block(&id, &zero, &symmetric(rng, g, den), &id),
            _ => {
                let m = unimodular(rng, g);
                let mit = m.inverse(0.0).expect("unimodular").transpose();
                block(&m, &zero, &zero, &mit)
            }
        };
        acc = acc.matmul(&factor);
    }
    acc
}

/// `diag(r₁, …, r_g, 1/r₁, …, 1/r_g)` with small random rationals `r_j`.
pub fn diagonal_scaling<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Dense<Rational> {
    let r: Vec<Rational> = (0..g)
        .map(|_| rational(rng.gen_range(1..=5), rng.gen_range(1..=5)))
        .collect();
    let d: Vec<Rational> = r
        .iter()
        .cloned()
        .chain(r.iter().map(|x| Rational::from_i64(1) / x.clone()))
        .collect();
    Dense::diagonal(&d)
}

/// Basis of a random autodual lattice: rational symplectic × diagonal
/// scaling × integral symplectic × unimodular change of basis.
pub fn autodual_basis<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Dense<Rational> {
    symplectic_matrix(rng, g, 4)
        .matmul(&diagonal_scaling(rng, g))
        .matmul(&symplectic_matrix(rng, g, 1))
        .matmul(&unimodular(rng, 2 * g))
}

/// Random positive definite `B B*`.
pub fn positive_definite<R: Rng + ?Sized>(rng: &mut R, algebra: Algebra, m: usize) -> MatK {
    let b = invertible(rng, algebra, m);
    b.mul(&b.adjoint()).hermitian_part()
}

/// `U diag(d) U*` with `rank` eigenvalues drawn from `[0.5, 2]` and the rest zero.
pub fn psd_with_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    algebra: Algebra,
    m: usize,
    rank: usize,
) -> MatK {
    let u = unitary(rng, algebra, m);
    let d: Vec<f64> = (0..m)
        .map(|i| {
            if i < rank {
                rng.gen_range(0.5..2.0)
            } else {
                0.0
            }
        })
        .collect();
    u.mul(&MatK::real_diagonal(algebra, &d))
        .mul(&u.adjoint())
        .hermitian_part()
}

/// Random grouping of the `g` coordinate pairs, moved by an integral
/// symplectic matrix.
pub fn splitting<R: Rng + ?Sized>(rng: &mut R, g: usize) -> SymplecticSplitting {
    let labels: Vec<usize> = (0..g).map(|_| rng.gen_range(0..g)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        match seen.iter().position(|s| s == l) {
            Some(k) => groups[k].push(i),
            None => {
                seen.push(*l);
                groups.push(vec![i]);
            }
        }
    }
    SymplecticSplitting::from_pairs(g, &groups, Some(symplectic_matrix(rng, g, 1)))
        .expect("valid splitting")
}

/// Diagonally dominant element of `𝔥_m(𝕆)`; positive definite by Gershgorin.
pub fn positive_hermitian_oct<R: Rng + ?Sized>(rng: &mut R, m: usize) -> HermitianOct {
    let diag = (0..m).map(|_| rng.gen_range(2.0..3.0)).collect();
    let count = if m == 2 { 1 } else { 3 };
    let off = (0..count)
        .map(|_| scalar(rng, Algebra::O).scale(&0.3))
        .collect();
    HermitianOct::new(diag, off).expect("valid size")
}

/// Element of `𝔥_m(𝕆)` with no definiteness guarantee.
pub fn hermitian_oct<R: Rng + ?Sized>(rng: &mut R, m: usize) -> HermitianOct {
    let diag = (0..m).map(|_| rng.gen_range(0.2..2.0)).collect();
    let count = if m == 2 { 1 } else { 3 };
    let off = (0..count).map(|_| scalar(rng, Algebra::O)).collect();
    HermitianOct::new(diag, off).expect("valid size")
}
