//! Square matrices over ℝ, ℂ, ℍ (and, for the non-spectral operations, 𝕆).
//!
//! Quaternionic spectral work goes through the complex realization
//! `η(A + jB) = [[A, −B̄], [B, Ā]]`; complex spectral work uses the hermitian
//! eigensolver of `nalgebra`.

use nalgebra::{Complex, DMatrix};

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::scalars::{inner, Algebra, Scalar};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative gap under which eigenvalues are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

pub type VecK<T = f64> = Vec<Scalar<T>>;

#[derive(Clone, PartialEq)]
pub struct MatK<T = f64> {
    algebra: Algebra,
    m: usize,
    entries: Vec<Scalar<T>>,
}

impl<T: std::fmt::Debug> std::fmt::Debug for MatK<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "MatK<{}; {}>", self.algebra.tag(), self.m)?;
        for i in 0..self.m {
            writeln!(f, "  {:?}", &self.entries[i * self.m..(i + 1) * self.m])?;
        }
        Ok(())
    }
}

impl<T: Field> MatK<T> {
    pub fn new(algebra: Algebra, m: usize, entries: Vec<Scalar<T>>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::SizeMismatch {
                expected: m * m,
                got: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|e| e.algebra() != algebra) {
            return Err(Error::TagMismatch {
                left: algebra,
                right: bad.algebra(),
            });
        }
        Ok(Self {
            algebra,
            m,
            entries,
        })
    }

    pub fn from_fn(
        algebra: Algebra,
        m: usize,
        mut f: impl FnMut(usize, usize) -> Scalar<T>,
    ) -> Self {
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let e = f(i, j);
                assert_eq!(
                    e.algebra(),
                    algebra,
                    "entry ({i},{j}) has the wrong algebra"
                );
                entries.push(e);
            }
        }
        Self {
            algebra,
            m,
            entries,
        }
    }

    pub fn zeros(algebra: Algebra, m: usize) -> Self {
        Self::from_fn(algebra, m, |_, _| Scalar::zero(algebra))
    }

    pub fn identity(algebra: Algebra, m: usize) -> Self {
        Self::from_fn(algebra, m, |i, j| {
            if i == j {
                Scalar::one(algebra)
            } else {
                Scalar::zero(algebra)
            }
        })
    }

    pub fn diagonal(algebra: Algebra, diag: &[Scalar<T>]) -> Self {
        let m = diag.len();
        Self::from_fn(algebra, m, |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                Scalar::zero(algebra)
            }
        })
    }

    pub fn real_diagonal(algebra: Algebra, diag: &[T]) -> Self {
        let d: Vec<_> = diag
            .iter()
            .map(|x| Scalar::real(algebra, x.clone()))
            .collect();
        Self::diagonal(algebra, &d)
    }

    /// Embeds a real matrix.
    pub fn from_real(algebra: Algebra, a: &Dense<T>) -> Self {
        assert!(a.is_square());
        Self::from_fn(algebra, a.rows(), |i, j| {
            Scalar::real(algebra, a[(i, j)].clone())
        })
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(algebra: Algebra, cols: &[VecK<T>]) -> Self {
        let m = cols.len();
        Self::from_fn(algebra, m, |i, j| cols[j][i].clone())
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[Scalar<T>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar<T> {
        &self.entries[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar<T>) {
        assert_eq!(x.algebra(), self.algebra);
        self.entries[i * self.m + j] = x;
    }

    pub fn column(&self, j: usize) -> VecK<T> {
        (0..self.m).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<VecK<T>> {
        (0..self.m).map(|j| self.column(j)).collect()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&Scalar<T>) -> Scalar<U>) -> MatK<U> {
        MatK {
            algebra: self.algebra,
            m: self.m,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> MatK<f64> {
        self.map(Scalar::to_f64)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.algebra, self.m, |i, j| self.get(j, i).conj())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::TagMismatch {
                left: self.algebra,
                right: other.algebra,
            });
        }
        if self.m != other.m {
            return Err(Error::SizeMismatch {
                expected: self.m,
                got: other.m,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let m = self.m;
        Ok(Self::from_fn(self.algebra, m, |i, j| {
            (0..m).fold(Scalar::zero(self.algebra), |acc, k| {
                &acc + &(self.get(i, k) * other.get(k, j))
            })
        }))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_fn(self.algebra, self.m, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_fn(self.algebra, self.m, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("incompatible matrix product")
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible matrix sum")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("incompatible matrix difference")
    }

    pub fn scale_real(&self, s: &T) -> Self {
        self.map(|x| x.scale(s))
    }

    /// `(Mu)_i = Σ_j M_ij u_j`.
    pub fn mul_vec(&self, u: &[Scalar<T>]) -> VecK<T> {
        assert_eq!(u.len(), self.m);
        (0..self.m)
            .map(|i| {
                (0..self.m).fold(Scalar::zero(self.algebra), |acc, j| {
                    &acc + &(self.get(i, j) * &u[j])
                })
            })
            .collect()
    }

    /// Real trace `Σ Re(M_ii)`.
    pub fn trace_re(&self) -> T {
        (0..self.m).fold(T::zero(), |acc, i| acc + self.get(i, i).re())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    /// Matrix of the real-linear map `u ↦ Mu` on `ℝ^{dm}`; coordinate `a` of
    /// `u_i` sits at index `d·i + a`.
    pub fn real_realization(&self) -> Dense<T> {
        let d = self.algebra.dim();
        let basis: Vec<Scalar<T>> = (0..d).map(|b| Scalar::basis(self.algebra, b)).collect();
        let mut out = Dense::zeros(d * self.m, d * self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                for (b, e) in basis.iter().enumerate() {
                    let col = x * e;
                    for (a, c) in col.coords().iter().enumerate() {
                        out[(d * i + a, d * j + b)] = c.clone();
                    }
                }
            }
        }
        out
    }

    /// Real part of the pairing `u* M u`.
    pub fn quadratic_re(&self, u: &[Scalar<T>]) -> T {
        let mu = self.mul_vec(u);
        u.iter()
            .zip(&mu)
            .fold(T::zero(), |acc, (a, b)| acc + (&a.conj() * b).re())
    }

    /// Gauss–Jordan inverse with left row operations; `None` when singular.
    /// Not defined over 𝕆.
    pub fn inverse(&self, tol: f64) -> Result<Option<Self>> {
        if !self.algebra.is_associative() {
            return Err(Error::UnsupportedAlgebra(self.algebra));
        }
        let m = self.m;
        let k = self.algebra;
        let mut a: Vec<VecK<T>> = (0..m)
            .map(|i| self.entries[i * m..(i + 1) * m].to_vec())
            .collect();
        let mut inv: Vec<VecK<T>> = Self::identity(k, m).rows_vec();
        let scale = self
            .entries
            .iter()
            .map(|x| x.norm_sq().to_f64())
            .fold(0.0, f64::max);
        for c in 0..m {
            let pivot = (c..m)
                .filter(|&i| !a[i][c].norm_sq().is_negligible(scale, tol * tol))
                .max_by(|&x, &y| {
                    a[x][c]
                        .norm_sq()
                        .to_f64()
                        .total_cmp(&a[y][c].norm_sq().to_f64())
                        .then(y.cmp(&x))
                });
            let Some(p) = pivot else { return Ok(None) };
            a.swap(c, p);
            inv.swap(c, p);
            let pinv = a[c][c].inverse()?;
            a[c] = a[c].iter().map(|x| &pinv * x).collect();
            inv[c] = inv[c].iter().map(|x| &pinv * x).collect();
            for i in 0..m {
                if i == c || a[i][c].is_zero() {
                    continue;
                }
                let factor = a[i][c].clone();
                let (ra, ri) = (a[c].clone(), inv[c].clone());
                for j in 0..m {
                    a[i][j] = &a[i][j] - &(&factor * &ra[j]);
                    inv[i][j] = &inv[i][j] - &(&factor * &ri[j]);
                }
            }
        }
        Ok(Some(Self {
            algebra: k,
            m,
            entries: inv.into_iter().flatten().collect(),
        }))
    }

    fn rows_vec(&self) -> Vec<VecK<T>> {
        (0..self.m)
            .map(|i| self.entries[i * self.m..(i + 1) * self.m].to_vec())
            .collect()
    }

    /// Splits a quaternionic matrix as `A + jB` with complex `A`, `B`.
    ///
    /// A quaternion `c₀ + c₁i + c₂j + c₃k` equals `z + j w` with
    /// `z = c₀ + c₁i` and `w = c₂ − c₃i`.
    pub fn quaternion_parts(&self) -> Result<(Self, Self)> {
        if self.algebra != Algebra::H {
            return Err(Error::UnsupportedAlgebra(self.algebra));
        }
        let z = self.map(|q| {
            let c = q.coords();
            Scalar::from_coords_unchecked(Algebra::C, vec![c[0].clone(), c[1].clone()])
        });
        let w = self.map(|q| {
            let c = q.coords();
            Scalar::from_coords_unchecked(Algebra::C, vec![c[2].clone(), -c[3].clone()])
        });
        Ok((z, w))
    }

    /// The complex `2m×2m` block matrix `[[A, −B̄], [B, Ā]]` of `M = A + jB`.
    pub fn eta(&self) -> Result<Self> {
        let (a, b) = self.quaternion_parts()?;
        let m = self.m;
        Ok(Self::from_fn(Algebra::C, 2 * m, |i, j| {
            match (i < m, j < m) {
                (true, true) => a.get(i, j).clone(),
                (true, false) => -&b.get(i, j - m).conj(),
                (false, true) => b.get(i - m, j).clone(),
                (false, false) => a.get(i - m, j - m).conj(),
            }
        }))
    }
}

/// Complex vector `(a; b)` of the quaternion vector `a + jb`.
pub fn quaternion_vector_to_complex<T: Field>(x: &[Scalar<T>]) -> VecK<T> {
    let a = x.iter().map(|q| {
        let c = q.coords();
        Scalar::from_coords_unchecked(Algebra::C, vec![c[0].clone(), c[1].clone()])
    });
    let b = x.iter().map(|q| {
        let c = q.coords();
        Scalar::from_coords_unchecked(Algebra::C, vec![c[2].clone(), -c[3].clone()])
    });
    a.chain(b).collect()
}

/// Inverse of [`quaternion_vector_to_complex`].
pub fn complex_vector_to_quaternion<T: Field>(w: &[Scalar<T>]) -> VecK<T> {
    let m = w.len() / 2;
    (0..m)
        .map(|i| {
            let (a, b) = (w[i].coords(), w[m + i].coords());
            Scalar::from_coords_unchecked(
                Algebra::H,
                vec![a[0].clone(), a[1].clone(), b[0].clone(), -b[1].clone()],
            )
        })
        .collect()
}

impl MatK<f64> {
    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|x| x.norm_sq()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).frobenius()
    }

    /// `‖M − M*‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale_real(&0.5)
    }

    pub fn to_rational(&self) -> Option<MatK<Rational>> {
        let entries = self
            .entries
            .iter()
            .map(Scalar::to_rational)
            .collect::<Option<Vec<_>>>()?;
        Some(MatK {
            algebra: self.algebra,
            m: self.m,
            entries,
        })
    }

    fn to_complex_nalgebra(&self) -> DMatrix<Complex<f64>> {
        assert_eq!(self.algebra, Algebra::C);
        DMatrix::from_fn(self.m, self.m, |i, j| {
            let c = self.get(i, j).coords();
            Complex::new(c[0], c[1])
        })
    }

    /// Singular values, nonincreasing. Over ℍ those of `η(M)`, each twice.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let mut sv: Vec<f64> = match self.algebra {
            Algebra::R => Dense::from_fn(self.m, self.m, |i, j| self.get(i, j).re())
                .to_nalgebra()
                .singular_values()
                .iter()
                .copied()
                .collect(),
            Algebra::C => self
                .to_complex_nalgebra()
                .singular_values()
                .iter()
                .copied()
                .collect(),
            Algebra::H => self
                .eta()?
                .to_complex_nalgebra()
                .singular_values()
                .iter()
                .copied()
                .collect(),
            Algebra::O => return Err(Error::UnsupportedAlgebra(Algebra::O)),
        };
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }

    /// `|det M|` over ℝ and ℂ, `√det η(M)` over ℍ.
    pub fn dieudonne_det(&self) -> Result<f64> {
        match self.algebra {
            Algebra::R => Ok(Dense::from_fn(self.m, self.m, |i, j| self.get(i, j).re())
                .determinant()
                .abs()),
            Algebra::C => Ok(self.to_complex_nalgebra().determinant().norm()),
            Algebra::H => Ok(self
                .eta()?
                .to_complex_nalgebra()
                .determinant()
                .norm()
                .sqrt()),
            Algebra::O => Err(Error::UnsupportedAlgebra(Algebra::O)),
        }
    }

    /// Real positive rescale `M / |det M|^{1/m}` with Dieudonné determinant 1.
    pub fn normalize_det(&self) -> Result<Self> {
        let det = self.dieudonne_det()?;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Singular);
        }
        Ok(self.scale_real(&det.powf(-1.0 / self.m as f64)))
    }
}

/// Spectral decomposition `M = U D U*` of a hermitian matrix with `D`
/// nonincreasing.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub matrix: MatK,
    pub vectors: MatK,
    pub values: Vec<f64>,
}

impl HermitianEigen {
    /// `U D U*`.
    pub fn reconstruct(&self) -> MatK {
        self.apply(|x| x)
    }

    /// `U f(D) U*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> MatK {
        let k = self.vectors.algebra();
        let fd: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let ud = MatK::from_fn(k, self.vectors.size(), |i, j| {
            self.vectors.get(i, j).scale(&fd[j])
        });
        ud.mul(&self.vectors.adjoint())
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    /// Number of eigenvalues above `rel · max|λ|`.
    pub fn rank(&self, rel: f64) -> usize {
        let top = self.max_abs_value();
        self.values.iter().filter(|&&v| v > rel * top).count()
    }
}

fn sorted_pairs(values: Vec<f64>, vectors: Vec<VecK>) -> (Vec<f64>, Vec<VecK>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    (
        order.iter().map(|&i| values[i]).collect(),
        order.iter().map(|&i| vectors[i].clone()).collect(),
    )
}

/// Component of `x` orthogonal to the orthonormal columns `basis`, using the
/// right-linear projection `x − Σ u ⟨u|x⟩`.
pub fn orthogonal_residual(basis: &[VecK], x: &[Scalar]) -> VecK {
    let mut r = x.to_vec();
    for u in basis {
        let c = inner(u, &r);
        for (ri, ui) in r.iter_mut().zip(u) {
            *ri = &*ri - &(ui * &c);
        }
    }
    r
}

fn vec_norm(x: &[Scalar]) -> f64 {
    x.iter().map(|s| s.norm_sq()).sum::<f64>().sqrt()
}

fn normalized(x: &[Scalar]) -> VecK {
    let n = vec_norm(x);
    x.iter().map(|s| s.scale(&(1.0 / n))).collect()
}

/// Picks `count` orthonormal vectors from `candidates` greedily by largest
/// residual against `basis` and the vectors picked so far.
fn greedy_orthonormal(basis: &[VecK], candidates: &[VecK], count: usize) -> Vec<VecK> {
    let mut chosen: Vec<VecK> = Vec::new();
    for _ in 0..count {
        let mut all = basis.to_vec();
        all.extend(chosen.iter().cloned());
        let best = candidates
            .iter()
            .map(|c| {
                // twice for stability
                let r = orthogonal_residual(&all, c);
                orthogonal_residual(&all, &r)
            })
            .max_by(|a, b| vec_norm(a).total_cmp(&vec_norm(b)));
        match best {
            Some(r) if vec_norm(&r) > 1e-6 => chosen.push(normalized(&r)),
            _ => break,
        }
    }
    chosen
}

/// Extends orthonormal columns in `𝕂^m` to an orthonormal basis.
pub fn complete_orthonormal(algebra: Algebra, m: usize, cols: &[VecK]) -> Vec<VecK> {
    let standard: Vec<VecK> = (0..m)
        .map(|i| {
            (0..m)
                .map(|r| {
                    if r == i {
                        Scalar::one(algebra)
                    } else {
                        Scalar::zero(algebra)
                    }
                })
                .collect()
        })
        .collect();
    let mut out = cols.to_vec();
    let extra = greedy_orthonormal(&out, &standard, m - cols.len());
    out.extend(extra);
    out
}

/// Diagonalizes a hermitian matrix over ℝ, ℂ or ℍ.
pub fn hermitian_eig(m: &MatK, tol: f64) -> Result<HermitianEigen> {
    let k = m.algebra();
    let n = m.size();
    let scale = m.frobenius();
    let dev = m.hermitian_deviation();
    if dev > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let h = m.hermitian_part();
    let (values, vectors) = match k {
        Algebra::R => {
            let a = DMatrix::from_fn(n, n, |i, j| h.get(i, j).re());
            let eig = a.symmetric_eigen();
            let vecs = (0..n)
                .map(|c| {
                    (0..n)
                        .map(|r| Scalar::real(Algebra::R, eig.eigenvectors[(r, c)]))
                        .collect()
                })
                .collect();
            sorted_pairs(eig.eigenvalues.iter().copied().collect(), vecs)
        }
        Algebra::C => {
            let eig = h.to_complex_nalgebra().symmetric_eigen();
            let vecs = (0..n)
                .map(|c| {
                    (0..n)
                        .map(|r| {
                            let z = eig.eigenvectors[(r, c)];
                            Scalar::from_coords_unchecked(Algebra::C, vec![z.re, z.im])
                        })
                        .collect()
                })
                .collect();
            sorted_pairs(eig.eigenvalues.iter().copied().collect(), vecs)
        }
        Algebra::H => quaternion_eig(&h)?,
        Algebra::O => return Err(Error::UnsupportedAlgebra(Algebra::O)),
    };
    Ok(HermitianEigen {
        matrix: h,
        vectors: MatK::from_columns(k, &vectors),
        values,
    })
}

fn quaternion_eig(h: &MatK) -> Result<(Vec<f64>, Vec<VecK>)> {
    let n = h.size();
    let eig = h.eta()?.to_complex_nalgebra().symmetric_eigen();
    let complex_vecs: Vec<VecK> = (0..2 * n)
        .map(|c| {
            (0..2 * n)
                .map(|r| {
                    let z = eig.eigenvectors[(r, c)];
                    Scalar::from_coords_unchecked(Algebra::C, vec![z.re, z.im])
                })
                .collect()
        })
        .collect();
    let (values, complex_vecs) =
        sorted_pairs(eig.eigenvalues.iter().copied().collect(), complex_vecs);
    let top = values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let gap = CLUSTER_GAP * top.max(f64::MIN_POSITIVE);

    let mut columns: Vec<VecK> = Vec::with_capacity(n);
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end - 1] - values[end] <= gap {
            end += 1;
        }
        // each quaternionic eigenline accounts for a pair of complex eigenvectors
        let want = (end - start).div_ceil(2).min(n - columns.len());
        let candidates: Vec<VecK> = complex_vecs[start..end]
            .iter()
            .map(|w| complex_vector_to_quaternion(w))
            .collect();
        let picked = greedy_orthonormal(&columns, &candidates, want);
        columns.extend(picked);
        start = end;
    }
    if columns.len() < n {
        columns = complete_orthonormal(Algebra::H, n, &columns);
    }
    let values: Vec<f64> = columns.iter().map(|x| h.quadratic_re(x)).collect();
    Ok(sorted_pairs(values, columns))
}

/// Eigenvalues at or below this fraction of the largest are rounding noise
/// and are set to zero before taking square roots.
pub const SQRT_FLOOR: f64 = 1e-13;

fn sqrt_floor(eig: &HermitianEigen) -> impl Fn(f64) -> f64 {
    let floor = SQRT_FLOOR * eig.max_abs_value();
    move |x| if x <= floor { 0.0 } else { x.sqrt() }
}

/// Positive square root of a positive semidefinite hermitian matrix.
pub fn psd_sqrt(m: &MatK, tol: f64) -> Result<MatK> {
    let eig = hermitian_eig(m, tol)?;
    check_psd(&eig, tol)?;
    Ok(eig.apply(sqrt_floor(&eig)))
}

pub fn check_psd(eig: &HermitianEigen, tol: f64) -> Result<()> {
    let floor = -tol * eig.max_abs_value();
    match eig.values.last() {
        Some(&low) if low < floor => Err(Error::NotPsd { eigenvalue: low }),
        _ => Ok(()),
    }
}

/// `M = P U` with `P = √(MM*)` and `U` unitary.
#[derive(Debug, Clone)]
pub struct Polar {
    pub p: MatK,
    pub u: MatK,
}

pub fn polar(m: &MatK) -> Result<Polar> {
    let k = m.algebra();
    let n = m.size();
    let mmstar = m.mul(&m.adjoint()).hermitian_part();
    let eig = hermitian_eig(&mmstar, DEFAULT_TOL)?;
    let root = sqrt_floor(&eig);
    let sigma: Vec<f64> = eig.values.iter().map(|&x| root(x)).collect();
    let adj = m.adjoint();
    let v = eig.vectors.columns();
    let mut w: Vec<VecK> = Vec::new();
    for (vi, &s) in v.iter().zip(&sigma) {
        if s == 0.0 {
            break;
        }
        w.push(
            adj.mul_vec(vi)
                .iter()
                .map(|x| x.scale(&(1.0 / s)))
                .collect(),
        );
    }
    let w = complete_orthonormal(k, n, &w);
    let wm = MatK::from_columns(k, &w);
    let u = eig.vectors.mul(&wm.adjoint());
    let p = eig.apply(root);
    Ok(Polar { p, u })
}

/// A unitary `K` with `KM = M'`, present exactly when `M*M = M'*M'` within
/// `tol` (relative).
pub fn isometry_witness(m: &MatK, m2: &MatK, tol: f64) -> Result<Option<MatK>> {
    let g1 = m.adjoint().mul(m);
    let g2 = m2.adjoint().try_mul(m2)?;
    let scale = g1.frobenius().max(g2.frobenius()).max(f64::MIN_POSITIVE);
    if g1.distance(&g2) > tol * scale {
        return Ok(None);
    }
    // M* = P U₁ and M'* = P U₂ give M = U₁* P, M' = U₂* P, so K = U₂* U₁.
    let u1 = polar(&m.adjoint())?.u;
    let u2 = polar(&m2.adjoint())?.u;
    let k = u2.adjoint().mul(&u1);
    let residual = k.mul(m).distance(m2);
    if residual > tol * m.frobenius().max(f64::MIN_POSITIVE) {
        return Ok(None);
    }
    Ok(Some(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational;

    fn h(c: [f64; 4]) -> Scalar {
        Scalar::new(Algebra::H, c.to_vec()).unwrap()
    }

    fn qmat(rows: &[[[f64; 4]; 2]; 2]) -> MatK {
        MatK::from_fn(Algebra::H, 2, |i, j| h(rows[i][j]))
    }

    #[test]
    fn eta_of_identity_and_j() {
        let id = MatK::<Rational>::identity(Algebra::H, 3);
        assert_eq!(id.eta().unwrap(), MatK::identity(Algebra::C, 6));
        let j = MatK::diagonal(Algebra::H, &[Scalar::<Rational>::basis(Algebra::H, 2)]);
        let expected = MatK::from_fn(Algebra::C, 2, |r, c| {
            let v = match (r, c) {
                (0, 1) => -1,
                (1, 0) => 1,
                _ => 0,
            };
            Scalar::real(Algebra::C, rational(v, 1))
        });
        assert_eq!(j.eta().unwrap(), expected);
    }

    #[test]
    fn eta_rejects_complex() {
        assert!(MatK::<f64>::identity(Algebra::C, 2).eta().is_err());
    }

    #[test]
    fn dieudonne_of_j_is_one() {
        let j = MatK::diagonal(Algebra::H, &[Scalar::basis(Algebra::H, 2)]);
        assert!((j.dieudonne_det().unwrap() - 1.0).abs() < 1e-14);
        assert!((MatK::identity(Algebra::H, 3).dieudonne_det().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_eigen() {
        let m = MatK::real_diagonal(Algebra::R, &[4.0, 1.0]);
        let e = hermitian_eig(&m, DEFAULT_TOL).unwrap();
        assert_eq!(e.values, vec![4.0, 1.0]);
        let m = MatK::real_diagonal(Algebra::H, &[1.0, 4.0]);
        let e = hermitian_eig(&m, DEFAULT_TOL).unwrap();
        assert!((e.values[0] - 4.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
        assert!(e.reconstruct().distance(&m) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = qmat(&[
            [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]],
            [[0.0; 4], [1.0, 0.0, 0.0, 0.0]],
        ]);
        assert!(matches!(
            hermitian_eig(&m, DEFAULT_TOL),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn psd_sqrt_diagonal_and_rejects_negative() {
        let m = MatK::real_diagonal(Algebra::C, &[4.0, 9.0]);
        let s = psd_sqrt(&m, DEFAULT_TOL).unwrap();
        assert!(s.distance(&MatK::real_diagonal(Algebra::C, &[2.0, 3.0])) < 1e-12);
        let bad = MatK::real_diagonal(Algebra::R, &[1.0, -1.0]);
        assert!(matches!(
            psd_sqrt(&bad, DEFAULT_TOL),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn polar_of_psd_and_singular() {
        let m = MatK::real_diagonal(Algebra::R, &[2.0, 0.5]);
        let pu = polar(&m).unwrap();
        assert!(pu.p.distance(&m) < 1e-12);
        assert!(pu.u.distance(&MatK::identity(Algebra::R, 2)) < 1e-12);

        let s = qmat(&[
            [[1.0, 2.0, 0.0, 1.0], [0.0; 4]],
            [[0.0, 0.0, 3.0, 0.0], [0.0; 4]],
        ]);
        let pu = polar(&s).unwrap();
        assert!(pu.p.mul(&pu.u).distance(&s) < 1e-9);
        let uu = pu.u.adjoint().mul(&pu.u);
        assert!(uu.distance(&MatK::identity(Algebra::H, 2)) < 1e-10);
    }

    #[test]
    fn isometry_witness_rejects_scaled() {
        let m = qmat(&[
            [[1.0, 2.0, 0.0, 1.0], [0.5, 0.0, 0.0, 0.0]],
            [[0.0, 0.0, 3.0, 0.0], [1.0, 1.0, 1.0, 1.0]],
        ]);
        let k = isometry_witness(&m, &m, 1e-9).unwrap().unwrap();
        assert!(k.distance(&MatK::identity(Algebra::H, 2)) < 1e-9);
        assert!(isometry_witness(&m, &m.scale_real(&2.0), 1e-9)
            .unwrap()
            .is_none());
    }

    #[test]
    fn exact_inverse_over_h() {
        let q = |c: [i64; 4]| {
            Scalar::new(Algebra::H, c.iter().map(|&x| rational(x, 1)).collect()).unwrap()
        };
        let entries = vec![
            q([1, 1, 0, 0]),
            q([0, 0, 1, 0]),
            q([0, 0, 0, 1]),
            q([2, 0, 0, 0]),
        ];
        let m = MatK::new(Algebra::H, 2, entries).unwrap();
        let inv = m.inverse(0.0).unwrap().unwrap();
        assert_eq!(m.mul(&inv), MatK::identity(Algebra::H, 2));
        assert_eq!(inv.mul(&m), MatK::identity(Algebra::H, 2));
    }

    #[test]
    fn realization_is_left_action() {
        let q = MatK::diagonal(Algebra::O, &[Scalar::<Rational>::basis(Algebra::O, 1)]);
        let r = q.real_realization();
        // e1 · e2 = e4
        assert_eq!(r[(4, 2)], rational(1, 1));
        assert_eq!(q.adjoint().real_realization(), r.transpose());
    }
}
