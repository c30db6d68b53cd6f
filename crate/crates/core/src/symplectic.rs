//! Self-dual lattices for the standard symplectic form and their reduction
//! to `ℤ^{2g}`. Everything here is exact rational arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::lattices::Order;
use crate::matk::MatK;
use crate::scalars::Algebra;

/// `J = [[0, −I], [I, 0]]` of size `2g`.
pub fn standard_j<T: Field>(g: usize) -> Dense<T> {
    Dense::from_fn(2 * g, 2 * g, |i, j| {
        if i < g && j == i + g {
            -T::one()
        } else if i >= g && j + g == i {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// The lattice `A · ℤ^{2g}` with the standard symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticLattice {
    g: usize,
    a: Dense<Rational>,
}

impl SymplecticLattice {
    pub fn new(g: usize, a: Dense<Rational>) -> Result<Self> {
        if a.rows() != 2 * g || a.cols() != 2 * g {
            return Err(Error::SizeMismatch {
                expected: 2 * g,
                got: a.rows().max(a.cols()),
            });
        }
        if a.determinant().is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self { g, a })
    }

    pub fn standard(g: usize) -> Self {
        Self {
            g,
            a: Dense::identity(2 * g),
        }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn basis(&self) -> &Dense<Rational> {
        &self.a
    }

    /// The alternating form `ᵗA J A` on `ℤ^{2g}`.
    pub fn form(&self) -> Dense<Rational> {
        self.a
            .transpose()
            .matmul(&standard_j(self.g))
            .matmul(&self.a)
    }
}

/// True when the matrix is integral with determinant ±1.
pub fn is_unimodular(m: &Dense<Rational>) -> bool {
    m.is_integral() && m.determinant().abs().is_one()
}

/// `Λ = Λ^{*b}` for the standard symplectic form, i.e. `ᵗA J A ∈ GL_{2g}(ℤ)`.
pub fn is_autodual(lattice: &SymplecticLattice) -> bool {
    is_unimodular(&lattice.form())
}

/// A unimodular (anti-)hermitian form `b(x, y) = x* J y` over an order.
#[derive(Debug, Clone, PartialEq)]
pub struct FormB {
    j: MatK<Rational>,
    hermitian: bool,
}

impl FormB {
    pub fn new(j: MatK<Rational>, order: &Order) -> Result<Self> {
        if j.algebra() != order.algebra() {
            return Err(Error::TagMismatch {
                left: order.algebra(),
                right: j.algebra(),
            });
        }
        let m = j.size();
        if j.adjoint().mul(&j) != MatK::identity(j.algebra(), m) {
            return Err(Error::Schema("form matrix is not unitary".into()));
        }
        let hermitian = if j.adjoint() == j {
            true
        } else if j.adjoint() == j.scale_real(&-Rational::one()) {
            false
        } else {
            return Err(Error::Schema(
                "form matrix is neither hermitian nor anti-hermitian".into(),
            ));
        };
        if !j.entries().iter().all(|x| order.contains(x)) {
            return Err(Error::Schema(
                "form matrix has entries outside the order".into(),
            ));
        }
        Ok(Self { j, hermitian })
    }

    /// The standard symplectic form on `ℝ^{2g}`.
    pub fn symplectic_standard(g: usize) -> Self {
        Self {
            j: MatK::from_real(Algebra::R, &standard_j(g)),
            hermitian: false,
        }
    }

    pub fn matrix(&self) -> &MatK<Rational> {
        &self.j
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }
}

/// Autoduality of `A · 𝒪^m` for a general form: `A* J A ∈ GL_m(𝒪)`.
pub fn is_autodual_for(a: &MatK<Rational>, form: &FormB, order: &Order) -> Result<bool> {
    let f = a.adjoint().try_mul(form.matrix())?.mul(a);
    if !f.entries().iter().all(|x| order.contains(x)) {
        return Ok(false);
    }
    match f.inverse(0.0)? {
        Some(inv) => Ok(inv.entries().iter().all(|x| order.contains(x))),
        None => Err(Error::Singular),
    }
}

/// `f* J f = J`: `f` preserves the form, so `f*·𝒪^m` is autodual.
pub fn autodual_orbit_check<T: Field>(f: &MatK<T>, form: &FormB, tol: f64) -> bool {
    let j = form.matrix().map(|s| s.map(T::from_rational));
    if f.algebra() != j.algebra() || f.size() != j.size() {
        return false;
    }
    let lhs = f.adjoint().mul(&j).mul(f);
    let diff = lhs.sub(&j);
    let scale = f
        .entries()
        .iter()
        .map(|x| x.norm_sq().to_f64())
        .fold(1.0, f64::max);
    diff.entries()
        .iter()
        .all(|x| x.coords().iter().all(|c| c.is_negligible(scale, tol)))
}

/// Output of [`symplectic_reduce`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// `C ∈ Sp_{2g}(ℚ)` with `C Λ = ℤ^{2g}`.
    pub c: Dense<Rational>,
    /// `U ∈ GL_{2g}(ℤ)` with `ᵗU (ᵗA J A) U = J`; `C = (AU)⁻¹`.
    pub u: Dense<Rational>,
    /// `C A = U⁻¹`.
    pub ca: Dense<Rational>,
}

/// Finds `C ∈ Sp_{2g}(ℚ)` carrying an autodual lattice onto `ℤ^{2g}`.
///
/// The unimodular alternating form `F = ᵗA J A` is brought to `J` by an
/// integral congruence `ᵗU F U = J` (Euclidean reduction on hyperbolic
/// pairs); then `AU` is symplectic and `C = (AU)⁻¹`.
pub fn symplectic_reduce(lattice: &SymplecticLattice) -> Result<Reduction> {
    if !is_autodual(lattice) {
        return Err(Error::NotAutodual);
    }
    let g = lattice.genus();
    let u = symplectic_basis(&lattice.form(), g)?;
    let au = lattice.basis().matmul(&u);
    let c = au
        .inverse(0.0)
        .ok_or_else(|| Error::ReductionFailure("AU is singular".into()))?;
    let j = standard_j::<Rational>(g);
    if c.transpose().matmul(&j).matmul(&c) != j {
        return Err(Error::ReductionFailure(format!(
            "C is not symplectic: {c:?}"
        )));
    }
    let ca = c.matmul(lattice.basis());
    if !is_unimodular(&ca) {
        return Err(Error::ReductionFailure(format!(
            "C·A is not unimodular: {ca:?}"
        )));
    }
    Ok(Reduction { c, u, ca })
}

struct Congruence {
    w: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
}

impl Congruence {
    /// Column `dst` += `q` · column `src`, and the same on rows of `w`.
    fn add_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        let n = self.w.len();
        for i in 0..n {
            let v = &self.w[i][src] * q;
            self.w[i][dst] += v;
            let v = &self.u[i][src] * q;
            self.u[i][dst] += v;
        }
        for j in 0..n {
            let v = &self.w[src][j] * q;
            self.w[dst][j] += v;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.w.swap(a, b);
        for row in self.w.iter_mut().chain(self.u.iter_mut()) {
            row.swap(a, b);
        }
    }

    fn negate(&mut self, a: usize) {
        for row in self.w.iter_mut().chain(self.u.iter_mut()) {
            row[a] = -&row[a];
        }
        for v in self.w[a].iter_mut() {
            *v = -&*v;
        }
    }
}

/// `U ∈ GL_{2g}(ℤ)` with `ᵗU F U = J` for a unimodular alternating integral `F`.
///
/// Pairs `(p, g + p)` are split off one at a time: Euclidean column
/// operations reduce row `p` to a single `±1` in column `g + p`, row `g + p`
/// is then cleared against column `p`.
pub fn symplectic_basis(f: &Dense<Rational>, g: usize) -> Result<Dense<Rational>> {
    let n = 2 * g;
    if f.rows() != n || !is_unimodular(f) || f.add(&f.transpose()) != Dense::zeros(n, n) {
        return Err(Error::ReductionFailure(
            "form is not unimodular alternating".into(),
        ));
    }
    let mut c = Congruence {
        w: (0..n)
            .map(|i| (0..n).map(|j| f[(i, j)].to_integer()).collect())
            .collect(),
        u: (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect(),
    };
    for p in 0..g {
        let (a, b) = (p, g + p);
        let rest: Vec<usize> = (p + 1..g).chain(g + p + 1..n).collect();
        // Euclid on row a until only W[a][b] is nonzero
        loop {
            let pivot = std::iter::once(b)
                .chain(rest.iter().copied())
                .filter(|&j| !c.w[a][j].is_zero())
                .min_by(|&x, &y| c.w[a][x].abs().cmp(&c.w[a][y].abs()).then(x.cmp(&y)));
            let Some(pivot) = pivot else {
                return Err(Error::ReductionFailure(format!(
                    "row {a} of the form vanishes"
                )));
            };
            c.swap(b, pivot);
            let mut done = true;
            for &j in &rest {
                if c.w[a][j].is_zero() {
                    continue;
                }
                let q = c.w[a][j].div_floor(&c.w[a][b]);
                c.add_multiple(j, b, &-q);
                if !c.w[a][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !c.w[a][b].abs().is_one() {
            return Err(Error::ReductionFailure(format!(
                "pair {p} has pairing {}",
                c.w[a][b]
            )));
        }
        // clear row b using column a
        for &j in &rest {
            if c.w[b][j].is_zero() {
                continue;
            }
            let q = &c.w[b][j] / &c.w[b][a];
            c.add_multiple(j, a, &-q);
        }
        if c.w[a][b].is_one() {
            c.negate(b);
        }
    }
    let u = Dense::from_fn(n, n, |i, j| Rational::from_integer(c.u[i][j].clone()));
    let j = standard_j::<Rational>(g);
    if u.transpose().matmul(f).matmul(&u) != j {
        return Err(Error::ReductionFailure("congruence did not reach J".into()));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational;

    fn diag(d: &[(i64, i64)]) -> Dense<Rational> {
        let d: Vec<Rational> = d.iter().map(|&(a, b)| rational(a, b)).collect();
        Dense::diagonal(&d)
    }

    #[test]
    fn standard_lattice_is_autodual() {
        for g in 1..4 {
            let l = SymplecticLattice::standard(g);
            assert!(is_autodual(&l));
            let r = symplectic_reduce(&l).unwrap();
            assert_eq!(r.c, Dense::identity(2 * g));
        }
    }

    #[test]
    fn diagonal_examples() {
        let l = SymplecticLattice::new(1, diag(&[(2, 1), (1, 2)])).unwrap();
        assert!(is_autodual(&l));
        let r = symplectic_reduce(&l).unwrap();
        assert_eq!(r.c, diag(&[(1, 2), (2, 1)]));
        assert_eq!(r.ca, Dense::identity(2));

        let l = SymplecticLattice::new(1, diag(&[(2, 1), (1, 1)])).unwrap();
        assert!(!is_autodual(&l));
        assert!(matches!(symplectic_reduce(&l), Err(Error::NotAutodual)));
    }

    #[test]
    fn non_diagonal_upper_triangular() {
        // ᵗAJA = J but A is not diagonal
        let a = Dense::from_rows(vec![
            vec![rational(1, 1), rational(1, 2)],
            vec![rational(0, 1), rational(1, 1)],
        ]);
        let l = SymplecticLattice::new(1, a).unwrap();
        let r = symplectic_reduce(&l).unwrap();
        assert!(is_unimodular(&r.ca));
    }

    #[test]
    fn singular_basis_rejected() {
        assert!(matches!(
            SymplecticLattice::new(1, diag(&[(1, 1), (0, 1)])),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn orbit_check_examples() {
        let form = FormB::symplectic_standard(1);
        let id = MatK::<Rational>::identity(Algebra::R, 2);
        assert!(autodual_orbit_check(&id, &form, 0.0));
        let two = MatK::from_real(Algebra::R, &diag(&[(2, 1), (2, 1)]));
        assert!(!autodual_orbit_check(&two, &form, 0.0));
    }

    #[test]
    fn general_form_over_gaussian_integers() {
        let zi = Order::named("Zi").unwrap();
        let i = crate::scalars::Scalar::<Rational>::basis(Algebra::C, 1);
        let j = MatK::diagonal(Algebra::C, &[i.clone(), -&i]);
        let form = FormB::new(j, &zi).unwrap();
        assert!(!form.is_hermitian());
        assert!(is_autodual_for(&MatK::identity(Algebra::C, 2), &form, &zi).unwrap());
        let half = MatK::real_diagonal(Algebra::C, &[rational(2, 1), rational(1, 1)]);
        assert!(!is_autodual_for(&half, &form, &zi).unwrap());
    }
}

#[cfg(test)]
mod random_tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_autodual_lattices_reduce() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in 1..=3 {
            for _ in 0..20 {
                let a = sampling::autodual_basis(&mut rng, g);
                let l = SymplecticLattice::new(g, a).unwrap();
                assert!(is_autodual(&l));
                symplectic_reduce(&l).unwrap();
            }
        }
    }

    #[test]
    fn scaled_integral_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = sampling::symplectic_matrix(&mut rng, 2, 1);
        let d: Vec<Rational> = [(3, 1), (1, 1), (1, 3), (1, 1)]
            .iter()
            .map(|&(a, b)| crate::field::rational(a, b))
            .collect();
        let l = SymplecticLattice::new(2, Dense::diagonal(&d).matmul(&s)).unwrap();
        let r = symplectic_reduce(&l).unwrap();
        let j = standard_j::<Rational>(2);
        assert_eq!(r.c.transpose().matmul(&j).matmul(&r.c), j);
        assert!(is_unimodular(&r.c.matmul(l.basis())));
    }
}
