//! Orders, marked lattices and their translation-length functions.
//!
//! A lattice point of `𝒪^m` is an integer vector of length `d·m`: block `i`
//! holds the coordinates of `u_i` in the order basis. A length function is
//! stored as a hermitian positive semidefinite Gram matrix `G` with
//! `ℓ(u)² = Re(u* G u)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::field::{rational, Field, Rational};
use crate::matk::MatK;
use crate::scalars::{solve_polarization, Algebra, PolarizationScheme, Scalar};

pub type LatticePoint = Vec<i64>;

/// A multiplicatively closed ℤ-lattice in `𝕂` containing 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Order {
    name: String,
    algebra: Algebra,
    basis: Vec<Scalar<Rational>>,
    /// `closure[a][b]` = coordinates of `basis[a] · basis[b]` in the basis.
    closure: Vec<Vec<Vec<Rational>>>,
    to_basis: Dense<Rational>,
    one: Vec<i64>,
}

impl Order {
    pub fn new(
        name: impl Into<String>,
        algebra: Algebra,
        basis: Vec<Scalar<Rational>>,
    ) -> Result<Self> {
        let d = algebra.dim();
        if basis.len() != d {
            return Err(Error::InvalidOrder(format!(
                "expected {d} basis elements, got {}",
                basis.len()
            )));
        }
        if basis.iter().any(|b| b.algebra() != algebra) {
            return Err(Error::InvalidOrder(
                "basis element from another algebra".into(),
            ));
        }
        let matrix = Dense::from_fn(d, d, |a, b| basis[b].coords()[a].clone());
        let to_basis = matrix
            .inverse(0.0)
            .ok_or_else(|| Error::InvalidOrder("basis is not linearly independent".into()))?;
        let coords_of = |x: &Scalar<Rational>| to_basis.mul_vec(x.coords());
        let one: Vec<Rational> = coords_of(&Scalar::one(algebra));
        if one.iter().any(|c| !c.is_integer()) {
            return Err(Error::InvalidOrder("does not contain 1".into()));
        }
        let mut closure = Vec::with_capacity(d);
        for a in &basis {
            let mut row = Vec::with_capacity(d);
            for b in &basis {
                let c = coords_of(&(a * b));
                if c.iter().any(|x| !x.is_integer()) {
                    return Err(Error::InvalidOrder(format!(
                        "product {:?}·{:?} leaves the lattice",
                        a, b
                    )));
                }
                row.push(c);
            }
            closure.push(row);
        }
        let one = one
            .iter()
            .map(|c| c.to_integer().try_into().unwrap_or(0))
            .collect();
        Ok(Self {
            name: name.into(),
            algebra,
            basis,
            closure,
            to_basis,
            one,
        })
    }

    /// `"Z"`, `"Zi"`, `"lipschitz"`, `"hurwitz"`, `"Zo"` (ℤ[e₀,…,e₇]).
    pub fn named(name: &str) -> Result<Self> {
        let int = |algebra: Algebra| -> Vec<Scalar<Rational>> {
            (0..algebra.dim())
                .map(|i| Scalar::basis(algebra, i))
                .collect()
        };
        match name {
            "Z" => Self::new(name, Algebra::R, int(Algebra::R)),
            "Zi" => Self::new(name, Algebra::C, int(Algebra::C)),
            "lipschitz" => Self::new(name, Algebra::H, int(Algebra::H)),
            "hurwitz" => {
                let mut basis = int(Algebra::H);
                basis[3] = Scalar::new(Algebra::H, vec![rational(1, 2); 4])?;
                Self::new(name, Algebra::H, basis)
            }
            "Zo" => Self::new(name, Algebra::O, int(Algebra::O)),
            other => Err(Error::InvalidOrder(format!("unknown order {other:?}"))),
        }
    }

    /// Default order of an algebra: ℤ, ℤ[i], Hurwitz, ℤ[e₀,…,e₇].
    pub fn default_for(algebra: Algebra) -> Self {
        let name = match algebra {
            Algebra::R => "Z",
            Algebra::C => "Zi",
            Algebra::H => "hurwitz",
            Algebra::O => "Zo",
        };
        Self::named(name).expect("built-in order")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn basis(&self) -> &[Scalar<Rational>] {
        &self.basis
    }

    pub fn closure_table(&self) -> &[Vec<Vec<Rational>>] {
        &self.closure
    }

    /// Coordinates of `1` in the basis.
    pub fn one_coords(&self) -> &[i64] {
        &self.one
    }

    /// Coordinates of `x` in the basis (rational in general).
    pub fn coords_of(&self, x: &Scalar<Rational>) -> Vec<Rational> {
        self.to_basis.mul_vec(x.coords())
    }

    pub fn contains(&self, x: &Scalar<Rational>) -> bool {
        x.algebra() == self.algebra && self.coords_of(x).iter().all(|c| c.is_integer())
    }

    pub fn element(&self, coords: &[i64]) -> Scalar<Rational> {
        assert_eq!(coords.len(), self.dim());
        coords
            .iter()
            .zip(&self.basis)
            .fold(Scalar::zero(self.algebra), |acc, (&c, b)| {
                &acc + &b.scale(&Rational::from_i64(c))
            })
    }

    /// The vector of `𝕂^m` with integer coordinates `u`.
    pub fn point_to_vector<T: Field>(&self, u: &[i64]) -> Vec<Scalar<T>> {
        let d = self.dim();
        assert_eq!(u.len() % d, 0);
        u.chunks(d)
            .map(|c| self.element(c).map(|x| T::from_rational(x)))
            .collect()
    }

    /// Real `d×d` matrix whose column `b` holds the coordinates of basis element `b`.
    pub fn basis_matrix(&self) -> Dense<Rational> {
        let d = self.dim();
        Dense::from_fn(d, d, |a, b| self.basis[b].coords()[a].clone())
    }

    fn polarization<T: Field>(&self) -> PolarizationScheme<T> {
        let probes: Vec<Scalar<T>> = self
            .basis
            .iter()
            .map(|b| b.map(|x| T::from_rational(x)))
            .collect();
        solve_polarization(self.algebra, &probes).expect("order basis is a real basis")
    }
}

/// A marking `f` of `𝒪^m`, i.e. the lattice `f(𝒪^m) ⊂ 𝕂^m`.
#[derive(Debug, Clone)]
pub struct MarkedLattice {
    order: Order,
    f: MatK,
}

impl MarkedLattice {
    pub fn new(order: Order, f: MatK) -> Result<Self> {
        if f.algebra() != order.algebra() {
            return Err(Error::TagMismatch {
                left: order.algebra(),
                right: f.algebra(),
            });
        }
        if !f.algebra().is_associative() {
            return Err(Error::UnsupportedAlgebra(f.algebra()));
        }
        if f.is_zero() {
            return Err(Error::ZeroMarking);
        }
        Ok(Self { order, f })
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn marking(&self) -> &MatK {
        &self.f
    }

    pub fn size(&self) -> usize {
        self.f.size()
    }

    /// Covolume relative to the standard lattice `𝒪^m`: `det(f)^d`.
    pub fn covolume(&self) -> Result<f64> {
        Ok(self.f.dieudonne_det()?.powi(self.order.dim() as i32))
    }

    /// The covolume-one rescale `f / |det f|^{1/m}`.
    pub fn normalized(&self) -> Result<Self> {
        Ok(Self {
            order: self.order.clone(),
            f: self.f.normalize_det()?,
        })
    }

    pub fn length_function(&self) -> LengthFunction {
        LengthFunction::new(self.f.adjoint().mul(&self.f).hermitian_part())
    }

    /// `‖f(u)‖` for a lattice point `u`.
    pub fn length(&self, u: &[i64]) -> f64 {
        let v = self.f.mul_vec(&self.order.point_to_vector::<f64>(u));
        v.iter().map(Scalar::norm_sq).sum::<f64>().sqrt()
    }
}

/// `u ↦ √Re(u* G u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthFunction<T = f64> {
    gram: MatK<T>,
}

impl<T: Field> LengthFunction<T> {
    pub fn new(gram: MatK<T>) -> Self {
        Self { gram }
    }

    pub fn gram(&self) -> &MatK<T> {
        &self.gram
    }

    pub fn algebra(&self) -> Algebra {
        self.gram.algebra()
    }

    pub fn size(&self) -> usize {
        self.gram.size()
    }

    /// `ℓ(v)²` for a vector of `𝕂^m`.
    pub fn value_sq(&self, v: &[Scalar<T>]) -> T {
        self.gram.quadratic_re(v)
    }

    /// `ℓ(u)²` for a lattice point in order coordinates; exact on rationals.
    pub fn evaluate_sq(&self, order: &Order, u: &[i64]) -> T {
        self.value_sq(&order.point_to_vector::<T>(u))
    }

    pub fn evaluate(&self, order: &Order, u: &[i64]) -> f64 {
        self.evaluate_sq(order, u).to_f64().max(0.0).sqrt()
    }

    /// Real `dm×dm` matrix `Q` with `ℓ(u)² = cᵀ Q c` for order coordinates `c`.
    pub fn order_realization(&self, order: &Order) -> Dense<T> {
        let m = self.size();
        let d = order.dim();
        let b = order.basis_matrix().map(T::from_rational);
        let block = Dense::from_fn(d * m, d * m, |r, c| {
            if r / d == c / d {
                b[(r % d, c % d)].clone()
            } else {
                T::zero()
            }
        });
        block
            .transpose()
            .matmul(&self.gram.real_realization())
            .matmul(&block)
    }
}

/// A length function up to positive homothety, stored with real trace 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveLengthClass {
    gram: MatK,
}

impl ProjectiveLengthClass {
    pub fn new(gram: &MatK) -> Result<Self> {
        Ok(Self {
            gram: trace_normalize(gram)?,
        })
    }

    pub fn from_length(l: &LengthFunction) -> Result<Self> {
        Self::new(l.gram())
    }

    pub fn gram(&self) -> &MatK {
        &self.gram
    }

    pub fn length_function(&self) -> LengthFunction {
        LengthFunction::new(self.gram.clone())
    }

    pub fn algebra(&self) -> Algebra {
        self.gram.algebra()
    }

    pub fn size(&self) -> usize {
        self.gram.size()
    }
}

/// `G / Re tr G`, made exactly hermitian.
pub fn trace_normalize(gram: &MatK) -> Result<MatK> {
    let t = gram.trace_re();
    if !(t > 0.0) || gram.is_zero() {
        return Err(Error::ZeroMarking);
    }
    Ok(gram.hermitian_part().scale_real(&(1.0 / t)))
}

/// Class of `ℓ_f`, `G = f* f`.
pub fn phi(lattice: &MarkedLattice) -> Result<ProjectiveLengthClass> {
    ProjectiveLengthClass::from_length(&lattice.length_function())
}

/// Smallest accepted `σ_min / σ_max` for an acting matrix.
pub const INVERTIBLE_RATIO: f64 = 1e-14;

/// `[ℓ] ↦ [u ↦ ℓ(g* u)]`, i.e. `G ↦ g G g*`.
pub fn thurston_action(g: &MatK, class: &ProjectiveLengthClass) -> Result<ProjectiveLengthClass> {
    check_invertible(g)?;
    let gram = g.try_mul(class.gram())?.mul(&g.adjoint());
    ProjectiveLengthClass::new(&gram)
}

/// Rejects matrices whose singular values are not resolved above rounding.
pub(crate) fn check_invertible(g: &MatK) -> Result<()> {
    let sv = g.singular_values()?;
    let (max, min) = (sv[0], *sv.last().expect("nonempty"));
    if !(max > 0.0 && min > INVERTIBLE_RATIO * max) {
        return Err(Error::SingularAction);
    }
    Ok(())
}

/// Squared lengths indexed by lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTable<T = f64> {
    values: BTreeMap<LatticePoint, T>,
}

impl<T: Field> Default for ProbeTable<T> {
    fn default() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }
}

impl<T: Field> ProbeTable<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_sq(&mut self, u: LatticePoint, value_sq: T) {
        self.values.insert(u, value_sq);
    }

    pub fn get_sq(&self, u: &[i64]) -> Result<&T> {
        self.values
            .get(u)
            .ok_or_else(|| Error::IncompleteProbe(u.to_vec()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, &T)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Squared lengths of `ℓ` on the canonical probe set.
    pub fn of_length(l: &LengthFunction<T>, order: &Order) -> Self {
        let mut table = Self::new();
        for u in canonical_probes(order, l.size()) {
            let v = l.evaluate_sq(order, &u);
            table.insert_sq(u, v);
        }
        table
    }
}

impl ProbeTable<f64> {
    /// Table from (unsquared) lengths.
    pub fn from_lengths(entries: impl IntoIterator<Item = (LatticePoint, f64)>) -> Self {
        let mut table = Self::new();
        for (u, v) in entries {
            table.insert_sq(u, v * v);
        }
        table
    }
}

fn unit_point(order: &Order, m: usize, j: usize) -> LatticePoint {
    let d = order.dim();
    let mut u = vec![0; d * m];
    u[d * j..d * (j + 1)].copy_from_slice(order.one_coords());
    u
}

/// `e_j + sign · e_k q_l` with `q_l` the `l`-th order basis element.
fn mixed_point(order: &Order, m: usize, j: usize, k: usize, l: usize, sign: i64) -> LatticePoint {
    let d = order.dim();
    let mut u = unit_point(order, m, j);
    u[d * k + l] += sign;
    u
}

/// `{e_j} ∪ {e_j ± e_k q_l : j < k}` in a fixed order.
pub fn canonical_probes(order: &Order, m: usize) -> Vec<LatticePoint> {
    let d = order.dim();
    let mut out: Vec<LatticePoint> = (0..m).map(|j| unit_point(order, m, j)).collect();
    for j in 0..m {
        for k in j + 1..m {
            for l in 0..d {
                out.push(mixed_point(order, m, j, k, l, 1));
                out.push(mixed_point(order, m, j, k, l, -1));
            }
        }
    }
    out
}

/// Reconstructs the Gram matrix from squared lengths on the canonical probes.
///
/// Off-diagonal entries come from the polarization identity over the order
/// basis; the parallelogram law on each probe pair and positivity of the
/// result are checked.
pub fn gram_from_probes<T: Field>(
    table: &ProbeTable<T>,
    order: &Order,
    m: usize,
    tol: f64,
) -> Result<MatK<T>> {
    let k = order.algebra();
    let d = order.dim();
    let scheme = order.polarization::<T>();
    let probes = scheme.probes().to_vec();
    let mut g = MatK::<T>::zeros(k, m);
    let mut scale = 0.0f64;
    for j in 0..m {
        let v = table.get_sq(&unit_point(order, m, j))?.clone();
        scale = scale.max(v.magnitude());
        g.set(j, j, Scalar::real(k, v));
    }
    for j in 0..m {
        for kk in j + 1..m {
            let mut diffs = Vec::with_capacity(d);
            for (l, q) in probes.iter().enumerate() {
                let plus = table.get_sq(&mixed_point(order, m, j, kk, l, 1))?.clone();
                let minus = table.get_sq(&mixed_point(order, m, j, kk, l, -1))?.clone();
                let two = T::from_i64(2);
                let expected = two * (g.get(j, j).re() + g.get(kk, kk).re() * q.norm_sq());
                let gap = plus.clone() + minus.clone() - expected.clone();
                if !gap.is_negligible(expected.magnitude().max(scale), tol) {
                    return Err(Error::InconsistentLengths(format!(
                        "parallelogram law fails for blocks {j},{kk} at probe {l} (gap {:.3e})",
                        gap.to_f64()
                    )));
                }
                diffs.push(plus - minus);
            }
            let x = scheme.lift(&diffs);
            g.set(kk, j, x.conj());
            g.set(j, kk, x);
        }
    }
    let low = g.to_f64().real_realization().symmetric_eigenvalues();
    let top = low.first().copied().unwrap_or(0.0).abs();
    if let Some(&min) = low.last() {
        if min < -tol.max(1e-12) * top.max(f64::MIN_POSITIVE) {
            return Err(Error::InconsistentLengths(format!(
                "reconstructed Gram matrix has eigenvalue {min:.3e}"
            )));
        }
    }
    Ok(g)
}

/// Shortest nonzero lattice vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Systole {
    pub value: f64,
    pub witness: LatticePoint,
}

/// Minimum of `ℓ` over nonzero lattice points with `ℓ(u) ≤ bound`, by
/// Fincke–Pohst enumeration on the real realization. `None` when no nonzero
/// point lies within the bound.
///
/// The witness is normalized so that its first nonzero coordinate is
/// positive; among several minimal points the one with least `ℓ¹` norm,
/// then the lexicographically greatest, is returned.
pub fn lattice_systole(l: &LengthFunction, order: &Order, bound: f64) -> Result<Option<Systole>> {
    let q = l.order_realization(order);
    let n = q.rows();
    let sym = q.add(&q.transpose()).scale(&0.5);
    let chol = sym.to_nalgebra().cholesky().ok_or(Error::SingularGram)?;
    let r = chol.l().transpose();
    let diag_min = (0..n)
        .map(|i| r[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    let diag_max = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if diag_min <= 1e-9 * diag_max {
        return Err(Error::SingularGram);
    }
    let qd: Vec<f64> = (0..n).map(|i| r[(i, i)] * r[(i, i)]).collect();
    let mu = Dense::from_fn(n, n, |i, j| if j > i { r[(i, j)] / r[(i, i)] } else { 0.0 });

    let mut search = Search {
        n,
        qd: &qd,
        mu: &mu,
        radius_sq: bound * bound * (1.0 + 1e-9),
        best: Vec::new(),
        best_value: f64::INFINITY,
        x: vec![0; n],
    };
    search.descend(n, 0.0);
    if search.best.is_empty() {
        return Ok(None);
    }
    let candidates: Vec<LatticePoint> = search.best.into_iter().map(sign_normalize).collect();
    let witness = candidates
        .into_iter()
        .max_by(|a, b| {
            let la: i64 = a.iter().map(|x| x.abs()).sum();
            let lb: i64 = b.iter().map(|x| x.abs()).sum();
            lb.cmp(&la).then(a.cmp(b))
        })
        .expect("nonempty");
    let value = sym
        .quadratic(&witness.iter().map(|&x| x as f64).collect::<Vec<_>>())
        .max(0.0)
        .sqrt();
    Ok(Some(Systole { value, witness }))
}

/// Systole with the default Mahler-style bound, doubled until a point is found.
pub fn systole(l: &LengthFunction, order: &Order) -> Result<Systole> {
    let q = l.order_realization(order);
    let n = q.rows() as f64;
    let det = q.determinant();
    if !(det > 0.0) {
        return Err(Error::SingularGram);
    }
    let mut bound = det.powf(1.0 / (2.0 * n)) * n.sqrt();
    loop {
        if let Some(s) = lattice_systole(l, order, bound)? {
            return Ok(s);
        }
        bound *= 2.0;
    }
}

fn sign_normalize(mut u: LatticePoint) -> LatticePoint {
    if let Some(&first) = u.iter().find(|&&x| x != 0) {
        if first < 0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
    u
}

struct Search<'a> {
    n: usize,
    qd: &'a [f64],
    mu: &'a Dense<f64>,
    radius_sq: f64,
    best: Vec<LatticePoint>,
    best_value: f64,
    x: Vec<i64>,
}

impl Search<'_> {
    /// Enumerates coordinate `level - 1` given coordinates `level..n` and the
    /// partial sum `acc` of the squared norm.
    fn descend(&mut self, level: usize, acc: f64) {
        if level == 0 {
            if self.x.iter().all(|&v| v == 0) {
                return;
            }
            if acc < self.best_value * (1.0 - 1e-9) {
                self.best_value = acc;
                self.best.clear();
                self.radius_sq = self.radius_sq.min(acc * (1.0 + 1e-9));
            }
            if acc <= self.best_value * (1.0 + 1e-9) {
                self.best.push(self.x.clone());
            }
            return;
        }
        let i = level - 1;
        let center: f64 = -((i + 1)..self.n)
            .map(|j| self.mu[(i, j)] * self.x[j] as f64)
            .sum::<f64>();
        let room = self.radius_sq - acc;
        if room < 0.0 {
            return;
        }
        let half = (room / self.qd[i]).sqrt();
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        // zig-zag from the center outward so short vectors come first
        let start = center.round() as i64;
        let mut offsets = vec![start];
        for s in 1.. {
            let (a, b) = (start + s, start - s);
            if a > hi && b < lo {
                break;
            }
            if b >= lo {
                offsets.push(b);
            }
            if a <= hi {
                offsets.push(a);
            }
        }
        for v in offsets {
            if v < lo || v > hi {
                continue;
            }
            let t = v as f64 - center;
            let next = acc + self.qd[i] * t * t;
            if next > self.radius_sq {
                continue;
            }
            self.x[i] = v;
            self.descend(i, next);
        }
        self.x[i] = 0;
    }
}

/// Exact PSD test on a rational hermitian matrix via its real realization
/// (all leading principal minors of a positive definite matrix are positive).
pub fn is_positive_definite_exact(g: &MatK<Rational>) -> bool {
    let q = g.real_realization();
    let n = q.rows();
    (1..=n).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        q.select_rows(&idx).select_columns(&idx).determinant() > Rational::zero()
    })
}
