//! The four normed division algebras ℝ, ℂ, ℍ, 𝕆 and the polarization
//! identities that recover a hermitian pairing from norms.
//!
//! Scalars are stored as real coordinate vectors in the fixed bases
//! `(1)`, `(1, i)`, `(1, i, j, k)` and `(e₀, …, e₇)`. Multiplication is driven by
//! signed-index structure tables; the octonion table is built once from the
//! 7×7 multiplication table below and checked when first used.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::field::{Field, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algebra {
    R,
    C,
    H,
    O,
}

impl Algebra {
    pub const ALL: [Algebra; 4] = [Algebra::R, Algebra::C, Algebra::H, Algebra::O];

    /// Real dimension.
    pub const fn dim(self) -> usize {
        match self {
            Algebra::R => 1,
            Algebra::C => 2,
            Algebra::H => 4,
            Algebra::O => 8,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Algebra::R => "R",
            Algebra::C => "C",
            Algebra::H => "H",
            Algebra::O => "O",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "R" => Ok(Algebra::R),
            "C" => Ok(Algebra::C),
            "H" => Ok(Algebra::H),
            "O" => Ok(Algebra::O),
            other => Err(Error::Schema(format!("unknown algebra tag {other:?}"))),
        }
    }

    pub fn is_associative(self) -> bool {
        self != Algebra::O
    }
}

/// Product of two basis elements: `sign · e_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedIndex {
    pub sign: i8,
    pub index: u8,
}

const fn p(index: u8) -> SignedIndex {
    SignedIndex { sign: 1, index }
}

const fn n(index: u8) -> SignedIndex {
    SignedIndex { sign: -1, index }
}

/// Products `e_i · e_j` for `1 ≤ i, j ≤ 7` (row `i`, column `j`); `n(0)` is `-1`.
pub const OCTONION_TABLE: [[SignedIndex; 7]; 7] = [
    [n(0), p(4), p(7), n(2), p(6), n(5), n(3)],
    [n(4), n(0), p(5), p(1), n(3), p(7), n(6)],
    [n(7), n(5), n(0), p(6), p(2), n(4), p(1)],
    [p(2), n(1), n(6), n(0), p(7), p(3), n(5)],
    [n(6), p(3), n(2), n(7), n(0), p(1), p(4)],
    [p(5), n(7), p(4), n(3), n(1), n(0), p(2)],
    [p(3), p(6), n(1), p(5), n(4), n(2), n(0)],
];

pub type StructureTable = Vec<Vec<SignedIndex>>;

fn unital_table(d: usize, imaginary: impl Fn(usize, usize) -> SignedIndex) -> StructureTable {
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| match (a, b) {
                    (0, b) => p(b as u8),
                    (a, 0) => p(a as u8),
                    (a, b) => imaginary(a, b),
                })
                .collect()
        })
        .collect()
}

fn build_octonion_table() -> StructureTable {
    let table = unital_table(8, |a, b| OCTONION_TABLE[a - 1][b - 1]);
    validate_octonion_table(&table).expect("octonion multiplication table is inconsistent");
    table
}

/// Structural checks on the generated 8×8 octonion tensor.
pub fn validate_octonion_table(table: &StructureTable) -> std::result::Result<(), String> {
    for i in 1..8 {
        for j in 1..8 {
            let e = table[i][j];
            if e != OCTONION_TABLE[i - 1][j - 1] {
                return Err(format!("entry e{i}e{j} does not reproduce the table"));
            }
            if i == j {
                if e != n(0) {
                    return Err(format!("e{i}² != -1"));
                }
            } else {
                let f = table[j][i];
                if e.index != f.index || e.sign != -f.sign || e.index == 0 {
                    return Err(format!("e{i}e{j} is not anti-symmetric"));
                }
            }
        }
        let mut seen = [false; 8];
        for j in 0..8 {
            seen[table[i][j].index as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(format!("row e{i} is not a signed permutation"));
        }
    }
    Ok(())
}

/// Structure constants of the given algebra.
pub fn structure_table(algebra: Algebra) -> &'static StructureTable {
    static R: OnceLock<StructureTable> = OnceLock::new();
    static C: OnceLock<StructureTable> = OnceLock::new();
    static H: OnceLock<StructureTable> = OnceLock::new();
    static O: OnceLock<StructureTable> = OnceLock::new();
    match algebra {
        Algebra::R => R.get_or_init(|| unital_table(1, |_, _| unreachable!())),
        Algebra::C => C.get_or_init(|| unital_table(2, |_, _| n(0))),
        // i·j = k, j·k = i, k·i = j
        Algebra::H => H.get_or_init(|| {
            unital_table(4, |a, b| {
                if a == b {
                    n(0)
                } else {
                    let c = 6 - a - b;
                    if (b + 3 - a) % 3 == 1 {
                        p(c as u8)
                    } else {
                        n(c as u8)
                    }
                }
            })
        }),
        Algebra::O => O.get_or_init(build_octonion_table),
    }
}

/// An element of one of the four algebras.
#[derive(Clone, PartialEq)]
pub struct Scalar<T = f64> {
    algebra: Algebra,
    coords: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Scalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.algebra.tag(), self.coords)
    }
}

impl<T: Field> Scalar<T> {
    pub fn new(algebra: Algebra, coords: Vec<T>) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(Error::SizeMismatch {
                expected: algebra.dim(),
                got: coords.len(),
            });
        }
        Ok(Self { algebra, coords })
    }

    pub(crate) fn from_coords_unchecked(algebra: Algebra, coords: Vec<T>) -> Self {
        debug_assert_eq!(coords.len(), algebra.dim());
        Self { algebra, coords }
    }

    pub fn zero(algebra: Algebra) -> Self {
        Self {
            algebra,
            coords: vec![T::zero(); algebra.dim()],
        }
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::real(algebra, T::one())
    }

    pub fn real(algebra: Algebra, x: T) -> Self {
        let mut coords = vec![T::zero(); algebra.dim()];
        coords[0] = x;
        Self { algebra, coords }
    }

    /// The `index`-th basis element.
    pub fn basis(algebra: Algebra, index: usize) -> Self {
        let mut coords = vec![T::zero(); algebra.dim()];
        coords[index] = T::one();
        Self { algebra, coords }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Scalar<U> {
        Scalar {
            algebra: self.algebra,
            coords: self.coords.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Scalar<f64> {
        self.map(Field::to_f64)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn conj(&self) -> Self {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { c.clone() } else { -c.clone() })
            .collect();
        Self {
            algebra: self.algebra,
            coords,
        }
    }

    pub fn re(&self) -> T {
        self.coords[0].clone()
    }

    /// `Σ coords²`, exact for rational coordinates.
    pub fn norm_sq(&self) -> T {
        self.coords
            .iter()
            .fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().max(0.0).sqrt()
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::TagMismatch {
                left: self.algebra,
                right: other.algebra,
            });
        }
        let table = structure_table(self.algebra);
        let d = self.algebra.dim();
        let mut out = vec![T::zero(); d];
        for (a, x) in self.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in other.coords.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let e = table[a][b];
                let term = x.clone() * y.clone();
                let slot = &mut out[e.index as usize];
                *slot = if e.sign > 0 {
                    slot.clone() + term
                } else {
                    slot.clone() - term
                };
            }
        }
        Ok(Self {
            algebra: self.algebra,
            coords: out,
        })
    }

    fn try_zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::TagMismatch {
                left: self.algebra,
                right: other.algebra,
            });
        }
        Ok(Self {
            algebra: self.algebra,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.try_zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_zip(other, |a, b| a.clone() - b.clone())
    }

    /// Two-sided inverse `x̄ / |x|²`.
    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_sq();
        if n2.is_zero() {
            return Err(Error::Singular);
        }
        let inv = T::one() / n2;
        Ok(self.conj().scale(&inv))
    }

    /// Embeds into a larger algebra along ℝ ⊂ ℂ ⊂ ℍ ⊂ 𝕆, with ℍ sitting in 𝕆
    /// as `span(1, e₁, e₂, e₄)`.
    pub fn embed(&self, target: Algebra) -> Result<Self> {
        if target == self.algebra {
            return Ok(self.clone());
        }
        if target.dim() < self.algebra.dim() {
            return Err(Error::TagMismatch {
                left: self.algebra,
                right: target,
            });
        }
        let mut coords = vec![T::zero(); target.dim()];
        let slots: &[usize] = match (self.algebra, target) {
            (_, Algebra::O) if self.algebra == Algebra::H => &[0, 1, 2, 4],
            _ => &[0, 1, 2, 3],
        };
        for (c, &s) in self.coords.iter().zip(slots) {
            coords[s] = c.clone();
        }
        Ok(Self {
            algebra: target,
            coords,
        })
    }
}

impl Scalar<f64> {
    pub fn to_rational(&self) -> Option<Scalar<Rational>> {
        let coords = self
            .coords
            .iter()
            .map(|&c| crate::field::rational_from_f64(c))
            .collect::<Option<Vec<_>>>()?;
        Some(Scalar {
            algebra: self.algebra,
            coords,
        })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// `x · y`; fails on mismatched algebra tags.
pub fn mul<T: Field>(x: &Scalar<T>, y: &Scalar<T>) -> Result<Scalar<T>> {
    x.try_mul(y)
}

impl<T: Field> Mul for &Scalar<T> {
    type Output = Scalar<T>;
    fn mul(self, rhs: Self) -> Scalar<T> {
        self.try_mul(rhs)
            .expect("algebra mismatch in scalar product")
    }
}

impl<T: Field> Add for &Scalar<T> {
    type Output = Scalar<T>;
    fn add(self, rhs: Self) -> Scalar<T> {
        self.try_add(rhs).expect("algebra mismatch in scalar sum")
    }
}

impl<T: Field> Sub for &Scalar<T> {
    type Output = Scalar<T>;
    fn sub(self, rhs: Self) -> Scalar<T> {
        self.try_sub(rhs)
            .expect("algebra mismatch in scalar difference")
    }
}

impl<T: Field> Neg for &Scalar<T> {
    type Output = Scalar<T>;
    fn neg(self) -> Scalar<T> {
        self.map(|c| -c.clone())
    }
}

/// Standard pairing `Σ ūᵢ vᵢ` on `𝕂^m`.
pub fn inner<T: Field>(u: &[Scalar<T>], v: &[Scalar<T>]) -> Scalar<T> {
    assert_eq!(u.len(), v.len());
    let algebra = u.first().or(v.first()).map_or(Algebra::R, Scalar::algebra);
    u.iter()
        .zip(v)
        .fold(Scalar::zero(algebra), |acc, (a, b)| &acc + &(&a.conj() * b))
}

pub fn vector_norm_sq<T: Field>(u: &[Scalar<T>]) -> T {
    u.iter().fold(T::zero(), |acc, x| acc + x.norm_sq())
}

/// Right scalar multiplication `v · q` of a vector.
pub fn vector_right_mul<T: Field>(v: &[Scalar<T>], q: &Scalar<T>) -> Vec<Scalar<T>> {
    v.iter().map(|x| x * q).collect()
}

fn vector_combine<T: Field>(u: &[Scalar<T>], v: &[Scalar<T>], plus: bool) -> Vec<Scalar<T>> {
    u.iter()
        .zip(v)
        .map(|(a, b)| if plus { a + b } else { a - b })
        .collect()
}

/// Probes and coefficients recovering `⟨u|v⟩` from the `2d` norms
/// `‖u ± v q_l‖²`.
///
/// `inverse_images[l]` is the preimage of the `l`-th standard basis vector
/// under `q ↦ (4 Re(q q_l))_l`. Over ℝ, ℂ and ℍ these are the coefficients;
/// over 𝕆 the coefficients are their real parts and recover the real
/// scalar product `Σ Re(ūᵢ vᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationScheme<T = f64> {
    algebra: Algebra,
    probes: Vec<Scalar<T>>,
    inverse_images: Vec<Scalar<T>>,
}

impl<T: Field> PolarizationScheme<T> {
    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn probes(&self) -> &[Scalar<T>] {
        &self.probes
    }

    pub fn inverse_images(&self) -> &[Scalar<T>] {
        &self.inverse_images
    }

    /// The coefficients `λ_l`; real numbers (embedded in 𝕆) for the octonions.
    pub fn coefficients(&self) -> Vec<Scalar<T>> {
        match self.algebra {
            Algebra::O => self
                .inverse_images
                .iter()
                .map(|mu| Scalar::real(Algebra::O, mu.re()))
                .collect(),
            _ => self.inverse_images.clone(),
        }
    }

    /// Norm differences `‖u + v q_l‖² − ‖u − v q_l‖²` for every probe.
    pub fn differences(&self, u: &[Scalar<T>], v: &[Scalar<T>]) -> Vec<T> {
        self.differences_with(|x| vector_norm_sq(x), u, v)
    }

    /// Recovers `⟨u|v⟩` (the real part of it over 𝕆) from the probe norms.
    pub fn recover(&self, u: &[Scalar<T>], v: &[Scalar<T>]) -> Scalar<T> {
        self.recover_with(|x| vector_norm_sq(x), u, v)
    }

    /// Norm differences for an arbitrary squared norm on `𝕂^m`.
    pub fn differences_with(
        &self,
        norm_sq: impl Fn(&[Scalar<T>]) -> T,
        u: &[Scalar<T>],
        v: &[Scalar<T>],
    ) -> Vec<T> {
        self.probes
            .iter()
            .map(|q| {
                let vq = vector_right_mul(v, q);
                norm_sq(&vector_combine(u, &vq, true)) - norm_sq(&vector_combine(u, &vq, false))
            })
            .collect()
    }

    /// [`recover`](Self::recover) for the pairing polarizing `norm_sq`.
    pub fn recover_with(
        &self,
        norm_sq: impl Fn(&[Scalar<T>]) -> T,
        u: &[Scalar<T>],
        v: &[Scalar<T>],
    ) -> Scalar<T> {
        let diffs = self.differences_with(norm_sq, u, v);
        self.coefficients()
            .iter()
            .zip(&diffs)
            .fold(Scalar::zero(self.algebra), |acc, (lambda, d)| {
                &acc + &lambda.scale(d)
            })
    }

    /// The unique scalar `q` with `4 Re(q q_l) = diffs[l]` for all `l`.
    pub fn lift(&self, diffs: &[T]) -> Scalar<T> {
        assert_eq!(diffs.len(), self.inverse_images.len());
        self.inverse_images
            .iter()
            .zip(diffs)
            .fold(Scalar::zero(self.algebra), |acc, (mu, d)| {
                &acc + &mu.scale(d)
            })
    }
}

/// Builds the polarization scheme for an arbitrary real basis of probes by
/// inverting `q ↦ (4 Re(q q_l))_l`.
pub fn solve_polarization<T: Field>(
    algebra: Algebra,
    probes: &[Scalar<T>],
) -> Result<PolarizationScheme<T>> {
    let d = algebra.dim();
    if probes.len() != d {
        return Err(Error::SizeMismatch {
            expected: d,
            got: probes.len(),
        });
    }
    if let Some(bad) = probes.iter().find(|q| q.algebra() != algebra) {
        return Err(Error::TagMismatch {
            left: algebra,
            right: bad.algebra(),
        });
    }
    let four = T::from_i64(4);
    // phi[l][c] = 4 Re(b_c q_l), so phi(q) = phi · coords(q)
    let phi = Dense::from_fn(d, d, |l, c| {
        four.clone() * (&Scalar::basis(algebra, c) * &probes[l]).re()
    });
    let inv = phi.inverse(1e-12).ok_or(Error::DegenerateProbe(algebra))?;
    let inverse_images = (0..d)
        .map(|l| Scalar::from_coords_unchecked(algebra, inv.column(l)))
        .collect();
    Ok(PolarizationScheme {
        algebra,
        probes: probes.to_vec(),
        inverse_images,
    })
}

/// Closed-form complex scheme for probes `(1, τ)`, `τ = a + ib` with `b ≠ 0`:
/// coefficients `¼(1 + ia/b)` and `−i/(4b)`.
pub fn complex_polarization<T: Field>(tau: &Scalar<T>) -> Result<PolarizationScheme<T>> {
    if tau.algebra() != Algebra::C {
        return Err(Error::TagMismatch {
            left: Algebra::C,
            right: tau.algebra(),
        });
    }
    let (a, b) = (tau.coords()[0].clone(), tau.coords()[1].clone());
    if b.is_zero() {
        return Err(Error::DegenerateProbe(Algebra::C));
    }
    let quarter = T::one() / T::from_i64(4);
    let first = Scalar::from_coords_unchecked(
        Algebra::C,
        vec![quarter.clone(), quarter.clone() * a / b.clone()],
    );
    let second = Scalar::from_coords_unchecked(Algebra::C, vec![T::zero(), -(quarter / b)]);
    Ok(PolarizationScheme {
        algebra: Algebra::C,
        probes: vec![Scalar::one(Algebra::C), tau.clone()],
        inverse_images: vec![first, second],
    })
}

/// Scheme on the standard basis of the algebra.
pub fn standard_polarization<T: Field>(algebra: Algebra) -> PolarizationScheme<T> {
    let probes: Vec<_> = (0..algebra.dim())
        .map(|i| Scalar::basis(algebra, i))
        .collect();
    solve_polarization(algebra, &probes).expect("standard basis is a basis")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational;

    fn e(i: usize) -> Scalar<Rational> {
        Scalar::basis(Algebra::O, i)
    }

    fn q(c: [i64; 4]) -> Scalar<Rational> {
        Scalar::new(Algebra::H, c.iter().map(|&x| rational(x, 1)).collect()).unwrap()
    }

    #[test]
    fn quaternion_units() {
        let (i, j, k) = (q([0, 1, 0, 0]), q([0, 0, 1, 0]), q([0, 0, 0, 1]));
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -&k);
        assert_eq!(&j * &k, i);
        assert_eq!(&k * &i, j);
        assert_eq!(&(&i * &j) * &k, q([-1, 0, 0, 0]));
    }

    #[test]
    fn octonion_table_entries() {
        assert_eq!(&e(1) * &e(2), e(4));
        assert_eq!(&e(3) * &e(5), e(2));
        assert_eq!(&e(7) * &e(7), -&e(0));
    }

    #[test]
    fn identity_is_neutral() {
        let x = Scalar::new(Algebra::O, (1..=8).map(|v| rational(v, 3)).collect()).unwrap();
        assert_eq!(&x * &Scalar::one(Algebra::O), x);
        assert_eq!(&Scalar::one(Algebra::O) * &x, x);
    }

    #[test]
    fn mismatched_tags() {
        let a = Scalar::<f64>::one(Algebra::C);
        let b = Scalar::<f64>::one(Algebra::H);
        assert!(matches!(mul(&a, &b), Err(Error::TagMismatch { .. })));
    }

    #[test]
    fn conj_re_norm() {
        assert_eq!(e(1).conj(), -&e(1));
        let x = &Scalar::real(Algebra::O, rational(3, 1)) + &e(5).scale(&rational(2, 1));
        assert_eq!(x.re(), rational(3, 1));
        let h = Scalar::new(Algebra::H, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(h.norm(), 2.0);
    }

    #[test]
    fn quaternions_embed_as_e1_e2_e4() {
        let (i, j) = (q([0, 1, 0, 0]), q([0, 0, 1, 0]));
        let ij = (&i * &j).embed(Algebra::O).unwrap();
        let prod = &i.embed(Algebra::O).unwrap() * &j.embed(Algebra::O).unwrap();
        assert_eq!(ij, prod);
        assert_eq!(prod, e(4));
    }

    #[test]
    fn complex_scheme_matches_general_solver() {
        let i = Scalar::new(Algebra::C, vec![rational(0, 1), rational(1, 1)]).unwrap();
        let closed = complex_polarization(&i).unwrap();
        assert_eq!(
            closed.coefficients(),
            vec![
                Scalar::new(Algebra::C, vec![rational(1, 4), rational(0, 1)]).unwrap(),
                Scalar::new(Algebra::C, vec![rational(0, 1), rational(-1, 4)]).unwrap(),
            ]
        );
        let tau = Scalar::new(Algebra::C, vec![rational(2, 3), rational(-5, 7)]).unwrap();
        let closed = complex_polarization(&tau).unwrap();
        let solved = solve_polarization(Algebra::C, closed.probes()).unwrap();
        assert_eq!(closed.coefficients(), solved.coefficients());
    }

    #[test]
    fn real_tau_is_degenerate() {
        let tau = Scalar::new(Algebra::C, vec![2.0, 0.0]).unwrap();
        assert!(matches!(
            complex_polarization(&tau),
            Err(Error::DegenerateProbe(Algebra::C))
        ));
        let probes = vec![Scalar::<f64>::one(Algebra::C), tau];
        assert!(matches!(
            solve_polarization(Algebra::C, &probes),
            Err(Error::DegenerateProbe(Algebra::C))
        ));
    }

    #[test]
    fn quaternion_unit_self_pairing() {
        let scheme = standard_polarization::<Rational>(Algebra::H);
        let one = vec![Scalar::one(Algebra::H)];
        assert_eq!(scheme.recover(&one, &one), Scalar::one(Algebra::H));
        assert_eq!(scheme.coefficients().len(), 4);
    }

    #[test]
    fn octonion_coefficients_are_real() {
        let scheme = standard_polarization::<Rational>(Algebra::O);
        for c in scheme.coefficients() {
            assert!(c.coords()[1..].iter().all(|x| *x == rational(0, 1)));
        }
    }

    #[test]
    fn table_validation_rejects_tampering() {
        let mut t = structure_table(Algebra::O).clone();
        t[3][5] = p(2);
        t[5][3] = p(2);
        assert!(validate_octonion_table(&t).is_err());
        assert!(validate_octonion_table(structure_table(Algebra::O)).is_ok());
    }
}
