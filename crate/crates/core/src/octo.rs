//! Octonionic hermitian matrices `𝔥₂(𝕆)`, `𝔥₃(𝕆)`, their determinants, the
//! real realization on `ℝ^{8m}` and the associated length classes.

use nalgebra::{DMatrix, DVector};

use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::lattices::{Order, ProjectiveLengthClass};
use crate::matk::MatK;
use crate::scalars::{standard_polarization, Algebra, Scalar};

/// `[[α, x], [x̄, β]]` (m = 2) or `[[α, z̄, ȳ], [z, β, x], [y, x̄, γ]]` (m = 3),
/// with `off = [x]` or `[x, y, z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOct<T = f64> {
    diag: Vec<T>,
    off: Vec<Scalar<T>>,
}

impl<T: Field> HermitianOct<T> {
    pub fn new(diag: Vec<T>, off: Vec<Scalar<T>>) -> Result<Self> {
        let m = diag.len();
        let expected_off = match m {
            2 => 1,
            3 => 3,
            _ => {
                return Err(Error::Schema(format!(
                    "octonionic hermitian size must be 2 or 3, got {m}"
                )))
            }
        };
        if off.len() != expected_off {
            return Err(Error::SizeMismatch {
                expected: expected_off,
                got: off.len(),
            });
        }
        if let Some(bad) = off.iter().find(|x| x.algebra() != Algebra::O) {
            return Err(Error::TagMismatch {
                left: Algebra::O,
                right: bad.algebra(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn diagonal(diag: Vec<T>) -> Result<Self> {
        let n = if diag.len() == 2 { 1 } else { 3 };
        Self::new(diag, vec![Scalar::zero(Algebra::O); n])
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::diagonal(vec![T::one(); m])
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[Scalar<T>] {
        &self.off
    }

    pub fn to_matrix(&self) -> MatK<T> {
        let r = |x: &T| Scalar::real(Algebra::O, x.clone());
        let d = &self.diag;
        let entries = if self.size() == 2 {
            let x = &self.off[0];
            vec![r(&d[0]), x.clone(), x.conj(), r(&d[1])]
        } else {
            let (x, y, z) = (&self.off[0], &self.off[1], &self.off[2]);
            vec![
                r(&d[0]),
                z.conj(),
                y.conj(),
                z.clone(),
                r(&d[1]),
                x.clone(),
                y.clone(),
                x.conj(),
                r(&d[2]),
            ]
        };
        MatK::new(Algebra::O, self.size(), entries).expect("layout is consistent")
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            diag: self.diag.iter().map(|x| x.clone() * s.clone()).collect(),
            off: self.off.iter().map(|x| x.scale(s)).collect(),
        }
    }

    /// `αβ − |x|²` or `αβγ − (α|x|² + β|y|² + γ|z|²) + 2 Re((xy)z)`.
    pub fn det(&self) -> T {
        if self.size() == 2 {
            det_h2(self.diag[0].clone(), self.diag[1].clone(), &self.off[0])
        } else {
            det_h3(
                [
                    self.diag[0].clone(),
                    self.diag[1].clone(),
                    self.diag[2].clone(),
                ],
                [&self.off[0], &self.off[1], &self.off[2]],
            )
        }
    }

    pub fn eta_real(&self) -> Dense<T> {
        eta_real(&self.to_matrix())
    }
}

impl HermitianOct<f64> {
    pub fn to_rational(&self) -> Option<HermitianOct<Rational>> {
        Some(HermitianOct {
            diag: self
                .diag
                .iter()
                .map(|&x| crate::field::rational_from_f64(x))
                .collect::<Option<_>>()?,
            off: self
                .off
                .iter()
                .map(Scalar::to_rational)
                .collect::<Option<_>>()?,
        })
    }

    /// Rescale to determinant 1 (requires a positive determinant).
    pub fn unit_det(&self) -> Result<Self> {
        let d = self.det();
        if !(d > 0.0) {
            return Err(Error::NotPsd { eigenvalue: d });
        }
        Ok(self.scale(&d.powf(-1.0 / self.size() as f64)))
    }
}

pub fn det_h2<T: Field>(alpha: T, beta: T, x: &Scalar<T>) -> T {
    alpha * beta - x.norm_sq()
}

pub fn det_h3<T: Field>(d: [T; 3], off: [&Scalar<T>; 3]) -> T {
    let [a, b, c] = d;
    let [x, y, z] = off;
    let two = T::from_i64(2);
    a.clone() * b.clone() * c.clone() - (a * x.norm_sq() + b * y.norm_sq() + c * z.norm_sq())
        + two * (&(x * y) * z).re()
}

/// Matrix of `u ↦ Mu` on `ℝ^{8m}`; symmetric when `M` is hermitian.
pub fn eta_real<T: Field>(m: &MatK<T>) -> Dense<T> {
    m.real_realization()
}

fn check_psd_real(q: &Dense<f64>, tol: f64) -> Result<()> {
    let ev = q.symmetric_eigenvalues();
    let top = ev.first().copied().unwrap_or(0.0).abs();
    match ev.last() {
        Some(&low) if low < -tol * top.max(f64::MIN_POSITIVE) => {
            Err(Error::NotPsd { eigenvalue: low })
        }
        _ if top == 0.0 => Err(Error::ZeroMarking),
        _ => Ok(()),
    }
}

/// `ℓ(u) = √Re(u* M u)` for `u` in order coordinates.
pub fn oct_length(m: &MatK, order: &Order, u: &[i64]) -> Result<f64> {
    check_psd_real(&eta_real(m), 1e-10)?;
    let v = order.point_to_vector::<f64>(u);
    Ok(m.quadratic_re(&v).max(0.0).sqrt())
}

/// Class of `ℓ_M` on `ℝ^{8m}`, rebuilt from lengths alone.
///
/// Each entry `Re⟨E_a | E_b⟩_M` of the real Gram matrix, `E_a` running over
/// the real coordinate directions, is recovered by octonionic polarization
/// with real coefficients from the values `ℓ(E_a ± E_b q_l)²`.
pub fn oct_phi(m: &MatK) -> Result<ProjectiveLengthClass> {
    if m.algebra() != Algebra::O {
        return Err(Error::TagMismatch {
            left: Algebra::O,
            right: m.algebra(),
        });
    }
    check_psd_real(&eta_real(m), 1e-10)?;
    let size = m.size();
    let n = 8 * size;
    let scheme = standard_polarization::<f64>(Algebra::O);
    let direction = |a: usize| -> Vec<Scalar> {
        (0..size)
            .map(|i| {
                if i == a / 8 {
                    Scalar::basis(Algebra::O, a % 8)
                } else {
                    Scalar::zero(Algebra::O)
                }
            })
            .collect()
    };
    let dirs: Vec<Vec<Scalar>> = (0..n).map(direction).collect();
    let norm_sq = |x: &[Scalar]| m.quadratic_re(x);
    let mut q = Dense::<f64>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = scheme.recover_with(norm_sq, &dirs[a], &dirs[b]).re();
            q[(a, b)] = v;
            q[(b, a)] = v;
        }
    }
    ProjectiveLengthClass::new(&MatK::from_real(Algebra::R, &q))
}

/// The class of `η_R(M)` itself.
pub fn eta_class(m: &MatK) -> Result<ProjectiveLengthClass> {
    ProjectiveLengthClass::new(&MatK::from_real(Algebra::R, &eta_real(m)))
}

/// Signature of a real quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    /// The form whose signature is reported.
    pub convention: &'static str,
    /// Symmetric matrix of the form in the coordinates `(α, β, x₀, …, x₇)`.
    pub form: Dense<Rational>,
}

impl Signature {
    /// The same data for the negated form.
    pub fn negated(&self) -> Self {
        Self {
            positive: self.negative,
            negative: self.positive,
            convention: if self.convention == "det" {
                "-det"
            } else {
                "det"
            },
            form: self.form.scale(&-Rational::from_i64(1)),
        }
    }
}

/// Signature of `(α, β, x) ↦ det [[α, x], [x̄, β]]` on `ℝ^{10}`, from the
/// polarized bilinear form.
pub fn signature_h2() -> Signature {
    let point = |v: &[Rational]| -> Rational {
        let x = Scalar::new(Algebra::O, v[2..].to_vec()).expect("eight coordinates");
        det_h2(v[0].clone(), v[1].clone(), &x)
    };
    let unit = |a: usize| -> Vec<Rational> {
        (0..10)
            .map(|i| Rational::from_i64((i == a) as i64))
            .collect()
    };
    let half = Rational::from_ratio(1, 2);
    let form = Dense::from_fn(10, 10, |a, b| {
        let (ea, eb) = (unit(a), unit(b));
        let sum: Vec<Rational> = ea
            .iter()
            .zip(&eb)
            .map(|(x, y)| x.clone() + y.clone())
            .collect();
        (point(&sum) - point(&ea) - point(&eb)) * half.clone()
    });
    let ev = form.to_f64().symmetric_eigenvalues();
    Signature {
        positive: ev.iter().filter(|&&x| x > 1e-12).count(),
        negative: ev.iter().filter(|&&x| x < -1e-12).count(),
        convention: "det",
        form,
    }
}

/// Distance from `√η_R(M)` to the linear span of `η_R(𝔥_m(𝕆))`, relative to
/// the norm of the root.
pub fn sqrt_image_residual(h: &HermitianOct) -> Result<f64> {
    let q = h.eta_real();
    check_psd_real(&q, 1e-10)?;
    let eig = q
        .add(&q.transpose())
        .scale(&0.5)
        .to_nalgebra()
        .symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()));
    let root = &eig.eigenvectors * d * eig.eigenvectors.transpose();

    let m = h.size();
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    let off_count = if m == 2 { 1 } else { 3 };
    for i in 0..m {
        let mut diag = vec![0.0; m];
        diag[i] = 1.0;
        let e = HermitianOct::new(diag, vec![Scalar::zero(Algebra::O); off_count])?;
        basis.push(e.eta_real().to_nalgebra());
    }
    for k in 0..off_count {
        for c in 0..8 {
            let mut off = vec![Scalar::zero(Algebra::O); off_count];
            off[k] = Scalar::basis(Algebra::O, c);
            let e = HermitianOct::new(vec![0.0; m], off)?;
            basis.push(e.eta_real().to_nalgebra());
        }
    }
    let len = root.len();
    let a = DMatrix::from_fn(len, basis.len(), |r, c| basis[c].as_slice()[r]);
    let b = DVector::from_column_slice(root.as_slice());
    let svd = a.clone().svd(true, true);
    let coef = svd
        .solve(&b, 1e-12)
        .map_err(|e| Error::Schema(e.to_string()))?;
    let residual = (&a * coef - &b).norm();
    Ok(residual / b.norm().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational;

    fn e(i: usize) -> Scalar<Rational> {
        Scalar::basis(Algebra::O, i)
    }

    #[test]
    fn det_examples() {
        assert_eq!(
            HermitianOct::<Rational>::identity(2).unwrap().det(),
            rational(1, 1)
        );
        assert_eq!(
            HermitianOct::<Rational>::identity(3).unwrap().det(),
            rational(1, 1)
        );
        let h = HermitianOct::new(vec![rational(1, 1), rational(1, 1)], vec![e(1)]).unwrap();
        assert_eq!(h.det(), rational(0, 1));
        let h = HermitianOct::<Rational>::diagonal(vec![rational(2, 1), rational(3, 1)]).unwrap();
        assert_eq!(h.det(), rational(6, 1));
        let h = HermitianOct::new(vec![rational(0, 1); 3], vec![e(0), e(0), e(0)]).unwrap();
        assert_eq!(h.det(), rational(2, 1));
    }

    #[test]
    fn eta_real_identity_and_symmetry() {
        let id = HermitianOct::<Rational>::identity(3).unwrap();
        assert_eq!(id.eta_real(), Dense::identity(24));
        let h = HermitianOct::new(
            vec![rational(2, 1), rational(1, 3), rational(-1, 1)],
            vec![e(3), &e(5) + &e(0), e(7).scale(&rational(1, 2))],
        )
        .unwrap();
        let q = h.eta_real();
        assert_eq!(q, q.transpose());
    }

    #[test]
    fn diagonal_length() {
        let h = HermitianOct::diagonal(vec![4.0, 1.0, 1.0]).unwrap();
        let zo = Order::named("Zo").unwrap();
        let mut u = vec![0; 24];
        u[0] = 1;
        assert_eq!(oct_length(&h.to_matrix(), &zo, &u).unwrap(), 2.0);
    }

    #[test]
    fn signature_is_one_nine() {
        let s = signature_h2();
        assert_eq!((s.positive, s.negative), (1, 9));
        assert_eq!(s.form[(0, 1)], rational(1, 2));
        assert_eq!(s.form[(2, 2)], rational(-1, 1));
        let t = s.negated();
        assert_eq!((t.positive, t.negative), (9, 1));
    }

    #[test]
    fn oct_phi_matches_realization_on_identity() {
        let h = HermitianOct::<f64>::identity(3).unwrap().to_matrix();
        let a = oct_phi(&h).unwrap();
        let b = eta_class(&h).unwrap();
        assert!(a.gram().distance(b.gram()) < 1e-14);
    }

    #[test]
    fn rank_deficient_is_boundary() {
        let h = HermitianOct::diagonal(vec![1.0, 1.0, 0.0])
            .unwrap()
            .to_matrix();
        let c = oct_phi(&h).unwrap();
        assert_eq!(crate::bridge::gram_rank(c.gram()).unwrap(), 16);
        let neg = HermitianOct::diagonal(vec![1.0, -1.0, 1.0])
            .unwrap()
            .to_matrix();
        assert!(matches!(oct_phi(&neg), Err(Error::NotPsd { .. })));
    }
}
