//! Satake points (classes of positive hermitian matrices), the map ξ to length
//! classes, and limits of degenerating families of markings.

use crate::error::{Error, Result};
use crate::lattices::{check_invertible, trace_normalize, ProjectiveLengthClass};
use crate::matk::{check_psd, hermitian_eig, psd_sqrt, MatK, DEFAULT_TOL};
use crate::scalars::{Algebra, Scalar};

/// Relative eigenvalue threshold used to count the rank of a class.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Class `ℝ₊ a` of a nonzero positive semidefinite hermitian `a`, stored with trace 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SatakePoint {
    a: MatK,
}

impl SatakePoint {
    pub fn new(a: &MatK) -> Result<Self> {
        let a = trace_normalize(a)?;
        let eig = hermitian_eig(&a, DEFAULT_TOL)?;
        check_psd(&eig, 1e-9)?;
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &MatK {
        &self.a
    }

    pub fn size(&self) -> usize {
        self.a.size()
    }

    pub fn rank(&self) -> Result<usize> {
        gram_rank(&self.a)
    }

    pub fn is_interior(&self) -> Result<bool> {
        Ok(self.rank()? == self.size())
    }
}

pub fn gram_rank(a: &MatK) -> Result<usize> {
    Ok(hermitian_eig(a, DEFAULT_TOL)?.rank(RANK_THRESHOLD))
}

/// Anything represented by a trace-normalized Gram matrix.
pub trait GramClass {
    fn normalized_gram(&self) -> &MatK;
}

impl GramClass for SatakePoint {
    fn normalized_gram(&self) -> &MatK {
        &self.a
    }
}

impl GramClass for ProjectiveLengthClass {
    fn normalized_gram(&self) -> &MatK {
        self.gram()
    }
}

/// `gK ↦ ℝ₊ g g*`.
pub fn satake_point(g: &MatK) -> Result<SatakePoint> {
    check_invertible(g).map_err(|_| Error::Singular)?;
    SatakePoint::new(&g.mul(&g.adjoint()).hermitian_part())
}

/// `ℝ₊ a ↦ [u ↦ ‖√a u‖]`, whose Gram matrix is `a` itself.
pub fn xi(a: &SatakePoint) -> Result<ProjectiveLengthClass> {
    ProjectiveLengthClass::new(a.matrix())
}

/// Pointwise form of ξ: evaluates `u ↦ ‖√a u‖` through an explicit square root.
#[derive(Debug, Clone)]
pub struct XiHat {
    root: MatK,
}

impl XiHat {
    pub fn new(a: &MatK) -> Result<Self> {
        Ok(Self {
            root: psd_sqrt(a, 1e-9)?,
        })
    }

    pub fn root(&self) -> &MatK {
        &self.root
    }

    pub fn length(&self, u: &[Scalar]) -> f64 {
        self.root
            .mul_vec(u)
            .iter()
            .map(Scalar::norm_sq)
            .sum::<f64>()
            .sqrt()
    }
}

/// `g · ℝ₊a = ℝ₊ g a g*`.
pub fn satake_action(g: &MatK, a: &SatakePoint) -> Result<SatakePoint> {
    check_invertible(g).map_err(|_| Error::Singular)?;
    SatakePoint::new(&g.try_mul(a.matrix())?.mul(&g.adjoint()).hermitian_part())
}

/// Entrywise comparison of normalized Gram matrices within relative `tol`.
pub fn classes_equal(x: &dyn GramClass, y: &dyn GramClass, tol: f64) -> Result<bool> {
    let (a, b) = (x.normalized_gram(), y.normalized_gram());
    if a.algebra() != b.algebra() {
        return Err(Error::TagMismatch {
            left: a.algebra(),
            right: b.algebra(),
        });
    }
    if a.size() != b.size() {
        return Err(Error::SizeMismatch {
            expected: a.size(),
            got: b.size(),
        });
    }
    let scale = max_entry(a).max(max_entry(b)).max(f64::MIN_POSITIVE);
    let diff = a.sub(b);
    Ok(max_entry(&diff) <= tol * scale)
}

/// Frobenius distance between normalized Gram matrices.
pub fn class_distance(x: &dyn GramClass, y: &dyn GramClass) -> f64 {
    x.normalized_gram().distance(y.normalized_gram())
}

fn max_entry(a: &MatK) -> f64 {
    a.entries()
        .iter()
        .flat_map(|s| s.coords().iter())
        .fold(0.0, |m, c| m.max(c.abs()))
}

/// A sequence of markings `f_n`.
#[derive(Debug, Clone)]
pub enum DegenerationFamily {
    Explicit(Vec<MatK>),
    /// `f(t) = diag(base_i · t^{exponents_i})` over the schedule of `t`.
    DiagPower {
        algebra: Algebra,
        base: Vec<f64>,
        exponents: Vec<f64>,
        t: Vec<f64>,
    },
    /// `f_n = √a + I/(n+1)` over the schedule of `n`.
    Regularized {
        a: MatK,
        n: Vec<u64>,
    },
}

impl DegenerationFamily {
    pub fn samples(&self) -> Result<Vec<MatK>> {
        let samples = match self {
            Self::Explicit(s) => s.clone(),
            Self::DiagPower {
                algebra,
                base,
                exponents,
                t,
            } => {
                if base.len() != exponents.len() {
                    return Err(Error::SizeMismatch {
                        expected: base.len(),
                        got: exponents.len(),
                    });
                }
                t.iter()
                    .map(|&t| {
                        let d: Vec<f64> = base
                            .iter()
                            .zip(exponents)
                            .map(|(b, e)| b * t.powf(*e))
                            .collect();
                        MatK::real_diagonal(*algebra, &d)
                    })
                    .collect()
            }
            Self::Regularized { a, n } => {
                let root = psd_sqrt(a, 1e-9)?;
                let id = MatK::identity(a.algebra(), a.size());
                n.iter()
                    .map(|&n| root.add(&id.scale_real(&(1.0 / (n as f64 + 1.0)))))
                    .collect()
            }
        };
        if samples.is_empty() {
            return Err(Error::Schema("family has no samples".into()));
        }
        let (k, m) = (samples[0].algebra(), samples[0].size());
        for s in &samples {
            if s.algebra() != k {
                return Err(Error::TagMismatch {
                    left: k,
                    right: s.algebra(),
                });
            }
            if s.size() != m {
                return Err(Error::SizeMismatch {
                    expected: m,
                    got: s.size(),
                });
            }
            check_invertible(s).map_err(|_| Error::Singular)?;
        }
        Ok(samples)
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryLimit {
    pub limit: SatakePoint,
    pub rank: usize,
    /// Distances between consecutive normalized Gram matrices.
    pub steps: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceOptions {
    pub window: usize,
    pub tol: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            window: 3,
            tol: 1e-6,
        }
    }
}

/// Limit of the normalized Gram matrices `f_n* f_n`, accepted when the last
/// `window` samples are pairwise within `tol` (Frobenius, on trace-one
/// representatives).
pub fn boundary_limit(
    family: &DegenerationFamily,
    opts: ConvergenceOptions,
) -> Result<BoundaryLimit> {
    let grams: Vec<MatK> = family
        .samples()?
        .iter()
        .map(|f| trace_normalize(&f.adjoint().mul(f)))
        .collect::<Result<_>>()?;
    let steps: Vec<f64> = grams.windows(2).map(|w| w[0].distance(&w[1])).collect();
    let n = grams.len();
    let window = opts.window.max(1).min(n);
    let tail = &grams[n - window..];
    let mut worst = 0.0f64;
    for (i, x) in tail.iter().enumerate() {
        for y in &tail[i + 1..] {
            worst = worst.max(x.distance(y));
        }
    }
    if worst > opts.tol || (n > 1 && window < 2) {
        let previous = if n > 1 {
            grams[n - 2].clone()
        } else {
            grams[n - 1].clone()
        };
        return Err(Error::NoConvergence {
            step: worst,
            last: Box::new(grams[n - 1].clone()),
            previous: Box::new(previous),
        });
    }
    let limit = SatakePoint::new(&grams[n - 1])?;
    let rank = limit.rank()?;
    Ok(BoundaryLimit { limit, rank, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(k: Algebra, d: &[f64]) -> MatK {
        MatK::real_diagonal(k, d)
    }

    #[test]
    fn satake_of_identity_and_diagonal() {
        let p = satake_point(&MatK::identity(Algebra::H, 3)).unwrap();
        assert!(p.matrix().distance(&diag(Algebra::H, &[1.0 / 3.0; 3])) < 1e-15);
        let p = satake_point(&diag(Algebra::R, &[2.0, 0.5])).unwrap();
        assert!(
            p.matrix()
                .distance(&diag(Algebra::R, &[4.0 / 4.25, 0.25 / 4.25]))
                < 1e-15
        );
        assert!(matches!(
            satake_point(&diag(Algebra::R, &[1.0, 0.0])),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn boundary_xi_is_first_coordinate() {
        let a = SatakePoint::new(&diag(Algebra::C, &[1.0, 0.0])).unwrap();
        assert_eq!(a.rank().unwrap(), 1);
        let x = XiHat::new(a.matrix()).unwrap();
        let u = vec![
            Scalar::new(Algebra::C, vec![3.0, 4.0]).unwrap(),
            Scalar::new(Algebra::C, vec![7.0, 1.0]).unwrap(),
        ];
        assert!((x.length(&u) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn diag_power_family() {
        let fam = DegenerationFamily::DiagPower {
            algebra: Algebra::R,
            base: vec![1.0, 1.0],
            exponents: vec![1.0, -1.0],
            t: vec![1e2, 1e3, 1e4, 1e5],
        };
        let lim = boundary_limit(&fam, ConvergenceOptions::default()).unwrap();
        assert_eq!(lim.rank, 1);
        assert!(lim.limit.matrix().distance(&diag(Algebra::R, &[1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn rotation_family_is_interior() {
        let rot = |t: f64| {
            let (c, s) = (t.cos(), t.sin());
            let r = |x: f64| Scalar::real(Algebra::R, x);
            MatK::new(Algebra::R, 2, vec![r(c), r(-s), r(s), r(c)]).unwrap()
        };
        let fam = DegenerationFamily::Explicit((0..6).map(|i| rot(i as f64)).collect());
        let lim = boundary_limit(&fam, ConvergenceOptions::default()).unwrap();
        assert_eq!(lim.rank, 2);
        assert!(lim.limit.matrix().distance(&diag(Algebra::R, &[0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn oscillating_family_fails() {
        let a = diag(Algebra::R, &[2.0, 0.5]);
        let b = diag(Algebra::R, &[0.5, 2.0]);
        let fam = DegenerationFamily::Explicit(vec![a.clone(), b.clone(), a, b]);
        assert!(matches!(
            boundary_limit(&fam, ConvergenceOptions::default()),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn distinct_kernels_differ() {
        let x = SatakePoint::new(&diag(Algebra::R, &[1.0, 0.0])).unwrap();
        let y = SatakePoint::new(&diag(Algebra::R, &[0.0, 1.0])).unwrap();
        assert!(!classes_equal(&x, &y, 1e-9).unwrap());
        assert!(classes_equal(&x, &x, 0.0).unwrap());
        let z = SatakePoint::new(&diag(Algebra::C, &[0.0, 1.0])).unwrap();
        assert!(classes_equal(&x, &z, 1e-9).is_err());
    }
}
