//! Seeded property suites behind `verify`.
//!
//! Every (property, trial) pair draws from its own ChaCha stream seeded by a
//! fixed hash of `(seed, property name, trial)`, so reports do not depend on
//! scheduling or thread count.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bridge::{
    boundary_limit, classes_equal, satake_action, satake_point, xi, ConvergenceOptions,
    DegenerationFamily, SatakePoint, XiHat,
};
use crate::dense::Dense;
use crate::error::Error;
use crate::field::{Field, Rational};
use crate::lattices::{
    gram_from_probes, phi, systole, thurston_action, trace_normalize, LengthFunction,
    MarkedLattice, Order, ProbeTable, ProjectiveLengthClass,
};
use crate::matk::{hermitian_eig, isometry_witness, polar, psd_sqrt, MatK, DEFAULT_TOL};
use crate::octo::{det_h3, eta_class, oct_phi, signature_h2, HermitianOct};
use crate::sampling;
use crate::scalars::{standard_polarization, Algebra, Scalar, OCTONION_TABLE};
use crate::strata::{
    psi_sigma, splits_along, splits_along_by_probes, SymplecticSplitting, SPLIT_TOL,
};
use crate::symplectic::{
    is_autodual, is_unimodular, standard_j, symplectic_reduce, SymplecticLattice,
};

pub const SUITES: [&str; 8] = [
    "scalars",
    "matk",
    "lattices",
    "bridge",
    "symplectic",
    "octo",
    "strata",
    "all",
];

/// Deliberate defects for checking that the suites catch them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Mutations {
    /// Flip the sign of the lower-left block of η.
    pub eta_sign: bool,
}

type Outcome = std::result::Result<(), String>;
type Check = fn(&mut ChaCha8Rng, &Mutations) -> Outcome;

struct Property {
    suite: &'static str,
    name: &'static str,
    /// Deterministic checks run once regardless of the trial count.
    exhaustive: bool,
    check: Check,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lib<T>(r: crate::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

const ASSOCIATIVE: [Algebra; 3] = [Algebra::R, Algebra::C, Algebra::H];

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())]
}

// ---- scalars ----

fn norm_multiplicativity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    for k in Algebra::ALL {
        let (x, y) = (sampling::scalar(rng, k), sampling::scalar(rng, k));
        let (nx, ny, nxy) = (x.norm(), y.norm(), (&x * &y).norm());
        ensure!(
            (nxy - nx * ny).abs() <= 1e-12 * nx * ny,
            "x = {x:?}, y = {y:?}: |xy| = {nxy:e}, |x||y| = {:e}",
            nx * ny
        );
    }
    Ok(())
}

fn alternativity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let x = sampling::rational_scalar(rng, Algebra::O, 5, 4);
    let y = sampling::rational_scalar(rng, Algebra::O, 5, 4);
    ensure!(
        &x * &(&x * &y) == &(&x * &x) * &y,
        "left alternativity fails for x = {x:?}, y = {y:?}"
    );
    ensure!(
        &(&y * &x) * &x == &y * &(&x * &x),
        "right alternativity fails for x = {x:?}, y = {y:?}"
    );
    Ok(())
}

fn anti_symmetry(_: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let minus_one = Scalar::<Rational>::real(Algebra::O, -Rational::one());
    for i in 1..8 {
        let ei = Scalar::<Rational>::basis(Algebra::O, i);
        ensure!(&ei * &ei == minus_one, "e{i}² ≠ −1");
        for j in 1..8 {
            if i != j {
                let ej = Scalar::<Rational>::basis(Algebra::O, j);
                let (a, b) = (&ei * &ej, &ej * &ei);
                ensure!(a == -&b, "e{i}e{j} = {a:?} but e{j}e{i} = {b:?}");
            }
        }
    }
    Ok(())
}

fn real_part_cyclicity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let draw = |rng: &mut ChaCha8Rng| sampling::rational_scalar(rng, Algebra::O, 5, 4);
    let (u, v, q) = (draw(rng), draw(rng), draw(rng));
    let lhs = (&u.conj() * &(&v * &q)).re();
    let rhs = (&(&u.conj() * &v) * &q).re();
    ensure!(
        lhs == rhs,
        "Re(ū(vq)) ≠ Re((ūv)q) for u = {u:?}, v = {v:?}, q = {q:?}"
    );
    Ok(())
}

fn polarization_recovery(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    for k in Algebra::ALL {
        let m = rng.gen_range(1..=3);
        let (u, v) = (
            sampling::rational_vector(rng, k, m),
            sampling::rational_vector(rng, k, m),
        );
        let got = standard_polarization::<Rational>(k).recover(&u, &v);
        let want = crate::scalars::inner(&u, &v);
        let want = if k == Algebra::O {
            Scalar::real(k, want.re())
        } else {
            want
        };
        ensure!(
            got == want,
            "exact recovery over {k:?}: got {got:?}, want {want:?}"
        );
        let (uf, vf) = (sampling::vector(rng, k, m), sampling::vector(rng, k, m));
        let got = standard_polarization::<f64>(k).recover(&uf, &vf);
        let want = crate::scalars::inner(&uf, &vf);
        let want = if k == Algebra::O {
            Scalar::real(k, want.re())
        } else {
            want
        };
        let scale =
            crate::scalars::vector_norm_sq(&uf).sqrt() * crate::scalars::vector_norm_sq(&vf).sqrt();
        ensure!(
            got.distance(&want) <= 1e-10 * scale,
            "float recovery over {k:?}: got {got:?}, want {want:?}"
        );
    }
    Ok(())
}

// ---- matk ----

fn eta_under_test<T: Field>(m: &MatK<T>, mutations: &Mutations) -> MatK<T> {
    let e = m.eta().expect("quaternionic");
    if !mutations.eta_sign {
        return e;
    }
    let n = m.size();
    MatK::from_fn(Algebra::C, 2 * n, |i, j| {
        if i >= n && j < n {
            -e.get(i, j)
        } else {
            e.get(i, j).clone()
        }
    })
}

fn exact(m: &MatK<Rational>) -> String {
    crate::io::exact_matrix_json(m).to_string()
}

fn eta_multiplicativity(rng: &mut ChaCha8Rng, mutations: &Mutations) -> Outcome {
    let m = rng.gen_range(1..=3);
    let a = sampling::rational_matrix(rng, Algebra::H, m);
    let b = sampling::rational_matrix(rng, Algebra::H, m);
    let lhs = eta_under_test(&a.mul(&b), mutations);
    let rhs = eta_under_test(&a, mutations).mul(&eta_under_test(&b, mutations));
    ensure!(
        lhs == rhs,
        "η(MN) ≠ η(M)η(N) for M = {}, N = {}",
        exact(&a),
        exact(&b)
    );
    let lhs = eta_under_test(&a.adjoint(), mutations);
    let rhs = eta_under_test(&a, mutations).adjoint();
    ensure!(lhs == rhs, "η(M*) ≠ η(M)* for M = {}", exact(&a));
    Ok(())
}

fn dieudonne_multiplicativity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(1..=4);
    let (a, b) = (sampling::matrix(rng, k, m), sampling::matrix(rng, k, m));
    let (da, db) = (lib(a.dieudonne_det())?, lib(b.dieudonne_det())?);
    let dab = lib(a.mul(&b).dieudonne_det())?;
    ensure!(
        (dab - da * db).abs() <= 1e-9 * (da * db).max(1e-300),
        "det(MN) = {dab:e}, det M det N = {:e} for M = {a:?}, N = {b:?}",
        da * db
    );
    Ok(())
}

fn gram_rigidity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(1..=4);
    let f = sampling::invertible(rng, k, m);
    let u = sampling::unitary(rng, k, m);
    let g = u.mul(&f);
    let w = lib(isometry_witness(&f, &g, 1e-9))?
        .ok_or_else(|| format!("no witness for M = {f:?}, KM with K = {u:?}"))?;
    ensure!(
        w.mul(&f).distance(&g) <= 1e-9 * f.frobenius(),
        "witness residual too large for M = {f:?}"
    );
    let h = sampling::invertible(rng, k, m);
    if f.adjoint().mul(&f).distance(&h.adjoint().mul(&h)) > 1e-6 {
        ensure!(
            lib(isometry_witness(&f, &h, 1e-9))?.is_none(),
            "witness found for distinct Grams M = {f:?}, M' = {h:?}"
        );
    }
    Ok(())
}

fn polar_consistency(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(1..=4);
    let rank = rng.gen_range(1..=m);
    let b = sampling::psd_of_rank(rng, k, m, rank);
    let f = if rng.gen_bool(0.5) {
        b
    } else {
        sampling::matrix(rng, k, m)
    };
    let pol = lib(polar(&f))?;
    let root = lib(psd_sqrt(&f.mul(&f.adjoint()).hermitian_part(), 1e-9))?;
    ensure!(
        pol.p.distance(&root) <= 1e-9 * root.frobenius().max(1.0),
        "P ≠ √(MM*) for M = {f:?}"
    );
    ensure!(
        pol.p.mul(&pol.u).distance(&f) <= 1e-9 * f.frobenius().max(1.0),
        "PU ≠ M for M = {f:?}"
    );
    let id = MatK::identity(k, m);
    ensure!(
        pol.u.mul(&pol.u.adjoint()).distance(&id) <= 1e-9,
        "U not unitary for M = {f:?}"
    );
    Ok(())
}

// ---- lattices ----

fn lattice(f: &MatK) -> std::result::Result<MarkedLattice, String> {
    lib(MarkedLattice::new(
        Order::default_for(f.algebra()),
        f.clone(),
    ))
}

fn embedding_rigidity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(2..=3);
    let f = sampling::invertible(rng, k, m);
    let scale: f64 = rng.gen_range(0.2..5.0);
    let same = sampling::unitary(rng, k, m).mul(&f).scale_real(&scale);
    let other = sampling::invertible(rng, k, m);
    let nf = lib(lattice(&f)?.normalized())?;
    for (g, expect) in [(same, true), (other, false)] {
        let ng = lib(lattice(&g)?.normalized())?;
        let classes = lib(classes_equal(&lib(phi(&nf))?, &lib(phi(&ng))?, 1e-9))?;
        let witness = lib(isometry_witness(nf.marking(), ng.marking(), 1e-9))?.is_some();
        ensure!(
            classes == witness,
            "phi and isometry_witness disagree for f = {f:?}, f' = {g:?}"
        );
        ensure!(
            classes == expect,
            "phi equality {classes} expected {expect} for f = {f:?}, f' = {g:?}"
        );
    }
    Ok(())
}

fn probe_reconstruction(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let order = match k {
        Algebra::H if rng.gen_bool(0.5) => lib(Order::named("hurwitz"))?,
        _ => Order::default_for(k),
    };
    let m = rng.gen_range(1..=3);
    let f = sampling::rational_matrix(rng, k, m);
    let gram = f.adjoint().mul(&f);
    let table = ProbeTable::of_length(&LengthFunction::new(gram.clone()), &order);
    let back = lib(gram_from_probes(&table, &order, m, 0.0))?;
    ensure!(
        back == gram,
        "probe reconstruction over {} differs for f = {:?}",
        order.name(),
        f.to_f64()
    );
    Ok(())
}

fn closure_stability(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(2..=4);
    let rank = rng.gen_range(1..=m);
    let g = sampling::psd_of_rank(rng, k, m, rank);
    let target = lib(trace_normalize(&g))?;
    let root = lib(psd_sqrt(&g, 1e-9))?;
    let mut last = f64::INFINITY;
    for n in [10.0, 100.0, 1000.0] {
        let f = root.add(&MatK::identity(k, m).scale_real(&(1.0 / (n + 1.0))));
        let class = lib(phi(&lib(lattice(&f)?.normalized())?))?;
        let d = class.gram().distance(&target);
        ensure!(
            d < last,
            "distance {d:e} at n = {n} does not decrease (previous {last:e}) for G = {g:?}"
        );
        last = d;
    }
    Ok(())
}

fn interior_openness(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(2..=4);
    let a = lib(trace_normalize(&sampling::positive_definite(rng, k, m)))?;
    let floor = *lib(hermitian_eig(&a, DEFAULT_TOL))?
        .values
        .last()
        .expect("nonempty");
    for _ in 0..5 {
        let rank = rng.gen_range(1..m);
        let b = lib(trace_normalize(&sampling::psd_of_rank(rng, k, m, rank)))?;
        let d = a.distance(&b);
        ensure!(
            d >= floor - 1e-12,
            "interior class {a:?} at distance {d:e} < λ_min {floor:e} from rank-{rank} class {b:?}"
        );
    }
    Ok(())
}

fn scale_covariance(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let m = rng.gen_range(2..=3);
    let f =
        MatK::identity(Algebra::R, m).add(&sampling::matrix(rng, Algebra::R, m).scale_real(&0.4));
    let lambda: f64 = rng.gen_range(0.1..10.0);
    let (l1, l2) = (lattice(&f)?, lattice(&f.scale_real(&lambda))?);
    ensure!(
        lib(classes_equal(&lib(phi(&l1))?, &lib(phi(&l2))?, 1e-12))?,
        "phi(λf) ≠ phi(f) for f = {f:?}, λ = {lambda}"
    );
    let s1 = lib(systole(&l1.length_function(), l1.order()))?;
    let s2 = lib(systole(&l2.length_function(), l2.order()))?;
    ensure!(
        s1.witness == s2.witness,
        "systole witness moved under rescale: {:?} vs {:?} for f = {f:?}",
        s1.witness,
        s2.witness
    );
    ensure!(
        (s2.value - lambda * s1.value).abs() <= 1e-9 * s2.value,
        "systole value not scaled for f = {f:?}"
    );
    Ok(())
}

fn systole_brute_force(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &[Algebra::R, Algebra::C]);
    let m = 2;
    let f = MatK::identity(k, m).add(&sampling::matrix(rng, k, m).scale_real(&0.4));
    let lat = lattice(&f)?;
    let l = lat.length_function();
    let s = lib(systole(&l, lat.order()))?;
    ensure!(
        (l.evaluate(lat.order(), &s.witness) - s.value).abs() <= 1e-12 * s.value,
        "witness length differs from value"
    );
    let real = l.order_realization(lat.order());
    let min_eig = *real.symmetric_eigenvalues().last().expect("nonempty");
    let radius = (s.value * s.value / min_eig).sqrt().floor() as i64;
    if radius > 3 {
        return Ok(());
    }
    let n = real.rows();
    let mut u = vec![-radius; n];
    let mut best = f64::INFINITY;
    loop {
        if u.iter().any(|&c| c != 0) {
            best = best.min(l.evaluate(lat.order(), &u));
        }
        let mut i = 0;
        while i < n && u[i] == radius {
            u[i] = -radius;
            i += 1;
        }
        if i == n {
            break;
        }
        u[i] += 1;
    }
    ensure!(
        (best - s.value).abs() <= 1e-9 * best,
        "systole {} but enumeration finds {best} for f = {f:?}",
        s.value
    );
    Ok(())
}

// ---- bridge ----

fn theorem_identity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(2..=4);
    let g = sampling::invertible(rng, k, m);
    let a = lib(satake_point(&g))?;
    let lat = lattice(&g.adjoint())?;
    let class = lib(phi(&lat))?;
    ensure!(
        lib(classes_equal(&lib(xi(&a))?, &class, 1e-10))?,
        "ξ(gK) ≠ φ(g*) for g = {g:?}"
    );
    let hat = lib(XiHat::new(a.matrix()))?;
    let trace = g.mul(&g.adjoint()).trace_re();
    let l = lat.length_function();
    for _ in 0..4 {
        let u: Vec<i64> = (0..m * k.dim()).map(|_| rng.gen_range(-3..=3)).collect();
        let v = lat.order().point_to_vector::<f64>(&u);
        let want = l.evaluate(lat.order(), &u) / trace.sqrt();
        let got = hat.length(&v);
        ensure!(
            (got - want).abs() <= 1e-10 * want.max(1e-300),
            "ξ̂ length {got} vs ℓ {want} at u = {u:?}, g = {g:?}"
        );
    }
    Ok(())
}

fn equivariance(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(2..=4);
    let rank = rng.gen_range(1..=m);
    let a = lib(SatakePoint::new(&sampling::psd_of_rank(rng, k, m, rank)))?;
    let g = sampling::invertible(rng, k, m);
    let lhs = lib(xi(&lib(satake_action(&g, &a))?))?;
    let rhs = lib(thurston_action(&g, &lib(xi(&a))?))?;
    ensure!(
        lib(classes_equal(&lhs, &rhs, 1e-10))?,
        "ξ(g·a) ≠ g·ξ(a) for g = {g:?}, a = {a:?}"
    );
    Ok(())
}

const CLOSURE_SCHEDULE: [u64; 4] = [1_000_000, 10_000_000, 100_000_000, 1_000_000_000];

fn boundary_closure(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(2..=4);
    let rank = rng.gen_range(1..m);
    let a = sampling::psd_with_spectrum(rng, k, m, rank);
    let fam = DegenerationFamily::Regularized {
        a: a.clone(),
        n: CLOSURE_SCHEDULE.to_vec(),
    };
    let lim = lib(boundary_limit(&fam, ConvergenceOptions::default()))?;
    ensure!(
        lim.rank == rank,
        "limit rank {} ≠ {rank} for a = {a:?}",
        lim.rank
    );
    let d = lim.limit.matrix().distance(&lib(trace_normalize(&a))?);
    ensure!(
        d <= 1e-6,
        "limit at distance {d:e} from the target class for a = {a:?}"
    );
    Ok(())
}

fn homothety_soundness(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let k = pick(rng, &ASSOCIATIVE);
    let m = rng.gen_range(2..=4);
    let rank = rng.gen_range(1..m);
    let a = sampling::psd_with_spectrum(rng, k, m, rank);
    let fam = DegenerationFamily::Regularized {
        a,
        n: CLOSURE_SCHEDULE.to_vec(),
    };
    let samples = lib(fam.samples())?;
    let scaled = DegenerationFamily::Explicit(
        samples
            .iter()
            .map(|f| f.scale_real(&rng.gen_range(0.1..10.0)))
            .collect(),
    );
    let x = lib(boundary_limit(&fam, ConvergenceOptions::default()))?;
    let y = lib(boundary_limit(&scaled, ConvergenceOptions::default()))?;
    ensure!(x.rank == y.rank, "rank changed under rescaling");
    ensure!(
        lib(classes_equal(&x.limit, &y.limit, 1e-9))?,
        "limit changed under rescaling: {:?} vs {:?}",
        x.limit,
        y.limit
    );
    Ok(())
}

// ---- symplectic ----

fn real_marking(a: &Dense<Rational>) -> MatK {
    MatK::from_real(Algebra::R, &a.to_f64())
}

fn reduction_soundness(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let g = rng.gen_range(1..=3);
    let a = sampling::autodual_basis(rng, g);
    let red = lib(symplectic_reduce(&lib(SymplecticLattice::new(
        g,
        a.clone(),
    ))?))?;
    let j = standard_j::<Rational>(g);
    ensure!(
        red.c.transpose().matmul(&j).matmul(&red.c) == j,
        "ᵗCJC ≠ J for A = {a:?}"
    );
    ensure!(
        red.c.matmul(&a) == red.ca && is_unimodular(&red.ca),
        "C·A not unimodular for A = {a:?}"
    );
    Ok(())
}

fn orbit_consistency(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let g = rng.gen_range(1..=3);
    let a = sampling::autodual_basis(rng, g);
    let red = lib(symplectic_reduce(&lib(SymplecticLattice::new(
        g,
        a.clone(),
    ))?))?;
    let c_inv = red.c.inverse(0.0).ok_or("C is singular")?;
    let standard = lib(ProjectiveLengthClass::new(&MatK::identity(
        Algebra::R,
        2 * g,
    )))?;
    let image = lib(thurston_action(
        &real_marking(&c_inv.transpose()),
        &standard,
    ))?;
    let remarked = lib(phi(&lattice(&real_marking(&a.matmul(&red.u)))?))?;
    ensure!(
        lib(classes_equal(&image, &remarked, 1e-9))?,
        "φ(AU) is not the Sp-image C⁻¹ of the standard class for A = {a:?}"
    );
    ensure!(is_unimodular(&red.u), "U not unimodular for A = {a:?}");
    Ok(())
}

fn autodual_invariance(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let g = rng.gen_range(1..=3);
    let a = if rng.gen_bool(0.5) {
        sampling::autodual_basis(rng, g)
    } else {
        let d: Vec<Rational> = (0..2 * g)
            .map(|_| Rational::from_i64(rng.gen_range(1..=3)))
            .collect();
        Dense::diagonal(&d).matmul(&sampling::symplectic_matrix(rng, g, 2))
    };
    let u = sampling::unimodular(rng, 2 * g);
    let (x, y) = (
        lib(SymplecticLattice::new(g, a.clone()))?,
        lib(SymplecticLattice::new(g, a.matmul(&u)))?,
    );
    ensure!(
        is_autodual(&x) == is_autodual(&y),
        "autoduality changed under A ↦ AU for A = {a:?}, U = {u:?}"
    );
    if !is_autodual(&x) {
        ensure!(
            matches!(symplectic_reduce(&x), Err(Error::NotAutodual)),
            "reduction accepted a non-autodual A = {a:?}"
        );
    }
    Ok(())
}

// ---- octo ----

fn octonion_table(_: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    for i in 1..8 {
        for j in 1..8 {
            let got = &Scalar::<Rational>::basis(Algebra::O, i)
                * &Scalar::<Rational>::basis(Algebra::O, j);
            let entry = OCTONION_TABLE[i - 1][j - 1];
            let want = Scalar::<Rational>::basis(Algebra::O, entry.index as usize)
                .scale(&Rational::from_i64(entry.sign as i64));
            ensure!(got == want, "e{i}e{j} = {got:?}, table gives {want:?}");
        }
    }
    Ok(())
}

fn det_h3_diagonal(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let d: Vec<Rational> = (0..3)
        .map(|_| crate::field::rational(rng.gen_range(-20..=20), rng.gen_range(1..=7)))
        .collect();
    let z = Scalar::<Rational>::zero(Algebra::O);
    let got = det_h3([d[0].clone(), d[1].clone(), d[2].clone()], [&z, &z, &z]);
    ensure!(
        got == d[0].clone() * d[1].clone() * d[2].clone(),
        "det_h3(diag{d:?}) = {got}"
    );
    Ok(())
}

fn det_h3_symmetry(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let d: Vec<Rational> = (0..3)
        .map(|_| crate::field::rational(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
        .collect();
    let o: Vec<Scalar<Rational>> = (0..3)
        .map(|_| sampling::rational_scalar(rng, Algebra::O, 5, 4))
        .collect();
    let (x, y, z) = (&o[0], &o[1], &o[2]);
    let base = det_h3([d[0].clone(), d[1].clone(), d[2].clone()], [x, y, z]);
    let cyc = det_h3([d[1].clone(), d[2].clone(), d[0].clone()], [y, z, x]);
    ensure!(
        base == cyc,
        "det_h3 not invariant under cyclic relabeling for x = {x:?}, y = {y:?}, z = {z:?}"
    );
    let re = |a: &Scalar<Rational>, b: &Scalar<Rational>, c: &Scalar<Rational>| (&(a * b) * c).re();
    ensure!(
        re(x, y, z) == re(y, z, x) && re(y, z, x) == re(z, x, y),
        "Re(xyz) not cyclic for x = {x:?}, y = {y:?}, z = {z:?}"
    );
    Ok(())
}

fn octonionic_polarization(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let m = rng.gen_range(1..=3);
    let (u, v) = (
        sampling::rational_vector(rng, Algebra::O, m),
        sampling::rational_vector(rng, Algebra::O, m),
    );
    let got = standard_polarization::<Rational>(Algebra::O).recover(&u, &v);
    let want = u
        .iter()
        .zip(&v)
        .fold(Rational::zero(), |acc, (a, b)| acc + (&a.conj() * b).re());
    ensure!(
        got == Scalar::real(Algebra::O, want.clone()),
        "recovered {got:?}, want {want} for u = {u:?}, v = {v:?}"
    );
    Ok(())
}

fn psd_consistency(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let h = sampling::hermitian_oct(rng, 3);
    let eig = h.eta_real().symmetric_eigenvalues();
    if *eig.last().expect("nonempty") <= 1e-9 * eig[0].abs() {
        return Ok(());
    }
    let d = h.diag();
    let z = &h.off()[2];
    ensure!(
        h.det() > 0.0,
        "η_R(M) positive definite but det_h3 = {} for M = {h:?}",
        h.det()
    );
    ensure!(
        d[0] > 0.0 && d[0] * d[1] - z.norm_sq() > 0.0,
        "leading minors not positive for M = {h:?}"
    );
    Ok(())
}

fn oct_coincidence(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let m = pick(rng, &[2, 3]);
    let h: HermitianOct = lib(sampling::positive_hermitian_oct(rng, m).unit_det())?;
    let mat = h.to_matrix();
    let x = lib(oct_phi(&mat))?;
    let y = lib(eta_class(&mat))?;
    ensure!(
        lib(classes_equal(&x, &y, 1e-9))?,
        "oct_phi and η_R classes differ for M = {h:?}"
    );
    Ok(())
}

fn h2_signature(_: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let s = signature_h2();
    ensure!(
        (s.positive, s.negative) == (1, 9),
        "det_h2 signature {:?}",
        (s.positive, s.negative)
    );
    let n = s.negated();
    ensure!(
        (n.positive, n.negative) == (9, 1),
        "negated signature {:?}",
        (n.positive, n.negative)
    );
    Ok(())
}

// ---- strata ----

fn block_grams(rng: &mut ChaCha8Rng, s: &SymplecticSplitting) -> Vec<MatK> {
    s.blocks()
        .iter()
        .map(|b| sampling::positive_definite(rng, Algebra::R, b.len()))
        .collect()
}

fn round_trip(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let g = rng.gen_range(2..=3);
    let s = sampling::splitting(rng, g);
    let grams = block_grams(rng, &s);
    let l = lib(psi_sigma(&s, &grams))?;
    ensure!(
        lib(splits_along(&l, &s, SPLIT_TOL))?,
        "ψ_σ output does not split along σ = {s:?}"
    );
    ensure!(
        lib(splits_along_by_probes(&l, &s, SPLIT_TOL))?,
        "probe identity fails on ψ_σ output for σ = {s:?}"
    );
    Ok(())
}

fn disjointness(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let g = rng.gen_range(2..=3);
    let s = sampling::splitting(rng, g);
    let l = lib(psi_sigma(&s, &block_grams(rng, &s)))?;
    for _ in 0..5 {
        let t = sampling::splitting(rng, g);
        if t.refines(&s) || s.refines(&t) {
            continue;
        }
        ensure!(
            !lib(splits_along(&l, &t, SPLIT_TOL))?,
            "ℓ assembled along {s:?} also splits along incomparable {t:?}"
        );
    }
    Ok(())
}

fn monotonicity(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let g = rng.gen_range(2..=3);
    let fine = sampling::splitting(rng, g);
    if fine.blocks().len() < 2 {
        return Ok(());
    }
    let mut blocks = fine.blocks().to_vec();
    let merged = blocks.pop().expect("two blocks");
    blocks[0].extend(merged);
    let coarse = lib(SymplecticSplitting::new(
        g,
        blocks,
        Some(fine.basis().clone()),
    ))?;
    ensure!(
        fine.refines(&coarse),
        "merged splitting not refined by the original"
    );
    let l = lib(psi_sigma(&fine, &block_grams(rng, &fine)))?;
    ensure!(
        lib(splits_along(&l, &coarse, SPLIT_TOL))?,
        "ℓ splits along {fine:?} but not along coarser {coarse:?}"
    );
    Ok(())
}

fn split_test_agreement(rng: &mut ChaCha8Rng, _: &Mutations) -> Outcome {
    let g = rng.gen_range(2..=3);
    let s = sampling::splitting(rng, g);
    let l = if rng.gen_bool(0.5) {
        lib(psi_sigma(&s, &block_grams(rng, &s)))?
    } else {
        LengthFunction::new(sampling::positive_definite(rng, Algebra::R, 2 * g))
    };
    let (a, b) = (
        lib(splits_along(&l, &s, SPLIT_TOL))?,
        lib(splits_along_by_probes(&l, &s, SPLIT_TOL))?,
    );
    ensure!(
        a == b,
        "Gram test {a} vs probe test {b} for σ = {s:?}, G = {:?}",
        l.gram()
    );
    Ok(())
}

const PROPERTIES: &[Property] = &[
    Property {
        suite: "scalars",
        name: "norm multiplicativity",
        exhaustive: false,
        check: norm_multiplicativity,
    },
    Property {
        suite: "scalars",
        name: "octonion alternativity",
        exhaustive: false,
        check: alternativity,
    },
    Property {
        suite: "scalars",
        name: "octonion anti-symmetry",
        exhaustive: true,
        check: anti_symmetry,
    },
    Property {
        suite: "scalars",
        name: "real-part cyclicity",
        exhaustive: false,
        check: real_part_cyclicity,
    },
    Property {
        suite: "scalars",
        name: "polarization recovery",
        exhaustive: false,
        check: polarization_recovery,
    },
    Property {
        suite: "matk",
        name: "eta multiplicativity",
        exhaustive: false,
        check: eta_multiplicativity,
    },
    Property {
        suite: "matk",
        name: "dieudonne multiplicativity",
        exhaustive: false,
        check: dieudonne_multiplicativity,
    },
    Property {
        suite: "matk",
        name: "gram rigidity",
        exhaustive: false,
        check: gram_rigidity,
    },
    Property {
        suite: "matk",
        name: "polar sqrt consistency",
        exhaustive: false,
        check: polar_consistency,
    },
    Property {
        suite: "lattices",
        name: "embedding rigidity",
        exhaustive: false,
        check: embedding_rigidity,
    },
    Property {
        suite: "lattices",
        name: "probe reconstruction",
        exhaustive: false,
        check: probe_reconstruction,
    },
    Property {
        suite: "lattices",
        name: "closure stability",
        exhaustive: false,
        check: closure_stability,
    },
    Property {
        suite: "lattices",
        name: "interior openness",
        exhaustive: false,
        check: interior_openness,
    },
    Property {
        suite: "lattices",
        name: "scale covariance",
        exhaustive: false,
        check: scale_covariance,
    },
    Property {
        suite: "lattices",
        name: "systole enumeration",
        exhaustive: false,
        check: systole_brute_force,
    },
    Property {
        suite: "bridge",
        name: "xi phi identity",
        exhaustive: false,
        check: theorem_identity,
    },
    Property {
        suite: "bridge",
        name: "equivariance",
        exhaustive: false,
        check: equivariance,
    },
    Property {
        suite: "bridge",
        name: "boundary closure",
        exhaustive: false,
        check: boundary_closure,
    },
    Property {
        suite: "bridge",
        name: "homothety soundness",
        exhaustive: false,
        check: homothety_soundness,
    },
    Property {
        suite: "symplectic",
        name: "reduction soundness",
        exhaustive: false,
        check: reduction_soundness,
    },
    Property {
        suite: "symplectic",
        name: "orbit consistency",
        exhaustive: false,
        check: orbit_consistency,
    },
    Property {
        suite: "symplectic",
        name: "autodual invariance",
        exhaustive: false,
        check: autodual_invariance,
    },
    Property {
        suite: "octo",
        name: "octonion table",
        exhaustive: true,
        check: octonion_table,
    },
    Property {
        suite: "octo",
        name: "h2 signature",
        exhaustive: true,
        check: h2_signature,
    },
    Property {
        suite: "octo",
        name: "octonionic polarization",
        exhaustive: false,
        check: octonionic_polarization,
    },
    Property {
        suite: "octo",
        name: "det_h3 diagonal",
        exhaustive: false,
        check: det_h3_diagonal,
    },
    Property {
        suite: "octo",
        name: "det_h3 symmetry",
        exhaustive: false,
        check: det_h3_symmetry,
    },
    Property {
        suite: "octo",
        name: "psd consistency",
        exhaustive: false,
        check: psd_consistency,
    },
    Property {
        suite: "octo",
        name: "oct_phi coincidence",
        exhaustive: false,
        check: oct_coincidence,
    },
    Property {
        suite: "strata",
        name: "round trip",
        exhaustive: false,
        check: round_trip,
    },
    Property {
        suite: "strata",
        name: "disjointness",
        exhaustive: false,
        check: disjointness,
    },
    Property {
        suite: "strata",
        name: "monotonicity",
        exhaustive: false,
        check: monotonicity,
    },
    Property {
        suite: "strata",
        name: "split test agreement",
        exhaustive: false,
        check: split_test_agreement,
    },
];

/// Names of the properties a suite runs.
pub fn property_names(suite: &str) -> Option<Vec<&'static str>> {
    if !SUITES.contains(&suite) {
        return None;
    }
    Some(
        PROPERTIES
            .iter()
            .filter(|p| suite == "all" || p.suite == suite)
            .map(|p| p.name)
            .collect(),
    )
}

/// SplitMix64 finalizer over an FNV-1a hash of the property name.
pub fn sub_seed(seed: u64, property: &str, trial: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in property.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    mix(mix(mix(seed) ^ h) ^ trial)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: u64,
    pub counterexample: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub suite: &'static str,
    pub name: &'static str,
    pub trials: u64,
    pub failed: u64,
    /// The first few failures, by trial index.
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

const SHOWN_FAILURES: usize = 3;

pub fn run_suite(suite: &str, seed: u64, trials: u64, mutations: Mutations) -> Option<Report> {
    property_names(suite)?;
    let selected: Vec<&Property> = PROPERTIES
        .iter()
        .filter(|p| suite == "all" || p.suite == suite)
        .collect();
    let jobs: Vec<(usize, u64)> = selected
        .iter()
        .enumerate()
        .flat_map(|(i, p)| (0..if p.exhaustive { 1 } else { trials }).map(move |t| (i, t)))
        .collect();
    let mut results: Vec<(usize, u64, Outcome)> = jobs
        .par_iter()
        .map(|&(i, t)| {
            let p = selected[i];
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, p.name, t));
            let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                (p.check)(&mut rng, &mutations)
            }))
            .unwrap_or_else(|_| Err("check panicked".into()));
            (i, t, outcome)
        })
        .collect();
    results.sort_by_key(|(i, t, _)| (*i, *t));
    let properties: Vec<PropertyReport> = selected
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mine: Vec<&(usize, u64, Outcome)> = results.iter().filter(|r| r.0 == i).collect();
            let failures: Vec<Failure> = mine
                .iter()
                .filter_map(|(_, t, o)| {
                    o.as_ref().err().map(|c| Failure {
                        trial: *t,
                        counterexample: c.clone(),
                    })
                })
                .collect();
            PropertyReport {
                suite: p.suite,
                name: p.name,
                trials: mine.len() as u64,
                failed: failures.len() as u64,
                failures: failures.into_iter().take(SHOWN_FAILURES).collect(),
            }
        })
        .collect();
    Some(Report {
        suite: suite.to_string(),
        seed,
        trials,
        passed: properties.iter().all(|p| p.failed == 0),
        properties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(7, "a", 0), sub_seed(7, "a", 1));
        assert_ne!(sub_seed(7, "a", 0), sub_seed(7, "b", 0));
        assert_ne!(sub_seed(7, "a", 0), sub_seed(8, "a", 0));
        assert_eq!(sub_seed(7, "a", 3), sub_seed(7, "a", 3));
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 0, 1, Mutations::default()).is_none());
    }

    #[test]
    fn every_suite_passes_a_few_trials() {
        let r = run_suite("all", 11, 3, Mutations::default()).unwrap();
        let failing: Vec<_> = r.properties.iter().filter(|p| p.failed > 0).collect();
        assert!(r.passed, "{failing:#?}");
    }

    #[test]
    fn eta_mutation_is_caught() {
        let r = run_suite("matk", 1, 5, Mutations { eta_sign: true }).unwrap();
        let eta = r
            .properties
            .iter()
            .find(|p| p.name == "eta multiplicativity")
            .unwrap();
        assert!(eta.failed > 0);
        assert!(eta.failures[0].counterexample.contains("M = "));
    }
}
