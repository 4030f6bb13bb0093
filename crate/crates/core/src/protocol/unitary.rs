//! Energy-conserving, transpose-symmetric evolution unitaries.

use std::ops::Range;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Setup;
use crate::numerics::{
    eig_hermitian, func_hermitian, random_real_symmetric, ComplexMatrix, EigenDecomposition, Ket,
};
use crate::policy::NumericPolicy;
use crate::reversal::{tr_violation, ReversalBasis};
use crate::scalar::{cplx, real, Scalar, C};

/// How the evolution between preparation and measurement is generated.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionSpec<T: Scalar> {
    /// `V = exp(-i H t)` under the setup's own Hamiltonian.
    Autonomous { time: T },
    /// A unitary chosen inside the degenerate eigenspaces of `H`.
    External(BlockUnitary<T>),
}

/// Choice of unitary inside each degenerate energy block.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockUnitary<T: Scalar> {
    /// `exp(iK)` with `K` a seeded random real symmetric matrix per block.
    Random { block_seed: u64 },
    /// Two-level rotations `exp(iθX)` pairing region-i with region-f
    /// eigenvectors inside every degenerate block.
    DesignatedSwap { angle: T },
}

impl<T: Scalar> BlockUnitary<T> {
    pub fn swap() -> Self {
        BlockUnitary::DesignatedSwap {
            angle: T::FRAC_PI_2(),
        }
    }
}

impl<T: Scalar> EvolutionSpec<T> {
    pub fn is_autonomous(&self) -> bool {
        matches!(self, EvolutionSpec::Autonomous { .. })
    }
}

/// `V = exp(-i H_total t)`.
pub fn autonomous_unitary<T: Scalar>(
    setup: &Setup<T>,
    time: T,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    if !(time >= T::zero()) || !time.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "evolution time must be ≥ 0, got {time}"
        )));
    }
    if time == T::zero() {
        return Ok(ComplexMatrix::identity(setup.space.dim()));
    }
    func_hermitian(
        &setup.h_total,
        |e| C::from_polar(T::one(), -e * time),
        policy,
    )
}

/// Builds `V` from `spec`, dispatching to [`autonomous_unitary`] or
/// [`energy_conserving_unitary`].
pub fn build_unitary<T: Scalar>(
    setup: &Setup<T>,
    spec: &EvolutionSpec<T>,
    basis: &ReversalBasis<T>,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    match spec {
        EvolutionSpec::Autonomous { time } => autonomous_unitary(setup, *time, policy),
        EvolutionSpec::External(choice) => energy_conserving_unitary(setup, choice, basis, policy),
    }
}

/// Real eigendecomposition of `H_total` in the reversal basis, with its
/// degenerate blocks.
fn real_spectrum<T: Scalar>(
    setup: &Setup<T>,
    basis: &ReversalBasis<T>,
    policy: &NumericPolicy,
) -> Result<(EigenDecomposition<T>, Vec<Range<usize>>)> {
    let h = basis.to_basis(&setup.h_total);
    let scale = h.max_abs().max(T::one());
    let imag = h.imaginary_error();
    if imag > T::lit(policy.tr_invariance) * scale {
        return Err(Error::InvariantViolated(format!(
            "H_total is not real in the {} (imaginary part {:e})",
            basis.description(),
            imag.to_f64_lossy()
        )));
    }
    let e = eig_hermitian(&h.real_part(), policy)?;
    let blocks = e.degenerate_blocks(T::lit(policy.degeneracy_rel), h.max_abs());
    if blocks.iter().all(|b| b.len() == 1) {
        return Err(Error::NoDegeneracy);
    }
    Ok((e, blocks))
}

/// Energy-conserving unitary that is symmetric in the reversal basis.
///
/// `H_total` must be real in `basis`. Its eigenvectors are then real, every
/// spectral projector is real symmetric, and a unitary assembled blockwise
/// from real symmetric generators satisfies `V^T = V` in that basis.
pub fn energy_conserving_unitary<T: Scalar>(
    setup: &Setup<T>,
    choice: &BlockUnitary<T>,
    basis: &ReversalBasis<T>,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    let (eig, blocks) = real_spectrum(setup, basis, policy)?;
    let v = match choice {
        BlockUnitary::Random { block_seed } => random_blocks(&eig, &blocks, *block_seed, policy)?,
        BlockUnitary::DesignatedSwap { angle } => {
            let regions = [
                basis.to_basis(&setup.embed_machine(&setup.pi_i)),
                basis.to_basis(&setup.embed_machine(&setup.pi_f)),
            ];
            designated_swap(&eig, &blocks, &regions, *angle, policy)?
        }
    };
    Ok(basis.from_basis(&v))
}

fn random_blocks<T: Scalar>(
    eig: &EigenDecomposition<T>,
    blocks: &[Range<usize>],
    seed: u64,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    let n = eig.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m: ComplexMatrix<T> = random_real_symmetric(n, &mut rng);
    let mut k = ComplexMatrix::zeros(n);
    for b in blocks {
        let p = eig.spectral_projector(b.clone());
        k = &k + &(&(&p * &m) * &p);
    }
    let k = k.real_part().hermitian_part();
    func_hermitian(&k, |x| C::from_polar(T::one(), x), policy)
}

/// Splits the eigenvectors of one degenerate block into region-i and
/// region-f vectors by diagonalizing the region projector inside the block.
fn split_block<T: Scalar>(
    eig: &EigenDecomposition<T>,
    block: Range<usize>,
    regions: &[ComplexMatrix<T>; 2],
    policy: &NumericPolicy,
) -> Result<[Vec<Ket<T>>; 2]> {
    let vecs: Vec<Ket<T>> = block.map(|k| eig.eigenvector(k)).collect();
    let r = vecs.len();
    let compressed = ComplexMatrix::from_fn(r, |a, b| regions[0].sandwich(&vecs[a], &vecs[b]));
    let ce = eig_hermitian(&compressed.real_part().hermitian_part(), policy)?;
    let tol = T::lit(policy.region_leak);
    let mut out: [Vec<Ket<T>>; 2] = [Vec::new(), Vec::new()];
    for j in 0..r {
        let coef = ce.eigenvector(j);
        let mut v = vec![C::zero(); eig.dim()];
        for (c, u) in coef.iter().zip(&vecs) {
            if !c.is_zero() {
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi = *vi + *c * *ui;
                }
            }
        }
        let mass_i = regions[0].sandwich(&v, &v).re;
        let mass_f = regions[1].sandwich(&v, &v).re;
        if (mass_i - T::one()).abs() <= tol {
            out[0].push(v);
        } else if (mass_f - T::one()).abs() <= tol {
            out[1].push(v);
        } else if mass_i > tol && mass_f > tol {
            return Err(Error::InvariantViolated(
                "designated swap needs energy eigenvectors that lie inside one region".into(),
            ));
        }
    }
    Ok(out)
}

fn designated_swap<T: Scalar>(
    eig: &EigenDecomposition<T>,
    blocks: &[Range<usize>],
    regions: &[ComplexMatrix<T>; 2],
    angle: T,
    policy: &NumericPolicy,
) -> Result<ComplexMatrix<T>> {
    let n = eig.dim();
    let mut v = ComplexMatrix::identity(n);
    let c = real(angle.cos() - T::one());
    let s = cplx(T::zero(), angle.sin());
    let mut any = false;
    for b in blocks.iter().filter(|b| b.len() > 1) {
        let [ins, outs] = split_block(eig, b.clone(), regions, policy)?;
        for (a, f) in ins.iter().zip(&outs) {
            any = true;
            for i in 0..n {
                for j in 0..n {
                    let aa = a[i] * a[j];
                    let ff = f[i] * f[j];
                    let af = a[i] * f[j] + f[i] * a[j];
                    if !(aa.is_zero() && ff.is_zero() && af.is_zero()) {
                        v[(i, j)] = v[(i, j)] + c * (aa + ff) + s * af;
                    }
                }
            }
        }
    }
    if !any {
        return Err(Error::NoDegeneracy);
    }
    Ok(v)
}

/// Max-norm of `[H, V]` relative to `‖H‖·‖V‖` (max-abs norms, floored at 1).
pub fn relative_commutator<T: Scalar>(h: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> T {
    h.commutator(v).max_abs() / (h.max_abs().max(T::one()) * v.max_abs().max(T::one()))
}

/// The three structural requirements on `V`, as human-readable failures.
pub fn unitary_violations<T: Scalar>(
    h: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    basis: &ReversalBasis<T>,
    policy: &NumericPolicy,
) -> Vec<String> {
    let mut out = Vec::new();
    let u = v.unitarity_error();
    if u > T::lit(policy.unitarity) {
        out.push(format!(
            "V is not unitary (‖V†V − 1‖ = {:e})",
            u.to_f64_lossy()
        ));
    }
    let c = relative_commutator(h, v);
    if c > T::lit(policy.commutator_rel) {
        out.push(format!("[H, V] ≠ 0 (relative {:e})", c.to_f64_lossy()));
    }
    let t = tr_violation(v, basis);
    if t > T::lit(policy.tr_invariance) {
        out.push(format!(
            "V is not time-reversal invariant (‖V^T − V‖ = {:e})",
            t.to_f64_lossy()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_ladder_setup, build_lattice_setup, linear_ramp, Region};
    use crate::reversal::is_tr_invariant;
    use num_traits::One;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn is_identity(v: &ComplexMatrix<f64>) -> bool {
        v.entries().iter().enumerate().all(|(k, z)| {
            if k / v.dim() == k % v.dim() {
                z.is_one()
            } else {
                z.is_zero()
            }
        })
    }

    #[test]
    fn autonomous_at_zero_time_is_identity() {
        let s = build_ladder_setup::<f64>(3, 1.0, 1.0, 2.0, &policy()).unwrap();
        let v = autonomous_unitary(&s, 0.0, &policy()).unwrap();
        assert!(is_identity(&v));
        assert!(autonomous_unitary(&s, -1.0, &policy()).is_err());
    }

    #[test]
    fn autonomous_commutes_and_is_unitary() {
        let prof = linear_ramp(16, 4, 11, 0.0, 0.5);
        let s = build_lattice_setup(16, 1.0, &prof, 4, 11, &Default::default(), &policy()).unwrap();
        let v = autonomous_unitary(&s, 2.345, &policy()).unwrap();
        assert!(v.unitarity_error() < 1e-10);
        assert!(s.h_total.commutator(&v).max_abs() < 1e-10);
        assert!(is_tr_invariant(&v, &ReversalBasis::for_setup(&s), 1e-10));
    }

    #[test]
    fn random_block_unitary_invariants() {
        let s = build_ladder_setup::<f64>(4, 1.0, 1.0, 2.0, &policy()).unwrap();
        let b = ReversalBasis::for_setup(&s);
        let v =
            energy_conserving_unitary(&s, &BlockUnitary::Random { block_seed: 3 }, &b, &policy())
                .unwrap();
        assert!(v.unitarity_error() < 1e-10);
        assert!(s.h_total.commutator(&v).max_abs() <= 1e-10);
        assert!(is_tr_invariant(&v, &b, 1e-10));
        assert!(unitary_violations(&s.h_total, &v, &b, &policy()).is_empty());
        let w =
            energy_conserving_unitary(&s, &BlockUnitary::Random { block_seed: 3 }, &b, &policy())
                .unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn designated_swap_moves_between_regions() {
        let s = build_ladder_setup::<f64>(4, 1.0, 1.0, 2.0, &policy()).unwrap();
        let b = ReversalBasis::for_setup(&s);
        let v = energy_conserving_unitary(&s, &BlockUnitary::swap(), &b, &policy()).unwrap();
        assert!(v.unitarity_error() < 1e-14);
        assert_eq!(s.h_total.commutator(&v).max_abs(), 0.0);
        assert!(is_tr_invariant(&v, &b, 0.0));
        let pi = s.embed_machine(s.projector(Region::Initial));
        let pf = s.embed_machine(s.projector(Region::Final));
        let cross = &(&pf * &v) * &pi;
        assert!(cross.max_abs() > 0.99);
    }

    #[test]
    fn nondegenerate_spectrum_is_rejected() {
        let prof = linear_ramp(10, 2, 7, 0.0, 0.37);
        let s = build_lattice_setup(10, 1.0, &prof, 2, 7, &Default::default(), &policy()).unwrap();
        let b = ReversalBasis::for_setup(&s);
        for choice in [BlockUnitary::swap(), BlockUnitary::Random { block_seed: 1 }] {
            let err = energy_conserving_unitary(&s, &choice, &b, &policy()).unwrap_err();
            assert_eq!(err, Error::NoDegeneracy);
        }
    }

    #[test]
    fn complex_hamiltonian_is_rejected() {
        let mut s = build_ladder_setup::<f64>(3, 1.0, 1.0, 2.0, &policy()).unwrap();
        s.h_total[(0, 1)] = cplx(0.0, 0.1);
        s.h_total[(1, 0)] = cplx(0.0, -0.1);
        let b = ReversalBasis::for_setup(&s);
        assert!(matches!(
            energy_conserving_unitary(&s, &BlockUnitary::swap(), &b, &policy()),
            Err(Error::InvariantViolated(_))
        ));
    }
}
