//! Builders for the two scenario families.

use crate::error::{Error, Result};
use crate::numerics::{pauli_z, ComplexMatrix, HilbertSpace};
use crate::policy::NumericPolicy;
use crate::scalar::Scalar;

use super::setup::{Setup, SetupKind};

/// Control qubit (|i⟩, |f⟩) ⊗ uniform ladder ⊗ system qubit (|g⟩, |e⟩).
///
/// `H = Π_i ⊗ H_S^i + Π_f ⊗ H_S^f + 1_C ⊗ H_W ⊗ 1_S` with
/// `H_S^k = eps_k |e⟩⟨e|` and `H_W = spacing · Σ_n n |n⟩⟨n|`. The control
/// carries no energy of its own, so H_M never couples the two regions.
pub fn build_ladder_setup<T: Scalar>(
    n_rungs: usize,
    spacing: T,
    eps_i: T,
    eps_f: T,
    policy: &NumericPolicy,
) -> Result<Setup<T>> {
    if n_rungs < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_rungs must be ≥ 2, got {n_rungs}"
        )));
    }
    if !(spacing > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be > 0, got {spacing}"
        )));
    }
    if !(eps_i >= T::zero()) || !(eps_f >= T::zero()) {
        return Err(Error::InvalidParameter(
            "level splittings must be ≥ 0".into(),
        ));
    }
    let space = HilbertSpace::new([("control", 2), ("ladder", n_rungs), ("system", 2)])?;
    let ladder: Vec<T> = (0..n_rungs).map(|n| spacing * T::lit(n as f64)).collect();
    let h_w = ComplexMatrix::from_real_diagonal(&ladder);
    let h_machine = ComplexMatrix::identity(2).kron(&h_w);
    let ctrl_i = ComplexMatrix::from_real_diagonal(&[T::one(), T::zero()]);
    let ctrl_f = ComplexMatrix::from_real_diagonal(&[T::zero(), T::one()]);
    let pi_i = ctrl_i.kron(&ComplexMatrix::identity(n_rungs));
    let pi_f = ctrl_f.kron(&ComplexMatrix::identity(n_rungs));
    let h_s_i = ComplexMatrix::from_real_diagonal(&[T::zero(), eps_i]);
    let h_s_f = ComplexMatrix::from_real_diagonal(&[T::zero(), eps_f]);
    let h_int = &pi_i.kron(&h_s_i) + &pi_f.kron(&h_s_f);
    Setup::assemble(
        SetupKind::Ladder { n_rungs, spacing },
        space,
        h_machine,
        ComplexMatrix::zeros(2),
        h_int,
        h_s_i,
        h_s_f,
        pi_i,
        pi_f,
        policy,
    )
}

/// Optional ingredients of a lattice setup beyond hopping and level shift.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeExtras<T: Scalar> {
    /// On-site potential `curvature/2 · (x - center)²` (harmonic machine).
    pub trap_curvature: T,
    /// Trap center; defaults to the midpoint of the ramp.
    pub trap_center: Option<T>,
    /// Bare system Hamiltonian added to both effective Hamiltonians.
    pub bare_system: Option<ComplexMatrix<T>>,
}

impl<T: Scalar> Default for LatticeExtras<T> {
    fn default() -> Self {
        Self {
            trap_curvature: T::zero(),
            trap_center: None,
            bare_system: None,
        }
    }
}

/// Piecewise-linear level shift: `low` up to `x_i`, `high` from `x_f`, linear between.
pub fn linear_ramp<T: Scalar>(n_sites: usize, x_i: usize, x_f: usize, low: T, high: T) -> Vec<T> {
    (0..n_sites)
        .map(|x| {
            if x <= x_i {
                low
            } else if x >= x_f {
                high
            } else {
                let s = T::lit((x - x_i) as f64) / T::lit((x_f - x_i) as f64);
                low + (high - low) * s
            }
        })
        .collect()
}

/// Lattice machine ⊗ system qubit.
///
/// `H_M = -hop Σ_x (|x⟩⟨x+1| + h.c.)` (plus an optional trap),
/// `H_int = Σ_x E(x) |x⟩⟨x| ⊗ σ_z` with `σ_z = |e⟩⟨e| - |g⟩⟨g|`. Regions are
/// sites `≤ x_i` and `≥ x_f`, where `E` must be flat.
pub fn build_lattice_setup<T: Scalar>(
    n_sites: usize,
    hop: T,
    profile: &[T],
    x_i: usize,
    x_f: usize,
    extras: &LatticeExtras<T>,
    policy: &NumericPolicy,
) -> Result<Setup<T>> {
    if n_sites < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_sites must be ≥ 2, got {n_sites}"
        )));
    }
    if profile.len() != n_sites {
        return Err(Error::DimensionMismatch {
            expected: n_sites,
            found: profile.len(),
        });
    }
    if !(x_i < x_f && x_f < n_sites) {
        return Err(Error::InvalidParameter(format!(
            "need x_i < x_f < n_sites, got x_i={x_i}, x_f={x_f}, n_sites={n_sites}"
        )));
    }
    let flat_tol = |a: T, b: T| (a - b).abs() <= T::lit(1e-12) * a.abs().max(b.abs()).max(T::one());
    if let Some(site) = (0..=x_i).find(|&x| !flat_tol(profile[x], profile[0])) {
        return Err(Error::ProfileNotFlat {
            region: "initial",
            site,
        });
    }
    if let Some(site) = (x_f..n_sites).find(|&x| !flat_tol(profile[x], profile[n_sites - 1])) {
        return Err(Error::ProfileNotFlat {
            region: "final",
            site,
        });
    }

    let space = HilbertSpace::new([("machine", n_sites), ("system", 2)])?;
    let center = extras
        .trap_center
        .unwrap_or_else(|| T::lit((x_i + x_f) as f64 / 2.0));
    let half = T::lit(0.5);
    let h_machine = ComplexMatrix::from_real_fn(n_sites, |a, b| {
        if a == b {
            let d = T::lit(a as f64) - center;
            half * extras.trap_curvature * d * d
        } else if a + 1 == b || b + 1 == a {
            -hop
        } else {
            T::zero()
        }
    });
    let sz = pauli_z::<T>();
    let h_int = ComplexMatrix::from_real_diagonal(profile).kron(&sz);
    let bare = extras
        .bare_system
        .clone()
        .unwrap_or_else(|| ComplexMatrix::zeros(2));
    let h_s_i = &sz.scale_real(profile[0]) + &bare;
    let h_s_f = &sz.scale_real(profile[n_sites - 1]) + &bare;
    let pi_i = ComplexMatrix::from_real_diagonal(
        &(0..n_sites)
            .map(|x| if x <= x_i { T::one() } else { T::zero() })
            .collect::<Vec<_>>(),
    );
    let pi_f = ComplexMatrix::from_real_diagonal(
        &(0..n_sites)
            .map(|x| if x >= x_f { T::one() } else { T::zero() })
            .collect::<Vec<_>>(),
    );
    Setup::assemble(
        SetupKind::Lattice {
            n_sites,
            hop,
            x_i,
            x_f,
            profile: profile.to_vec(),
        },
        space,
        h_machine,
        bare,
        h_int,
        h_s_i,
        h_s_f,
        pi_i,
        pi_f,
        policy,
    )
}
