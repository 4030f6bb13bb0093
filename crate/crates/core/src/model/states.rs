//! Pure machine states: eigenstates, ladder superpositions, lattice wave packets.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, inner, norm, normalized, ComplexMatrix, Ket};
use crate::policy::NumericPolicy;
use crate::scalar::{cplx, Scalar, C};

use super::setup::{Region, Setup, SetupKind};

/// Unit-norm ket on the machine factor(s).
#[derive(Debug, Clone, PartialEq)]
pub struct MachineState<T: Scalar> {
    pub vector: Ket<T>,
    pub label: String,
}

impl<T: Scalar> MachineState<T> {
    pub fn new(vector: Ket<T>, label: impl Into<String>, policy: &NumericPolicy) -> Result<Self> {
        let n = norm(&vector);
        if (n - T::one()).abs() > T::lit(policy.norm) {
            return Err(Error::InvalidParameter(format!(
                "machine state norm is {n}, expected 1"
            )));
        }
        Ok(Self {
            vector,
            label: label.into(),
        })
    }

    /// Normalizes `vector` first; fails on the zero vector.
    pub fn normalized(vector: &[C<T>], label: impl Into<String>) -> Result<Self> {
        let v = normalized(vector)
            .ok_or_else(|| Error::InvalidParameter("cannot normalize zero vector".into()))?;
        Ok(Self {
            vector: v,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn density(&self) -> ComplexMatrix<T> {
        ComplexMatrix::projector(&self.vector)
    }

    /// Same state with every amplitude multiplied by `e^{iθ}`.
    pub fn with_global_phase(&self, theta: T) -> Self {
        let ph = C::from_polar(T::one(), theta);
        Self {
            vector: self.vector.iter().map(|z| *z * ph).collect(),
            label: self.label.clone(),
        }
    }
}

/// Probability mass of `psi` outside `region`.
pub fn region_leak<T: Scalar>(setup: &Setup<T>, psi: &[C<T>], region: Region) -> T {
    let inside = setup.projector(region).sandwich(psi, psi).re;
    (norm(psi).powi(2) - inside).max(T::zero())
}

/// Fails with `RegionLeak` when more than `policy.region_leak` of the mass lies
/// outside `region`.
pub fn check_region<T: Scalar>(
    setup: &Setup<T>,
    state: &MachineState<T>,
    region: Region,
    policy: &NumericPolicy,
) -> Result<()> {
    let leak = region_leak(setup, &state.vector, region);
    if leak > T::lit(policy.region_leak) {
        return Err(Error::RegionLeak {
            label: state.label.clone(),
            region: region.name(),
            mass: leak.to_f64_lossy(),
            threshold: policy.region_leak,
        });
    }
    Ok(())
}

/// Normalized `exp(-(x-center)²/4w²) · exp(i k x)` over `n` sites.
pub fn gaussian_amplitudes<T: Scalar>(
    n: usize,
    center: T,
    width: T,
    momentum: T,
) -> Result<Ket<T>> {
    if !(width > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "packet width must be > 0, got {width}"
        )));
    }
    let four_w2 = T::lit(4.0) * width * width;
    let v: Ket<T> = (0..n)
        .map(|x| {
            let xf = T::lit(x as f64);
            let d = xf - center;
            C::from_polar((-(d * d) / four_w2).exp(), momentum * xf)
        })
        .collect();
    normalized(&v).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "packet centred at {center} has no weight on the lattice"
        ))
    })
}

/// Gaussian wave packet on a lattice machine, checked against `region`.
pub fn gaussian_packet<T: Scalar>(
    setup: &Setup<T>,
    region: Region,
    center: T,
    width: T,
    momentum: T,
    policy: &NumericPolicy,
) -> Result<MachineState<T>> {
    let n_sites = match setup.kind {
        SetupKind::Lattice { n_sites, .. } => n_sites,
        SetupKind::Ladder { .. } => {
            return Err(Error::InvalidParameter(
                "wave packets need a lattice machine; use ladder_state for ladders".into(),
            ))
        }
    };
    if !(center >= T::zero() && center <= T::lit((n_sites - 1) as f64)) {
        return Err(Error::InvalidParameter(format!(
            "packet center {center} outside 0..{n_sites}"
        )));
    }
    let v = gaussian_amplitudes(n_sites, center, width, momentum)?;
    let state = MachineState {
        vector: v,
        label: format!("packet(x={center},w={width},k={momentum})"),
    };
    check_region(setup, &state, region, policy)?;
    Ok(state)
}

/// Packet center `distance` sites away from the first site whose level shift
/// differs from the plateau of `region`. For the initial region that site is
/// `x_i + 1`; for the final region it is `x_f - 1`.
pub fn packet_center<T: Scalar>(setup: &Setup<T>, region: Region, distance: T) -> Result<T> {
    match setup.kind {
        SetupKind::Lattice { x_i, x_f, .. } => Ok(match region {
            Region::Initial => T::lit((x_i + 1) as f64) - distance,
            Region::Final => T::lit((x_f - 1) as f64) + distance,
        }),
        SetupKind::Ladder { .. } => Err(Error::InvalidParameter(
            "packet distances are defined for lattice setups only".into(),
        )),
    }
}

/// Ladder-machine state `|region⟩_C ⊗ Σ_n a_n |n⟩`, normalized.
pub fn ladder_state<T: Scalar>(
    setup: &Setup<T>,
    region: Region,
    rung_amplitudes: &[C<T>],
    label: impl Into<String>,
) -> Result<MachineState<T>> {
    let n_rungs = match setup.kind {
        SetupKind::Ladder { n_rungs, .. } => n_rungs,
        SetupKind::Lattice { .. } => {
            return Err(Error::InvalidParameter(
                "ladder_state needs a ladder setup".into(),
            ))
        }
    };
    if rung_amplitudes.len() != n_rungs {
        return Err(Error::DimensionMismatch {
            expected: n_rungs,
            found: rung_amplitudes.len(),
        });
    }
    let offset = match region {
        Region::Initial => 0,
        Region::Final => n_rungs,
    };
    let mut v = vec![C::zero(); 2 * n_rungs];
    v[offset..offset + n_rungs].copy_from_slice(rung_amplitudes);
    MachineState::normalized(&v, label)
}

/// Gaussian superposition over rungs with a linear phase, in the given control region.
pub fn ladder_gaussian<T: Scalar>(
    setup: &Setup<T>,
    region: Region,
    center: T,
    width: T,
    phase_per_rung: T,
) -> Result<MachineState<T>> {
    let n_rungs = match setup.kind {
        SetupKind::Ladder { n_rungs, .. } => n_rungs,
        SetupKind::Lattice { .. } => {
            return Err(Error::InvalidParameter(
                "ladder_gaussian needs a ladder setup".into(),
            ))
        }
    };
    let amps = gaussian_amplitudes(n_rungs, center, width, phase_per_rung)?;
    ladder_state(
        setup,
        region,
        &amps,
        format!("rungs(c={center},w={width},k={phase_per_rung})"),
    )
}

/// `index`-th eigenstate (ascending energy) of `H_M` restricted to `region`.
///
/// Only defined when `H_M` commutes with the region projector; on a lattice
/// the hopping term connects the regions and this returns `NotEigenstate`.
pub fn machine_eigenstate<T: Scalar>(
    setup: &Setup<T>,
    region: Region,
    index: usize,
    policy: &NumericPolicy,
) -> Result<MachineState<T>> {
    let p = setup.projector(region);
    let h = &setup.h_machine;
    let comm = h.commutator(p).max_abs();
    if comm > T::lit(policy.commutator_rel) * h.max_abs().max(T::one()) {
        return Err(Error::NotEigenstate(format!(
            "H_M does not commute with the region-{} projector (‖[H_M, Π]‖ = {:e})",
            region.name(),
            comm.to_f64_lossy()
        )));
    }
    // orthonormal basis of the region from the projector's unit eigenspace
    let pe = eig_hermitian(p, policy)?;
    let basis: Vec<Ket<T>> = (0..pe.dim())
        .filter(|&k| pe.eigenvalues[k] > T::lit(0.5))
        .map(|k| pe.eigenvector(k))
        .collect();
    let r = basis.len();
    if index >= r {
        return Err(Error::IndexOutOfLadder {
            index: index as i64,
            len: r,
        });
    }
    let compressed = ComplexMatrix::from_fn(r, |a, b| h.sandwich(&basis[a], &basis[b]));
    let ce = eig_hermitian(&compressed, policy)?;
    let w = ce.eigenvector(index);
    let mut v = vec![C::zero(); h.dim()];
    for (coef, b) in w.iter().zip(&basis) {
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi = *vi + *coef * *bi;
        }
    }
    let state = MachineState::normalized(&v, format!("E{}[{}]", region.name(), index))?;
    eigen_energy(h, &state.vector, policy)?;
    Ok(state)
}

/// Energy of an eigenstate of `h`, or `NotEigenstate` when `‖hψ − ⟨h⟩ψ‖`
/// exceeds the policy's eigen-residual tolerance.
pub fn eigen_energy<T: Scalar>(
    h: &ComplexMatrix<T>,
    psi: &[C<T>],
    policy: &NumericPolicy,
) -> Result<T> {
    let hpsi = h.apply(psi);
    let e = inner(psi, &hpsi).re;
    let resid: Ket<T> = hpsi.iter().zip(psi).map(|(a, b)| *a - *b * e).collect();
    let r = norm(&resid);
    if r > T::lit(policy.eigen_residual) * h.max_abs().max(T::one()) {
        return Err(Error::NotEigenstate(format!(
            "‖Hψ − Eψ‖ = {:e}",
            r.to_f64_lossy()
        )));
    }
    Ok(e)
}

/// Uniform-phase complex amplitudes from `(re, im)` pairs.
pub fn amplitudes_from_pairs<T: Scalar>(pairs: &[(T, T)]) -> Ket<T> {
    pairs.iter().map(|&(re, im)| cplx(re, im)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_ladder_setup, build_lattice_setup, linear_ramp};

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn lattice() -> Setup<f64> {
        let prof = linear_ramp(40, 12, 28, 0.0, 0.5);
        build_lattice_setup(40, 1.0, &prof, 12, 28, &Default::default(), &policy()).unwrap()
    }

    #[test]
    fn narrow_packet_is_basis_state() {
        let v = gaussian_amplitudes::<f64>(10, 4.0, 0.01, 0.3).unwrap();
        assert!((v[4].norm() - 1.0).abs() < 1e-15);
        assert!(v.iter().enumerate().all(|(x, z)| x == 4 || *z == C::zero()));
    }

    #[test]
    fn zero_momentum_packet_is_real_positive() {
        let v = gaussian_amplitudes::<f64>(20, 7.0, 2.0, 0.0).unwrap();
        assert!(v.iter().all(|z| z.im == 0.0 && z.re > 0.0));
    }

    #[test]
    fn packet_moments() {
        let s = lattice();
        let p = gaussian_packet(&s, Region::Initial, 6.0, 2.0, 0.8, &policy());
        // width 2 centred 6 sites from the region edge leaks more than 1e-8
        assert!(matches!(p, Err(Error::RegionLeak { .. })));
        let v = gaussian_amplitudes::<f64>(40, 6.0, 2.0, 0.8).unwrap();
        assert!((norm(&v) - 1.0).abs() < 1e-12);
        let mean: f64 = v
            .iter()
            .enumerate()
            .map(|(x, z)| x as f64 * z.norm_sqr())
            .sum();
        assert!((mean - 6.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn packet_region_check_passes_when_localised() {
        let s = lattice();
        let p = gaussian_packet(&s, Region::Initial, 6.0, 0.8, 1.0, &policy()).unwrap();
        assert!(region_leak(&s, &p.vector, Region::Initial) < 1e-8);
        assert!(gaussian_packet(&s, Region::Final, 6.0, 0.8, 1.0, &policy()).is_err());
    }

    #[test]
    fn packet_center_from_distance() {
        let s = lattice();
        assert_eq!(packet_center(&s, Region::Initial, 4.0).unwrap(), 9.0);
        assert_eq!(packet_center(&s, Region::Final, 4.0).unwrap(), 31.0);
    }

    #[test]
    fn ladder_ground_eigenstate() {
        let s = build_ladder_setup(4, 1.0, 1.0, 2.0, &policy()).unwrap();
        let e = machine_eigenstate(&s, Region::Initial, 0, &policy()).unwrap();
        assert_eq!(e.vector[0], C::new(1.0, 0.0));
        let e = machine_eigenstate(&s, Region::Final, 2, &policy()).unwrap();
        assert_eq!(e.vector[4 + 2].norm(), 1.0);
        let energy = eigen_energy(&s.h_machine, &e.vector, &policy()).unwrap();
        assert_eq!(energy, 2.0);
        assert!(matches!(
            machine_eigenstate(&s, Region::Final, 4, &policy()),
            Err(Error::IndexOutOfLadder { .. })
        ));
    }

    #[test]
    fn lattice_has_no_region_eigenstates() {
        assert!(matches!(
            machine_eigenstate(&lattice(), Region::Initial, 0, &policy()),
            Err(Error::NotEigenstate(_))
        ));
    }

    #[test]
    fn ladder_superposition_lives_in_region() {
        let s = build_ladder_setup(5, 1.0, 1.0, 2.0, &policy()).unwrap();
        let psi = ladder_gaussian(&s, Region::Final, 2.0, 1.0, 0.4).unwrap();
        assert_eq!(region_leak(&s, &psi.vector, Region::Final), 0.0);
        assert!(eigen_energy(&s.h_machine, &psi.vector, &policy()).is_err());
    }

    #[test]
    fn unnormalized_state_rejected() {
        let v = vec![C::new(1.0, 0.0), C::new(1.0, 0.0)];
        assert!(MachineState::new(v, "x", &policy()).is_err());
    }
}
