//! Hilbert spaces, Hamiltonians, region projectors and machine states for the
//! ladder (externally driven) and lattice (autonomous) scenario families.

mod builders;
mod setup;
mod states;

pub use crate::numerics::HilbertSpace;
pub use builders::{build_ladder_setup, build_lattice_setup, linear_ramp, LatticeExtras};
pub use setup::{Region, Setup, SetupKind};
pub use states::{
    amplitudes_from_pairs, check_region, eigen_energy, gaussian_amplitudes, gaussian_packet,
    ladder_gaussian, ladder_state, machine_eigenstate, packet_center, region_leak, MachineState,
};
