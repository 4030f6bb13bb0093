//! Energy-conserving evolutions, the prepare/evolve/measure protocol and the
//! channel it induces on the machine.

mod channel;
mod run;
mod unitary;

pub use channel::{induced_channel, Direction, InducedChannel};
pub use run::{
    forward_probability, machine_output, reverse_probability, transition_amplitude,
    transition_probability, transition_probability_mixed, ProtocolRun, Variant,
};
pub use unitary::{
    autonomous_unitary, build_unitary, energy_conserving_unitary, relative_commutator,
    unitary_violations, BlockUnitary, EvolutionSpec,
};
