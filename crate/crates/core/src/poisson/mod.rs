//! Operational vector fields and the brackets they generate.

mod bracket;
mod field;
mod obstruction;
mod tensor;

pub use bracket::{
    bracket, check_axioms, hamiltonian_field, Axiom, AxiomReport, AxiomRow, BracketSpec,
    Counterexample, POINTS_PER_TRIAL,
};
pub use field::{
    apply_field, commutator, commute_check, order_at, parse_field, OperationalField, Order,
    TangentAt,
};
pub use obstruction::{extended_leibniz_rhs, extension_obstruction_demo, ObstructionReport};
pub use tensor::{
    covector, queer_witness, sharp, tensor_at, Direction, KinematicVector, TensorAtPoint, Witness,
};
