//! Rough differential equations `dY = f(Y) d𝛚` and their cocycle.

pub mod controlled;
pub mod field;
pub mod solve;

pub use controlled::{compose_controlled, rough_integral, ControlledPath};
pub use field::{field_by_name, jacobian_check, ConstantField, FieldBounds, LinearField, SineField, TrigField, VectorField, FIELD_NAMES};
pub use solve::{cocycle_defect, cocycle_phi, max_cocycle_defect, solve_ode_rk4, solve_rde, Driver};
