//! Velocity fields, densities, kernels, test functions and the
//! renormalisation nonlinearities.

mod beta;
mod density;
mod kernel;
mod test_function;
mod velocity;

pub use beta::{beta_bounded_power, beta_smooth_approx, beta_truncation, Beta};
pub use density::{Density, Gaussian, Layer, ScalarField};
pub use kernel::{make_kernel, BumpProfile, Kernel};
pub use test_function::{dirac_time_family, make_test_function, SpatialBump, TestFunction, TimeProfile};
pub use velocity::{Difference, Jacobian, Modulation, Negated, StreamFunction, UniformFlow, Velocity, VelocityField};
