//! Quadrature, the exponential integral and compensated summation.

mod e1;
mod gauss;
mod quad;
mod sum;

pub use e1::{exp_integral_e1, exp_integral_e1_complex, EULER_GAMMA};
pub use gauss::GaussLegendre;
pub use quad::{
    integrate_breakpoints, integrate_circle, integrate_circle_offset, integrate_disc,
    integrate_disc_at_vertex, integrate_graded, integrate_interval, GradedIntegral,
    IntegralResult, QuadValue, QuadratureMethod, QuadratureSpec, VertexSample,
};
pub use sum::{CompensatedSum, ComplexCompensatedSum};
