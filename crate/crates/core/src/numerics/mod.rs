pub mod fd;
pub mod ode;
pub mod quad;
pub mod reduced;
pub mod special;

pub use fd::{fd_derivative, FdEstimate};
pub use reduced::{integrate_curvature_2x2, integrate_fs_2x2, Integrand2x2, QuadratureMethod, QuadratureSpec};
pub use special::{bessel_j1, gamma_fn, hyp2f1, j1_ratio, log_gamma, rgamma};
