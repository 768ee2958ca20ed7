pub mod driver;
pub mod eval;
pub mod model;
pub mod optkernel;
pub mod pem;
pub mod scuc;
pub mod stochastic;
