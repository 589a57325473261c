pub mod compensated;
pub mod delay_trig;
pub mod quadrature;
pub mod exprlang;
pub mod delay_ode;
pub mod funcs;
pub mod problem;
pub mod field;
pub mod interp;
pub mod spectral;
pub mod oracle;
pub mod stability;
pub mod cli;
