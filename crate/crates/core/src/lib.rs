pub mod bounds;
pub mod cli;
pub mod combinat;
pub mod error;
pub mod instance;
pub mod relax;
pub mod rounding;
pub mod spectra;
