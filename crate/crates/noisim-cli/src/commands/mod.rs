pub mod bench;
pub mod device;
pub mod fit;
pub mod metrics;
pub mod run;
pub mod sweep;
