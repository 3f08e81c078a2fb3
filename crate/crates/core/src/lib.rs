pub mod autodiff;
pub mod bench_suite;
pub mod error;
pub mod exec;
pub mod harness;
pub mod jso;
pub mod manet;
pub mod record;
pub mod seed;
pub mod stats;
