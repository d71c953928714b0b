//! Study harness for the divergence-family estimators: bundled benchmark
//! datasets, seeded reproducible sampling, and Monte Carlo efficiency
//! studies with machine-readable CSV output.

pub mod config;
pub mod datasets;
pub mod error;
pub mod mc;
pub mod report;
pub mod rng;

pub use config::{ContaminationSpec, MCConfig};
pub use datasets::{
    drosophila, drosophila_deleted, load_dataset, poisson_expected_frequencies, Dataset,
    DatasetKind, TELEPHONE_FAULT,
};
pub use error::{Error, Result};
pub use mc::{generate_sample, run_efficiency_study, EfficiencyStudy, PairEfficiency};
pub use report::{efficiency_csv, metadata_line};
pub use rng::ReplicateRng;
