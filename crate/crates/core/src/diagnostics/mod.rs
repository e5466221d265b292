//! Well-posedness classification, reproduction tables, Gaussian witnesses,
//! scaling probes and the axiom harness.

mod classify;
mod harness;
mod scaling;
mod tables;
mod witness;

pub use classify::{
    classify_wellposedness, Basis, Classification, LawInvarianceSide, PremiseCode, Verdict,
};
pub use harness::{
    axiom_harness, axiom_harness_with, catalog, Axiom, AxiomCheck, AxiomReport, CatalogEntry,
    Counterexample, Functional,
};
pub use scaling::{default_schedule, scaling_probe, ScalingTrace};
pub use tables::{table1, table2, table_matrix, Table, TableRow};
pub use witness::{
    gaussian_witness, gaussian_witness_with_terms, GaussianWitness, WitnessOutcome, WitnessRisk,
    WitnessStep,
};
