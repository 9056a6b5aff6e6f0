//! Direct construction of multiple zero-correlation-zone (ZCZ) sequence sets
//! from generalised Boolean functions, exact correlation certificates, and a
//! multi-cluster quasi-synchronous CDMA simulator built on top of them.

pub mod construction;
pub mod correlation;
pub mod error;
pub mod export;
pub mod gbf;
pub mod qscdma;

pub use construction::{
    build_ccc_family, build_h, build_multiple_zcz, check_chunk_decomposition, check_h_shift_identity, example1,
    path_function, union_family, ChunkModel, ConstructionParams, HCoefficients, MultipleZczFamily, ZczSequenceSet,
};
pub use correlation::{
    accf, certify_family, code_accf, correlation_spectrum, pccf, performance_parameter, verify_ccc, verify_inter_zccz,
    verify_zcz, ComplementaryCode, CorrelationValue, FamilyCertificate, Optimality, ZczCertificate,
};
pub use error::{Error, Result};
pub use export::{read_family, write_family, RunManifest};
pub use gbf::{Gbf, UnimodularSequence};
pub use qscdma::{
    assign_signatures, simulate_ber, theoretical_bpsk_ber, BerCurve, FamilySource, SignatureFamily, SimulationConfig,
    SimulationResult, SnrAxis,
};
