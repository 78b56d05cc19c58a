//! Differential evolution with unbounded populations.
//!
//! The crate bundles the classical DE/SHADE/LSHADE baselines, the unbounded
//! UDE/USHADE family, a set of shifted benchmark functions, the statistics
//! used to compare optimisers (ECDF attainment, Wilcoxon rank-sum, lineage
//! fractions) and a seeded experiment runner.
//!
//! ```
//! use unbounded_de::{engines, EngineKind, FunctionId, Objective, ObjectiveSpec};
//!
//! let spec = ObjectiveSpec::new(FunctionId::Sphere, 10, -100.0, 100.0, 5_000).unwrap();
//! let mut objective = Objective::new(spec);
//! let config = EngineKind::Ushade.default_config();
//! let record = engines::run(&config, &mut objective, 7).unwrap();
//! assert_eq!(record.evaluations, 5_000);
//! ```

pub mod adaptation;
pub mod analysis;
pub mod engines;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod population;
pub mod record;
pub mod rng;
pub mod selection;
pub mod variation;

pub use adaptation::{AdaptationParams, SuccessHistory, SuccessSets};
pub use engines::{EngineConfig, EngineKind, Observer, RunOptions};
pub use error::{Error, Result};
pub use objectives::{FunctionId, Objective, ObjectiveSpec};
pub use population::{Archive, Individual, PopulationStore, StoreMode};
pub use record::{RunRecord, TrajectoryPoint};
pub use rng::RngStream;
pub use selection::SelectionPolicy;
