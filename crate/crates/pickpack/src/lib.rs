//! Deterministic simulator and KPI harness for multi-pick produce grasping.
//!
//! `pickpack` models a four-fingered, belt-driven gripper mounted on an
//! impedance-controlled arm that picks loose produce (rigid limes, soft
//! spheres) out of a crate and places it into a punnet. Everything is
//! quasi-static and fully seeded: a trial is a pure function of its
//! configuration and seed, so runs are reproducible byte-for-byte across
//! machines and worker counts.
//!
//! The crate is organised around the stations of a pick-and-place cycle:
//!
//! * [`gripper`] — four-bar finger kinematics, gear-coupled finger spread,
//!   aperture and closure against a collision set.
//! * [`arm`] — poses, straight-line/slerp trajectories and the Cartesian
//!   impedance law that turns tracking error into a wrench.
//! * [`sensing`] — wrist force/torque sampling with seeded noise and
//!   threshold-based contact detection.
//! * [`scene`] — crates, punnets and item populations, plus the geometric
//!   predicates for finger insertion, capture and retention.
//! * [`executor`] — the five-phase trial protocol and the scenario matrix.
//! * [`kpi`] — throughput/success metrics, reference tables and exports.
//! * [`humanbench`] — ingestion and summary of human demonstration trials.
//! * [`config`] — the single TOML-backed run configuration.
//!
//! A rendered guide lives in `book/`; its chapters are compiled as doc-tests
//! through the [`guide`] module so the examples cannot drift from the code.

pub mod arm;
pub mod config;
pub mod executor;
pub mod geom;
pub mod gripper;
pub mod guide;
pub mod humanbench;
pub mod kpi;
pub mod scene;
pub mod sensing;

mod rng;

pub use config::RunConfig;
