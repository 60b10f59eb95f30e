//! Pursuit-evasion with guaranteed encirclement and finite-time capture.
//!
//! A team of unit-speed pursuers keeps a slower evader inside the convex hull
//! of their positions and closes in on it. While the evader is strictly
//! inside the hull every pursuer runs pure pursuit; when the evader reaches a
//! hull edge the two pursuers spanning it swing their headings outward by a
//! fixed angle so that the edge can never be crossed. The sum of
//! pursuer-evader distances then decays at a guaranteed rate, which bounds the
//! capture time.
//!
//! Modules:
//! - [`geometry`]: signed sub-triangle areas, hull ordering, edge frames.
//! - [`pursuit`]: pure pursuit, the edge-phase law and its admissible angles.
//! - [`evader`]: scripted evader policies and the externally driven one.
//! - [`simulation`]: fixed-step integration, phase switching, capture.
//! - [`analysis`]: Lyapunov value, capture-time bound, area-rate diagnostics.
//! - [`montecarlo`]: seeded multi-trial experiments.
//! - [`scenario`]: scenario files and validation.
//! - [`export`]: trace CSV and summary writers.

pub mod analysis;
pub mod error;
pub mod evader;
pub mod export;
pub mod geometry;
pub mod montecarlo;
pub mod pursuit;
pub mod scenario;
pub mod simulation;

pub use error::{Error, Result};
pub use geometry::{HullOrder, Vec2};
pub use scenario::Scenario;
pub use simulation::{run_episode, Episode, EpisodeResult, TraceRecord, WorldState};
