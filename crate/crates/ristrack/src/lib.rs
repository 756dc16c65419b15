//! Deterministic simulator and toolkit for vision-aided beam tracking with
//! a reconfigurable reflecting panel.
//!
//! The crate synthesizes bistate phase codebooks from closed-form steering
//! formulas, evaluates scattering patterns and link budgets, models a
//! stereo-camera direction estimator, emulates the panel control board at
//! the byte level, and replays moving-user scenarios to compare
//! vision-aided tracking against beam-sweeping baselines.
//!
//! Modules mirror the processing chain:
//!
//! - [`geometry`] - panel-centered frame and angle conventions
//! - [`wavefield`] - scattering pattern, gain, path loss, SNR, capacity
//! - [`codebook`] - incident-phase models, quantization, codeword synthesis
//! - [`vision`] - stereo rig, detection oracle, disparity/depth/direction
//! - [`tracking`] - vision, sweeping, genie, and static policies
//! - [`controlplane`] - wire framing and the control-board state machine
//! - [`simulator`] - tick loop, calibration, traces, reports
//! - [`cli`] - command configs and runners behind the `ristrack` binary
//!
//! ```
//! use ristrack::codebook::generate_codebook;
//! use ristrack::{Direction, IncidentModel, RisGeometry};
//!
//! // quarter-wave 20x20 panel fed from three wavelengths away
//! let geom = RisGeometry::default_panel();
//! let incident = IncidentModel::NearFieldFeed { feed_distance: 3.0 * geom.wavelength };
//! let phi: Vec<f64> = (-4..=4).map(|d| (d * 10) as f64).collect();
//! let book = generate_codebook(&geom, &incident, &[90.0], &phi).unwrap();
//! assert_eq!(book.len(), 9);
//!
//! // an estimated direction picks the nearest pre-computed entry
//! let (index, entry) = book.nearest_codeword(&Direction::from_degrees(90.0, 14.0));
//! assert_eq!(index, 5);
//! assert_eq!(entry.desired.phi.to_degrees().round(), 10.0);
//! ```

// validation deliberately uses `!(x > 0.0)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod codebook;
pub mod controlplane;
pub mod geometry;
mod rngstream;
pub mod simulator;
pub mod tracking;
pub mod vision;
pub mod wavefield;

pub use codebook::{Codebook, Codeword, IncidentModel};
pub use geometry::{Direction, Position, RisGeometry};
pub use simulator::{Scenario, TraceSample};
pub use wavefield::LinkBudget;
