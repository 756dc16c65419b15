//! Scattering-field pattern, normalized gain, and link-budget arithmetic,
//! plus pattern analysis (peak direction, half-power lobe width).
//!
//! The field of an `M x N` panel toward a direction is the phasor sum over
//! elements of the per-element pattern, the modulation and incidence
//! coefficients, and the two lattice phase terms (row offset times
//! `cos(theta)`, column offset times `sin(theta)sin(phi)`). Gains are
//! normalized: the pattern peak is the 0 dB reference, so absolute
//! directivity is out of scope.

use crate::geometry::{wrap_phase, Direction, RisGeometry};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("element grid has {got} states, geometry wants {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("pattern axis must be nonempty and strictly increasing")]
    BadAxis,
    #[error("degenerate pattern: reference magnitude is zero")]
    DegeneratePattern,
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
}

/// Per-element modulation and incidence coefficients.
///
/// Amplitudes are unitless and non-negative; phases are stored wrapped to
/// `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementState {
    /// Modulation amplitude (typically 1).
    pub mod_amplitude: f64,
    /// Modulation phase in radians.
    pub mod_phase: f64,
    /// Incident-wave amplitude (typically 1).
    pub inc_amplitude: f64,
    /// Incident-wave phase in radians.
    pub inc_phase: f64,
}

impl ElementState {
    pub fn new(mod_amplitude: f64, mod_phase: f64, inc_amplitude: f64, inc_phase: f64) -> Self {
        Self {
            mod_amplitude,
            mod_phase: wrap_phase(mod_phase),
            inc_amplitude,
            inc_phase: wrap_phase(inc_phase),
        }
    }

    /// Unit-amplitude state with the given modulation and incidence phases.
    pub fn phases(mod_phase: f64, inc_phase: f64) -> Self {
        Self::new(1.0, mod_phase, 1.0, inc_phase)
    }
}

/// Broadside-cosine element pattern, `f = max(sin(theta)cos(phi), 0)^q`.
///
/// `q = 0` is isotropic and keeps the coherent-sum bound exact; larger
/// exponents taper the response away from boresight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementPattern {
    pub exponent: f64,
}

impl ElementPattern {
    pub const ISOTROPIC: ElementPattern = ElementPattern { exponent: 0.0 };

    pub fn new(exponent: f64) -> Self {
        assert!(exponent >= 0.0, "element pattern exponent must be >= 0");
        Self { exponent }
    }

    pub fn evaluate(&self, dir: &Direction) -> f64 {
        if self.exponent == 0.0 {
            return 1.0;
        }
        let broadside = (dir.theta.sin() * dir.phi.cos()).max(0.0);
        broadside.powf(self.exponent)
    }
}

/// One azimuth cut of the pattern at fixed pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCut {
    /// Pitch of the cut in radians.
    pub theta: f64,
    /// Azimuth samples in radians, strictly increasing.
    pub phi_axis: Vec<f64>,
    /// Field magnitude per sample.
    pub magnitude: Vec<f64>,
    /// Gain per sample in dB, normalized so the peak is 0 dB.
    pub gain_db: Vec<f64>,
}

/// Main-lobe summary of a cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainLobe {
    /// Azimuth of the peak sample in radians.
    pub peak_direction: f64,
    /// Contiguous span around the peak where gain >= -3 dB, radians.
    /// Crossings are interpolated linearly in dB between samples.
    pub half_power_width: Option<f64>,
    /// Set when the -3 dB span runs into an axis boundary; the width is
    /// then a lower bound and reported as `None`.
    pub censored: bool,
}

/// Link constants for the received-SNR stack.
///
/// Transmit power is per subcarrier; the calibration offset absorbs every
/// hardware constant the model does not carry explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_antenna_gain_db: f64,
    pub rx_antenna_gain_db: f64,
    pub tx_link_gain_db: f64,
    pub rx_link_gain_db: f64,
    pub noise_power_dbm: f64,
    pub subcarriers: usize,
    pub snr_calibration_db: f64,
}

impl LinkBudget {
    /// Bench defaults: 7 dBi horns, 30/22 dB link gains, 52 subcarriers.
    pub fn bench_default() -> Self {
        Self {
            tx_power_dbm: 0.0,
            tx_antenna_gain_db: 7.0,
            rx_antenna_gain_db: 7.0,
            tx_link_gain_db: 30.0,
            rx_link_gain_db: 22.0,
            noise_power_dbm: -90.0,
            subcarriers: 52,
            snr_calibration_db: 0.0,
        }
    }
}

/// Row-major per-element complex coefficients, `A*B * exp(j(alpha+beta))`.
pub(crate) fn element_phasors(states: &[ElementState]) -> Vec<Complex64> {
    states
        .iter()
        .map(|s| {
            Complex64::from_polar(s.mod_amplitude * s.inc_amplitude, s.mod_phase + s.inc_phase)
        })
        .collect()
}

/// Lattice phase tables toward one direction, reusable across codewords.
pub(crate) struct DirectionPhases {
    row_phasor: Vec<Complex64>,
    col_phasor: Vec<Complex64>,
    element_gain: f64,
}

impl DirectionPhases {
    pub(crate) fn new(geom: &RisGeometry, pattern: &ElementPattern, dir: &Direction) -> Self {
        let k = geom.phase_per_element();
        let cos_theta = dir.theta.cos();
        let sin_sin = dir.theta.sin() * dir.phi.sin();
        Self {
            row_phasor: (1..=geom.rows)
                .map(|m| Complex64::from_polar(1.0, k * geom.row_offset(m) * cos_theta))
                .collect(),
            col_phasor: (1..=geom.cols)
                .map(|n| Complex64::from_polar(1.0, k * geom.col_offset(n) * sin_sin))
                .collect(),
            element_gain: pattern.evaluate(dir),
        }
    }

    /// Phasor sum of pre-collapsed element coefficients toward this
    /// direction.
    pub(crate) fn field(&self, geom: &RisGeometry, phasors: &[Complex64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for m in 0..geom.rows {
            let row = self.row_phasor[m];
            for n in 0..geom.cols {
                sum += phasors[m * geom.cols + n] * row * self.col_phasor[n];
            }
        }
        sum * self.element_gain
    }
}

/// Complex field toward `dir` for an `M x N` grid of element states.
///
/// `states` is row-major, row 1 first. Row and column lattice phases are
/// tabulated once per call so the double loop costs one complex multiply
/// per element.
pub fn scattering_field(
    geom: &RisGeometry,
    states: &[ElementState],
    pattern: &ElementPattern,
    dir: &Direction,
) -> Result<Complex64, PatternError> {
    if states.len() != geom.element_count() {
        return Err(PatternError::ShapeMismatch {
            got: states.len(),
            want: geom.element_count(),
        });
    }
    let phasors = element_phasors(states);
    Ok(DirectionPhases::new(geom, pattern, dir).field(geom, &phasors))
}

/// Normalized gain in dB, `20 log10(|E| / |E|_max)`.
pub fn gain_db(magnitude: f64, reference: f64) -> Result<f64, PatternError> {
    if !(reference > 0.0) {
        return Err(PatternError::DegeneratePattern);
    }
    Ok(20.0 * (magnitude / reference).log10())
}

/// Azimuth cut at fixed pitch: magnitude and peak-normalized gain per
/// sample of `phi_axis`.
pub fn pattern_cut(
    geom: &RisGeometry,
    states: &[ElementState],
    pattern: &ElementPattern,
    theta: f64,
    phi_axis: &[f64],
) -> Result<PatternCut, PatternError> {
    if phi_axis.is_empty() || phi_axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PatternError::BadAxis);
    }
    if states.len() != geom.element_count() {
        return Err(PatternError::ShapeMismatch {
            got: states.len(),
            want: geom.element_count(),
        });
    }
    let phasors = element_phasors(states);
    let mut magnitude = Vec::with_capacity(phi_axis.len());
    for &phi in phi_axis {
        let phases = DirectionPhases::new(geom, pattern, &Direction::new(theta, phi));
        magnitude.push(phases.field(geom, &phasors).norm());
    }
    let reference = magnitude.iter().cloned().fold(0.0_f64, f64::max);
    if !(reference > 0.0) {
        return Err(PatternError::DegeneratePattern);
    }
    let gain = magnitude
        .iter()
        .map(|&m| 20.0 * (m / reference).log10())
        .collect();
    Ok(PatternCut {
        theta,
        phi_axis: phi_axis.to_vec(),
        magnitude,
        gain_db: gain,
    })
}

impl PatternCut {
    /// CSV rows `phi_deg,magnitude,gain_db`, with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi_deg,magnitude,gain_db\n");
        for i in 0..self.phi_axis.len() {
            out.push_str(&format!(
                "{:.4},{:.6},{:.6}\n",
                self.phi_axis[i].to_degrees(),
                self.magnitude[i],
                self.gain_db[i]
            ));
        }
        out
    }
}

/// Full pitch-by-azimuth pattern: one row of `|E|` and normalized gain per
/// pitch sample. The 0 dB reference is the grid-wide maximum, so a single
/// sample of `gain_db` is exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid {
    /// Pitch samples in radians, strictly increasing.
    pub theta_axis: Vec<f64>,
    /// Azimuth samples in radians, strictly increasing.
    pub phi_axis: Vec<f64>,
    /// `magnitude[ti][pi]` is `|E|` at `(theta_axis[ti], phi_axis[pi])`.
    pub magnitude: Vec<Vec<f64>>,
    pub gain_db: Vec<Vec<f64>>,
}

/// Evaluate the pattern over a full (pitch, azimuth) lattice.
pub fn pattern_grid(
    geom: &RisGeometry,
    states: &[ElementState],
    pattern: &ElementPattern,
    theta_axis: &[f64],
    phi_axis: &[f64],
) -> Result<PatternGrid, PatternError> {
    for axis in [theta_axis, phi_axis] {
        if axis.is_empty() || axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PatternError::BadAxis);
        }
    }
    if states.len() != geom.element_count() {
        return Err(PatternError::ShapeMismatch {
            got: states.len(),
            want: geom.element_count(),
        });
    }
    let phasors = element_phasors(states);
    let mut magnitude = Vec::with_capacity(theta_axis.len());
    let mut reference = 0.0_f64;
    for &theta in theta_axis {
        let mut row = Vec::with_capacity(phi_axis.len());
        for &phi in phi_axis {
            let phases = DirectionPhases::new(geom, pattern, &Direction::new(theta, phi));
            let mag = phases.field(geom, &phasors).norm();
            reference = reference.max(mag);
            row.push(mag);
        }
        magnitude.push(row);
    }
    if !(reference > 0.0) {
        return Err(PatternError::DegeneratePattern);
    }
    let gain_db = magnitude
        .iter()
        .map(|row| {
            row.iter()
                .map(|&m| 20.0 * (m / reference).log10())
                .collect()
        })
        .collect();
    Ok(PatternGrid {
        theta_axis: theta_axis.to_vec(),
        phi_axis: phi_axis.to_vec(),
        magnitude,
        gain_db,
    })
}

/// Peak direction and -3 dB width of a cut.
///
/// The peak is the argmax sample (ties toward smaller azimuth); the width
/// is the contiguous span around it where gain stays at or above -3 dB,
/// with the crossings interpolated linearly in dB. A span that reaches an
/// axis end is censored.
pub fn main_lobe(cut: &PatternCut) -> MainLobe {
    let g = &cut.gain_db;
    let mut peak_idx = 0;
    for (i, &v) in g.iter().enumerate() {
        if v > g[peak_idx] {
            peak_idx = i;
        }
    }
    let threshold = g[peak_idx] - 3.0;

    let mut right = peak_idx;
    while right + 1 < g.len() && g[right + 1] >= threshold {
        right += 1;
    }
    let mut left = peak_idx;
    while left > 0 && g[left - 1] >= threshold {
        left -= 1;
    }
    if right + 1 >= g.len() || left == 0 {
        return MainLobe {
            peak_direction: cut.phi_axis[peak_idx],
            half_power_width: None,
            censored: true,
        };
    }
    // linear-in-dB interpolation of the crossing on each side
    let right_phi = cut.phi_axis[right]
        + (g[right] - threshold) / (g[right] - g[right + 1])
            * (cut.phi_axis[right + 1] - cut.phi_axis[right]);
    let left_phi = cut.phi_axis[left]
        - (g[left] - threshold) / (g[left] - g[left - 1])
            * (cut.phi_axis[left] - cut.phi_axis[left - 1]);
    MainLobe {
        peak_direction: cut.phi_axis[peak_idx],
        half_power_width: Some(right_phi - left_phi),
        censored: false,
    }
}

/// Free-space path loss in dB as a positive loss, `-20 log10(lambda / 4 pi D)`.
pub fn fspl_db(wavelength: f64, distance: f64) -> Result<f64, PatternError> {
    if !(distance > 0.0) {
        return Err(PatternError::NonPositiveDistance(distance));
    }
    Ok(-20.0 * (wavelength / (4.0 * std::f64::consts::PI * distance)).log10())
}

/// Per-subcarrier received SNR in dB: the budget stack plus the panel gain
/// minus the path loss, shifted by the scenario calibration offset.
pub fn received_snr_db(budget: &LinkBudget, g_ris_db: f64, path_loss_db: f64) -> f64 {
    budget.tx_power_dbm
        + budget.tx_antenna_gain_db
        + budget.tx_link_gain_db
        + g_ris_db
        + budget.rx_antenna_gain_db
        + budget.rx_link_gain_db
        - path_loss_db
        + budget.snr_calibration_db
        - budget.noise_power_dbm
}

/// Aggregate capacity over `subcarriers` equal-SNR subcarriers in bits/s/Hz:
/// `K * log2(1 + snr)` for linear `snr`.
pub fn capacity_bps_hz(snr_linear: f64, subcarriers: usize) -> f64 {
    subcarriers as f64 * (1.0 + snr_linear).log2()
}

/// Convert dB to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

/// Uniform unit states: all amplitudes 1, all phases 0.
pub fn uniform_states(geom: &RisGeometry) -> Vec<ElementState> {
    vec![ElementState::phases(0.0, 0.0); geom.element_count()]
}
