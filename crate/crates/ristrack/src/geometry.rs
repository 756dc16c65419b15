//! Surface-centered coordinate frame, angle conventions, and conversions
//! between 3-D positions and (pitch, azimuth) directions.
//!
//! The frame is anchored at the panel center: `z` points outward along
//! boresight, `y` runs up the row axis, `x` runs along the column axis.
//! Pitch `theta` is measured from the +y axis, azimuth `phi` in the x-z
//! plane from +z. Angles are radians everywhere inside the library;
//! degrees are accepted only at the CLI boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default operating frequency in Hz.
pub const DEFAULT_FREQ_HZ: f64 = 5.4e9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("position at the frame origin has no direction")]
    Origin,
    #[error("position is behind the panel (z = {z} <= 0)")]
    OutOfField { z: f64 },
    #[error("range must be positive, got {0}")]
    NonPositiveRange(f64),
    #[error("invalid array geometry: {0}")]
    InvalidGeometry(String),
}

/// Pitch/azimuth pair in the panel frame.
///
/// `theta` is the pitch angle from the +y axis in `[0, pi]`; `phi` is the
/// azimuth in the x-z plane from +z boresight in `[-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Self {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// Unit vector in the panel frame (x, y, z components).
    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
            self.theta.sin() * self.phi.cos(),
        ]
    }

    /// Great-circle angle to another direction, in radians.
    pub fn angular_distance(&self, other: &Direction) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// 3-D point in meters in the panel frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Physical aperture: `rows x cols` elements on a rectangular lattice.
///
/// Rows run along the y axis (row 1 at the top), columns along x. The
/// default build is a 20x20 panel at quarter-wavelength spacing, 5.4 GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisGeometry {
    /// Number of rows (M >= 1).
    pub rows: usize,
    /// Number of columns (N >= 1).
    pub cols: usize,
    /// Element spacing in meters (d > 0).
    pub spacing: f64,
    /// Operating wavelength in meters (> 0).
    pub wavelength: f64,
}

impl RisGeometry {
    pub fn new(
        rows: usize,
        cols: usize,
        spacing: f64,
        wavelength: f64,
    ) -> Result<Self, GeometryError> {
        if rows < 1 || cols < 1 {
            return Err(GeometryError::InvalidGeometry(format!(
                "array must have at least one row and column, got {rows}x{cols}"
            )));
        }
        if !(spacing > 0.0) || !(wavelength > 0.0) {
            return Err(GeometryError::InvalidGeometry(format!(
                "spacing and wavelength must be positive, got d={spacing}, lambda={wavelength}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            spacing,
            wavelength,
        })
    }

    /// 20x20 panel, quarter-wavelength spacing, 5.4 GHz.
    pub fn default_panel() -> Self {
        let wavelength = SPEED_OF_LIGHT / DEFAULT_FREQ_HZ;
        Self {
            rows: 20,
            cols: 20,
            spacing: wavelength / 4.0,
            wavelength,
        }
    }

    pub fn element_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Row offset `(M+1)/2 - m` in element units for 1-based row index `m`.
    pub fn row_offset(&self, m: usize) -> f64 {
        (self.rows as f64 + 1.0) / 2.0 - m as f64
    }

    /// Column offset `n - (1+N)/2` in element units for 1-based column index `n`.
    pub fn col_offset(&self, n: usize) -> f64 {
        n as f64 - (1.0 + self.cols as f64) / 2.0
    }

    /// Free-space wavenumber times spacing, `2*pi*d/lambda`.
    pub fn phase_per_element(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.spacing / self.wavelength
    }
}

/// Direction of a position seen from the panel center.
///
/// Pitch uses the two-branch arctan form (branch on the sign of y); on the
/// equator y = 0 both branches limit to pi/2 and that value is returned.
/// Azimuth is `atan(x/z)`, independent of y. Points strictly behind the
/// panel (z < 0) are out of field; on the panel plane itself the azimuth
/// is the +-pi/2 boundary, and on the vertical axis it is 0 by the pole
/// convention.
pub fn direction_from_position(p: &Position) -> Result<Direction, GeometryError> {
    if p.x == 0.0 && p.y == 0.0 && p.z == 0.0 {
        return Err(GeometryError::Origin);
    }
    if p.z < 0.0 {
        return Err(GeometryError::OutOfField { z: p.z });
    }
    let horiz = (p.x * p.x + p.z * p.z).sqrt();
    let theta = if p.y > 0.0 {
        (horiz / p.y).atan()
    } else if p.y < 0.0 {
        std::f64::consts::PI + (horiz / p.y).atan()
    } else {
        std::f64::consts::FRAC_PI_2
    };
    // normalize -0.0 so the edge-on azimuth keeps the sign of x
    let z = if p.z == 0.0 { 0.0 } else { p.z };
    let phi = if p.x == 0.0 && z == 0.0 {
        0.0
    } else {
        (p.x / z).atan()
    };
    Ok(Direction::new(theta, phi))
}

/// Point at the given range along a direction; inverse of
/// [`direction_from_position`] for in-field directions.
pub fn position_from_direction(dir: &Direction, range: f64) -> Result<Position, GeometryError> {
    if !(range > 0.0) {
        return Err(GeometryError::NonPositiveRange(range));
    }
    Ok(Position::new(
        range * dir.theta.sin() * dir.phi.sin(),
        range * dir.theta.cos(),
        range * dir.theta.sin() * dir.phi.cos(),
    ))
}

/// Wrap an angle to `[-pi, pi)`.
pub fn wrap_phase(a: f64) -> f64 {
    use std::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let mut w = (a + PI).rem_euclid(two_pi) - PI;
    // rem_euclid may round onto +pi for inputs a hair below an odd multiple
    if w >= PI {
        w -= two_pi;
    }
    w
}
