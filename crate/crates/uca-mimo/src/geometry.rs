//! Array geometry: antenna placement and inter-antenna path lengths.
//!
//! Both arrays are uniform circular arrays (UCAs) lying in parallel planes.
//! The transmit UCA of radius `r_tx` is centered at the origin in the z = 0
//! plane; antenna `n` (1-based) sits at polar angle
//! `psi_n = 2*pi*(n-1)/N + alpha_tx`. The receive UCA of radius `r_rx` is
//! centered at `d * (sin(phi)cos(theta), sin(phi)sin(theta), cos(phi))`,
//! where `phi` is the tilt of the center-to-center line away from the array
//! normal and `theta` its azimuth; antenna `m` sits at angle
//! `phi_m = 2*pi*(m-1)/M + alpha_rx` in the receive plane.
//!
//! Around the mean path length `D = sqrt(d^2 + r_tx^2 + r_rx^2)`, the exact
//! distance admits the first-order expansion
//!
//! ```text
//! d_mn ~ D + [ d*r_rx*sin(phi)*cos(phi_m - theta)
//!            - d*r_tx*sin(phi)*cos(psi_n - theta)
//!            - r_tx*r_rx*cos(psi_n - phi_m) ] / D
//! ```
//!
//! whose three terms separate per receive antenna, per transmit antenna, and
//! per index difference. This separation is what the compensation beamformers
//! in [`crate::channel`] exploit.

use crate::{Error, Result};

/// Complete geometric and physical description of one UCA-to-UCA link.
///
/// Angles are radians, lengths are meters. Antenna indices in this crate are
/// 1-based to match the `(n-1)`, `(m-1)` phase conventions above.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    /// Number of transmit antennas N.
    pub n_tx: usize,
    /// Number of receive antennas M.
    pub n_rx: usize,
    /// Transmit UCA radius r.
    pub r_tx: f64,
    /// Receive UCA radius R.
    pub r_rx: f64,
    /// Distance between the UCA centers d.
    pub d_centers: f64,
    /// Azimuth of the center-to-center line projected onto the transmit plane.
    pub theta: f64,
    /// Polar tilt of the center-to-center line away from the transmit normal.
    pub phi: f64,
    /// Phase offset of the first transmit antenna.
    pub alpha_tx: f64,
    /// Phase offset of the first receive antenna.
    pub alpha_rx: f64,
    /// Carrier wavelength lambda.
    pub wavelength: f64,
    /// Dimensionless channel amplitude constant beta.
    pub beta: f64,
}

impl LinkConfig {
    /// Reference link used throughout the published evaluation:
    /// beta = 4*pi, alpha_tx = alpha_rx = 0, theta = 0, phi = pi/6,
    /// lambda = 0.01 m, r = R = 0.1 m, d = 4 m.
    pub fn reference_link(n_antennas: usize) -> Self {
        LinkConfig {
            n_tx: n_antennas,
            n_rx: n_antennas,
            r_tx: 0.1,
            r_rx: 0.1,
            d_centers: 4.0,
            theta: 0.0,
            phi: std::f64::consts::FRAC_PI_6,
            alpha_tx: 0.0,
            alpha_rx: 0.0,
            wavelength: 0.01,
            beta: 4.0 * std::f64::consts::PI,
        }
    }

    /// Aligned (coaxial) link: phi = 0, equal radii, equal antenna counts,
    /// zero phase offsets. Used by the antenna-spacing search.
    pub fn coaxial(n_antennas: usize, radius: f64, d_centers: f64, wavelength: f64) -> Self {
        LinkConfig {
            n_tx: n_antennas,
            n_rx: n_antennas,
            r_tx: radius,
            r_rx: radius,
            d_centers,
            theta: 0.0,
            phi: 0.0,
            alpha_tx: 0.0,
            alpha_rx: 0.0,
            wavelength,
            beta: 4.0 * std::f64::consts::PI,
        }
    }

    /// Check every field invariant, naming the offending field on failure.
    pub fn validate(&self) -> Result<()> {
        fn err(field: &'static str, reason: impl Into<String>) -> Error {
            Error::InvalidConfig {
                field,
                reason: reason.into(),
            }
        }
        let positive = [
            ("r_tx", self.r_tx),
            ("r_rx", self.r_rx),
            ("d_centers", self.d_centers),
            ("wavelength", self.wavelength),
            ("beta", self.beta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(err(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if self.n_tx < 1 {
            return Err(err("n_tx", "must be >= 1"));
        }
        if self.n_rx < 1 {
            return Err(err("n_rx", "must be >= 1"));
        }
        if !(self.phi >= 0.0 && self.phi < std::f64::consts::FRAC_PI_2) {
            return Err(err(
                "phi",
                format!("must lie in [0, pi/2), got {}", self.phi),
            ));
        }
        let full_turn = [
            ("theta", self.theta),
            ("alpha_tx", self.alpha_tx),
            ("alpha_rx", self.alpha_rx),
        ];
        for (name, v) in full_turn {
            if !(v.is_finite() && (0.0..2.0 * std::f64::consts::PI).contains(&v)) {
                return Err(err(name, format!("must lie in [0, 2*pi), got {v}")));
            }
        }
        // Far-field sanity: the first-order expansion degrades once the
        // arrays approach each other.
        if self.d_centers <= self.r_tx + self.r_rx {
            return Err(err(
                "d_centers",
                format!(
                    "must exceed r_tx + r_rx = {} for far-field validity, got {}",
                    self.r_tx + self.r_rx,
                    self.d_centers
                ),
            ));
        }
        Ok(())
    }

    /// Polar angle of transmit antenna `n` (1-based).
    pub(crate) fn tx_angle(&self, n: usize) -> f64 {
        2.0 * std::f64::consts::PI * (n - 1) as f64 / self.n_tx as f64 + self.alpha_tx
    }

    /// Polar angle of receive antenna `m` (1-based) in the receive plane.
    pub(crate) fn rx_angle(&self, m: usize) -> f64 {
        2.0 * std::f64::consts::PI * (m - 1) as f64 / self.n_rx as f64 + self.alpha_rx
    }

    pub(crate) fn check_indices(&self, m: usize, n: usize) -> Result<()> {
        if m < 1 || m > self.n_rx || n < 1 || n > self.n_tx {
            return Err(Error::IndexOutOfRange {
                m,
                n,
                n_rx: self.n_rx,
                n_tx: self.n_tx,
            });
        }
        Ok(())
    }
}

/// Which UCA of the link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Transmit,
    Receive,
}

/// A point in 3-D space, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub fn distance_to(&self, other: &Position3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Center of the receive UCA.
pub fn receive_center(cfg: &LinkConfig) -> Position3 {
    let (sp, cp) = cfg.phi.sin_cos();
    let (st, ct) = cfg.theta.sin_cos();
    Position3 {
        x: cfg.d_centers * sp * ct,
        y: cfg.d_centers * sp * st,
        z: cfg.d_centers * cp,
    }
}

/// Positions of all antennas on one side, in antenna order (1-based index
/// `i` maps to element `i - 1`).
pub fn antenna_positions(cfg: &LinkConfig, side: Side) -> Result<Vec<Position3>> {
    cfg.validate()?;
    Ok(match side {
        Side::Transmit => (1..=cfg.n_tx)
            .map(|n| {
                let a = cfg.tx_angle(n);
                Position3 {
                    x: cfg.r_tx * a.cos(),
                    y: cfg.r_tx * a.sin(),
                    z: 0.0,
                }
            })
            .collect(),
        Side::Receive => {
            let c = receive_center(cfg);
            (1..=cfg.n_rx)
                .map(|m| {
                    let a = cfg.rx_angle(m);
                    Position3 {
                        x: c.x + cfg.r_rx * a.cos(),
                        y: c.y + cfg.r_rx * a.sin(),
                        z: c.z,
                    }
                })
                .collect()
        }
    })
}

/// Exact Euclidean distance from transmit antenna `n` to receive antenna `m`
/// (both 1-based).
pub fn exact_distance(cfg: &LinkConfig, m: usize, n: usize) -> Result<f64> {
    cfg.check_indices(m, n)?;
    let c = receive_center(cfg);
    let pa = cfg.rx_angle(m);
    let ta = cfg.tx_angle(n);
    let dx = c.x + cfg.r_rx * pa.cos() - cfg.r_tx * ta.cos();
    let dy = c.y + cfg.r_rx * pa.sin() - cfg.r_tx * ta.sin();
    let dz = c.z;
    Ok((dx * dx + dy * dy + dz * dz).sqrt())
}

/// Mean path length D = sqrt(d^2 + r^2 + R^2), the expansion point of the
/// first-order distance model and the denominator of the beamformer phases.
pub fn reference_distance(cfg: &LinkConfig) -> f64 {
    (cfg.d_centers * cfg.d_centers + cfg.r_tx * cfg.r_tx + cfg.r_rx * cfg.r_rx).sqrt()
}

/// First-order expansion of [`exact_distance`] about [`reference_distance`].
pub fn taylor_distance(cfg: &LinkConfig, m: usize, n: usize) -> Result<f64> {
    cfg.check_indices(m, n)?;
    let big_d = reference_distance(cfg);
    let psi = cfg.tx_angle(n);
    let phi_m = cfg.rx_angle(m);
    let sp = cfg.phi.sin();
    let cross = cfg.d_centers * cfg.r_rx * sp * (phi_m - cfg.theta).cos()
        - cfg.d_centers * cfg.r_tx * sp * (psi - cfg.theta).cos()
        - cfg.r_tx * cfg.r_rx * (psi - phi_m).cos();
    Ok(big_d + cross / big_d)
}

/// Chord length between two neighboring antennas of a UCA:
/// `2 * radius * sin(pi / count)`.
pub fn neighbor_spacing(radius: f64, count: usize) -> Result<f64> {
    if count < 2 {
        return Err(Error::InvalidConfig {
            field: "count",
            reason: format!("neighbor spacing needs at least 2 antennas, got {count}"),
        });
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidConfig {
            field: "radius",
            reason: format!("must be finite and > 0, got {radius}"),
        });
    }
    Ok(2.0 * radius * (std::f64::consts::PI / count as f64).sin())
}
