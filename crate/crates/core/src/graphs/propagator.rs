//! Propagator 1-forms on two-point configuration spaces.
//!
//! `Standard` is the real angle form on the upper half-plane, `Logarithmic`
//! its complex d-log variant, and `FourColoredLog` the quadrant propagator
//! with the extra absolute-value correction term. Values are returned as the
//! four components against `(d re z1, d im z1, d re z2, d im z2)`; the
//! Standard form has zero imaginary parts throughout.

use num::complex::Complex64;

use crate::error::{Error, Result};

/// Which propagator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagator {
    /// `(1/2pi) d arg((z1-z2)/(conj(z1)-z2))` on the closed upper half-plane.
    Standard,
    /// `(1/2pi i) d log((z1-z2)/(conj(z1)-z2))`, complex-valued.
    Logarithmic,
    /// The quadrant propagator: the d-log of the four-factor cross ratio
    /// minus twice the d-log of the modulus of its second factor pair.
    FourColoredLog,
}

impl std::str::FromStr for Propagator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "omega" => Ok(Propagator::Standard),
            "logarithmic" | "log" => Ok(Propagator::Logarithmic),
            "four-colored-log" | "4log" | "fourcoloredlog" => Ok(Propagator::FourColoredLog),
            other => Err(Error::Parse {
                at: 0,
                message: format!("unknown propagator '{other}'"),
            }),
        }
    }
}

/// Components of a complex-valued 1-form in the two points' real coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormComponents {
    pub dx1: Complex64,
    pub dy1: Complex64,
    pub dx2: Complex64,
    pub dy2: Complex64,
}

impl FormComponents {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        FormComponents {
            dx1: z,
            dy1: z,
            dx2: z,
            dy2: z,
        }
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.dx1, self.dy1, self.dx2, self.dy2]
    }

    /// Largest absolute value of any component.
    pub fn max_norm(&self) -> f64 {
        self.as_array()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Self {
        FormComponents {
            dx1: self.dx1 - other.dx1,
            dy1: self.dy1 - other.dy1,
            dx2: self.dx2 - other.dx2,
            dy2: self.dy2 - other.dy2,
        }
    }

    /// The pullback along the swap of the two points: components of the same
    /// form read with its arguments exchanged.
    pub fn swap_points(&self) -> Self {
        FormComponents {
            dx1: self.dx2,
            dy1: self.dy2,
            dx2: self.dx1,
            dy2: self.dy1,
        }
    }
}

const TINY: f64 = 1e-300;

fn checked_inv(d: Complex64, what: &str) -> Result<Complex64> {
    if d.norm_sqr() < TINY {
        return Err(Error::SingularConfiguration(format!(
            "vanishing denominator {what}"
        )));
    }
    Ok(d.inv())
}

fn in_closed_upper(z: Complex64) -> bool {
    z.im >= -1e-12
}

fn in_closed_quadrant(z: Complex64) -> bool {
    z.re >= -1e-12 && z.im >= -1e-12
}

/// Evaluates the propagator's four 1-form components at a configuration.
pub fn propagator_value(p: Propagator, z1: Complex64, z2: Complex64) -> Result<FormComponents> {
    match p {
        Propagator::Standard | Propagator::Logarithmic => {
            if !in_closed_upper(z1) || !in_closed_upper(z2) {
                return Err(Error::PropagatorDomain(format!(
                    "arguments must lie in the closed upper half-plane, got {z1}, {z2}"
                )));
            }
            let a = checked_inv(z1 - z2, "z1 - z2")?;
            let b = checked_inv(z1.conj() - z2, "conj(z1) - z2")?;
            let i = Complex64::new(0.0, 1.0);
            // d log q pieces: dz1: a, d conj(z1): -b, dz2: b - a
            let dx1 = a - b;
            let dy1 = i * (a + b);
            let dx2 = b - a;
            let dy2 = i * (b - a);
            match p {
                Propagator::Standard => {
                    let scale = 1.0 / (2.0 * std::f64::consts::PI);
                    Ok(FormComponents {
                        dx1: Complex64::new(dx1.im * scale, 0.0),
                        dy1: Complex64::new(dy1.im * scale, 0.0),
                        dx2: Complex64::new(dx2.im * scale, 0.0),
                        dy2: Complex64::new(dy2.im * scale, 0.0),
                    })
                }
                _ => {
                    // 1/(2 pi i) = -i/(2 pi)
                    let scale = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
                    Ok(FormComponents {
                        dx1: dx1 * scale,
                        dy1: dy1 * scale,
                        dx2: dx2 * scale,
                        dy2: dy2 * scale,
                    })
                }
            }
        }
        Propagator::FourColoredLog => {
            if !in_closed_quadrant(z1) || !in_closed_quadrant(z2) {
                return Err(Error::PropagatorDomain(format!(
                    "arguments must lie in the closed first quadrant, got {z1}, {z2}"
                )));
            }
            let a = checked_inv(z1 - z2, "z1 - z2")?;
            let b = checked_inv(z1.conj() - z2, "conj(z1) - z2")?;
            let c = checked_inv(z1.conj() + z2, "conj(z1) + z2")?;
            let d = checked_inv(z1 + z2, "z1 + z2")?;
            let i = Complex64::new(0.0, 1.0);
            // first piece: d log of the four-factor ratio
            let p_dx1 = (a - d) + (c - b);
            let p_dy1 = i * ((a - d) - (c - b));
            let p_dx2 = b - a + c - d;
            let p_dy2 = i * (b - a + c - d);
            // second piece: d log |(conj(z1)+z2)/(z1+z2)| as a real form
            let q_dx1 = (c - d).re;
            let q_dy1 = (c + d).im;
            let q_dx2 = (c - d).re;
            let q_dy2 = -(c - d).im;
            let s1 = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI)); // 1/(2 pi i)
            let s2 = Complex64::new(0.0, -1.0 / std::f64::consts::PI); // 1/(pi i)
            Ok(FormComponents {
                dx1: p_dx1 * s1 - q_dx1 * s2,
                dy1: p_dy1 * s1 - q_dy1 * s2,
                dx2: p_dx2 * s1 - q_dx2 * s2,
                dy2: p_dy2 * s1 - q_dy2 * s2,
            })
        }
    }
}

/// The swapped logarithmic propagator `sigma^*(omega_log)` at `(z1, z2)`:
/// the boundary limit of the quadrant propagator along one of the two axes.
pub fn log_swapped(z1: Complex64, z2: Complex64) -> Result<FormComponents> {
    Ok(propagator_value(Propagator::Logarithmic, z2, z1)?.swap_points())
}
