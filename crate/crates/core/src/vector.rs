use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A direction in space. Components always satisfy `x² + y² + z² = 1` to
/// within `1e-12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

pub(crate) const NORM_TOLERANCE: f64 = 1e-12;

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVector3 = UnitVector3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVector3 = UnitVector3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts components that are already unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !n2.is_finite() || (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "({x}, {y}, {z}) is not a unit vector (|v|² = {n2})"
            )));
        }
        Ok(UnitVector3 { x, y, z })
    }

    /// Scales an arbitrary nonzero vector to unit length.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize ({x}, {y}, {z})"
            )));
        }
        Ok(UnitVector3 { x: x / n, y: y / n, z: z / n })
    }

    /// Polar angle `theta` from +z, azimuth `phi` from +x.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        UnitVector3 { x: st * cp, y: st * sp, z: ct }
    }

    /// A measurement direction in the x–y plane at `angle` radians from +x.
    pub fn in_plane(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        UnitVector3 { x: c, y: s, z: 0.0 }
    }

    pub fn in_plane_deg(degrees: f64) -> Self {
        Self::in_plane(degrees.to_radians())
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Unsigned angle to `other`, in `[0, π]`.
    pub fn angle_to(&self, other: &UnitVector3) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }
}

impl Neg for UnitVector3 {
    type Output = UnitVector3;

    fn neg(self) -> UnitVector3 {
        UnitVector3 { x: -self.x, y: -self.y, z: -self.z }
    }
}
