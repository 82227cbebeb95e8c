//! Small 3-vector type used throughout the pipeline.
//!
//! Coordinate convention: x right, y up, z forward (viewing direction).
//! Serialized as a `[x, y, z]` array.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3 {
            x: a[0],
            y: a[1],
            z: a[2],
        }
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.x - o.x,
            y: self.y - o.y,
            z: self.z - o.z,
        }
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, c: f64) -> Vec3 {
        Vec3 {
            x: self.x * c,
            y: self.y * c,
            z: self.z * c,
        }
    }

    /// Unit vector in the same direction. Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 {
            Some(self.scale(1.0 / n))
        } else {
            None
        }
    }

    /// Angle to another vector in radians, in [0, pi].
    ///
    /// Uses atan2(|a x b|, a.b), which stays accurate for nearly parallel
    /// and nearly antiparallel vectors where acos loses precision.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }

    /// Rotate about a unit axis by `angle` radians (Rodrigues).
    pub fn rotate_about(self, axis: Vec3, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        let k = axis;
        self.scale(c) + k.cross(self).scale(s) + k.scale(k.dot(self) * (1.0 - c))
    }

    /// Direction from yaw/pitch in degrees. Yaw rotates about +y (positive =
    /// rightward), pitch tilts toward +y (positive = upward); (0, 0) is +z.
    pub fn from_yaw_pitch_deg(yaw_deg: f64, pitch_deg: f64) -> Vec3 {
        let yaw = yaw_deg.to_radians();
        let pitch = pitch_deg.to_radians();
        Vec3 {
            x: pitch.cos() * yaw.sin(),
            y: pitch.sin(),
            z: pitch.cos() * yaw.cos(),
        }
    }

    /// Yaw angle in degrees: rotation of the viewing direction about +y.
    pub fn yaw_deg(self) -> f64 {
        self.x.atan2(self.z).to_degrees()
    }

    /// Pitch angle in degrees: elevation above the x-z plane.
    pub fn pitch_deg(self) -> f64 {
        self.y.atan2((self.x * self.x + self.z * self.z).sqrt()).to_degrees()
    }
}
