//! Unit-sphere primitives: vectors, rotations, and uniform sampling on S^2.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Plain 3-vector. Not necessarily unit length.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

// Serialized as a bare [x, y, z] array, like UnitVector3.
impl Serialize for Vec3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y, self.z].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vec3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        Ok(Vec3::new(a[0], a[1], a[2]))
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(self) -> Result<UnitVector3> {
        UnitVector3::new(self.x, self.y, self.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A point on the unit sphere S^2: norm 1 within 1e-9 by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vec3);

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3(Vec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    });
    pub const Y: UnitVector3 = UnitVector3(Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    });
    pub const Z: UnitVector3 = UnitVector3(Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    });

    /// Normalize (x, y, z). Errors on non-finite input or near-zero norm.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("vector component"));
        }
        let n = (x * x + y * y + z * z).sqrt();
        if n < 1e-12 {
            return Err(Error::ZeroNorm(n));
        }
        Ok(UnitVector3(Vec3::new(x / n, y / n, z / n)))
    }

    pub fn from_vec3(v: Vec3) -> Result<Self> {
        Self::new(v.x, v.y, v.z)
    }

    pub fn x(self) -> f64 {
        self.0.x
    }

    pub fn y(self) -> f64 {
        self.0.y
    }

    pub fn z(self) -> f64 {
        self.0.z
    }

    pub fn as_vec3(self) -> Vec3 {
        self.0
    }

    pub fn dot(self, o: UnitVector3) -> f64 {
        self.0.dot(o.0)
    }

    pub fn cross(self, o: UnitVector3) -> Vec3 {
        self.0.cross(o.0)
    }

    pub fn scale(self, s: f64) -> Vec3 {
        self.0.scale(s)
    }



    /// Angle to another unit vector, in radians.
    pub fn angle_to(self, o: UnitVector3) -> f64 {
        self.dot(o).clamp(-1.0, 1.0).acos()
    }

    /// Deterministic orthonormal basis (e1, e2) of the plane perpendicular to
    /// `self`, built from the coordinate axis least aligned with `self`.
    pub fn orthonormal_basis(self) -> (UnitVector3, UnitVector3) {
        let axis = self.least_aligned_axis();
        let e1 = (axis.as_vec3() - self.scale(self.dot(axis)))
            .normalized()
            .expect("least-aligned axis cannot be parallel");
        let e2 = self
            .cross(e1)
            .normalized()
            .expect("cross of orthonormal pair is unit");
        (e1, e2)
    }

    /// The coordinate axis with the smallest |component| in `self`.
    /// Ties break toward x, then y.
    pub fn least_aligned_axis(self) -> UnitVector3 {
        let ax = self.0.x.abs();
        let ay = self.0.y.abs();
        let az = self.0.z.abs();
        if ax <= ay && ax <= az {
            UnitVector3::X
        } else if ay <= az {
            UnitVector3::Y
        } else {
            UnitVector3::Z
        }
    }
}

impl std::ops::Neg for UnitVector3 {
    type Output = UnitVector3;
    fn neg(self) -> UnitVector3 {
        UnitVector3(-self.0)
    }
}

// Serialized as a bare [x, y, z] array; deserialization re-normalizes.
impl Serialize for UnitVector3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.x, self.0.y, self.0.z].serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitVector3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        // keep already-unit input bit-exact (round trips); normalize otherwise
        let n2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
        if (n2 - 1.0).abs() < 1e-9 {
            return Ok(UnitVector3(Vec3::new(a[0], a[1], a[2])));
        }
        UnitVector3::new(a[0], a[1], a[2]).map_err(serde::de::Error::custom)
    }
}

/// Proper rotation matrix (row-major), R^T R = I, det R = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn from_rows(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    /// Rodrigues rotation about `axis` by `angle` radians.
    pub fn from_axis_angle(axis: UnitVector3, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let (x, y, z) = (axis.x(), axis.y(), axis.z());
        Self {
            m: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
        }
    }

    /// Build a rotation from three orthonormal columns.
    pub fn from_columns(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        Self {
            m: [
                [c0.x, c1.x, c2.x],
                [c0.y, c1.y, c2.y],
                [c0.z, c1.z, c2.z],
            ],
        }
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y + self.m[0][2] * v.z,
            self.m[1][0] * v.x + self.m[1][1] * v.y + self.m[1][2] * v.z,
            self.m[2][0] * v.x + self.m[2][1] * v.y + self.m[2][2] * v.z,
        )
    }

    /// Rotate a unit vector; the result is re-normalized to hold the
    /// unit invariant against rounding.
    pub fn apply_unit(&self, u: UnitVector3) -> UnitVector3 {
        self.apply(u.as_vec3())
            .normalized()
            .expect("rotation preserves norm")
    }

    pub fn compose(&self, other: &Rotation3) -> Rotation3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Rotation3 { m }
    }

    pub fn transpose(&self) -> Rotation3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[j][i];
            }
        }
        Rotation3 { m }
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Max absolute deviation of R^T R from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let rtr = self.transpose().compose(self);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((rtr.m[i][j] - target).abs());
            }
        }
        worst
    }
}

/// Rotation carrying `from` onto `to`.
///
/// Antipodal inputs get a pi rotation about a deterministically chosen
/// perpendicular axis (the coordinate axis least aligned with `from`,
/// projected into the perpendicular plane).
pub fn align_rotation(from: UnitVector3, to: UnitVector3) -> Rotation3 {
    let c = from.dot(to);
    if c > 1.0 - 1e-12 {
        return Rotation3::IDENTITY;
    }
    if c < -1.0 + 1e-12 {
        // pi rotation about a perpendicular axis: R = 2 a a^T - I
        let (a, _) = from.orthonormal_basis();
        let (x, y, z) = (a.x(), a.y(), a.z());
        return Rotation3::from_rows([
            [2.0 * x * x - 1.0, 2.0 * x * y, 2.0 * x * z],
            [2.0 * x * y, 2.0 * y * y - 1.0, 2.0 * y * z],
            [2.0 * x * z, 2.0 * y * z, 2.0 * z * z - 1.0],
        ]);
    }
    let v = from.cross(to);
    let k = 1.0 / (1.0 + c);
    // R = I + [v]_x + [v]_x^2 / (1 + c)
    Rotation3::from_rows([
        [
            1.0 - k * (v.y * v.y + v.z * v.z),
            k * v.x * v.y - v.z,
            k * v.x * v.z + v.y,
        ],
        [
            k * v.x * v.y + v.z,
            1.0 - k * (v.x * v.x + v.z * v.z),
            k * v.y * v.z - v.x,
        ],
        [
            k * v.x * v.z - v.y,
            k * v.y * v.z + v.x,
            1.0 - k * (v.x * v.x + v.y * v.y),
        ],
    ])
}

/// Uniform draw on the unit sphere (2 uniforms per sample).
pub fn uniform_sphere(rng: &mut RandomStream) -> UnitVector3 {
    let z = 2.0 * rng.next_f64() - 1.0;
    let phi = 2.0 * std::f64::consts::PI * rng.next_f64();
    let r = (1.0 - z * z).max(0.0).sqrt();
    UnitVector3::new(r * phi.cos(), r * phi.sin(), z).expect("construction is unit")
}
