//! Pinhole camera rig and body ↔ image direction transforms.
//!
//! Body frame is forward-right-down. The default rig looks straight down with
//! body x along image u and body y along image v.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::vec2::Vec2;

pub type Mat3<T> = [[T; 3]; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CameraError {
    #[error("invalid intrinsics: {0}")]
    Intrinsics(&'static str),
    #[error("rotation is not a proper orthonormal matrix")]
    Rotation,
    #[error("degenerate direction: {0}")]
    Degenerate(&'static str),
}

/// Focal lengths, principal point and image size, all in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: T,
    pub height: T,
}

impl<T: Scalar> Intrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: T, height: T) -> Result<Self, CameraError> {
        let k = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), CameraError> {
        if !(self.fx > T::zero() && self.fy > T::zero() && self.fx.is_finite() && self.fy.is_finite()) {
            return Err(CameraError::Intrinsics("focal lengths must be positive"));
        }
        if !(self.width > T::zero() && self.height > T::zero()) {
            return Err(CameraError::Intrinsics("image size must be positive"));
        }
        if !self.contains(self.optical_center()) {
            return Err(CameraError::Intrinsics("principal point outside the image"));
        }
        Ok(())
    }

    /// Optical center `p_o = (cx, cy)`.
    pub fn optical_center(&self) -> Vec2<T> {
        Vec2::new(self.cx, self.cy)
    }

    pub fn contains(&self, p: Vec2<T>) -> bool {
        p.x >= T::zero() && p.x < self.width && p.y >= T::zero() && p.y < self.height
    }

    pub fn matrix(&self) -> Mat3<T> {
        let (o, z) = (T::one(), T::zero());
        [[self.fx, z, self.cx], [z, self.fy, self.cy], [z, z, o]]
    }

    /// Horizontal field of view in radians.
    pub fn horizontal_fov(&self) -> T {
        T::lit(2.0) * (self.width / (T::lit(2.0) * self.fx)).atan()
    }
}

impl<T: Scalar> Default for Intrinsics<T> {
    /// 720×480 image, `fx = fy = 300`, principal point at the image center.
    fn default() -> Self {
        Self {
            fx: T::lit(300.0),
            fy: T::lit(300.0),
            cx: T::lit(360.0),
            cy: T::lit(240.0),
            width: T::lit(720.0),
            height: T::lit(480.0),
        }
    }
}

/// Rotation and translation from body to camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyToImage<T> {
    pub rotation: Mat3<T>,
    /// Meters.
    pub translation: [T; 3],
}

impl<T: Scalar> BodyToImage<T> {
    pub fn new(rotation: Mat3<T>, translation: [T; 3]) -> Result<Self, CameraError> {
        let tol = T::lit(1e-9);
        let rt_r = mat_mul(&transpose(&rotation), &rotation);
        for (i, row) in rt_r.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                let expected = if i == j { T::one() } else { T::zero() };
                if !((value - expected).abs() <= tol) {
                    return Err(CameraError::Rotation);
                }
            }
        }
        if !((det(&rotation) - T::one()).abs() <= tol) {
            return Err(CameraError::Rotation);
        }
        Ok(Self { rotation, translation })
    }

    /// Downward camera aligned with the body axes, no offset.
    pub fn downward() -> Self {
        Self {
            rotation: identity(),
            translation: [T::zero(); 3],
        }
    }

    pub fn apply(&self, body: [T; 3]) -> [T; 3] {
        let r = mat_vec(&self.rotation, body);
        [r[0] + self.translation[0], r[1] + self.translation[1], r[2] + self.translation[2]]
    }
}

impl<T: Scalar> Default for BodyToImage<T> {
    fn default() -> Self {
        Self::downward()
    }
}

/// Planar body velocity `(vx, vy, 0)` in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyVelocity<T> {
    pub vx: T,
    pub vy: T,
}

impl<T: Scalar> BodyVelocity<T> {
    pub fn new(vx: T, vy: T) -> Self {
        Self { vx, vy }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn as_vec(self) -> Vec2<T> {
        Vec2::new(self.vx, self.vy)
    }

    pub fn from_vec(v: Vec2<T>) -> Self {
        Self::new(v.x, v.y)
    }

    pub fn speed(self) -> T {
        self.as_vec().norm()
    }
}

/// Vehicle pose on the ground plane: position in meters, yaw in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPose<T> {
    pub position: Vec2<T>,
    pub yaw: T,
}

impl<T: Scalar> PlanarPose<T> {
    pub fn at(position: Vec2<T>) -> Self {
        Self {
            position,
            yaw: T::zero(),
        }
    }

    pub fn world_to_body(&self, world: Vec2<T>) -> Vec2<T> {
        (world - self.position).rotated(-self.yaw)
    }

    pub fn body_to_world_dir(&self, body: Vec2<T>) -> Vec2<T> {
        body.rotated(self.yaw)
    }

    pub fn world_to_body_dir(&self, world: Vec2<T>) -> Vec2<T> {
        world.rotated(-self.yaw)
    }
}

/// Intrinsics plus the body-to-camera transform, `T = K[R|t]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraRig<T> {
    pub intrinsics: Intrinsics<T>,
    pub extrinsics: BodyToImage<T>,
}

impl<T: Scalar> Default for CameraRig<T> {
    fn default() -> Self {
        Self {
            intrinsics: Intrinsics::default(),
            extrinsics: BodyToImage::downward(),
        }
    }
}

impl<T: Scalar> CameraRig<T> {
    pub fn new(intrinsics: Intrinsics<T>, extrinsics: BodyToImage<T>) -> Result<Self, CameraError> {
        intrinsics.validate()?;
        BodyToImage::new(extrinsics.rotation, extrinsics.translation)?;
        Ok(Self { intrinsics, extrinsics })
    }

    pub fn optical_center(&self) -> Vec2<T> {
        self.intrinsics.optical_center()
    }

    /// The 3×4 matrix `K[R|t]`.
    pub fn projection_matrix(&self) -> [[T; 4]; 3] {
        let kr = mat_mul(&self.intrinsics.matrix(), &self.extrinsics.rotation);
        let kt = mat_vec(&self.intrinsics.matrix(), self.extrinsics.translation);
        let mut p = [[T::zero(); 4]; 3];
        for i in 0..3 {
            p[i][..3].copy_from_slice(&kr[i]);
            p[i][3] = kt[i];
        }
        p
    }

    /// Image-plane direction of a body velocity. The homogeneous form has a
    /// zero last coordinate, so the translation drops out. The result is
    /// unnormalized.
    pub fn project_direction(&self, v: BodyVelocity<T>) -> Result<Vec2<T>, CameraError> {
        if !(v.speed() > T::zero()) {
            return Err(CameraError::Degenerate("zero body velocity"));
        }
        let p = self.projection_matrix();
        let h: Vec<T> = p.iter().map(|row| row[0] * v.vx + row[1] * v.vy).collect();
        // displacement relative to the principal point
        let dir = Vec2::new(h[0] - self.intrinsics.cx * h[2], h[1] - self.intrinsics.cy * h[2]);
        if !(dir.norm() > T::zero()) {
            return Err(CameraError::Degenerate("velocity along the optical axis"));
        }
        Ok(dir)
    }

    /// Unit planar body direction whose projection is parallel to `v_img`.
    pub fn lift_direction(&self, v_img: Vec2<T>) -> Result<BodyVelocity<T>, CameraError> {
        if !(v_img.norm() > T::zero()) || !v_img.is_finite() {
            return Err(CameraError::Degenerate("zero image direction"));
        }
        let col_x = self.project_direction(BodyVelocity::new(T::one(), T::zero()))?;
        let col_y = self.project_direction(BodyVelocity::new(T::zero(), T::one()))?;
        let d = col_x.cross(col_y);
        let scale = col_x.norm() * col_y.norm();
        if !(d.abs() > T::lit(1e-12) * scale) {
            return Err(CameraError::Degenerate("restricted map is singular"));
        }
        let w = Vec2::new(v_img.cross(col_y) / d, col_x.cross(v_img) / d);
        let w = w.normalized().ok_or(CameraError::Degenerate("direction lifts to zero"))?;
        Ok(BodyVelocity::from_vec(w))
    }

    /// Pixel of a ground point seen from `pose` at `height` meters, `None`
    /// when it falls behind the camera or outside the image.
    pub fn project_point(&self, world_point: Vec2<T>, pose: &PlanarPose<T>, height: T) -> Option<Vec2<T>> {
        let b = pose.world_to_body(world_point);
        let c = self.extrinsics.apply([b.x, b.y, height]);
        if !(c[2] > T::zero()) {
            return None;
        }
        let k = &self.intrinsics;
        let pixel = Vec2::new(k.fx * c[0] / c[2] + k.cx, k.fy * c[1] / c[2] + k.cy);
        k.contains(pixel).then_some(pixel)
    }

    /// Intersects the ray through `pixel` with the ground plane.
    pub fn ground_point(&self, pixel: Vec2<T>, pose: &PlanarPose<T>, height: T) -> Option<Vec2<T>> {
        let k = &self.intrinsics;
        let ray_cam = [(pixel.x - k.cx) / k.fx, (pixel.y - k.cy) / k.fy, T::one()];
        let rt = transpose(&self.extrinsics.rotation);
        let ray_body = mat_vec(&rt, ray_cam);
        let t_body = mat_vec(&rt, self.extrinsics.translation);
        // body point = depth·ray_body − Rᵀt, with z = height
        if !(ray_body[2] > T::zero()) {
            return None;
        }
        let depth = (height + t_body[2]) / ray_body[2];
        if !(depth > T::zero()) {
            return None;
        }
        let body = Vec2::new(depth * ray_body[0] - t_body[0], depth * ray_body[1] - t_body[1]);
        Some(pose.position + pose.body_to_world_dir(body))
    }
}

pub fn identity<T: Scalar>() -> Mat3<T> {
    let (o, z) = (T::one(), T::zero());
    [[o, z, z], [z, o, z], [z, z, o]]
}

pub fn transpose<T: Scalar>(m: &Mat3<T>) -> Mat3<T> {
    let mut t = *m;
    for (i, row) in m.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            t[j][i] = value;
        }
    }
    t
}

pub fn mat_mul<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    out
}

pub fn mat_vec<T: Scalar>(m: &Mat3<T>, v: [T; 3]) -> [T; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn det<T: Scalar>(m: &Mat3<T>) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Rotation about the camera optical axis (body z) by `angle` radians.
pub fn rotation_about_z<T: Scalar>(angle: T) -> Mat3<T> {
    let (s, c) = angle.sin_cos();
    let (o, z) = (T::one(), T::zero());
    [[c, -s, z], [s, c, z], [z, z, o]]
}
