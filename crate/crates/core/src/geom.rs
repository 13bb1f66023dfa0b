//! Geometry and numeric primitives shared by the solver stages.
//!
//! Rotations are plain `nalgebra::Rotation3<f64>` matrices. Headings follow
//! the fused-angle convention: any rotation `R` whose tilt is below π splits
//! uniquely into `R = Rz(ψ) · T`, where `T` is a rotation about a horizontal
//! axis and `ψ` is the fused yaw.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Rotation = Rotation3<f64>;

/// Unit-norm tolerance for direction inputs.
pub const UNIT_TOL: f64 = 1e-9;
/// Slack used for point-in-region membership.
pub const CONTAIN_TOL: f64 = 1e-12;

/// Axis-angle rotation matrix, `I + sin(θ)K + (1 − cos(θ))K²`.
///
/// The axis is assumed to be unit length; no normalization is performed.
pub fn rodrigues(axis: &Vec3, angle: f64) -> Rotation {
    let k = axis.cross_matrix();
    let (s, c) = angle.sin_cos();
    Rotation::from_matrix_unchecked(Matrix3::identity() + k * s + k * k * (1.0 - c))
}

/// Pure rotation about the global z-axis.
pub fn yaw_rotation(yaw: f64) -> Rotation {
    rodrigues(&Vec3::z(), yaw)
}

fn check_unit(v: &Vec3, what: &str) -> Result<()> {
    if (v.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!(
            "{what} must be a unit vector (norm {})",
            v.norm()
        )));
    }
    Ok(())
}

/// Smallest rotation taking `+z` to the unit vector `v`.
fn tilt_to(v: &Vec3) -> Result<Rotation> {
    // axis = z × v
    let axis = Vec3::new(-v.y, v.x, 0.0);
    let s = axis.norm();
    let c = v.z;
    if s == 0.0 {
        if c > 0.0 {
            return Ok(Rotation::identity());
        }
        return Err(Error::Degenerate(
            "tilt of π requested: heading is undefined".into(),
        ));
    }
    Ok(rodrigues(&(axis / s), s.atan2(c)))
}

/// Rotation whose z-axis is `z_des` and whose fused yaw is `yaw`.
pub fn rotation_from_z_and_yaw(z_des: &Vec3, yaw: f64) -> Result<Rotation> {
    check_unit(z_des, "z-axis")?;
    let z = z_des.normalize();
    let local = yaw_rotation(-yaw) * z;
    Ok(yaw_rotation(yaw) * tilt_to(&local)?)
}

/// Fused yaw of a rotation, in (−π, π].
pub fn fused_yaw(r: &Rotation) -> f64 {
    let q = UnitQuaternion::from_rotation_matrix(r);
    wrap_angle(2.0 * q.k.atan2(q.w))
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = a % two_pi;
    if w <= -std::f64::consts::PI {
        w += two_pi;
    } else if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Intersection of two equal-radius balls.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BallPairRegion {
    pub center_left: Vec3,
    pub center_right: Vec3,
    pub radius: f64,
}

impl BallPairRegion {
    pub fn new(center_left: Vec3, center_right: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::out_of_range("r_l", radius, "> 0"));
        }
        Ok(Self {
            center_left,
            center_right,
            radius,
        })
    }

    pub fn is_empty(&self) -> bool {
        (self.center_left - self.center_right).norm() > 2.0 * self.radius
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let r = self.radius + CONTAIN_TOL;
        (p - self.center_left).norm() <= r && (p - self.center_right).norm() <= r
    }

    fn centers(&self) -> [Vec3; 2] {
        [self.center_left, self.center_right]
    }

    /// Parameter interval `[t0, t1]` of the line `origin + t·dir` inside the
    /// region, or `None` when the line misses it. `dir` must be unit length.
    pub fn line_interval(&self, origin: &Vec3, dir: &Vec3) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for c in self.centers() {
            let oc = origin - c;
            let b = dir.dot(&oc);
            let disc = b * b - (oc.norm_squared() - self.radius * self.radius);
            if disc < 0.0 {
                return None;
            }
            let root = disc.sqrt();
            lo = lo.max(-b - root);
            hi = hi.min(-b + root);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Point where the ray `origin + t·dir, t ≥ 0` leaves the region.
    pub fn ray_exit(&self, origin: &Vec3, dir: &Vec3) -> Result<Vec3> {
        if self.is_empty() {
            return Err(Error::Infeasible("lower mass region is empty".into()));
        }
        if !self.contains(origin) {
            return Err(Error::InvalidInput("ray origin lies outside the region".into()));
        }
        check_unit(dir, "ray direction")?;
        let mut t_exit = f64::INFINITY;
        for c in self.centers() {
            let oc = origin - c;
            let b = dir.dot(&oc);
            // origin is inside, so the discriminant is non-negative up to rounding
            let disc = (b * b - (oc.norm_squared() - self.radius * self.radius)).max(0.0);
            t_exit = t_exit.min(-b + disc.sqrt());
        }
        Ok(origin + dir * t_exit.max(0.0))
    }
}

/// `region_contains` in free-function form.
pub fn region_contains(region: &BallPairRegion, p: &Vec3) -> bool {
    region.contains(p)
}

/// `ray_region_exit` in free-function form.
pub fn ray_region_exit(region: &BallPairRegion, origin: &Vec3, dir: &Vec3) -> Result<Vec3> {
    region.ray_exit(origin, dir)
}

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Regula falsi with the Illinois modification.
///
/// Succeeds once `|f(x)| < tol`. An endpoint that already meets the
/// tolerance is returned with zero iterations. Each iteration costs exactly
/// one evaluation of `f`.
pub fn regula_falsi<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    regula_falsi_bracketed(f, (lo, f_lo), (hi, f_hi), tol, max_iter)
}

/// [`regula_falsi`] for a bracket whose end values are already known.
pub fn regula_falsi_bracketed<F>(
    mut f: F,
    (lo, f_lo): (f64, f64),
    (hi, f_hi): (f64, f64),
    tol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::out_of_range("tol", tol, "> 0"));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f_lo, f_hi);
    if fa.abs() < tol {
        return Ok(Root { x: a, residual: fa, iterations: 0 });
    }
    if fb.abs() < tol {
        return Ok(Root { x: b, residual: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }

    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    // which endpoint was replaced last: -1 = b, +1 = a
    let mut side = 0i8;
    for iteration in 1..=max_iter {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c)?;
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.abs() < tol {
            return Ok(Root { x: c, residual: fc, iterations: iteration });
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence {
        best: best.0,
        residual: best.1,
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_rot_eq(a: &Rotation, b: &Rotation, tol: f64) {
        assert!((a.matrix() - b.matrix()).abs().max() <= tol, "{a}\n!=\n{b}");
    }

    #[test]
    fn z_and_yaw_identity_cases() {
        let r = rotation_from_z_and_yaw(&Vec3::z(), 0.0).unwrap();
        assert_rot_eq(&r, &Rotation::identity(), 1e-15);
        let r = rotation_from_z_and_yaw(&Vec3::z(), FRAC_PI_2).unwrap();
        assert_rot_eq(&r, &Rotation::from_axis_angle(&Vec3::z_axis(), FRAC_PI_2), 1e-15);
    }

    #[test]
    fn z_along_x_is_a_pitch_about_y() {
        let r = rotation_from_z_and_yaw(&Vec3::x(), 0.0).unwrap();
        let oracle = Rotation::from_axis_angle(&Vec3::y_axis(), FRAC_PI_2);
        assert_rot_eq(&r, &oracle, 1e-15);
        assert!((r * Vec3::z() - Vec3::x()).norm() < 1e-15);
    }

    #[test]
    fn z_down_is_rejected() {
        assert!(rotation_from_z_and_yaw(&(-Vec3::z()), 0.3).is_err());
        assert!(rotation_from_z_and_yaw(&Vec3::new(0.0, 0.0, 2.0), 0.0).is_err());
    }

    #[test]
    fn fused_yaw_round_trip() {
        let z = Vec3::new(0.3, -0.2, 0.9).normalize();
        for &yaw in &[-3.0, -1.0, 0.0, 0.4, 2.9] {
            let r = rotation_from_z_and_yaw(&z, yaw).unwrap();
            assert!((fused_yaw(&r) - yaw).abs() < 1e-12);
            assert!((r * Vec3::z() - z).norm() < 1e-12);
        }
    }

    #[test]
    fn rodrigues_examples() {
        assert_rot_eq(&rodrigues(&Vec3::z(), 0.0), &Rotation::identity(), 0.0);
        let half = rodrigues(&Vec3::z(), PI);
        let expected = Rotation::from_matrix_unchecked(Matrix3::from_diagonal(&Vec3::new(-1.0, -1.0, 1.0)));
        assert_rot_eq(&half, &expected, 1e-15);
        let v = rodrigues(&Vec3::x(), FRAC_PI_2) * Vec3::y();
        assert!((v - Vec3::z()).norm() < 1e-15);
    }

    #[test]
    fn region_membership() {
        let o = Vec3::zeros();
        let r = BallPairRegion::new(o, o, 1.0).unwrap();
        assert!(r.contains(&Vec3::new(0.0, 0.0, 0.5)));
        assert!(!r.contains(&Vec3::new(0.0, 0.0, 1.5)));

        let r = BallPairRegion::new(Vec3::new(0.5, 0.0, 0.0), Vec3::new(-0.5, 0.0, 0.0), 1.0).unwrap();
        assert!(r.contains(&Vec3::new(0.0, 0.0, 0.86)));
        assert!(!r.contains(&Vec3::new(0.0, 0.0, 0.87)));
        assert!(BallPairRegion::new(o, o, 0.0).is_err());
    }

    #[test]
    fn ray_exit_examples() {
        let o = Vec3::zeros();
        let r = BallPairRegion::new(o, o, 1.0).unwrap();
        let p = r.ray_exit(&o, &Vec3::z()).unwrap();
        assert!((p - Vec3::z()).norm() < 1e-15);

        let r = BallPairRegion::new(Vec3::new(0.5, 0.0, 0.0), Vec3::new(-0.5, 0.0, 0.0), 1.0).unwrap();
        let p = r.ray_exit(&o, &Vec3::z()).unwrap();
        assert!((p - Vec3::new(0.0, 0.0, 0.75f64.sqrt())).norm() < 1e-12);
        let p = r.ray_exit(&o, &Vec3::x()).unwrap();
        assert!((p - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ray_exit_errors() {
        let r = BallPairRegion::new(Vec3::new(1.5, 0.0, 0.0), Vec3::new(-1.5, 0.0, 0.0), 1.0).unwrap();
        assert!(r.is_empty());
        assert!(r.ray_exit(&Vec3::zeros(), &Vec3::z()).is_err());
        let r = BallPairRegion::new(Vec3::zeros(), Vec3::zeros(), 1.0).unwrap();
        assert!(r.ray_exit(&Vec3::new(0.0, 0.0, 2.0), &Vec3::z()).is_err());
    }

    #[test]
    fn line_interval_of_coincident_balls() {
        let r = BallPairRegion::new(Vec3::zeros(), Vec3::zeros(), 1.0).unwrap();
        let (a, b) = r.line_interval(&Vec3::new(0.0, 0.0, 3.0), &(-Vec3::z())).unwrap();
        assert!((a - 2.0).abs() < 1e-15 && (b - 4.0).abs() < 1e-15);
        assert!(r.line_interval(&Vec3::new(0.0, 2.0, 3.0), &(-Vec3::z())).is_none());
    }

    #[test]
    fn regula_falsi_examples() {
        let root = regula_falsi(|x| Ok(x - 2.0), 0.0, 5.0, 1e-6, 50).unwrap();
        assert_eq!(root.x, 2.0);
        assert_eq!(root.iterations, 1);

        let root = regula_falsi(|x| Ok(x * x - 1.0), 0.5, 2.0, 1e-9, 100).unwrap();
        assert!((root.x - 1.0).abs() < 1e-9);
        assert!(root.residual.abs() < 1e-9);

        let err = regula_falsi(|x| Ok(x * x + 1.0), 0.0, 1.0, 1e-9, 100).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn regula_falsi_endpoint_and_limit() {
        let root = regula_falsi(Ok, 0.0, 1.0, 1e-6, 10).unwrap();
        assert_eq!((root.x, root.iterations), (0.0, 0));
        let err = regula_falsi(|x: f64| Ok(x.powi(9) - 0.3), 0.0, 1.0, 1e-15, 2).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }));
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5) - 0.5).abs() < 1e-15);
    }
}
