//! Analytic fields used as data: forcing, boundary traces, exact solutions.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::mesh::Point3;

pub type Vec3 = Point3;

/// Time-dependent vector field `(x, t) -> v`.
pub type VectorField = Arc<dyn Fn(&Point3, f64) -> Vec3 + Send + Sync>;
/// Time-dependent scalar field `(x, t) -> s`.
pub type ScalarField = Arc<dyn Fn(&Point3, f64) -> f64 + Send + Sync>;

pub fn vector_field(f: impl Fn(&Point3, f64) -> Vec3 + Send + Sync + 'static) -> VectorField {
    Arc::new(f)
}

pub fn scalar_field(f: impl Fn(&Point3, f64) -> f64 + Send + Sync + 'static) -> ScalarField {
    Arc::new(f)
}

pub fn zero_vector() -> VectorField {
    Arc::new(|_, _| Vec3::zeros())
}

pub fn zero_scalar() -> ScalarField {
    Arc::new(|_, _| 0.0)
}

pub fn constant_vector(v: Vec3) -> VectorField {
    Arc::new(move |_, _| v)
}

/// Ethier-Steinman exact Navier-Stokes flow with parameters `a`, `d`.
///
/// The flow is Beltrami (`curl u = d u`), so the convective term `curl u x u`
/// vanishes and with unit viscosity the Bernoulli pressure is constant and the
/// body force is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ethier {
    pub a: f64,
    pub d: f64,
}

impl Ethier {
    pub fn new(a: f64, d: f64) -> Self {
        Ethier { a, d }
    }

    pub fn velocity(&self, x: &Point3, t: f64) -> Vec3 {
        let (a, d) = (self.a, self.d);
        let decay = (-d * d * t).exp();
        let (px, py, pz) = (x.x, x.y, x.z);
        -a * decay
            * Vec3::new(
                (a * px).exp() * (a * py + d * pz).sin() + (a * pz).exp() * (a * px + d * py).cos(),
                (a * py).exp() * (a * pz + d * px).sin() + (a * px).exp() * (a * py + d * pz).cos(),
                (a * pz).exp() * (a * px + d * py).sin() + (a * py).exp() * (a * pz + d * px).cos(),
            )
    }

    pub fn vorticity(&self, x: &Point3, t: f64) -> Vec3 {
        self.d * self.velocity(x, t)
    }

    /// `curl curl u = d^2 u`
    pub fn curl_vorticity(&self, x: &Point3, t: f64) -> Vec3 {
        self.d * self.d * self.velocity(x, t)
    }

    pub fn velocity_field(self) -> VectorField {
        Arc::new(move |x, t| self.velocity(x, t))
    }

    pub fn vorticity_field(self) -> VectorField {
        Arc::new(move |x, t| self.vorticity(x, t))
    }
}

/// Smooth divergence-free Stokes solution on the unit cube:
/// `u = (sin pi y sin pi z, sin pi z sin pi x, sin pi x sin pi y)`,
/// `p = cos pi x cos pi y cos pi z` (mean zero), with `curl curl u = 2 pi^2 u`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StokesMms;

impl StokesMms {
    pub fn velocity(x: &Point3) -> Vec3 {
        let (sx, sy, sz) = (sin_pi(x.x), sin_pi(x.y), sin_pi(x.z));
        Vec3::new(sy * sz, sz * sx, sx * sy)
    }

    pub fn vorticity(x: &Point3) -> Vec3 {
        let (sx, sy, sz) = (sin_pi(x.x), sin_pi(x.y), sin_pi(x.z));
        let (cx, cy, cz) = (cos_pi(x.x), cos_pi(x.y), cos_pi(x.z));
        PI * Vec3::new(sx * (cy - cz), sy * (cz - cx), sz * (cx - cy))
    }

    pub fn pressure(x: &Point3) -> f64 {
        cos_pi(x.x) * cos_pi(x.y) * cos_pi(x.z)
    }

    pub fn pressure_gradient(x: &Point3) -> Vec3 {
        let (sx, sy, sz) = (sin_pi(x.x), sin_pi(x.y), sin_pi(x.z));
        let (cx, cy, cz) = (cos_pi(x.x), cos_pi(x.y), cos_pi(x.z));
        -PI * Vec3::new(sx * cy * cz, cx * sy * cz, cx * cy * sz)
    }

    /// `nu curl curl u + grad p`
    pub fn force(nu: f64) -> VectorField {
        Arc::new(move |x, _| 2.0 * nu * PI * PI * Self::velocity(x) + Self::pressure_gradient(x))
    }

    pub fn velocity_field() -> VectorField {
        Arc::new(|x, _| Self::velocity(x))
    }

    pub fn vorticity_field() -> VectorField {
        Arc::new(|x, _| Self::vorticity(x))
    }

    pub fn curl_vorticity_field() -> VectorField {
        Arc::new(|x, _| 2.0 * PI * PI * Self::velocity(x))
    }

    pub fn pressure_field() -> ScalarField {
        Arc::new(|x, _| Self::pressure(x))
    }
}

fn sin_pi(v: f64) -> f64 {
    (PI * v).sin()
}

fn cos_pi(v: f64) -> f64 {
    (PI * v).cos()
}

/// Central-difference derivatives of order 4 for checking analytic formulas.
pub mod fd {
    use super::*;

    pub fn partial(f: &dyn Fn(&Point3) -> Vec3, x: &Point3, axis: usize, h: f64) -> Vec3 {
        let mut e = Point3::zeros();
        e[axis] = h;
        (f(&(x - 2.0 * e)) - 8.0 * f(&(x - e)) + 8.0 * f(&(x + e)) - f(&(x + 2.0 * e))) / (12.0 * h)
    }

    pub fn curl(f: &dyn Fn(&Point3) -> Vec3, x: &Point3, h: f64) -> Vec3 {
        let dx = partial(f, x, 0, h);
        let dy = partial(f, x, 1, h);
        let dz = partial(f, x, 2, h);
        Vec3::new(dy.z - dz.y, dz.x - dx.z, dx.y - dy.x)
    }

    pub fn divergence(f: &dyn Fn(&Point3) -> Vec3, x: &Point3, h: f64) -> f64 {
        partial(f, x, 0, h).x + partial(f, x, 1, h).y + partial(f, x, 2, h).z
    }

    pub fn time_derivative(f: &dyn Fn(f64) -> Vec3, t: f64, h: f64) -> Vec3 {
        (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
    }
}
