//! Quadrature on the reference segment, triangle and tetrahedron, expressed in
//! barycentric coordinates.
//!
//! Tetrahedral weights sum to the reference volume 1/6; the integral over a
//! physical tet of volume `|T|` is `6 |T| sum_q w_q f(x_q)`. Segment and triangle
//! weights are normalized to sum to 1 (multiply by length / area).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

pub const REFERENCE_TET_VOLUME: f64 = 1.0 / 6.0;

impl QuadratureRule {
    fn checked(points: Vec<[f64; 4]>, weights: Vec<f64>, exactness_degree: usize) -> Result<Self> {
        let rule = QuadratureRule {
            points,
            weights,
            exactness_degree,
        };
        if rule.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::Config("quadrature weights must be positive".into()));
        }
        let err = rule.moment_error(exactness_degree);
        if err > 1e-13 {
            return Err(Error::Config(format!(
                "quadrature rule fails degree-{exactness_degree} moments (error {err:e})"
            )));
        }
        Ok(rule)
    }

    /// Single centroid point, exact for degree 1.
    pub fn centroid() -> Self {
        Self::checked(vec![[0.25; 4]], vec![REFERENCE_TET_VOLUME], 1).expect("centroid rule")
    }

    /// Four-point symmetric rule, exact for degree 2.
    pub fn degree2() -> Self {
        let a = (5.0 - 5f64.sqrt()) / 20.0;
        let b = 1.0 - 3.0 * a;
        let points = orbit4(a, b);
        Self::checked(points, vec![REFERENCE_TET_VOLUME / 4.0; 4], 2).expect("degree-2 rule")
    }

    /// Fourteen-point symmetric rule with positive weights, exact for degree 5.
    pub fn degree5() -> Self {
        let a1 = 0.092_735_250_310_891_226_4;
        let w1 = 0.012_248_840_519_393_658_26;
        let a2 = 0.310_885_919_263_300_609_7;
        let w2 = 0.018_781_320_953_002_641_80;
        let b = 0.045_503_704_125_649_649_4;
        let w3 = 0.007_091_003_462_846_911_09;
        let mut points = orbit4(a1, 1.0 - 3.0 * a1);
        let mut weights = vec![w1; 4];
        points.extend(orbit4(a2, 1.0 - 3.0 * a2));
        weights.extend([w2; 4]);
        let c = 0.5 - b;
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let mut p = [c; 4];
            p[i] = b;
            p[j] = b;
            points.push(p);
            weights.push(w3);
        }
        Self::checked(points, weights, 5).expect("degree-5 rule")
    }

    /// Collapsed (Duffy) tensor product of `m`-point Gauss-Legendre rules,
    /// exact for degree `2m - 3`.
    pub fn collapsed(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(
                "collapsed rule needs at least 2 points per direction".into(),
            ));
        }
        let (nodes, w) = gauss_legendre_unit(m);
        let mut points = Vec::with_capacity(m * m * m);
        let mut weights = Vec::with_capacity(m * m * m);
        for (i, &u) in nodes.iter().enumerate() {
            for (j, &v) in nodes.iter().enumerate() {
                for (k, &s) in nodes.iter().enumerate() {
                    let x = u;
                    let y = (1.0 - u) * v;
                    let z = (1.0 - u) * (1.0 - v) * s;
                    points.push([1.0 - x - y - z, x, y, z]);
                    weights.push(w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
                }
            }
        }
        Self::checked(points, weights, 2 * m - 3)
    }

    /// Smallest built-in positive rule reaching `degree`.
    pub fn with_degree(degree: usize) -> Result<Self> {
        match degree {
            0 | 1 => Ok(Self::centroid()),
            2 => Ok(Self::degree2()),
            3..=5 => Ok(Self::degree5()),
            d => Self::collapsed(d.div_ceil(2) + 2),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest error over all barycentric monomials `l0^a l1^b l2^c l3^d`
    /// with `a+b+c+d <= degree`, against `a! b! c! d! 3! / (a+b+c+d+3)! * 1/6`.
    pub fn moment_error(&self, degree: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    for d in 0..=degree - a - b - c {
                        let exact = barycentric_moment(&[a, b, c, d]);
                        let approx: f64 = self
                            .points
                            .iter()
                            .zip(&self.weights)
                            .map(|(p, w)| {
                                w * p[0].powi(a as i32)
                                    * p[1].powi(b as i32)
                                    * p[2].powi(c as i32)
                                    * p[3].powi(d as i32)
                            })
                            .sum();
                        worst = worst.max((approx - exact).abs() / exact);
                    }
                }
            }
        }
        worst
    }
}

fn orbit4(a: f64, b: f64) -> Vec<[f64; 4]> {
    (0..4)
        .map(|i| {
            let mut p = [a; 4];
            p[i] = b;
            p
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact integral of `prod_i l_i^alpha_i` over the reference tet (volume 1/6).
pub fn barycentric_moment(alpha: &[usize; 4]) -> f64 {
    let total: usize = alpha.iter().sum();
    let num: f64 = alpha.iter().map(|&k| factorial(k)).product::<f64>() * factorial(3);
    num / factorial(total + 3) * REFERENCE_TET_VOLUME
}

/// Gauss-Legendre nodes and weights on [0, 1] (weights sum to 1).
pub fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pprev = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pprev) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[m - 1 - i] = 0.5 * (x + 1.0);
        weights[m - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Gauss rule on a segment in barycentric form `(1 - s, s)`, weights sum to 1.
#[derive(Debug, Clone)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    pub fn gauss(m: usize) -> Self {
        let (points, weights) = gauss_legendre_unit(m);
        LineRule { points, weights }
    }
}

/// Symmetric triangle rule in barycentric coordinates, weights sum to 1.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl TriangleRule {
    /// Seven-point rule exact for degree 5.
    pub fn degree5() -> Self {
        let s15 = 15f64.sqrt();
        let a1 = (6.0 - s15) / 21.0;
        let a2 = (6.0 + s15) / 21.0;
        let w1 = (155.0 - s15) / 1200.0;
        let w2 = (155.0 + s15) / 1200.0;
        let mut points = vec![[1.0 / 3.0; 3]];
        let mut weights = vec![9.0 / 40.0];
        for (a, w) in [(a1, w1), (a2, w2)] {
            for i in 0..3 {
                let mut p = [a; 3];
                p[i] = 1.0 - 2.0 * a;
                points.push(p);
                weights.push(w);
            }
        }
        TriangleRule {
            points,
            weights,
            exactness_degree: 5,
        }
    }

    /// Largest relative error over barycentric monomials up to `degree`,
    /// against `a! b! c! 2! / (a+b+c+2)!`.
    pub fn moment_error(&self, degree: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    let exact =
                        factorial(a) * factorial(b) * factorial(c) * 2.0 / factorial(a + b + c + 2);
                    let approx: f64 = self
                        .points
                        .iter()
                        .zip(&self.weights)
                        .map(|(p, w)| {
                            w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                        })
                        .sum();
                    worst = worst.max((approx - exact).abs() / exact);
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_rules_pass_their_moments() {
        assert!(QuadratureRule::degree2().moment_error(2) < 1e-14);
        assert!(QuadratureRule::degree5().moment_error(5) < 1e-14);
        assert!(QuadratureRule::degree5().moment_error(6) > 1e-6);
        for m in 2..8 {
            let r = QuadratureRule::collapsed(m).unwrap();
            assert!(r.moment_error(2 * m - 3) < 1e-13, "m = {m}");
        }
    }

    #[test]
    fn weights_sum_to_reference_volume() {
        for r in [
            QuadratureRule::centroid(),
            QuadratureRule::degree2(),
            QuadratureRule::degree5(),
        ] {
            let s: f64 = r.weights.iter().sum();
            assert!((s - REFERENCE_TET_VOLUME).abs() < 1e-15);
        }
    }

    #[test]
    fn with_degree_meets_request() {
        for d in 0..12 {
            let r = QuadratureRule::with_degree(d).unwrap();
            assert!(r.exactness_degree >= d);
        }
    }

    #[test]
    fn gauss_legendre_integrates_odd_degrees() {
        for m in 1..10 {
            let (x, w) = gauss_legendre_unit(m);
            for p in 0..2 * m {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rule_degree5() {
        let r = TriangleRule::degree5();
        assert!(r.moment_error(5) < 1e-14);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
