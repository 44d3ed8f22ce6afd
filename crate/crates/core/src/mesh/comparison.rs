//! Comparison estimates between nearby triangles.
//!
//! Each function measures a quantity directly (angles, areas, singular values)
//! and reports it next to the corresponding a-priori bound, so the bounds can be
//! exercised as properties.

use nalgebra::Matrix2;

use super::metric::{triangle_angles, Flavor};
use crate::error::{Error, Result};

fn angles(l: [f64; 3], flavor: Flavor) -> Result<[f64; 3]> {
    triangle_angles(l, flavor).map_err(|reason| Error::InadmissibleLengths { face: 0, reason })
}

/// Euclidean area by the stable form of Heron's formula.
pub fn triangle_area(l: [f64; 3]) -> f64 {
    let mut s = l;
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let [a, b, c] = s;
    0.25 * ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))).max(0.0).sqrt()
}

/// Largest relative edge change `max |l'_e - l_e| / l_e`.
pub fn relative_perturbation(l: [f64; 3], l2: [f64; 3]) -> f64 {
    (0..3).map(|k| (l2[k] - l[k]).abs() / l[k]).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePerturbationReport {
    pub delta: f64,
    pub max_angle_change: f64,
    pub relative_area_change: f64,
    /// `24 δ / ε`
    pub angle_bound: f64,
    /// `576 δ / ε²`
    pub area_bound: f64,
}

impl AnglePerturbationReport {
    pub fn angle_ok(&self) -> bool {
        self.max_angle_change <= self.angle_bound
    }

    pub fn area_ok(&self) -> bool {
        self.relative_area_change <= self.area_bound
    }

    pub fn holds(&self) -> bool {
        self.angle_ok() && self.area_ok()
    }
}

/// Measures angle and area changes between triangles `l` and `l2` and compares
/// them with `24δ/ε` and `576δ/ε²`.
///
/// Requires every angle of `l` to be at least `eps` and `δ < ε²/48`.
pub fn angle_perturbation_bound(l: [f64; 3], l2: [f64; 3], eps: f64) -> Result<AnglePerturbationReport> {
    let a = angles(l, Flavor::Euclidean)?;
    if a.iter().any(|&x| x < eps) {
        return Err(Error::HypothesisViolated(format!("an angle of {l:?} is below {eps}")));
    }
    let delta = relative_perturbation(l, l2);
    if delta >= eps * eps / 48.0 {
        return Err(Error::HypothesisViolated(format!("delta {delta} >= eps^2/48")));
    }
    let a2 = angles(l2, Flavor::Euclidean)?;
    let max_angle_change = (0..3).map(|k| (a2[k] - a[k]).abs()).fold(0.0, f64::max);
    let area = triangle_area(l);
    let relative_area_change = (triangle_area(l2) - area).abs() / area;
    Ok(AnglePerturbationReport {
        delta,
        max_angle_change,
        relative_area_change,
        angle_bound: 24.0 * delta / eps,
        area_bound: 576.0 * delta / (eps * eps),
    })
}

/// Places a triangle with sides `l` (side `k` opposite vertex `k`) in the
/// plane: vertex 0 at the origin, vertex 1 on the positive x axis.
fn layout(l: [f64; 3]) -> Result<[[f64; 2]; 3]> {
    let a = angles(l, Flavor::Euclidean)?;
    let c = l[2];
    let b = l[1];
    Ok([[0.0, 0.0], [c, 0.0], [b * a[0].cos(), b * a[0].sin()]])
}

/// Singular values `(λ1 ≥ λ2)` of the linear map sending triangle `l` onto
/// triangle `l2` with vertices matched in order.
pub fn singular_values_of_map(l: [f64; 3], l2: [f64; 3]) -> Result<(f64, f64)> {
    let p = layout(l)?;
    let q = layout(l2)?;
    let from = Matrix2::new(p[1][0], p[2][0], p[1][1], p[2][1]);
    let to = Matrix2::new(q[1][0], q[2][0], q[1][1], q[2][1]);
    let inv = from
        .try_inverse()
        .ok_or_else(|| Error::InadmissibleLengths {
            face: 0,
            reason: "degenerate source triangle".into(),
        })?;
    let sv = (to * inv).singular_values();
    Ok((sv[0].max(sv[1]), sv[0].min(sv[1])))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapDistortionReport {
    pub delta: f64,
    pub singular_values: (f64, f64),
    /// `10⁴ δ / ε⁴`
    pub bound: f64,
}

impl MapDistortionReport {
    pub fn holds(&self) -> bool {
        let (s1, s2) = self.singular_values;
        (s1 - 1.0).abs() <= self.bound && (s2 - 1.0).abs() <= self.bound
    }
}

/// Singular values of the vertex-matching map together with the bound
/// `1 ± 10⁴δ/ε⁴`, valid when every angle of `l` is at least `eps` and
/// `δ < ε²/576`.
pub fn map_distortion_bound(l: [f64; 3], l2: [f64; 3], eps: f64) -> Result<MapDistortionReport> {
    let a = angles(l, Flavor::Euclidean)?;
    if a.iter().any(|&x| x < eps) {
        return Err(Error::HypothesisViolated(format!("an angle of {l:?} is below {eps}")));
    }
    let delta = relative_perturbation(l, l2);
    if delta >= eps * eps / 576.0 {
        return Err(Error::HypothesisViolated(format!("delta {delta} >= eps^2/576")));
    }
    Ok(MapDistortionReport {
        delta,
        singular_values: singular_values_of_map(l, l2)?,
        bound: 1e4 * delta / eps.powi(4),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGapReport {
    /// `|A' - A|` per corner, spherical minus Euclidean.
    pub gaps: [f64; 3],
    /// `2 (a + b + c)²`
    pub bound: f64,
}

impl AngleGapReport {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.max_gap() <= self.bound
    }
}

/// Angle differences between the spherical and the Euclidean triangle with the
/// same side lengths. Requires the spherical diameter to be below π/3.
pub fn spherical_euclidean_angle_gap(l: [f64; 3]) -> Result<AngleGapReport> {
    let diameter = l.iter().copied().fold(0.0, f64::max);
    if diameter >= std::f64::consts::FRAC_PI_3 {
        return Err(Error::InadmissibleLengths {
            face: 0,
            reason: format!("spherical diameter {diameter} >= pi/3"),
        });
    }
    let e = angles(l, Flavor::Euclidean)?;
    let s = angles(l, Flavor::Spherical)?;
    let perimeter: f64 = l.iter().sum();
    Ok(AngleGapReport {
        gaps: [(s[0] - e[0]).abs(), (s[1] - e[1]).abs(), (s[2] - e[2]).abs()],
        bound: 2.0 * perimeter * perimeter,
    })
}
