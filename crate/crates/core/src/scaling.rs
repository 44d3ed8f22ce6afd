//! Vertex scaling, cotangent weights, and the curvature Jacobian.

use std::ops::{Index, IndexMut};

use crate::calculus::{laplacian_matrix, EdgeWeight, SparseSym};
use crate::error::{Error, Result};
use crate::mesh::{Flavor, MetricMesh, Triangulation};

/// Per-vertex logarithmic scale factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactor(pub Vec<f64>);

impl ConformalFactor {
    pub fn zeros(n: usize) -> Self {
        ConformalFactor(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ConformalFactor(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `max |u_i − v_i|` over `indices`.
    pub fn max_diff_on(&self, other: &ConformalFactor, indices: impl IntoIterator<Item = usize>) -> f64 {
        indices
            .into_iter()
            .map(|i| (self.0[i] - other.0[i]).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for ConformalFactor {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ConformalFactor {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// `l'_ij = e^{(u_i+u_j)/2} l_ij`. Admissibility of the result is not checked.
pub fn scale_euclidean(tri: &Triangulation, lengths: &[f64], u: &ConformalFactor) -> Vec<f64> {
    tri.edges()
        .iter()
        .zip(lengths)
        .map(|(&[i, j], &l)| (0.5 * (u[i] + u[j])).exp() * l)
        .collect()
}

/// `sin(l'_ij/2) = e^{(u_i+u_j)/2} sin(l_ij/2)`.
pub fn scale_spherical(tri: &Triangulation, lengths: &[f64], u: &ConformalFactor) -> Result<Vec<f64>> {
    tri.edges()
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(e, (&[i, j], &l))| {
            if u[i] + u[j] == 0.0 {
                return Ok(l);
            }
            let s = (0.5 * (u[i] + u[j])).exp() * (0.5 * l).sin();
            if !(s < 1.0) {
                Err(Error::OutOfRange { edge: e, value: s })
            } else {
                Ok(2.0 * s.asin())
            }
        })
        .collect()
}

/// Chord lengths `2 sin(l/2)` of spherical arcs.
pub fn chord_lengths(arcs: &[f64]) -> Vec<f64> {
    arcs.iter().map(|&l| 2.0 * (0.5 * l).sin()).collect()
}

fn cot_from_sides(opposite: f64, b: f64, c: f64, area4: f64) -> f64 {
    (b * b + c * c - opposite * opposite) / area4
}

fn require_euclidean(mesh: &MetricMesh) -> Result<()> {
    if mesh.flavor() != Flavor::Euclidean {
        return Err(Error::HypothesisViolated("cotangent weights need a Euclidean mesh".into()));
    }
    Ok(())
}

/// Cotangent weights `η_ij = ½ Σ cot θ` over the angles opposite `ij`.
pub fn cotangent_weights(mesh: &MetricMesh) -> Result<EdgeWeight> {
    require_euclidean(mesh)?;
    Ok(cotangent_weights_of(mesh.triangulation(), mesh.lengths()))
}

/// Cotangent weights from raw lengths; lengths must be admissible.
pub(crate) fn cotangent_weights_of(tri: &Triangulation, lengths: &[f64]) -> EdgeWeight {
    let mut eta = vec![0.0; tri.num_edges()];
    for f in 0..tri.num_faces() {
        let fe = tri.face_edges(f);
        let l = fe.map(|e| lengths[e]);
        let area4 = 4.0 * crate::mesh::comparison::triangle_area(l);
        for k in 0..3 {
            let cot = cot_from_sides(l[k], l[(k + 1) % 3], l[(k + 2) % 3], area4);
            eta[fe[k]] += 0.5 * cot;
        }
    }
    EdgeWeight(eta)
}

/// Mesh with lengths `u * l`, validated.
pub fn scaled_mesh(mesh: &MetricMesh, u: &ConformalFactor) -> Result<MetricMesh> {
    match mesh.flavor() {
        Flavor::Euclidean => mesh.with_lengths(scale_euclidean(mesh.triangulation(), mesh.lengths(), u)),
        Flavor::Spherical => mesh.with_lengths(scale_spherical(mesh.triangulation(), mesh.lengths(), u)?),
    }
}

/// `∂K/∂u = −Δ_{η(u)}` for the Euclidean mesh `(T, u * l)`.
pub fn curvature_jacobian(mesh: &MetricMesh, u: &ConformalFactor) -> Result<SparseSym> {
    require_euclidean(mesh)?;
    let scaled = scaled_mesh(mesh, u)?;
    let eta = cotangent_weights(&scaled)?;
    Ok(laplacian_matrix(&mesh.triangulation().graph(), &eta).negated())
}

/// Largest `|analytic − central difference| / (1 + |analytic|)` over all
/// entries of the curvature Jacobian at `u`, with step `h`.
pub fn fd_jacobian_check(mesh: &MetricMesh, u: &ConformalFactor, h: f64) -> Result<f64> {
    let jac = curvature_jacobian(mesh, u)?;
    let tri = mesh.triangulation();
    let mut worst: f64 = 0.0;
    let mut probe = u.clone();
    for j in tri.vertices() {
        let base = probe[j];
        probe[j] = base + h;
        let kp = scaled_mesh(mesh, &probe)?.curvature()?;
        probe[j] = base - h;
        let km = scaled_mesh(mesh, &probe)?.curvature()?;
        probe[j] = base;
        for i in tri.vertices() {
            let fd = (kp[i] - km[i]) / (2.0 * h);
            let a = jac.get(i, j);
            worst = worst.max((a - fd).abs() / (1.0 + a.abs()));
        }
    }
    Ok(worst)
}
