use std::f64::consts::PI;
use std::sync::Arc;

use super::triangulation::Triangulation;
use crate::error::{Error, Result};

/// Largest amount by which a law-of-cosines argument may leave [-1, 1]
/// before the triangle is declared inadmissible.
const COS_SLACK: f64 = 1e-9;

/// Geometry used to glue triangles along edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Euclidean,
    /// Edge lengths are arc lengths (radians) on the unit sphere.
    Spherical,
}

/// A triangulation with per-edge lengths.
#[derive(Debug, Clone)]
pub struct MetricMesh {
    tri: Arc<Triangulation>,
    lengths: Vec<f64>,
    flavor: Flavor,
}

impl MetricMesh {
    /// Validates admissibility of `lengths` for `flavor` and builds the mesh.
    pub fn new(tri: impl Into<Arc<Triangulation>>, lengths: Vec<f64>, flavor: Flavor) -> Result<Self> {
        let tri = tri.into();
        check_admissible(&tri, &lengths, flavor)?;
        Ok(MetricMesh {
            tri,
            lengths,
            flavor,
        })
    }

    pub fn euclidean(tri: impl Into<Arc<Triangulation>>, lengths: Vec<f64>) -> Result<Self> {
        Self::new(tri, lengths, Flavor::Euclidean)
    }

    pub fn spherical(tri: impl Into<Arc<Triangulation>>, lengths: Vec<f64>) -> Result<Self> {
        Self::new(tri, lengths, Flavor::Spherical)
    }

    /// Same triangulation and flavor, new lengths.
    pub fn with_lengths(&self, lengths: Vec<f64>) -> Result<Self> {
        Self::new(self.tri.clone(), lengths, self.flavor)
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn shared_triangulation(&self) -> Arc<Triangulation> {
        self.tri.clone()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Largest edge length.
    pub fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn corner_angles(&self) -> Result<CornerAngles> {
        corner_angles(&self.tri, &self.lengths, self.flavor)
    }

    /// Discrete curvature: `2π - Σθ` at interior vertices, `π - Σθ` at boundary
    /// vertices. Unused vertex slots get 0.
    pub fn curvature(&self) -> Result<Vec<f64>> {
        Ok(self.corner_angles()?.curvature(&self.tri))
    }

    /// Delaunay margins on interior edges, as `(edge, margin)` pairs.
    pub fn delaunay_margins(&self) -> Result<Vec<(usize, f64)>> {
        Ok(self.corner_angles()?.delaunay_margins(&self.tri))
    }

    /// Largest ε for which the mesh is ε-regular (may be ≤ 0).
    pub fn regularity(&self) -> Result<f64> {
        Ok(self.corner_angles()?.regularity(&self.tri))
    }
}

/// Inner angles indexed by face and corner position.
#[derive(Debug, Clone)]
pub struct CornerAngles {
    angles: Vec<[f64; 3]>,
}

impl CornerAngles {
    pub fn face(&self, f: usize) -> [f64; 3] {
        self.angles[f]
    }

    pub fn corner(&self, f: usize, k: usize) -> f64 {
        self.angles[f][k]
    }

    /// Angle at vertex `v` of face `f`.
    pub fn at(&self, tri: &Triangulation, f: usize, v: usize) -> Option<f64> {
        tri.corner_of(f, v).map(|k| self.angles[f][k])
    }

    pub fn min_angle(&self) -> f64 {
        self.angles.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sum of angles at every vertex slot.
    pub fn angle_sums(&self, tri: &Triangulation) -> Vec<f64> {
        let mut sums = vec![0.0; tri.num_vertices()];
        for (f, face) in tri.faces().iter().enumerate() {
            for k in 0..3 {
                sums[face[k]] += self.angles[f][k];
            }
        }
        sums
    }

    pub fn curvature(&self, tri: &Triangulation) -> Vec<f64> {
        let sums = self.angle_sums(tri);
        (0..tri.num_vertices())
            .map(|v| {
                if !tri.is_used(v) {
                    0.0
                } else if tri.is_boundary_vertex(v) {
                    PI - sums[v]
                } else {
                    2.0 * PI - sums[v]
                }
            })
            .collect()
    }

    /// For interior edge `ij` between faces `ijk` and `ijk'`: the four angles at
    /// `i` and `j` minus the two angles at `k` and `k'`.
    pub fn delaunay_margins(&self, tri: &Triangulation) -> Vec<(usize, f64)> {
        (0..tri.num_edges())
            .filter(|&e| tri.is_interior_edge(e))
            .map(|e| (e, self.edge_margin(tri, e)))
            .collect()
    }

    fn edge_margin(&self, tri: &Triangulation, e: usize) -> f64 {
        let mut opposite = 0.0;
        let mut adjacent = 0.0;
        for (f, k) in tri.opposite_corners(e) {
            opposite += self.angles[f][k];
            adjacent += self.angles[f][(k + 1) % 3] + self.angles[f][(k + 2) % 3];
        }
        adjacent - opposite
    }

    /// Sum of the two angles opposite an interior edge.
    pub fn opposite_sum(&self, tri: &Triangulation, e: usize) -> f64 {
        tri.opposite_corners(e).map(|(f, k)| self.angles[f][k]).sum()
    }

    pub fn regularity(&self, tri: &Triangulation) -> f64 {
        let edge_part = (0..tri.num_edges())
            .filter(|&e| tri.is_interior_edge(e))
            .map(|e| PI - self.opposite_sum(tri, e))
            .fold(f64::INFINITY, f64::min);
        self.min_angle().min(edge_part)
    }
}

/// Checks positivity, strict triangle inequalities and, for spherical meshes,
/// minor arcs with face perimeter below 2π (each face inside an open hemisphere).
pub fn check_admissible(tri: &Triangulation, lengths: &[f64], flavor: Flavor) -> Result<()> {
    if lengths.len() != tri.num_edges() {
        return Err(Error::LengthMismatch {
            expected: tri.num_edges(),
            got: lengths.len(),
        });
    }
    for f in 0..tri.num_faces() {
        let [a, b, c] = tri.face_edges(f).map(|e| lengths[e]);
        check_triangle([a, b, c], flavor).map_err(|reason| Error::InadmissibleLengths { face: f, reason })?;
    }
    Ok(())
}

pub(crate) fn check_triangle(l: [f64; 3], flavor: Flavor) -> std::result::Result<(), String> {
    let [a, b, c] = l;
    if !l.iter().all(|x| x.is_finite() && *x > 0.0) {
        return Err(format!("non-positive or non-finite length in {l:?}"));
    }
    if !(a + b > c && b + c > a && a + c > b) {
        return Err(format!("triangle inequality fails for {l:?}"));
    }
    if flavor == Flavor::Spherical {
        if l.iter().any(|&x| x >= PI) {
            return Err(format!("arc length >= pi in {l:?}"));
        }
        if a + b + c >= 2.0 * PI {
            return Err(format!("perimeter {} >= 2pi", a + b + c));
        }
    }
    Ok(())
}

/// Angle opposite side `a` in a triangle with sides `a, b, c`.
pub(crate) fn angle_from_sides(a: f64, b: f64, c: f64, flavor: Flavor) -> std::result::Result<f64, String> {
    let cos = match flavor {
        Flavor::Euclidean => (b * b + c * c - a * a) / (2.0 * b * c),
        Flavor::Spherical => (a.cos() - b.cos() * c.cos()) / (b.sin() * c.sin()),
    };
    if !cos.is_finite() || cos.abs() > 1.0 + COS_SLACK {
        return Err(format!("cosine {cos} out of range for sides ({a}, {b}, {c})"));
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Angles of one triangle with sides `l`, where `l[k]` is opposite corner `k`.
pub fn triangle_angles(l: [f64; 3], flavor: Flavor) -> std::result::Result<[f64; 3], String> {
    check_triangle(l, flavor)?;
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = angle_from_sides(l[k], l[(k + 1) % 3], l[(k + 2) % 3], flavor)?;
    }
    Ok(out)
}

pub fn corner_angles(tri: &Triangulation, lengths: &[f64], flavor: Flavor) -> Result<CornerAngles> {
    if lengths.len() != tri.num_edges() {
        return Err(Error::LengthMismatch {
            expected: tri.num_edges(),
            got: lengths.len(),
        });
    }
    let angles = (0..tri.num_faces())
        .map(|f| {
            let l = tri.face_edges(f).map(|e| lengths[e]);
            triangle_angles(l, flavor).map_err(|reason| Error::InadmissibleLengths { face: f, reason })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CornerAngles { angles })
}
