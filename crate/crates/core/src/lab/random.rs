//! Random strictly Delaunay disk layouts with the origin as an interior
//! vertex, and the inscribed polyhedra they lift to.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::scaling::{scaled_mesh, ConformalFactor};
use crate::mesh::{corner_angles, Flavor, MetricMesh, Triangulation};
use crate::stereo::{lift_to_polyhedron, InscribedPolyhedron, PlanarLayout};

/// Shape of the generated layouts.
#[derive(Debug, Clone)]
pub struct LayoutSpec {
    /// Allowed number of boundary vertices.
    pub boundary: std::ops::RangeInclusive<usize>,
    /// Range the target interior count is drawn from; the lattice realizes
    /// it approximately.
    pub interior: std::ops::RangeInclusive<usize>,
    /// Minimum regularity and boundary curvature accepted.
    pub margin: f64,
    /// Overall scale of the layout.
    pub radius: f64,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        LayoutSpec {
            boundary: 5..=12,
            interior: 4..=30,
            margin: 0.02,
            radius: 1.0,
        }
    }
}

/// Delaunay triangulation of `points` by Bowyer-Watson insertion, faces
/// counterclockwise. Assumes general position.
pub fn delaunay_triangulation(points: &[Complex64]) -> Vec<[usize; 3]> {
    let n = points.len();
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max) * 1e3;
    let mut pts = points.to_vec();
    pts.push(Complex64::new(-scale, -scale));
    pts.push(Complex64::new(scale, -scale));
    pts.push(Complex64::new(0.0, scale));
    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    for i in 0..n {
        let p = pts[i];
        let (bad, keep): (Vec<[usize; 3]>, Vec<[usize; 3]>) =
            tris.into_iter().partition(|t| in_circumcircle(&pts, *t, p));
        let mut rim: Vec<(usize, usize)> = Vec::new();
        for t in &bad {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if let Some(pos) = rim.iter().position(|&(a, b)| a == e.1 && b == e.0) {
                    rim.swap_remove(pos);
                } else {
                    rim.push(e);
                }
            }
        }
        tris = keep;
        tris.extend(rim.into_iter().map(|(a, b)| [a, b, i]));
    }
    tris.retain(|t| t.iter().all(|&v| v < n));
    tris
}

fn in_circumcircle(pts: &[Complex64], t: [usize; 3], p: Complex64) -> bool {
    let [a, b, c] = t.map(|v| pts[v] - p);
    let det = a.norm_sqr() * (b.re * c.im - c.re * b.im) - b.norm_sqr() * (a.re * c.im - c.re * a.im)
        + c.norm_sqr() * (a.re * b.im - b.re * a.im);
    det > 0.0
}

/// A random strictly Delaunay layout: jittered points on a circle, the
/// origin, and a randomly rotated, jittered hexagonal lattice inside.
/// Rejection-sampled until the regularity and every boundary curvature
/// exceed `spec.margin`.
pub fn random_delaunay_layout<R: Rng>(rng: &mut R, spec: &LayoutSpec) -> PlanarLayout {
    loop {
        if let Some(layout) = try_layout(rng, spec) {
            return layout;
        }
    }
}

fn try_layout<R: Rng>(rng: &mut R, spec: &LayoutSpec) -> Option<PlanarLayout> {
    // hexagonal lattice spacing giving roughly the requested interior count
    let target = rng.gen_range(spec.interior.clone()).max(1) as f64;
    let a = (2.0 * PI * 0.8 / (3f64.sqrt() * target)).sqrt();
    let nb = ((2.0 * PI / a).round() as usize).clamp(*spec.boundary.start(), *spec.boundary.end());
    let phase = rng.gen_range(0.0..2.0 * PI);
    let step = 2.0 * PI / nb as f64;
    let mut pts: Vec<Complex64> = (0..nb)
        // radii off the unit circle keep the in-circle predicate decisive
        .map(|k| Complex64::from_polar(rng.gen_range(0.99..1.0), phase + step * (k as f64 + rng.gen_range(-0.15..0.15))))
        .collect();
    pts.push(Complex64::new(0.0, 0.0));
    let rot = Complex64::from_polar(1.0, rng.gen_range(0.0..PI / 3.0));
    let e1 = rot * a;
    let e2 = rot * Complex64::from_polar(a, PI / 3.0);
    let reach = 0.55 * a.max(step);
    let m = (1.0 / a).ceil() as i64 + 1;
    for i in -m..=m {
        for j in -m..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let jitter = Complex64::from_polar(rng.gen_range(0.0..0.2) * a, rng.gen_range(0.0..2.0 * PI));
            let z = e1 * i as f64 + e2 * j as f64 + jitter;
            if z.norm() < 1.0 - reach {
                pts.push(z);
            }
        }
    }
    for z in &mut pts {
        *z *= spec.radius;
    }
    let faces = delaunay_triangulation(&pts);
    let tri = Triangulation::new(faces).ok()?;
    if tri.topology() != crate::mesh::Topology::Disk {
        return None;
    }
    let layout = PlanarLayout::new(Arc::new(tri), pts).ok()?;
    let tri = layout.triangulation();
    let angles = corner_angles(tri, &layout.edge_lengths(), Flavor::Euclidean).ok()?;
    let margin_ok = angles.regularity(tri) > spec.margin
        && tri.is_used(nb)
        && !tri.is_boundary_vertex(nb)
        && tri.boundary_vertices().count() == nb;
    let k = angles.curvature(tri);
    let convex = tri.boundary_vertices().all(|v| k[v] > spec.margin);
    (margin_ok && convex && layout.orientation() == Some(1.0)).then_some(layout)
}

/// Lift of a random layout: an inscribed convex polyhedron with a vertex at
/// the north pole. The layout is returned alongside.
pub fn random_inscribed_polyhedron<R: Rng>(rng: &mut R, spec: &LayoutSpec) -> Result<(PlanarLayout, InscribedPolyhedron)> {
    let layout = random_delaunay_layout(rng, spec);
    let p = lift_to_polyhedron(&layout)?;
    Ok((layout, p))
}

/// Closed Euclidean mesh: a random inscribed polyhedron with every vertex
/// moved radially by a factor in `[1 − jitter, 1 + jitter]`. Faces that would
/// degenerate are avoided by retrying.
pub fn random_closed_mesh<R: Rng>(rng: &mut R, spec: &LayoutSpec, jitter: f64) -> Result<MetricMesh> {
    loop {
        let (_, p) = random_inscribed_polyhedron(rng, spec)?;
        let tri = p.shared_triangulation();
        let pos: Vec<_> = p
            .positions()
            .iter()
            .map(|q| q * (1.0 + rng.gen_range(-jitter..=jitter)))
            .collect();
        let lengths = tri.edges().iter().map(|&[a, b]| (pos[a] - pos[b]).norm()).collect();
        if let Ok(m) = MetricMesh::euclidean(tri, lengths) {
            if m.corner_angles().is_ok_and(|a| a.min_angle() > 1e-3) {
                return Ok(m);
            }
        }
    }
}

/// Random strictly Delaunay disk mesh with Euclidean lengths.
pub fn random_disk_mesh<R: Rng>(rng: &mut R, spec: &LayoutSpec) -> Result<MetricMesh> {
    let layout = random_delaunay_layout(rng, spec);
    MetricMesh::euclidean(layout.shared_triangulation(), layout.edge_lengths())
}

/// Random factor with `|u_i| ≤ amplitude` whose scaled mesh is
/// `min_regularity`-regular; the amplitude is halved until one is.
pub fn random_admissible_factor<R: Rng>(rng: &mut R, mesh: &MetricMesh, amplitude: f64, min_regularity: f64) -> ConformalFactor {
    let n = mesh.triangulation().num_vertices();
    let mut amp = amplitude;
    loop {
        let u = ConformalFactor((0..n).map(|_| rng.gen_range(-1.0..=1.0) * amp).collect());
        let ok = scaled_mesh(mesh, &u)
            .and_then(|m| m.regularity())
            .is_ok_and(|eps| eps >= min_regularity);
        if ok || amp < 1e-9 {
            return u;
        }
        amp *= 0.5;
    }
}
