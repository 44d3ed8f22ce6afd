//! Stereographic and central projection, inscribed polyhedra, and the
//! correspondence between inscribed convex polyhedra with a vertex at the
//! north pole and planar Delaunay layouts.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{corner_angles, triangle_angles, Flavor, Topology, Triangulation};
use crate::scaling::ConformalFactor;

/// Signed geometric margins within this distance of zero count as degenerate.
pub const PREDICATE_TOL: f64 = 1e-12;

/// Tolerance on `|p| = 1` for inscribed vertices.
pub const NORM_TOL: f64 = 1e-10;

pub fn north() -> Vector3<f64> {
    Vector3::new(0.0, 0.0, 1.0)
}

/// `(x + iy) / (1 − z)`.
pub fn stereo_project(p: &Vector3<f64>) -> Result<Complex64> {
    let d = 1.0 - p.z;
    if d.abs() <= 1e-15 {
        return Err(Error::AtPole);
    }
    Ok(Complex64::new(p.x / d, p.y / d))
}

/// Inverse of [`stereo_project`].
pub fn stereo_unproject(z: Complex64) -> Vector3<f64> {
    let r2 = z.norm_sqr();
    let s = 1.0 / (r2 + 1.0);
    Vector3::new(2.0 * z.re * s, 2.0 * z.im * s, (r2 - 1.0) * s)
}

pub fn central_project(p: &Vector3<f64>) -> Result<Vector3<f64>> {
    let n = p.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(p / n)
}

/// `w = log(2 / |p − N|²)` at a single sphere point.
pub fn projection_factor_at(p: &Vector3<f64>) -> Result<f64> {
    let d2 = (p - north()).norm_squared();
    if d2 <= 1e-30 {
        return Err(Error::AtPole);
    }
    Ok((2.0 / d2).ln())
}

/// Projection factor for each point; stereographic images satisfy
/// `|p_N(a) − p_N(b)| = e^{(w_a + w_b)/2} |a − b|`.
pub fn projection_factor(positions: &[Vector3<f64>]) -> Result<ConformalFactor> {
    positions
        .iter()
        .map(projection_factor_at)
        .collect::<Result<Vec<_>>>()
        .map(ConformalFactor)
}

/// Closed triangulation with vertices on the unit sphere.
#[derive(Debug, Clone)]
pub struct InscribedPolyhedron {
    tri: Arc<Triangulation>,
    positions: Vec<Vector3<f64>>,
}

impl InscribedPolyhedron {
    /// Checks closedness and unit norms; convexity is left to [`Self::certificates`].
    pub fn new(tri: impl Into<Arc<Triangulation>>, positions: Vec<Vector3<f64>>) -> Result<Self> {
        let tri = tri.into();
        if tri.topology() != Topology::Sphere {
            return Err(Error::NotClosed);
        }
        if positions.len() != tri.num_vertices() {
            return Err(Error::LengthMismatch {
                expected: tri.num_vertices(),
                got: positions.len(),
            });
        }
        for v in tri.vertices() {
            let norm = positions[v].norm();
            if !((norm - 1.0).abs() <= NORM_TOL) {
                return Err(Error::NotInscribed { vertex: v, norm });
            }
        }
        Ok(InscribedPolyhedron { tri, positions })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn shared_triangulation(&self) -> Arc<Triangulation> {
        self.tri.clone()
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Vector3<f64> {
        self.positions[v]
    }

    /// Euclidean edge lengths `l_P`.
    pub fn chord_lengths(&self) -> Vec<f64> {
        self.tri
            .edges()
            .iter()
            .map(|&[a, b]| (self.positions[a] - self.positions[b]).norm())
            .collect()
    }

    /// Great-circle arc lengths between edge endpoints.
    pub fn arc_lengths(&self) -> Vec<f64> {
        self.tri
            .edges()
            .iter()
            .map(|&[a, b]| arc_between(&self.positions[a], &self.positions[b]))
            .collect()
    }

    pub fn certificates(&self) -> CertificateReport {
        verify_inscribed(&self.tri, &self.positions)
    }
}

fn arc_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    // atan2 form stays accurate for short and nearly antipodal arcs
    a.cross(b).norm().atan2(a.dot(b))
}

/// Certificates of an inscribed convex polyhedron. Margins are positive when
/// the corresponding property holds strictly.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// `max |‖p‖ − 1|` over used vertices.
    pub max_norm_error: f64,
    /// All faces wind the same way around the origin.
    pub orientation_consistent: bool,
    /// `+1` if faces are counterclockwise seen from outside, `−1` otherwise.
    pub orientation: f64,
    /// Per interior edge: the smaller signed distance of an opposite vertex
    /// below the plane of the other face.
    pub dihedral_margins: Vec<(usize, f64)>,
    /// Per face: smallest signed distance of any other vertex below the face
    /// plane, i.e. outside the spherical circumcircle.
    pub empty_circle_margins: Vec<f64>,
    /// `max |chord − 2 sin(arc/2)|` over edges.
    pub chord_arc_error: f64,
    /// Smallest distance from the origin to a face plane, signed positive
    /// when the origin is on the inner side.
    pub origin_margin: f64,
}

impl CertificateReport {
    pub fn inscribed(&self) -> bool {
        self.max_norm_error <= NORM_TOL
    }

    pub fn min_dihedral(&self) -> f64 {
        self.dihedral_margins
            .iter()
            .map(|&(_, m)| m)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_empty_circle(&self) -> f64 {
        self.empty_circle_margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn origin_inside(&self) -> bool {
        self.orientation_consistent && self.origin_margin > PREDICATE_TOL
    }

    pub fn convex(&self) -> bool {
        self.orientation_consistent && self.min_dihedral() > PREDICATE_TOL
    }

    pub fn empty_circles(&self) -> bool {
        self.orientation_consistent && self.min_empty_circle() > PREDICATE_TOL
    }

    pub fn dictionary(&self) -> bool {
        self.chord_arc_error <= 1e-12
    }

    pub fn passes(&self) -> bool {
        self.inscribed() && self.convex() && self.empty_circles() && self.origin_inside() && self.dictionary()
    }

    /// Name of the first failing certificate.
    pub fn first_failure(&self) -> Option<String> {
        if !self.inscribed() {
            Some(format!("vertex norm error {:e}", self.max_norm_error))
        } else if !self.orientation_consistent {
            Some("faces do not wind consistently around the origin".into())
        } else if !self.convex() {
            Some(format!("dihedral margin {:e}", self.min_dihedral()))
        } else if !self.empty_circles() {
            Some(format!("empty circumcircle margin {:e}", self.min_empty_circle()))
        } else if !self.origin_inside() {
            Some(format!("origin margin {:e}", self.origin_margin))
        } else if !self.dictionary() {
            Some(format!("chord/arc mismatch {:e}", self.chord_arc_error))
        } else {
            None
        }
    }
}

/// Runs every certificate on raw positions; never fails, the report carries
/// the outcome.
pub fn verify_inscribed(tri: &Triangulation, positions: &[Vector3<f64>]) -> CertificateReport {
    let verts: Vec<usize> = tri.vertices().collect();
    let max_norm_error = verts
        .iter()
        .map(|&v| (positions[v].norm() - 1.0).abs())
        .fold(0.0, f64::max);

    let dets: Vec<f64> = tri
        .faces()
        .iter()
        .map(|&[a, b, c]| positions[a].dot(&positions[b].cross(&positions[c])))
        .collect();
    let positive = dets.iter().filter(|&&d| d > 0.0).count();
    let negative = dets.iter().filter(|&&d| d < 0.0).count();
    let orientation = if positive >= negative { 1.0 } else { -1.0 };
    let orientation_consistent = positive == dets.len() || negative == dets.len();

    // outward unit normals under the majority orientation
    let normals: Vec<Vector3<f64>> = tri
        .faces()
        .iter()
        .map(|&[a, b, c]| {
            let n = (positions[b] - positions[a]).cross(&(positions[c] - positions[a]));
            let len = n.norm();
            if len > 0.0 {
                n * (orientation / len)
            } else {
                Vector3::zeros()
            }
        })
        .collect();

    let origin_margin = tri
        .faces()
        .iter()
        .zip(&normals)
        .map(|(f, n)| n.dot(&positions[f[0]]))
        .fold(f64::INFINITY, f64::min);

    let below = |f: usize, v: usize| -> f64 { -normals[f].dot(&(positions[v] - positions[tri.face(f)[0]])) };

    let dihedral_margins = (0..tri.num_edges())
        .filter(|&e| tri.is_interior_edge(e))
        .map(|e| {
            let c: Vec<(usize, usize)> = tri.opposite_corners(e).collect();
            let (f0, k0) = c[0];
            let (f1, k1) = c[1];
            let m = below(f0, tri.face(f1)[k1]).min(below(f1, tri.face(f0)[k0]));
            (e, m)
        })
        .collect();

    let empty_circle_margins = (0..tri.num_faces())
        .map(|f| {
            let face = tri.face(f);
            verts
                .iter()
                .filter(|v| !face.contains(v))
                .map(|&v| below(f, v))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let chord_arc_error = tri
        .edges()
        .iter()
        .map(|&[a, b]| {
            let chord = (positions[a] - positions[b]).norm();
            let arc = arc_between(&positions[a], &positions[b]);
            (chord - 2.0 * (0.5 * arc).sin()).abs()
        })
        .fold(0.0, f64::max);

    CertificateReport {
        max_norm_error,
        orientation_consistent,
        orientation,
        dihedral_margins,
        empty_circle_margins,
        chord_arc_error,
        origin_margin,
    }
}

/// Disk triangulation with complex vertex coordinates. Unused slots hold 0.
#[derive(Debug, Clone)]
pub struct PlanarLayout {
    tri: Arc<Triangulation>,
    positions: Vec<Complex64>,
}

impl PlanarLayout {
    pub fn new(tri: impl Into<Arc<Triangulation>>, positions: Vec<Complex64>) -> Result<Self> {
        let tri = tri.into();
        if tri.topology() != Topology::Disk {
            return Err(Error::UnsupportedTopology("planar layouts need a disk".into()));
        }
        if positions.len() != tri.num_vertices() {
            return Err(Error::LengthMismatch {
                expected: tri.num_vertices(),
                got: positions.len(),
            });
        }
        Ok(PlanarLayout { tri, positions })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn shared_triangulation(&self) -> Arc<Triangulation> {
        self.tri.clone()
    }

    pub fn positions(&self) -> &[Complex64] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Complex64 {
        self.positions[v]
    }

    /// Plane distances `l_Q` per edge.
    pub fn edge_lengths(&self) -> Vec<f64> {
        self.tri
            .edges()
            .iter()
            .map(|&[a, b]| (self.positions[a] - self.positions[b]).norm())
            .collect()
    }

    /// Twice the signed area of each face.
    pub fn signed_areas(&self) -> Vec<f64> {
        self.tri
            .faces()
            .iter()
            .map(|&[a, b, c]| cross(self.positions[b] - self.positions[a], self.positions[c] - self.positions[a]))
            .collect()
    }

    /// `Some(+1)` or `Some(−1)` when every face has that orientation.
    pub fn orientation(&self) -> Option<f64> {
        let areas = self.signed_areas();
        if areas.iter().all(|&a| a > 0.0) {
            Some(1.0)
        } else if areas.iter().all(|&a| a < 0.0) {
            Some(-1.0)
        } else {
            None
        }
    }

    /// Complex conjugate layout (reverses orientation).
    pub fn conjugated(&self) -> PlanarLayout {
        PlanarLayout {
            tri: self.tri.clone(),
            positions: self.positions.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Applies `z ↦ f(z)` to every used position.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> PlanarLayout {
        let positions = (0..self.positions.len())
            .map(|v| {
                if self.tri.is_used(v) {
                    f(self.positions[v])
                } else {
                    self.positions[v]
                }
            })
            .collect();
        PlanarLayout {
            tri: self.tri.clone(),
            positions,
        }
    }

    /// Largest distance between two used positions.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Complex64> = self.tri.vertices().map(|v| self.positions[v]).collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Stereographic image of `P` with the open star of the pole vertex removed,
/// and the projection factor on the remaining vertices (0 at the pole slot).
pub fn flatten_polyhedron(p: &InscribedPolyhedron, pole: usize) -> Result<(PlanarLayout, ConformalFactor)> {
    let tri = p.triangulation();
    if !tri.is_used(pole) || (p.position(pole) - north()).norm() > NORM_TOL {
        return Err(Error::PoleNotVertex(pole));
    }
    for v in tri.vertices() {
        let norm = p.position(v).norm();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotInscribed { vertex: v, norm });
        }
    }
    let disk = tri.remove_open_star(pole)?;
    let mut positions = vec![Complex64::new(0.0, 0.0); tri.num_vertices()];
    let mut w = ConformalFactor::zeros(tri.num_vertices());
    for v in disk.vertices() {
        positions[v] = stereo_project(&p.position(v))?;
        w[v] = projection_factor_at(&p.position(v))?;
    }
    Ok((PlanarLayout::new(disk, positions)?, w))
}

/// Inverse of [`flatten_polyhedron`]: projects the layout back to the sphere
/// and cones the boundary to a new north-pole vertex, placed in the first
/// unused slot (or appended). Faces of the result keep the layout's winding.
pub fn lift_to_polyhedron(layout: &PlanarLayout) -> Result<InscribedPolyhedron> {
    let tri = layout.triangulation();
    let z = layout.positions();
    if tri.vertices().any(|v| !(z[v].re.is_finite() && z[v].im.is_finite())) {
        return Err(Error::CertificateFailure("non-finite layout position".into()));
    }
    let sign = layout
        .orientation()
        .ok_or_else(|| Error::CertificateFailure("layout faces fold over".into()))?;

    let lengths = layout.edge_lengths();
    let angles = corner_angles(tri, &lengths, Flavor::Euclidean)?;
    for (e, m) in angles.delaunay_margins(tri) {
        if m <= PREDICATE_TOL {
            let [a, b] = tri.edge(e);
            return Err(Error::NotDelaunay(a, b, m));
        }
    }
    let k = angles.curvature(tri);
    for v in tri.boundary_vertices() {
        if k[v] <= PREDICATE_TOL {
            return Err(Error::BoundaryNotConvex(v, k[v]));
        }
    }

    // directed boundary edges x -> y as they appear in their faces
    let mut rim = Vec::new();
    for e in 0..tri.num_edges() {
        if tri.is_boundary_edge(e) {
            let (f, c) = tri.opposite_corners(e).next().expect("boundary edge has a face");
            let face = tri.face(f);
            rim.push((face[(c + 1) % 3], face[(c + 2) % 3]));
        }
    }
    for &(x, y) in &rim {
        if sign * cross(z[y] - z[x], -z[x]) <= PREDICATE_TOL {
            return Err(Error::CertificateFailure("origin is not strictly inside the layout".into()));
        }
    }

    let pole = (0..tri.num_vertices())
        .find(|&v| !tri.is_used(v))
        .unwrap_or(tri.num_vertices());
    let slots = tri.num_vertices().max(pole + 1);
    let mut faces = tri.faces().to_vec();
    faces.extend(rim.iter().map(|&(x, y)| [pole, y, x]));
    let closed = Triangulation::new(faces)?;
    let mut positions = vec![Vector3::zeros(); slots];
    for v in tri.vertices() {
        positions[v] = stereo_unproject(z[v]);
    }
    positions[pole] = north();
    let p = InscribedPolyhedron::new(closed, positions)?;
    if let Some(why) = p.certificates().first_failure() {
        return Err(Error::CertificateFailure(why));
    }
    Ok(p)
}

/// Quadrilateral of two triangles `ijk` and `jik'` sharing edge `ij`, given
/// as `[i, j, k, k']`.
#[derive(Debug, Clone, Copy)]
pub enum Quad {
    Plane([Complex64; 4]),
    Sphere([Vector3<f64>; 4]),
}

/// Intersection angle `Θ_ij` of the circumcircles of the two triangles of
/// `quad`, measured at `i` from the circle centers: twice the signed angle
/// between the directions to the two centers. It is zero for co-circular
/// quads and positive exactly when the edge is locally Delaunay.
pub fn circumcircle_intersection_angle(quad: &Quad) -> Result<f64> {
    // edge direction t and unit normal nu toward k, both tangent at i;
    // m1, m2 point from i toward the centers of the two circles
    let (t, nu, m1, m2) = match quad {
        Quad::Plane([i, j, k, k2]) => {
            let c1 = circumcenter(*i, *j, *k)?;
            let c2 = circumcenter(*i, *j, *k2)?;
            let t = (j - i) / (j - i).norm();
            let mut nu = Complex64::new(-t.im, t.re);
            if cross(t, k - i) < 0.0 {
                nu = -nu;
            }
            let v = |z: Complex64| Vector3::new(z.re, z.im, 0.0);
            (v(t), v(nu), v(c1 - i), v(c2 - i))
        }
        Quad::Sphere([i, j, k, k2]) => {
            let tangent = |x: Vector3<f64>| x - i * i.dot(&x);
            let t = tangent(*j).normalize();
            let mut nu = i.cross(&t);
            if nu.dot(k) < 0.0 {
                nu = -nu;
            }
            let pole = |a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>| -> Result<Vector3<f64>> {
                let n = (b - a).cross(&(c - a));
                if n.norm() <= PREDICATE_TOL {
                    return Err(Error::InadmissibleLengths {
                        face: 0,
                        reason: "collinear spherical triangle".into(),
                    });
                }
                // the cap containing the triangle is centered on the side of i
                Ok(if n.dot(a) >= 0.0 { n } else { -n })
            };
            (t, nu, tangent(pole(i, j, k)?), tangent(pole(i, j, k2)?))
        }
    };
    let beta1 = m1.dot(&nu).atan2(m1.dot(&t));
    let beta2 = (-m2.dot(&nu)).atan2(m2.dot(&t));
    Ok(2.0 * (beta1 + beta2))
}

fn circumcenter(a: Complex64, b: Complex64, c: Complex64) -> Result<Complex64> {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * cross(b, c);
    if d.abs() <= PREDICATE_TOL {
        return Err(Error::InadmissibleLengths {
            face: 0,
            reason: "collinear triangle".into(),
        });
    }
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    Ok(a + Complex64::new(c.im * b2 - b.im * c2, b.re * c2 - c.re * b2) / d)
}

/// The angle identity for `Θ_ij` from edge lengths
/// `[l_ij, l_ik, l_jk, l_ik', l_jk']`: the four angles at `i`, `j` minus the
/// two angles at `k`, `k'`. In the plane this equals `2π − 2(φ_k + φ_k')`.
pub fn intersection_angle_from_lengths(l: [f64; 5], flavor: Flavor) -> Result<f64> {
    let [ij, ik, jk, ik2, jk2] = l;
    let bad = |face: usize| move |reason: String| Error::InadmissibleLengths { face, reason };
    // corners (i, j, k): sides opposite are jk, ik, ij
    let a = triangle_angles([jk, ik, ij], flavor).map_err(bad(0))?;
    let b = triangle_angles([jk2, ik2, ij], flavor).map_err(bad(1))?;
    Ok(a[0] + a[1] + b[0] + b[1] - a[2] - b[2])
}

/// Planar specialization of [`intersection_angle_from_lengths`].
pub fn plane_intersection_angle(phi_k: f64, phi_k2: f64) -> f64 {
    2.0 * PI - 2.0 * (phi_k + phi_k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn octahedron() -> (Triangulation, Vec<Vector3<f64>>) {
        let t = Triangulation::new(vec![
            [4, 0, 1],
            [4, 1, 2],
            [4, 2, 3],
            [4, 3, 0],
            [5, 1, 0],
            [5, 2, 1],
            [5, 3, 2],
            [5, 0, 3],
        ])
        .unwrap();
        let p = vec![
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(-1.0, 0.0, 0.0),
            Vector3::new(0.0, -1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(0.0, 0.0, -1.0),
        ];
        (t, p)
    }

    fn square_layout(diagonal_only: bool) -> PlanarLayout {
        if diagonal_only {
            let t = Triangulation::new(vec![[0, 1, 2], [0, 2, 3]]).unwrap();
            PlanarLayout::new(t, vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]).unwrap()
        } else {
            // center 5, corners 0..3 counterclockwise; slot 4 unused
            let t = Triangulation::with_slots(6, vec![[5, 0, 1], [5, 1, 2], [5, 2, 3], [5, 3, 0]]).unwrap();
            let mut z = vec![c(0.0, 0.0); 6];
            z[0] = c(1.0, 0.0);
            z[1] = c(0.0, 1.0);
            z[2] = c(-1.0, 0.0);
            z[3] = c(0.0, -1.0);
            PlanarLayout::new(t, z).unwrap()
        }
    }

    #[test]
    fn projection_examples() {
        assert_eq!(stereo_project(&Vector3::new(0.0, 0.0, -1.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(stereo_project(&Vector3::new(1.0, 0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(stereo_project(&Vector3::new(0.0, 1.0, 0.0)).unwrap(), c(0.0, 1.0));
        assert!(matches!(stereo_project(&north()), Err(Error::AtPole)));
        assert_eq!(stereo_unproject(c(0.0, 0.0)), Vector3::new(0.0, 0.0, -1.0));
        assert_eq!(stereo_unproject(c(1.0, 0.0)), Vector3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let z = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let back = stereo_project(&stereo_unproject(z)).unwrap();
            assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm()), "{z} {back}");
        }
    }

    #[test]
    fn central_examples() {
        assert_eq!(central_project(&Vector3::new(0.0, 0.0, 2.0)).unwrap(), north());
        let p = central_project(&Vector3::new(3.0, 4.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p.x, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 0.8, epsilon = 1e-15);
        assert!(matches!(central_project(&Vector3::zeros()), Err(Error::ZeroVector)));
    }

    #[test]
    fn factor_examples() {
        let w = projection_factor(&[Vector3::new(0.0, 0.0, -1.0), Vector3::new(1.0, 0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(w[0], 0.5f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 0.0, epsilon = 1e-15);
        let p = stereo_unproject(c(2.0, 0.0));
        assert_abs_diff_eq!(projection_factor_at(&p).unwrap(), 2.5f64.ln(), epsilon = 1e-14);
        assert!(projection_factor(&[north()]).is_err());
    }

    #[test]
    fn octahedron_certificates() {
        let (t, p) = octahedron();
        let poly = InscribedPolyhedron::new(t, p).unwrap();
        let r = poly.certificates();
        assert!(r.passes(), "{:?}", r.first_failure());
        assert_eq!(r.orientation, 1.0);
        for (l, a) in poly.chord_lengths().iter().zip(poly.arc_lengths()) {
            assert_abs_diff_eq!(*l, 2f64.sqrt(), epsilon = 1e-15);
            assert_abs_diff_eq!(a, FRAC_PI_2, epsilon = 1e-15);
        }
    }

    #[test]
    fn pulled_vertex_fails() {
        let (t, mut p) = octahedron();
        p[0] *= 0.5;
        let r = verify_inscribed(&t, &p);
        assert!(!r.inscribed());
        assert!(!r.passes());
        assert!(matches!(InscribedPolyhedron::new(t, p), Err(Error::NotInscribed { vertex: 0, .. })));
    }

    #[test]
    fn flatten_octahedron() {
        let (t, p) = octahedron();
        let poly = InscribedPolyhedron::new(t, p).unwrap();
        let (layout, w) = flatten_polyhedron(&poly, 4).unwrap();
        let z = layout.positions();
        for (v, want) in [(0, c(1.0, 0.0)), (1, c(0.0, 1.0)), (2, c(-1.0, 0.0)), (3, c(0.0, -1.0)), (5, c(0.0, 0.0))] {
            assert!((z[v] - want).norm() < 1e-15);
        }
        let lt = layout.triangulation();
        let lq = layout.edge_lengths();
        let lp = poly.chord_lengths();
        for (e, &[a, b]) in lt.edges().iter().enumerate() {
            let pe = poly.triangulation().edge_between(a, b).unwrap();
            let scaled = (0.5 * (w[a] + w[b])).exp() * lp[pe];
            assert!((scaled - lq[e]).abs() <= 1e-10 * lq[e]);
        }
        // the stereographic image reverses the outward orientation
        assert_eq!(layout.orientation(), Some(-1.0));
        assert!(matches!(flatten_polyhedron(&poly, 0), Err(Error::PoleNotVertex(0))));
    }

    #[test]
    fn lift_square() {
        let poly = lift_to_polyhedron(&square_layout(false)).unwrap();
        assert_eq!(poly.triangulation().num_faces(), 8);
        let want = [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(-1.0, 0.0, 0.0),
            Vector3::new(0.0, -1.0, 0.0),
            north(),
            Vector3::new(0.0, 0.0, -1.0),
        ];
        for (p, q) in poly.positions().iter().zip(&want) {
            assert!((p - q).norm() < 1e-15);
        }
        let (back, _) = flatten_polyhedron(&poly, 4).unwrap();
        for v in [0, 1, 2, 3, 5] {
            assert!((back.position(v) - square_layout(false).position(v)).norm() < 1e-15);
        }
    }

    #[test]
    fn lift_rejects_cocircular_square() {
        let r = lift_to_polyhedron(&square_layout(true));
        assert!(matches!(r, Err(Error::NotDelaunay(..))), "{r:?}");
    }

    #[test]
    fn lift_rejects_flat_boundary_and_offcenter_origin() {
        // boundary vertex 1 sits on the segment 0-2
        let t = Triangulation::new(vec![[3, 0, 1], [3, 1, 2], [3, 2, 4], [3, 4, 0]]).unwrap();
        let z = vec![c(1.0, -1.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(-1.5, 0.0)];
        let r = lift_to_polyhedron(&PlanarLayout::new(t.clone(), z).unwrap());
        assert!(matches!(r, Err(Error::BoundaryNotConvex(1, _)) | Err(Error::NotDelaunay(..))), "{r:?}");
        let shifted: Vec<Complex64> = square_layout(false).positions().iter().map(|z| z + c(2.0, 0.0)).collect();
        let tri = square_layout(false).shared_triangulation();
        let r = lift_to_polyhedron(&PlanarLayout::new(tri, shifted).unwrap());
        assert!(matches!(r, Err(Error::CertificateFailure(_))), "{r:?}");
    }

    fn hull_oracle(points: &[Vector3<f64>]) -> Vec<[usize; 3]> {
        // brute force: a triple is a face when every other point lies strictly
        // on one side of its plane
        let n = points.len();
        let mut faces = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in a + 1..n {
                    if c == b {
                        continue;
                    }
                    let nrm = (points[b] - points[a]).cross(&(points[c] - points[a]));
                    if (0..n)
                        .filter(|&v| v != a && v != b && v != c)
                        .all(|v| nrm.dot(&(points[v] - points[a])) < 0.0)
                    {
                        faces.push([a, b, c]);
                    }
                }
            }
        }
        faces
    }

    #[test]
    fn random_hulls_pass_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(6..25);
            let pts: Vec<Vector3<f64>> = (0..n)
                .map(|_| {
                    let v = Vector3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    );
                    central_project(&v).unwrap()
                })
                .collect();
            let faces = hull_oracle(&pts);
            let t = Triangulation::new(faces).unwrap();
            let r = verify_inscribed(&t, &pts);
            if r.origin_margin > 1e-6 {
                assert!(r.passes(), "{:?}", r.first_failure());
            } else {
                assert!(r.convex() && r.empty_circles());
            }
        }
    }

    #[test]
    fn intersection_angle_plane_examples() {
        let h = 3f64.sqrt() / 2.0;
        let q = Quad::Plane([c(0.0, 0.0), c(1.0, 0.0), c(0.5, h), c(0.5, -h)]);
        assert_abs_diff_eq!(circumcircle_intersection_angle(&q).unwrap(), 2.0 * PI / 3.0, epsilon = 1e-14);
        let id = intersection_angle_from_lengths([1.0; 5], Flavor::Euclidean).unwrap();
        assert_abs_diff_eq!(id, 2.0 * PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(plane_intersection_angle(PI / 3.0, PI / 3.0), 2.0 * PI / 3.0, epsilon = 1e-15);

        let q = Quad::Plane([c(0.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        assert_abs_diff_eq!(circumcircle_intersection_angle(&q).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn intersection_angle_identities_and_conformality() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 200 {
            // a small random spherical quad near a random point
            let center = central_project(&Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..0.5),
            ))
            .unwrap();
            let s = rng.gen_range(0.05..0.6);
            let pts: Vec<Vector3<f64>> = (0..4)
                .map(|_| {
                    let d = Vector3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s));
                    central_project(&(center + d)).unwrap()
                })
                .collect();
            let [i, j, k, k2] = [pts[0], pts[1], pts[2], pts[3]];
            // k and k' on opposite sides of the great circle through i, j
            let side = i.cross(&j);
            if side.dot(&k) * side.dot(&k2) >= 0.0 || side.dot(&k).abs() < 1e-3 || side.dot(&k2).abs() < 1e-3 {
                continue;
            }
            let arc = |a: &Vector3<f64>, b: &Vector3<f64>| arc_between(a, b);
            let l = [arc(&i, &j), arc(&i, &k), arc(&j, &k), arc(&i, &k2), arc(&j, &k2)];
            let Ok(sphere_id) = intersection_angle_from_lengths(l, Flavor::Spherical) else {
                continue;
            };
            let sphere_geo = circumcircle_intersection_angle(&Quad::Sphere([i, j, k, k2])).unwrap();
            assert!((sphere_id - sphere_geo).abs() < 1e-8, "{sphere_id} {sphere_geo}");

            // circles through the pole map to lines and caps containing it
            // map to disk exteriors; keep to the generic case
            let cap_has_pole = |a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>| {
                let n = (b - a).cross(&(c - a));
                let s = n.dot(a).signum();
                s * n.z >= s * n.dot(a)
            };
            if cap_has_pole(&i, &j, &k) || cap_has_pole(&i, &j, &k2) {
                continue;
            }
            let z = [i, j, k, k2].map(|p| stereo_project(&p).unwrap());
            if cross(z[1] - z[0], z[2] - z[0]) * cross(z[1] - z[0], z[3] - z[0]) >= 0.0 {
                continue;
            }
            let plane_geo = circumcircle_intersection_angle(&Quad::Plane(z)).unwrap();
            let d = |a: Complex64, b: Complex64| (a - b).norm();
            let lz = [d(z[0], z[1]), d(z[0], z[2]), d(z[1], z[2]), d(z[0], z[3]), d(z[1], z[3])];
            let plane_id = intersection_angle_from_lengths(lz, Flavor::Euclidean).unwrap();
            assert!((plane_id - plane_geo).abs() < 1e-8, "{plane_id} {plane_geo}");
            assert!((plane_geo - sphere_geo).abs() < 1e-8, "{plane_geo} {sphere_geo}");
            checked += 1;
        }
    }
}
