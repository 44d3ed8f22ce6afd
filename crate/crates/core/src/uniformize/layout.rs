use std::collections::VecDeque;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{triangle_angles, Flavor, Triangulation};
use crate::stereo::PlanarLayout;

/// Isometric development of a flat disk, faces counterclockwise.
///
/// The seed is face 0 with its lowest-index vertex at the origin and its
/// successor in the face on the positive real axis. Returns the layout and
/// the consistency residual: the largest distance between the position a
/// face predicts for an already placed vertex and its stored position.
pub fn develop(tri: &Arc<Triangulation>, lengths: &[f64]) -> Result<(PlanarLayout, f64)> {
    let n = tri.num_vertices();
    let mut pos: Vec<Option<Complex64>> = vec![None; n];
    let mut done = vec![false; tri.num_faces()];
    let mut residual: f64 = 0.0;

    let angles_of = |f: usize| -> Result<[f64; 3]> {
        let l = tri.face_edges(f).map(|e| lengths[e]);
        triangle_angles(l, Flavor::Euclidean).map_err(|reason| Error::InadmissibleLengths { face: f, reason })
    };

    let face = tri.face(0);
    let k0 = (0..3).min_by_key(|&k| face[k]).unwrap();
    let (a, b) = (face[k0], face[(k0 + 1) % 3]);
    pos[a] = Some(Complex64::new(0.0, 0.0));
    let lab = lengths[tri.edge_between(a, b).unwrap()];
    pos[b] = Some(Complex64::new(lab, 0.0));

    let mut queue = VecDeque::from([0usize]);
    done[0] = true;
    while let Some(f) = queue.pop_front() {
        let face = tri.face(f);
        let ang = angles_of(f)?;
        // every face in the queue has at least one placed edge; use the
        // first consecutive placed pair (p, q) and predict r
        let k = (0..3)
            .find(|&k| pos[face[k]].is_some() && pos[face[(k + 1) % 3]].is_some())
            .expect("queued face shares a placed edge");
        let (p, q, r) = (face[k], face[(k + 1) % 3], face[(k + 2) % 3]);
        let (zp, zq) = (pos[p].unwrap(), pos[q].unwrap());
        let lpr = lengths[tri.edge_between(p, r).unwrap()];
        let dir = (zq - zp) / (zq - zp).norm();
        let zr = zp + dir * Complex64::from_polar(lpr, ang[k]);
        match pos[r] {
            Some(old) => residual = residual.max((old - zr).norm()),
            None => pos[r] = Some(zr),
        }
        for e in tri.face_edges(f) {
            for g in tri.edge_faces(e) {
                if !done[g] {
                    done[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }
    // second sweep: every face's three stored positions must reproduce its lengths
    for f in 0..tri.num_faces() {
        let face = tri.face(f);
        for (k, e) in tri.face_edges(f).into_iter().enumerate() {
            let (i, j) = (face[(k + 1) % 3], face[(k + 2) % 3]);
            let d = (pos[i].unwrap() - pos[j].unwrap()).norm();
            residual = residual.max((d - lengths[e]).abs());
        }
    }
    let positions = pos.into_iter().map(|z| z.unwrap_or_default()).collect();
    Ok((PlanarLayout::new(tri.clone(), positions)?, residual))
}

/// Checks that the boundary polygon turns left at every vertex.
pub fn check_convex_boundary(layout: &PlanarLayout) -> Result<()> {
    let tri = layout.triangulation();
    let rim = tri.boundary_loop();
    let m = rim.len();
    for k in 0..m {
        let (a, b, c) = (rim[(k + m - 1) % m], rim[k], rim[(k + 1) % m]);
        let (za, zb, zc) = (layout.position(a), layout.position(b), layout.position(c));
        let u = zb - za;
        let v = zc - zb;
        if !(u.re * v.im - u.im * v.re > 0.0) {
            return Err(Error::NonConvexBoundary(b));
        }
    }
    Ok(())
}

/// `z ↦ (z − g(Z)) / (g(Y) − g(Z))`; also returns `log |g(Y) − g(Z)|`.
pub fn normalize_layout(layout: &PlanarLayout, y: usize, z: usize) -> Result<(PlanarLayout, f64)> {
    let tri = layout.triangulation();
    for v in [y, z] {
        if !tri.is_used(v) {
            return Err(Error::MarkOutOfRange(v));
        }
    }
    if y == z {
        return Err(Error::CoincidentMarks);
    }
    let z0 = layout.position(z);
    let d = layout.position(y) - z0;
    if d.norm() == 0.0 {
        return Err(Error::CoincidentMarks);
    }
    Ok((layout.map(|w| (w - z0) / d), d.norm().ln()))
}
