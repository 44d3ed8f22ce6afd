//! Random planar Delaunay layout, lifted to an inscribed polyhedron and
//! projected back down.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use discrete_uniformization::lab::random::{random_inscribed_polyhedron, LayoutSpec};
use discrete_uniformization::stereo::{flatten_polyhedron, lift_to_polyhedron};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (layout, p) = random_inscribed_polyhedron(&mut rng, &LayoutSpec::default())?;
    let tri = p.triangulation();
    println!("{} vertices, {} faces, Euler characteristic {}", tri.num_vertices(), tri.num_faces(), tri.euler_characteristic());

    let cert = p.certificates();
    println!("inscribed {}  convex {}  empty circles {}  origin inside {}",
        cert.inscribed(), cert.convex(), cert.empty_circles(), cert.origin_inside());

    let pole = layout.triangulation().num_vertices();
    let (flat, w) = flatten_polyhedron(&p, pole)?;
    let drift = layout
        .triangulation()
        .vertices()
        .map(|v| (flat.position(v) - layout.position(v)).norm())
        .fold(0.0, f64::max);
    println!("flatten drift {drift:.2e}");
    let wmax = layout.triangulation().vertices().map(|v| w[v]).fold(f64::NEG_INFINITY, f64::max);
    println!("largest projection factor {wmax:.4}");

    let again = lift_to_polyhedron(&flat)?;
    let drift = tri
        .vertices()
        .map(|v| (again.position(v) - p.position(v)).norm())
        .fold(0.0, f64::max);
    println!("lift drift {drift:.2e}");
    Ok(())
}
