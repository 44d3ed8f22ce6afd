//! Certificates of random inscribed polyhedra before and after a rotation,
//! and of a polyhedron pushed off the sphere.

use nalgebra::{Rotation3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use discrete_uniformization::lab::random::{random_inscribed_polyhedron, LayoutSpec};
use discrete_uniformization::stereo::verify_inscribed;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = LayoutSpec::default();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, p) = random_inscribed_polyhedron(&mut rng, &spec)?;
        let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), 0.3 + seed as f64);
        let turned: Vec<_> = p.positions().iter().map(|q| rot * q).collect();
        let a = p.certificates();
        let b = verify_inscribed(p.triangulation(), &turned);
        println!(
            "seed {seed}: {:2} vertices  passes {} / rotated {}  min dihedral {:.3e}",
            p.triangulation().num_vertices(),
            a.passes(),
            b.passes(),
            b.min_dihedral()
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (_, p) = random_inscribed_polyhedron(&mut rng, &spec)?;
    let mut bent = p.positions().to_vec();
    bent[0] *= 1.05;
    let r = verify_inscribed(p.triangulation(), &bent);
    println!("one vertex pushed out: {}", r.first_failure().unwrap_or_default());
    Ok(())
}
