//! Compares the cotangent Jacobian of the curvature with central differences
//! on random Delaunay disks.
//!
//!     cargo run --release --example jacobian_check -- 20

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use discrete_uniformization::lab::random::{random_admissible_factor, random_disk_mesh, LayoutSpec};
use discrete_uniformization::scaling::fd_jacobian_check;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    let spec = LayoutSpec::default();
    let mut worst: f64 = 0.0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mesh = random_disk_mesh(&mut rng, &spec)?;
        let u = random_admissible_factor(&mut rng, &mesh, 0.2, 1e-2);
        let err = fd_jacobian_check(&mesh, &u, 1e-5)?;
        println!("seed {seed:3}  {:3} vertices  discrepancy {err:.2e}", mesh.triangulation().num_vertices());
        worst = worst.max(err);
    }
    println!("worst {worst:.2e}");
    Ok(())
}
