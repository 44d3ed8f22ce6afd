//! Perturbed triangles against the angle, area and distortion estimates, and
//! the spherical/Euclidean angle gap of small triangles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use discrete_uniformization::mesh::{
    angle_perturbation_bound, map_distortion_bound, spherical_euclidean_angle_gap, triangle_angles, Flavor,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps = 0.3;
    let mut tight: f64 = 0.0;
    let mut tight_map: f64 = 0.0;
    let mut n = 0;
    while n < 200 {
        let l = [rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5)];
        let ok = triangle_angles(l, Flavor::Euclidean).is_ok_and(|a| a.iter().all(|&x| x >= eps));
        if !ok {
            continue;
        }
        let delta = rng.gen_range(0.0..eps * eps / 600.0);
        let l2 = l.map(|x| x * (1.0 + rng.gen_range(-delta..=delta)));
        let a = angle_perturbation_bound(l, l2, eps)?;
        let m = map_distortion_bound(l, l2, eps)?;
        assert!(a.holds() && m.holds());
        if a.delta > 0.0 {
            tight = tight.max(a.max_angle_change / a.angle_bound);
            let (s1, s2) = m.singular_values;
            tight_map = tight_map.max((s1 - 1.0).abs().max((s2 - 1.0).abs()) / m.bound);
        }
        n += 1;
    }
    println!("{n} perturbed triangles: angle change uses {:.2e} of its bound, distortion {:.2e}", tight, tight_map);

    for s in [0.5, 0.1, 0.01] {
        let g = spherical_euclidean_angle_gap([s, s * 0.9, s * 1.1])?;
        println!("side {s:5}: angle gap {:.3e}, bound {:.3e}", g.max_gap(), g.bound);
    }
    Ok(())
}
