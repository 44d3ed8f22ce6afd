//! Isoperimetric constants of small graphs, exact and sampled, and the sampled
//! lower bound on refined octaspheres.

use discrete_uniformization::calculus::{isoperimetric_constant, Graph, IsoMode};
use discrete_uniformization::lab::octasphere;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k4 = Graph::new(4, vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]);
    println!("K4        {:.6}", isoperimetric_constant(&k4, &[1.0; 6], IsoMode::Exhaustive)?);
    let path = Graph::new(5, vec![[0, 1], [1, 2], [2, 3], [3, 4]]);
    println!("path P5   {:.6}", isoperimetric_constant(&path, &[1.0; 4], IsoMode::Exhaustive)?);

    let sampled = IsoMode::Sampled { seeds: 32, rng_seed: 1 };
    for level in 1..=4 {
        let s = octasphere(level)?;
        let lengths = s.round_lengths();
        let c = isoperimetric_constant(&s.tri.graph(), &lengths, sampled)?;
        println!("octasphere {level}: {:5} vertices  C >= {c:.4}", s.tri.num_vertices());
    }
    Ok(())
}
