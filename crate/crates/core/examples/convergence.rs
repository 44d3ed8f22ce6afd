//! Error of the discrete uniformization factor against the exact `−φ` on
//! refined octaspheres.
//!
//!     cargo run --release --example convergence -- "0.3*z" 2 5

use std::time::Instant;

use discrete_uniformization::lab::{convergence_experiment, LengthMode, LinearField};
use discrete_uniformization::uniformize::{Method, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let phi: LinearField = args.first().map(String::as_str).unwrap_or("0.3*z").parse()?;
    let lo: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let hi: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let levels: Vec<usize> = (lo..=hi).collect();

    let start = Instant::now();
    let rows = convergence_experiment(
        &phi,
        &levels,
        LengthMode::VertexScaled,
        Method::Newton,
        &SolverOptions::default(),
        levels.len(),
    )?;
    println!("phi = {phi}");
    println!("level  verts    |l|        eps        err        ratio   slope   K_res     iters");
    for r in &rows {
        println!(
            "{:5}  {:5}  {:.3e}  {:.3e}  {:.3e}  {:>6}  {:>6}  {:.1e}  {}",
            r.level,
            r.vertices,
            r.max_length,
            r.epsilon,
            r.error,
            r.ratio.map_or("-".into(), |x| format!("{x:.3}")),
            r.slope.map_or("-".into(), |x| format!("{x:.3}")),
            r.curvature_residual,
            r.iterations,
        );
    }
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
