//! Uniformizes a conformally perturbed octasphere and compares the factor
//! with the exact one.
//!
//!     cargo run --release --example uniformize -- 3 "0.2*x - 0.1*z"

use discrete_uniformization::lab::{ground_truth_factor, test_problem, LengthMode, LinearField};
use discrete_uniformization::uniformize::{uniformize, Method, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let level: usize = args.first().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let phi: LinearField = args.get(1).map(String::as_str).unwrap_or("0.2*x - 0.1*z").parse()?;

    let (sphere, problem) = test_problem(level, &phi, LengthMode::VertexScaled)?;
    let tri = problem.mesh().triangulation();
    println!("level {level}: {} vertices, {} faces, phi = {phi}", tri.num_vertices(), tri.num_faces());
    println!("marks X={} Y={} Z={}", problem.x(), problem.y(), problem.z());

    let res = uniformize(&problem, Method::Newton, &SolverOptions::default())?;
    let d = &res.diagnostics;
    println!("newton iterations   {}", d.iterations);
    println!("curvature residual  {:.2e}", d.curvature_residual);
    println!("delaunay margin     {:.4}", d.min_delaunay_margin);
    println!("boundary curvature  {:.4}", d.min_boundary_curvature);
    println!("edge dictionary     {:.2e}", d.edge_dictionary_error);

    let exact = ground_truth_factor(&sphere, &phi)?;
    let err = res.u.max_diff_on(&exact, tri.vertices());
    println!("max |u + phi|       {err:.3e}");

    let cert = res.polyhedron.certificates();
    match cert.first_failure() {
        None => println!("certificates pass (min dihedral {:.3e})", cert.min_dihedral()),
        Some(why) => println!("certificate failed: {why}"),
    }
    Ok(())
}
