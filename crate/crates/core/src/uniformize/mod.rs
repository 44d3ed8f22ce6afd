//! Discrete uniformization of a marked spherical mesh.
//!
//! The mesh is punctured at `X`, the chordal lengths `2 sin(l/2)` are
//! conformally flattened with Dirichlet data on the link of `X`, the flat disk
//! is developed into the plane, normalized by `Z → 0`, `Y → 1`, and lifted by
//! inverse stereographic projection to a convex polyhedron inscribed in the
//! unit sphere.

mod layout;
mod solver;

use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result, Stage};
use crate::mesh::{Flavor, MetricMesh, Topology, Triangulation};
use crate::scaling::{chord_lengths, scale_euclidean, scale_spherical, ConformalFactor};
use crate::stereo::{lift_to_polyhedron, InscribedPolyhedron, PlanarLayout};

pub use layout::{check_convex_boundary, develop, normalize_layout};
pub use solver::{initial_guess, solve_curvature_bvp, BoundaryData, Method, SolveReport, SolverOptions};

/// A closed spherical mesh with marked vertices `X`, `Y`, `Z`.
#[derive(Debug, Clone)]
pub struct UniformizationProblem {
    mesh: MetricMesh,
    marks: [usize; 3],
}

impl UniformizationProblem {
    /// `marks` is `[X, Y, Z]`.
    pub fn new(mesh: MetricMesh, marks: [usize; 3]) -> Result<Self> {
        if mesh.flavor() != Flavor::Spherical {
            return Err(Error::HypothesisViolated("uniformization needs spherical lengths".into()));
        }
        let tri = mesh.triangulation();
        if tri.topology() != Topology::Sphere {
            return Err(Error::NotClosed);
        }
        for m in marks {
            if !tri.is_used(m) {
                return Err(Error::MarkOutOfRange(m));
            }
        }
        let [x, y, z] = marks;
        if x == y || y == z || x == z {
            return Err(Error::CoincidentMarks);
        }
        if tri.link(x).len() < 3 {
            return Err(Error::DegenerateLink(x));
        }
        if tri.link(x).contains(&z) {
            // Z would have to sit antipodal to X across a single edge
            return Err(Error::HypothesisViolated("Z must not be adjacent to X".into()));
        }
        Ok(UniformizationProblem { mesh, marks })
    }

    pub fn mesh(&self) -> &MetricMesh {
        &self.mesh
    }

    pub fn marks(&self) -> [usize; 3] {
        self.marks
    }

    pub fn x(&self) -> usize {
        self.marks[0]
    }

    pub fn y(&self) -> usize {
        self.marks[1]
    }

    pub fn z(&self) -> usize {
        self.marks[2]
    }

    fn arc(&self, a: usize, b: usize) -> f64 {
        let tri = self.mesh.triangulation();
        self.mesh.lengths()[tri.edge_between(a, b).expect("adjacent vertices")]
    }
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// `‖K_int‖∞` of the solved flat disk.
    pub curvature_residual: f64,
    pub min_boundary_curvature: f64,
    pub min_delaunay_margin: f64,
    /// Development consistency residual and the layout diameter it is judged against.
    pub layout_residual: f64,
    pub layout_diameter: f64,
    /// Spread of the per-neighbor estimates of `u_X`.
    pub apex_spread: f64,
    /// Largest relative mismatch between scaled chords and polyhedron edges.
    pub edge_dictionary_error: f64,
    pub iterations: usize,
    /// `log d_YZ` removed during normalization.
    pub log_scale: f64,
}

#[derive(Debug, Clone)]
pub struct UniformizationResult {
    pub u: ConformalFactor,
    pub polyhedron: InscribedPolyhedron,
    pub diagnostics: Diagnostics,
}

impl UniformizationResult {
    /// Sphere positions `ψ`, with `ψ(X)` at the north pole.
    pub fn positions(&self) -> &[Vector3<f64>] {
        self.polyhedron.positions()
    }
}

/// Disk obtained by removing the open star of `X`, with chordal lengths.
pub fn puncture(problem: &UniformizationProblem) -> Result<(Arc<Triangulation>, Vec<f64>)> {
    let tri = problem.mesh.triangulation();
    let disk = tri.remove_open_star(problem.x())?;
    let chords = chord_lengths(problem.mesh.lengths());
    let le = disk
        .edges()
        .iter()
        .map(|&[a, b]| chords[tri.edge_between(a, b).expect("disk edge is a mesh edge")])
        .collect();
    Ok((Arc::new(disk), le))
}

/// `u_i = log 2 − 2 log(2 sin(l_iX / 2))` on the link of `X`.
pub fn dirichlet_data(problem: &UniformizationProblem) -> Result<BoundaryData> {
    let x = problem.x();
    problem
        .mesh
        .triangulation()
        .link(x)
        .iter()
        .map(|&i| {
            let c = 2.0 * (0.5 * problem.arc(i, x)).sin();
            if !(c > 0.0) {
                return Err(Error::InadmissibleLengths {
                    face: problem.mesh.triangulation().star(x)[0],
                    reason: format!("chord {c} on edge ({i}, {x})"),
                });
            }
            Ok((i, 2f64.ln() - 2.0 * c.ln()))
        })
        .collect()
}

/// Flat layout of the solved disk: developed, checked and convex.
pub fn layout_flat(disk: &Arc<Triangulation>, lengths: &[f64]) -> Result<(PlanarLayout, f64)> {
    let (layout, residual) = develop(disk, lengths)?;
    let diameter = layout.diameter();
    if !(residual <= 1e-8 * diameter) {
        return Err(Error::HolonomyResidualExceeded(residual));
    }
    check_convex_boundary(&layout)?;
    Ok((layout, residual))
}

/// Factor on all of `V(T)` from the normalized flat factor `ũ`; returns the
/// factor and the spread of the apex estimates.
pub fn assemble_factor(
    problem: &UniformizationProblem,
    u_tilde: &ConformalFactor,
    normalized: &PlanarLayout,
) -> Result<(ConformalFactor, f64)> {
    let tri = problem.mesh.triangulation();
    let x = problem.x();
    let mut u = ConformalFactor::zeros(tri.num_vertices());
    for v in tri.vertices().filter(|&v| v != x) {
        let g = normalized.position(v);
        u[v] = u_tilde[v] - (0.5 * (g.norm_sqr() + 1.0)).ln();
    }
    let estimates: Vec<f64> = tri
        .link(x)
        .iter()
        .map(|&i| 2f64.ln() - 2.0 * (2.0 * (0.5 * problem.arc(i, x)).sin()).ln() - u_tilde[i])
        .collect();
    let lo = estimates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if !(spread <= 1e-8) {
        return Err(Error::InconsistentApex(spread));
    }
    u[x] = estimates.iter().sum::<f64>() / estimates.len() as f64;
    Ok((u, spread))
}

/// Largest relative gap between `u * (2 sin(l/2))` and the chord lengths of `p`.
pub fn check_edge_dictionary(problem: &UniformizationProblem, u: &ConformalFactor, p: &InscribedPolyhedron) -> Result<f64> {
    let tri = problem.mesh.triangulation();
    let scaled = scale_euclidean(tri, &chord_lengths(problem.mesh.lengths()), u);
    let mut worst: f64 = 0.0;
    for (e, &[a, b]) in tri.edges().iter().enumerate() {
        let chord = (p.position(a) - p.position(b)).norm();
        let rel = (scaled[e] - chord).abs() / chord;
        if !(rel <= 1e-8) {
            return Err(Error::EdgeDictionaryMismatch(a, b, rel));
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// The full pipeline. Errors carry the stage they were raised in.
pub fn uniformize(problem: &UniformizationProblem, method: Method, opts: &SolverOptions) -> Result<UniformizationResult> {
    let (disk, le) = puncture(problem).map_err(|e| e.at(Stage::Puncture))?;
    let mut data = dirichlet_data(problem).map_err(|e| e.at(Stage::Dirichlet))?;
    for d in &mut data {
        d.1 += opts.dirichlet_shift;
    }
    let start = initial_guess(&disk, &le, &data, opts).map_err(|e| e.at(Stage::InitialGuess))?;
    let solved = solve_curvature_bvp(&disk, &le, &start, method, opts).map_err(|e| e.at(Stage::Solve))?;

    let flat = scale_euclidean(&disk, &le, &solved.u);
    let (layout, layout_residual) = layout_flat(&disk, &flat).map_err(|e| e.at(Stage::Layout))?;
    let layout_diameter = layout.diameter();
    let (normalized, log_scale) =
        normalize_layout(&layout, problem.y(), problem.z()).map_err(|e| e.at(Stage::Normalize))?;
    let mut u_tilde = solved.u.clone();
    for v in disk.vertices() {
        u_tilde[v] -= log_scale;
    }

    // the development is counterclockwise while stereographic images of
    // outward-oriented faces are clockwise; conjugation fixes Z and Y
    let polyhedron = lift_to_polyhedron(&normalized.conjugated()).map_err(|e| e.at(Stage::Lift))?;
    if polyhedron.triangulation().num_vertices() != problem.mesh.triangulation().num_vertices() {
        return Err(Error::CertificateFailure("pole was not placed at X".into()).at(Stage::Lift));
    }

    let (u, apex_spread) = assemble_factor(problem, &u_tilde, &normalized).map_err(|e| e.at(Stage::Assemble))?;
    let edge_dictionary_error = check_edge_dictionary(problem, &u, &polyhedron).map_err(|e| e.at(Stage::Assemble))?;

    Ok(UniformizationResult {
        u,
        polyhedron,
        diagnostics: Diagnostics {
            curvature_residual: solved.residual,
            min_boundary_curvature: solved.min_boundary_curvature,
            min_delaunay_margin: solved.min_delaunay_margin,
            layout_residual,
            layout_diameter,
            apex_spread,
            edge_dictionary_error,
            iterations: solved.iterations,
            log_scale,
        },
    })
}

/// Spherical lengths of the uniformized mesh, `u *_s l`.
pub fn uniformized_lengths(problem: &UniformizationProblem, u: &ConformalFactor) -> Result<Vec<f64>> {
    scale_spherical(problem.mesh.triangulation(), problem.mesh.lengths(), u)
}
