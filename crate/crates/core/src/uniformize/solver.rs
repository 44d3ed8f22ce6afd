use crate::calculus::{laplacian_matrix, solve_spd, SpdOptions};
use crate::error::{Error, Result};
use crate::mesh::{corner_angles, CornerAngles, Flavor, Triangulation};
use crate::scaling::{cotangent_weights_of, scale_euclidean, ConformalFactor};

/// Boundary values `(vertex, u)` on the rim of a punctured mesh.
pub type BoundaryData = Vec<(usize, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Damped Newton on the interior curvature.
    Newton,
    /// Implicit homotopy `K(u(t)) = (1 − t) K(u(0))` in `steps` Newton-corrected steps.
    Continuation { steps: usize },
}

impl Default for Method {
    fn default() -> Self {
        Method::Newton
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Target for `‖K_int‖∞`.
    pub tolerance: f64,
    /// Newton iterations per solve (per continuation step).
    pub max_iterations: usize,
    /// Step halvings before the line search gives up.
    pub max_halvings: usize,
    /// Halvings toward the mean allowed while looking for an admissible start.
    pub max_start_halvings: usize,
    pub spd: SpdOptions,
    /// Constant added to the Dirichlet data; the assembled factor does not
    /// depend on it.
    pub dirichlet_shift: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            max_iterations: 100,
            max_halvings: 30,
            max_start_halvings: 60,
            spd: SpdOptions::default(),
            dirichlet_shift: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: ConformalFactor,
    /// Newton iterations summed over all continuation steps.
    pub iterations: usize,
    pub residual: f64,
    pub min_delaunay_margin: f64,
    pub min_boundary_curvature: f64,
}

struct State {
    angles: CornerAngles,
    k: Vec<f64>,
    residual: f64,
    merit: f64,
    delaunay: bool,
}

fn evaluate(disk: &Triangulation, le: &[f64], u: &ConformalFactor, interior: &[usize], target: &[f64]) -> Option<State> {
    let l = scale_euclidean(disk, le, u);
    let angles = corner_angles(disk, &l, Flavor::Euclidean).ok()?;
    let k = angles.curvature(disk);
    let residual = interior
        .iter()
        .zip(target)
        .map(|(&i, t)| (k[i] - t).abs())
        .fold(0.0, f64::max);
    let merit = interior
        .iter()
        .zip(target)
        .map(|(&i, t)| (k[i] - t) * (k[i] - t))
        .sum::<f64>()
        .sqrt();
    let delaunay = angles.delaunay_margins(disk).iter().all(|&(_, m)| m > 0.0);
    Some(State {
        angles,
        k,
        residual,
        merit,
        delaunay,
    })
}

fn with_boundary(n: usize, data: &BoundaryData, fill: f64) -> ConformalFactor {
    let mut u = ConformalFactor::constant(n, fill);
    for &(v, x) in data {
        u[v] = x;
    }
    u
}

/// Boundary values plus the discrete-harmonic interior extension for the
/// cotangent weights of `(disk, le)`. When the scaled mesh is inadmissible the
/// interior is blended toward the mean of the data by repeated halving.
pub fn initial_guess(disk: &Triangulation, le: &[f64], data: &BoundaryData, opts: &SolverOptions) -> Result<ConformalFactor> {
    let n = disk.num_vertices();
    let mean = data.iter().map(|&(_, x)| x).sum::<f64>() / data.len().max(1) as f64;
    let interior: Vec<usize> = disk.interior_vertices().collect();
    let base = with_boundary(n, data, mean);
    let mut harmonic = base.clone();
    if !interior.is_empty() {
        corner_angles(disk, le, Flavor::Euclidean)?;
        let eta = cotangent_weights_of(disk, le);
        let a = laplacian_matrix(&disk.graph(), &eta).negated().restrict(&interior);
        let mut rhs = vec![0.0; interior.len()];
        for (r, &i) in interior.iter().enumerate() {
            for &(j, e) in disk.graph().neighbors(i) {
                if disk.is_boundary_vertex(j) {
                    rhs[r] += eta.0[e] * base[j];
                }
            }
        }
        // indefinite weights leave the constant start to the blend below
        if let Ok(x) = solve_spd(&a, &rhs, &opts.spd) {
            for (r, &i) in interior.iter().enumerate() {
                harmonic[i] = x[r];
            }
        }
    }
    let mut s = 1.0;
    for _ in 0..=opts.max_start_halvings {
        let mut u = base.clone();
        for &i in &interior {
            u[i] = mean + s * (harmonic[i] - mean);
        }
        let l = scale_euclidean(disk, le, &u);
        if corner_angles(disk, &l, Flavor::Euclidean).is_ok() {
            return Ok(u);
        }
        s *= 0.5;
    }
    Err(Error::NoAdmissibleStart(opts.max_start_halvings))
}

/// Solves `K_i(u) = 0` at interior vertices with `u` fixed on the boundary.
pub fn solve_curvature_bvp(
    disk: &Triangulation,
    le: &[f64],
    start: &ConformalFactor,
    method: Method,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let interior: Vec<usize> = disk.interior_vertices().collect();
    let zero = vec![0.0; interior.len()];
    let mut u = start.clone();
    let mut iterations = 0;
    match method {
        Method::Newton => {
            iterations += newton(disk, le, &mut u, &interior, &zero, opts)?;
        }
        Method::Continuation { steps } => {
            let steps = steps.max(1);
            let s0 = evaluate(disk, le, &u, &interior, &zero)
                .ok_or_else(|| Error::LeftAdmissibleRegion("start is inadmissible".into()))?;
            let k0: Vec<f64> = interior.iter().map(|&i| s0.k[i]).collect();
            for m in 1..=steps {
                let t = m as f64 / steps as f64;
                let target: Vec<f64> = k0.iter().map(|k| (1.0 - t) * k).collect();
                iterations += newton(disk, le, &mut u, &interior, &target, opts)?;
            }
        }
    }
    let state = evaluate(disk, le, &u, &interior, &zero)
        .ok_or_else(|| Error::LeftAdmissibleRegion("final iterate is inadmissible".into()))?;
    let min_delaunay_margin = state
        .angles
        .delaunay_margins(disk)
        .iter()
        .map(|&(_, m)| m)
        .fold(f64::INFINITY, f64::min);
    let min_boundary_curvature = disk
        .boundary_vertices()
        .map(|v| state.k[v])
        .fold(f64::INFINITY, f64::min);
    if !(min_delaunay_margin > 0.0) {
        return Err(Error::LeftAdmissibleRegion(format!(
            "solution is not strictly Delaunay (margin {min_delaunay_margin:e})"
        )));
    }
    if !(min_boundary_curvature > 0.0) {
        return Err(Error::LeftAdmissibleRegion(format!(
            "boundary curvature {min_boundary_curvature:e} is not positive"
        )));
    }
    Ok(SolveReport {
        u,
        iterations,
        residual: state.residual,
        min_delaunay_margin,
        min_boundary_curvature,
    })
}

/// Damped Newton for `K_int(u) = target`; returns the iteration count.
///
/// Steps are halved until the scaled mesh stays admissible, stays Delaunay
/// if it was, and `‖K_int − target‖₂` drops. Once the tolerance is met, up
/// to two further full steps are taken while they still improve the residual,
/// since layout errors scale with it.
fn newton(
    disk: &Triangulation,
    le: &[f64],
    u: &mut ConformalFactor,
    interior: &[usize],
    target: &[f64],
    opts: &SolverOptions,
) -> Result<usize> {
    let mut state = evaluate(disk, le, u, interior, target)
        .ok_or_else(|| Error::LeftAdmissibleRegion("iterate is inadmissible".into()))?;
    let mut it = 0;
    while state.residual > opts.tolerance {
        if it == opts.max_iterations {
            return Err(Error::MaxIterations(opts.max_iterations, state.residual));
        }
        match damped_step(disk, le, u, &state, interior, target, opts)? {
            Some((trial, next)) => {
                *u = trial;
                state = next;
            }
            None => return Err(Error::StuckLineSearch(opts.max_halvings)),
        }
        it += 1;
    }
    let polish = SolverOptions {
        max_halvings: 0,
        ..opts.clone()
    };
    for _ in 0..2 {
        if state.residual <= 1e-3 * opts.tolerance {
            break;
        }
        match damped_step(disk, le, u, &state, interior, target, &polish)? {
            Some((trial, next)) if next.residual < state.residual => {
                *u = trial;
                state = next;
                it += 1;
            }
            _ => break,
        }
    }
    Ok(it)
}

#[allow(clippy::type_complexity)]
fn damped_step(
    disk: &Triangulation,
    le: &[f64],
    u: &ConformalFactor,
    state: &State,
    interior: &[usize],
    target: &[f64],
    opts: &SolverOptions,
) -> Result<Option<(ConformalFactor, State)>> {
    let eta = cotangent_weights_of(disk, &scale_euclidean(disk, le, u));
    let jac = laplacian_matrix(&disk.graph(), &eta).negated().restrict(interior);
    let rhs: Vec<f64> = interior
        .iter()
        .zip(target)
        .map(|(&i, t)| t - state.k[i])
        .collect();
    let delta = solve_spd(&jac, &rhs, &opts.spd)?;
    let mut s = 1.0;
    for _ in 0..=opts.max_halvings {
        let mut trial = u.clone();
        for (r, &i) in interior.iter().enumerate() {
            trial[i] += s * delta[r];
        }
        if let Some(next) = evaluate(disk, le, &trial, interior, target) {
            let keeps_delaunay = next.delaunay || !state.delaunay;
            if keeps_delaunay && next.merit < state.merit {
                return Ok(Some((trial, next)));
            }
        }
        s *= 0.5;
    }
    Ok(None)
}
