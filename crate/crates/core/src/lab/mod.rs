//! Test surfaces with known uniformization factors and the convergence
//! harness.
//!
//! A surface is the unit sphere with metric `e^{2φ} g_round` for a linear
//! field `φ`. With marks `X = (0,0,1)`, `Y = (1,0,0)`, `Z = (0,0,−1)` the
//! identity map already normalizes, so the exact factor is `ū = −φ`.

mod field;
pub mod random;

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::mesh::{MetricMesh, Triangulation};
use crate::scaling::ConformalFactor;
use crate::uniformize::{uniformize, Method, SolverOptions, UniformizationProblem};

pub use field::LinearField;

/// Deepest subdivision level [`octasphere`] accepts.
pub const MAX_LEVEL: usize = 7;

/// Largest `|φ|` bound accepted for test surfaces.
pub const MAX_AMPLITUDE: f64 = 0.5;

/// Triangulated unit sphere with vertex positions.
#[derive(Debug, Clone)]
pub struct SphereMesh {
    pub tri: Arc<Triangulation>,
    pub positions: Vec<Vector3<f64>>,
}

impl SphereMesh {
    /// `[X, Y, Z]` as vertex indices: north pole, `(1,0,0)`, south pole.
    pub fn canonical_marks(&self) -> Result<[usize; 3]> {
        let find = |target: Vector3<f64>| {
            self.positions
                .iter()
                .position(|p| (p - target).norm() <= 1e-12)
                .ok_or(Error::MarksNotVertices)
        };
        Ok([
            find(Vector3::new(0.0, 0.0, 1.0))?,
            find(Vector3::new(1.0, 0.0, 0.0))?,
            find(Vector3::new(0.0, 0.0, -1.0))?,
        ])
    }

    /// Great-circle arc length of every edge.
    pub fn round_lengths(&self) -> Vec<f64> {
        self.tri
            .edges()
            .iter()
            .map(|&[a, b]| arc(&self.positions[a], &self.positions[b]))
            .collect()
    }
}

fn arc(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Octahedron subdivided `level` times with new vertices pushed to the
/// sphere after every step. Vertices 0..6 are `+x, +y, −x, −y, +z, −z`.
pub fn octasphere(level: usize) -> Result<SphereMesh> {
    if level > MAX_LEVEL {
        return Err(Error::LevelTooLarge(level));
    }
    let mut positions = vec![
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.0, 1.0, 0.0),
        Vector3::new(-1.0, 0.0, 0.0),
        Vector3::new(0.0, -1.0, 0.0),
        Vector3::new(0.0, 0.0, 1.0),
        Vector3::new(0.0, 0.0, -1.0),
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [4, 0, 1],
        [4, 1, 2],
        [4, 2, 3],
        [4, 3, 0],
        [5, 1, 0],
        [5, 2, 1],
        [5, 3, 2],
        [5, 0, 3],
    ];
    for _ in 0..level {
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, positions: &mut Vec<Vector3<f64>>| {
            let key = (a.min(b), a.max(b));
            *mids.entry(key).or_insert_with(|| {
                positions.push((positions[a] + positions[b]).normalize());
                positions.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * faces.len());
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut positions);
            let bc = mid(b, c, &mut positions);
            let ca = mid(c, a, &mut positions);
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        faces = next;
    }
    Ok(SphereMesh {
        tri: Arc::new(Triangulation::new(faces)?),
        positions,
    })
}

/// How the surrogate `g`-length of an edge is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthMode {
    /// `e^{(φ_i + φ_j)/2} d_round(i, j)`.
    VertexScaled,
    /// Composite midpoint rule for `∫ e^φ ds` along the great-circle arc.
    Integrated { samples: usize },
}

/// Surrogate arc lengths of `mesh` in the metric `e^{2φ} g_round`.
pub fn metric_lengths(mesh: &SphereMesh, phi: &LinearField, mode: LengthMode) -> Result<Vec<f64>> {
    mesh.tri
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[a, b])| {
            let (p, q) = (&mesh.positions[a], &mesh.positions[b]);
            let d = arc(p, q);
            let l = match mode {
                LengthMode::VertexScaled => (0.5 * (phi.eval(p) + phi.eval(q))).exp() * d,
                LengthMode::Integrated { samples } => {
                    let m = samples.max(1);
                    let s = d.sin();
                    let total: f64 = (0..m)
                        .map(|k| {
                            let t = (k as f64 + 0.5) / m as f64;
                            let x = if s > 0.0 {
                                (((1.0 - t) * d).sin() * p + (t * d).sin() * q) / s
                            } else {
                                *p
                            };
                            phi.eval(&x).exp()
                        })
                        .sum();
                    total / m as f64 * d
                }
            };
            if !(l < std::f64::consts::PI) {
                return Err(Error::ArcTooLong(e));
            }
            Ok(l)
        })
        .collect()
}

/// `ū_i = −φ(p_i)`, after checking that the canonical marks are vertices.
pub fn ground_truth_factor(mesh: &SphereMesh, phi: &LinearField) -> Result<ConformalFactor> {
    mesh.canonical_marks()?;
    Ok(ConformalFactor(mesh.positions.iter().map(|p| -phi.eval(p)).collect()))
}

/// Spherical metric mesh and canonical marks for `φ` at one level.
pub fn test_problem(level: usize, phi: &LinearField, mode: LengthMode) -> Result<(SphereMesh, UniformizationProblem)> {
    if !(phi.amplitude() <= MAX_AMPLITUDE) {
        return Err(Error::HypothesisViolated(format!(
            "field amplitude {} exceeds {MAX_AMPLITUDE}",
            phi.amplitude()
        )));
    }
    let mesh = octasphere(level)?;
    let lengths = metric_lengths(&mesh, phi, mode)?;
    let metric = MetricMesh::spherical(mesh.tri.clone(), lengths)?;
    let marks = mesh.canonical_marks()?;
    let problem = UniformizationProblem::new(metric, marks)?;
    Ok((mesh, problem))
}

/// One level of a convergence experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub vertices: usize,
    /// Largest edge length `|l|`.
    pub max_length: f64,
    /// Regularity of the spherical mesh.
    pub epsilon: f64,
    /// `‖u − ū‖∞`.
    pub error: f64,
    /// `error / previous error`.
    pub ratio: Option<f64>,
    /// Least-squares slope of `log error` against `log |l|` over this and all
    /// previous rows.
    pub slope: Option<f64>,
    pub curvature_residual: f64,
    pub min_delaunay_margin: f64,
    pub min_boundary_curvature: f64,
    pub min_dihedral: f64,
    pub min_empty_circle: f64,
    pub iterations: usize,
}

fn run_level(level: usize, phi: &LinearField, mode: LengthMode, method: Method, opts: &SolverOptions) -> Result<ConvergenceRow> {
    let (mesh, problem) = test_problem(level, phi, mode)?;
    let truth = ground_truth_factor(&mesh, phi)?;
    let r = uniformize(&problem, method, opts)?;
    let error = r.u.max_diff_on(&truth, mesh.tri.vertices());
    let cert = r.polyhedron.certificates();
    Ok(ConvergenceRow {
        level,
        vertices: mesh.tri.vertex_count(),
        max_length: problem.mesh().max_length(),
        epsilon: problem.mesh().regularity()?,
        error,
        ratio: None,
        slope: None,
        curvature_residual: r.diagnostics.curvature_residual,
        min_delaunay_margin: r.diagnostics.min_delaunay_margin,
        min_boundary_curvature: r.diagnostics.min_boundary_curvature,
        min_dihedral: cert.min_dihedral(),
        min_empty_circle: cert.min_empty_circle(),
        iterations: r.diagnostics.iterations,
    })
}

/// Least-squares slope of `y` against `x`; `None` for fewer than two points.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    Some(sxy / sxx)
}

/// Uniformizes the test surface at each level and compares with `−φ`.
/// Levels run on up to `jobs` threads; the table does not depend on `jobs`.
pub fn convergence_experiment(
    phi: &LinearField,
    levels: &[usize],
    mode: LengthMode,
    method: Method,
    opts: &SolverOptions,
    jobs: usize,
) -> Result<Vec<ConvergenceRow>> {
    if levels.is_empty() {
        return Err(Error::HypothesisViolated("no levels requested".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::HypothesisViolated("levels must be strictly ascending".into()));
    }
    let jobs = jobs.clamp(1, levels.len());
    let mut results: Vec<Option<Result<ConvergenceRow>>> = (0..levels.len()).map(|_| None).collect();
    if jobs == 1 {
        for (slot, &level) in results.iter_mut().zip(levels) {
            *slot = Some(run_level(level, phi, mode, method, opts));
        }
    } else {
        std::thread::scope(|s| {
            let chunks: Vec<_> = results
                .chunks_mut(levels.len().div_ceil(jobs))
                .zip(levels.chunks(levels.len().div_ceil(jobs)))
                .collect();
            for (slots, lv) in chunks {
                s.spawn(move || {
                    for (slot, &level) in slots.iter_mut().zip(lv) {
                        *slot = Some(run_level(level, phi, mode, method, opts));
                    }
                });
            }
        });
    }
    let mut rows = Vec::with_capacity(levels.len());
    for r in results {
        rows.push(r.expect("every level ran")?);
    }
    for k in 0..rows.len() {
        if k > 0 {
            rows[k].ratio = Some(rows[k].error / rows[k - 1].error);
        }
        let x: Vec<f64> = rows[..=k].iter().map(|r| r.max_length.ln()).collect();
        let y: Vec<f64> = rows[..=k].iter().map(|r| r.error.ln()).collect();
        rows[k].slope = fitted_slope(&x, &y);
    }
    Ok(rows)
}
