//! The `dunif` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::calculus::{isoperimetric_constant, IsoMode};
use crate::error::{Error, Result};
use crate::io::{self, fmt17, json_num, json_vec, LengthInterpretation, MeshData, ProblemFile};
use crate::lab::random::{random_admissible_factor, random_disk_mesh, LayoutSpec};
use crate::lab::{convergence_experiment, ConvergenceRow, LengthMode, LinearField};
use crate::mesh::MetricMesh;
use crate::scaling::{chord_lengths, fd_jacobian_check};
use crate::stereo::{flatten_polyhedron, lift_to_polyhedron, north, verify_inscribed, CertificateReport, InscribedPolyhedron};
use crate::uniformize::{uniformize, Method, SolverOptions, UniformizationResult};

#[derive(Debug, Parser)]
#[command(name = "dunif", version, about = "Discrete uniformization of sphere triangulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Uniformize a mesh with three marked vertices.
    Uniformize(UniformizeArgs),
    /// Convergence table on refined octaspheres.
    Converge(ConvergeArgs),
    /// Certificates of an inscribed convex polyhedron.
    Verify(VerifyArgs),
    /// Curvature Jacobian against central differences.
    JacobianCheck(JacobianArgs),
    /// Isoperimetric constant of the edge graph.
    Isoperimetric(IsoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Newton,
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpretationArg {
    Arc,
    Chord,
}

impl From<InterpretationArg> for LengthInterpretation {
    fn from(a: InterpretationArg) -> Self {
        match a {
            InterpretationArg::Arc => LengthInterpretation::Arc,
            InterpretationArg::Chord => LengthInterpretation::Chord,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    VertexScaled,
    Integrated,
}

#[derive(Debug, Args)]
pub struct UniformizeArgs {
    /// Problem file (.json) or mesh file (.off, .obj).
    #[arg(long)]
    pub input: PathBuf,
    /// Marked vertices `X,Y,Z`; overrides the problem file.
    #[arg(long, value_parser = parse_marks)]
    pub marks: Option<[usize; 3]>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Continuation steps.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// How positions in a mesh file turn into arc lengths.
    #[arg(long, value_enum, default_value = "arc")]
    pub length_interpretation: InterpretationArg,
    /// Write the JSON result to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON result instead of a summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// Linear field, e.g. `0.3*z` or `0.2*x + 0.1*z`.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,
    /// Inclusive level range `a..b`.
    #[arg(long, value_parser = parse_levels)]
    pub levels: Levels,
    #[arg(long, value_enum, default_value = "vertex-scaled")]
    pub mode: ModeArg,
    /// Quadrature samples per edge for the integrated mode.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "newton")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Worker threads; the output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write CSV to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Mesh file with sphere positions, or a problem file (uniformized first).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct JacobianArgs {
    /// Mesh file (Euclidean distances) or problem file (chords); a random
    /// disk mesh when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    /// Largest `|u_i|` of the random factor.
    #[arg(long, default_value_t = 0.2)]
    pub amplitude: f64,
    /// Failure threshold for the discrepancy.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct IsoArgs {
    /// Graph file (.json with `edges`), problem file or mesh file.
    #[arg(long)]
    pub input: PathBuf,
    /// Enumerate every subset instead of sampling balls.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 64)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Levels(pub Vec<usize>);

fn parse_marks(s: &str) -> std::result::Result<[usize; 3], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad vertex index {t:?}")))
        .collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| "expected three indices X,Y,Z".to_string())
}

fn parse_levels(s: &str) -> std::result::Result<Levels, String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| format!("bad level {a:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad level {b:?}"))?;
    if b < a {
        return Err(format!("empty level range {s}"));
    }
    Ok(Levels((a..=b).collect()))
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Reports go to `out`, errors to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Uniformize(a) => cmd_uniformize(a, out),
        Command::Converge(a) => cmd_converge(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::JacobianCheck(a) => cmd_jacobian(a, out),
        Command::Isoperimetric(a) => cmd_isoperimetric(a, out),
    }
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("values serialize"))?;
    Ok(())
}

fn cmd_uniformize(a: &UniformizeArgs, out: &mut dyn Write) -> Result<()> {
    let mut problem_file = ProblemFile::load(&a.input, a.length_interpretation.into())?;
    if let Some(m) = a.method {
        problem_file.solver.method = Some(match m {
            MethodArg::Newton => "newton".into(),
            MethodArg::Continuation => "continuation".into(),
        });
    }
    problem_file.solver.steps = a.steps.or(problem_file.solver.steps);
    problem_file.solver.tolerance = a.tolerance.or(problem_file.solver.tolerance);
    problem_file.solver.max_iterations = a.max_iterations.or(problem_file.solver.max_iterations);
    let (_, problem) = problem_file.build(a.marks)?;
    let method = problem_file.method()?;
    let result = uniformize(&problem, method, &problem_file.solver_options())?;
    let doc = uniformize_json(problem.marks(), method, &result);
    if let Some(path) = &a.out {
        fs::write(path, serde_json::to_string_pretty(&doc).expect("values serialize") + "\n")?;
    }
    if a.json {
        return emit_json(out, &doc);
    }
    let d = &result.diagnostics;
    let [x, y, z] = problem.marks();
    let umax = result.u.0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut s = String::new();
    writeln!(s, "marks X={x} Y={y} Z={z}, {} vertices", result.u.len()).unwrap();
    writeln!(s, "iterations            {}", d.iterations).unwrap();
    writeln!(s, "max |u|               {}", fmt17(umax)).unwrap();
    writeln!(s, "curvature residual    {}", fmt17(d.curvature_residual)).unwrap();
    writeln!(s, "min Delaunay margin   {}", fmt17(d.min_delaunay_margin)).unwrap();
    writeln!(s, "min boundary K        {}", fmt17(d.min_boundary_curvature)).unwrap();
    writeln!(s, "layout residual       {}", fmt17(d.layout_residual)).unwrap();
    writeln!(s, "apex spread           {}", fmt17(d.apex_spread)).unwrap();
    writeln!(s, "edge dictionary error {}", fmt17(d.edge_dictionary_error)).unwrap();
    if let Some(p) = &a.out {
        writeln!(s, "wrote {}", p.display()).unwrap();
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

pub fn uniformize_json(marks: [usize; 3], method: Method, r: &UniformizationResult) -> Value {
    let d = &r.diagnostics;
    let method = match method {
        Method::Newton => json!({"name": "newton"}),
        Method::Continuation { steps } => json!({"name": "continuation", "steps": steps}),
    };
    json!({
        "marks": {"x": marks[0], "y": marks[1], "z": marks[2]},
        "method": method,
        "u": json_vec(r.u.as_slice()),
        "positions": r.positions().iter().map(|p| json_vec(&[p.x, p.y, p.z])).collect::<Vec<_>>(),
        "diagnostics": {
            "curvature_residual": json_num(d.curvature_residual),
            "min_boundary_curvature": json_num(d.min_boundary_curvature),
            "min_delaunay_margin": json_num(d.min_delaunay_margin),
            "layout_residual": json_num(d.layout_residual),
            "layout_diameter": json_num(d.layout_diameter),
            "apex_spread": json_num(d.apex_spread),
            "edge_dictionary_error": json_num(d.edge_dictionary_error),
            "iterations": d.iterations,
            "log_scale": json_num(d.log_scale),
        },
        "certificates": certificates_json(&r.polyhedron.certificates()),
    })
}

fn opt_field(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

/// CSV with a header line; empty fields where a value is undefined.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("level,|l|,epsilon,err_inf,ratio,slope_so_far,K_residual\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.level,
            fmt17(r.max_length),
            fmt17(r.epsilon),
            fmt17(r.error),
            opt_field(r.ratio),
            opt_field(r.slope),
            fmt17(r.curvature_residual)
        )
        .unwrap();
    }
    s
}

fn cmd_converge(a: &ConvergeArgs, out: &mut dyn Write) -> Result<()> {
    let phi: LinearField = a.phi.parse()?;
    let mode = match a.mode {
        ModeArg::VertexScaled => LengthMode::VertexScaled,
        ModeArg::Integrated => LengthMode::Integrated { samples: a.samples },
    };
    let method = match a.method {
        MethodArg::Newton => Method::Newton,
        MethodArg::Continuation => Method::Continuation { steps: a.steps },
    };
    let rows = convergence_experiment(&phi, &a.levels.0, mode, method, &SolverOptions::default(), a.jobs)?;
    let csv = convergence_csv(&rows);
    if let Some(p) = &a.out {
        fs::write(p, &csv)?;
    }
    if a.json {
        let rows: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "level": r.level,
                    "vertices": r.vertices,
                    "max_length": json_num(r.max_length),
                    "epsilon": json_num(r.epsilon),
                    "err_inf": json_num(r.error),
                    "ratio": r.ratio.map_or(Value::Null, json_num),
                    "slope_so_far": r.slope.map_or(Value::Null, json_num),
                    "K_residual": json_num(r.curvature_residual),
                    "min_delaunay_margin": json_num(r.min_delaunay_margin),
                    "min_boundary_curvature": json_num(r.min_boundary_curvature),
                    "min_dihedral": json_num(r.min_dihedral),
                    "min_empty_circle": json_num(r.min_empty_circle),
                    "iterations": r.iterations,
                })
            })
            .collect();
        return emit_json(out, &json!({"phi": phi.to_string(), "rows": rows}));
    }
    if a.out.is_none() {
        out.write_all(csv.as_bytes())?;
    }
    Ok(())
}

pub fn certificates_json(c: &CertificateReport) -> Value {
    json!({
        "inscribed": c.inscribed(),
        "convex": c.convex(),
        "empty_circles": c.empty_circles(),
        "origin_inside": c.origin_inside(),
        "dictionary": c.dictionary(),
        "orientation_consistent": c.orientation_consistent,
        "max_norm_error": json_num(c.max_norm_error),
        "min_dihedral_margin": json_num(c.min_dihedral()),
        "min_empty_circle_margin": json_num(c.min_empty_circle()),
        "origin_margin": json_num(c.origin_margin),
        "chord_arc_error": json_num(c.chord_arc_error),
        "passes": c.passes(),
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Flatten from the vertex at the north pole and lift back; largest position
/// change.
fn round_trip_error(tri: &crate::mesh::Triangulation, positions: &[nalgebra::Vector3<f64>]) -> Result<Option<(usize, f64)>> {
    let Some(pole) = tri.vertices().find(|&v| (positions[v] - north()).norm() < 1e-10) else {
        return Ok(None);
    };
    let p = InscribedPolyhedron::new(tri.clone(), positions.to_vec())?;
    let (layout, _) = flatten_polyhedron(&p, pole)?;
    let back = lift_to_polyhedron(&layout)?;
    // the lift puts the pole in the first free slot, which is `pole` again
    // only when the pole is the last vertex; compare by layout order
    let mut err: f64 = 0.0;
    for v in layout.triangulation().vertices() {
        err = err.max((back.position(v) - positions[v]).norm());
    }
    let new_pole = back
        .triangulation()
        .vertices()
        .find(|&v| !layout.triangulation().is_used(v))
        .expect("lift adds the pole");
    err = err.max((back.position(new_pole) - positions[pole]).norm());
    Ok(Some((pole, err)))
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let (data, source) = if a.input.extension().and_then(|e| e.to_str()) == Some("json") {
        let pf = ProblemFile::load(&a.input, LengthInterpretation::Arc)?;
        let (data, problem) = pf.build(None)?;
        let r = uniformize(&problem, pf.method()?, &pf.solver_options())?;
        let data = MeshData {
            positions: r.positions().to_vec(),
            faces: data.faces,
        };
        (data, "uniformized")
    } else {
        (io::read_mesh(&a.input)?, "input")
    };
    let tri = data.triangulation()?;
    let report = verify_inscribed(&tri, &data.positions);
    let round_trip = if report.passes() { round_trip_error(&tri, &data.positions)? } else { None };
    if a.json {
        let mut v = certificates_json(&report);
        let m: &mut Map<String, Value> = v.as_object_mut().expect("object");
        m.insert("source".into(), json!(source));
        if let Some((pole, e)) = round_trip {
            m.insert("round_trip".into(), json!({"pole": pole, "max_position_error": json_num(e)}));
        }
        emit_json(out, &v)?;
    } else {
        let mut s = String::new();
        writeln!(s, "{} positions, {} vertices, {} faces", source, tri.vertex_count(), tri.num_faces()).unwrap();
        writeln!(s, "{} inscribed      max norm error {}", verdict(report.inscribed()), fmt17(report.max_norm_error)).unwrap();
        writeln!(s, "{} convex         min dihedral margin {}", verdict(report.convex()), fmt17(report.min_dihedral())).unwrap();
        writeln!(s, "{} empty circles  min margin {}", verdict(report.empty_circles()), fmt17(report.min_empty_circle())).unwrap();
        writeln!(s, "{} origin inside  margin {}", verdict(report.origin_inside()), fmt17(report.origin_margin)).unwrap();
        writeln!(s, "{} chord/arc      error {}", verdict(report.dictionary()), fmt17(report.chord_arc_error)).unwrap();
        if let Some((pole, e)) = round_trip {
            writeln!(s, "flatten/lift round trip from pole {pole}: max position error {}", fmt17(e)).unwrap();
        }
        out.write_all(s.as_bytes())?;
    }
    match report.first_failure() {
        Some(f) => Err(Error::CertificateFailure(f)),
        None => Ok(()),
    }
}

fn cmd_jacobian(a: &JacobianArgs, out: &mut dyn Write) -> Result<()> {
    let (mesh, source) = match &a.input {
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (random_disk_mesh(&mut rng, &LayoutSpec::default())?, format!("random disk mesh (seed {})", a.seed))
        }
        Some(path) if path.extension().and_then(|e| e.to_str()) == Some("json") => {
            let pf = ProblemFile::load(path, LengthInterpretation::Arc)?;
            let data = pf.mesh_data()?;
            let tri = data.triangulation()?;
            let arcs = pf.arc_lengths(&data, &tri)?;
            (MetricMesh::euclidean(tri, chord_lengths(&arcs))?, path.display().to_string())
        }
        Some(path) => {
            let data = io::read_mesh(path)?;
            let tri = data.triangulation()?;
            let l = io::euclidean_lengths(&data, &tri);
            (MetricMesh::euclidean(tri, l)?, path.display().to_string())
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(1));
    let u = random_admissible_factor(&mut rng, &mesh, a.amplitude, 1e-2);
    let worst = fd_jacobian_check(&mesh, &u, a.h)?;
    let ok = worst < a.tolerance;
    if a.json {
        emit_json(
            out,
            &json!({
                "source": source,
                "vertices": mesh.triangulation().vertex_count(),
                "h": json_num(a.h),
                "max_relative_discrepancy": json_num(worst),
                "tolerance": json_num(a.tolerance),
                "passes": ok,
            }),
        )?;
    } else {
        writeln!(out, "{source}, {} vertices, h = {}", mesh.triangulation().vertex_count(), a.h)?;
        writeln!(out, "{} max relative discrepancy {}", verdict(ok), fmt17(worst))?;
    }
    if ok {
        Ok(())
    } else {
        Err(Error::CertificateFailure(format!("Jacobian discrepancy {worst:e}")))
    }
}

fn cmd_isoperimetric(a: &IsoArgs, out: &mut dyn Write) -> Result<()> {
    let (graph, lengths) = io::load_graph(&a.input)?;
    let mode = if a.exhaustive {
        IsoMode::Exhaustive
    } else {
        IsoMode::Sampled {
            seeds: a.seeds,
            rng_seed: a.seed,
        }
    };
    let c = isoperimetric_constant(&graph, &lengths, mode)?;
    if a.json {
        emit_json(
            out,
            &json!({
                "vertices": graph.num_vertices(),
                "edges": graph.num_edges(),
                "mode": if a.exhaustive { "exhaustive" } else { "sampled" },
                "constant": json_num(c),
            }),
        )
    } else {
        let kind = if a.exhaustive { "exact" } else { "lower bound" };
        writeln!(out, "C = {} ({kind}, {} vertices, {} edges)", fmt17(c), graph.num_vertices(), graph.num_edges())?;
        Ok(())
    }
}
