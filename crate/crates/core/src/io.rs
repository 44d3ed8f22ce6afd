//! Mesh files (OFF read/write, OBJ read), problem descriptions and
//! machine-readable output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::Vector3;
use serde::Deserialize;
use serde_json::Value;

use crate::calculus::Graph;
use crate::error::{Error, Result};
use crate::lab::{metric_lengths, octasphere, LengthMode, LinearField, SphereMesh};
use crate::mesh::{MetricMesh, Triangulation};
use crate::uniformize::{Method, SolverOptions, UniformizationProblem};

/// Vertex positions and triangle faces as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshData {
    pub positions: Vec<Vector3<f64>>,
    pub faces: Vec<[usize; 3]>,
}

impl MeshData {
    pub fn triangulation(&self) -> Result<Triangulation> {
        let t = Triangulation::new(self.faces.clone())?;
        if t.num_vertices() != self.positions.len() {
            return Err(Error::Parse(format!(
                "{} vertices declared but faces use {}",
                self.positions.len(),
                t.num_vertices()
            )));
        }
        Ok(t)
    }
}

impl From<&SphereMesh> for MeshData {
    fn from(m: &SphereMesh) -> Self {
        MeshData {
            positions: m.positions.clone(),
            faces: m.tri.faces().to_vec(),
        }
    }
}

fn parse_err(line: usize, what: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {what}"))
}

/// Data lines with comments (`#`) stripped, numbered from 1.
fn content_lines<R: Read>(r: R) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            out.push((i + 1, body.to_string()));
        }
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

pub fn read_off<R: Read>(r: R) -> Result<MeshData> {
    let lines = content_lines(r)?;
    let mut it = lines.iter();
    let (ln, header) = it.next().ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    let mut counts_line = None;
    if header != "OFF" {
        // header and counts on one line
        let rest = header
            .strip_prefix("OFF")
            .ok_or_else(|| parse_err(*ln, "missing OFF header"))?;
        counts_line = Some((*ln, rest.trim().to_string()));
    }
    let (ln, counts) = match counts_line {
        Some(c) => c,
        None => it.next().cloned().ok_or_else(|| Error::Parse("missing counts line".into()))?,
    };
    let c: Vec<&str> = counts.split_whitespace().collect();
    if c.len() < 2 {
        return Err(parse_err(ln, "counts line needs vertex and face counts"));
    }
    let nv: usize = parse_num(c[0], ln)?;
    let nf: usize = parse_num(c[1], ln)?;
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = it.next().ok_or_else(|| Error::Parse("too few vertex lines".into()))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 {
            return Err(parse_err(*ln, "vertex needs three coordinates"));
        }
        positions.push(Vector3::new(parse_num(t[0], *ln)?, parse_num(t[1], *ln)?, parse_num(t[2], *ln)?));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = it.next().ok_or_else(|| Error::Parse("too few face lines".into()))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let k: usize = parse_num(t[0], *ln)?;
        if k != 3 || t.len() < 4 {
            return Err(parse_err(*ln, "only triangles are supported"));
        }
        let f = [parse_num(t[1], *ln)?, parse_num(t[2], *ln)?, parse_num(t[3], *ln)?];
        if f.iter().any(|&v| v >= nv) {
            return Err(parse_err(*ln, "face index out of range"));
        }
        faces.push(f);
    }
    if let Some((ln, _)) = it.next() {
        return Err(parse_err(*ln, "trailing data after faces"));
    }
    Ok(MeshData { positions, faces })
}

pub fn write_off<W: Write>(mesh: &MeshData, mut w: W) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} 0", mesh.positions.len(), mesh.faces.len()).unwrap();
    for p in &mesh.positions {
        writeln!(s, "{} {} {}", fmt17(p.x), fmt17(p.y), fmt17(p.z)).unwrap();
    }
    for f in &mesh.faces {
        writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    w.write_all(s.as_bytes())?;
    Ok(())
}

/// Reads `v` and `f` records; faces must be triangles, indices are 1-based
/// (`v/vt/vn` forms accepted, negative indices are relative).
pub fn read_obj<R: Read>(r: R) -> Result<MeshData> {
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    for (ln, l) in content_lines(r)? {
        let t: Vec<&str> = l.split_whitespace().collect();
        match t[0] {
            "v" => {
                if t.len() < 4 {
                    return Err(parse_err(ln, "vertex needs three coordinates"));
                }
                positions.push(Vector3::new(parse_num(t[1], ln)?, parse_num(t[2], ln)?, parse_num(t[3], ln)?));
            }
            "f" => {
                if t.len() != 4 {
                    return Err(parse_err(ln, "only triangles are supported"));
                }
                let mut f = [0; 3];
                for k in 0..3 {
                    let idx: i64 = parse_num(t[k + 1].split('/').next().unwrap_or(""), ln)?;
                    let n = positions.len() as i64;
                    let v = if idx < 0 { n + idx } else { idx - 1 };
                    if v < 0 || v >= n {
                        return Err(parse_err(ln, "face index out of range"));
                    }
                    f[k] = v as usize;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    Ok(MeshData { positions, faces })
}

/// Reads an OFF or OBJ file by extension.
pub fn read_mesh(path: &Path) -> Result<MeshData> {
    let file = fs::File::open(path)?;
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("obj") => read_obj(file),
        _ => read_off(file),
    }
}

/// How lengths are derived from vertex positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LengthInterpretation {
    /// Great-circle angle between the position directions.
    #[default]
    Arc,
    /// `|p − q|` is a chord of the unit sphere; the arc is `2 asin(|p − q| / 2)`.
    Chord,
}

impl std::str::FromStr for LengthInterpretation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arc" => Ok(Self::Arc),
            "chord" => Ok(Self::Chord),
            _ => Err(Error::Parse(format!("unknown length interpretation {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshSource {
    /// `"octahedron"` or `"tetrahedron"`.
    Builtin(String),
    Octasphere(usize),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthSource {
    FromPositions,
    /// Arc lengths keyed `"i-j"` with `i < j`.
    Explicit(BTreeMap<String, f64>),
    /// Surrogate lengths of the test surface `e^{2φ} g_round`.
    Lab {
        phi: String,
        #[serde(default)]
        mode: LabMode,
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LabMode {
    #[default]
    VertexScaled,
    Integrated,
}

fn default_samples() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub method: Option<String>,
    pub steps: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
}

/// Problem description read from JSON.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub mesh: MeshSource,
    #[serde(default = "from_positions")]
    pub lengths: LengthSource,
    #[serde(default)]
    pub length_interpretation: LengthInterpretation,
    pub marks: Option<[usize; 3]>,
    #[serde(default)]
    pub solver: SolverSection,
}

fn from_positions() -> LengthSource {
    LengthSource::FromPositions
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))
    }

    /// Problem for a bare mesh file with lengths from positions.
    pub fn for_mesh(path: PathBuf, interpretation: LengthInterpretation) -> Self {
        ProblemFile {
            mesh: MeshSource::Path(path),
            lengths: LengthSource::FromPositions,
            length_interpretation: interpretation,
            marks: None,
            solver: SolverSection::default(),
        }
    }

    /// Loads a `.json` problem, or wraps any other file as a mesh.
    pub fn load(path: &Path, interpretation: LengthInterpretation) -> Result<Self> {
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            let mut p = Self::parse(&fs::read_to_string(path)?)?;
            if let MeshSource::Path(m) = &mut p.mesh {
                if m.is_relative() {
                    *m = path.parent().unwrap_or(Path::new(".")).join(&*m);
                }
            }
            Ok(p)
        } else {
            Ok(Self::for_mesh(path.to_path_buf(), interpretation))
        }
    }

    pub fn mesh_data(&self) -> Result<MeshData> {
        match &self.mesh {
            MeshSource::Builtin(name) => match name.as_str() {
                "octahedron" => Ok((&octasphere(0)?).into()),
                "tetrahedron" => Ok(regular_tetrahedron()),
                other => Err(Error::Parse(format!("unknown builtin mesh {other:?}"))),
            },
            MeshSource::Octasphere(level) => Ok((&octasphere(*level)?).into()),
            MeshSource::Path(p) => read_mesh(p),
        }
    }

    /// Spherical arc lengths per edge of `tri`.
    pub fn arc_lengths(&self, data: &MeshData, tri: &Triangulation) -> Result<Vec<f64>> {
        match &self.lengths {
            LengthSource::FromPositions => Ok(lengths_from_positions(data, tri, self.length_interpretation)),
            LengthSource::Explicit(map) => explicit_lengths(map, tri),
            LengthSource::Lab { phi, mode, samples } => {
                let field: LinearField = phi.parse()?;
                let mode = match mode {
                    LabMode::VertexScaled => LengthMode::VertexScaled,
                    LabMode::Integrated => LengthMode::Integrated { samples: *samples },
                };
                let positions = data
                    .positions
                    .iter()
                    .map(|p| p.try_normalize(0.0).ok_or(Error::ZeroVector))
                    .collect::<Result<Vec<_>>>()?;
                let sphere = SphereMesh {
                    tri: Arc::new(tri.clone()),
                    positions,
                };
                metric_lengths(&sphere, &field, mode)
            }
        }
    }

    pub fn method(&self) -> Result<Method> {
        match self.solver.method.as_deref() {
            None | Some("newton") => Ok(Method::Newton),
            Some("continuation") => Ok(Method::Continuation {
                steps: self.solver.steps.unwrap_or(10),
            }),
            Some(other) => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let mut o = SolverOptions::default();
        if let Some(t) = self.solver.tolerance {
            o.tolerance = t;
        }
        if let Some(m) = self.solver.max_iterations {
            o.max_iterations = m;
        }
        o
    }

    /// Validated problem; `marks` overrides the file's marks.
    pub fn build(&self, marks: Option<[usize; 3]>) -> Result<(MeshData, UniformizationProblem)> {
        let data = self.mesh_data()?;
        let tri = data.triangulation()?;
        let lengths = self.arc_lengths(&data, &tri)?;
        let marks = marks
            .or(self.marks)
            .ok_or_else(|| Error::Parse("marks X,Y,Z are required".into()))?;
        let mesh = MetricMesh::spherical(tri, lengths)?;
        Ok((data, UniformizationProblem::new(mesh, marks)?))
    }
}

/// Regular tetrahedron with unit edges.
pub fn regular_tetrahedron() -> MeshData {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    MeshData {
        positions: vec![
            Vector3::new(s, s, s),
            Vector3::new(s, -s, -s),
            Vector3::new(-s, s, -s),
            Vector3::new(-s, -s, s),
        ],
        faces: vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    }
}

pub fn lengths_from_positions(data: &MeshData, tri: &Triangulation, how: LengthInterpretation) -> Vec<f64> {
    tri.edges()
        .iter()
        .map(|&[a, b]| {
            let (p, q) = (&data.positions[a], &data.positions[b]);
            match how {
                LengthInterpretation::Arc => p.cross(q).norm().atan2(p.dot(q)),
                LengthInterpretation::Chord => 2.0 * ((p - q).norm() / 2.0).min(1.0).asin(),
            }
        })
        .collect()
}

/// Euclidean distances between positions, per edge.
pub fn euclidean_lengths(data: &MeshData, tri: &Triangulation) -> Vec<f64> {
    tri.edges()
        .iter()
        .map(|&[a, b]| (data.positions[a] - data.positions[b]).norm())
        .collect()
}

fn explicit_lengths(map: &BTreeMap<String, f64>, tri: &Triangulation) -> Result<Vec<f64>> {
    let mut out = vec![f64::NAN; tri.num_edges()];
    for (key, &l) in map {
        let (a, b) = key
            .split_once('-')
            .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| Error::Parse(format!("bad edge key {key:?}, expected \"i-j\"")))?;
        if a >= b {
            return Err(Error::Parse(format!("edge key {key:?} must have i < j")));
        }
        let e = tri
            .edge_between(a, b)
            .ok_or_else(|| Error::Parse(format!("{key:?} is not an edge of the mesh")))?;
        out[e] = l;
    }
    if let Some(e) = out.iter().position(|l| l.is_nan()) {
        let [a, b] = tri.edge(e);
        return Err(Error::Parse(format!("missing length for edge \"{a}-{b}\"")));
    }
    Ok(out)
}

/// Weighted graph: `{"vertices": n, "edges": [[a, b], ...], "lengths": [...]}`,
/// lengths defaulting to 1.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub lengths: Option<Vec<f64>>,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        let g: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph file: {e}")))?;
        if let Some(l) = &g.lengths {
            if l.len() != g.edges.len() {
                return Err(Error::Parse(format!("{} lengths for {} edges", l.len(), g.edges.len())));
            }
        }
        if g.edges.iter().flatten().any(|&v| v >= g.vertices) {
            return Err(Error::Parse("edge endpoint out of range".into()));
        }
        Ok(g)
    }

    pub fn into_graph(self) -> (Graph, Vec<f64>) {
        let lengths = self.lengths.unwrap_or_else(|| vec![1.0; self.edges.len()]);
        (Graph::new(self.vertices, self.edges), lengths)
    }
}

/// Graph and edge lengths for the isoperimetric report. JSON files holding an
/// `edges` key are graphs; other JSON files are problems (arc lengths); mesh
/// files give Euclidean distances between positions.
pub fn load_graph(path: &Path) -> Result<(Graph, Vec<f64>)> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let text = fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if v.get("edges").is_some() {
            return Ok(GraphFile::parse(&text)?.into_graph());
        }
        let p = ProblemFile::load(path, LengthInterpretation::Arc)?;
        let data = p.mesh_data()?;
        let tri = data.triangulation()?;
        let l = p.arc_lengths(&data, &tri)?;
        return Ok((tri.graph(), l));
    }
    let data = read_mesh(path)?;
    let tri = data.triangulation()?;
    let l = euclidean_lengths(&data, &tri);
    Ok((tri.graph(), l))
}

/// 17 significant digits; non-finite values print as `nan`/`inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}").to_lowercase()
    }
}

/// JSON number with 17 significant digits, or `null` when not finite.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt17(x).parse().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn json_vec(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_num(x)).collect())
}
