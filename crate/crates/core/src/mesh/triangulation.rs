use std::collections::HashMap;

use crate::calculus::Graph;
use crate::error::{Error, Result};

/// Topology classes this crate works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Closed surface with Euler characteristic 2.
    Sphere,
    /// Surface with one boundary loop and Euler characteristic 1.
    Disk,
}

/// Corner of a face: `(face, position of the vertex inside the face)`.
pub type Corner = (usize, usize);

/// Combinatorial triangle mesh.
///
/// Vertex indices live in `0..num_vertices()`. A slot may be unused (no incident
/// face) only when the triangulation was produced by [`Triangulation::remove_open_star`],
/// which keeps the indices of surviving vertices.
#[derive(Debug, Clone)]
pub struct Triangulation {
    num_vertices: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<(usize, usize), usize>,
    // edge_corners[e][0]: corner opposite e in the face traversing e low -> high,
    // edge_corners[e][1]: the same for high -> low.
    edge_corners: Vec<[Option<Corner>; 2]>,
    // face_edges[f][k]: edge opposite corner k.
    face_edges: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    used: Vec<bool>,
    vertex_faces: Vec<Vec<usize>>,
    links: Vec<Vec<usize>>,
    topology: Topology,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Triangulation {
    /// Builds and validates a triangulation from consistently oriented faces.
    ///
    /// Every index in `0..=max index` must be used by some face.
    pub fn new(faces: Vec<[usize; 3]>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::NonSimplicial("empty face list".into()));
        }
        let n = faces.iter().flatten().copied().max().unwrap_or(0) + 1;
        let t = Self::with_slots(n, faces)?;
        if let Some(v) = (0..n).find(|&v| !t.used[v]) {
            return Err(Error::BadLink {
                vertex: v,
                reason: "isolated vertex".into(),
            });
        }
        Ok(t)
    }

    pub(crate) fn with_slots(num_vertices: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mut seen_faces = HashMap::new();
        for (f, face) in faces.iter().enumerate() {
            let [a, b, c] = *face;
            if a == b || b == c || a == c {
                return Err(Error::NonSimplicial(format!("face {f} repeats a vertex")));
            }
            if face.iter().any(|&v| v >= num_vertices) {
                return Err(Error::NonSimplicial(format!("face {f} has an out-of-range vertex")));
            }
            let mut s = *face;
            s.sort_unstable();
            if let Some(g) = seen_faces.insert(s, f) {
                return Err(Error::NonSimplicial(format!("faces {g} and {f} coincide")));
            }
        }

        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut edge_corners: Vec<[Option<Corner>; 2]> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        let mut face_count: Vec<u8> = Vec::new();
        for (f, face) in faces.iter().enumerate() {
            let mut fe = [0usize; 3];
            for k in 0..3 {
                let a = face[(k + 1) % 3];
                let b = face[(k + 2) % 3];
                let kk = key(a, b);
                let e = *edge_lookup.entry(kk).or_insert_with(|| {
                    edges.push([kk.0, kk.1]);
                    edge_corners.push([None, None]);
                    face_count.push(0);
                    edges.len() - 1
                });
                face_count[e] += 1;
                if face_count[e] > 2 {
                    return Err(Error::NonManifoldEdge(kk.0, kk.1));
                }
                let dir = usize::from(a > b);
                if edge_corners[e][dir].is_some() {
                    return Err(Error::BadLink {
                        vertex: a,
                        reason: format!("faces are not consistently oriented along edge ({a}, {b})"),
                    });
                }
                edge_corners[e][dir] = Some((f, k));
                fe[k] = e;
            }
            face_edges.push(fe);
        }

        let mut boundary = vec![false; num_vertices];
        for (e, corners) in edge_corners.iter().enumerate() {
            if corners[0].is_none() || corners[1].is_none() {
                boundary[edges[e][0]] = true;
                boundary[edges[e][1]] = true;
            }
        }

        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); num_vertices];
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                incident[v].push(f);
            }
        }
        let used: Vec<bool> = incident.iter().map(|fs| !fs.is_empty()).collect();

        let mut vertex_faces = vec![Vec::new(); num_vertices];
        let mut links = vec![Vec::new(); num_vertices];
        for v in 0..num_vertices {
            if !used[v] {
                continue;
            }
            let (fs, link) = rotate_around(v, &faces, &incident[v], boundary[v])?;
            vertex_faces[v] = fs;
            links[v] = link;
        }

        let topology = classify(num_vertices, &used, &faces, &edges, &edge_corners)?;

        Ok(Triangulation {
            num_vertices,
            faces,
            edges,
            edge_lookup,
            edge_corners,
            face_edges,
            boundary,
            used,
            vertex_faces,
            links,
            topology,
        })
    }

    /// Number of vertex slots (one past the largest index).
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Number of vertices that carry at least one face.
    pub fn vertex_count(&self) -> usize {
        self.used.iter().filter(|&&u| u).count()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn is_used(&self, v: usize) -> bool {
        self.used.get(v).copied().unwrap_or(false)
    }

    /// Iterates over used vertices in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices).filter(move |&v| self.used[v])
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    /// Edges as `[low, high]` vertex pairs.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&key(a, b)).copied()
    }

    /// Edge ids of face `f`; entry `k` is the edge opposite corner `k`.
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// Corners opposite edge `e` (one per incident face).
    pub fn opposite_corners(&self, e: usize) -> impl Iterator<Item = Corner> + '_ {
        self.edge_corners[e].iter().flatten().copied()
    }

    /// Faces incident to edge `e`.
    pub fn edge_faces(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.opposite_corners(e).map(|(f, _)| f)
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_corners[e].iter().any(Option::is_none)
    }

    pub fn is_interior_edge(&self, e: usize) -> bool {
        !self.is_boundary_edge(e)
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary[v]
    }

    /// Used vertices not on the boundary.
    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices().filter(move |&v| !self.boundary[v])
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices().filter(move |&v| self.boundary[v])
    }

    /// Faces around `v` in rotational order.
    pub fn star(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Link of `v` in rotational order: a cycle for interior vertices, a path
    /// (first and last entries on the boundary) for boundary vertices.
    pub fn link(&self, v: usize) -> &[usize] {
        &self.links[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.links[v].len()
    }

    /// Position of `v` inside face `f`.
    pub fn corner_of(&self, f: usize, v: usize) -> Option<usize> {
        self.faces[f].iter().position(|&w| w == v)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Boundary vertices in the order induced by face orientation.
    /// Empty for closed triangulations.
    pub fn boundary_loop(&self) -> Vec<usize> {
        let mut next = HashMap::new();
        for e in 0..self.edges.len() {
            if let Some((f, k)) = self.boundary_corner(e) {
                let face = self.faces[f];
                next.insert(face[(k + 1) % 3], face[(k + 2) % 3]);
            }
        }
        let Some(&start) = next.keys().min() else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut cur = next[&start];
        while cur != start && out.len() <= next.len() {
            out.push(cur);
            cur = next[&cur];
        }
        out
    }

    fn boundary_corner(&self, e: usize) -> Option<Corner> {
        match self.edge_corners[e] {
            [Some(c), None] | [None, Some(c)] => Some(c),
            _ => None,
        }
    }

    /// Undirected 1-skeleton with the same vertex and edge numbering.
    pub fn graph(&self) -> Graph {
        Graph::new(self.num_vertices, self.edges.clone())
    }

    /// Removes the open star of `v` from a closed sphere triangulation.
    ///
    /// The result is a disk whose boundary is the link of `v`; `v` becomes an
    /// unused slot and every other vertex keeps its index.
    pub fn remove_open_star(&self, v: usize) -> Result<Triangulation> {
        if self.topology != Topology::Sphere {
            return Err(Error::NotClosed);
        }
        if !self.is_used(v) || self.links[v].len() < 3 {
            return Err(Error::DegenerateLink(v));
        }
        let faces = self
            .faces
            .iter()
            .filter(|f| !f.contains(&v))
            .copied()
            .collect();
        let t = Triangulation::with_slots(self.num_vertices, faces)?;
        if t.topology != Topology::Disk {
            return Err(Error::DegenerateLink(v));
        }
        Ok(t)
    }

    /// Vertex cuts of size at most three in the 1-skeleton, found by exhaustive
    /// removal of vertex subsets. Returns `None` for meshes with more than 200
    /// vertices. At most `limit` cuts are reported.
    pub fn small_vertex_cuts(&self, limit: usize) -> Option<Vec<Vec<usize>>> {
        let verts: Vec<usize> = self.vertices().collect();
        if verts.len() > 200 {
            return None;
        }
        let adj: Vec<Vec<usize>> = (0..self.num_vertices)
            .map(|v| self.links[v].clone())
            .collect();
        let mut removed = vec![false; self.num_vertices];
        let mut cuts = Vec::new();
        let m = verts.len();
        let connected_without = |removed: &[bool]| -> bool {
            let Some(&start) = verts.iter().find(|&&v| !removed[v]) else {
                return true;
            };
            let mut seen = vec![false; removed.len()];
            let mut stack = vec![start];
            seen[start] = true;
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !removed[y] && !seen[y] {
                        seen[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
            count == verts.iter().filter(|&&v| !removed[v]).count()
        };
        'outer: for size in 1..=3usize.min(m.saturating_sub(2)) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                // only report minimal cuts
                let contains_smaller = cuts
                    .iter()
                    .any(|c: &Vec<usize>| c.iter().all(|x| idx.iter().any(|&i| verts[i] == *x)));
                if !contains_smaller {
                    for &i in &idx {
                        removed[verts[i]] = true;
                    }
                    if !connected_without(&removed) {
                        cuts.push(idx.iter().map(|&i| verts[i]).collect());
                        if cuts.len() >= limit {
                            break 'outer;
                        }
                    }
                    for &i in &idx {
                        removed[verts[i]] = false;
                    }
                }
                // next combination
                let mut p = size;
                loop {
                    if p == 0 {
                        continue 'outer;
                    }
                    p -= 1;
                    if idx[p] < m - size + p {
                        break;
                    }
                }
                idx[p] += 1;
                for q in p + 1..size {
                    idx[q] = idx[q - 1] + 1;
                }
            }
        }
        Some(cuts)
    }
}

/// Orders the faces around `v` and extracts its link.
fn rotate_around(
    v: usize,
    faces: &[[usize; 3]],
    incident: &[usize],
    on_boundary: bool,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let bad = |reason: &str| Error::BadLink {
        vertex: v,
        reason: reason.to_string(),
    };
    // face (v, a, b) in cyclic order: a follows v, b precedes it
    let mut by_out: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut has_pred: HashMap<usize, bool> = HashMap::new();
    for &f in incident {
        let face = faces[f];
        let k = face.iter().position(|&w| w == v).expect("incident face");
        let a = face[(k + 1) % 3];
        let b = face[(k + 2) % 3];
        if by_out.insert(a, (b, f)).is_some() {
            return Err(bad("link is not a simple cycle or path"));
        }
        has_pred.insert(b, true);
    }
    let starts: Vec<usize> = by_out
        .keys()
        .filter(|a| !has_pred.contains_key(a))
        .copied()
        .collect();
    let start = match (starts.len(), on_boundary) {
        (0, false) => *by_out.keys().min().expect("nonempty"),
        (1, true) => starts[0],
        _ => return Err(bad("link is not a single cycle or path")),
    };
    let mut fs = Vec::with_capacity(incident.len());
    let mut link = vec![start];
    let mut cur = start;
    while let Some(&(b, f)) = by_out.get(&cur) {
        fs.push(f);
        if b == start {
            break;
        }
        link.push(b);
        cur = b;
        if fs.len() > incident.len() {
            return Err(bad("link traversal does not terminate"));
        }
    }
    if fs.len() != incident.len() {
        return Err(bad("link has more than one component"));
    }
    Ok((fs, link))
}

fn classify(
    n: usize,
    used: &[bool],
    faces: &[[usize; 3]],
    edges: &[[usize; 2]],
    edge_corners: &[[Option<Corner>; 2]],
) -> Result<Topology> {
    // connectivity via union-find on vertices
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &[a, b] in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut roots: Vec<usize> = (0..n).filter(|&v| used[v]).map(|v| find(&mut parent, v)).collect();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() != 1 {
        return Err(Error::UnsupportedTopology(format!("{} connected components", roots.len())));
    }
    let v = used.iter().filter(|&&u| u).count() as i64;
    let chi = v - edges.len() as i64 + faces.len() as i64;
    let boundary_edges: Vec<usize> = (0..edges.len())
        .filter(|&e| edge_corners[e].iter().any(Option::is_none))
        .collect();
    match (chi, boundary_edges.is_empty()) {
        (2, true) => Ok(Topology::Sphere),
        (1, false) => {
            // one boundary loop: boundary edges form a single cycle
            let mut next = HashMap::new();
            for &e in &boundary_edges {
                let (f, k) = edge_corners[e].iter().flatten().next().copied().expect("one face");
                let face = faces[f];
                next.insert(face[(k + 1) % 3], face[(k + 2) % 3]);
            }
            let start = *next.keys().next().expect("boundary");
            let mut cur = next[&start];
            let mut len = 1;
            while cur != start {
                cur = next[&cur];
                len += 1;
                if len > next.len() {
                    break;
                }
            }
            if len == next.len() {
                Ok(Topology::Disk)
            } else {
                Err(Error::UnsupportedTopology("more than one boundary loop".into()))
            }
        }
        _ => Err(Error::UnsupportedTopology(format!(
            "Euler characteristic {chi} with {} boundary edges",
            boundary_edges.len()
        ))),
    }
}
