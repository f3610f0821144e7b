//! Level surfaces of the correlation measures over the state tetrahedron.
//!
//! Fields are sampled on a uniform grid over `[-1, 1]³`. Outside the tetrahedron they are
//! continued by dropping entropy terms with nonpositive eigenvalue, which keeps cells that
//! straddle the boundary usable. Surfaces are extracted by marching tetrahedra, with each
//! crossing point placed by bisection on the exact field, then clipped to the tetrahedron.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::measures;
use crate::state::{sample_physical, spectrum, CorrelationVector};

pub const DEFAULT_RESOLUTION: usize = 129;
pub const DEFAULT_REFINE_TOL: f64 = 1e-8;
/// Midpoint gaps at or below this are not reported by [`convexity_witness`].
pub const CONVEXITY_GAP_TOL: f64 = 1e-9;
/// Vertices with all eigenvalues above `-INSIDE_TOL` count as inside the tetrahedron.
const INSIDE_TOL: f64 = 1e-12;
const MIN_TRIANGLE_AREA: f64 = 1e-14;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarFieldId {
    Discord,
    Classical,
    MutualInfo,
    Concurrence,
    Eof,
}

impl ScalarFieldId {
    pub const ALL: [ScalarFieldId; 5] = [
        ScalarFieldId::Discord,
        ScalarFieldId::Classical,
        ScalarFieldId::MutualInfo,
        ScalarFieldId::Concurrence,
        ScalarFieldId::Eof,
    ];

    /// The measure itself; errors outside the tetrahedron.
    pub fn evaluate(self, c: CorrelationVector) -> Result<f64> {
        match self {
            ScalarFieldId::Discord => measures::discord(c),
            ScalarFieldId::Classical => measures::classical_correlation(c),
            ScalarFieldId::MutualInfo => measures::mutual_information(c),
            ScalarFieldId::Concurrence => measures::concurrence(c),
            ScalarFieldId::Eof => measures::entanglement_of_formation(c),
        }
    }

    /// Continuous extension to all of correlation space; equal to [`Self::evaluate`] on
    /// the tetrahedron.
    pub fn evaluate_extended(self, c: CorrelationVector) -> f64 {
        match self {
            ScalarFieldId::Discord => measures::mutual_information_unchecked(c) - measures::classical_unchecked(c),
            ScalarFieldId::Classical => measures::classical_unchecked(c),
            ScalarFieldId::MutualInfo => measures::mutual_information_unchecked(c),
            ScalarFieldId::Concurrence => measures::concurrence_unchecked(c),
            ScalarFieldId::Eof => measures::eof_from_concurrence(measures::concurrence_unchecked(c)),
        }
    }

    /// `(min, max)` of the field over the tetrahedron.
    pub fn range(self) -> (f64, f64) {
        match self {
            ScalarFieldId::MutualInfo => (0.0, 2.0),
            _ => (0.0, 1.0),
        }
    }
}

impl fmt::Display for ScalarFieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarFieldId::Discord => "discord",
            ScalarFieldId::Classical => "classical",
            ScalarFieldId::MutualInfo => "mutual_info",
            ScalarFieldId::Concurrence => "concurrence",
            ScalarFieldId::Eof => "eof",
        })
    }
}

impl FromStr for ScalarFieldId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScalarFieldId::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown field {s:?}")))
    }
}

/// Field values on a uniform `resolution³` grid over `[-1, 1]³`, indexed `(i, j, k)` with
/// `i` along `c1`.
#[derive(Debug, Clone)]
pub struct ScalarGrid {
    pub field: ScalarFieldId,
    pub resolution: usize,
    values: Vec<f64>,
    /// Per cell (indexed by its lowest corner): false if the cell lies entirely outside
    /// the tetrahedron.
    valid_cells: Vec<bool>,
}

impl ScalarGrid {
    pub fn coordinate(&self, i: usize) -> f64 {
        grid_coordinate(self.resolution, i)
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> CorrelationVector {
        CorrelationVector::new(self.coordinate(i), self.coordinate(j), self.coordinate(k))
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    pub fn is_valid_cell(&self, i: usize, j: usize, k: usize) -> bool {
        let m = self.resolution - 1;
        self.valid_cells[(i * m + j) * m + k]
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.resolution + j) * self.resolution + k
    }

    fn unindex(&self, idx: usize) -> [usize; 3] {
        let n = self.resolution;
        [idx / (n * n), (idx / n) % n, idx % n]
    }
}

fn grid_coordinate(resolution: usize, i: usize) -> f64 {
    let half = (resolution - 1) as f64 / 2.0;
    (i as f64 - half) / half
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 9 || resolution.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} must be odd and at least 9"
        )));
    }
    Ok(())
}

pub fn sample_field(field: ScalarFieldId, resolution: usize) -> Result<ScalarGrid> {
    check_resolution(resolution)?;
    let n = resolution;
    let values: Vec<f64> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let c = CorrelationVector::new(
                grid_coordinate(n, idx / (n * n)),
                grid_coordinate(n, (idx / n) % n),
                grid_coordinate(n, idx % n),
            );
            field.evaluate_extended(c)
        })
        .collect();

    let m = n - 1;
    let valid_cells = (0..m * m * m)
        .into_par_iter()
        .map(|cell| {
            let (i, j, k) = (cell / (m * m), (cell / m) % m, cell % m);
            // Outside if every corner lies strictly beyond the same face plane.
            let mut beyond = [true; 4];
            for corner in 0..8 {
                let c = CorrelationVector::new(
                    grid_coordinate(n, i + (corner >> 2 & 1)),
                    grid_coordinate(n, j + (corner >> 1 & 1)),
                    grid_coordinate(n, k + (corner & 1)),
                );
                for (b, l) in beyond.iter_mut().zip(spectrum(c).lambda) {
                    *b &= l < -INSIDE_TOL;
                }
            }
            !beyond.iter().any(|&b| b)
        })
        .collect();

    Ok(ScalarGrid {
        field,
        resolution,
        values,
        valid_cells,
    })
}

/// Triangle mesh in correlation space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// `|field(v) - level|` per vertex.
    pub residuals: Vec<f64>,
    /// Vertices created by clipping against a face of the tetrahedron.
    pub clipped: Vec<bool>,
}

impl TriangleMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Largest residual over vertices not created by clipping.
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.clipped)
            .filter(|(_, &c)| !c)
            .map(|(r, _)| *r)
            .fold(0.0, f64::max)
    }

    pub fn clipped_count(&self) -> usize {
        self.clipped.iter().filter(|&&c| c).count()
    }

    /// Largest distance of a vertex from its nearest coordinate axis.
    pub fn max_axis_distance(&self) -> f64 {
        self.vertices.iter().map(|v| axis_distance(*v)).fold(0.0, f64::max)
    }

    /// Number of edge-connected components.
    pub fn connected_components(&self) -> usize {
        self.component_vertices().len()
    }

    /// Vertex ids of each edge-connected component, ordered by smallest id.
    pub fn component_vertices(&self) -> Vec<Vec<usize>> {
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        let mut used = vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &v in t {
                used[v] = true;
            }
            for (a, b) in [(t[0], t[1]), (t[1], t[2])] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in (0..self.vertices.len()).filter(|&v| used[v]) {
            let root = find(&mut parent, v);
            groups.entry(root).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]))?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,z,residual")?;
        for (v, r) in self.vertices.iter().zip(&self.residuals) {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[2]),
                fmt_f64(*r)
            )?;
        }
        Ok(())
    }
}

/// Distance from `v` to the nearest coordinate axis.
pub fn axis_distance(v: [f64; 3]) -> f64 {
    let sq = [v[0] * v[0], v[1] * v[1], v[2] * v[2]];
    let total: f64 = sq.iter().sum();
    sq.iter()
        .map(|s| (total - s).max(0.0))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

fn export_with(
    mesh: &TriangleMesh,
    path: &Path,
    write: impl Fn(&TriangleMesh, &mut BufWriter<std::fs::File>) -> std::io::Result<()>,
) -> Result<()> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write(mesh, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// `v x y z` lines then 1-based `f i j k` lines.
pub fn export_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    export_with(mesh, path.as_ref(), |m, w| m.write_obj(w))
}

/// Header `x,y,z,residual`, one vertex per row.
pub fn export_csv(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    export_with(mesh, path.as_ref(), |m, w| m.write_csv(w))
}

type EdgeKey = (usize, usize);

/// Corner offsets of the six tetrahedra of a cell whose lowest corner is `(i, j, k)`.
///
/// Every tetrahedron contains the cell diagonal running from the corner nearest the origin
/// to the farthest one, so the decomposition is mirror symmetric about each coordinate
/// plane (the grid is odd, so no cell straddles one) and consistent across shared faces.
fn cell_tetrahedra(half: usize, cell: [usize; 3]) -> [[[usize; 3]; 4]; 6] {
    let toward_origin = cell.map(|x| x < half);
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.map(|perm| {
        let mut local = [0usize; 3];
        let mut out = [[0usize; 3]; 4];
        for step in 0..4 {
            if step > 0 {
                local[perm[step - 1]] = 1;
            }
            for axis in 0..3 {
                let off = if toward_origin[axis] {
                    1 - local[axis]
                } else {
                    local[axis]
                };
                out[step][axis] = cell[axis] + off;
            }
        }
        out
    })
}

/// Triangles (as crossing edges) produced by one tetrahedron.
fn march_tetrahedron(ids: [usize; 4], inside: [bool; 4], out: &mut Vec<[EdgeKey; 3]>) {
    let key = |a: usize, b: usize| (ids[a].min(ids[b]), ids[a].max(ids[b]));
    let ins: Vec<usize> = (0..4).filter(|&v| inside[v]).collect();
    let outs: Vec<usize> = (0..4).filter(|&v| !inside[v]).collect();
    match ins.len() {
        1 => out.push([key(ins[0], outs[0]), key(ins[0], outs[1]), key(ins[0], outs[2])]),
        3 => out.push([key(outs[0], ins[0]), key(outs[0], ins[1]), key(outs[0], ins[2])]),
        2 => {
            let (a, b, c, d) = (ins[0], ins[1], outs[0], outs[1]);
            out.push([key(a, c), key(a, d), key(b, d)]);
            out.push([key(a, c), key(b, d), key(b, c)]);
        }
        _ => {}
    }
}

/// Bisects the segment between a point below `level` and one at or above it.
fn refine_crossing(field: ScalarFieldId, level: f64, tol: f64, below: [f64; 3], above: [f64; 3]) -> [f64; 3] {
    let eval = |p: [f64; 3]| field.evaluate_extended(CorrelationVector::from_array(p)) - level;
    let (mut lo, mut hi) = (below, above);
    if eval(hi).abs() <= tol {
        return hi;
    }
    if eval(lo).abs() <= tol {
        return lo;
    }
    let mut mid = lo;
    for _ in 0..MAX_BISECTIONS {
        mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])];
        let f = eval(mid);
        if f.abs() <= tol {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

fn lambdas(p: [f64; 3]) -> [f64; 4] {
    spectrum(CorrelationVector::from_array(p)).lambda
}

fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let x = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Polygon clipping against the four half-spaces `λ_ab ≥ 0`, sharing clip vertices between
/// neighbouring triangles.
struct Clipper {
    positions: Vec<[f64; 3]>,
    clipped: Vec<bool>,
    cuts: HashMap<(usize, usize, usize), usize>,
}

impl Clipper {
    fn cut(&mut self, a: usize, b: usize, face: usize) -> usize {
        let key = (a.min(b), a.max(b), face);
        if let Some(&id) = self.cuts.get(&key) {
            return id;
        }
        // Interpolate from the lower id so both neighbours compute the same point.
        let (p, q) = (self.positions[key.0], self.positions[key.1]);
        let (dp, dq) = (lambdas(p)[face], lambdas(q)[face]);
        let t = dp / (dp - dq);
        let point = [
            p[0] + t * (q[0] - p[0]),
            p[1] + t * (q[1] - p[1]),
            p[2] + t * (q[2] - p[2]),
        ];
        let id = self.positions.len();
        self.positions.push(point);
        self.clipped.push(true);
        self.cuts.insert(key, id);
        id
    }

    fn clip(&mut self, tri: [usize; 3], out: &mut Vec<[usize; 3]>) {
        let inside = |p: [f64; 3]| lambdas(p).map(|l| l >= -INSIDE_TOL);
        if tri.iter().all(|&v| inside(self.positions[v]).iter().all(|&x| x)) {
            out.push(tri);
            return;
        }
        let mut poly: Vec<usize> = tri.to_vec();
        for face in 0..4 {
            let mut next = Vec::with_capacity(poly.len() + 1);
            for (idx, &cur) in poly.iter().enumerate() {
                let nxt = poly[(idx + 1) % poly.len()];
                let cur_in = lambdas(self.positions[cur])[face] >= -INSIDE_TOL;
                let nxt_in = lambdas(self.positions[nxt])[face] >= -INSIDE_TOL;
                if cur_in {
                    next.push(cur);
                }
                if cur_in != nxt_in {
                    next.push(self.cut(cur, nxt, face));
                }
            }
            poly = next;
            if poly.len() < 3 {
                return;
            }
        }
        for i in 1..poly.len() - 1 {
            out.push([poly[0], poly[i], poly[i + 1]]);
        }
    }
}

/// Extracts the surface `field = level`, clipped to the tetrahedron.
pub fn extract_level_surface(
    field: ScalarFieldId,
    level: f64,
    resolution: usize,
    refine_tol: f64,
) -> Result<TriangleMesh> {
    let (min, max) = field.range();
    if !(level > min && level < max) {
        return Err(Error::LevelOutOfRange { level, min, max });
    }
    if refine_tol.is_nan() || refine_tol < 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "refine tolerance {refine_tol} is below 1e-10"
        )));
    }
    let grid = sample_field(field, resolution)?;
    Ok(extract_from_grid(&grid, level, refine_tol))
        .and_then(|m| if m.is_empty() { Err(Error::EmptyMesh) } else { Ok(m) })
}

/// Marching tetrahedra on an already sampled grid.
pub fn extract_from_grid(grid: &ScalarGrid, level: f64, refine_tol: f64) -> TriangleMesh {
    let n = grid.resolution;
    let half = (n - 1) / 2;
    let field = grid.field;

    // Crossing edges per triangle, gathered slab by slab in a fixed order.
    let edge_tris: Vec<[EdgeKey; 3]> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..n - 1 {
                for k in 0..n - 1 {
                    if !grid.is_valid_cell(i, j, k) {
                        continue;
                    }
                    for tet in cell_tetrahedra(half, [i, j, k]) {
                        let ids = tet.map(|p| grid.index(p[0], p[1], p[2]));
                        let inside = ids.map(|id| grid.values[id] >= level);
                        march_tetrahedron(ids, inside, &mut out);
                    }
                }
            }
            out
        })
        .flatten_iter()
        .collect();

    let mut edge_ids: HashMap<EdgeKey, usize> = HashMap::new();
    let mut edges: Vec<EdgeKey> = Vec::new();
    let tris: Vec<[usize; 3]> = edge_tris
        .iter()
        .map(|t| {
            t.map(|e| {
                *edge_ids.entry(e).or_insert_with(|| {
                    edges.push(e);
                    edges.len() - 1
                })
            })
        })
        .collect();

    let positions: Vec<[f64; 3]> = edges
        .par_iter()
        .map(|&(a, b)| {
            let (pa, pb) = (grid.unindex(a), grid.unindex(b));
            let (ca, cb) = (
                grid.point(pa[0], pa[1], pa[2]).to_array(),
                grid.point(pb[0], pb[1], pb[2]).to_array(),
            );
            if grid.values[a] < level {
                refine_crossing(field, level, refine_tol, ca, cb)
            } else {
                refine_crossing(field, level, refine_tol, cb, ca)
            }
        })
        .collect();

    let mut clipper = Clipper {
        clipped: vec![false; positions.len()],
        positions,
        cuts: HashMap::new(),
    };
    let mut clipped_tris = Vec::with_capacity(tris.len());
    for t in tris {
        clipper.clip(t, &mut clipped_tris);
    }
    let p = &clipper.positions;
    clipped_tris.retain(|t| triangle_area(p[t[0]], p[t[1]], p[t[2]]) > MIN_TRIANGLE_AREA);

    // Keep referenced vertices only, in order of first use.
    let mut remap = vec![usize::MAX; p.len()];
    let mut mesh = TriangleMesh::default();
    for t in &clipped_tris {
        let mapped = t.map(|v| {
            if remap[v] == usize::MAX {
                remap[v] = mesh.vertices.len();
                mesh.vertices.push(p[v]);
                mesh.clipped.push(clipper.clipped[v]);
            }
            remap[v]
        });
        mesh.triangles.push(mapped);
    }
    mesh.residuals = mesh
        .vertices
        .par_iter()
        .map(|v| (field.evaluate_extended(CorrelationVector::from_array(*v)) - level).abs())
        .collect();
    mesh
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidpointViolation {
    pub x: CorrelationVector,
    pub y: CorrelationVector,
    /// How far the midpoint value lies on the wrong side of the chord average.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityVerdict {
    /// No violations in either direction.
    ConvexAndConcave,
    ConvexConsistent,
    ConcaveConsistent,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub field: ScalarFieldId,
    pub violations_convex: Vec<MidpointViolation>,
    pub violations_concave: Vec<MidpointViolation>,
    pub trials: usize,
    pub seed: u64,
    pub gap_tol: f64,
}

impl ConvexityReport {
    pub fn verdict(&self) -> ConvexityVerdict {
        match (self.violations_convex.is_empty(), self.violations_concave.is_empty()) {
            (true, true) => ConvexityVerdict::ConvexAndConcave,
            (true, false) => ConvexityVerdict::ConvexConsistent,
            (false, true) => ConvexityVerdict::ConcaveConsistent,
            (false, false) => ConvexityVerdict::Neither,
        }
    }
}

/// Fixed pairs tested ahead of the random ones: two classical states on different axes
/// whose mixture has discord, and two discordant states mixing to a classical one.
pub fn deterministic_witness_pairs() -> [(CorrelationVector, CorrelationVector); 2] {
    [
        (
            CorrelationVector::new(0.5, 0.0, 0.0),
            CorrelationVector::new(0.0, 0.5, 0.0),
        ),
        (
            CorrelationVector::new(0.6, 0.3, 0.0),
            CorrelationVector::new(0.6, -0.3, 0.0),
        ),
    ]
}

/// Midpoint convexity test on random physical pairs, using [`CONVEXITY_GAP_TOL`].
pub fn convexity_witness(field: ScalarFieldId, trials: usize, seed: u64) -> Result<ConvexityReport> {
    convexity_witness_with_tol(field, trials, seed, CONVEXITY_GAP_TOL)
}

pub fn convexity_witness_with_tol(
    field: ScalarFieldId,
    trials: usize,
    seed: u64,
    gap_tol: f64,
) -> Result<ConvexityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<_> = deterministic_witness_pairs().to_vec();
    pairs.extend((0..trials).map(|_| (sample_physical(&mut rng), sample_physical(&mut rng))));

    let mut report = ConvexityReport {
        field,
        violations_convex: Vec::new(),
        violations_concave: Vec::new(),
        trials,
        seed,
        gap_tol,
    };
    for (x, y) in pairs {
        let fx = field.evaluate(x)?;
        let fy = field.evaluate(y)?;
        let fm = field.evaluate(x.midpoint(y))?;
        let gap = fm - 0.5 * (fx + fy);
        if gap > gap_tol {
            report.violations_convex.push(MidpointViolation { x, y, gap });
        } else if -gap > gap_tol {
            report.violations_concave.push(MidpointViolation { x, y, gap: -gap });
        }
    }
    Ok(report)
}
