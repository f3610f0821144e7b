use std::collections::HashMap;

use bell_discord::isosurface::{
    export_csv, export_obj, extract_from_grid, extract_level_surface, sample_field, ScalarFieldId, TriangleMesh,
    DEFAULT_REFINE_TOL,
};
use bell_discord::state::{spectrum, BellLabel};
use bell_discord::{CorrelationVector, Error};

// Half-width of the cube on which C = 1/2, i.e. H2((1 + h)/2) = 1/2.
const CUBE_HALF_WIDTH: f64 = 0.779_944_271_123_280_9;

/// Vertex lookup with tolerance, via a hash of rounded coordinates.
struct VertexIndex {
    cell: f64,
    bins: HashMap<[i64; 3], Vec<[f64; 3]>>,
}

impl VertexIndex {
    fn new(vertices: &[[f64; 3]], cell: f64) -> Self {
        let mut bins: HashMap<[i64; 3], Vec<[f64; 3]>> = HashMap::new();
        for v in vertices {
            bins.entry(Self::key(v, cell)).or_default().push(*v);
        }
        Self { cell, bins }
    }

    fn key(v: &[f64; 3], cell: f64) -> [i64; 3] {
        v.map(|x| (x / cell).floor() as i64)
    }

    fn nearest(&self, v: &[f64; 3]) -> f64 {
        let k = Self::key(v, self.cell);
        let mut best = f64::INFINITY;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bin) = self.bins.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for w in bin {
                            let d = ((v[0] - w[0]).powi(2) + (v[1] - w[1]).powi(2) + (v[2] - w[2]).powi(2)).sqrt();
                            best = best.min(d);
                        }
                    }
                }
            }
        }
        best
    }
}

fn symmetry_images(v: [f64; 3]) -> Vec<[f64; 3]> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let flips = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]];
    let mut out = Vec::new();
    for p in perms {
        for f in flips {
            out.push([f[0] * v[p[0]], f[1] * v[p[1]], f[2] * v[p[2]]]);
        }
    }
    out
}

fn parse_obj(text: &str) -> TriangleMesh {
    let mut mesh = TriangleMesh::default();
    for line in text.lines() {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let xs: Vec<f64> = parts.map(|p| p.parse().unwrap()).collect();
                mesh.vertices.push([xs[0], xs[1], xs[2]]);
            }
            Some("f") => {
                let ids: Vec<usize> = parts.map(|p| p.parse::<usize>().unwrap() - 1).collect();
                mesh.triangles.push([ids[0], ids[1], ids[2]]);
            }
            _ => panic!("unexpected OBJ line {line:?}"),
        }
    }
    mesh
}

#[test]
fn concurrence_half_gives_four_planar_pieces() {
    let mesh = extract_level_surface(ScalarFieldId::Concurrence, 0.5, 33, DEFAULT_REFINE_TOL).unwrap();
    assert_eq!(mesh.connected_components(), 4);
    for comp in mesh.component_vertices() {
        // Every vertex of a piece sits on the plane λ_ab = 3/4 of one Bell vertex.
        let label = spectrum(CorrelationVector::from_array(mesh.vertices[comp[0]])).max().0;
        for &v in &comp {
            let s = spectrum(CorrelationVector::from_array(mesh.vertices[v]));
            assert!((s.get(label) - 0.75).abs() <= 1e-6, "vertex {v} off plane");
        }
    }
    let mut labels: Vec<BellLabel> = mesh
        .component_vertices()
        .iter()
        .map(|comp| spectrum(CorrelationVector::from_array(mesh.vertices[comp[0]])).max().0)
        .collect();
    labels.sort_by_key(|l| l.index());
    assert_eq!(labels, BellLabel::ALL.to_vec());
}

#[test]
fn classical_half_is_a_cube() {
    let mesh = extract_level_surface(ScalarFieldId::Classical, 0.5, 33, DEFAULT_REFINE_TOL).unwrap();
    assert!(mesh.max_residual() <= DEFAULT_REFINE_TOL);
    for (v, clipped) in mesh.vertices.iter().zip(&mesh.clipped) {
        if !clipped {
            let m = CorrelationVector::from_array(*v).c_max();
            assert!((m - CUBE_HALF_WIDTH).abs() <= 1e-7, "{v:?}");
        }
    }
}

#[test]
fn discord_mesh_has_tetrahedral_symmetry() {
    let mesh = extract_level_surface(ScalarFieldId::Discord, 0.15, 41, DEFAULT_REFINE_TOL).unwrap();
    assert!(mesh.max_residual() <= DEFAULT_REFINE_TOL);
    let index = VertexIndex::new(&mesh.vertices, 1e-3);
    for v in &mesh.vertices {
        for g in symmetry_images(*v) {
            let d = index.nearest(&g);
            assert!(d <= 1e-6, "image {g:?} of {v:?} unmatched ({d:e})");
        }
    }
}

#[test]
fn tubes_shrink_with_level() {
    let dist: Vec<f64> = [0.03, 0.15, 0.35]
        .iter()
        .map(|&l| {
            extract_level_surface(ScalarFieldId::Discord, l, 33, DEFAULT_REFINE_TOL)
                .unwrap()
                .max_axis_distance()
        })
        .collect();
    assert!(dist[0] < dist[1] && dist[1] < dist[2], "{dist:?}");
}

#[test]
fn extraction_and_export_are_deterministic() {
    let grid = sample_field(ScalarFieldId::Discord, 25).unwrap();
    let a = extract_from_grid(&grid, 0.2, DEFAULT_REFINE_TOL);
    let b = extract_level_surface(ScalarFieldId::Discord, 0.2, 25, DEFAULT_REFINE_TOL).unwrap();
    assert_eq!(a, b);

    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.obj"), dir.path().join("b.obj"));
    export_obj(&a, &p1).unwrap();
    export_obj(&b, &p2).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());

    let (q1, q2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    export_csv(&a, &q1).unwrap();
    export_csv(&b, &q2).unwrap();
    assert_eq!(std::fs::read(&q1).unwrap(), std::fs::read(&q2).unwrap());
}

#[test]
fn obj_round_trips_exactly() {
    let mesh = extract_level_surface(ScalarFieldId::Eof, 0.3, 21, DEFAULT_REFINE_TOL).unwrap();
    let mut buf = Vec::new();
    mesh.write_obj(&mut buf).unwrap();
    let back = parse_obj(std::str::from_utf8(&buf).unwrap());
    assert_eq!(back.vertices, mesh.vertices);
    assert_eq!(back.triangles, mesh.triangles);
}

#[test]
fn csv_has_header_and_one_row_per_vertex() {
    let mesh = extract_level_surface(ScalarFieldId::MutualInfo, 0.5, 21, DEFAULT_REFINE_TOL).unwrap();
    let mut buf = Vec::new();
    mesh.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), mesh.vertices.len());
    for (row, v) in rows.iter().zip(&mesh.vertices) {
        let xs: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(&xs[..3], &v[..]);
    }
}

#[test]
fn empty_mesh_is_not_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.obj");
    assert!(matches!(
        export_obj(&TriangleMesh::default(), &path),
        Err(Error::EmptyMesh)
    ));
    assert!(!path.exists());
    let path = dir.path().join("empty.csv");
    assert!(matches!(
        export_csv(&TriangleMesh::default(), &path),
        Err(Error::EmptyMesh)
    ));
    assert!(!path.exists());
}

#[test]
fn unwritable_path_reports_io_error() {
    let mesh = extract_level_surface(ScalarFieldId::Concurrence, 0.5, 17, DEFAULT_REFINE_TOL).unwrap();
    let err = export_obj(&mesh, "/nonexistent-dir/x.obj").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn rejects_bad_arguments() {
    assert!(matches!(
        extract_level_surface(ScalarFieldId::Discord, 5.0, 33, DEFAULT_REFINE_TOL),
        Err(Error::LevelOutOfRange { .. })
    ));
    assert!(extract_level_surface(ScalarFieldId::Discord, 0.0, 33, DEFAULT_REFINE_TOL).is_err());
    assert!(extract_level_surface(ScalarFieldId::Discord, 0.1, 32, DEFAULT_REFINE_TOL).is_err());
    assert!(extract_level_surface(ScalarFieldId::Discord, 0.1, 33, 1e-12).is_err());
}
