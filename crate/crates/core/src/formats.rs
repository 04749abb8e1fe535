//! Plain-text interchange formats.
//!
//! * Filtrations: a `# m=<int>` header, then one simplex per line as
//!   `v0 v1 ... ; t1 ... tm`. Blank lines and other `#` lines are ignored.
//! * Point clouds: CSV with one point per row and an optional header row.
//! * Graphs: an edge list (`u v` per line, optional `# n=<int>` header) and an
//!   optional attribute CSV with one row per vertex.
//! * Profile grids: long-format CSV (`x0,...,value`) plus a JSON sidecar
//!   describing the grid.
//! * Persistence diagrams and signed barcodes: JSON, with `"inf"` standing in
//!   for an infinite death.
//!
//! Parsers never panic on malformed input; they report the 1-based line of
//! the first problem where that is meaningful.

use std::fmt::{Display, Write as _};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::builders::PointCloud;
use crate::complex::{MultiFiltration, Simplex};
use crate::error::{Error, Result};
use crate::euler::{Axis, GridSpec, ProfileGrid};
use crate::graph::Graph;
use crate::persistence::PersistenceDiagram;
use crate::signed::SignedBarcode;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("`{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{token}` is not finite")));
    }
    Ok(v)
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix('#')?.trim_start();
    let rest = rest.strip_prefix(key)?.trim_start();
    Some(rest.strip_prefix('=')?.trim())
}

/// Parses the filtration text format. Structural checks (closure under
/// faces, monotonicity) are left to [`crate::complex::validate`].
pub fn parse_filtration(text: &str) -> Result<MultiFiltration> {
    let mut m: Option<usize> = None;
    let mut cells = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if m.is_none() {
                if let Some(v) = header_value(line, "m") {
                    let parsed: usize = v
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad parameter count `{v}`")))?;
                    if parsed == 0 {
                        return Err(parse_err(line_no, "parameter count must be >= 1"));
                    }
                    m = Some(parsed);
                }
            }
            continue;
        }
        let m = m.ok_or_else(|| parse_err(line_no, "missing `# m=<int>` header before data"))?;
        let (verts, vals) = line
            .split_once(';')
            .ok_or_else(|| parse_err(line_no, "expected `vertices ; values`"))?;
        let vertices = verts
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| parse_err(line_no, format!("`{t}` is not a vertex id")))
            })
            .collect::<Result<Vec<_>>>()?;
        let simplex =
            Simplex::new(vertices).map_err(|e| parse_err(line_no, e.to_string()))?;
        let values = vals
            .split_whitespace()
            .map(|t| parse_f64(t, line_no))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != m {
            return Err(parse_err(
                line_no,
                format!("expected {m} values, found {}", values.len()),
            ));
        }
        cells.push((simplex, values));
    }
    let m = m.ok_or_else(|| parse_err(0, "missing `# m=<int>` header"))?;
    MultiFiltration::new(m, cells).map_err(|e| parse_err(0, e.to_string()))
}

fn join<T: Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    let mut out = String::new();
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        let _ = write!(out, "{x}");
    }
    out
}

/// Writes the filtration text format; values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_filtration(filtration: &MultiFiltration) -> String {
    let mut out = format!("# m={}\n", filtration.m());
    for (s, t) in filtration.iter() {
        let _ = writeln!(out, "{} ; {}", join(s.vertices(), " "), join(t, " "));
    }
    out
}

fn row_is_numeric(record: &csv::StringRecord) -> bool {
    record.iter().all(|f| f.trim().parse::<f64>().is_ok())
}

/// Parses a point-cloud CSV. With `has_header = None` a first row that is
/// not entirely numeric is taken to be a header.
pub fn parse_point_cloud_csv(text: &str, has_header: Option<bool>) -> Result<PointCloud> {
    let rows = parse_numeric_csv(text, has_header)?;
    if rows.is_empty() {
        return Err(Error::Empty("point cloud has no rows".into()));
    }
    PointCloud::from_rows(&rows)
}

/// Numeric CSV rows, all of the same width.
fn parse_numeric_csv(text: &str, has_header: Option<bool>) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if i == 0 && rows.is_empty() {
            let skip = has_header.unwrap_or_else(|| !row_is_numeric(&record));
            if skip {
                continue;
            }
        }
        let row = record
            .iter()
            .map(|f| parse_f64(f, line))
            .collect::<Result<Vec<_>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_err(line, format!("expected {w} columns, found {}", row.len())))
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_point_cloud_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let _ = writeln!(out, "{}", join(p, ","));
    }
    out
}

/// Largest vertex count accepted from an edge list; graphs are stored
/// densely by vertex id.
pub const MAX_GRAPH_VERTICES: usize = 1 << 24;

/// Parses an edge list: `u v` per line, `#` comments, and an optional
/// `# n=<int>` header fixing the vertex count (otherwise `max id + 1`).
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<u32> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(v) = header_value(line, "n") {
                n = Some(
                    v.parse()
                        .map_err(|_| parse_err(line_no, format!("bad vertex count `{v}`")))?,
                );
            }
            continue;
        }
        let ids = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| parse_err(line_no, format!("`{t}` is not a vertex id")))
            })
            .collect::<Result<Vec<_>>>()?;
        let [u, v] = ids[..] else {
            return Err(parse_err(line_no, format!("expected 2 vertex ids, found {}", ids.len())));
        };
        if u == v {
            return Err(parse_err(line_no, format!("self-loop on vertex {u}")));
        }
        max_id = max_id.max(Some(u.max(v)));
        edges.push((u, v));
    }
    let needed = max_id.map_or(0, |m| m as usize + 1);
    let n = match n {
        Some(n) if n < needed => {
            return Err(parse_err(0, format!("header says n={n} but vertex {} appears", needed - 1)))
        }
        Some(n) => n,
        None => needed,
    };
    if n > MAX_GRAPH_VERTICES {
        return Err(Error::TooLarge(format!(
            "{n} vertices in edge list (limit {MAX_GRAPH_VERTICES})"
        )));
    }
    Graph::new(n, edges)
}

/// One row of numeric attributes per vertex (no header detection: a
/// non-numeric first row is treated as a header).
pub fn parse_attribute_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    parse_numeric_csv(text, None)
}

/// What a profile grid holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Ecp,
    Ht,
}

/// JSON sidecar describing a profile CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSidecar {
    pub m: usize,
    pub shape: Vec<usize>,
    pub axis_min: Vec<f64>,
    pub axis_max: Vec<f64>,
    pub kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantiles: Option<Vec<f64>>,
}

impl ProfileSidecar {
    pub fn for_grid(spec: &GridSpec, kind: ProfileKind) -> Self {
        ProfileSidecar {
            m: spec.m(),
            shape: spec.shape(),
            axis_min: spec.axes.iter().map(|a| a.min).collect(),
            axis_max: spec.axes.iter().map(|a| a.max).collect(),
            kind,
            kernel: None,
            p: None,
            alpha: None,
            quantiles: None,
        }
    }

    /// The grid this sidecar describes, after consistency checks.
    pub fn grid(&self) -> Result<GridSpec> {
        for got in [self.shape.len(), self.axis_min.len(), self.axis_max.len()] {
            if got != self.m {
                return Err(Error::DimensionMismatch {
                    expected: self.m,
                    got,
                });
            }
        }
        let axes = (0..self.m)
            .map(|i| Axis::new(self.axis_min[i], self.axis_max[i], self.shape[i]))
            .collect::<Result<Vec<_>>>()?;
        let spec = GridSpec::new(axes)?;
        let mut total: usize = 1;
        for &d in &self.shape {
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::TooLarge("grid shape overflows".into()))?;
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes") + "\n"
    }
}

pub fn parse_profile_sidecar(text: &str) -> Result<ProfileSidecar> {
    let sidecar: ProfileSidecar =
        serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    sidecar.grid()?;
    Ok(sidecar)
}

/// Long-format CSV: a header `x0,...,x{m-1},value`, then one row per grid
/// point in row-major order.
pub fn write_profile_csv<T: Copy + Display>(grid: &ProfileGrid<T>) -> String {
    let m = grid.spec.m();
    let mut out = join((0..m).map(|i| format!("x{i}")), ",") + ",value\n";
    for (k, v) in grid.data.iter().enumerate() {
        let _ = writeln!(out, "{},{v}", join(grid.spec.point(k), ","));
    }
    out
}

/// Reads the values column of a profile CSV back onto the sidecar's grid.
pub fn parse_profile_csv(text: &str, sidecar: &ProfileSidecar) -> Result<ProfileGrid<f64>> {
    let spec = sidecar.grid()?;
    let rows = parse_numeric_csv(text, Some(true))?;
    if rows.len() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: rows.len(),
        });
    }
    let data = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != spec.m() + 1 {
                Err(parse_err(i + 2, format!("expected {} columns", spec.m() + 1)))
            } else {
                Ok(r[spec.m()])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ProfileGrid::new(spec, data)
}

fn death_to_json(d: f64) -> Value {
    if d.is_infinite() {
        json!("inf")
    } else {
        json!(d)
    }
}

pub fn diagram_to_json(diagram: &PersistenceDiagram) -> String {
    let mut degrees = Map::new();
    for k in 0..diagram.num_degrees() {
        let bars: Vec<Value> = diagram
            .degree(k)
            .iter()
            .map(|&(b, d)| json!([b, death_to_json(d)]))
            .collect();
        degrees.insert(k.to_string(), Value::Array(bars));
    }
    serde_json::to_string_pretty(&json!({ "degrees": degrees })).expect("json") + "\n"
}

fn json_number(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| parse_err(0, format!("{what}: not representable as f64"))),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        _ => Err(parse_err(0, format!("{what}: expected a number, got {v}"))),
    }
}

/// Largest homology degree accepted in diagram JSON.
const MAX_DEGREE: usize = 64;

pub fn parse_diagram_json(text: &str) -> Result<PersistenceDiagram> {
    let root: Value = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let degrees = root
        .get("degrees")
        .and_then(Value::as_object)
        .ok_or_else(|| parse_err(0, "expected an object with a `degrees` map"))?;
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    for (key, bars) in degrees {
        let k: usize = key
            .parse()
            .map_err(|_| parse_err(0, format!("degree key `{key}` is not an integer")))?;
        if k > MAX_DEGREE {
            return Err(parse_err(0, format!("degree {k} exceeds {MAX_DEGREE}")));
        }
        if out.len() <= k {
            out.resize(k + 1, Vec::new());
        }
        let bars = bars
            .as_array()
            .ok_or_else(|| parse_err(0, format!("degree {k}: expected a list of bars")))?;
        for bar in bars {
            let pair = bar
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| parse_err(0, format!("degree {k}: bar {bar} is not a pair")))?;
            let birth = json_number(&pair[0], "birth")?;
            let death = json_number(&pair[1], "death")?;
            out[k].push((birth, death));
        }
    }
    PersistenceDiagram::new(out)
}

pub fn barcode_to_json(barcode: &SignedBarcode) -> String {
    serde_json::to_string_pretty(&json!({
        "m": barcode.m(),
        "positive": barcode.positive(),
        "negative": barcode.negative(),
    }))
    .expect("json")
        + "\n"
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BarcodeJson {
    m: usize,
    positive: Vec<Vec<f64>>,
    negative: Vec<Vec<f64>>,
}

pub fn parse_barcode_json(text: &str) -> Result<SignedBarcode> {
    let b: BarcodeJson =
        serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    SignedBarcode::new(b.m, b.positive, b.negative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn filtration_round_trip() {
        let text = "# m=2\n# a comment\n0 ; 0 0.5\n1 ; 0.1 0\n\n0 1 ; 1 2.5\n";
        let f = parse_filtration(text).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.m(), 2);
        let again = parse_filtration(&write_filtration(&f)).unwrap();
        assert_eq!(f, again);
        let g = MultiFiltration::one_parameter(vec![(Simplex::vertex(0), 0.1 + 0.2)]).unwrap();
        assert_eq!(parse_filtration(&write_filtration(&g)).unwrap(), g);
    }

    #[test]
    fn filtration_errors_carry_line_numbers() {
        let cases = [
            ("0 ; 1\n", 1),
            ("# m=1\n0 ; 1\n0 1 ; 1 2\n", 3),
            ("# m=1\n0 ; x\n", 2),
            ("# m=1\n\n0 0 ; 1\n", 3),
            ("# m=1\n0 1\n", 2),
            ("# m=1\n0 ; nan\n", 2),
            ("# m=1\n-1 ; 0\n", 2),
        ];
        for (text, line) in cases {
            match parse_filtration(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(parse_filtration("").is_err());
        assert!(parse_filtration("# m=0\n").is_err());
    }

    #[test]
    fn point_cloud_csv() {
        let c = parse_point_cloud_csv("x,y\n0,1\n2.5, 3\n", None).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[2.5, 3.0]);
        let c = parse_point_cloud_csv("0,1\n2,3\n", None).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(parse_point_cloud_csv(&write_point_cloud_csv(&c), Some(false)).unwrap(), c);
        match parse_point_cloud_csv("0,1\n2\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_point_cloud_csv("", None).is_err());
        match parse_point_cloud_csv("1,2\n3,oops\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn edge_lists() {
        let g = parse_edge_list("# n=5\n0 1\n1 2\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edges().len(), 2);
        let g = parse_edge_list("0,3\n").unwrap();
        assert_eq!(g.n(), 4);
        assert!(parse_edge_list("# n=2\n0 5\n").is_err());
        assert!(parse_edge_list("0 0\n").is_err());
        assert!(matches!(parse_edge_list("0 4000000000\n"), Err(Error::TooLarge(_))));
        assert!(matches!(parse_edge_list("# n=99999999999\n"), Err(Error::TooLarge(_))));
        match parse_edge_list("0 1\n1 2 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn profile_round_trip() {
        let spec = GridSpec::from_bounds(&[(0.0, 1.0), (2.0, 3.0)], &[2, 3]).unwrap();
        let grid = ProfileGrid::new(spec.clone(), vec![1i64, 2, 3, 4, 5, 6]).unwrap();
        let csv = write_profile_csv(&grid);
        assert!(csv.starts_with("x0,x1,value\n0,2,1\n0,2.5,2\n"));
        let mut side = ProfileSidecar::for_grid(&spec, ProfileKind::Ht);
        side.kernel = Some("exp_pow".into());
        side.p = Some(4.0);
        side.alpha = Some(10.0);
        side.quantiles = Some(vec![0.5, 0.5]);
        let parsed = parse_profile_sidecar(&side.to_json()).unwrap();
        assert_eq!(parsed, side);
        let back = parse_profile_csv(&csv, &parsed).unwrap();
        assert_eq!(back.data, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let ecp = ProfileSidecar::for_grid(&spec, ProfileKind::Ecp).to_json();
        assert!(!ecp.contains("kernel"));
        assert!(parse_profile_sidecar(r#"{"m":1,"shape":[2,2],"axis_min":[0],"axis_max":[1],"kind":"ecp"}"#).is_err());
    }

    #[test]
    fn diagram_json_round_trip() {
        let d = PersistenceDiagram::new(vec![
            vec![(0.0, f64::INFINITY), (0.0, 1.0)],
            vec![(1.0, 2.0)],
        ])
        .unwrap();
        let text = diagram_to_json(&d);
        assert!(text.contains("\"inf\""));
        assert_eq!(parse_diagram_json(&text).unwrap(), d);
        assert!(parse_diagram_json(r#"{"degrees":{"0":[[1,0]]}}"#).is_err());
        assert!(parse_diagram_json(r#"{"degrees":{"x":[]}}"#).is_err());
        assert!(parse_diagram_json(r#"{"degrees":{"0":[["inf",1]]}}"#).is_err());
    }

    #[test]
    fn barcode_json_round_trip() {
        let b = SignedBarcode::new(2, vec![vec![0.0, 1.0]], vec![vec![2.0, 2.0]]).unwrap();
        assert_eq!(parse_barcode_json(&barcode_to_json(&b)).unwrap(), b);
        assert!(parse_barcode_json(r#"{"m":2,"positive":[[1]],"negative":[]}"#).is_err());
    }

    proptest! {
        #[test]
        fn parsers_never_panic(s in "\\PC*") {
            let _ = parse_filtration(&s);
            let _ = parse_point_cloud_csv(&s, None);
            let _ = parse_edge_list(&s);
            let _ = parse_attribute_csv(&s);
            let _ = parse_profile_sidecar(&s);
            let _ = parse_diagram_json(&s);
            let _ = parse_barcode_json(&s);
        }

        #[test]
        fn structured_filtration_text_never_panics(
            lines in prop::collection::vec("[0-9 ;.#m=e+-]{0,20}", 0..8)
        ) {
            let _ = parse_filtration(&lines.join("\n"));
        }
    }
}
