//! The bundled Coxeter simplex dataset.
//!
//! Each entry stores vertex coordinates, facet forms and the exact volume as
//! expression strings. Facet form `u_i` is the facet opposite vertex `A_i`.
//! Forms are kept exactly as tabulated; [`CoxeterSimplexDef::evaluate`]
//! normalises them to `<u,u> = 1` and orients them so that `A_i.u_i > 0`.

use crate::error::{Error, Result};
use crate::lorentz::{self, HyperplaneForm, PointClass, ProjectivePoint};
use crate::scalar::{parse_expr, print_expr, ExactExpr, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeSet;

const BUNDLED: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    simplices: Vec<SimplexRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplexRecord {
    witt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schlafli: Option<String>,
    dim: usize,
    vertices: Vec<Vec<String>>,
    forms: Vec<Vec<String>>,
    ideal: Vec<usize>,
    volume: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    printed_volume: Option<String>,
    diagram: DiagramRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    commensurable_parent: Option<ParentField>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramRecord {
    edges: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ParentField {
    One(ParentRecord),
    Many(Vec<ParentRecord>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParentRecord {
    witt: String,
    index: u64,
}

/// Edge `(i, j, k)` of a Coxeter diagram: dihedral angle `pi/k` between
/// facets `i` and `j`. `k = 0` encodes parallel facets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramEdge {
    pub i: usize,
    pub j: usize,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramSpec {
    pub nodes: usize,
    pub edges: Vec<DiagramEdge>,
}

impl DiagramSpec {
    pub fn label(&self, i: usize, j: usize) -> Option<u32> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges.iter().find(|e| e.i == a && e.j == b).map(|e| e.k)
    }

    /// Gram entry prescribed by the diagram, evaluated at `prec`.
    pub fn expected_gram(&self, i: usize, j: usize, prec: u32) -> Scalar {
        if i == j {
            return Scalar::one(prec);
        }
        match self.label(i, j) {
            None => Scalar::zero(prec),
            Some(0) => Scalar::from_int(-1, prec),
            Some(k) => -(Scalar::pi(prec) / i64::from(k)).cos(),
        }
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            for e in &self.edges {
                if e.i == v && !seen[e.j] {
                    stack.push(e.j);
                }
                if e.j == v && !seen[e.i] {
                    stack.push(e.i);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommensurabilityLink {
    pub parent: String,
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoxeterSimplexDef {
    pub witt_symbol: String,
    pub schlafli_notation: Option<String>,
    pub dimension: usize,
    pub vertices: Vec<Vec<ExactExpr>>,
    pub facet_forms: Vec<Vec<ExactExpr>>,
    pub ideal_vertices: Vec<usize>,
    pub volume: ExactExpr,
    pub printed_volume: Option<ExactExpr>,
    pub diagram: DiagramSpec,
    pub commensurability: Vec<CommensurabilityLink>,
}

/// A catalog entry with all coordinates evaluated at one precision.
#[derive(Clone, Debug)]
pub struct SimplexGeometry {
    pub witt_symbol: String,
    pub dimension: usize,
    pub precision: u32,
    pub vertices: Vec<ProjectivePoint>,
    /// Unit, inward-oriented facet forms.
    pub forms: Vec<HyperplaneForm>,
    pub ideal_vertices: Vec<usize>,
    pub volume: Scalar,
    pub diagram: DiagramSpec,
}

impl CoxeterSimplexDef {
    pub fn evaluate(&self, prec: u32) -> Result<SimplexGeometry> {
        if prec < crate::MIN_PRECISION {
            return Err(Error::Precision(prec));
        }
        let eval_row = |row: &Vec<ExactExpr>| -> Result<Vec<Scalar>> { row.iter().map(|e| e.eval(prec)).collect() };
        let vertices = self.vertices.iter().map(|r| ProjectivePoint::new(eval_row(r)?)).collect::<Result<Vec<_>>>()?;
        let forms = self
            .facet_forms
            .iter()
            .zip(&vertices)
            .map(|(r, opposite)| HyperplaneForm::new(eval_row(r)?)?.normalized_towards(opposite))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Catalog(format!("{}: {e}", self.witt_symbol)))?;
        Ok(SimplexGeometry {
            witt_symbol: self.witt_symbol.clone(),
            dimension: self.dimension,
            precision: prec,
            vertices,
            forms,
            ideal_vertices: self.ideal_vertices.clone(),
            volume: self.volume.eval(prec)?,
            diagram: self.diagram.clone(),
        })
    }

    fn from_record(rec: SimplexRecord, at: usize) -> Result<Self> {
        let path = |field: &str| format!("simplices[{at}].{field}");
        let n = rec.dim;
        if n < 2 {
            return Err(Error::Schema { path: path("dim"), message: "dimension must be at least 2".into() });
        }
        let parse_matrix = |rows: &[Vec<String>], field: &str| -> Result<Vec<Vec<ExactExpr>>> {
            if rows.len() != n + 1 {
                return Err(Error::Schema {
                    path: path(field),
                    message: format!("expected {} rows, found {}", n + 1, rows.len()),
                });
            }
            rows.iter()
                .enumerate()
                .map(|(i, row)| {
                    if row.len() != n + 1 {
                        return Err(Error::Schema {
                            path: format!("{}[{i}]", path(field)),
                            message: format!("expected {} entries, found {}", n + 1, row.len()),
                        });
                    }
                    row.iter().enumerate().map(|(j, s)| parse_field(s, &format!("{}[{i}][{j}]", path(field)))).collect()
                })
                .collect()
        };
        let vertices = parse_matrix(&rec.vertices, "vertices")?;
        let facet_forms = parse_matrix(&rec.forms, "forms")?;

        let mut seen = BTreeSet::new();
        for (k, &i) in rec.ideal.iter().enumerate() {
            if i > n || !seen.insert(i) {
                return Err(Error::Schema {
                    path: format!("{}[{k}]", path("ideal")),
                    message: format!("invalid or repeated vertex index {i}"),
                });
            }
        }

        let mut edges = Vec::with_capacity(rec.diagram.edges.len());
        for (k, &[i, j, label]) in rec.diagram.edges.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            if i >= j || j > n || label == 1 || label == 2 {
                return Err(Error::Schema {
                    path: format!("{}[{k}]", path("diagram.edges")),
                    message: format!("invalid edge ({i}, {j}, {label})"),
                });
            }
            edges.push(DiagramEdge { i, j, k: label });
        }
        let diagram = DiagramSpec { nodes: n + 1, edges };
        if !diagram.is_connected() {
            return Err(Error::Schema { path: path("diagram"), message: "diagram is not connected".into() });
        }

        let commensurability = match rec.commensurable_parent {
            None => Vec::new(),
            Some(ParentField::One(p)) => vec![p],
            Some(ParentField::Many(ps)) => ps,
        }
        .into_iter()
        .map(|p| CommensurabilityLink { parent: p.witt, index: p.index })
        .collect();

        Ok(CoxeterSimplexDef {
            witt_symbol: rec.witt,
            schlafli_notation: rec.schlafli,
            dimension: n,
            vertices,
            facet_forms,
            ideal_vertices: rec.ideal,
            volume: parse_field(&rec.volume, &path("volume"))?,
            printed_volume: rec
                .printed_volume
                .as_deref()
                .map(|s| parse_field(s, &path("printed_volume")))
                .transpose()?,
            diagram,
            commensurability,
        })
    }

    fn to_record(&self) -> SimplexRecord {
        let print_matrix = |m: &[Vec<ExactExpr>]| m.iter().map(|r| r.iter().map(print_expr).collect()).collect();
        let parents: Vec<ParentRecord> =
            self.commensurability.iter().map(|l| ParentRecord { witt: l.parent.clone(), index: l.index }).collect();
        SimplexRecord {
            witt: self.witt_symbol.clone(),
            schlafli: self.schlafli_notation.clone(),
            dim: self.dimension,
            vertices: print_matrix(&self.vertices),
            forms: print_matrix(&self.facet_forms),
            ideal: self.ideal_vertices.clone(),
            volume: print_expr(&self.volume),
            printed_volume: self.printed_volume.as_ref().map(print_expr),
            diagram: DiagramRecord {
                edges: self.diagram.edges.iter().map(|e| [e.i as u32, e.j as u32, e.k]).collect(),
            },
            commensurable_parent: match parents.len() {
                0 => None,
                1 => Some(ParentField::One(parents[0].clone())),
                _ => Some(ParentField::Many(parents)),
            },
        }
    }
}

fn parse_field(text: &str, path: &str) -> Result<ExactExpr> {
    parse_expr(text).map_err(|e| Error::Schema { path: path.into(), message: e.to_string() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    simplices: Vec<CoxeterSimplexDef>,
}

/// Parses a catalog document and checks its schema.
pub fn load_catalog(source: &str) -> Result<Catalog> {
    let mut de = serde_json::Deserializer::from_str(source);
    let file: CatalogFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema { path, message: e.into_inner().to_string() }
    })?;
    if file.simplices.is_empty() {
        return Err(Error::Catalog("no simplices".into()));
    }
    let simplices = file
        .simplices
        .into_iter()
        .enumerate()
        .map(|(i, r)| CoxeterSimplexDef::from_record(r, i))
        .collect::<Result<Vec<_>>>()?;
    let mut names = BTreeSet::new();
    for s in &simplices {
        if !names.insert(s.witt_symbol.clone()) {
            return Err(Error::Catalog(format!("duplicate Witt symbol {}", s.witt_symbol)));
        }
    }
    Ok(Catalog { simplices })
}

impl Catalog {
    pub fn bundled() -> Catalog {
        load_catalog(BUNDLED).expect("bundled catalog is valid")
    }

    pub fn bundled_source() -> &'static str {
        BUNDLED
    }

    pub fn simplices(&self) -> &[CoxeterSimplexDef] {
        &self.simplices
    }

    pub fn iter(&self) -> impl Iterator<Item = &CoxeterSimplexDef> {
        self.simplices.iter()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn get(&self, witt: &str) -> Result<&CoxeterSimplexDef> {
        self.simplices.iter().find(|s| s.witt_symbol == witt).ok_or_else(|| Error::UnknownWitt(witt.into()))
    }

    /// Mutable access for building modified catalogs in tests and tools.
    pub fn get_mut(&mut self, witt: &str) -> Result<&mut CoxeterSimplexDef> {
        self.simplices.iter_mut().find(|s| s.witt_symbol == witt).ok_or_else(|| Error::UnknownWitt(witt.into()))
    }

    /// Copy of the catalog where every entry with a `printed_volume` uses it
    /// as its volume.
    pub fn with_printed_volumes(&self) -> Catalog {
        let mut out = self.clone();
        for s in &mut out.simplices {
            if let Some(p) = &s.printed_volume {
                s.volume = p.clone();
            }
        }
        out
    }

    /// Serialises in the layout of the bundled file: objects and nested
    /// arrays one item per line, flat arrays inline.
    pub fn to_json(&self) -> String {
        let file = CatalogFile { simplices: self.simplices.iter().map(|s| s.to_record()).collect() };
        let value = serde_json::to_value(&file).expect("catalog serialises");
        let mut out = String::new();
        write_value(&value, 0, &mut out);
        out.push('\n');
        out
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            out.push_str("{\n");
            let n = map.len();
            for (k, (key, val)) in map.iter().enumerate() {
                out.push_str(&format!("{pad}  {}: ", Value::String(key.clone())));
                write_value(val, indent + 1, out);
                out.push_str(if k + 1 < n { ",\n" } else { "\n" });
            }
            out.push_str(&pad);
            out.push('}');
        }
        Value::Array(items) if items.first().is_some_and(|x| x.is_array() || x.is_object()) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad);
                out.push_str("  ");
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad);
            out.push(']');
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

#[derive(Clone, Debug)]
pub struct GramEntry {
    pub i: usize,
    pub j: usize,
    pub computed: Scalar,
    pub expected: Scalar,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct GramReport {
    pub witt_symbol: String,
    pub entries: Vec<GramEntry>,
}

impl GramReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GramEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn max_deviation(&self) -> Option<Scalar> {
        self.entries.iter().map(|e| (&e.computed - &e.expected).abs()).reduce(Scalar::max)
    }
}

/// Compares `<u_i, u_j>` with the diagram value for every pair `i <= j`.
pub fn verify_gram(geom: &SimplexGeometry, tolerance: &Scalar) -> GramReport {
    let prec = geom.precision;
    let poles: Vec<ProjectivePoint> = geom.forms.iter().map(lorentz::pole).collect();
    let mut entries = Vec::new();
    for i in 0..poles.len() {
        for j in i..poles.len() {
            let computed = lorentz::lorentz_dot(&poles[i], &poles[j]).expect("same dimension");
            let expected = geom.diagram.expected_gram(i, j, prec);
            let pass = (&computed - &expected).is_zero_within(tolerance);
            entries.push(GramEntry { i, j, computed, expected, pass });
        }
    }
    GramReport { witt_symbol: geom.witt_symbol.clone(), entries }
}

#[derive(Clone, Debug)]
pub struct IncidenceEntry {
    pub vertex: usize,
    pub form: usize,
    pub value: Scalar,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct IncidenceReport {
    pub witt_symbol: String,
    pub entries: Vec<IncidenceEntry>,
    /// Vertices whose classification disagrees with the ideal-vertex list.
    pub misclassified: Vec<usize>,
}

impl IncidenceReport {
    pub fn passed(&self) -> bool {
        self.misclassified.is_empty() && self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IncidenceEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

/// Checks `A_i.u_j = 0` for `i != j`, `A_i.u_i != 0`, and that exactly the
/// listed vertices are ideal. Vertices are taken in the chart `x0 = 1`.
pub fn verify_incidence(geom: &SimplexGeometry, tolerance: &Scalar) -> IncidenceReport {
    let mut entries = Vec::new();
    let mut misclassified = Vec::new();
    for (i, v) in geom.vertices.iter().enumerate() {
        let a = v.affine().unwrap_or_else(|_| v.clone());
        for (j, u) in geom.forms.iter().enumerate() {
            let value = u.eval(&a).expect("same dimension");
            let pass = if i == j { !value.is_zero_within(tolerance) } else { value.is_zero_within(tolerance) };
            entries.push(IncidenceEntry { vertex: i, form: j, value, pass });
        }
        let ideal = lorentz::classify(v) == PointClass::Ideal;
        if ideal != geom.ideal_vertices.contains(&i) {
            misclassified.push(i);
        }
    }
    IncidenceReport { witt_symbol: geom.witt_symbol.clone(), entries, misclassified }
}

#[derive(Clone, Debug)]
pub struct CommensurabilityEntry {
    pub child: String,
    pub parent: String,
    pub index: u64,
    pub ratio: Option<Scalar>,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CommensurabilityReport {
    pub entries: Vec<CommensurabilityEntry>,
}

impl CommensurabilityReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Checks `vol(child) = index * vol(parent)` to relative tolerance for every
/// recorded subgroup link.
pub fn commensurability_check(catalog: &Catalog, prec: u32, tolerance: &Scalar) -> CommensurabilityReport {
    let mut entries = Vec::new();
    for child in catalog.iter() {
        for link in &child.commensurability {
            let mut entry = CommensurabilityEntry {
                child: child.witt_symbol.clone(),
                parent: link.parent.clone(),
                index: link.index,
                ratio: None,
                pass: false,
                note: None,
            };
            match catalog.get(&link.parent) {
                Err(_) => entry.note = Some("parent not in catalog".into()),
                Ok(parent) => match (child.volume.eval(prec), parent.volume.eval(prec)) {
                    (Ok(vc), Ok(vp)) => {
                        let ratio = vc / vp;
                        let target = Scalar::from_int(link.index as i64, prec);
                        entry.pass = ratio.rel_diff(&target) <= *tolerance;
                        entry.ratio = Some(ratio);
                    }
                    (Err(e), _) | (_, Err(e)) => entry.note = Some(e.to_string()),
                },
            }
            entries.push(entry);
        }
    }
    CommensurabilityReport { entries }
}
