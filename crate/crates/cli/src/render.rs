use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

/// A titled table with metadata. Rows are JSON objects keyed by column name;
/// nested arrays and objects are flattened for the text formats.
#[derive(Debug, Default)]
pub struct Document {
    pub title: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Map<String, Value>>,
    pub notes: Vec<String>,
}

fn flatten(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(flatten).collect::<Vec<_>>().join("; "),
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}={}", flatten(v))).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

impl Document {
    pub fn new(title: impl Into<String>, metadata: Vec<(String, String)>, columns: Vec<&'static str>) -> Self {
        Document { title: title.into(), metadata, columns, ..Default::default() }
    }

    pub fn push(&mut self, row: Map<String, Value>) {
        self.rows.push(row);
    }

    fn cells(&self, row: &Map<String, Value>) -> Vec<String> {
        self.columns.iter().map(|c| row.get(*c).map(flatten).unwrap_or_default()).collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Markdown => self.render_markdown(),
        }
    }

    fn render_json(&self) -> String {
        let metadata: Map<String, Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let mut doc = Map::new();
        doc.insert("title".into(), Value::String(self.title.clone()));
        doc.insert("metadata".into(), Value::Object(metadata));
        doc.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
        if !self.notes.is_empty() {
            doc.insert("notes".into(), self.notes.iter().cloned().map(Value::String).collect());
        }
        let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        out.push('\n');
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(self.cells(row)).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        for note in &self.notes {
            out.push_str(&format!("# {note}\n"));
        }
        out
    }

    fn render_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!("## {}\n\n", self.title);
        for (k, v) in &self.metadata {
            out.push_str(&format!("- {k}: {v}\n"));
        }
        out.push('\n');
        if self.rows.is_empty() {
            out.push_str("(no rows)\n");
            return self.push_notes(out);
        }
        out.push_str(&format!("| {} |\n", self.columns.join(" | ")));
        out.push_str(&format!("|{}\n", "---|".repeat(self.columns.len())));
        for row in &self.rows {
            let cells: Vec<String> = self.cells(row).iter().map(|c| esc(c)).collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        self.push_notes(out)
    }

    fn push_notes(&self, mut out: String) -> String {
        if !self.notes.is_empty() {
            out.push('\n');
            for note in &self.notes {
                out.push_str(&format!("{note}\n"));
            }
        }
        out
    }
}
