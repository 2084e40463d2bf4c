use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Formats like C's `%.12g`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_sig(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) if v.is_finite() => json!(format_sig(*v).parse::<f64>().expect("round trip")),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

/// One output table.
#[derive(Clone, Debug)]
pub struct Panel {
    pub command: String,
    pub name: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Panel {
    pub fn new(command: &str, name: &str, params: &[(String, String)], columns: &[&str]) -> Self {
        Panel {
            command: command.into(),
            name: name.into(),
            params: params.to_vec(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# scarsim {VERSION}\n# command: {}\n# panel: {}\n", self.command, self.name);
        for (k, v) in &self.params {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut params = Map::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), json!(v));
        }
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({
            "program": "scarsim",
            "version": VERSION,
            "command": self.command,
            "panel": self.name,
            "parameters": Value::Object(params),
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// `dir/stem.ext` -> `dir/stem_panel.ext` when several panels share one path.
pub fn panel_path(base: &Path, panel: &str, several: bool, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let ext = base.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| ext.into());
    let name = if several { format!("{stem}_{panel}.{ext}") } else { format!("{stem}.{ext}") };
    base.with_file_name(name)
}

pub fn write_panels(panels: &[Panel], out: Option<&Path>, format: Format) -> io::Result<Vec<PathBuf>> {
    match out {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for (i, p) in panels.iter().enumerate() {
                if i > 0 {
                    writeln!(lock)?;
                }
                lock.write_all(p.render(format).as_bytes())?;
            }
            Ok(Vec::new())
        }
        Some(base) => {
            if let Some(dir) = base.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let several = panels.len() > 1;
            panels
                .iter()
                .map(|p| {
                    let path = panel_path(base, &p.name, several, format);
                    fs::write(&path, p.render(format))?;
                    Ok(path)
                })
                .collect()
        }
    }
}
