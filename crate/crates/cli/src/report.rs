//! Report tables in machine (CSV) and aligned-text form.
//!
//! Every table carries a footnote block declaring the method choices behind
//! it. CSV cells are pre-formatted strings with fixed decimal precision so
//! re-runs are byte-identical; footnotes are `# `-prefixed trailing lines.

use std::path::Path;

pub struct Table {
    title: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    footnotes: Vec<String>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Table {
        Table {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footnotes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_footnote(&mut self, note: &str) {
        self.footnotes.push(note.to_string());
    }

    pub fn to_csv(&self) -> String {
        let mut lines = Vec::with_capacity(self.rows.len() + self.footnotes.len() + 1);
        lines.push(self.columns.join(","));
        for row in &self.rows {
            lines.push(row.join(","));
        }
        for note in &self.footnotes {
            lines.push(format!("# {note}"));
        }
        lines.join("\n") + "\n"
    }

    pub fn to_aligned_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let render = |cells: &[String]| -> String {
            cells
                .iter()
                .enumerate()
                .map(|(i, cell)| {
                    if i == 0 {
                        format!("{cell:<width$}", width = widths[i])
                    } else {
                        format!("{cell:>width$}", width = widths[i])
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = String::new();
        out.push_str(&self.title);
        out.push_str("\n\n");
        out.push_str(&render(&self.columns));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&render(row));
            out.push('\n');
        }
        if !self.footnotes.is_empty() {
            out.push('\n');
            for note in &self.footnotes {
                out.push_str(&format!("# {note}\n"));
            }
        }
        out
    }

    /// Write `<basename>.csv` and `<basename>.txt` under `dir`.
    pub fn write_to(&self, dir: &Path, basename: &str) -> std::io::Result<()> {
        std::fs::write(dir.join(format!("{basename}.csv")), self.to_csv())?;
        std::fs::write(dir.join(format!("{basename}.txt")), self.to_aligned_text())
    }
}

pub fn f2(value: f64) -> String {
    format!("{value:.2}")
}

pub fn f4(value: f64) -> String {
    format!("{value:.4}")
}

pub fn opt4(value: Option<f64>) -> String {
    value.map(f4).unwrap_or_default()
}
