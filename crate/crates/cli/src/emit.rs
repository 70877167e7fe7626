//! Text, JSON, CSV and Markdown renderings of a command report.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Table { title: title.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        // Writing into a Vec cannot fail.
        w.write_record(&self.headers).expect("csv header");
        for r in &self.rows {
            w.write_record(r).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv is utf-8")
    }

    pub fn to_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "### {}\n", self.title);
        }
        let _ = writeln!(out, "| {} |", self.headers.iter().map(|h| esc(h)).collect::<Vec<_>>().join(" | "));
        let _ = writeln!(out, "|{}|", vec!["---"; self.headers.len()].join("|"));
        for r in &self.rows {
            let _ = writeln!(out, "| {} |", r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "{}", self.title);
        }
        let _ = writeln!(out, "{}", line(&self.headers));
        for r in &self.rows {
            let _ = writeln!(out, "{}", line(r));
        }
        out
    }
}

/// Everything a command produces. `json` is the machine-readable form; the
/// tables and summary lines feed the other formats.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub summary: Vec<String>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
                s.push('\n');
                s
            }
            // CSV carries a single table; the first one is the primary result.
            Format::Csv => self.tables.first().map(Table::to_csv).unwrap_or_default(),
            Format::Markdown => {
                let mut parts: Vec<String> = Vec::new();
                if !self.summary.is_empty() {
                    parts.push(self.summary.iter().map(|l| format!("- {l}\n")).collect());
                }
                parts.extend(self.tables.iter().map(Table::to_markdown));
                parts.join("\n")
            }
            Format::Text => {
                let mut parts: Vec<String> = Vec::new();
                if !self.summary.is_empty() {
                    parts.push(self.summary.iter().map(|l| format!("{l}\n")).collect());
                }
                parts.extend(self.tables.iter().map(Table::to_text));
                parts.join("\n")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec!["1".into(), "x, y".into()]);
        t.push(vec!["22".into(), "p|q".into()]);
        t
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(sample().to_csv(), "a,b\n1,\"x, y\"\n22,p|q\n");
    }

    #[test]
    fn markdown_escapes_pipes() {
        let md = sample().to_markdown();
        assert!(md.contains("| 22 | p\\|q |"));
        assert!(md.contains("|---|---|"));
    }

    #[test]
    fn text_aligns_columns() {
        assert_eq!(sample().to_text(), "t\na   b\n1   x, y\n22  p|q\n");
    }
}
