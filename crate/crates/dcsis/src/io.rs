//! CSV datasets: one header row, comma delimited, one observation per line.
//!
//! The subject id and class columns are located by name and may sit
//! anywhere in the header; every other column is a numeric feature, kept
//! in header order.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use dcsis_core::{Dataset, Label};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub id_column: String,
    pub response_column: String,
    /// Class value mapped to label 1. Every other value maps to 0.
    pub positive_label: String,
    /// Lines before the header row to ignore (e.g. a row of group names).
    pub skip_lines: usize,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            id_column: "id".into(),
            response_column: "class".into(),
            positive_label: "1".into(),
            skip_lines: 0,
        }
    }
}

impl Schema {
    /// The class value [`write_csv`] emits for label 0.
    pub fn negative_label(&self) -> &str {
        if self.positive_label == "0" {
            "1"
        } else {
            "0"
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    let mut reader = BufReader::new(reader);
    let mut skipped = String::new();
    for _ in 0..schema.skip_lines {
        skipped.clear();
        reader.read_line(&mut skipped).map_err(|e| Error::io("<csv input>", e))?;
    }
    let line_offset = schema.skip_lines as u64;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();

    let mut seen = HashSet::new();
    if let Some(dup) = header.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(Error::Format(format!("duplicate header {dup:?}")));
    }
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column {name:?}")))
    };
    let id_at = find(&schema.id_column)?;
    let class_at = find(&schema.response_column)?;
    if id_at == class_at {
        return Err(Error::Schema("id and class must be different columns".into()));
    }
    let feature_at: Vec<usize> = (0..header.len()).filter(|&c| c != id_at && c != class_at).collect();

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); feature_at.len()];
    let mut ids = Vec::new();
    let mut response: Vec<Label> = Vec::new();
    let mut classes: Vec<String> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line()) + line_offset;
        ids.push(record[id_at].to_string());
        let class = &record[class_at];
        if !classes.iter().any(|c| c == class) {
            if classes.len() == 2 {
                return Err(Error::Format(format!(
                    "class column has more than two values ({:?}, {:?}, {class:?})",
                    classes[0], classes[1]
                )));
            }
            classes.push(class.to_string());
        }
        response.push(Label::from(class == schema.positive_label));
        for (col, &c) in columns.iter_mut().zip(&feature_at) {
            let cell = &record[c];
            let parse_error = |reason: String| Error::Parse {
                line,
                column: header[c].clone(),
                reason,
            };
            let value: f64 = cell
                .parse()
                .map_err(|_| parse_error(format!("{cell:?} is not a number")))?;
            if !value.is_finite() {
                return Err(parse_error(format!("{cell:?} is not finite")));
            }
            col.push(value);
        }
    }
    if ids.is_empty() {
        return Err(Error::Core(dcsis_core::Error::EmptyDataset));
    }
    let names = feature_at.iter().map(|&c| header[c].clone()).collect();
    Ok(Dataset::from_columns(columns, names, ids, response)?)
}

/// Writes `id, features.., class` so that [`read_csv`] with the same schema
/// reproduces `data` exactly (floats use the shortest round-trip form).
pub fn write_csv<W: Write>(writer: W, data: &Dataset, schema: &Schema) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut row: Vec<String> = Vec::with_capacity(data.n_features() + 2);
    row.push(schema.id_column.clone());
    row.extend(data.feature_names().iter().cloned());
    row.push(schema.response_column.clone());
    w.write_record(&row)?;
    for i in 0..data.n_observations() {
        row.clear();
        row.push(data.subject_ids()[i].clone());
        row.extend((0..data.n_features()).map(|j| data.value(i, j).to_string()));
        row.push(match data.response()[i] {
            1 => schema.positive_label.clone(),
            _ => schema.negative_label().to_string(),
        });
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, data: &Dataset, schema: &Schema) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), data, schema)
}
