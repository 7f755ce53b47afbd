use std::path::Path;

use super::access;
use crate::error::{Error, Result};

/// Headerless numeric CSV into rows. Rows must all have the same width.
pub(crate) fn read_numeric_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = access::open(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(file);
    let ctx = path.display().to_string();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(&ctx, e))?;
        let row = record
            .iter()
            .map(|field| field.parse::<f64>().map_err(|_| Error::CorruptFile(format!("{ctx}: cannot parse {field:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(Error::InconsistentExport(format!(
                    "{ctx}: ragged rows ({} vs {})",
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub(crate) fn format_row(values: impl IntoIterator<Item = f64>) -> String {
    let mut line = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&v.to_string());
    }
    line
}
