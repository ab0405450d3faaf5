//! Metric rows for `eval`: a fixed-width text table and a CSV form.
//!
//! CSV columns are `image,psnr_db,ssim`. Floats use the shortest
//! representation that parses back to the same value; an infinite PSNR
//! (identical images) is written as `inf`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub image: String,
    pub psnr_db: f64,
    pub ssim: f64,
}

pub fn write_csv<W: Write>(out: W, rows: &[EvalRow]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<EvalRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// One line per pair; failed pairs carry their error message instead of
/// metrics.
pub fn format_table(rows: &[Result<EvalRow, (String, String)>]) -> String {
    let width = rows
        .iter()
        .map(|r| match r {
            Ok(row) => row.image.len(),
            Err((image, _)) => image.len(),
        })
        .chain(std::iter::once("image".len()))
        .max()
        .unwrap_or(0);
    let mut s = format!("{:<width$}  {:>10}  {:>8}\n", "image", "psnr_db", "ssim");
    for r in rows {
        match r {
            Ok(row) => {
                let psnr = if row.psnr_db.is_infinite() {
                    "inf".to_string()
                } else {
                    format!("{:.4}", row.psnr_db)
                };
                s += &format!("{:<width$}  {:>10}  {:>8.6}\n", row.image, psnr, row.ssim);
            }
            Err((image, err)) => s += &format!("{image:<width$}  error: {err}\n"),
        }
    }
    s
}
