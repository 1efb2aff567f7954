//! CSV form of a sample report: one row per joint outcome with its
//! per-observable indices, values and the observed count.

use std::io::{Read, Write};

use vn_criterion::hvmodels::Tag;
use vn_criterion::OutcomeRow;

use crate::error::{CliError, ErrorKind};

fn csv_err(e: impl std::fmt::Display) -> CliError {
    CliError::new(ErrorKind::SchemaViolation, format!("csv: {e}"))
}

fn parse_tag(name: &str) -> Option<Tag> {
    match name {
        "A" => Some(Tag::A),
        "B" => Some(Tag::B),
        "C" => Some(Tag::C),
        _ => None,
    }
}

pub fn write_sample_csv<W: Write>(
    tags: &[Tag],
    rows: &[OutcomeRow],
    out: W,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = tags
        .iter()
        .map(|t| format!("i_{t}"))
        .chain(tags.iter().map(|t| format!("v_{t}")))
        .chain(std::iter::once("count".to_string()))
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let record: Vec<String> = row
            .indices
            .iter()
            .map(|i| i.to_string())
            .chain(row.values.iter().map(|v| v.to_string()))
            .chain(std::iter::once(row.count.to_string()))
            .collect();
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| CliError::new(ErrorKind::Internal, e.to_string()))
}

pub fn read_sample_csv<R: Read>(input: R) -> Result<(Vec<Tag>, Vec<OutcomeRow>), CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let k = header.len().saturating_sub(1) / 2;
    if header.len() != 2 * k + 1 || k == 0 || &header[2 * k] != "count" {
        return Err(csv_err(format!("unexpected header {header:?}")));
    }
    let mut tags = Vec::with_capacity(k);
    for i in 0..k {
        let tag = header[i]
            .strip_prefix("i_")
            .and_then(parse_tag)
            .filter(|t| header[k + i] == format!("v_{t}"))
            .ok_or_else(|| csv_err(format!("unexpected header {header:?}")))?;
        tags.push(tag);
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let indices = (0..k)
            .map(|i| record[i].parse::<usize>().map_err(csv_err))
            .collect::<Result<_, _>>()?;
        let values = (k..2 * k)
            .map(|i| record[i].parse::<f64>().map_err(csv_err))
            .collect::<Result<_, _>>()?;
        let count = record[2 * k].parse::<u64>().map_err(csv_err)?;
        rows.push(OutcomeRow {
            indices,
            values,
            count,
        });
    }
    Ok((tags, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows = vec![
            OutcomeRow {
                indices: vec![0, 1],
                values: vec![0.0, 0.1 + 0.2],
                count: 7,
            },
            OutcomeRow {
                indices: vec![1, 0],
                values: vec![-1e-300, 1.0 / 3.0],
                count: 0,
            },
        ];
        let mut buf = Vec::new();
        write_sample_csv(&[Tag::A, Tag::B], &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i_A,i_B,v_A,v_B,count\n"));
        let (tags, back) = read_sample_csv(buf.as_slice()).unwrap();
        assert_eq!(tags, vec![Tag::A, Tag::B]);
        assert_eq!(back, rows);
    }

    #[test]
    fn rejects_bad_header() {
        let err = read_sample_csv("i_A,v_B,count\n0,1,2\n".as_bytes()).unwrap_err();
        assert_eq!(err.kind, ErrorKind::SchemaViolation);
    }
}
