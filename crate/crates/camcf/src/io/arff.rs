//! Flat ARFF ingestion: nominal and numeric attributes, dense and sparse
//! data rows. Nominal values become codes in declaration order (then
//! canonicalized over observed values); numeric attributes are discretized
//! downstream like any continuous column.

use std::fs;
use std::path::Path;

use super::{assemble_dataset, IngestError, IngestOptions, RawColumn, RawTable};
use crate::data::Dataset;

#[derive(Debug, Clone)]
enum AttrType {
    Nominal(Vec<String>),
    Numeric,
}

#[derive(Debug, Clone)]
struct Attribute {
    name: String,
    kind: AttrType,
}

fn strip_quotes(text: &str) -> &str {
    let bytes = text.as_bytes();
    if bytes.len() >= 2 {
        let (first, last) = (bytes[0], bytes[bytes.len() - 1]);
        if (first == b'\'' && last == b'\'') || (first == b'"' && last == b'"') {
            return &text[1..text.len() - 1];
        }
    }
    text
}

fn parse_attribute(line: &str, line_no: usize) -> Result<Attribute, IngestError> {
    let bad = || IngestError::BadAttribute {
        line: line_no,
        text: line.to_string(),
    };
    let rest = line
        .get("@attribute".len()..)
        .ok_or_else(bad)?
        .trim_start();
    if rest.is_empty() {
        return Err(bad());
    }

    let (name, type_text) = if rest.starts_with('\'') || rest.starts_with('"') {
        let quote = rest.chars().next().unwrap();
        let close = rest[1..].find(quote).ok_or_else(bad)? + 1;
        (rest[1..close].to_string(), rest[close + 1..].trim())
    } else {
        let split = rest.find(char::is_whitespace).ok_or_else(bad)?;
        (rest[..split].to_string(), rest[split..].trim())
    };
    if type_text.is_empty() {
        return Err(bad());
    }

    if let Some(body) = type_text.strip_prefix('{') {
        let body = body.strip_suffix('}').ok_or_else(bad)?;
        let values: Vec<String> = body
            .split(',')
            .map(|v| strip_quotes(v.trim()).to_string())
            .collect();
        if values.is_empty() || values.iter().any(String::is_empty) {
            return Err(bad());
        }
        Ok(Attribute {
            name,
            kind: AttrType::Nominal(values),
        })
    } else {
        match type_text.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => Ok(Attribute {
                name,
                kind: AttrType::Numeric,
            }),
            other => Err(IngestError::UnsupportedAttributeType {
                line: line_no,
                type_name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Value {
    Code(i64),
    Number(f64),
    Missing,
}

fn parse_value(
    text: &str,
    attribute: &Attribute,
    line_no: usize,
) -> Result<Value, IngestError> {
    let text = strip_quotes(text.trim());
    if text == "?" {
        return Ok(Value::Missing);
    }
    match &attribute.kind {
        AttrType::Nominal(values) => values
            .iter()
            .position(|v| v == text)
            .map(|i| Value::Code(i as i64))
            .ok_or_else(|| IngestError::UnknownNominalValue {
                line: line_no,
                attribute: attribute.name.clone(),
                value: text.to_string(),
            }),
        AttrType::Numeric => text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Value::Number)
            .ok_or_else(|| IngestError::NonNumeric {
                row: line_no,
                column: attribute.name.clone(),
                value: text.to_string(),
            }),
    }
}

fn default_value(attribute: &Attribute) -> Value {
    match &attribute.kind {
        AttrType::Nominal(_) => Value::Code(0),
        AttrType::Numeric => Value::Number(0.0),
    }
}

fn parse_sparse_row(
    line: &str,
    attributes: &[Attribute],
    line_no: usize,
) -> Result<Vec<Value>, IngestError> {
    let body = line
        .strip_prefix('{')
        .and_then(|rest| rest.strip_suffix('}'))
        .ok_or_else(|| IngestError::BadAttribute {
            line: line_no,
            text: line.to_string(),
        })?;
    let mut row: Vec<Value> = attributes.iter().map(default_value).collect();
    for pair in body.split(',') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let split = pair
            .find(char::is_whitespace)
            .ok_or_else(|| IngestError::BadAttribute {
                line: line_no,
                text: line.to_string(),
            })?;
        let index: usize =
            pair[..split]
                .trim()
                .parse()
                .map_err(|_| IngestError::BadAttribute {
                    line: line_no,
                    text: line.to_string(),
                })?;
        if index >= attributes.len() {
            return Err(IngestError::SparseIndexOutOfRange {
                line: line_no,
                index,
                count: attributes.len(),
            });
        }
        row[index] = parse_value(&pair[split..], &attributes[index], line_no)?;
    }
    Ok(row)
}

pub fn load_arff_with(
    path: impl AsRef<Path>,
    options: &IngestOptions,
) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path)?;

    let mut attributes: Vec<Attribute> = Vec::new();
    let mut rows: Vec<Vec<Value>> = Vec::new();
    let mut in_data = false;
    let mut saw_data_marker = false;
    let mut missing_rows: Vec<usize> = Vec::new();

    for (i, raw_line) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                continue;
            }
            if lower.starts_with("@attribute") {
                attributes.push(parse_attribute(line, line_no)?);
                continue;
            }
            if lower.starts_with("@data") {
                in_data = true;
                saw_data_marker = true;
                continue;
            }
            return Err(IngestError::BadAttribute {
                line: line_no,
                text: line.to_string(),
            });
        }

        let row = if line.starts_with('{') {
            parse_sparse_row(line, &attributes, line_no)?
        } else {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != attributes.len() {
                return Err(IngestError::Ragged {
                    row: rows.len() + 1,
                    got: cells.len(),
                    expected: attributes.len(),
                });
            }
            cells
                .iter()
                .zip(&attributes)
                .map(|(cell, attr)| parse_value(cell, attr, line_no))
                .collect::<Result<Vec<Value>, IngestError>>()?
        };
        if row.contains(&Value::Missing) {
            missing_rows.push(rows.len() + 1);
        }
        rows.push(row);
    }

    if !saw_data_marker {
        return Err(IngestError::MissingDataSection);
    }
    if !missing_rows.is_empty() {
        missing_rows.truncate(10);
        return Err(IngestError::MissingValues { rows: missing_rows });
    }
    if rows.is_empty() || attributes.is_empty() {
        return Err(IngestError::Empty {
            path: path.display().to_string(),
        });
    }

    let names: Vec<String> = attributes.iter().map(|a| a.name.clone()).collect();
    let columns: Vec<RawColumn> = attributes
        .iter()
        .enumerate()
        .map(|(c, attr)| match attr.kind {
            AttrType::Nominal(_) => RawColumn::Integer(
                rows.iter()
                    .map(|row| match row[c] {
                        Value::Code(v) => v,
                        _ => unreachable!("nominal cells parse to codes"),
                    })
                    .collect(),
            ),
            AttrType::Numeric => RawColumn::Continuous(
                rows.iter()
                    .map(|row| match row[c] {
                        Value::Number(v) => v,
                        _ => unreachable!("numeric cells parse to numbers"),
                    })
                    .collect(),
            ),
        })
        .collect();

    assemble_dataset(RawTable { names, columns }, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::Builder::new().suffix(".arff").tempfile().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    #[test]
    fn minimal_nominal_file() {
        let file = write_temp(
            "@relation toy\n\
             @attribute x {a, b, c}\n\
             @attribute y {0, 1}\n\
             @data\n\
             a,0\n\
             c,1\n\
             b,1\n",
        );
        let ds = load_arff_with(file.path(), &IngestOptions::last_columns(1)).unwrap();
        assert_eq!(ds.n_features(), 1);
        assert_eq!(ds.feature(0).codes(), &[0, 2, 1]);
        assert_eq!(ds.feature(0).arity(), 3);
        assert_eq!(ds.label(0).codes(), &[0, 1, 1]);
    }

    #[test]
    fn sparse_rows_default_to_zero() {
        let file = write_temp(
            "@relation toy\n\
             @attribute a {0, 1}\n\
             @attribute b {0, 1}\n\
             @attribute c {0, 1}\n\
             @attribute y {0, 1}\n\
             @data\n\
             {0 1, 3 1}\n\
             {}\n\
             {1 1}\n",
        );
        let ds = load_arff_with(file.path(), &IngestOptions::last_columns(1)).unwrap();
        assert_eq!(ds.feature(0).codes(), &[1, 0, 0]);
        assert_eq!(ds.feature(1).codes(), &[0, 0, 1]);
        assert_eq!(ds.feature(2).codes(), &[0, 0, 0]);
        assert_eq!(ds.label(0).codes(), &[1, 0, 0]);
    }

    #[test]
    fn numeric_attribute_is_discretized() {
        let file = write_temp(
            "@relation toy\n\
             @attribute x numeric\n\
             @attribute y {0, 1}\n\
             @data\n\
             1.0,0\n\
             2.0,0\n\
             3.0,1\n\
             4.0,1\n",
        );
        let ds = load_arff_with(
            file.path(),
            &IngestOptions {
                labels: crate::io::LabelSelector::LastColumns(1),
                bins: 2,
            },
        )
        .unwrap();
        assert_eq!(ds.feature(0).codes(), &[0, 0, 1, 1]);
    }

    #[test]
    fn sparse_index_out_of_range() {
        let file = write_temp(
            "@relation toy\n\
             @attribute a {0, 1}\n\
             @attribute y {0, 1}\n\
             @data\n\
             {5 1}\n",
        );
        let err = load_arff_with(file.path(), &IngestOptions::last_columns(1)).unwrap_err();
        assert!(matches!(
            err,
            IngestError::SparseIndexOutOfRange { index: 5, .. }
        ));
    }

    #[test]
    fn unknown_nominal_value_is_rejected() {
        let file = write_temp(
            "@relation toy\n\
             @attribute a {x, y}\n\
             @attribute l {0, 1}\n\
             @data\n\
             z,0\n",
        );
        let err = load_arff_with(file.path(), &IngestOptions::last_columns(1)).unwrap_err();
        assert!(matches!(err, IngestError::UnknownNominalValue { .. }));
    }

    #[test]
    fn unsupported_type_is_rejected() {
        let file = write_temp(
            "@relation toy\n\
             @attribute a string\n\
             @data\n",
        );
        let err = load_arff_with(file.path(), &IngestOptions::last_columns(1)).unwrap_err();
        assert!(matches!(err, IngestError::UnsupportedAttributeType { .. }));
    }

    #[test]
    fn missing_values_name_the_rows() {
        let file = write_temp(
            "@relation toy\n\
             @attribute a {0, 1}\n\
             @attribute y {0, 1}\n\
             @data\n\
             0,0\n\
             ?,1\n",
        );
        let err = load_arff_with(file.path(), &IngestOptions::last_columns(1)).unwrap_err();
        match err {
            IngestError::MissingValues { rows } => assert_eq!(rows, vec![2]),
            other => panic!("expected missing-values error, got {other}"),
        }
    }

    #[test]
    fn quoted_attribute_names_parse() {
        let file = write_temp(
            "@relation toy\n\
             @attribute 'my attr' {0, 1}\n\
             @attribute \"the label\" {0, 1}\n\
             @data\n\
             1,0\n\
             0,1\n",
        );
        let ds = load_arff_with(file.path(), &IngestOptions::last_columns(1)).unwrap();
        assert_eq!(ds.feature_names(), &["my attr".to_string()]);
        assert_eq!(ds.label_names(), &["the label".to_string()]);
    }

    #[test]
    fn label_prefix_selection() {
        let file = write_temp(
            "@relation toy\n\
             @attribute x {0, 1}\n\
             @attribute lab_a {0, 1}\n\
             @attribute lab_b {0, 1}\n\
             @data\n\
             1,0,1\n\
             0,1,0\n",
        );
        let ds = load_arff_with(
            file.path(),
            &IngestOptions {
                labels: crate::io::LabelSelector::Prefix("lab_".to_string()),
                bins: 5,
            },
        )
        .unwrap();
        assert_eq!(ds.n_labels(), 2);
        assert_eq!(ds.n_features(), 1);
    }
}
