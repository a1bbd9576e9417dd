//! Discrete tabular data: schema, encoded rows and joint count tables.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use ndarray::{ArrayD, Axis, IxDyn};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub domain: Vec<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, domain: Vec<String>) -> Self {
        Self {
            name: name.into(),
            domain,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.domain.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == label)
    }
}

/// Named discrete attributes with one of them designated as the class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    class_index: usize,
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>, class_index: usize) -> Result<Self> {
        if class_index >= attributes.len() {
            return Err(Error::InvalidSchema(format!(
                "class index {class_index} out of range for {} attributes",
                attributes.len()
            )));
        }
        let mut names = BTreeSet::new();
        for attr in &attributes {
            if !names.insert(attr.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
            if attr.domain.is_empty() {
                return Err(Error::InvalidSchema(format!(
                    "attribute `{}` has an empty domain",
                    attr.name
                )));
            }
            let distinct: BTreeSet<_> = attr.domain.iter().collect();
            if distinct.len() != attr.domain.len() {
                return Err(Error::InvalidSchema(format!(
                    "attribute `{}` has duplicate labels",
                    attr.name
                )));
            }
        }
        Ok(Self {
            attributes,
            class_index,
        })
    }

    /// Schema whose labels are `"0".."k-1"` for each cardinality; attribute
    /// names are `c` for the class and `x1, x2, ...` otherwise.
    pub fn synthetic(class_index: usize, cardinalities: &[usize]) -> Result<Self> {
        let mut feature = 0;
        let attributes = cardinalities
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let name = if i == class_index {
                    "c".to_string()
                } else {
                    feature += 1;
                    format!("x{feature}")
                };
                Attribute::new(name, (0..k).map(|v| v.to_string()).collect())
            })
            .collect();
        Self::new(attributes, class_index)
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &Attribute {
        &self.attributes[index]
    }

    /// Number of columns, class included.
    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    pub fn cardinality(&self, index: usize) -> usize {
        self.attributes[index].cardinality()
    }

    pub fn class_cardinality(&self) -> usize {
        self.cardinality(self.class_index)
    }

    /// Indices of the non-class attributes, in column order.
    pub fn feature_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.attributes.len()).filter(move |&i| i != self.class_index)
    }

    pub fn n_features(&self) -> usize {
        self.attributes.len() - 1
    }

    pub fn is_feature(&self, index: usize) -> bool {
        index < self.attributes.len() && index != self.class_index
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

/// What to do with a row that has an empty cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MissingPolicy {
    #[default]
    DropRow,
    Error,
}

/// Immutable, index-encoded data set. Stored column-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    schema: Schema,
    columns: Vec<Vec<usize>>,
    n_rows: usize,
}

impl Dataset {
    /// Builds a data set from rows of domain indices (class column included,
    /// at the schema's class position).
    pub fn new(schema: Schema, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::NoRows);
        }
        let width = schema.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); width];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::RaggedRow {
                    row: r,
                    found: row.len(),
                    expected: width,
                });
            }
            for (k, &value) in row.iter().enumerate() {
                check_value(&schema, k, value)?;
                columns[k].push(value);
            }
        }
        Ok(Self {
            schema,
            n_rows: rows.len(),
            columns,
        })
    }

    pub fn from_columns(schema: Schema, columns: Vec<Vec<usize>>) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} columns for a schema of {} attributes",
                columns.len(),
                schema.len()
            )));
        }
        let n_rows = columns[0].len();
        if n_rows == 0 {
            return Err(Error::NoRows);
        }
        for (k, column) in columns.iter().enumerate() {
            if column.len() != n_rows {
                return Err(Error::InvalidParameters(format!(
                    "column {k} has {} rows, expected {n_rows}",
                    column.len()
                )));
            }
            for &value in column {
                check_value(&schema, k, value)?;
            }
        }
        Ok(Self {
            schema,
            columns,
            n_rows,
        })
    }

    /// Reads a CSV file, inferring each domain as the sorted set of observed
    /// labels.
    pub fn load_csv(
        path: impl AsRef<Path>,
        class_column: &str,
        missing: MissingPolicy,
        delimiter: u8,
    ) -> Result<Self> {
        Self::from_csv_reader(open(path.as_ref())?, class_column, missing, delimiter)
    }

    pub fn from_csv_reader<R: Read>(
        reader: R,
        class_column: &str,
        missing: MissingPolicy,
        delimiter: u8,
    ) -> Result<Self> {
        let (header, records) = read_records(reader, missing, delimiter)?;
        let class_index = header
            .iter()
            .position(|h| h == class_column)
            .ok_or_else(|| Error::ClassColumnNotFound(class_column.to_string()))?;
        if records.is_empty() {
            return Err(Error::NoRows);
        }

        let width = header.len();
        let mut domains = vec![BTreeSet::new(); width];
        for record in &records {
            for (k, cell) in record.iter().enumerate() {
                domains[k].insert(cell.as_str());
            }
        }
        let attributes = header
            .iter()
            .zip(&domains)
            .map(|(name, domain)| {
                Attribute::new(name.clone(), domain.iter().map(|s| s.to_string()).collect())
            })
            .collect();
        let schema = Schema::new(attributes, class_index)?;

        let lookup: Vec<HashMap<&str, usize>> = domains
            .iter()
            .map(|d| d.iter().enumerate().map(|(i, &s)| (s, i)).collect())
            .collect();
        let mut columns = vec![Vec::with_capacity(records.len()); width];
        for record in &records {
            for (k, cell) in record.iter().enumerate() {
                columns[k].push(lookup[k][cell.as_str()]);
            }
        }
        Ok(Self {
            schema,
            n_rows: records.len(),
            columns,
        })
    }

    /// Reads a CSV file against a fixed schema. Columns are matched by name and
    /// may appear in any order; labels outside the schema's domains are errors.
    pub fn load_csv_with_schema(
        path: impl AsRef<Path>,
        schema: &Schema,
        missing: MissingPolicy,
        delimiter: u8,
    ) -> Result<Self> {
        Self::from_csv_reader_with_schema(open(path.as_ref())?, schema, missing, delimiter)
    }

    pub fn from_csv_reader_with_schema<R: Read>(
        reader: R,
        schema: &Schema,
        missing: MissingPolicy,
        delimiter: u8,
    ) -> Result<Self> {
        let (header, records) = read_records(reader, missing, delimiter)?;
        let positions = column_positions(&header, schema, true)?;
        if records.is_empty() {
            return Err(Error::NoRows);
        }
        let mut columns = vec![Vec::with_capacity(records.len()); schema.len()];
        for record in &records {
            for (k, pos) in positions.iter().enumerate() {
                let pos = pos.expect("all columns required");
                columns[k].push(encode(schema, k, &record[pos])?);
            }
        }
        Ok(Self {
            schema: schema.clone(),
            n_rows: records.len(),
            columns,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn column(&self, attribute: usize) -> &[usize] {
        &self.columns[attribute]
    }

    pub fn value(&self, row: usize, attribute: usize) -> usize {
        self.columns[attribute][row]
    }

    /// Full row, class included.
    pub fn row(&self, row: usize) -> Vec<usize> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    /// Row values of the non-class attributes, in column order.
    pub fn instance(&self, row: usize) -> Vec<usize> {
        self.schema
            .feature_indices()
            .map(|k| self.columns[k][row])
            .collect()
    }

    pub fn class_value(&self, row: usize) -> usize {
        self.columns[self.schema.class_index][row]
    }

    /// Data set restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&r| c[r]).collect())
            .collect();
        Self::from_columns(self.schema.clone(), columns)
    }

    /// Joint occurrence counts over an ordered list of distinct attributes.
    pub fn joint_counts(&self, variables: &[usize]) -> Result<ContingencyTable> {
        let mut seen = BTreeSet::new();
        for &v in variables {
            if v >= self.schema.len() {
                return Err(Error::InvalidVariables(format!(
                    "attribute index {v} out of range"
                )));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidVariables(format!(
                    "attribute index {v} listed twice"
                )));
            }
        }
        let shape: Vec<usize> = variables.iter().map(|&v| self.schema.cardinality(v)).collect();
        let mut strides = vec![1usize; variables.len()];
        for k in (0..variables.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        let mut counts = vec![0u64; shape.iter().product()];
        for row in 0..self.n_rows {
            let mut flat = 0;
            for (k, &v) in variables.iter().enumerate() {
                flat += self.columns[v][row] * strides[k];
            }
            counts[flat] += 1;
        }
        let counts = ArrayD::from_shape_vec(IxDyn(&shape), counts).expect("shape matches length");
        Ok(ContingencyTable {
            variables: variables.to_vec(),
            counts,
            total: self.n_rows as u64,
        })
    }
}

/// Reads instances for prediction: every non-class attribute must be present
/// (matched by name), a class column is ignored if present.
pub fn read_instances<R: Read>(
    reader: R,
    schema: &Schema,
    missing: MissingPolicy,
    delimiter: u8,
) -> Result<Vec<Vec<usize>>> {
    let (header, records) = read_records(reader, missing, delimiter)?;
    let positions = column_positions(&header, schema, false)?;
    records
        .iter()
        .map(|record| {
            schema
                .feature_indices()
                .map(|k| {
                    let pos = positions[k].expect("feature columns required");
                    encode(schema, k, &record[pos])
                })
                .collect()
        })
        .collect()
}

pub fn read_instances_from_path(
    path: impl AsRef<Path>,
    schema: &Schema,
    missing: MissingPolicy,
    delimiter: u8,
) -> Result<Vec<Vec<usize>>> {
    read_instances(open(path.as_ref())?, schema, missing, delimiter)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn check_value(schema: &Schema, attribute: usize, value: usize) -> Result<()> {
    let cardinality = schema.cardinality(attribute);
    if value >= cardinality {
        return Err(Error::ValueOutOfRange {
            attribute: schema.attribute(attribute).name.clone(),
            value,
            cardinality,
        });
    }
    Ok(())
}

fn encode(schema: &Schema, attribute: usize, label: &str) -> Result<usize> {
    let attr = schema.attribute(attribute);
    attr.value_index(label).ok_or_else(|| Error::UnseenValue {
        attribute: attr.name.clone(),
        value: label.to_string(),
    })
}

fn column_positions(
    header: &[String],
    schema: &Schema,
    require_class: bool,
) -> Result<Vec<Option<usize>>> {
    schema
        .attributes()
        .iter()
        .enumerate()
        .map(|(k, attr)| {
            let pos = header.iter().position(|h| *h == attr.name);
            match pos {
                None if k == schema.class_index() && !require_class => Ok(None),
                None if k == schema.class_index() => {
                    Err(Error::ClassColumnNotFound(attr.name.clone()))
                }
                None => Err(Error::ColumnNotFound(attr.name.clone())),
                Some(p) => Ok(Some(p)),
            }
        })
        .collect()
}

type Records = (Vec<String>, Vec<Vec<String>>);

fn read_records<R: Read>(reader: R, missing: MissingPolicy, delimiter: u8) -> Result<Records> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(reader);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::MissingHeader);
    }
    let mut records = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row: r + 1,
                found: record.len(),
                expected: header.len(),
            });
        }
        if let Some(k) = record.iter().position(str::is_empty) {
            match missing {
                MissingPolicy::DropRow => continue,
                MissingPolicy::Error => {
                    return Err(Error::MissingValue {
                        row: r + 1,
                        column: header[k].clone(),
                    })
                }
            }
        }
        records.push(record.iter().map(str::to_string).collect());
    }
    Ok((header, records))
}

/// Joint counts over an ordered list of attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    variables: Vec<usize>,
    counts: ArrayD<u64>,
    total: u64,
}

impl ContingencyTable {
    /// Wraps a raw count array; the variables are labelled `0..ndim`.
    pub fn from_counts(counts: ArrayD<u64>) -> Self {
        let variables = (0..counts.ndim()).collect();
        Self::with_variables(variables, counts).expect("one label per axis")
    }

    pub fn with_variables(variables: Vec<usize>, counts: ArrayD<u64>) -> Result<Self> {
        if variables.len() != counts.ndim() {
            return Err(Error::WrongArity {
                expected: counts.ndim(),
                found: variables.len(),
            });
        }
        let total = counts.sum();
        Ok(Self {
            variables,
            counts,
            total,
        })
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn counts(&self) -> &ArrayD<u64> {
        &self.counts
    }

    pub fn shape(&self) -> &[usize] {
        self.counts.shape()
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, index: &[usize]) -> u64 {
        self.counts[IxDyn(index)]
    }

    /// Sums out one axis.
    pub fn marginalize(&self, axis: usize) -> Self {
        let counts = self.counts.sum_axis(Axis(axis));
        let mut variables = self.variables.clone();
        variables.remove(axis);
        Self {
            variables,
            counts,
            total: self.total,
        }
    }

    /// Same counts with the axes reordered; `order[k]` is the old axis that
    /// becomes axis `k`.
    pub fn permute(&self, order: &[usize]) -> Self {
        let counts = self
            .counts
            .clone()
            .permuted_axes(IxDyn(order))
            .as_standard_layout()
            .into_owned();
        Self {
            variables: order.iter().map(|&k| self.variables[k]).collect(),
            counts,
            total: self.total,
        }
    }
}
