//! Datasets: predictor columns, cutpoint grids, response scaling and CSV ingestion.
//!
//! Predictors are stored column-major. Every variable owns an ascending grid of
//! cutpoints; a row goes left at a split `(v, c)` iff `x[v] <= grid[v][c]`.
//! Training rows are pre-binned against their grids so routing during sampling
//! is an integer comparison: `bin <= c` iff `x <= grid[c]`.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Mode;

/// Default cap on the number of cutpoints per variable.
pub const DEFAULT_MAX_CUTPOINTS: usize = 100;

/// Affine map of the regression response onto `[-0.5, 0.5]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub y_min: f64,
    pub y_max: f64,
}

impl Scaling {
    pub fn new(y_min: f64, y_max: f64) -> Result<Self> {
        if !(y_min.is_finite() && y_max.is_finite()) || y_max <= y_min {
            return Err(Error::DegenerateResponse(format!(
                "scaling requires y_max > y_min (got {y_min}, {y_max})"
            )));
        }
        Ok(Scaling { y_min, y_max })
    }

    pub fn range(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn scale(&self, y: f64) -> f64 {
        (y - self.y_min) / self.range() - 0.5
    }

    pub fn inverse(&self, v: f64) -> f64 {
        (v + 0.5) * self.range() + self.y_min
    }
}

/// Shift and rescale `y` so its minimum maps to -0.5 and its maximum to 0.5.
pub fn scale_response(y: &[f64]) -> Result<(Vec<f64>, Scaling)> {
    if y.is_empty() {
        return Err(Error::Data("empty response".into()));
    }
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if lo == hi {
        return Err(Error::DegenerateResponse(format!(
            "response is constant ({lo})"
        )));
    }
    let scaling = Scaling::new(lo, hi)?;
    let mut scaled: Vec<f64> = y.iter().map(|&v| scaling.scale(v)).collect();
    // pin the endpoints exactly
    for (s, &v) in scaled.iter_mut().zip(y) {
        if v == lo {
            *s = -0.5;
        } else if v == hi {
            *s = 0.5;
        }
    }
    Ok((scaled, scaling))
}

pub fn inverse_scale(value: f64, scaling: &Scaling) -> f64 {
    scaling.inverse(value)
}

/// Optional pre-transformation of the raw response, applied before scaling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseTransform {
    #[default]
    None,
    Log,
    Sqrt,
}

impl ResponseTransform {
    pub fn apply(self, y: f64) -> Option<f64> {
        match self {
            ResponseTransform::None => Some(y),
            ResponseTransform::Log if y > 0.0 => Some(y.ln()),
            ResponseTransform::Sqrt if y >= 0.0 => Some(y.sqrt()),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ResponseTransform::None => "none",
            ResponseTransform::Log => "log",
            ResponseTransform::Sqrt => "sqrt",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ResponseTransform::None),
            "log" => Ok(ResponseTransform::Log),
            "sqrt" => Ok(ResponseTransform::Sqrt),
            other => Err(Error::InvalidParameter(format!(
                "unknown response transform {other:?}"
            ))),
        }
    }
}

/// How a source CSV column became predictor columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    /// One 0/1 indicator per level, in this order.
    Categorical { levels: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceColumn {
    pub name: String,
    pub kind: ColumnKind,
}

/// Column layout of a dataset: the response name plus the source predictor
/// columns in file order. Used to re-encode prediction data identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub response: String,
    pub transform: ResponseTransform,
    pub columns: Vec<SourceColumn>,
}

impl Schema {
    /// Schema of `p` anonymous numeric predictors named `x1..xp`.
    pub fn numeric(p: usize, response: &str) -> Self {
        Schema {
            response: response.to_string(),
            transform: ResponseTransform::None,
            columns: (1..=p)
                .map(|i| SourceColumn {
                    name: format!("x{i}"),
                    kind: ColumnKind::Numeric,
                })
                .collect(),
        }
    }

    /// Names of the encoded predictor columns (`name` or `name=level`).
    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for col in &self.columns {
            match &col.kind {
                ColumnKind::Numeric => names.push(col.name.clone()),
                ColumnKind::Categorical { levels } => {
                    names.extend(levels.iter().map(|l| format!("{}={}", col.name, l)))
                }
            }
        }
        names
    }

    pub fn num_features(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match &c.kind {
                ColumnKind::Numeric => 1,
                ColumnKind::Categorical { levels } => levels.len(),
            })
            .sum()
    }
}

/// Construct the cutpoint grid of one variable.
///
/// Uses every midpoint between consecutive distinct values when there are at
/// most `max_cutpoints` of them, otherwise the midpoints nearest to
/// `max_cutpoints` evenly spaced empirical quantiles. Every returned cutpoint
/// leaves at least one value on each side. A constant column yields an empty grid.
pub fn build_cutpoints(values: &[f64], max_cutpoints: usize) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut unique = sorted.clone();
    unique.dedup();
    if unique.len() < 2 || max_cutpoints == 0 {
        return Vec::new();
    }
    let midpoint = |i: usize| {
        let (a, b) = (unique[i], unique[i + 1]);
        let m = a + (b - a) / 2.0;
        if m >= b {
            a
        } else {
            m
        }
    };
    if unique.len() - 1 <= max_cutpoints {
        return (0..unique.len() - 1).map(midpoint).collect();
    }
    let n = sorted.len();
    let mut picked = BTreeSet::new();
    for j in 1..=max_cutpoints {
        let prob = j as f64 / (max_cutpoints + 1) as f64;
        let h = (n - 1) as f64 * prob;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let q = sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]);
        // index of the largest unique value <= q
        let idx = unique.partition_point(|&u| u <= q).saturating_sub(1);
        if idx + 1 < unique.len() {
            picked.insert(idx);
        }
    }
    picked.into_iter().map(midpoint).collect()
}

/// Number of grid values strictly below `x`; `x <= grid[c]` iff the bin is `<= c`.
pub fn bin_of(grid: &[f64], x: f64) -> u32 {
    grid.partition_point(|&g| g < x) as u32
}

/// A training dataset ready for sampling.
#[derive(Clone, Debug)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    grids: Vec<Vec<f64>>,
    bins: Vec<Vec<u32>>,
    /// Working response: scaled to [-0.5, 0.5] in regression mode, 0/1 labels in probit mode.
    y: Vec<f64>,
    /// Response in original units (after any transform).
    raw_y: Vec<f64>,
    scaling: Option<Scaling>,
    schema: Schema,
    mode: Mode,
}

impl Dataset {
    /// Build from row-major predictors. The response is scaled (regression) or
    /// validated as 0/1 (probit).
    pub fn from_rows(rows: &[Vec<f64>], y: &[f64], mode: Mode) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        let columns = rows_to_columns(rows, p)?;
        Self::from_columns(columns, y.to_vec(), mode, Schema::numeric(p, "y"), DEFAULT_MAX_CUTPOINTS)
    }

    pub fn from_columns(
        columns: Vec<Vec<f64>>,
        y: Vec<f64>,
        mode: Mode,
        schema: Schema,
        max_cutpoints: usize,
    ) -> Result<Self> {
        let grids = columns
            .iter()
            .map(|c| build_cutpoints(c, max_cutpoints))
            .collect();
        Self::with_grids(columns, y, mode, schema, grids)
    }

    /// Build with caller-supplied grids (each strictly ascending).
    pub fn with_grids(
        columns: Vec<Vec<f64>>,
        y: Vec<f64>,
        mode: Mode,
        schema: Schema,
        grids: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = y.len();
        if n == 0 {
            return Err(Error::Data("dataset has no rows".into()));
        }
        if columns.is_empty() {
            return Err(Error::Data("dataset has no predictors".into()));
        }
        if grids.len() != columns.len() {
            return Err(Error::Data("one cutpoint grid is required per predictor".into()));
        }
        if schema.num_features() != columns.len() {
            return Err(Error::Schema(format!(
                "schema describes {} predictors but {} were supplied",
                schema.num_features(),
                columns.len()
            )));
        }
        for (v, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::Data(format!(
                    "predictor {v} has {} rows, response has {n}",
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|x| !x.is_finite()) {
                return Err(Error::Data(format!("predictor {v}, row {i}: non-finite value")));
            }
        }
        for (v, g) in grids.iter().enumerate() {
            if g.windows(2).any(|w| w[0] >= w[1]) || g.iter().any(|c| !c.is_finite()) {
                return Err(Error::Data(format!("grid of predictor {v} is not strictly ascending")));
            }
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("response row {i}: non-finite value")));
        }
        let (working, scaling) = match mode {
            Mode::Regression => {
                let (s, sc) = scale_response(&y)?;
                (s, Some(sc))
            }
            Mode::Probit => {
                if let Some(v) = y.iter().find(|&&v| v != 0.0 && v != 1.0) {
                    return Err(Error::NonBinaryResponse(format!(
                        "probit mode requires 0/1 labels, found {v}"
                    )));
                }
                (y.clone(), None)
            }
        };
        let bins = columns
            .iter()
            .zip(&grids)
            .map(|(col, g)| col.iter().map(|&x| bin_of(g, x)).collect())
            .collect();
        Ok(Dataset {
            columns,
            grids,
            bins,
            y: working,
            raw_y: y,
            scaling,
            schema,
            mode,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Working response (scaled regression response or 0/1 labels).
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Response in original units.
    pub fn raw_y(&self) -> &[f64] {
        &self.raw_y
    }

    pub fn scaling(&self) -> Option<&Scaling> {
        self.scaling.as_ref()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn grids(&self) -> &[Vec<f64>] {
        &self.grids
    }

    pub fn grid(&self, variable: usize) -> &[f64] {
        &self.grids[variable]
    }

    pub fn column(&self, variable: usize) -> &[f64] {
        &self.columns[variable]
    }

    pub fn x(&self, row: usize, variable: usize) -> f64 {
        self.columns[variable][row]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    pub(crate) fn bins(&self, variable: usize) -> &[u32] {
        &self.bins[variable]
    }
    /// The given rows as a new dataset; grids and response scaling are rebuilt from them.
    /// Same predictors, new response (used by cross-validation folds and tests).
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        let columns = self
            .columns
            .iter()
            .map(|c| rows.iter().map(|&i| c[i]).collect())
            .collect();
        let y = rows.iter().map(|&i| self.raw_y[i]).collect();
        let max_cut = self.grids.iter().map(Vec::len).max().unwrap_or(0).max(DEFAULT_MAX_CUTPOINTS);
        Dataset::from_columns(columns, y, self.mode, self.schema.clone(), max_cut)
    }
}

fn rows_to_columns(rows: &[Vec<f64>], p: usize) -> Result<Vec<Vec<f64>>> {
    let mut columns = vec![Vec::with_capacity(rows.len()); p];
    for (i, r) in rows.iter().enumerate() {
        if r.len() != p {
            return Err(Error::Data(format!("row {i} has {} values, expected {p}", r.len())));
        }
        for (c, &v) in columns.iter_mut().zip(r) {
            c.push(v);
        }
    }
    Ok(columns)
}

/// CSV ingestion options.
#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub response: String,
    pub mode: Mode,
    pub max_cutpoints: usize,
    pub transform: ResponseTransform,
    /// Columns to treat as categorical even if their values look numeric.
    pub categorical: Vec<String>,
}

impl CsvOptions {
    pub fn new(response: impl Into<String>, mode: Mode) -> Self {
        CsvOptions {
            response: response.into(),
            mode,
            max_cutpoints: DEFAULT_MAX_CUTPOINTS,
            transform: ResponseTransform::None,
            categorical: Vec::new(),
        }
    }
}

struct RawTable {
    headers: Vec<String>,
    records: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<RawTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        records.push(rec.iter().map(str::to_string).collect());
    }
    Ok(RawTable { headers, records })
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    if cell.is_empty() {
        return Err(Error::Cell {
            row,
            column: column.to_string(),
            message: "missing value".into(),
        });
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Cell {
            row,
            column: column.to_string(),
            message: format!("expected a finite number, found {cell:?}"),
        }),
    }
}

/// Load a training CSV: numeric columns are parsed, non-numeric columns are
/// one-hot encoded (one indicator per level, levels sorted). Row numbers in
/// errors are 1-based data rows (the header is not counted).
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let table = read_table(path.as_ref())?;
    if table.records.is_empty() {
        return Err(Error::Data("file contains no data rows".into()));
    }
    let resp_idx = table
        .headers
        .iter()
        .position(|h| *h == opts.response)
        .ok_or_else(|| Error::Data(format!("response column {:?} not found", opts.response)))?;

    let mut columns = Vec::new();
    for (c, name) in table.headers.iter().enumerate() {
        if c == resp_idx {
            continue;
        }
        let forced = opts.categorical.iter().any(|n| n == name);
        let any_numeric = table
            .records
            .iter()
            .any(|r| r.get(c).is_some_and(|s| s.parse::<f64>().is_ok()));
        let kind = if forced || !any_numeric {
            let mut levels = BTreeSet::new();
            for (i, r) in table.records.iter().enumerate() {
                let cell = cell_at(r, c, i + 1, name)?;
                if cell.is_empty() {
                    return Err(Error::Cell {
                        row: i + 1,
                        column: name.clone(),
                        message: "missing value".into(),
                    });
                }
                levels.insert(cell.to_string());
            }
            ColumnKind::Categorical {
                levels: levels.into_iter().collect(),
            }
        } else {
            ColumnKind::Numeric
        };
        columns.push(SourceColumn {
            name: name.clone(),
            kind,
        });
    }
    let schema = Schema {
        response: opts.response.clone(),
        transform: opts.transform,
        columns,
    };

    let encoded = encode_records(&table, &schema)?;
    let mut y = Vec::with_capacity(table.records.len());
    for (i, r) in table.records.iter().enumerate() {
        let cell = cell_at(r, resp_idx, i + 1, &opts.response)?;
        let raw = parse_cell(cell, i + 1, &opts.response)?;
        let v = opts.transform.apply(raw).ok_or_else(|| Error::Cell {
            row: i + 1,
            column: opts.response.clone(),
            message: format!("{raw} is outside the domain of the {} transform", opts.transform.as_str()),
        })?;
        y.push(v);
    }
    if opts.mode == Mode::Probit {
        if let Some((i, v)) = y.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
            return Err(Error::NonBinaryResponse(format!(
                "row {}: probit mode requires 0/1 labels in {:?}, found {v}",
                i + 1,
                opts.response
            )));
        }
    }
    Dataset::from_columns(encoded, y, opts.mode, schema, opts.max_cutpoints)
}

fn cell_at<'a>(record: &'a [String], c: usize, row: usize, column: &str) -> Result<&'a str> {
    record.get(c).map(String::as_str).ok_or_else(|| Error::Cell {
        row,
        column: column.to_string(),
        message: "row is too short".into(),
    })
}

fn encode_records(table: &RawTable, schema: &Schema) -> Result<Vec<Vec<f64>>> {
    let index: HashMap<&str, usize> = table
        .headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.as_str(), i))
        .collect();
    let n = table.records.len();
    let mut out = Vec::with_capacity(schema.num_features());
    for col in &schema.columns {
        let c = *index
            .get(col.name.as_str())
            .ok_or_else(|| Error::Schema(format!("column {:?} is missing", col.name)))?;
        match &col.kind {
            ColumnKind::Numeric => {
                let mut values = Vec::with_capacity(n);
                for (i, r) in table.records.iter().enumerate() {
                    values.push(parse_cell(cell_at(r, c, i + 1, &col.name)?, i + 1, &col.name)?);
                }
                out.push(values);
            }
            ColumnKind::Categorical { levels } => {
                let mut block = vec![vec![0.0; n]; levels.len()];
                for (i, r) in table.records.iter().enumerate() {
                    let cell = cell_at(r, c, i + 1, &col.name)?;
                    let level = levels.iter().position(|l| l == cell).ok_or_else(|| Error::Cell {
                        row: i + 1,
                        column: col.name.clone(),
                        message: if cell.is_empty() {
                            "missing value".into()
                        } else {
                            format!("unknown level {cell:?}")
                        },
                    })?;
                    block[level][i] = 1.0;
                }
                out.extend(block);
            }
        }
    }
    Ok(out)
}

/// Predictor rows read from a CSV and encoded with an existing schema.
#[derive(Clone, Debug)]
pub struct FeatureTable {
    pub rows: Vec<Vec<f64>>,
    /// Response in original units when the file contains the response column.
    pub response: Option<Vec<f64>>,
}

/// Load prediction data, encoding it with the training schema. Columns not in
/// the schema are ignored except the response; missing columns are a schema error.
pub fn load_features(path: impl AsRef<Path>, schema: &Schema) -> Result<FeatureTable> {
    let table = read_table(path.as_ref())?;
    let missing: Vec<&str> = schema
        .columns
        .iter()
        .map(|c| c.name.as_str())
        .filter(|name| !table.headers.iter().any(|h| h == name))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "prediction data lacks model columns: {}",
            missing.join(", ")
        )));
    }
    let expected: Vec<&str> = schema.columns.iter().map(|c| c.name.as_str()).collect();
    let present: Vec<&str> = table
        .headers
        .iter()
        .map(String::as_str)
        .filter(|h| expected.contains(h))
        .collect();
    if present != expected {
        return Err(Error::Schema(format!(
            "column order differs: model has [{}], file has [{}]",
            expected.join(", "),
            present.join(", ")
        )));
    }
    let columns = encode_records(&table, schema)?;
    let n = table.records.len();
    let rows = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let response = match table.headers.iter().position(|h| *h == schema.response) {
        Some(ri) => {
            let mut y = Vec::with_capacity(n);
            for (i, r) in table.records.iter().enumerate() {
                let raw = parse_cell(cell_at(r, ri, i + 1, &schema.response)?, i + 1, &schema.response)?;
                y.push(schema.transform.apply(raw).unwrap_or(f64::NAN));
            }
            Some(y)
        }
        None => None,
    };
    Ok(FeatureTable { rows, response })
}

/// Write a numeric table as CSV with a header.
pub fn write_csv(path: impl AsRef<Path>, headers: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Friedman's five-dimensional test function; only the first five entries matter.
pub fn friedman_function(x: &[f64]) -> f64 {
    10.0 * (PI * x[0] * x[1]).sin() + 20.0 * (x[2] - 0.5).powi(2) + 10.0 * x[3] + 5.0 * x[4]
}

/// A simulated Friedman dataset together with the noiseless signal.
#[derive(Clone, Debug)]
pub struct FriedmanSample {
    pub data: Dataset,
    pub f: Vec<f64>,
}

/// `n` rows of `p` i.i.d. Uniform(0,1) predictors.
pub fn uniform_rows<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Simulate `y = f(x) + N(0, sigma^2)` with uniform predictors.
pub fn generate_friedman<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: usize,
    sigma: f64,
) -> Result<FriedmanSample> {
    if p < 5 {
        return Err(Error::InvalidParameter(format!(
            "the Friedman function needs p >= 5 predictors (got {p})"
        )));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter("sigma must be nonnegative".into()));
    }
    let rows = uniform_rows(rng, n, p);
    let f: Vec<f64> = rows.iter().map(|r| friedman_function(r)).collect();
    let y: Vec<f64> = f
        .iter()
        .map(|&fx| {
            if sigma == 0.0 {
                fx
            } else {
                fx + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal)
            }
        })
        .collect();
    let data = Dataset::from_rows(&rows, &y, Mode::Regression)?;
    Ok(FriedmanSample { data, f })
}
