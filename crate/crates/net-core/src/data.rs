//! Dataset ingestion, preprocessing, and synthetic domain-shift generation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Labels, Matrix, Scalar, Vector};

/// A dense feature matrix (samples as rows) with optional 1-based labels.
#[derive(Debug, Clone)]
pub struct LabeledDomain<T: Scalar> {
    features: Matrix<T>,
    labels: Option<Labels>,
    pub name: String,
}

impl<T: Scalar> LabeledDomain<T> {
    pub fn new(features: Matrix<T>, labels: Option<Labels>, name: impl Into<String>) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::InvalidArgument(
                "a domain needs at least one sample and one feature".into(),
            ));
        }
        if let Some(l) = &labels {
            if l.len() != features.nrows() {
                return Err(Error::DimensionMismatch {
                    context: "label count vs sample count",
                    left: l.len(),
                    right: features.nrows(),
                });
            }
            if let Some(&bad) = l.iter().find(|&&v| v < 1) {
                return Err(Error::InvalidArgument(format!(
                    "labels must be positive integers, got {bad}"
                )));
            }
        }
        Ok(Self {
            features,
            labels,
            name: name.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn require_labels(&self) -> Result<&Labels> {
        self.labels.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("domain {:?} has no labels", self.name))
        })
    }

    /// Largest label value, i.e. the class count `C`.
    pub fn class_count(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| *l.iter().max().expect("non-empty"))
    }

    /// Same features without labels.
    pub fn unlabeled(&self) -> Self {
        Self {
            features: self.features.clone(),
            labels: None,
            name: self.name.clone(),
        }
    }

    /// Sub-domain of the given row indices (labels carried along).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty subset".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n()) {
            return Err(Error::InvalidArgument(format!(
                "subset index {bad} out of range for {} samples",
                self.n()
            )));
        }
        let feats = Matrix::from_fn(indices.len(), self.dim(), |i, j| {
            self.features[(indices[i], j)]
        });
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Ok(Self {
            features: feats,
            labels,
            name: self.name.clone(),
        })
    }
}

/// Preprocessing applied before kernel construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreprocessSpec {
    /// Per-feature z-score.
    pub standardize: bool,
    /// Fit standardization on source+target instead of source only.
    pub standardize_pooled: bool,
    /// Project onto this many pooled principal directions.
    pub pca_dims: Option<usize>,
}

/// Which column of a delimited file carries the labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    /// 0-based column index.
    Index(usize),
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => write!(f, "{n}"),
        }
    }
}

/// Load a delimited text table (one header row; comma or tab, auto-detected
/// from the header line). Rows are samples; every column except the optional
/// label column must be numeric.
///
/// Data rows are reported 1-based in errors.
pub fn load_dataset<T: Scalar>(
    path: impl AsRef<Path>,
    label_column: Option<&LabelColumn>,
) -> Result<LabeledDomain<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let header_line = text.lines().next().unwrap_or("");
    let delimiter = if header_line.contains('\t') { b'\t' } else { b',' };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.display().to_string(),
            source,
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();

    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Index(i)) => {
            if *i >= headers.len() {
                return Err(Error::MissingColumn(format!("index {i}")));
            }
            Some(*i)
        }
        Some(LabelColumn::Name(name)) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?,
        ),
    };

    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|source| Error::Csv {
            path: path.display().to_string(),
            source,
        })?;
        if record.len() != headers.len() {
            return Err(Error::NonNumeric {
                row,
                column: "(row length)".into(),
                value: format!("{} fields, expected {}", record.len(), headers.len()),
            });
        }
        let mut feats = Vec::with_capacity(headers.len().saturating_sub(1));
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_idx {
                let value: f64 = cell.parse().map_err(|_| Error::BadLabel {
                    row,
                    value: cell.to_string(),
                })?;
                if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
                    return Err(Error::BadLabel {
                        row,
                        value: cell.to_string(),
                    });
                }
                labels.push(value as usize);
            } else {
                let value: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                    row,
                    column: headers[col].clone(),
                    value: cell.to_string(),
                })?;
                feats.push(T::from_double(value));
            }
        }
        rows.push(feats);
    }
    if rows.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} has no data rows",
            path.display()
        )));
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::InvalidArgument(format!(
            "{} has no feature columns",
            path.display()
        )));
    }
    let features = Matrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    LabeledDomain::new(features, label_idx.map(|_| labels), name)
}

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone)]
pub struct StandardizeStats<T: Scalar> {
    pub mean: Vector<T>,
    pub std: Vector<T>,
}

impl<T: Scalar> StandardizeStats<T> {
    pub fn fit(features: &Matrix<T>) -> Self {
        let n = T::from_double(features.nrows() as f64);
        let d = features.ncols();
        let mean = Vector::from_fn(d, |j, _| {
            features.column(j).iter().fold(T::zero(), |s, v| s + *v) / n
        });
        let std = Vector::from_fn(d, |j, _| {
            let var = features
                .column(j)
                .iter()
                .fold(T::zero(), |s, v| {
                    let c = *v - mean[j];
                    s + c * c
                })
                / n;
            var.sqrt()
        });
        Self { mean, std }
    }
}

/// Z-score the features. With `stats` given, those statistics are applied
/// (e.g. target columns scaled by source-fit mean/stddev); otherwise stats
/// are fit on the input. Constant features map to zero.
pub fn standardize<T: Scalar>(
    domain: &LabeledDomain<T>,
    stats: Option<&StandardizeStats<T>>,
) -> Result<(LabeledDomain<T>, StandardizeStats<T>)> {
    let fitted;
    let stats = match stats {
        Some(s) => {
            if s.mean.len() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    context: "standardize stats vs feature dimension",
                    left: s.mean.len(),
                    right: domain.dim(),
                });
            }
            s
        }
        None => {
            fitted = StandardizeStats::fit(domain.features());
            &fitted
        }
    };
    let feats = Matrix::from_fn(domain.n(), domain.dim(), |i, j| {
        if stats.std[j] > T::zero() {
            (domain.features()[(i, j)] - stats.mean[j]) / stats.std[j]
        } else {
            T::zero()
        }
    });
    let out = LabeledDomain {
        features: feats,
        labels: domain.labels.clone(),
        name: domain.name.clone(),
    };
    Ok((out, stats.clone()))
}

/// Project both domains onto the top principal directions of the pooled
/// (source and target) data.
pub fn pca_reduce<T: Scalar>(
    source: &LabeledDomain<T>,
    target: &LabeledDomain<T>,
    dims: usize,
) -> Result<(LabeledDomain<T>, LabeledDomain<T>)> {
    let d = source.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "source vs target feature dimension",
            left: d,
            right: target.dim(),
        });
    }
    let n = source.n() + target.n();
    let max_dims = d.min(n - 1);
    if dims == 0 || dims > max_dims {
        return Err(Error::InvalidArgument(format!(
            "pca dims {dims} not in 1..={max_dims}"
        )));
    }
    let pooled = crate::kernel::stack_rows(source.features(), target.features())?;
    let nn = T::from_double(n as f64);
    let mean = Vector::from_fn(d, |j, _| {
        pooled.column(j).iter().fold(T::zero(), |s, v| s + *v) / nn
    });
    let centered = Matrix::from_fn(n, d, |i, j| pooled[(i, j)] - mean[j]);
    let cov = centered.transpose() * &centered / T::from_double((n - 1) as f64);
    let eig = cov.symmetric_eigen();
    // top-`dims` directions, eigenvalues descending, deterministic signs
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let mut components = Matrix::zeros(d, dims);
    for (out_col, &src_col) in order.iter().take(dims).enumerate() {
        let mut col = eig.eigenvectors.column(src_col).clone_owned();
        fix_sign(&mut col);
        components.set_column(out_col, &col);
    }
    let project = |dom: &LabeledDomain<T>| {
        let centered = Matrix::from_fn(dom.n(), d, |i, j| dom.features()[(i, j)] - mean[j]);
        LabeledDomain {
            features: centered * &components,
            labels: dom.labels.clone(),
            name: dom.name.clone(),
        }
    };
    Ok((project(source), project(target)))
}

/// Flip a vector so its largest-magnitude entry is nonnegative.
pub(crate) fn fix_sign<T: Scalar>(v: &mut Vector<T>) {
    let mut best = 0usize;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < T::zero() {
        v.neg_mut();
    }
}

/// Two Gaussian-mixture domains with a controlled shift between them.
///
/// Class means sit on a circle in the first two feature dimensions (spaced
/// along the first axis when `dim == 1`) with unit within-class standard
/// deviation, so `shift` is measured in class-stddev units. Target means are
/// the source means rotated about their centroid (in the first two
/// dimensions) and translated by `shift` along the first axis. Target labels
/// are retained for scoring only.
pub fn make_shifted_gaussians<T: Scalar>(
    seed: u64,
    n_s: usize,
    n_t: usize,
    classes: usize,
    dim: usize,
    shift: f64,
    rotation: f64,
) -> Result<(LabeledDomain<T>, LabeledDomain<T>)> {
    if classes < 2 {
        return Err(Error::InvalidArgument("need at least two classes".into()));
    }
    if n_s < classes || n_t < classes {
        return Err(Error::InvalidArgument(format!(
            "need at least {classes} samples per domain"
        )));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dim must be positive".into()));
    }

    let means = class_means(classes, dim);
    let centroid: Vec<f64> = (0..dim)
        .map(|j| means.iter().map(|m| m[j]).sum::<f64>() / classes as f64)
        .collect();
    let (cos_r, sin_r) = (rotation.cos(), rotation.sin());
    let target_means: Vec<Vec<f64>> = means
        .iter()
        .map(|m| {
            let mut out = m.clone();
            if dim >= 2 {
                let dx = m[0] - centroid[0];
                let dy = m[1] - centroid[1];
                out[0] = centroid[0] + cos_r * dx - sin_r * dy;
                out[1] = centroid[1] + sin_r * dx + cos_r * dy;
            }
            out[0] += shift;
            out
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample_domain = |count: usize, means: &[Vec<f64>], name: &str| {
        let sizes = split_counts(count, classes);
        let mut feats = Matrix::zeros(count, dim);
        let mut labels = Vec::with_capacity(count);
        let mut row = 0;
        for (c, &size) in sizes.iter().enumerate() {
            for _ in 0..size {
                for j in 0..dim {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    feats[(row, j)] = T::from_double(means[c][j] + noise);
                }
                labels.push(c + 1);
                row += 1;
            }
        }
        LabeledDomain {
            features: feats,
            labels: Some(labels),
            name: name.to_string(),
        }
    };

    let source = sample_domain(n_s, &means, "synthetic-source");
    let target = sample_domain(n_t, &target_means, "synthetic-target");
    Ok((source, target))
}

/// Class means spaced roughly three class-stddevs apart.
fn class_means(classes: usize, dim: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        return (0..classes).map(|c| vec![3.0 * c as f64]).collect();
    }
    let radius = 1.5 / (std::f64::consts::PI / classes as f64).sin();
    (0..classes)
        .map(|c| {
            let theta = 2.0 * std::f64::consts::PI * c as f64 / classes as f64;
            let mut m = vec![0.0; dim];
            m[0] = radius * theta.cos();
            m[1] = radius * theta.sin();
            m
        })
        .collect()
}

fn split_counts(total: usize, classes: usize) -> Vec<usize> {
    let base = total / classes;
    let extra = total % classes;
    (0..classes)
        .map(|c| base + usize::from(c < extra))
        .collect()
}
