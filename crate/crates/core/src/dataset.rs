//! Clustering instances: loading, synthetic generation, the Gram matrix and
//! the sum-of-squares objective.
//!
//! Cluster labels are zero-based throughout the crate: an [`Assignment`] with
//! `k` clusters uses ids `0..k`.

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n x d` matrix whose rows are the data points.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    points: DMatrix<f64>,
}

impl DataMatrix {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some((idx, _)) = points.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // column-major storage
            let (row, column) = (idx % points.nrows(), idx / points.nrows());
            return Err(Error::Parse {
                row: row + 1,
                column: column + 1,
                message: "non-finite value".into(),
            });
        }
        Ok(Self { points })
    }

    /// Builds a matrix from row slices; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let d = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Parse {
                    row: i + 1,
                    column: r.len().min(d) + 1,
                    message: format!("expected {d} fields, found {}", r.len()),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn d(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.points.row(i).into_iter().copied().collect::<Vec<_>>().into_iter()
    }

    /// Squared Euclidean distance between point `i` and an arbitrary vector.
    pub fn sq_dist_to(&self, i: usize, c: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (j, cj) in c.iter().enumerate() {
            let t = self.points[(i, j)] - cj;
            acc += t * t;
        }
        acc
    }

    /// Copy of the data translated so the column means are zero. The sum of
    /// squares objective is translation invariant; the centered Gram matrix
    /// is much better conditioned for the relaxation.
    pub fn centered(&self) -> Self {
        let mut points = self.points.clone();
        for mut col in points.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        Self { points }
    }

    /// Sum of the rows belonging to each group, one output row per group.
    pub fn group_sums(&self, groups: &[Vec<usize>]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(groups.len(), self.d());
        for (r, g) in groups.iter().enumerate() {
            for &p in g {
                for j in 0..self.d() {
                    out[(r, j)] += self.points[(p, j)];
                }
            }
        }
        out
    }
}

/// `W = P P^T` together with its trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub w: DMatrix<f64>,
    pub trace_w: f64,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.w.nrows()
    }
}

/// Parameters of the Gaussian mixture generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub k: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidK { k: self.k, n: self.n });
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Instance name in the `{n}_{k}_{sigma}` convention.
    pub fn name(&self) -> String {
        format!("{}_{}_{}", self.n, self.k, self.sigma)
    }
}

/// Zero-based cluster labels for each of the `n` points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl Assignment {
    /// Validates that every label is below `k` and every cluster is used.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        let a = Self { labels, k };
        a.check()?;
        Ok(a)
    }

    pub fn check(&self) -> Result<()> {
        let mut seen = vec![false; self.k];
        for &l in &self.labels {
            if l >= self.k {
                return Err(Error::IndexOutOfRange {
                    index: l,
                    dim: self.k,
                });
            }
            seen[l] = true;
        }
        match seen.iter().position(|s| !s) {
            Some(c) => Err(Error::EmptyCluster(c)),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Members of each cluster, in ascending point order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Relabels clusters by first appearance so equal partitions compare equal.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Self { labels, k: self.k }
    }
}

/// Reads a headerless, comma separated file of numeric rows.
pub fn load_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file)
}

/// Same as [`load_csv`] for any reader.
pub fn read_csv(reader: impl std::io::Read) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            row: i + 1,
            column: 0,
            message: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut row = Vec::with_capacity(rec.len());
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row: rows.len() + 1,
                column: j + 1,
                message: format!("not a number: {field:?}"),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    DataMatrix::from_rows(&rows)
}

/// Writes points as headerless CSV with full round-trip precision.
pub fn write_csv(data: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = String::new();
    for i in 0..data.n() {
        let fields: Vec<String> = data.row(i).map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(io_err)
}

/// Gram matrix of the rows, exactly symmetric.
pub fn gram(data: &DataMatrix) -> GramMatrix {
    let p = data.points();
    let mut w = p * p.transpose();
    // the product is symmetric in exact arithmetic; make it so bitwise
    let n = w.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = w[(i, j)];
            w[(j, i)] = v;
        }
    }
    let trace_w = w.trace();
    GramMatrix { w, trace_w }
}

/// Within-cluster sum of squared distances to the cluster means.
pub fn mssc_objective(data: &DataMatrix, a: &Assignment) -> Result<f64> {
    if a.n() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            found: a.n(),
        });
    }
    a.check()?;
    let centroids = cluster_means(data, a);
    Ok((0..data.n())
        .map(|i| data.sq_dist_to(i, &centroids[a.labels[i]]))
        .sum())
}

/// Mean of each cluster's points. Empty clusters get a zero vector.
pub fn cluster_means(data: &DataMatrix, a: &Assignment) -> Vec<Vec<f64>> {
    let d = data.d();
    let mut sums = vec![vec![0.0; d]; a.k];
    let mut counts = vec![0usize; a.k];
    for (i, &l) in a.labels.iter().enumerate() {
        counts[l] += 1;
        for j in 0..d {
            sums[l][j] += data.points()[(i, j)];
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            s.iter_mut().for_each(|v| *v /= c as f64);
        }
    }
    sums
}

/// The clustering matrix `sum_j 1/|C_j| 1_{C_j} 1_{C_j}^T` of a partition.
pub fn clustering_matrix(a: &Assignment) -> DMatrix<f64> {
    let n = a.n();
    let mut sizes = vec![0usize; a.k];
    for &l in &a.labels {
        sizes[l] += 1;
    }
    DMatrix::from_fn(n, n, |i, j| {
        if a.labels[i] == a.labels[j] {
            1.0 / sizes[a.labels[i]] as f64
        } else {
            0.0
        }
    })
}

/// Samples `n` points in the plane from `k` spherical Gaussians with equal
/// mixing proportions. Centers are uniform in `[-(n/1000) - k, n/1000 + k]`
/// per coordinate; point `i` belongs to component `i mod k`.
pub fn generate_gaussian(spec: &SyntheticSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let half = spec.n as f64 / 1000.0 + spec.k as f64;
    let centers: Vec<[f64; 2]> = (0..spec.k)
        .map(|_| [rng.random_range(-half..=half), rng.random_range(-half..=half)])
        .collect();
    let noise = Normal::new(0.0, spec.sigma).expect("sigma validated");
    let points = DMatrix::from_fn(spec.n, 2, |_, _| 0.0);
    let mut points = points;
    for i in 0..spec.n {
        let c = centers[i % spec.k];
        points[(i, 0)] = c[0] + noise.sample(&mut rng);
        points[(i, 1)] = c[1] + noise.sample(&mut rng);
    }
    DataMatrix::new(points)
}
