//! Database model: sampling under both hypotheses, row normalization
//! and the score table of pairwise cosine similarities.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Which hypothesis a database pair was drawn under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Independent databases.
    H0,
    /// Row-permuted correlated databases.
    H1,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hypothesis::H0 => write!(f, "H0"),
            Hypothesis::H1 => write!(f, "H1"),
        }
    }
}

/// A permutation of {0, .., n-1} (0-based internally; user-facing files
/// are 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Validates that `map` is a bijection on {0, .., n-1}.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::param("sigma", "not a bijection on {1..n}"));
            }
            seen[v] = true;
        }
        Ok(Permutation(map))
    }

    /// Uniformly random permutation via an unbiased Fisher-Yates
    /// shuffle; deterministic given the seed.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            map.swap(i, j);
        }
        Permutation(map)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Image of `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// Dense row-major matrix; just enough linear algebra for this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::param("matrix", "ragged rows"));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Model parameters: database shape, correlation coefficient, and the
/// row permutation used under the alternate hypothesis.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub n: usize,
    pub d: usize,
    pub rho: f64,
    sigma: Option<Permutation>,
}

impl ModelParams {
    pub fn new(n: usize, d: usize, rho: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("n", "must be >= 1"));
        }
        if d < 1 {
            return Err(Error::param("d", "must be >= 1"));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::param("rho", format!("must be in (0,1), got {rho}")));
        }
        Ok(ModelParams {
            n,
            d,
            rho,
            sigma: None,
        })
    }

    /// Replace the default identity permutation.
    pub fn with_sigma(mut self, sigma: Permutation) -> Result<Self> {
        if sigma.len() != self.n {
            return Err(Error::param("sigma", "length must equal n"));
        }
        self.sigma = Some(sigma);
        Ok(self)
    }

    /// The permutation in effect (identity unless one was supplied).
    pub fn sigma(&self) -> Permutation {
        self.sigma
            .clone()
            .unwrap_or_else(|| Permutation::identity(self.n))
    }
}

/// What is known about how a pair was generated.
#[derive(Debug, Clone)]
pub enum GroundTruth {
    Independent,
    Correlated { sigma: Permutation },
}

impl GroundTruth {
    pub fn hypothesis(&self) -> Hypothesis {
        match self {
            GroundTruth::Independent => Hypothesis::H0,
            GroundTruth::Correlated { .. } => Hypothesis::H1,
        }
    }
}

/// Two databases of identical shape, with optional ground truth.
#[derive(Debug, Clone)]
pub struct DatabasePair {
    pub x: Matrix,
    pub y: Matrix,
    pub truth: Option<GroundTruth>,
}

impl DatabasePair {
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }
}

fn fill_gaussian(rng: &mut ChaCha12Rng, row: &mut [f64]) {
    for v in row.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

/// Sample a pair under the null hypothesis: all 2n rows i.i.d. standard
/// Gaussian in d dimensions. Deterministic given the seed.
pub fn sample_h0(params: &ModelParams, seed: u64) -> DatabasePair {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut x = Matrix::zeros(params.n, params.d);
    let mut y = Matrix::zeros(params.n, params.d);
    for i in 0..params.n {
        fill_gaussian(&mut rng, x.row_mut(i));
    }
    for i in 0..params.n {
        fill_gaussian(&mut rng, y.row_mut(i));
    }
    DatabasePair {
        x,
        y,
        truth: Some(GroundTruth::Independent),
    }
}

/// Sample a pair under the alternate hypothesis: the partner of row i of
/// X is stored at row sigma(i) of Y and equals
/// `rho * X_i + sqrt(1 - rho^2) * Z_i` with Z_i fresh standard Gaussian,
/// so every marginal stays standard normal. Deterministic given the seed.
pub fn sample_h1(params: &ModelParams, seed: u64) -> DatabasePair {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let sigma = params.sigma();
    let scale = (1.0 - params.rho * params.rho).sqrt();
    let mut x = Matrix::zeros(params.n, params.d);
    let mut y = Matrix::zeros(params.n, params.d);
    for i in 0..params.n {
        fill_gaussian(&mut rng, x.row_mut(i));
    }
    let mut z = vec![0.0; params.d];
    for i in 0..params.n {
        fill_gaussian(&mut rng, &mut z);
        let yi = y.row_mut(sigma.apply(i));
        for (k, v) in yi.iter_mut().enumerate() {
            *v = params.rho * x.row(i)[k] + scale * z[k];
        }
    }
    DatabasePair {
        x,
        y,
        truth: Some(GroundTruth::Correlated { sigma }),
    }
}

/// The n x n table of cosine similarities between normalized rows.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    n: usize,
    s: Vec<f64>,
}

impl ScoreTable {
    pub fn from_entries(n: usize, s: Vec<f64>) -> Result<Self> {
        if s.len() != n * n {
            return Err(Error::param("score table", "entry count must be n*n"));
        }
        Ok(ScoreTable { n, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.s
    }
}

/// Compute the score table `s_ij = (X_i / |X_i|) . (Y_j / |Y_j|)`.
///
/// Invariant to positive rescaling of any row. A zero-norm row cannot be
/// normalized and is reported as degenerate input.
pub fn score_table(db: &DatabasePair) -> Result<ScoreTable> {
    let n = db.n();
    if db.y.rows() != n || db.y.cols() != db.x.cols() {
        return Err(Error::param("database pair", "x and y shapes differ"));
    }
    let norm_of = |m: &Matrix, label: &str| -> Result<Vec<f64>> {
        (0..n)
            .map(|i| {
                let v = norm(m.row(i));
                if v == 0.0 || !v.is_finite() {
                    Err(Error::DegenerateInput(format!(
                        "row {} of {label} has norm {v}",
                        i + 1
                    )))
                } else {
                    Ok(v)
                }
            })
            .collect()
    };
    let nx = norm_of(&db.x, "x")?;
    let ny = norm_of(&db.y, "y")?;
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        let xi = db.x.row(i);
        for j in 0..n {
            s[i * n + j] = dot(xi, db.y.row(j)) / (nx[i] * ny[j]);
        }
    }
    Ok(ScoreTable { n, s })
}
