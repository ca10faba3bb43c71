use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Parameter storage precision. Training keeps `f32` parameters; gradient
/// checks run the same code over `f64` shadows.
pub trait Real: Copy + Send + Sync + PartialEq + std::fmt::Debug + 'static {
    fn to_f64(self) -> f64;
    fn from_f64(v: f64) -> Self;
}

impl Real for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_f64(v: f64) -> Self {
        v as f32
    }
}

impl Real for f64 {
    fn to_f64(self) -> f64 {
        self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::from_f64(0.0); n * n];
        for i in 0..n {
            data[i * n + i] = T::from_f64(1.0);
        }
        Self { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }
}

/// Which encoder tower a text goes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tower {
    Document,
    Summary,
}

/// One encoder tower: token embeddings, learned position-pooling logits
/// and a square output projection.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerParams<T> {
    /// `vocab_size × dim`
    pub embedding: Matrix<T>,
    /// `dim × dim`
    pub projection: Matrix<T>,
    /// Pooling logit per token position. Positions past the end share the
    /// last logit.
    pub position_logits: Vec<T>,
}

impl<T: Real> TowerParams<T> {
    fn map<U: Real>(&self, f: impl Fn(T) -> U + Copy) -> TowerParams<U> {
        TowerParams {
            embedding: self.embedding.map(f),
            projection: self.projection.map(f),
            position_logits: self.position_logits.iter().map(|v| f(*v)).collect(),
        }
    }
}

/// Dual-encoder parameters. With `shared_towers` a single tower serves
/// documents and summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet<T> {
    dim: usize,
    shared_towers: bool,
    towers: Vec<TowerParams<T>>,
}

/// Parameters as trained and checkpointed.
pub type EncoderParams = ParamSet<f32>;

/// Default number of learned pooling positions (the document length cap).
pub const DEFAULT_POSITIONS: usize = crate::textproc::DEFAULT_MAX_DOC_LEN;

/// Half-width of the uniform embedding initialisation.
pub const INIT_SCALE: f64 = 0.05;

impl<T: Real> ParamSet<T> {
    pub fn from_towers(dim: usize, shared_towers: bool, towers: Vec<TowerParams<T>>) -> Result<Self> {
        let expected = if shared_towers { 1 } else { 2 };
        if towers.len() != expected {
            return Err(Error::Invalid(format!(
                "expected {expected} tower(s), got {}",
                towers.len()
            )));
        }
        if dim < 2 {
            return Err(Error::Invalid(format!("dim must be at least 2, got {dim}")));
        }
        let vocab = towers[0].embedding.rows();
        for t in &towers {
            if t.embedding.cols() != dim || t.embedding.rows() != vocab {
                return Err(Error::Invalid("embedding table shape mismatch".into()));
            }
            if t.projection.rows() != dim || t.projection.cols() != dim {
                return Err(Error::Invalid("projection shape mismatch".into()));
            }
            if t.position_logits.is_empty() {
                return Err(Error::Invalid("position logits must be non-empty".into()));
            }
            let finite = t
                .embedding
                .as_slice()
                .iter()
                .chain(t.projection.as_slice())
                .chain(&t.position_logits)
                .all(|v| v.to_f64().is_finite());
            if !finite {
                return Err(Error::Invalid("parameters contain non-finite values".into()));
            }
        }
        Ok(Self {
            dim,
            shared_towers,
            towers,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.towers[0].embedding.rows()
    }

    pub fn shared_towers(&self) -> bool {
        self.shared_towers
    }

    pub fn positions(&self) -> usize {
        self.towers[0].position_logits.len()
    }

    pub fn towers(&self) -> &[TowerParams<T>] {
        &self.towers
    }

    pub fn towers_mut(&mut self) -> &mut [TowerParams<T>] {
        &mut self.towers
    }

    /// Index into [`Self::towers`] used for `tower`.
    pub fn tower_index(&self, tower: Tower) -> usize {
        match (self.shared_towers, tower) {
            (true, _) | (false, Tower::Document) => 0,
            (false, Tower::Summary) => 1,
        }
    }

    pub fn tower(&self, tower: Tower) -> &TowerParams<T> {
        &self.towers[self.tower_index(tower)]
    }

    pub fn parameter_count(&self) -> usize {
        self.towers
            .iter()
            .map(|t| t.embedding.as_slice().len() + t.projection.as_slice().len() + t.position_logits.len())
            .sum()
    }

    pub fn to_f64(&self) -> ParamSet<f64> {
        ParamSet {
            dim: self.dim,
            shared_towers: self.shared_towers,
            towers: self.towers.iter().map(|t| t.map(T::to_f64)).collect(),
        }
    }
}

impl ParamSet<f64> {
    pub fn to_f32(&self) -> EncoderParams {
        ParamSet {
            dim: self.dim,
            shared_towers: self.shared_towers,
            towers: self.towers.iter().map(|t| t.map(|v| v as f32)).collect(),
        }
    }
}

/// Fresh parameters with [`DEFAULT_POSITIONS`] pooling positions.
pub fn init_params(vocab_size: usize, dim: usize, seed: u64, shared_towers: bool) -> Result<EncoderParams> {
    init_params_with_positions(vocab_size, dim, DEFAULT_POSITIONS, seed, shared_towers)
}

/// Embeddings uniform in `[-INIT_SCALE, INIT_SCALE]`, identity projections
/// and zero position logits (so pooling starts as a plain mean).
pub fn init_params_with_positions(
    vocab_size: usize,
    dim: usize,
    positions: usize,
    seed: u64,
    shared_towers: bool,
) -> Result<EncoderParams> {
    if vocab_size < 3 {
        return Err(Error::Config(format!("vocab_size must be at least 3, got {vocab_size}")));
    }
    if dim < 2 {
        return Err(Error::Config(format!("dim must be at least 2, got {dim}")));
    }
    if positions < 1 {
        return Err(Error::Config("positions must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    let n_towers = if shared_towers { 1 } else { 2 };
    let towers = (0..n_towers)
        .map(|_| {
            let data = (0..vocab_size * dim)
                .map(|_| rng.uniform(-INIT_SCALE, INIT_SCALE) as f32)
                .collect();
            TowerParams {
                embedding: Matrix::from_vec(vocab_size, dim, data).expect("shape is consistent"),
                projection: Matrix::identity(dim),
                position_logits: vec![0.0; positions],
            }
        })
        .collect();
    ParamSet::from_towers(dim, shared_towers, towers)
}
