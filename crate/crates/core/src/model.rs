//! Jointly sparse signals, the shared Gaussian measurement matrix, additive
//! noise and 1-bit quantization.

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{dim_err, param_err, Error, Result};

/// N×P signal matrix. Column `p` is the signal seen by sensor `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    data: Array2<f64>,
}

impl SignalMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(dim_err("signal matrix must be non-empty"));
        }
        Ok(Self { data })
    }

    pub fn zeros(n: usize, p: usize) -> Self {
        Self { data: Array2::zeros((n, p)) }
    }

    /// Signal dimension N.
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    /// Number of sensors P.
    pub fn p(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.data
    }

    /// Rows holding at least one nonzero entry.
    pub fn row_support(&self) -> SupportSet {
        let indices = self
            .data
            .axis_iter(Axis(0))
            .enumerate()
            .filter(|(_, row)| row.iter().any(|&v| v != 0.0))
            .map(|(i, _)| i)
            .collect();
        SupportSet { indices }
    }
}

/// M×N measurement matrix shared by every sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    data: Array2<f64>,
}

impl MeasurementMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(dim_err("measurement matrix must be non-empty"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("measurement matrix has non-finite entries".into()));
        }
        if data.nrows() >= data.ncols() {
            log::warn!(
                "measurement matrix is not compressive: M = {} >= N = {}",
                data.nrows(),
                data.ncols()
            );
        }
        Ok(Self { data })
    }

    /// Measurements per sensor M.
    pub fn m(&self) -> usize {
        self.data.nrows()
    }

    /// Signal dimension N.
    pub fn n(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }
}

/// I.i.d. zero-mean Gaussian measurement noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma_v: f64,
}

impl NoiseModel {
    pub fn new(sigma_v: f64) -> Result<Self> {
        if !(sigma_v > 0.0 && sigma_v.is_finite()) {
            return Err(param_err(format!("noise standard deviation must be positive, got {sigma_v}")));
        }
        Ok(Self { sigma_v })
    }

    pub fn from_variance(variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(param_err(format!("noise variance must be positive, got {variance}")));
        }
        Self::new(variance.sqrt())
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }
}

/// M×P matrix of quantized measurements, entries exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    data: Array2<u8>,
}

impl BitMatrix {
    pub fn new(data: Array2<u8>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(dim_err("bit matrix must be non-empty"));
        }
        if let Some(bad) = data.iter().find(|&&b| b > 1) {
            return Err(Error::Data(format!("bit matrix entries must be 0 or 1, found {bad}")));
        }
        Ok(Self { data })
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<u8> {
        &self.data
    }

    pub fn view(&self) -> ArrayView2<'_, u8> {
        self.data.view()
    }

    /// The bits of a single sensor as an M×1 matrix.
    pub fn column(&self, p: usize) -> Result<BitMatrix> {
        if p >= self.cols() {
            return Err(dim_err(format!("column {p} out of range for {} sensors", self.cols())));
        }
        let col = self.data.column(p).to_owned().insert_axis(Axis(1));
        Ok(BitMatrix { data: col })
    }
}

/// Strictly increasing set of row indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Builds a support from arbitrary-order indices bounded by `n`.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Data("support set contains duplicate indices".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(dim_err(format!("support index {last} out of range for N = {n}")));
            }
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn intersection_len(&self, other: &SupportSet) -> usize {
        self.indices.iter().filter(|&&i| other.contains(i)).count()
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }
}

/// Draws an N×P matrix whose `k` nonzero rows are chosen uniformly without
/// replacement. Every nonzero entry is ±1 with equal probability.
pub fn generate_signal_matrix<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    k: usize,
    rng: &mut R,
) -> Result<(SignalMatrix, SupportSet)> {
    if n == 0 || p == 0 || k == 0 {
        return Err(dim_err(format!("sizes must be positive: n = {n}, p = {p}, k = {k}")));
    }
    if k > n {
        return Err(dim_err(format!("sparsity k = {k} exceeds dimension n = {n}")));
    }
    let mut rows = index::sample(rng, n, k).into_vec();
    rows.sort_unstable();

    let mut data = Array2::zeros((n, p));
    for &i in &rows {
        for j in 0..p {
            data[[i, j]] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
    }
    Ok((SignalMatrix { data }, SupportSet::from_sorted_unchecked(rows)))
}

/// Draws an M×N matrix with i.i.d. N(0, `variance`) entries, row by row.
pub fn generate_measurement_matrix<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    variance: f64,
    rng: &mut R,
) -> Result<MeasurementMatrix> {
    if m == 0 || n == 0 {
        return Err(dim_err(format!("sizes must be positive: m = {m}, n = {n}")));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(param_err(format!("variance must be positive, got {variance}")));
    }
    let sd = variance.sqrt();
    let data = Array2::from_shape_simple_fn((m, n), || sd * rng.sample::<f64, _>(StandardNormal));
    MeasurementMatrix::new(data)
}

/// Noiseless projections X = ΦS.
pub fn project(phi: &MeasurementMatrix, s: &SignalMatrix) -> Result<Array2<f64>> {
    if phi.n() != s.n() {
        return Err(dim_err(format!(
            "measurement matrix has {} columns but signal dimension is {}",
            phi.n(),
            s.n()
        )));
    }
    Ok(phi.data.dot(&s.data))
}

/// Y = ΦS + V with V i.i.d. N(0, σ_v²). Noise is drawn sensor by sensor.
pub fn sense<R: Rng + ?Sized>(
    phi: &MeasurementMatrix,
    s: &SignalMatrix,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let mut y = project(phi, s)?;
    for mut col in y.axis_iter_mut(Axis(1)) {
        for v in col.iter_mut() {
            *v += noise.sigma_v * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(y)
}

/// Keeps the sign of each measurement: 1 for y ≥ 0, 0 for y < 0.
pub fn quantize(y: ArrayView2<'_, f64>) -> Result<BitMatrix> {
    if y.iter().any(|v| v.is_nan()) {
        return Err(Error::Data("cannot quantize NaN measurements".into()));
    }
    BitMatrix::new(y.mapv(|v| u8::from(v >= 0.0)))
}

/// Per-sensor SNR in dB, 10·log10(k·σ_Φ² / σ_v²).
pub fn compute_snr(k: usize, phi_variance: f64, sigma_v: f64) -> Result<f64> {
    if k == 0 || !(phi_variance > 0.0) || !(sigma_v > 0.0) {
        return Err(param_err("snr inputs must be positive"));
    }
    Ok(10.0 * (k as f64 * phi_variance / (sigma_v * sigma_v)).log10())
}
