//! Seeded random sampling: per-stream generators, Wishart correlation
//! draws, multivariate normal data, and uniform K-block partitions.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::linalg::{cholesky, Matrix};
use super::DataMatrix;
use crate::error::{Error, Result};
use crate::lattice::{stirling2, Partition};

/// Deterministic random stream keyed by `(seed, stream)`.
///
/// Streams with the same seed and different ids are independent ChaCha8
/// keystreams, so each task can own one without coordinating with others.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

pub fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Gamma(shape, 1) draw.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    let dist = Gamma::new(shape, 1.0).map_err(|_| Error::OutOfRange {
        what: "gamma shape",
        value: shape.to_string(),
        range: "> 0",
    })?;
    Ok(dist.sample(rng))
}

/// Chi-squared draw with `df` degrees of freedom.
fn sample_chi2<R: Rng + ?Sized>(df: f64, rng: &mut R) -> f64 {
    2.0 * Gamma::new(df / 2.0, 1.0)
        .expect("positive shape")
        .sample(rng)
}

/// Draws `W ~ Wishart(I, dim + 1)` by the Bartlett construction and rescales
/// it to unit diagonal.
///
/// With `dim + 1` degrees of freedom each off-diagonal correlation is
/// marginally uniform on `(-1, 1)`.
pub fn sample_wishart_correlation<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    assert!(dim >= 1, "Wishart dimension must be positive");
    if dim == 1 {
        return Matrix::identity(1);
    }
    let df = (dim + 1) as f64;
    let mut a = Matrix::zeros(dim);
    for i in 0..dim {
        a[(i, i)] = sample_chi2(df - i as f64, rng).sqrt();
        for j in 0..i {
            a[(i, j)] = sample_standard_normal(rng);
        }
    }
    let mut w = Matrix::zeros(dim);
    for i in 0..dim {
        for j in 0..=i {
            let v: f64 = (0..=j).map(|k| a[(i, k)] * a[(j, k)]).sum();
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let scale: Vec<f64> = (0..dim).map(|i| w[(i, i)].sqrt().recip()).collect();
    let mut r = Matrix::identity(dim);
    for i in 0..dim {
        for j in 0..i {
            let v = (w[(i, j)] * scale[i] * scale[j]).clamp(-1.0, 1.0);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

/// `k` i.i.d. rows from `N(0, covariance)`.
pub fn sample_mvn<R: Rng + ?Sized>(covariance: &Matrix, k: usize, rng: &mut R) -> Result<DataMatrix> {
    let n = covariance.dim();
    let l = cholesky(covariance)?;
    let mut values = Vec::with_capacity(k * n);
    let mut z = vec![0.0; n];
    for _ in 0..k {
        for zi in z.iter_mut() {
            *zi = sample_standard_normal(rng);
        }
        for i in 0..n {
            let v: f64 = (0..=i).map(|j| l[(i, j)] * z[j]).sum();
            values.push(v);
        }
    }
    DataMatrix::new(k, n, values)
}

/// A partition of `{1..n}` with exactly `blocks` blocks, uniform over all
/// `S(n, blocks)` of them.
///
/// Element `m` either opens its own block (weight `S(m-1, j-1)`) or joins
/// one of the `j` blocks of the first `m - 1` elements (weight
/// `j·S(m-1, j)`). Decisions are drawn from the last element down and
/// replayed forward.
pub fn random_partition_with_k_blocks<R: Rng + ?Sized>(
    n: usize,
    blocks: usize,
    rng: &mut R,
) -> Result<Partition> {
    if n == 0 || blocks == 0 || blocks > n {
        return Err(Error::OutOfRange {
            what: "block count",
            value: format!("{blocks} for n = {n}"),
            range: "1..=n",
        });
    }
    enum Step {
        Open,
        Join(u32),
    }
    let mut steps = Vec::with_capacity(n);
    let mut j = blocks;
    for m in (1..=n).rev() {
        let total = stirling2(m, j)?;
        let open = stirling2(m - 1, j - 1)?;
        let r = rng.random_range(0..total);
        if r < open {
            steps.push(Step::Open);
            j -= 1;
        } else {
            let per_block = stirling2(m - 1, j)?;
            steps.push(Step::Join(((r - open) / per_block) as u32));
        }
    }
    let mut rgs = Vec::with_capacity(n);
    let mut opened = 0u32;
    for step in steps.into_iter().rev() {
        match step {
            Step::Open => {
                rgs.push(opened);
                opened += 1;
            }
            Step::Join(b) => rgs.push(b),
        }
    }
    Partition::from_rgs(rgs)
}
