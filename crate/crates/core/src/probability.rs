//! Uniform, Langevin and Langevin–Gaussian distributions on `Graff(k, n)`.
//!
//! The uniform measure is the restriction of the invariant measure of
//! `Gr(k+1, n+1)`; the Langevin density is `exp(tr(S P))` in projection
//! coordinates, normalized by a matrix-argument ₁F₁ that we estimate by Monte
//! Carlo as `E_uniform[exp(tr(S P))]`. Langevin samples come from a
//! Metropolis–Hastings chain with geodesic proposals.

use nalgebra::{DMatrix, DVector, QR};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::coords::{projection_coords, unembed, AffineFlat};
use crate::error::{dim_err, GraffError, Result};
use crate::linalg::thin_svd;

const MAX_UNIFORM_ATTEMPTS: usize = 100;

/// Seedable generator threaded explicitly through every sampler.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha20Rng);

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream(ChaCha20Rng::seed_from_u64(seed))
    }

    /// Independent stream for shard `shard` of a run seeded with `seed`.
    pub fn derived(seed: u64, shard: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        RandomStream(rng)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn normal_matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| self.standard_normal())
    }

    pub fn normal_vector(&mut self, len: usize) -> DVector<f64> {
        DVector::from_fn(len, |_, _| self.standard_normal())
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Orthonormal m×p frame of a uniformly distributed p-plane in R^m.
pub fn uniform_frame(p: usize, m: usize, rng: &mut RandomStream) -> DMatrix<f64> {
    if p == 0 {
        return DMatrix::zeros(m, 0);
    }
    QR::new(rng.normal_matrix(m, p)).q()
}

/// Uniformly distributed k-flat in R^n.
pub fn sample_uniform(k: usize, n: usize, rng: &mut RandomStream) -> Result<AffineFlat> {
    if k >= n {
        return Err(dim_err(format!(
            "Graff(k, n) needs k < n, got k = {k}, n = {n}"
        )));
    }
    for _ in 0..MAX_UNIFORM_ATTEMPTS {
        match unembed(&rng.normal_matrix(n + 1, k + 1)) {
            Ok(flat) => return Ok(flat),
            Err(GraffError::NotAFlat { .. }) | Err(GraffError::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraffError::Internal(format!(
        "no flat after {MAX_UNIFORM_ATTEMPTS} uniform draws"
    )))
}

/// `tr(S P)` for symmetric `P`, as an entrywise sum.
fn trace_product(s: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    s.component_mul(p).sum()
}

fn symmetrized(s: &DMatrix<f64>) -> DMatrix<f64> {
    (s + s.transpose()) * 0.5
}

/// Splits `S` into `c I + (S − c I)` so that `tr(S P) = c·rank + tr((S − cI) P)`.
fn isotropic_split(s: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let m = s.nrows();
    if m == 0 {
        return (0.0, s.clone());
    }
    let d0 = s[(0, 0)];
    let c = if (0..m).all(|i| s[(i, i)] == d0) {
        d0
    } else {
        s.trace() / m as f64
    };
    let mut rest = s.clone();
    for i in 0..m {
        rest[(i, i)] -= c;
    }
    (c, rest)
}

/// Parameters of the Langevin distribution on `Graff(k, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LangevinParams {
    s: DMatrix<f64>,
    k: usize,
    n: usize,
}

impl LangevinParams {
    /// `s` is (n+1)×(n+1); only its symmetric part matters and is kept.
    pub fn new(s: DMatrix<f64>, k: usize) -> Result<Self> {
        let (rows, cols) = s.shape();
        if rows != cols || rows < 2 {
            return Err(dim_err(format!(
                "S must be square of size n+1 ≥ 2, got {rows}×{cols}"
            )));
        }
        let n = rows - 1;
        if k >= n {
            return Err(dim_err(format!(
                "Graff(k, n) needs k < n, got k = {k}, n = {n}"
            )));
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(GraffError::InvalidParameter(
                "S has non-finite entries".into(),
            ));
        }
        Ok(LangevinParams {
            s: symmetrized(&s),
            k,
            n,
        })
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `tr(S P_F)`, the log-density up to its normalizer.
pub fn langevin_log_density_unnormalized(
    flat: &AffineFlat,
    params: &LangevinParams,
) -> Result<f64> {
    if flat.ambient_dim() != params.n || flat.dim() != params.k {
        return Err(dim_err(format!(
            "flat in Graff({}, {}) but parameters for Graff({}, {})",
            flat.dim(),
            flat.ambient_dim(),
            params.k,
            params.n
        )));
    }
    Ok(trace_product(&params.s, projection_coords(flat).matrix()))
}

/// Monte Carlo estimate of `E[exp(tr(S P))]` with `P` the projection onto a
/// uniform p-plane, drawn by `draw`. The isotropic part of `S` is factored
/// out exactly, so `S = cI` gives zero variance.
fn normalizer_estimate(
    s: &DMatrix<f64>,
    rank: usize,
    n_samples: usize,
    rng: &mut RandomStream,
    mut draw: impl FnMut(&mut RandomStream) -> Result<DMatrix<f64>>,
) -> Result<Estimate> {
    if n_samples < 100 {
        return Err(GraffError::InvalidParameter(format!(
            "need at least 100 samples, got {n_samples}"
        )));
    }
    let (c, rest) = isotropic_split(s);
    let scale = (c * rank as f64).exp();
    let isotropic = rest.iter().all(|&x| x == 0.0);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let w = if isotropic {
            1.0
        } else {
            let p = draw(rng)?;
            trace_product(&rest, &p).exp()
        };
        sum += w;
        sum_sq += w * w;
    }
    let count = n_samples as f64;
    let mean = sum / count;
    let var = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
    Ok(Estimate {
        estimate: scale * mean,
        std_error: scale * (var / count).sqrt(),
    })
}

/// Monte Carlo estimate of the Langevin normalizer `₁F₁(½(k+1); ½(n+1); S)`.
pub fn langevin_normalizer(
    params: &LangevinParams,
    n_samples: usize,
    rng: &mut RandomStream,
) -> Result<Estimate> {
    let (k, n) = (params.k, params.n);
    normalizer_estimate(&params.s, k + 1, n_samples, rng, |rng| {
        Ok(projection_coords(&sample_uniform(k, n, rng)?).into_inner())
    })
}

/// Metropolis–Hastings settings. `step_size` is the standard deviation, in
/// radians, of each entry of the Gaussian tangent proposal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhConfig {
    pub step_size: f64,
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig {
            step_size: 0.1,
            burn_in: 1000,
            thin: 10,
        }
    }
}

impl MhConfig {
    fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(GraffError::InvalidParameter(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if self.thin == 0 {
            return Err(GraffError::InvalidParameter(
                "thinning interval must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Random-walk chain on p-planes of R^m targeting `exp(tr(Yᵀ S Y))`.
///
/// Proposals move along the geodesic `Y V cos Σ Vᵀ + W sin Σ Vᵀ` of a
/// Gaussian horizontal tangent `H = W Σ Vᵀ`. The proposal kernel is
/// symmetric, so the acceptance ratio is the density ratio alone.
#[derive(Debug, Clone)]
struct GrassmannChain {
    s: DMatrix<f64>,
    frame: DMatrix<f64>,
    log_target: f64,
    step_size: f64,
    affine_chart: bool,
    proposed: usize,
    accepted: usize,
}

impl GrassmannChain {
    fn new(s: DMatrix<f64>, frame: DMatrix<f64>, step_size: f64, affine_chart: bool) -> Self {
        let log_target = trace_product(&s, &(&frame * frame.transpose()));
        GrassmannChain {
            s,
            frame,
            log_target,
            step_size,
            affine_chart,
            proposed: 0,
            accepted: 0,
        }
    }

    fn step(&mut self, rng: &mut RandomStream) {
        self.proposed += 1;
        let (m, p) = self.frame.shape();
        if p == 0 || p == m {
            self.accepted += 1;
            return;
        }
        let z = rng.normal_matrix(m, p) * self.step_size;
        let tangent = &z - &self.frame * (self.frame.transpose() * &z);
        let svd = thin_svd(&tangent);
        let vt = svd.v.transpose();
        let cos = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                svd.singular_values[i].cos()
            } else {
                0.0
            }
        });
        let sin = DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                svd.singular_values[i].sin()
            } else {
                0.0
            }
        });
        let moved = &self.frame * &svd.v * cos * &vt + &svd.u * sin * &vt;
        let candidate = QR::new(moved).q();
        if self.affine_chart && candidate.row(m - 1).norm() < crate::tolerance::default_tolerance()
        {
            return;
        }
        let log_target = trace_product(&self.s, &(&candidate * candidate.transpose()));
        let delta = log_target - self.log_target;
        if delta >= 0.0 || rng.uniform().ln() < delta {
            self.frame = candidate;
            self.log_target = log_target;
            self.accepted += 1;
        }
    }

    fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.proposed as f64
    }
}

/// Stateful Langevin sampler: burn-in once, then one draw every `thin` steps.
#[derive(Debug, Clone)]
pub struct LangevinSampler {
    chain: GrassmannChain,
    config: MhConfig,
    burned_in: bool,
}

impl LangevinSampler {
    /// Start from a uniform draw.
    pub fn new(params: &LangevinParams, config: MhConfig, rng: &mut RandomStream) -> Result<Self> {
        config.validate()?;
        let start = sample_uniform(params.k, params.n, rng)?;
        let frame = crate::coords::stiefel_coords(&start).into_inner();
        Ok(LangevinSampler {
            chain: GrassmannChain::new(params.s.clone(), frame, config.step_size, true),
            config,
            burned_in: false,
        })
    }

    /// Advance the chain by `steps` proposals.
    pub fn advance(&mut self, steps: usize, rng: &mut RandomStream) {
        for _ in 0..steps {
            self.chain.step(rng);
        }
    }

    pub fn current(&self) -> Result<AffineFlat> {
        unembed(&self.chain.frame)
    }

    /// Next thinned draw (burning in first if needed).
    pub fn next_sample(&mut self, rng: &mut RandomStream) -> Result<AffineFlat> {
        if !self.burned_in {
            self.advance(self.config.burn_in, rng);
            self.burned_in = true;
        }
        self.advance(self.config.thin, rng);
        self.current()
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.chain.acceptance_rate()
    }
}

/// Final state of an `n_steps` Metropolis–Hastings run started from a
/// uniform draw.
pub fn sample_langevin(
    params: &LangevinParams,
    n_steps: usize,
    step_size: f64,
    rng: &mut RandomStream,
) -> Result<AffineFlat> {
    if n_steps == 0 {
        return Err(GraffError::InvalidParameter(
            "n_steps must be at least 1".into(),
        ));
    }
    let config = MhConfig {
        step_size,
        burn_in: 0,
        thin: 1,
    };
    let mut sampler = LangevinSampler::new(params, config, rng)?;
    sampler.advance(n_steps, rng);
    sampler.current()
}

/// Parameters of the Langevin–Gaussian distribution: Langevin on the linear
/// part (`S` is n×n, acting on `AAᵀ`) and a spherical Gaussian of variance
/// `σ²` on the displacement within the orthogonal complement.
#[derive(Debug, Clone, PartialEq)]
pub struct LangevinGaussianParams {
    s: DMatrix<f64>,
    sigma2: f64,
    k: usize,
    n: usize,
}

impl LangevinGaussianParams {
    pub fn new(s: DMatrix<f64>, sigma2: f64, k: usize) -> Result<Self> {
        let (rows, cols) = s.shape();
        if rows != cols || rows == 0 {
            return Err(dim_err(format!("S must be square n×n, got {rows}×{cols}")));
        }
        let n = rows;
        if k >= n {
            return Err(dim_err(format!(
                "Graff(k, n) needs k < n, got k = {k}, n = {n}"
            )));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(GraffError::InvalidParameter(format!(
                "σ² must be positive, got {sigma2}"
            )));
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(GraffError::InvalidParameter(
                "S has non-finite entries".into(),
            ));
        }
        Ok(LangevinGaussianParams {
            s: symmetrized(&s),
            sigma2,
            k,
            n,
        })
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Monte Carlo estimate of the normalizer of the `Gr(k, n)` Langevin factor,
/// `E[exp(tr(S AAᵀ))]` over uniform k-planes.
pub fn langevin_gaussian_normalizer(
    params: &LangevinGaussianParams,
    n_samples: usize,
    rng: &mut RandomStream,
) -> Result<Estimate> {
    let (k, n) = (params.k, params.n);
    normalizer_estimate(&params.s, k, n_samples, rng, |rng| {
        let a = uniform_frame(k, n, rng);
        Ok(&a * a.transpose())
    })
}

/// How the Langevin factor of a Langevin–Gaussian density is normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Drop the factor's normalizer.
    Unnormalized,
    /// Subtract this log-normalizer (e.g. from [`langevin_gaussian_normalizer`]).
    LogNormalizer(f64),
}

/// `tr(S AAᵀ) − ‖b0‖²/(2σ²) − ((n−k)/2) ln(2πσ²) − ln Z`.
pub fn langevin_gaussian_log_density(
    flat: &AffineFlat,
    params: &LangevinGaussianParams,
    normalization: Normalization,
) -> Result<f64> {
    if flat.ambient_dim() != params.n || flat.dim() != params.k {
        return Err(dim_err(format!(
            "flat in Graff({}, {}) but parameters for Graff({}, {})",
            flat.dim(),
            flat.ambient_dim(),
            params.k,
            params.n
        )));
    }
    let a = flat.basis();
    let langevin = trace_product(&params.s, &(a * a.transpose()));
    let free = (params.n - params.k) as f64;
    let gaussian = -flat.offset().norm_squared() / (2.0 * params.sigma2)
        - 0.5 * free * (2.0 * std::f64::consts::PI * params.sigma2).ln();
    let log_z = match normalization {
        Normalization::Unnormalized => 0.0,
        Normalization::LogNormalizer(v) => v,
    };
    Ok(langevin + gaussian - log_z)
}

/// Stateful Langevin–Gaussian sampler. The linear part comes from a
/// Metropolis–Hastings chain on `Gr(k, n)`; each displacement is a fresh
/// spherical Gaussian projected onto the orthogonal complement.
#[derive(Debug, Clone)]
pub struct LangevinGaussianSampler {
    chain: GrassmannChain,
    config: MhConfig,
    sigma: f64,
    burned_in: bool,
}

impl LangevinGaussianSampler {
    pub fn new(
        params: &LangevinGaussianParams,
        config: MhConfig,
        rng: &mut RandomStream,
    ) -> Result<Self> {
        config.validate()?;
        let frame = uniform_frame(params.k, params.n, rng);
        Ok(LangevinGaussianSampler {
            chain: GrassmannChain::new(params.s.clone(), frame, config.step_size, false),
            config,
            sigma: params.sigma2.sqrt(),
            burned_in: false,
        })
    }

    pub fn next_sample(&mut self, rng: &mut RandomStream) -> Result<AffineFlat> {
        let steps = if self.burned_in {
            self.config.thin
        } else {
            self.config.burn_in + self.config.thin
        };
        self.burned_in = true;
        for _ in 0..steps {
            self.chain.step(rng);
        }
        let a = self.chain.frame.clone();
        let z = rng.normal_vector(a.nrows()) * self.sigma;
        let mut b0 = &z - &a * (a.transpose() * &z);
        let along = &a * (a.transpose() * &b0);
        b0 -= along;
        AffineFlat::from_orthogonal(a, b0)
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.chain.acceptance_rate()
    }
}

/// One Langevin–Gaussian draw from a freshly burned-in chain.
pub fn sample_langevin_gaussian(
    params: &LangevinGaussianParams,
    config: MhConfig,
    rng: &mut RandomStream,
) -> Result<AffineFlat> {
    LangevinGaussianSampler::new(params, config, rng)?.next_sample(rng)
}
