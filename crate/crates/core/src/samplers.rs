//! Random matrices in the set of positive definite (or correlation) matrices
//! whose zero pattern is given by an undirected graph.
//!
//! Four methods are provided:
//!
//! * [`sample_diagdom`]: random entries on the edges, diagonal chosen to make
//!   the matrix strictly diagonally dominant.
//! * [`sample_port`]: Gram matrix of a random factor whose rows are
//!   orthogonalized for every non-adjacent pair.
//! * [`sample_uniform_chordal`]: uniform over the correlation matrices with
//!   the graph's zero pattern, for chordal graphs. Each row of the unit-row
//!   Cholesky factor is drawn on a hemisphere by [`mh_u`].
//! * [`sample_port_chol`]: the uniform sampler run on a triangulation, then
//!   partial orthogonalization to restore the zeros of the original graph.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{max_cardinality_search, orient_chordal, triangulate, AcyclicOrientation, Ordering, UndirectedGraph};
use crate::linalg::{
    gram, mgs_partial_orthogonalize, rescale_to_correlation, CorrelationMatrix, SymmetricMatrix, UnitRowCholeskyFactor,
    DEFAULT_RESIDUAL_TOL,
};
use crate::rng::{stream_rng, SampleRng};

/// Distribution of a scalar random variate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    Normal { mean: f64, sd: f64 },
    Uniform { low: f64, high: f64 },
}

impl Law {
    pub const STANDARD_NORMAL: Law = Law::Normal { mean: 0.0, sd: 1.0 };

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Law::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd >= 0.0,
            Law::Uniform { low, high } => low.is_finite() && high.is_finite() && low < high,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid distribution {self}")))
        }
    }

    fn has_positive_support(&self) -> bool {
        match *self {
            Law::Normal { .. } => false,
            Law::Uniform { low, high } => low >= 0.0 && high > 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Law::Normal { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
            Law::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::Normal { mean, sd } => write!(f, "normal({mean},{sd})"),
            Law::Uniform { low, high } => write!(f, "uniform({low},{high})"),
        }
    }
}

impl FromStr for Law {
    type Err = Error;

    /// Parses `normal(mean,sd)` or `uniform(low,high)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse distribution {s:?}"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let args = s[open..].strip_prefix('(').and_then(|a| a.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = args.split_once(',').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let law = match &s[..open] {
            "normal" => Law::Normal { mean: a, sd: b },
            "uniform" => Law::Uniform { low: a, high: b },
            _ => return Err(bad()),
        };
        law.validate()?;
        Ok(law)
    }
}

/// Sampler settings shared by all methods.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Standard deviation of the Metropolis proposal noise.
    pub sigma_eps: f64,
    /// Metropolis burn-in iterations.
    pub burn_in: usize,
    /// Law of the positive diagonal perturbation in [`sample_diagdom`].
    pub perturb_law: Law,
    /// Law of the initial i.i.d. entries in [`sample_diagdom`] and [`sample_port`].
    pub entry_law: Law,
    /// Relative residual below which an orthogonalized row is degenerate.
    pub residual_tol: f64,
    /// Attempts before a degenerate draw is reported as an error.
    pub max_resample: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sigma_eps: 0.5,
            burn_in: 1000,
            perturb_law: Law::Uniform { low: 0.0, high: 1.0 },
            entry_law: Law::STANDARD_NORMAL,
            residual_tol: DEFAULT_RESIDUAL_TOL,
            max_resample: 10,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_eps > 0.0) || !self.sigma_eps.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma_eps must be positive, got {}", self.sigma_eps)));
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        if self.max_resample < 1 {
            return Err(Error::InvalidParameter("max_resample must be at least 1".into()));
        }
        self.entry_law.validate()?;
        self.perturb_law.validate()?;
        if !self.perturb_law.has_positive_support() {
            return Err(Error::InvalidParameter(format!(
                "perturbation law {} must be supported on the positive half-line",
                self.perturb_law
            )));
        }
        Ok(())
    }

    /// Generator for sample `index` of a batch.
    pub fn rng_for(&self, index: u64) -> SampleRng {
        stream_rng(self.seed, index)
    }
}

/// Unit vector with strictly positive first coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct HemisphereVector(Vec<f64>);

impl HemisphereVector {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        match v.first() {
            Some(&first) if first > 0.0 && (norm - 1.0).abs() <= 1e-12 => Ok(Self(v)),
            _ => Err(Error::InvalidParameter(format!("{v:?} is not on the positive hemisphere"))),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// First coordinate.
    pub fn head(&self) -> f64 {
        self.0[0]
    }

    /// All coordinates but the first.
    pub fn tail(&self) -> &[f64] {
        &self.0[1..]
    }

    /// Dimension of the hemisphere, one less than the vector length.
    pub fn alpha(&self) -> usize {
        self.0.len() - 1
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    n
}

/// Metropolis sampler on the hemisphere of dimension `alpha` (vectors of
/// length `alpha + 1`) targeting the density proportional to `v_1^gamma`
/// with respect to surface measure.
///
/// The chain starts from a uniform hemisphere point (normalized Gaussian
/// vector with its first coordinate made positive) and runs `burn_in + 2`
/// steps. A step adds `N(0, sigma_eps^2)` noise to every coordinate,
/// renormalizes, and accepts when the proposal's first coordinate is positive
/// and `u <= (v'_1 / v_1)^gamma` for `u ~ Uniform[0, 1]`.
pub fn mh_u<R: Rng + ?Sized>(alpha: usize, gamma: f64, cfg: &SamplerConfig, rng: &mut R) -> Result<HemisphereVector> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be at least 1, got {gamma}")));
    }
    if !(cfg.sigma_eps > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma_eps must be positive, got {}", cfg.sigma_eps)));
    }
    if alpha == 0 {
        return Ok(HemisphereVector(vec![1.0]));
    }

    let len = alpha + 1;
    let mut current = vec![0.0f64; len];
    loop {
        current.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
        current[0] = current[0].abs();
        if current[0] > 0.0 && normalize(&mut current) > 0.0 {
            break;
        }
    }

    let noise = Normal::new(0.0, cfg.sigma_eps).expect("sigma_eps checked positive");
    let mut proposal = vec![0.0; len];
    for _ in 0..cfg.burn_in + 2 {
        for (p, c) in proposal.iter_mut().zip(&current) {
            *p = c + noise.sample(rng);
        }
        normalize(&mut proposal);
        let delta: f64 = rng.random();
        // Strict positivity keeps the chain on the open hemisphere, where the
        // acceptance ratio is defined.
        if proposal[0] > 0.0 && delta <= (proposal[0] / current[0]).powf(gamma) {
            std::mem::swap(&mut current, &mut proposal);
        }
    }
    Ok(HemisphereVector(current))
}

/// Draws a unit-row Cholesky factor supported on the arcs of `orientation`.
///
/// Rows and columns are indexed by position in the orientation's ordering, so
/// the factor is upper triangular. Row `a` (vertex `v`) is
/// `mh_u(|ch(v)|, |pa(v)| + 1)`: the first coordinate goes to the diagonal and
/// the rest to the children, in order.
pub fn sample_factor<R: Rng + ?Sized>(
    orientation: &AcyclicOrientation,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<UnitRowCholeskyFactor> {
    let order = orientation.order();
    let p = orientation.p();
    let mut u = DMatrix::zeros(p, p);
    for a in 0..p {
        let v = order.vertex(a);
        let children = orientation.children(v);
        let gamma = (orientation.parents(v).len() + 1) as f64;
        let row = mh_u(children.len(), gamma, cfg, rng)?;
        u[(a, a)] = row.head();
        for (&c, &x) in children.iter().zip(row.tail()) {
            u[(a, order.position(c))] = x;
        }
    }
    UnitRowCholeskyFactor::new(u)
}

/// Moves entry `(a, b)` of a position-indexed matrix to
/// `(order.vertex(a), order.vertex(b))`.
fn to_vertex_labels(m: &DMatrix<f64>, order: &Ordering) -> DMatrix<f64> {
    let p = m.nrows();
    let mut out = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in 0..p {
            out[(order.vertex(a), order.vertex(b))] = m[(a, b)];
        }
    }
    out
}

/// Diagonal dominance sampler, before any rescaling.
///
/// Edge entries are i.i.d. from `cfg.entry_law`; every other off-diagonal is
/// exactly zero. Each diagonal entry is the absolute row sum plus a draw from
/// `cfg.perturb_law`, redrawn until it strictly exceeds the row sum.
pub fn sample_diagdom<R: Rng + ?Sized>(g: &UndirectedGraph, cfg: &SamplerConfig, rng: &mut R) -> Result<SymmetricMatrix> {
    cfg.validate()?;
    assemble_diagdom(g, |draw| match draw {
        Draw::Entry => cfg.entry_law.sample(rng),
        Draw::Perturbation => cfg.perturb_law.sample(rng),
    })
}

enum Draw {
    Entry,
    Perturbation,
}

fn assemble_diagdom(g: &UndirectedGraph, mut draw: impl FnMut(Draw) -> f64) -> Result<SymmetricMatrix> {
    let p = g.p();
    let mut m = DMatrix::zeros(p, p);
    for (i, j) in g.edges() {
        let x = draw(Draw::Entry);
        m[(i, j)] = x;
        m[(j, i)] = x;
    }
    for i in 0..p {
        let off: f64 = (0..p).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
        m[(i, i)] = loop {
            let d = off + draw(Draw::Perturbation);
            if d > off {
                break d;
            }
        };
    }
    SymmetricMatrix::new(m)
}

/// [`sample_diagdom`] rescaled to unit diagonal.
pub fn sample_diagdom_correlation<R: Rng + ?Sized>(
    g: &UndirectedGraph,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<CorrelationMatrix> {
    rescale_to_correlation(&sample_diagdom(g, cfg, rng)?)
}

/// Partial orthogonalization sampler: a `p x p` matrix with i.i.d.
/// `cfg.entry_law` entries is orthogonalized along the non-edges of `g` and
/// its Gram matrix returned. Degenerate draws are retried up to
/// `cfg.max_resample` times.
pub fn sample_port<R: Rng + ?Sized>(g: &UndirectedGraph, cfg: &SamplerConfig, rng: &mut R) -> Result<CorrelationMatrix> {
    cfg.validate()?;
    let p = g.p();
    for _ in 0..cfg.max_resample {
        let q = DMatrix::from_fn(p, p, |_, _| cfg.entry_law.sample(rng));
        match mgs_partial_orthogonalize(&q, g, cfg.residual_tol) {
            Ok(q) => return CorrelationMatrix::new(gram(&q)),
            Err(Error::DegenerateRow { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplerExhausted {
        attempts: cfg.max_resample,
    })
}

/// One uniform draw with the internals that produced it.
#[derive(Debug, Clone)]
pub struct UniformDraw {
    pub matrix: CorrelationMatrix,
    /// Factor in perfect-ordering positions.
    pub factor: UnitRowCholeskyFactor,
    pub orientation: AcyclicOrientation,
}

/// Uniform sampler over correlation matrices with the zero pattern of a
/// chordal graph `g`.
pub fn sample_uniform_chordal<R: Rng + ?Sized>(
    g: &UndirectedGraph,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<CorrelationMatrix> {
    Ok(sample_uniform_chordal_detailed(g, cfg, rng)?.matrix)
}

/// Like [`sample_uniform_chordal`], also returning the factor and the
/// orientation it was drawn on.
pub fn sample_uniform_chordal_detailed<R: Rng + ?Sized>(
    g: &UndirectedGraph,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<UniformDraw> {
    cfg.validate()?;
    let (order, perfect) = max_cardinality_search(g);
    if !perfect {
        return Err(Error::NotChordal);
    }
    let orientation = orient_chordal(g, &order)?;
    let factor = sample_factor(&orientation, cfg, rng)?;
    // Non-adjacent pairs share no support in the factor rows, so their
    // entries come out as exact zeros.
    let m = factor.gram().permuted(order.as_slice());
    Ok(UniformDraw {
        matrix: CorrelationMatrix::new(m)?,
        factor,
        orientation,
    })
}

/// Uniform factor sampling on a triangulation of `g`, followed by partial
/// orthogonalization along the non-edges of `g`. For chordal `g` this has the
/// same distribution as [`sample_uniform_chordal`].
pub fn sample_port_chol<R: Rng + ?Sized>(g: &UndirectedGraph, cfg: &SamplerConfig, rng: &mut R) -> Result<CorrelationMatrix> {
    cfg.validate()?;
    let tri = triangulate(g);
    let orientation = orient_chordal(&tri.graph, &tri.order)?;
    for _ in 0..cfg.max_resample {
        let u = sample_factor(&orientation, cfg, rng)?;
        let q = to_vertex_labels(u.as_matrix(), &tri.order);
        match mgs_partial_orthogonalize(&q, g, cfg.residual_tol) {
            Ok(q) => return CorrelationMatrix::new(gram(&q)),
            Err(Error::DegenerateRow { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplerExhausted {
        attempts: cfg.max_resample,
    })
}

/// Sampling method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    DiagDom,
    Port,
    Uniform,
    PortChol,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::DiagDom, Method::Port, Method::Uniform, Method::PortChol];

    pub fn name(self) -> &'static str {
        match self {
            Method::DiagDom => "diagdom",
            Method::Port => "port",
            Method::Uniform => "uniform",
            Method::PortChol => "portchol",
        }
    }

    /// Whether the method always returns unit-diagonal matrices.
    pub fn is_correlation(self) -> bool {
        self != Method::DiagDom
    }

    /// One draw. `correlation` only affects [`Method::DiagDom`], which is
    /// otherwise returned without rescaling.
    pub fn sample<R: Rng + ?Sized>(
        self,
        g: &UndirectedGraph,
        cfg: &SamplerConfig,
        correlation: bool,
        rng: &mut R,
    ) -> Result<SymmetricMatrix> {
        Ok(match self {
            Method::DiagDom if correlation => sample_diagdom_correlation(g, cfg, rng)?.into(),
            Method::DiagDom => sample_diagdom(g, cfg, rng)?,
            Method::Port => sample_port(g, cfg, rng)?.into(),
            Method::Uniform => sample_uniform_chordal(g, cfg, rng)?.into(),
            Method::PortChol => sample_port_chol(g, cfg, rng)?.into(),
        })
    }

    /// Sample `index` of a batch, drawn from stream `index` of `cfg.seed`.
    pub fn sample_indexed(
        self,
        g: &UndirectedGraph,
        cfg: &SamplerConfig,
        correlation: bool,
        index: u64,
    ) -> Result<SymmetricMatrix> {
        self.sample(g, cfg, correlation, &mut cfg.rng_for(index))
    }

    /// `n` samples, computed in parallel. Sample `k` equals
    /// `sample_indexed(.., k)` regardless of scheduling.
    pub fn sample_batch(
        self,
        g: &UndirectedGraph,
        cfg: &SamplerConfig,
        correlation: bool,
        n: usize,
    ) -> Result<Vec<SymmetricMatrix>> {
        cfg.validate()?;
        if self == Method::Uniform && !max_cardinality_search(g).1 {
            return Err(Error::NotChordal);
        }
        (0..n as u64)
            .into_par_iter()
            .map(|k| self.sample_indexed(g, cfg, correlation, k))
            .collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}
