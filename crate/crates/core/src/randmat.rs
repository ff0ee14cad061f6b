//! Population models, data generation, sample covariance and generalized
//! inverses.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use std::fmt;
use std::str::FromStr;

use crate::error::{arg, domain, Error, Result};

/// Stream used for observation noise.
const DATA_STREAM: u64 = 0;
/// Stream used for Haar bases.
const BASIS_STREAM: u64 = 1;

/// Population covariance `Σ = Q diag(λ) Qᵀ`. A missing basis means `Q = I`.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    eigenvalues: Vec<f64>,
    basis: Option<DMatrix<f64>>,
}

impl SpectralModel {
    pub fn new(eigenvalues: Vec<f64>, basis: Option<DMatrix<f64>>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return arg("spectral model needs at least one eigenvalue");
        }
        if let Some(bad) = eigenvalues.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return arg(format!("eigenvalues must be positive and finite, found {bad}"));
        }
        let model = Self { eigenvalues, basis: None };
        match basis {
            Some(q) => model.with_basis(q),
            None => Ok(model),
        }
    }

    pub fn identity(p: usize) -> Self {
        Self { eigenvalues: vec![1.0; p.max(1)], basis: None }
    }

    /// 20% of the eigenvalues equal 1, 40% equal 3, the rest equal 10.
    pub fn paper_mix(p: usize) -> Self {
        Self { eigenvalues: paper_mix_spectrum(p), basis: None }
    }

    /// Attaches an orthonormal basis after checking `QᵀQ = I` to 1e-10.
    pub fn with_basis(mut self, q: DMatrix<f64>) -> Result<Self> {
        let p = self.p();
        if q.nrows() != p || q.ncols() != p {
            return arg(format!("basis must be {p}x{p}, got {}x{}", q.nrows(), q.ncols()));
        }
        let gram = q.tr_mul(&q);
        let err = (gram - DMatrix::<f64>::identity(p, p)).amax();
        if err > 1e-10 {
            return arg(format!("basis is not orthonormal (max deviation {err:.3e})"));
        }
        self.basis = Some(q);
        Ok(self)
    }

    /// Attaches a Haar distributed basis drawn from `seed`.
    pub fn with_haar_basis(self, seed: u64) -> Result<Self> {
        let q = sample_haar_basis(self.p(), seed)?;
        self.with_basis(q)
    }

    pub fn p(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> Option<&DMatrix<f64>> {
        self.basis.as_ref()
    }

    /// `Q f(Λ) Qᵀ` as a dense matrix.
    pub fn matrix_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        match &self.basis {
            None => DMatrix::from_diagonal(&DVector::from_vec(d)),
            Some(q) => {
                let mut qd = q.clone();
                for (j, dj) in d.iter().enumerate() {
                    qd.column_mut(j).scale_mut(*dj);
                }
                let mut out = &qd * q.transpose();
                symmetrize(&mut out);
                out
            }
        }
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        self.matrix_function(|l| l)
    }

    pub fn sqrt(&self) -> DMatrix<f64> {
        self.matrix_function(f64::sqrt)
    }

    /// `q_iᵀ Θ q_i` for every population eigenvector.
    pub fn theta_diagonal(&self, theta: &WeightMatrix) -> Result<Vec<f64>> {
        check_dim(theta, self.p())?;
        Ok(match &self.basis {
            None => theta.diagonal(),
            Some(q) => theta.compressed_diagonal(q),
        })
    }

    /// `Σ_i g(λ_i) q_iᵀ Θ q_i`, i.e. `tr(g(Σ) Θ)`.
    pub fn spectral_trace(&self, theta: &WeightMatrix, g: impl Fn(f64) -> f64) -> Result<f64> {
        let diag = self.theta_diagonal(theta)?;
        Ok(self.eigenvalues.iter().zip(&diag).map(|(&l, &w)| g(l) * w).sum())
    }

    /// `xᵀ g(Σ) x`.
    pub fn quad_form(&self, x: &DVector<f64>, g: impl Fn(f64) -> f64) -> f64 {
        let coords = match &self.basis {
            None => x.clone(),
            Some(q) => q.tr_mul(x),
        };
        self.eigenvalues.iter().zip(coords.iter()).map(|(&l, &z)| g(l) * z * z).sum()
    }

    /// `g(Σ) x`.
    pub fn apply(&self, x: &DVector<f64>, g: impl Fn(f64) -> f64) -> DVector<f64> {
        match &self.basis {
            None => DVector::from_iterator(
                x.len(),
                self.eigenvalues.iter().zip(x.iter()).map(|(&l, &z)| g(l) * z),
            ),
            Some(q) => {
                let mut coords = q.tr_mul(x);
                for (c, &l) in coords.iter_mut().zip(&self.eigenvalues) {
                    *c *= g(l);
                }
                q * coords
            }
        }
    }
}

/// Eigenvalue mix 1/3/10 in proportions 20/40/40.
pub fn paper_mix_spectrum(p: usize) -> Vec<f64> {
    let ones = (0.2 * p as f64).round() as usize;
    let threes = ((0.4 * p as f64).round() as usize).min(p - ones.min(p));
    let ones = ones.min(p);
    let mut v = vec![1.0; ones];
    v.extend(std::iter::repeat_n(3.0, threes));
    v.extend(std::iter::repeat_n(10.0, p - ones - threes));
    v
}

fn check_dim(theta: &WeightMatrix, p: usize) -> Result<()> {
    if theta.dim() != p {
        return arg(format!("weight matrix has dimension {}, expected {p}", theta.dim()));
    }
    Ok(())
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = a;
            m[(j, i)] = a;
        }
    }
}

/// Haar distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of `Q` flipped so that `R` has a positive diagonal.
pub fn sample_haar_basis(p: usize, seed: u64) -> Result<DMatrix<f64>> {
    if p == 0 {
        return arg("Haar basis needs p >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BASIS_STREAM);
    let g = DMatrix::from_iterator(p, p, (0..p * p).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// Distribution of the standardized noise entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dist {
    Normal,
    /// Student t with 5 degrees of freedom, rescaled to unit variance.
    ScaledT5,
}

impl Dist {
    pub fn tag(self) -> &'static str {
        match self {
            Dist::Normal => "normal",
            Dist::ScaledT5 => "scaled_t5",
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Dist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(Dist::Normal),
            "t5" | "scaled_t5" | "scaled-t5" => Ok(Dist::ScaledT5),
            other => arg(format!("unknown distribution '{other}' (expected normal or t5)")),
        }
    }
}

/// A `p × n` data matrix, one observation per column.
#[derive(Debug, Clone)]
pub struct ObservationMatrix {
    data: DMatrix<f64>,
    mean: Option<DVector<f64>>,
}

impl ObservationMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return arg("observation matrix is empty");
        }
        if data.iter().any(|x| !x.is_finite()) {
            return arg("observation matrix has non-finite entries");
        }
        Ok(Self { data, mean: None })
    }

    /// Records the population mean used to generate the data.
    pub fn with_mean(mut self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.p() {
            return arg(format!("mean has length {}, expected {}", mean.len(), self.p()));
        }
        self.mean = Some(mean);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.data.nrows()
    }

    pub fn n(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn mean(&self) -> Option<&DVector<f64>> {
        self.mean.as_ref()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { data: &self.data * factor, mean: self.mean.as_ref().map(|m| m * factor) }
    }

    /// Data with the row means removed.
    pub fn centered(&self) -> DMatrix<f64> {
        let mut yc = self.data.clone();
        for mut row in yc.row_iter_mut() {
            let mean = row.mean();
            row.add_scalar_mut(-mean);
        }
        yc
    }
}

/// Draws observations `Y = μ1ᵀ + Σ^{1/2} X` for a fixed model. Building the
/// square root once lets replications reuse it.
#[derive(Debug, Clone)]
pub struct Sampler {
    root: Root,
    p: usize,
}

#[derive(Debug, Clone)]
enum Root {
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

impl Sampler {
    pub fn new(model: &SpectralModel) -> Self {
        let root = match model.basis() {
            None => Root::Diagonal(model.eigenvalues().iter().map(|l| l.sqrt()).collect()),
            Some(_) => Root::Dense(model.sqrt()),
        };
        Self { root, p: model.p() }
    }

    pub fn draw(
        &self,
        n: usize,
        dist: Dist,
        mean: Option<&DVector<f64>>,
        seed: u64,
    ) -> Result<ObservationMatrix> {
        if n < 2 {
            return arg(format!("need n >= 2 observations, got {n}"));
        }
        let p = self.p;
        if let Some(mu) = mean {
            if mu.len() != p {
                return arg(format!("mean has length {}, expected {p}", mu.len()));
            }
        }
        let x = standardized_noise(p, n, dist, seed);
        let mut y = match &self.root {
            Root::Diagonal(s) => {
                let mut y = x;
                for (i, si) in s.iter().enumerate() {
                    y.row_mut(i).scale_mut(*si);
                }
                y
            }
            Root::Dense(r) => r * x,
        };
        if let Some(mu) = mean {
            for mut col in y.column_iter_mut() {
                col += mu;
            }
        }
        let obs = ObservationMatrix::new(y)?;
        match mean {
            Some(mu) => obs.with_mean(mu.clone()),
            None => obs.with_mean(DVector::zeros(p)),
        }
    }
}

/// `p × n` matrix of iid unit-variance entries, filled column by column.
pub fn standardized_noise(p: usize, n: usize, dist: Dist, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(DATA_STREAM);
    match dist {
        Dist::Normal => {
            DMatrix::from_iterator(p, n, (0..p * n).map(|_| rng.sample::<f64, _>(StandardNormal)))
        }
        Dist::ScaledT5 => {
            let chi = ChiSquared::<f64>::new(5.0).expect("valid degrees of freedom");
            let scale = (3.0f64 / 5.0).sqrt();
            DMatrix::from_iterator(
                p,
                n,
                (0..p * n).map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    let w: f64 = chi.sample(&mut rng);
                    z / (w / 5.0).sqrt() * scale
                }),
            )
        }
    }
}

pub fn generate_observations(
    model: &SpectralModel,
    n: usize,
    dist: Dist,
    mean: Option<&DVector<f64>>,
    seed: u64,
) -> Result<ObservationMatrix> {
    Sampler::new(model).draw(n, dist, mean, seed)
}

/// `S = (1/n) Y Yᵀ − ȳ ȳᵀ`, evaluated as `(1/n) Y_c Y_cᵀ`.
pub fn sample_covariance(y: &ObservationMatrix) -> Result<DMatrix<f64>> {
    if y.n() < 2 {
        return arg("sample covariance needs n >= 2");
    }
    let yc = y.centered();
    let mut s = (&yc * yc.transpose()) / y.n() as f64;
    symmetrize(&mut s);
    Ok(s)
}

/// Nonzero part of the spectrum of `S`: `S = U diag(λ) Uᵀ` with `U` of size
/// `p × r`.
#[derive(Debug, Clone)]
pub struct SampleEigen {
    p: usize,
    values: Vec<f64>,
    vectors: Option<DMatrix<f64>>,
}

impl SampleEigen {
    /// Eigen-decomposes a symmetric PSD matrix, keeping eigenvalues above
    /// `rank_tol` (default `p · ε · λ_max`).
    pub fn from_covariance(s: &DMatrix<f64>, rank_tol: Option<f64>) -> Result<Self> {
        let p = square_dim(s)?;
        let eig = SymmetricEigen::new(s.clone());
        let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let tol = cutoff(&vals, p, rank_tol);
        let keep: Vec<usize> = sorted_desc(&vals).into_iter().filter(|&i| vals[i] > tol).collect();
        let values = keep.iter().map(|&i| vals[i]).collect();
        let vectors = eig.eigenvectors.select_columns(keep.iter());
        Ok(Self { p, values, vectors: Some(vectors) })
    }

    /// Spectrum of the sample covariance of `y`. For `p > n` the decomposition
    /// goes through the `n × n` Gram matrix of the centered data.
    pub fn from_observations(y: &ObservationMatrix, with_vectors: bool) -> Result<Self> {
        let (p, n) = (y.p(), y.n());
        if n < 2 {
            return arg("sample covariance needs n >= 2");
        }
        if p <= n {
            let s = sample_covariance(y)?;
            if with_vectors {
                return Self::from_covariance(&s, None);
            }
            let vals: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
            return Ok(Self::values_only(p, &vals, None));
        }
        let yc = y.centered();
        let mut gram = yc.tr_mul(&yc) / n as f64;
        symmetrize(&mut gram);
        if !with_vectors {
            let vals: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
            return Ok(Self::values_only(p, &vals, None));
        }
        let eig = SymmetricEigen::new(gram);
        let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let tol = cutoff(&vals, p, None);
        let keep: Vec<usize> = sorted_desc(&vals).into_iter().filter(|&i| vals[i] > tol).collect();
        let values: Vec<f64> = keep.iter().map(|&i| vals[i]).collect();
        let v = eig.eigenvectors.select_columns(keep.iter());
        let mut u = &yc * v;
        for (j, lam) in values.iter().enumerate() {
            u.column_mut(j).scale_mut(1.0 / (n as f64 * lam).sqrt());
        }
        Ok(Self { p, values, vectors: Some(u) })
    }

    /// Spectrum of `κ S`.
    pub fn scaled(&self, kappa: f64) -> Self {
        Self { p: self.p, values: self.values.iter().map(|l| l * kappa).collect(), vectors: self.vectors.clone() }
    }

    fn values_only(p: usize, vals: &[f64], rank_tol: Option<f64>) -> Self {
        let tol = cutoff(vals, p, rank_tol);
        let values = sorted_desc(vals).into_iter().map(|i| vals[i]).filter(|&v| v > tol).collect();
        Self { p, values, vectors: None }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// Nonzero eigenvalues in decreasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvectors matching [`values`](Self::values), if they were computed.
    pub fn vectors(&self) -> Option<&DMatrix<f64>> {
        self.vectors.as_ref()
    }

    /// `U diag(f(λ) − f0) Uᵀ + f0 I`, the dense matrix function with value
    /// `f0` on the null space.
    pub fn dense_function(&self, f: impl Fn(f64) -> f64, f0: f64) -> Result<DMatrix<f64>> {
        let u = self.require_vectors()?;
        let mut scaled = u.clone();
        for (j, &l) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(f(l) - f0);
        }
        let mut out = &scaled * u.transpose();
        for i in 0..self.p {
            out[(i, i)] += f0;
        }
        symmetrize(&mut out);
        Ok(out)
    }

    pub(crate) fn require_vectors(&self) -> Result<&DMatrix<f64>> {
        self.vectors
            .as_ref()
            .ok_or_else(|| Error::Argument("eigenvectors were not computed".into()))
    }
}

fn square_dim(s: &DMatrix<f64>) -> Result<usize> {
    if s.nrows() != s.ncols() || s.nrows() == 0 {
        return arg(format!("expected a non-empty square matrix, got {}x{}", s.nrows(), s.ncols()));
    }
    Ok(s.nrows())
}

fn cutoff(vals: &[f64], p: usize, rank_tol: Option<f64>) -> f64 {
    let lmax = vals.iter().fold(0.0f64, |a, &b| a.max(b));
    let rel = rank_tol.unwrap_or(p as f64 * f64::EPSILON);
    rel * lmax
}

fn sorted_desc(vals: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    idx
}

/// The generalized inverses studied in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InverseKind {
    MoorePenrose,
    Ridge,
    /// `(S + tI)^{-1} S (S + tI)^{-1}`.
    Mpr,
    Ordinary,
}

impl FromStr for InverseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mp" | "moore_penrose" | "moore-penrose" => Ok(Self::MoorePenrose),
            "ridge" => Ok(Self::Ridge),
            "mpr" => Ok(Self::Mpr),
            "ordinary" | "inverse" => Ok(Self::Ordinary),
            other => arg(format!("unknown inverse kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneralizedInverse {
    pub kind: InverseKind,
    pub t: f64,
    pub matrix: DMatrix<f64>,
    pub rank: usize,
}

/// Evaluates a generalized inverse of the symmetric PSD matrix `s` through
/// its eigendecomposition. `rank_tol` is relative to the largest eigenvalue.
pub fn generalized_inverse(
    s: &DMatrix<f64>,
    kind: InverseKind,
    t: f64,
    rank_tol: Option<f64>,
) -> Result<GeneralizedInverse> {
    let p = square_dim(s)?;
    if matches!(kind, InverseKind::Ridge | InverseKind::Mpr) && !(t > 0.0 && t.is_finite()) {
        return arg(format!("{kind:?} inverse needs t > 0, got {t}"));
    }
    let eig = SymmetricEigen::new(s.clone());
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let tol = cutoff(&vals, p, rank_tol);
    let nonzero = vals.iter().filter(|&&l| l > tol).count();
    let (f, rank): (Box<dyn Fn(f64) -> f64>, usize) = match kind {
        InverseKind::MoorePenrose => (Box::new(move |l| if l > tol { 1.0 / l } else { 0.0 }), nonzero),
        InverseKind::Ridge => (Box::new(move |l| 1.0 / (l + t)), p),
        InverseKind::Mpr => (
            Box::new(move |l| if l > tol { l / ((l + t) * (l + t)) } else { 0.0 }),
            nonzero,
        ),
        InverseKind::Ordinary => {
            if nonzero < p {
                return Err(Error::Singular(format!(
                    "sample covariance has rank {nonzero} < p = {p}"
                )));
            }
            (Box::new(|l| 1.0 / l), p)
        }
    };
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, &l) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(l));
    }
    let mut matrix = &scaled * q.transpose();
    symmetrize(&mut matrix);
    Ok(GeneralizedInverse { kind, t: if matches!(kind, InverseKind::Ridge | InverseKind::Mpr) { t } else { 0.0 }, matrix, rank })
}

#[derive(Debug, Clone)]
enum Repr {
    ScaledIdentity(f64),
    Dense(DMatrix<f64>),
    /// `Σ w_i θ_i θ_iᵀ`; signed weights allow the symmetrization identity.
    LowRank(Vec<(f64, DVector<f64>)>),
}

/// A symmetric weight matrix `Θ`, stored densely, as a scaled identity, or as
/// a signed sum of rank-one terms.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    p: usize,
    repr: Repr,
    pub scale_note: String,
}

impl WeightMatrix {
    pub fn scaled_identity(p: usize, scale: f64) -> Self {
        Self { p, repr: Repr::ScaledIdentity(scale), scale_note: format!("{scale}*I") }
    }

    /// `I / p`, the normalized trace functional.
    pub fn trace_normalized(p: usize) -> Self {
        let mut w = Self::scaled_identity(p, 1.0 / p as f64);
        w.scale_note = "I/p".into();
        w
    }

    /// Dense symmetric matrix; asymmetry beyond 1e-10 (relative) is rejected.
    pub fn dense(m: DMatrix<f64>) -> Result<Self> {
        let p = square_dim(&m)?;
        let scale = m.amax().max(1.0);
        if (&m - m.transpose()).amax() > 1e-10 * scale {
            return arg("weight matrix is not symmetric; use WeightMatrix::symmetrized");
        }
        Ok(Self { p, repr: Repr::Dense(m), scale_note: "dense".into() })
    }

    /// `(M + Mᵀ)/2` of an arbitrary square matrix.
    pub fn symmetrized(m: &DMatrix<f64>) -> Result<Self> {
        let p = square_dim(m)?;
        let sym = (m + m.transpose()) * 0.5;
        Ok(Self { p, repr: Repr::Dense(sym), scale_note: "symmetrized".into() })
    }

    /// `Σ w_i θ_i θ_iᵀ`.
    pub fn low_rank(terms: Vec<(f64, DVector<f64>)>) -> Result<Self> {
        let p = match terms.first() {
            Some((_, v)) => v.len(),
            None => return arg("low-rank weight matrix needs at least one term"),
        };
        if terms.iter().any(|(w, v)| v.len() != p || !w.is_finite() || v.iter().any(|x| !x.is_finite())) {
            return arg("low-rank terms must be finite vectors of equal length");
        }
        Ok(Self { p, repr: Repr::LowRank(terms), scale_note: "low-rank".into() })
    }

    /// `scale · θθᵀ`.
    pub fn rank_one(theta: DVector<f64>, scale: f64) -> Result<Self> {
        Self::low_rank(vec![(scale, theta)])
    }

    /// `(abᵀ + baᵀ)/2 = ((a+b)(a+b)ᵀ − (a−b)(a−b)ᵀ)/4`.
    pub fn symmetrized_outer(a: &DVector<f64>, b: &DVector<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return arg("outer product factors differ in length");
        }
        let mut w = Self::low_rank(vec![(0.25, a + b), (-0.25, a - b)])?;
        w.scale_note = "symmetrized outer product".into();
        Ok(w)
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn is_scaled_identity(&self) -> Option<f64> {
        match self.repr {
            Repr::ScaledIdentity(s) => Some(s),
            _ => None,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let repr = match &self.repr {
            Repr::ScaledIdentity(s) => Repr::ScaledIdentity(s * factor),
            Repr::Dense(m) => Repr::Dense(m * factor),
            Repr::LowRank(t) => Repr::LowRank(t.iter().map(|(w, v)| (w * factor, v.clone())).collect()),
        };
        Self { p: self.p, repr, scale_note: format!("{factor}*({})", self.scale_note) }
    }

    /// `Θ²`.
    pub fn squared(&self) -> Self {
        let repr = match &self.repr {
            Repr::ScaledIdentity(s) => Repr::ScaledIdentity(s * s),
            _ => {
                let d = self.to_dense();
                Repr::Dense(&d * &d)
            }
        };
        Self { p: self.p, repr, scale_note: format!("({})^2", self.scale_note) }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.repr {
            Repr::ScaledIdentity(s) => DMatrix::identity(self.p, self.p) * *s,
            Repr::Dense(m) => m.clone(),
            Repr::LowRank(terms) => {
                let mut out = DMatrix::zeros(self.p, self.p);
                for (w, v) in terms {
                    out.ger(*w, v, v, 1.0);
                }
                out
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::ScaledIdentity(s) => s * self.p as f64,
            Repr::Dense(m) => m.trace(),
            Repr::LowRank(terms) => terms.iter().map(|(w, v)| w * v.norm_squared()).sum(),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        match &self.repr {
            Repr::ScaledIdentity(s) => vec![*s; self.p],
            Repr::Dense(m) => m.diagonal().iter().copied().collect(),
            Repr::LowRank(terms) => (0..self.p)
                .map(|i| terms.iter().map(|(w, v)| w * v[i] * v[i]).sum())
                .collect(),
        }
    }

    /// `xᵀ Θ x`.
    pub fn quad(&self, x: &DVector<f64>) -> f64 {
        match &self.repr {
            Repr::ScaledIdentity(s) => s * x.norm_squared(),
            Repr::Dense(m) => x.dot(&(m * x)),
            Repr::LowRank(terms) => terms.iter().map(|(w, v)| w * v.dot(x).powi(2)).sum(),
        }
    }

    /// `u_jᵀ Θ u_j` for every column of `u`.
    pub fn compressed_diagonal(&self, u: &DMatrix<f64>) -> Vec<f64> {
        match &self.repr {
            Repr::ScaledIdentity(s) => u.column_iter().map(|c| s * c.norm_squared()).collect(),
            Repr::Dense(m) => {
                let mu = m * u;
                u.column_iter().zip(mu.column_iter()).map(|(a, b)| a.dot(&b)).collect()
            }
            Repr::LowRank(terms) => {
                let mut out = vec![0.0; u.ncols()];
                for (w, v) in terms {
                    let proj = u.tr_mul(v);
                    for (o, z) in out.iter_mut().zip(proj.iter()) {
                        *o += w * z * z;
                    }
                }
                out
            }
        }
    }

    /// `tr(A Θ)` for a square matrix `A`.
    pub fn trace_product(&self, a: &DMatrix<f64>) -> f64 {
        match &self.repr {
            Repr::ScaledIdentity(s) => s * a.trace(),
            Repr::Dense(m) => a.component_mul(&m.transpose()).sum(),
            Repr::LowRank(terms) => terms.iter().map(|(w, v)| w * v.dot(&(a * v))).sum(),
        }
    }
}

/// `tr(G^m Θ)`. Low-rank weights use `θᵀ G^m θ` via repeated products.
pub fn weighted_trace_power(g: &GeneralizedInverse, m: usize, theta: &WeightMatrix) -> Result<f64> {
    matrix_trace_power(&g.matrix, m, theta)
}

pub fn matrix_trace_power(g: &DMatrix<f64>, m: usize, theta: &WeightMatrix) -> Result<f64> {
    let p = square_dim(g)?;
    check_dim(theta, p)?;
    if m == 0 {
        return arg("power must be at least 1");
    }
    match &theta.repr {
        Repr::LowRank(terms) => {
            let mut total = 0.0;
            for (w, v) in terms {
                // θᵀ G^m θ = (G^a θ)ᵀ (G^b θ) with a + b = m
                let half = m / 2;
                let mut x = v.clone();
                for _ in 0..half {
                    x = g * x;
                }
                let mut y = x.clone();
                for _ in half..m {
                    y = g * y;
                }
                total += w * x.dot(&y);
            }
            Ok(total)
        }
        _ => {
            let mut pow = g.clone();
            for _ in 1..m {
                pow = &pow * g;
            }
            Ok(theta.trace_product(&pow))
        }
    }
}

/// Reads a headerless numeric CSV into a matrix (rows as in the file).
pub fn read_matrix_csv(path: &std::path::Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<f64>().map_err(|e| Error::Argument(format!("bad number '{f}': {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    if rows.is_empty() || rows.iter().any(|r| r.len() != ncols) {
        return arg(format!("{} is empty or ragged", path.display()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Writes a matrix as headerless CSV with 17 significant digits.
pub fn write_matrix_csv(path: &std::path::Path, m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..m.nrows() {
        w.write_record((0..m.ncols()).map(|j| crate::simlab::fmt_g17(m[(i, j)])))?;
    }
    w.flush()?;
    Ok(())
}

/// Loads an eigenvalue file: every number in the file, in reading order.
pub fn read_spectrum(path: &std::path::Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let vals = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| Error::Argument(format!("bad number '{s}': {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    if vals.is_empty() {
        return domain("spectrum file holds no values");
    }
    Ok(vals)
}
