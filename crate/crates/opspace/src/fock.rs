//! Exact finite-dimensional algebra in the Hermite eigenbasis of the harmonic
//! oscillator H = |p̂|² + |x|².
//!
//! Basis states are indexed by multi-indices α ∈ ℕ₀^d with every component
//! below the cutoff, enumerated lexicographically. Ladder operators follow the
//! normalization [a, a*] = 2ℏ fixed by [x, p̂] = iℏ, so that
//! a ψ_n = √(2ℏn) ψ_{n−1} per axis.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::grid::Grid;
use crate::linalg::{self, CMat};
use crate::{Error, Result, SemiclassicalParam};

/// Truncated tensor-product Hermite basis: `cutoff` states per axis in
/// dimension `dim`, at a fixed ℏ.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    cutoff: usize,
    dim: usize,
    param: SemiclassicalParam,
}

impl FockSpace {
    pub fn new(cutoff: usize, dim: usize, param: SemiclassicalParam) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::InvalidParameter("cutoff must be >= 1".into()));
        }
        if dim < 1 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let size = (cutoff as u64).checked_pow(dim as u32);
        if size.is_none() || size.unwrap() > 1 << 22 {
            return Err(Error::InvalidParameter(format!(
                "basis size {cutoff}^{dim} too large"
            )));
        }
        Ok(Self { cutoff, dim, param })
    }

    #[inline]
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn param(&self) -> SemiclassicalParam {
        self.param
    }

    /// Number of basis states K^d.
    pub fn len(&self) -> usize {
        self.cutoff.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of the `i`-th basis state in the lexicographic enumeration
    /// (leftmost axis most significant).
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut alpha = vec![0usize; self.dim];
        for ax in (0..self.dim).rev() {
            alpha[ax] = i % self.cutoff;
            i /= self.cutoff;
        }
        alpha
    }

    pub fn index_of(&self, alpha: &[usize]) -> usize {
        debug_assert_eq!(alpha.len(), self.dim);
        alpha.iter().fold(0, |acc, &a| acc * self.cutoff + a)
    }

    /// States on the outermost basis layer (some component equal to K−1) are
    /// affected by the cutoff truncation; exactness claims exclude them.
    pub fn is_truncation_affected(&self, i: usize) -> bool {
        self.multi_index(i).iter().any(|&a| a == self.cutoff - 1)
    }
}

/// Dense operator over a [`FockSpace`] enumeration.
#[derive(Debug, Clone)]
pub struct FockOperator {
    pub matrix: CMat,
    pub space: FockSpace,
}

impl FockOperator {
    pub fn new(matrix: CMat, space: FockSpace) -> Result<Self> {
        if matrix.nrows() != space.len() || matrix.ncols() != space.len() {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}x{} but the enumeration has {} states",
                matrix.nrows(),
                matrix.ncols(),
                space.len()
            )));
        }
        Ok(Self { matrix, space })
    }

    pub fn zeros(space: FockSpace) -> Self {
        let n = space.len();
        Self {
            matrix: CMat::zeros(n, n),
            space,
        }
    }

    pub fn identity(space: FockSpace) -> Self {
        let n = space.len();
        Self {
            matrix: CMat::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            space,
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        linalg::hermitian_defect(&self.matrix) <= 1e-12
    }

    pub fn trace(&self) -> C64 {
        (0..self.space.len()).map(|i| self.matrix[(i, i)]).sum()
    }
}

/// Which phase-space direction a quantum gradient differentiates:
/// ∇_x op = [∇, op], ∇_ξ op = [x/(iℏ), op].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientKind {
    X,
    Xi,
}

/// Annihilation and creation matrices on one axis: a ψ_n = √(2ℏn) ψ_{n−1},
/// a* ψ_n = √(2ℏ(n+1)) ψ_{n+1}, truncated at the cutoff.
pub fn ladder_matrices(space: &FockSpace, axis: usize) -> Result<(FockOperator, FockOperator)> {
    if axis >= space.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: space.dim(),
        });
    }
    if space.cutoff() < 2 {
        return Err(Error::CutoffTooSmall {
            cutoff: space.cutoff(),
            reason: "ladder operators need at least two basis states per axis".into(),
        });
    }
    let n = space.len();
    let hbar = space.param().hbar();
    let mut lower = CMat::zeros(n, n);
    for col in 0..n {
        let alpha = space.multi_index(col);
        if alpha[axis] == 0 {
            continue;
        }
        let mut beta = alpha.clone();
        beta[axis] -= 1;
        let row = space.index_of(&beta);
        lower[(row, col)] = C64::from((2.0 * hbar * alpha[axis] as f64).sqrt());
    }
    let raise = linalg::adjoint(&lower);
    Ok((
        FockOperator::new(lower, space.clone())?,
        FockOperator::new(raise, space.clone())?,
    ))
}

/// x = (a + a*)/2 on the given axis.
pub fn position_matrix(space: &FockSpace, axis: usize) -> Result<FockOperator> {
    let (a, adag) = ladder_matrices(space, axis)?;
    let m = linalg::scale(&(&a.matrix + &adag.matrix), C64::new(0.5, 0.0));
    FockOperator::new(m, space.clone())
}

/// p̂ = (a − a*)/(2i) on the given axis.
pub fn momentum_matrix(space: &FockSpace, axis: usize) -> Result<FockOperator> {
    let (a, adag) = ladder_matrices(space, axis)?;
    // 1/(2i) = -i/2
    let m = linalg::scale(&(&a.matrix - &adag.matrix), C64::new(0.0, -0.5));
    FockOperator::new(m, space.clone())
}

/// Default cutoff policy: gradients of a level-n projection touch level n+1
/// only, so a margin of 4 keeps every reported quantity truncation-free.
pub fn default_cutoff(n: usize) -> usize {
    n + 2 + 4
}

/// Number of particles N = binom(d+n, d) filling all levels |α|₁ ≤ n.
pub fn particle_number(n: usize, d: usize) -> f64 {
    linalg::binomial((d + n) as u64, d as u64)
}

/// ℏ fixed by the normalization N h^d = 1: h = N^{−1/d}.
pub fn linked_param(n: usize, d: usize) -> SemiclassicalParam {
    let h = particle_number(n, d).powf(-1.0 / d as f64);
    SemiclassicalParam::new(h / (2.0 * std::f64::consts::PI)).expect("h > 0")
}

/// The ground-state Slater projection P = Σ_{|α|₁ ≤ n} |ψ_α⟩⟨ψ_α| with ℏ set
/// by N h^d = 1, at the default cutoff.
pub fn harmonic_projection(n: usize, d: usize) -> Result<FockOperator> {
    harmonic_projection_custom(n, d, default_cutoff(n), None)
}

/// Same projection with an explicit cutoff and, optionally, a caller-supplied
/// ℏ. Overriding ℏ breaks the N h^d = 1 normalization that every closed-form
/// identity assumes; such operators are for exploratory runs only.
pub fn harmonic_projection_custom(
    n: usize,
    d: usize,
    cutoff: usize,
    param: Option<SemiclassicalParam>,
) -> Result<FockOperator> {
    if cutoff < n + 2 {
        return Err(Error::CutoffTooSmall {
            cutoff,
            reason: format!("projection of level {n} needs cutoff >= {}", n + 2),
        });
    }
    let param = param.unwrap_or_else(|| linked_param(n, d));
    let space = FockSpace::new(cutoff, d, param)?;
    let size = space.len();
    let mut m = CMat::zeros(size, size);
    for i in 0..size {
        let total: usize = space.multi_index(i).iter().sum();
        if total <= n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
    }
    FockOperator::new(m, space)
}

/// Closed-form ‖D_{ξ₁}P‖_{𝕃^p} for the harmonic projection of level n in
/// dimension d, with ℏ from the N h^d = 1 linkage.
///
/// Uses h^d Tr|D_{ξ₁}P|^p = (2 h^d/(2ℏ)^{p/2}) Σ_{|α|₁=n} (α₁+1)^{p/2}; the
/// inner sum collapses to binomial counts for d ≥ 2 and to the single term
/// (n+1)^{p/2} for d = 1. For p = ∞ the value is the largest eigenvalue
/// √((n+1)/(2ℏ)).
pub fn gradient_xi_schatten_exact(n: usize, d: usize, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let param = linked_param(n, d);
    let hbar = param.hbar();
    if p.is_infinite() {
        return Ok(((n as f64 + 1.0) / (2.0 * hbar)).sqrt());
    }
    let sum = if d == 1 {
        // {|α|₁ = n} is the singleton α₁ = n.
        (n as f64 + 1.0).powf(p / 2.0)
    } else {
        (1..=n as u64 + 1)
            .map(|k| {
                linalg::binomial((d as u64 + n as u64).saturating_sub(k + 1), d as u64 - 2)
                    * (k as f64).powf(p / 2.0)
            })
            .sum()
    };
    let hd = param.h().powi(d as i32);
    let trace = 2.0 * hd / (2.0 * hbar).powf(p / 2.0) * sum;
    Ok(trace.powf(1.0 / p))
}

/// Quantum gradient of a Fock operator: ∇_x op = (i/ℏ)[p̂, op],
/// ∇_ξ op = [x/(iℏ), op]. Entries on the outermost basis layer are
/// truncation-affected.
pub fn quantum_gradient(op: &FockOperator, kind: GradientKind, axis: usize) -> Result<FockOperator> {
    if op.space.cutoff() < 2 {
        return Err(Error::CutoffTooSmall {
            cutoff: op.space.cutoff(),
            reason: "gradients need at least two basis states per axis".into(),
        });
    }
    let hbar = op.space.param().hbar();
    let m = match kind {
        GradientKind::X => {
            let p = momentum_matrix(&op.space, axis)?;
            linalg::scale(
                &linalg::commutator(&p.matrix, &op.matrix),
                C64::new(0.0, 1.0 / hbar),
            )
        }
        GradientKind::Xi => {
            let x = position_matrix(&op.space, axis)?;
            // 1/(iℏ) = -i/ℏ
            linalg::scale(
                &linalg::commutator(&x.matrix, &op.matrix),
                C64::new(0.0, -1.0 / hbar),
            )
        }
    };
    FockOperator::new(m, op.space.clone())
}

/// Samples of the 1-d ℏ-scaled Hermite functions on the grid's axis nodes:
/// row k holds ψ_k(x_j), built by the stable three-term recurrence.
///
/// Fails with a diagnostic when the domain is too narrow to hold the highest
/// state (tail safety L ≥ √(2ℏ(K+1)) + 5√ℏ) or when the Δx-weighted Gram
/// matrix of the rows deviates from the identity by more than 1e−8.
pub fn hermite_samples(space: &FockSpace, grid: &Grid) -> Result<Mat<f64>> {
    let k_max = space.cutoff();
    let hbar = space.param().hbar();
    let l = grid.half_width();
    let needed = (2.0 * hbar * (k_max as f64 + 1.0)).sqrt() + 5.0 * hbar.sqrt();
    if l < needed {
        return Err(Error::DomainTooNarrow(format!(
            "half-width {l} < {needed} required for cutoff {k_max} at hbar {hbar}"
        )));
    }
    let m = grid.points_per_axis();
    let dx = grid.spacing();
    let mut samples = Mat::<f64>::zeros(k_max, m);
    let norm0 = (std::f64::consts::PI * hbar).powf(-0.25);
    for j in 0..m {
        let u = grid.axis_node(j) / hbar.sqrt();
        let mut prev = 0.0f64;
        let mut cur = norm0 * (-0.5 * u * u).exp();
        samples[(0, j)] = cur;
        for k in 1..k_max {
            let kf = k as f64;
            let next = u * (2.0 / kf).sqrt() * cur - ((kf - 1.0) / kf).sqrt() * prev;
            samples[(k, j)] = next;
            prev = cur;
            cur = next;
        }
    }
    // Orthonormality under the Δx-weighted dot product.
    let mut worst = 0.0f64;
    for a in 0..k_max {
        for b in a..k_max {
            let dot: f64 = (0..m).map(|j| samples[(a, j)] * samples[(b, j)]).sum::<f64>() * dx;
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    if worst > 1e-8 {
        return Err(Error::DomainTooNarrow(format!(
            "Hermite rows not orthonormal on this grid (worst Gram deviation {worst:.3e}); \
             widen the domain or refine the spacing"
        )));
    }
    Ok(samples)
}
