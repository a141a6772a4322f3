//! Position-space discretization: periodic grids, potentials, discretized
//! Schrödinger operators −ℏ²Δ + V and their spectral projections.
//!
//! A [`GridOperator`] stores the integral kernel A(x_j, x_k) with the action
//! convention (Aφ)(x_j) = Σ_k A(x_j, x_k) φ(x_k) Δx^d, so traces carry a Δx^d
//! weight and kernel eigenproblems are posed for the Δx^d-weighted matrix.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::fock::{hermite_samples, FockOperator, GradientKind};
use crate::linalg::{self, CMat};
use crate::{Error, Result, SemiclassicalParam};

/// Uniform periodic grid on [−L, L)^d with M nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    points_per_axis: usize,
    dim: usize,
}

/// Dense eigensolves are kept to kernels of at most this size.
pub const MAX_DENSE_SIZE: usize = 4096;

impl Grid {
    pub fn new(half_width: f64, points_per_axis: usize, dim: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        if points_per_axis < 16 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "points_per_axis must be a power of two >= 16, got {points_per_axis}"
            )));
        }
        if dim < 1 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let size = (points_per_axis as u64).checked_pow(dim as u32);
        if size.is_none() || size.unwrap() as usize > MAX_DENSE_SIZE {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: format!(
                    "kernel size {points_per_axis}^{dim} exceeds the dense limit {MAX_DENSE_SIZE}"
                ),
            });
        }
        Ok(Self {
            half_width,
            points_per_axis,
            dim,
        })
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Δx = 2L/M.
    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// Δx^d.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of nodes M^d.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// x_j = −L + jΔx along one axis.
    #[inline]
    pub fn axis_node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim];
        for ax in (0..self.dim).rev() {
            idx[ax] = i % self.points_per_axis;
            i /= self.points_per_axis;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.points_per_axis + j)
    }

    pub fn node(&self, i: usize) -> Vec<f64> {
        self.multi_index(i)
            .into_iter()
            .map(|j| self.axis_node(j))
            .collect()
    }
}

fn default_u0() -> f64 {
    1.0
}
fn default_radius() -> f64 {
    1.0
}
fn default_eps() -> f64 {
    0.1
}

/// Cutoff frequency for the Weierstrass-type series of a rough potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", untagged)]
pub enum KMax {
    /// Resolve to the grid scale: k_max = ⌈log₂(1/Δx)⌉.
    Auto(AutoTag),
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

impl Default for KMax {
    fn default() -> Self {
        KMax::Auto(AutoTag::Auto)
    }
}

/// The trapping profile U with V = −U; built-ins satisfy U ∈ L^∞ ∩ L^{d/2}
/// and are ≤ −ε outside a bounded region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential {
    /// U(x) = u₀ − |x|².
    HarmonicWell {
        #[serde(default = "default_u0")]
        u0: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// Smooth compactly supported bump of height ≈ u₀ inside |x| < R,
    /// leveling off at −ε outside a transition zone of width R.
    Bump {
        #[serde(default = "default_u0")]
        u0: f64,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    /// Bump plus a Hölder-C^α Weierstrass-type series
    /// amplitude · Σ_k 2^{−αk} cos(2^k x). One-dimensional only.
    RoughHoelder {
        #[serde(default = "default_u0")]
        u0: f64,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_eps")]
        eps: f64,
        alpha: f64,
        amplitude: f64,
        #[serde(default)]
        kmax: KMax,
    },
    /// Node values interpolated linearly from (x, U) samples; 1-d only.
    Sampled { x: Vec<f64>, u: Vec<f64> },
}

/// C^∞ bump profile: e^{1 − 1/(1 − t²)} for |t| < 1, 0 outside.
fn bump_profile(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

impl Potential {
    /// ε in the condition "U ≤ −ε outside the trapping region"; also fixes
    /// the observation window Ω = {U > ε/2} used by the Husimi distance.
    pub fn eps(&self) -> f64 {
        match self {
            Potential::HarmonicWell { eps, .. }
            | Potential::Bump { eps, .. }
            | Potential::RoughHoelder { eps, .. } => *eps,
            Potential::Sampled { .. } => default_eps(),
        }
    }

    fn kmax_resolved(&self, grid: Option<&Grid>) -> usize {
        match self {
            Potential::RoughHoelder { kmax, .. } => match (kmax, grid) {
                (KMax::Fixed(k), _) => *k,
                (KMax::Auto(_), Some(g)) => (1.0 / g.spacing()).log2().ceil().max(0.0) as usize,
                (KMax::Auto(_), None) => 24,
            },
            _ => 0,
        }
    }

    /// U at a point. `kmax` only matters for rough potentials.
    pub fn value(&self, x: &[f64], kmax: usize) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Potential::HarmonicWell { u0, .. } => u0 - r2,
            Potential::Bump { u0, radius, eps } => {
                let r = r2.sqrt();
                u0 * bump_profile(r / radius) - eps * (1.0 - bump_profile(r / (2.0 * radius)))
            }
            Potential::RoughHoelder {
                u0,
                radius,
                eps,
                alpha,
                amplitude,
                ..
            } => {
                let r = r2.sqrt();
                let smooth =
                    u0 * bump_profile(r / radius) - eps * (1.0 - bump_profile(r / (2.0 * radius)));
                let mut rough = 0.0;
                let mut freq = 1.0f64;
                for k in 0..=kmax {
                    rough += 2.0f64.powf(-alpha * k as f64) * (freq * x[0]).cos();
                    freq *= 2.0;
                }
                smooth + amplitude * rough
            }
            Potential::Sampled { x: xs, u } => {
                let t = x[0];
                if xs.is_empty() {
                    return 0.0;
                }
                if t <= xs[0] {
                    return u[0];
                }
                if t >= *xs.last().unwrap() {
                    return *u.last().unwrap();
                }
                let i = xs.partition_point(|&v| v <= t).min(xs.len() - 1);
                let (x0, x1) = (xs[i - 1], xs[i]);
                let (u0, u1) = (u[i - 1], u[i]);
                u0 + (u1 - u0) * (t - x0) / (x1 - x0)
            }
        }
    }

    /// U sampled on every grid node.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        if grid.dim() > 1 {
            match self {
                Potential::RoughHoelder { .. } | Potential::Sampled { .. } => {
                    return Err(Error::UnsupportedDimension {
                        dim: grid.dim(),
                        reason: "rough and sampled potentials are one-dimensional".into(),
                    })
                }
                _ => {}
            }
        }
        let kmax = self.kmax_resolved(Some(grid));
        let vals: Vec<f64> = (0..grid.len())
            .map(|i| self.value(&grid.node(i), kmax))
            .collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("potential samples".into()));
        }
        Ok(vals)
    }
}

/// Dense integral kernel on a grid, acting with Δx^d quadrature weight.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub kernel: CMat,
    pub grid: Grid,
    pub param: SemiclassicalParam,
}

impl GridOperator {
    pub fn new(kernel: CMat, grid: Grid, param: SemiclassicalParam) -> Result<Self> {
        if kernel.nrows() != grid.len() || kernel.ncols() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "kernel is {}x{} but the grid has {} nodes",
                kernel.nrows(),
                kernel.ncols(),
                grid.len()
            )));
        }
        Ok(Self { kernel, grid, param })
    }

    pub fn zeros(grid: Grid, param: SemiclassicalParam) -> Self {
        let n = grid.len();
        Self {
            kernel: CMat::zeros(n, n),
            grid,
            param,
        }
    }

    /// Identity under the action convention: δ-diagonal with weight 1/Δx^d.
    pub fn identity(grid: Grid, param: SemiclassicalParam) -> Self {
        let n = grid.len();
        let w = 1.0 / grid.cell_volume();
        Self {
            kernel: CMat::from_fn(n, n, |i, j| {
                if i == j {
                    C64::from(w)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            grid,
            param,
        }
    }

    /// Tr A = Δx^d Σ_j A(x_j, x_j).
    pub fn trace(&self) -> C64 {
        let s: C64 = (0..self.grid.len()).map(|i| self.kernel[(i, i)]).sum();
        s * C64::from(self.grid.cell_volume())
    }

    /// The matrix whose spectral data matches the operator's: kernel · Δx^d.
    pub fn weighted_matrix(&self) -> CMat {
        linalg::scale(&self.kernel, C64::from(self.grid.cell_volume()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::is_hermitian(&self.kernel, tol)
    }

    pub fn same_layout(&self, other: &GridOperator) -> bool {
        self.grid == other.grid && self.param == other.param
    }

    /// (Aφ)(x_j) = Σ_k A(x_j, x_k) φ(x_k) Δx^d.
    pub fn apply(&self, phi: &[C64]) -> Vec<C64> {
        let n = self.grid.len();
        let w = self.grid.cell_volume();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| self.kernel[(i, k)] * phi[k])
                    .sum::<C64>()
                    * C64::from(w)
            })
            .collect()
    }
}

/// Kernel of the diagonal position operator x_axis.
pub fn position_kernel(grid: &Grid, axis: usize) -> Result<CMat> {
    if axis >= grid.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: grid.dim(),
        });
    }
    let n = grid.len();
    let w = 1.0 / grid.cell_volume();
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::from(grid.node(i)[axis] * w);
    }
    Ok(m)
}

/// One-axis spectral building block Σ_m g(κ_m) e^{iκ_m (x_j − x_k)} / (M Δx)
/// with κ_m = πm/L, m ∈ {−M/2, …, M/2−1}.
fn spectral_axis_kernel(grid: &Grid, g: impl Fn(f64) -> f64) -> CMat {
    let m = grid.points_per_axis();
    let l = grid.half_width();
    let dx = grid.spacing();
    let mut out = CMat::zeros(m, m);
    // depends only on (j - k) mod M
    let mut row = vec![C64::new(0.0, 0.0); m];
    for (delta, slot) in row.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for mm in -(m as i64) / 2..(m as i64) / 2 {
            let kappa = std::f64::consts::PI * mm as f64 / l;
            let phase = kappa * delta as f64 * dx;
            acc += C64::from(g(kappa)) * C64::new(phase.cos(), phase.sin());
        }
        *slot = acc / C64::from(m as f64 * dx);
    }
    for j in 0..m {
        for k in 0..m {
            out[(j, k)] = row[(j + m - k) % m];
        }
    }
    out
}

/// Kernel of the momentum operator p̂ = −iℏ∇ along one axis (spectral).
pub fn momentum_kernel(grid: &Grid, param: SemiclassicalParam, axis: usize) -> Result<CMat> {
    if axis >= grid.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: grid.dim(),
        });
    }
    let hbar = param.hbar();
    let axis_k = spectral_axis_kernel(grid, |kappa| hbar * kappa);
    Ok(lift_axis_kernel(grid, &axis_k, axis))
}

/// Embed a one-axis kernel into the d-dimensional kernel, identity
/// (δ/Δx per axis) on the other axes.
fn lift_axis_kernel(grid: &Grid, axis_kernel: &CMat, axis: usize) -> CMat {
    let n = grid.len();
    if grid.dim() == 1 {
        return axis_kernel.clone();
    }
    let w = 1.0 / grid.spacing();
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        let mi = grid.multi_index(i);
        for j in 0..n {
            let mj = grid.multi_index(j);
            let mut val = C64::new(1.0, 0.0);
            let mut ok = true;
            for ax in 0..grid.dim() {
                if ax == axis {
                    val *= axis_kernel[(mi[ax], mj[ax])];
                } else if mi[ax] == mj[ax] {
                    val *= C64::from(w);
                } else {
                    ok = false;
                    break;
                }
            }
            if ok {
                out[(i, j)] = val;
            }
        }
    }
    out
}

/// H = −ℏ²Δ + V with V = −U, kinetic part built spectrally with periodic
/// wavenumbers κ_m = πm/L.
pub fn schrodinger_hamiltonian(
    grid: &Grid,
    potential: &Potential,
    param: SemiclassicalParam,
) -> Result<GridOperator> {
    let hbar = param.hbar();
    let axis_kin = spectral_axis_kernel(grid, |kappa| hbar * hbar * kappa * kappa);
    let n = grid.len();
    let mut kernel = CMat::zeros(n, n);
    for ax in 0..grid.dim() {
        kernel += lift_axis_kernel(grid, &axis_kin, ax);
    }
    let u = potential.sample(grid)?;
    let w = 1.0 / grid.cell_volume();
    for i in 0..n {
        kernel[(i, i)] += C64::from(-u[i] * w);
    }
    GridOperator::new(kernel, *grid, param)
}

/// Spectral projection 1_{(−∞, threshold]}(H) together with its spectrum.
#[derive(Debug, Clone)]
pub struct SpectralProjection {
    pub op: GridOperator,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    /// An eigenvalue sat within 1e−10 of the threshold; it was included
    /// (closed interval) and the result may be discretization-sensitive.
    pub degenerate_at_threshold: bool,
    /// Some selected eigenfunction does not decay below 1e−8 at the domain
    /// boundary; the periodic box may be too small.
    pub boundary_warning: bool,
}

pub fn spectral_projection(h: &GridOperator, threshold: f64) -> Result<SpectralProjection> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::InvalidParameter(
            "spectral projection requires a Hermitian operator".into(),
        ));
    }
    let weighted = h.weighted_matrix();
    let (vals, vecs) = linalg::eigh(&weighted)?;
    let tie = 1e-10;
    let selected: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] <= threshold + tie)
        .collect();
    let degenerate = vals.iter().any(|&v| (v - threshold).abs() <= tie);
    let n = h.grid.len();
    let w = 1.0 / h.grid.cell_volume();
    let mut kernel = CMat::zeros(n, n);
    for &s in &selected {
        for i in 0..n {
            let vi = vecs[(i, s)];
            if vi.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                kernel[(i, j)] += vi * vecs[(j, s)].conj() * C64::from(w);
            }
        }
    }
    // boundary decay check on the selected eigenvectors
    let mut boundary_warning = false;
    'outer: for &s in &selected {
        for i in 0..n {
            let idx = h.grid.multi_index(i);
            let on_boundary = idx
                .iter()
                .any(|&j| j == 0 || j + 1 == h.grid.points_per_axis());
            if on_boundary && vecs[(i, s)].norm() / h.grid.cell_volume().sqrt() > 1e-8 {
                boundary_warning = true;
                break 'outer;
            }
        }
    }
    Ok(SpectralProjection {
        op: GridOperator::new(kernel, h.grid, h.param)?,
        rank: selected.len(),
        eigenvalues: vals,
        degenerate_at_threshold: degenerate,
        boundary_warning,
    })
}

/// Quantum gradient of a grid operator: ∇_x op = (i/ℏ)[p̂, op],
/// ∇_ξ op = [x/(iℏ), op].
pub fn quantum_gradient(op: &GridOperator, kind: GradientKind, axis: usize) -> Result<GridOperator> {
    let hbar = op.param.hbar();
    let dv = op.grid.cell_volume();
    let kernel = match kind {
        GradientKind::X => {
            let p = momentum_kernel(&op.grid, op.param, axis)?;
            linalg::scale(
                &linalg::commutator(&p, &op.kernel),
                C64::new(0.0, dv / hbar),
            )
        }
        GradientKind::Xi => {
            let x = position_kernel(&op.grid, axis)?;
            linalg::scale(
                &linalg::commutator(&x, &op.kernel),
                C64::new(0.0, -dv / hbar),
            )
        }
    };
    GridOperator::new(kernel, op.grid, op.param)
}

/// Unit-ball volume ω_d.
fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => {
            let hd = d as f64 / 2.0;
            std::f64::consts::PI.powf(hd) / gamma_half_integer(d + 2)
        }
    }
}

/// Γ(n/2) for integer n ≥ 1, used for ω_d = π^{d/2}/Γ(d/2 + 1).
fn gamma_half_integer(n: usize) -> f64 {
    // Γ(n/2) via recursion from Γ(1/2) = √π and Γ(1) = 1.
    let mut x = n as f64 / 2.0;
    let mut acc = 1.0;
    while x > 1.5 {
        x -= 1.0;
        acc *= x;
    }
    if (x - 1.0).abs() < 1e-12 {
        acc
    } else {
        acc * std::f64::consts::PI.sqrt()
    }
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    whole: f64,
    fa: f64,
    fm: f64,
    fb: f64,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = (left + right - whole) / 15.0;
    if depth == 0 || err.abs() <= tol {
        (left + right + err, err.abs())
    } else {
        let (lv, le) = adaptive_simpson(f, a, m, tol / 2.0, depth - 1, left, fa, flm, fm);
        let (rv, re) = adaptive_simpson(f, m, b, tol / 2.0, depth - 1, right, fm, frm, fb);
        (lv + rv, le + re)
    }
}

fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-12);
    let (value, err) = adaptive_simpson(&f, a, b, rel_tol * scale, 48, whole, fa, fm, fb);
    let achieved = err / value.abs().max(1e-300);
    if value != 0.0 && achieved > rel_tol * 10.0 {
        return Err(Error::QuadratureNotConverged {
            achieved,
            target: rel_tol,
        });
    }
    Ok(value)
}

/// Support radius beyond which U_+ vanishes for the built-in potentials.
fn positive_support_radius(potential: &Potential) -> f64 {
    match potential {
        Potential::HarmonicWell { u0, .. } => u0.max(0.0).sqrt() + 1.0,
        Potential::Bump { radius, .. } | Potential::RoughHoelder { radius, .. } => 2.0 * radius,
        Potential::Sampled { x, .. } => x
            .iter()
            .fold(1.0f64, |acc, v| acc.max(v.abs())),
    }
}

/// Classical phase-space volume ∫∫ 1_{|ξ|² ≤ U(x)} dx dξ = ω_d ∫ U_+^{d/2} dx,
/// by adaptive quadrature with relative error target 1e−8. For d = 2 only the
/// radially symmetric built-ins are supported.
pub fn classical_phase_volume(potential: &Potential, d: usize) -> Result<f64> {
    let omega = unit_ball_volume(d);
    let kmax = potential.kmax_resolved(None);
    let r = positive_support_radius(potential);
    match d {
        1 => {
            let f = |x: f64| {
                let u = potential.value(&[x], kmax);
                if u > 0.0 {
                    omega * u.sqrt()
                } else {
                    0.0
                }
            };
            integrate_adaptive(f, -r, r, 1e-8)
        }
        2 => match potential {
            Potential::RoughHoelder { .. } | Potential::Sampled { .. } => {
                Err(Error::UnsupportedDimension {
                    dim: 2,
                    reason: "classical volume in d=2 needs a radial potential".into(),
                })
            }
            _ => {
                let f = |rr: f64| {
                    let u = potential.value(&[rr, 0.0], kmax);
                    if u > 0.0 {
                        omega * u * 2.0 * std::f64::consts::PI * rr
                    } else {
                        0.0
                    }
                };
                integrate_adaptive(f, 0.0, r, 1e-8)
            }
        },
        _ => Err(Error::UnsupportedDimension {
            dim: d,
            reason: "classical volume implemented for d in {1, 2}".into(),
        }),
    }
}

/// Represent a Fock operator as a grid kernel
/// A(x_j, x_k) = Σ_{αβ} ψ_α(x_j) M_{αβ} ψ_β(x_k).
pub fn fock_to_grid(op: &FockOperator, grid: &Grid) -> Result<GridOperator> {
    let d = op.space.dim();
    if d != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "operator dimension {d} vs grid dimension {}",
            grid.dim()
        )));
    }
    let axis_samples = hermite_samples(&op.space, grid)?;
    let nb = op.space.len();
    let ng = grid.len();
    // B[α, J] = Π_i ψ_{α_i}(x_{J_i})
    let mut basis = Mat::<f64>::zeros(nb, ng);
    for a in 0..nb {
        let alpha = op.space.multi_index(a);
        for j in 0..ng {
            let idx = grid.multi_index(j);
            let mut v = 1.0;
            for ax in 0..d {
                v *= axis_samples[(alpha[ax], idx[ax])];
            }
            basis[(a, j)] = v;
        }
    }
    let basis_c = CMat::from_fn(nb, ng, |i, j| C64::from(basis[(i, j)]));
    let tmp = &op.matrix * &basis_c; // nb x ng
    let kernel = basis_c.transpose().to_owned() * tmp;
    GridOperator::new(kernel, *grid, op.space.param())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::harmonic_projection;
    use approx::assert_relative_eq;

    fn param(hbar: f64) -> SemiclassicalParam {
        SemiclassicalParam::new(hbar).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 15, 1).is_err());
        assert!(Grid::new(1.0, 20, 1).is_err());
        assert!(Grid::new(-1.0, 32, 1).is_err());
        assert!(Grid::new(1.0, 256, 2).is_err()); // 256^2 > dense limit
        let g = Grid::new(3.0, 32, 1).unwrap();
        assert_relative_eq!(g.spacing() * g.points_per_axis() as f64, 6.0);
    }

    #[test]
    fn free_hamiltonian_spectrum_is_quadratic() {
        let grid = Grid::new(2.0, 32, 1).unwrap();
        let pot = Potential::Sampled {
            x: vec![-2.0, 2.0],
            u: vec![0.0, 0.0],
        };
        let hbar = 0.5;
        let h = schrodinger_hamiltonian(&grid, &pot, param(hbar)).unwrap();
        assert!(h.is_hermitian(1e-12));
        let mut got = linalg::eigvalsh(&h.weighted_matrix()).unwrap();
        let mut expected: Vec<f64> = (-16i64..16)
            .map(|m| {
                let kappa = std::f64::consts::PI * m as f64 / 2.0;
                hbar * hbar * kappa * kappa
            })
            .collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip(expected.iter()) {
            assert_relative_eq!(g, e, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn harmonic_hamiltonian_eigenvalues() {
        // V = |x|²: eigenvalues (2n+1)ℏ, relative error ≤ 1e−6 for n ≤ 10.
        let hbar = 0.1;
        let grid = Grid::new(6.0, 256, 1).unwrap();
        let pot = Potential::HarmonicWell { u0: 0.0, eps: 0.1 };
        let h = schrodinger_hamiltonian(&grid, &pot, param(hbar)).unwrap();
        let vals = linalg::eigvalsh(&h.weighted_matrix()).unwrap();
        for n in 0..=10 {
            let expected = (2.0 * n as f64 + 1.0) * hbar;
            assert_relative_eq!(vals[n], expected, max_relative = 1e-6);
        }
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let grid = Grid::new(2.0, 32, 1).unwrap();
        let c = 0.7;
        let flat = Potential::Sampled {
            x: vec![-2.0, 2.0],
            u: vec![0.0, 0.0],
        };
        let shifted = Potential::Sampled {
            x: vec![-2.0, 2.0],
            u: vec![-c, -c], // V = −U = c
        };
        let p = param(0.3);
        let h0 = schrodinger_hamiltonian(&grid, &flat, p).unwrap();
        let h1 = schrodinger_hamiltonian(&grid, &shifted, p).unwrap();
        let v0 = linalg::eigvalsh(&h0.weighted_matrix()).unwrap();
        let v1 = linalg::eigvalsh(&h1.weighted_matrix()).unwrap();
        for (a, b) in v0.iter().zip(v1.iter()) {
            assert_relative_eq!(a + c, b, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn projection_rank_counts_shifted_oscillator_levels() {
        // V = |x|² − (2m+2)ℏ has exactly m+1 eigenvalues strictly below 0.
        let hbar = 0.2;
        let grid = Grid::new(6.0, 128, 1).unwrap();
        for m in 0..4usize {
            let pot = Potential::HarmonicWell {
                u0: (2.0 * m as f64 + 2.0) * hbar,
                eps: 0.1,
            };
            let h = schrodinger_hamiltonian(&grid, &pot, param(hbar)).unwrap();
            let proj = spectral_projection(&h, 0.0).unwrap();
            assert_eq!(proj.rank, m + 1, "rank at m={m}");
            assert!(!proj.degenerate_at_threshold);
        }
    }

    #[test]
    fn nonnegative_v_gives_zero_projection() {
        let grid = Grid::new(3.0, 32, 1).unwrap();
        let pot = Potential::HarmonicWell { u0: -1.0, eps: 0.1 };
        let h = schrodinger_hamiltonian(&grid, &pot, param(0.2)).unwrap();
        let proj = spectral_projection(&h, 0.0).unwrap();
        assert_eq!(proj.rank, 0);
        assert!(linalg::operator_scale(&proj.op.kernel) == 0.0);
    }

    #[test]
    fn projection_is_idempotent() {
        let grid = Grid::new(6.0, 64, 1).unwrap();
        let pot = Potential::HarmonicWell { u0: 1.0, eps: 0.1 };
        let h = schrodinger_hamiltonian(&grid, &pot, param(0.1)).unwrap();
        let proj = spectral_projection(&h, 0.0).unwrap();
        let pw = proj.op.weighted_matrix();
        let defect = &(&pw * &pw) - &pw;
        let top = linalg::singular_values(&defect).unwrap()[0];
        assert!(top <= 1e-10, "idempotence defect {top}");
    }

    #[test]
    fn classical_volume_examples() {
        // d=1, U = 1 − x²: ∫ 2√(1−x²) = π
        let pot = Potential::HarmonicWell { u0: 1.0, eps: 0.1 };
        let v = classical_phase_volume(&pot, 1).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI, max_relative = 1e-7);
        // midpoint-rule oracle at 1e6 nodes
        let n = 1_000_000;
        let dx = 2.0 / n as f64;
        let oracle: f64 = (0..n)
            .map(|i| {
                let x = -1.0 + (i as f64 + 0.5) * dx;
                2.0 * (1.0 - x * x).max(0.0).sqrt() * dx
            })
            .sum();
        assert_relative_eq!(v, oracle, max_relative = 1e-6);
        // U ≤ 0 ⇒ 0
        let neg = Potential::HarmonicWell { u0: -0.5, eps: 0.1 };
        assert_eq!(classical_phase_volume(&neg, 1).unwrap(), 0.0);
        // d=2, U = 1 − |x|²: π²/2
        let v2 = classical_phase_volume(&pot, 2).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(v2, pi * pi / 2.0, max_relative = 1e-7);
    }

    #[test]
    fn fock_to_grid_preserves_trace_and_frobenius() {
        let p = harmonic_projection(3, 1).unwrap();
        let hbar = p.space.param().hbar();
        let k = p.space.cutoff();
        let l = (2.0 * hbar * (k as f64 + 1.0)).sqrt() + 6.0 * hbar.sqrt();
        let grid = Grid::new(l, 128, 1).unwrap();
        let g = fock_to_grid(&p, &grid).unwrap();
        let n_particles = 4.0;
        assert!((g.trace().re - n_particles).abs() <= 1e-8 * n_particles);
        // Frobenius (𝕃² without the h factor) agreement within 1e−6 relative
        let frob_fock: f64 = {
            let m = &p.matrix;
            let mut s = 0.0;
            for i in 0..p.space.len() {
                for j in 0..p.space.len() {
                    s += m[(i, j)].norm_sqr();
                }
            }
            s.sqrt()
        };
        let wm = g.weighted_matrix();
        let mut s = 0.0;
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                s += wm[(i, j)].norm_sqr();
            }
        }
        let frob_grid = s.sqrt();
        assert_relative_eq!(frob_fock, frob_grid, max_relative = 1e-6);
    }

    #[test]
    fn fock_to_grid_rank_one_gaussian() {
        let p = harmonic_projection(0, 1).unwrap();
        let hbar = p.space.param().hbar();
        let grid = Grid::new(4.0, 128, 1).unwrap();
        let g = fock_to_grid(&p, &grid).unwrap();
        let norm0 = (std::f64::consts::PI * hbar).powf(-0.25);
        for j in [0usize, 13, 31, 40] {
            for k in [5usize, 22, 50] {
                let x = grid.axis_node(j);
                let y = grid.axis_node(k);
                let expected =
                    norm0 * norm0 * (-(x * x + y * y) / (2.0 * hbar)).exp();
                assert_relative_eq!(g.kernel[(j, k)].re, expected, epsilon = 1e-10);
                assert_relative_eq!(g.kernel[(j, k)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn potential_toml_round_trip() {
        let toml_src = r#"type = "rough_hoelder"
alpha = 0.5
amplitude = 0.1
"#;
        let pot: Potential = toml_edit_parse(toml_src);
        match pot {
            Potential::RoughHoelder {
                alpha,
                amplitude,
                kmax,
                ..
            } => {
                assert_eq!(alpha, 0.5);
                assert_eq!(amplitude, 0.1);
                assert_eq!(kmax, KMax::default());
            }
            _ => panic!("wrong variant"),
        }
    }

    // serde_json stands in for the TOML front end in unit tests; the CLI
    // exercises real TOML.
    fn toml_edit_parse(src: &str) -> Potential {
        let mut map = serde_json::Map::new();
        for line in src.lines() {
            if let Some((k, v)) = line.split_once('=') {
                let k = k.trim();
                let v = v.trim().trim_matches('"');
                let val = v
                    .parse::<f64>()
                    .map(|f| serde_json::json!(f))
                    .unwrap_or_else(|_| serde_json::json!(v));
                map.insert(k.into(), val);
            }
        }
        serde_json::from_value(serde_json::Value::Object(map)).unwrap()
    }
}
