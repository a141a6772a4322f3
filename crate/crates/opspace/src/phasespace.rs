//! Transforms between operators and phase-space functions: Wigner, Husimi,
//! Weyl and Wick quantization, quantum translations, and the semiclassical
//! convolution f ⋆ op.
//!
//! Discrete conventions (one-dimensional transforms). The dual grid is fixed
//! by the substitution y = 2kΔx in the Wigner integral, so Δξ = πℏ/(2L) and
//! ξ_m = mΔξ for m ∈ {−M/2, …, M/2−1}:
//!
//!   f(x_j, ξ_m) = 2Δx Σ_k P(x_j + kΔx, x_j − kΔx) e^{−2πikm/M},
//!
//! with the kernel treated as zero outside the box (kernels are assumed to
//! decay near the wrap boundary; zero extension suppresses the periodic alias
//! ghost at |x| ≈ L that a wrapped sum would produce). The trace identity
//! h Tr(Op_f) = ΣΣ f ΔxΔξ is exact in this convention, and the inverse
//! (Weyl quantization) interpolates f to the half-grid in x so that both
//! kernel arguments stay on-grid:
//!
//!   P(a, b) = (1/(2MΔx)) Σ_m f(x_{(a+b)/2}, ξ_m) e^{iπ(a−b)m/M}.
//!
//! Translations are exact unitary conjugations for grid-compatible points:
//! x₀ a multiple of Δx and ξ₀ a multiple of Δξ_t = πℏ/L = 2Δξ.

use std::io::{BufWriter, Write};
use std::path::Path;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::grid::{Grid, GridOperator};
use crate::linalg::CMat;
use crate::{Error, Result, SemiclassicalParam};

/// A point z = (x₀, ξ₀) of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
}

impl PhasePoint {
    pub fn new(x: f64, xi: f64) -> Self {
        Self { x, xi }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.xi)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            x: self.x * t,
            xi: self.xi * t,
        }
    }
}

/// Real samples f(x_j, ξ_m) on the phase-space grid: row j is the x index,
/// column c holds ξ_m with m = c − M/2.
#[derive(Debug, Clone)]
pub struct PhaseField {
    pub values: Mat<f64>,
    pub grid: Grid,
    pub param: SemiclassicalParam,
}

fn require_1d(grid: &Grid) -> Result<()> {
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            dim: grid.dim(),
            reason: "phase-space transforms are implemented for d = 1".into(),
        });
    }
    Ok(())
}

impl PhaseField {
    pub fn new(values: Mat<f64>, grid: Grid, param: SemiclassicalParam) -> Result<Self> {
        require_1d(&grid)?;
        let m = grid.points_per_axis();
        if values.nrows() != m || values.ncols() != m {
            return Err(Error::GridMismatch(format!(
                "field is {}x{} but the phase grid is {m}x{m}",
                values.nrows(),
                values.ncols()
            )));
        }
        for j in 0..m {
            for c in 0..m {
                if !values[(j, c)].is_finite() {
                    return Err(Error::NonFinite(format!("field value at ({j}, {c})")));
                }
            }
        }
        Ok(Self {
            values,
            grid,
            param,
        })
    }

    pub fn zeros(grid: Grid, param: SemiclassicalParam) -> Result<Self> {
        require_1d(&grid)?;
        let m = grid.points_per_axis();
        Ok(Self {
            values: Mat::zeros(m, m),
            grid,
            param,
        })
    }

    /// Sample a closure f(x, ξ) on the phase grid.
    pub fn from_fn(
        grid: Grid,
        param: SemiclassicalParam,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        require_1d(&grid)?;
        let m = grid.points_per_axis();
        let mut values = Mat::zeros(m, m);
        for j in 0..m {
            let x = grid.axis_node(j);
            for c in 0..m {
                values[(j, c)] = f(x, xi_node_of(&grid, param, c));
            }
        }
        Self::new(values, grid, param)
    }

    /// Δξ = πℏ/(2L).
    pub fn xi_spacing(&self) -> f64 {
        xi_spacing_of(&self.grid, self.param)
    }

    /// Translation-compatible ξ spacing Δξ_t = πℏ/L = 2Δξ.
    pub fn translation_xi_spacing(&self) -> f64 {
        2.0 * self.xi_spacing()
    }

    /// ξ_m for column c, with m = c − M/2.
    pub fn xi_node(&self, c: usize) -> f64 {
        xi_node_of(&self.grid, self.param, c)
    }

    /// Phase-space cell ΔxΔξ.
    pub fn cell(&self) -> f64 {
        self.grid.spacing() * self.xi_spacing()
    }

    /// ΣΣ f ΔxΔξ.
    pub fn integral(&self) -> f64 {
        let m = self.grid.points_per_axis();
        let mut s = 0.0;
        for j in 0..m {
            for c in 0..m {
                s += self.values[(j, c)];
            }
        }
        s * self.cell()
    }

    /// Discrete L^p norm: (ΣΣ |f|^p ΔxΔξ)^{1/p}, max |f| for p = ∞.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
        }
        let m = self.grid.points_per_axis();
        if p.is_infinite() {
            let mut top = 0.0f64;
            for j in 0..m {
                for c in 0..m {
                    top = top.max(self.values[(j, c)].abs());
                }
            }
            return Ok(top);
        }
        let mut s = 0.0;
        for j in 0..m {
            for c in 0..m {
                s += self.values[(j, c)].abs().powf(p);
            }
        }
        Ok((s * self.cell()).powf(1.0 / p))
    }

    /// Pointwise product f·g on matching grids.
    pub fn product(&self, other: &PhaseField) -> Result<PhaseField> {
        if self.grid != other.grid || self.param != other.param {
            return Err(Error::GridMismatch("field product on mismatched grids".into()));
        }
        let m = self.grid.points_per_axis();
        let values = Mat::from_fn(m, m, |j, c| self.values[(j, c)] * other.values[(j, c)]);
        PhaseField::new(values, self.grid, self.param)
    }

    /// Spectral ∂f/∂x (periodic over the x box).
    pub fn partial_x(&self) -> PhaseField {
        self.spectral_derivative(true)
    }

    /// Spectral ∂f/∂ξ (periodic over the ξ box).
    pub fn partial_xi(&self) -> PhaseField {
        self.spectral_derivative(false)
    }

    fn spectral_derivative(&self, along_x: bool) -> PhaseField {
        let m = self.grid.points_per_axis();
        let period = if along_x {
            2.0 * self.grid.half_width()
        } else {
            m as f64 * self.xi_spacing()
        };
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let mut out = Mat::zeros(m, m);
        let mut buf = vec![C64::new(0.0, 0.0); m];
        for line in 0..m {
            for i in 0..m {
                let v = if along_x {
                    self.values[(i, line)]
                } else {
                    self.values[(line, i)]
                };
                buf[i] = C64::from(v);
            }
            fwd.process(&mut buf);
            for (q, slot) in buf.iter_mut().enumerate() {
                let freq = if q < m / 2 { q as i64 } else { q as i64 - m as i64 };
                // drop the unpaired Nyquist mode to keep the derivative real
                let k = if freq == -(m as i64) / 2 {
                    0.0
                } else {
                    2.0 * std::f64::consts::PI * freq as f64 / period
                };
                *slot *= C64::new(0.0, k);
            }
            inv.process(&mut buf);
            for i in 0..m {
                let v = buf[i].re / m as f64;
                if along_x {
                    out[(i, line)] = v;
                } else {
                    out[(line, i)] = v;
                }
            }
        }
        PhaseField {
            values: out,
            grid: self.grid,
            param: self.param,
        }
    }

    /// CSV export with one `x, xi, value` row per node.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "# columns: x, xi, value")?;
        let m = self.grid.points_per_axis();
        for j in 0..m {
            let x = self.grid.axis_node(j);
            for c in 0..m {
                writeln!(w, "{x:.12e},{:.12e},{:.12e}", self.xi_node(c), self.values[(j, c)])?;
            }
        }
        Ok(())
    }

    /// Binary matrix dump: header M (u64), L (f64), ℏ (f64), d (u64), then
    /// row-major f64 values (little endian).
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        let m = self.grid.points_per_axis();
        w.write_all(&(m as u64).to_le_bytes())?;
        w.write_all(&self.grid.half_width().to_le_bytes())?;
        w.write_all(&self.param.hbar().to_le_bytes())?;
        w.write_all(&1u64.to_le_bytes())?;
        for j in 0..m {
            for c in 0..m {
                w.write_all(&self.values[(j, c)].to_le_bytes())?;
            }
        }
        Ok(())
    }
}

fn xi_spacing_of(grid: &Grid, param: SemiclassicalParam) -> f64 {
    std::f64::consts::PI * param.hbar() / (2.0 * grid.half_width())
}

fn xi_node_of(grid: &Grid, param: SemiclassicalParam, c: usize) -> f64 {
    let m = grid.points_per_axis() as i64;
    (c as i64 - m / 2) as f64 * xi_spacing_of(grid, param)
}

/// Wigner transform f(x_j, ξ_m) = 2Δx Σ_k P(x_j + kΔx, x_j − kΔx) e^{−2πikm/M}
/// of a Hermitian grid operator; the imaginary part (≤ 1e−10 for Hermitian
/// input) is checked and discarded.
pub fn wigner(op: &GridOperator) -> Result<PhaseField> {
    require_1d(&op.grid)?;
    let m = op.grid.points_per_axis();
    let dx = op.grid.spacing();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let mut values = Mat::zeros(m, m);
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut scale = 0.0f64;
    let mut worst_imag = 0.0f64;
    for j in 0..m {
        for slot in buf.iter_mut() {
            *slot = C64::new(0.0, 0.0);
        }
        let reach = j.min(m - 1 - j) as i64;
        for k in -reach..=reach {
            let a = (j as i64 + k) as usize;
            let b = (j as i64 - k) as usize;
            buf[((k + m as i64) % m as i64) as usize] = op.kernel[(a, b)];
        }
        fft.process(&mut buf);
        for c in 0..m {
            let mm = (c + m / 2) % m;
            let v = buf[mm] * C64::from(2.0 * dx);
            values[(j, c)] = v.re;
            scale = scale.max(v.re.abs());
            worst_imag = worst_imag.max(v.im.abs());
        }
    }
    if worst_imag > 1e-10 * (1.0 + scale) {
        return Err(Error::InvalidParameter(format!(
            "Wigner transform of a non-Hermitian operator: imaginary part {worst_imag:.3e}"
        )));
    }
    PhaseField::new(values, op.grid, op.param)
}

/// Trigonometric interpolation of each ξ column to the 2M-point half-grid in
/// x (FFT zero padding with the Nyquist mode split).
fn half_grid_interpolation(f: &PhaseField) -> Mat<f64> {
    let m = f.grid.points_per_axis();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(2 * m);
    let mut out = Mat::zeros(2 * m, m);
    let mut spectrum = vec![C64::new(0.0, 0.0); m];
    let mut padded = vec![C64::new(0.0, 0.0); 2 * m];
    for c in 0..m {
        for j in 0..m {
            spectrum[j] = C64::from(f.values[(j, c)]);
        }
        fwd.process(&mut spectrum);
        for slot in padded.iter_mut() {
            *slot = C64::new(0.0, 0.0);
        }
        padded[0] = spectrum[0];
        for kappa in 1..m / 2 {
            padded[kappa] = spectrum[kappa];
            padded[2 * m - kappa] = spectrum[m - kappa];
        }
        let nyquist = spectrum[m / 2] * C64::from(0.5);
        padded[m / 2] = nyquist;
        padded[2 * m - m / 2] = nyquist;
        inv.process(&mut padded);
        for t in 0..2 * m {
            out[(t, c)] = padded[t].re / m as f64;
        }
    }
    out
}

/// Weyl quantization: the discrete inverse of [`wigner`],
/// P(a, b) = (1/(2MΔx)) Σ_m f(x_{(a+b)/2}, ξ_m) e^{iπ(a−b)m/M}, with the
/// half-integer x positions filled by trigonometric interpolation.
pub fn weyl_quantize(f: &PhaseField) -> Result<GridOperator> {
    let m = f.grid.points_per_axis();
    let dx = f.grid.spacing();
    let half = half_grid_interpolation(f);
    let mut planner = FftPlanner::<f64>::new();
    let inv = planner.plan_fft_inverse(m);
    let mut kernel = CMat::zeros(m, m);
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let norm = 1.0 / (2.0 * m as f64 * dx);
    for t in 0..=(2 * m - 2) {
        // P(a, t − a) = (1/(2MΔx)) Σ_m [F(t, m) e^{−iπtm/M}] e^{2πiam/M}
        for c in 0..m {
            let mm = (c + m / 2) % m;
            let signed_m = c as i64 - (m as i64) / 2;
            let phase = -std::f64::consts::PI * (t as i64 * signed_m) as f64 / m as f64;
            buf[mm] = C64::from(half[(t, c)]) * C64::new(phase.cos(), phase.sin());
        }
        inv.process(&mut buf);
        let lo = t.saturating_sub(m - 1);
        let hi = t.min(m - 1);
        for a in lo..=hi {
            kernel[(a, t - a)] = buf[a] * C64::from(norm);
        }
    }
    GridOperator::new(kernel, f.grid, f.param)
}

fn compatible_steps(
    grid: &Grid,
    param: SemiclassicalParam,
    z: PhasePoint,
) -> Result<(i64, i64)> {
    let dx = grid.spacing();
    let dxi = 2.0 * xi_spacing_of(grid, param);
    let r = z.x / dx;
    let s = z.xi / dxi;
    let tol = 1e-9;
    if (r - r.round()).abs() > tol * (1.0 + r.abs()) || (s - s.round()).abs() > tol * (1.0 + s.abs())
    {
        return Err(Error::IncompatiblePhasePoint {
            x: z.x,
            xi: z.xi,
            nearest_x: r.round() * dx,
            nearest_xi: s.round() * dxi,
        });
    }
    Ok((r.round() as i64, s.round() as i64))
}

/// Whether z is a grid-compatible translation (x₀ ∈ Δx·ℤ, ξ₀ ∈ Δξ_t·ℤ).
pub fn is_compatible(grid: &Grid, param: SemiclassicalParam, z: PhasePoint) -> bool {
    compatible_steps(grid, param, z).is_ok()
}

/// Snap a phase point to the nearest grid-compatible translation.
pub fn snap_to_grid(grid: &Grid, param: SemiclassicalParam, z: PhasePoint) -> PhasePoint {
    let dx = grid.spacing();
    let dxi = 2.0 * xi_spacing_of(grid, param);
    PhasePoint {
        x: (z.x / dx).round() * dx,
        xi: (z.xi / dxi).round() * dxi,
    }
}

/// Quantum phase-space translation T_z op = W_z op W_z* by the
/// Weyl–Heisenberg unitary (W_zφ)(x) = e^{iξ₀(x−x₀/2)/ℏ} φ(x−x₀). The
/// half-shift phase cancels in conjugation, so the kernel picks up exactly
/// (T_z op)(a, b) = e^{iξ₀(x_a−x_b)/ℏ} op(a−r, b−r) with r = x₀/Δx.
pub fn translate(op: &GridOperator, z: PhasePoint) -> Result<GridOperator> {
    require_1d(&op.grid)?;
    let (r, s) = compatible_steps(&op.grid, op.param, z)?;
    let m = op.grid.points_per_axis() as i64;
    let r = r.rem_euclid(m);
    let s = s.rem_euclid(m);
    let mm = m as usize;
    let mut kernel = CMat::zeros(mm, mm);
    let two_pi = 2.0 * std::f64::consts::PI;
    for a in 0..mm {
        let src_a = ((a as i64 - r).rem_euclid(m)) as usize;
        for b in 0..mm {
            let src_b = ((b as i64 - r).rem_euclid(m)) as usize;
            let phase = two_pi * (s * (a as i64 - b as i64)) as f64 / m as f64;
            kernel[(a, b)] = C64::new(phase.cos(), phase.sin()) * op.kernel[(src_a, src_b)];
        }
    }
    GridOperator::new(kernel, op.grid, op.param)
}

/// Semiclassical convolution f ⋆ op = Σ_z f(z) (T_z op) ΔxΔξ_t over the
/// translation-compatible sublattice of the phase grid (ξ on even columns).
pub fn semiclassical_convolve(f: &PhaseField, op: &GridOperator) -> Result<GridOperator> {
    require_1d(&op.grid)?;
    if f.grid != op.grid || f.param != op.param {
        return Err(Error::GridMismatch(
            "semiclassical convolution needs the field and operator on one grid".into(),
        ));
    }
    let m = f.grid.points_per_axis();
    let weight = f.grid.spacing() * f.translation_xi_spacing();
    let two_pi = 2.0 * std::f64::consts::PI;
    // C[j, δ] = Σ_{s'} f(x_j, 2s'Δξ) e^{2πis'δ/M}; the ξ translation by
    // s'Δξ_t contributes the kernel phase e^{2πis'(a−b)/M}.
    let roots: Vec<C64> = (0..m)
        .map(|t| {
            let phase = two_pi * t as f64 / m as f64;
            C64::new(phase.cos(), phase.sin())
        })
        .collect();
    let mut table = CMat::zeros(m, m);
    let m_i = m as i64;
    for j in 0..m {
        for delta in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for sp in -m_i / 4..m_i / 4 {
                let col = (2 * sp + m_i / 2) as usize;
                let idx = ((sp * delta as i64).rem_euclid(m_i)) as usize;
                acc += C64::from(f.values[(j, col)]) * roots[idx];
            }
            table[(j, delta)] = acc;
        }
    }
    let mut kernel = CMat::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let delta = (a + m - b) % m;
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m {
                let src_a = (a + m + m / 2 - j) % m;
                let src_b = (b + m + m / 2 - j) % m;
                acc += table[(j, delta)] * op.kernel[(src_a, src_b)];
            }
            kernel[(a, b)] = acc * C64::from(weight);
        }
    }
    GridOperator::new(kernel, f.grid, f.param)
}

/// The Gaussian g_h(z) = (2/h) e^{−|z|²/ℏ} sampled on the phase grid.
pub fn gaussian_field(grid: Grid, param: SemiclassicalParam) -> Result<PhaseField> {
    let hbar = param.hbar();
    let h = param.h();
    PhaseField::from_fn(grid, param, |x, xi| {
        2.0 / h * (-(x * x + xi * xi) / hbar).exp()
    })
}

/// Circular convolution g_h * f on the phase grid (DFT multiplication).
pub fn gaussian_smooth(f: &PhaseField) -> Result<PhaseField> {
    let g = gaussian_field(f.grid, f.param)?;
    let m = f.grid.points_per_axis();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    // 2-d FFT of both fields, with g recentred so the peak sits at index (0, 0)
    let mut fa: Vec<C64> = Vec::with_capacity(m * m);
    let mut ga: Vec<C64> = Vec::with_capacity(m * m);
    for j in 0..m {
        for c in 0..m {
            fa.push(C64::from(f.values[(j, c)]));
            ga.push(C64::from(g.values[((j + m / 2) % m, (c + m / 2) % m)]));
        }
    }
    let fft2 = |data: &mut [C64]| {
        for j in 0..m {
            fwd.process(&mut data[j * m..(j + 1) * m]);
        }
        let mut col = vec![C64::new(0.0, 0.0); m];
        for c in 0..m {
            for j in 0..m {
                col[j] = data[j * m + c];
            }
            fwd.process(&mut col);
            for j in 0..m {
                data[j * m + c] = col[j];
            }
        }
    };
    fft2(&mut fa);
    fft2(&mut ga);
    let weight = f.cell() / (m * m) as f64;
    for (a, b) in fa.iter_mut().zip(ga.iter()) {
        *a *= *b * C64::from(weight);
    }
    // inverse 2-d FFT
    for j in 0..m {
        inv.process(&mut fa[j * m..(j + 1) * m]);
    }
    let mut col = vec![C64::new(0.0, 0.0); m];
    for c in 0..m {
        for j in 0..m {
            col[j] = fa[j * m + c];
        }
        inv.process(&mut col);
        for j in 0..m {
            fa[j * m + c] = col[j];
        }
    }
    let values = Mat::from_fn(m, m, |j, c| fa[j * m + c].re);
    PhaseField::new(values, f.grid, f.param)
}

/// Husimi transform f̃_P = g_h * f_P: Gaussian smoothing of the Wigner
/// transform. Nonnegative (up to a −1e−8 floor) for positive-semidefinite
/// input.
pub fn husimi(op: &GridOperator) -> Result<PhaseField> {
    gaussian_smooth(&wigner(op)?)
}

/// The Töplitz generator Op_{g_h} = (1/h)|ψ₀⟩⟨ψ₀| as a grid kernel, with the
/// ground-state samples renormalized so that Δx Σ ψ₀² = 1 exactly.
pub fn gaussian_projector(grid: Grid, param: SemiclassicalParam) -> Result<GridOperator> {
    require_1d(&grid)?;
    let hbar = param.hbar();
    let m = grid.points_per_axis();
    let mut psi: Vec<f64> = (0..m)
        .map(|j| {
            let x = grid.axis_node(j);
            (std::f64::consts::PI * hbar).powf(-0.25) * (-x * x / (2.0 * hbar)).exp()
        })
        .collect();
    let norm = (grid.spacing() * psi.iter().map(|v| v * v).sum::<f64>()).sqrt();
    if norm < 1e-12 {
        return Err(Error::DomainTooNarrow(
            "ground state does not fit on this grid".into(),
        ));
    }
    for v in psi.iter_mut() {
        *v /= norm;
    }
    let h = param.h();
    let kernel = CMat::from_fn(m, m, |a, b| C64::from(psi[a] * psi[b] / h));
    GridOperator::new(kernel, grid, param)
}

/// Wick (Töplitz) quantization Õp_f = f ⋆ Op_{g_h}. Positivity preserving:
/// f ≥ 0 gives a positive-semidefinite operator, and f ≡ 1 reproduces the
/// identity on states concentrated in the interior of the phase-space box.
pub fn wick_quantize(f: &PhaseField) -> Result<GridOperator> {
    let gh = gaussian_projector(f.grid, f.param)?;
    semiclassical_convolve(f, &gh)
}

/// A reproducible smooth test field: a low-order trigonometric polynomial in
/// (x, ξ) under a compactly supported window in x, band-limited in ξ. The
/// window radius is 0.6 L, further clamped so every nonzero row keeps the
/// full ξ band inside its anti-diagonal reach; this makes the Wigner/Weyl
/// round trip exact and keeps Gaussian-weighted translates away from the box
/// edge. With `nonneg` the field is pointwise ≥ 0.
pub fn random_smooth(
    grid: Grid,
    param: SemiclassicalParam,
    seed: u64,
    nonneg: bool,
) -> Result<PhaseField> {
    require_1d(&grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = grid.points_per_axis();
    let l = grid.half_width();
    const FX: usize = 3;
    const FXI: usize = 3;
    let mut amp = [[0.0f64; 2 * FXI + 1]; 2 * FX + 1];
    let mut phase_x = [[0.0f64; 2 * FXI + 1]; 2 * FX + 1];
    let mut phase_xi = [[0.0f64; 2 * FXI + 1]; 2 * FX + 1];
    let mut total = 0.0;
    for kx in 0..=2 * FX {
        for kxi in 0..=2 * FXI {
            let a: f64 = rng.gen_range(-1.0..1.0);
            amp[kx][kxi] = a;
            total += a.abs();
            phase_x[kx][kxi] = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            phase_xi[kx][kxi] = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        }
    }
    let offset = if nonneg { total + 0.1 } else { 0.0 };
    let window = |t: f64| {
        if t.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        }
    };
    // Rows closer than the ξ band (2 FXI columns) to the x edge cannot hold
    // the full anti-diagonal of their Weyl kernel; the window must vanish
    // there.
    let radius = (0.6 * l).min(l - 2.0 * FXI as f64 * grid.spacing());
    if radius <= 0.0 {
        return Err(Error::DomainTooNarrow(
            "grid too coarse for the band-limited test field".into(),
        ));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut values = Mat::zeros(m, m);
    for j in 0..m {
        let x = grid.axis_node(j);
        let w = window(x / radius);
        if w == 0.0 {
            continue;
        }
        for c in 0..m {
            let mut v = offset;
            for (kx, row) in amp.iter().enumerate() {
                for (kxi, &a) in row.iter().enumerate() {
                    v += a
                        * (two_pi * kx as f64 * j as f64 / m as f64 + phase_x[kx][kxi]).cos()
                        * (two_pi * kxi as f64 * c as f64 / m as f64 + phase_xi[kx][kxi]).cos();
                }
            }
            values[(j, c)] = w * v;
        }
    }
    PhaseField::new(values, grid, param)
}
