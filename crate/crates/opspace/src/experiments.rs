//! Orchestrated ℏ→0 sweeps and inequality audits.
//!
//! Each experiment turns an asymptotic statement about spectral projections
//! into a quantitative check on a finite family of operators: exact scaling
//! laws for the harmonic family, the Weyl eigenvalue-counting law and Husimi
//! convergence for Schrödinger projections, boundedness/blow-up trends of
//! Besov seminorms, and a battery of inequalities (interpolation, Besov vs
//! Sobolev comparison, Wick/Husimi contraction, Töplitz product defect, and
//! the commutator variance bound) evaluated with measured slack.
//!
//! Trend semantics are pre-registered: a seminorm is classified "bounded"
//! when max/min ≤ 2 across the sweep, "growing" when the fitted log-log
//! exponent in ℏ is ≤ −0.05 with R² ≥ 0.9, and "inconclusive" otherwise.

use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock::{self, harmonic_projection, GradientKind};
use crate::grid::{
    classical_phase_volume, fock_to_grid, schrodinger_hamiltonian, spectral_projection, Grid,
    GridOperator, Potential,
};
use crate::linalg::{self, CMat};
use crate::norms::{
    besov, schatten, schatten_from_singulars, sobolev1, PExp, QuadratureSpec,
    TranslationDifferences,
};
use crate::phasespace::{husimi, random_smooth, wick_quantize, PhaseField};
use crate::{Error, Result, SemiclassicalParam};

/// Least-squares fit of log(value) against log(ℏ).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl FitSummary {
    /// The exponent, reported only when the fit explains the data (R² ≥ 0.9).
    pub fn reported_slope(&self) -> Option<f64> {
        (self.r_squared >= 0.9).then_some(self.slope)
    }
}

/// Fit ln(y) = slope·ln(x) + intercept. All data must be positive.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<FitSummary> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter(
            "log-log fit needs at least two matched points".into(),
        ));
    }
    if xs.iter().chain(ys.iter()).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter(
            "log-log fit needs strictly positive data".into(),
        ));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = lx.iter().zip(ly.iter()).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("log-log fit with constant abscissa".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(FitSummary {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Classification of a seminorm along an ℏ→0 sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Growing,
    Inconclusive,
}

/// A family of projections swept towards ℏ → 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SweepConfig {
    /// Slater projections onto the n-th harmonic-oscillator level with the
    /// linked scaling h = 1/(n+1) in d = 1.
    Harmonic { n_values: Vec<usize> },
    /// Spectral projections 1_{|p̂|² ≤ U(x)} of a Schrödinger operator on a
    /// periodic grid.
    Schrodinger {
        hbar_values: Vec<f64>,
        potential: Potential,
        half_width: f64,
        points_per_axis: usize,
    },
}

/// The ℏ span (max/min ratio) a sweep must cover. The stock Schrödinger
/// sweep {0.2, 0.1, 0.05, 0.025} spans a factor of 8, which fixes the floor.
pub const MIN_HBAR_SPAN: f64 = 8.0;

impl SweepConfig {
    pub fn default_harmonic() -> Self {
        SweepConfig::Harmonic {
            n_values: vec![8, 16, 32, 64, 128],
        }
    }

    pub fn default_schrodinger() -> Self {
        SweepConfig::Schrodinger {
            hbar_values: vec![0.2, 0.1, 0.05, 0.025],
            potential: Potential::HarmonicWell { u0: 1.0, eps: 0.1 },
            half_width: 6.0,
            points_per_axis: 256,
        }
    }

    pub fn default_schrodinger_bump() -> Self {
        SweepConfig::Schrodinger {
            hbar_values: vec![0.2, 0.1, 0.05, 0.025],
            potential: Potential::Bump {
                u0: 1.0,
                radius: 1.0,
                eps: 0.1,
            },
            half_width: 6.0,
            points_per_axis: 256,
        }
    }

    /// ℏ for every sweep point, in configured order.
    pub fn hbar_values(&self) -> Vec<f64> {
        match self {
            SweepConfig::Harmonic { n_values } => n_values
                .iter()
                .map(|&n| fock::linked_param(n, 1).hbar())
                .collect(),
            SweepConfig::Schrodinger { hbar_values, .. } => hbar_values.clone(),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            SweepConfig::Harmonic { .. } => "harmonic",
            SweepConfig::Schrodinger { .. } => "schrodinger",
        }
    }

    /// At least 3 points, positive ℏ, spanning a max/min ratio ≥ 8.
    pub fn validate(&self) -> Result<()> {
        let hbars = self.hbar_values();
        if hbars.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "sweep needs at least 3 points, got {}",
                hbars.len()
            )));
        }
        if hbars.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter("sweep hbar values must be positive".into()));
        }
        let top = hbars.iter().cloned().fold(f64::MIN, f64::max);
        let bottom = hbars.iter().cloned().fold(f64::MAX, f64::min);
        if top / bottom < MIN_HBAR_SPAN {
            return Err(Error::InvalidParameter(format!(
                "sweep spans a factor {:.2} in hbar; need at least {MIN_HBAR_SPAN}",
                top / bottom
            )));
        }
        if let SweepConfig::Schrodinger {
            half_width,
            points_per_axis,
            ..
        } = self
        {
            if !(*half_width > 0.0) || !points_per_axis.is_power_of_two() {
                return Err(Error::InvalidParameter(
                    "schrodinger sweep needs half_width > 0 and a power-of-two grid".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One sweep point: named measurements in a fixed order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub label: String,
    pub hbar: f64,
    pub values: Vec<(String, f64)>,
}

impl SweepRow {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.values
            .iter()
            .find_map(|(k, v)| (k == key).then_some(*v))
    }
}

/// Outcome of one configured check. `passed: None` marks checks that are
/// reported but deliberately not asserted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub statement: String,
    pub passed: Option<bool>,
    pub details: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: String,
    pub check: String,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<(String, FitSummary)>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<Trend>,
}

impl SweepResult {
    pub fn fit(&self, key: &str) -> Option<&FitSummary> {
        self.fits.iter().find_map(|(k, f)| (k == key).then_some(f))
    }

    pub fn all_asserted_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed != Some(false))
    }

    /// One CSV row per sweep point, gnuplot-ready comment header.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let keys: Vec<&str> = match self.rows.first() {
            Some(row) => row.values.iter().map(|(k, _)| k.as_str()).collect(),
            None => Vec::new(),
        };
        writeln!(w, "# columns: label, hbar, {}", keys.join(", "))?;
        for row in &self.rows {
            write!(w, "{},{:.12e}", row.label, row.hbar)?;
            for (k, v) in &row.values {
                if !keys.contains(&k.as_str()) {
                    return Err(Error::Serialization(format!(
                        "inconsistent sweep row key {k:?}"
                    )));
                }
                write!(w, ",{v:.12e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn verdicts_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.verdicts).map_err(|e| Error::Serialization(e.to_string()))
    }
}

fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

/// Grid sized for the harmonic projection at level n: wide enough for the
/// Hermite tail (L ≳ √(2ℏK) + 5√ℏ), fine enough that the dual box covers the
/// classically allowed momenta (M ≳ 4L²/(πℏ)), capped at M = 512.
pub fn harmonic_grid(n: usize) -> Result<(Grid, SemiclassicalParam)> {
    let param = fock::linked_param(n, 1);
    let hbar = param.hbar();
    let cutoff = fock::default_cutoff(n);
    let l = ((2.0 * hbar * (cutoff as f64 + 1.0)).sqrt() + 5.0 * hbar.sqrt()) * 1.02;
    let m = ((4.0 * l * l / (std::f64::consts::PI * hbar)).ceil() as usize)
        .next_power_of_two()
        .clamp(64, 512);
    Ok((Grid::new(l, m, 1)?, param))
}

/// Exact-law and constants sweep for the harmonic family: compares the
/// closed-form gradient norms ‖∇_{ξ₁}P‖_{𝕃^p} against the matrix path,
/// records C_p = ‖∇_{ξ₁}P‖·h^{1/p′}, and fits slopes in ℏ for p ∈ {1, 2, ∞}.
pub fn harmonic_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let SweepConfig::Harmonic { n_values } = cfg else {
        return Err(Error::InvalidParameter(
            "harmonic_sweep needs a harmonic family".into(),
        ));
    };
    let ps = [
        ("1", PExp::new(1.0)?),
        ("2", PExp::new(2.0)?),
        ("inf", PExp::INF),
    ];
    let rows: Result<Vec<SweepRow>> = n_values
        .par_iter()
        .map(|&n| {
            let proj = harmonic_projection(n, 1)?;
            let param = proj.space.param();
            let h = param.h();
            let mut values = vec![("n".to_string(), n as f64)];
            for (name, p) in ps {
                let exact = fock::gradient_xi_schatten_exact(n, 1, p.value())?;
                let d_xi = fock::quantum_gradient(&proj, GradientKind::Xi, 0)?;
                let d_x = fock::quantum_gradient(&proj, GradientKind::X, 0)?;
                let matrix_xi = schatten(&d_xi, p)?.value;
                let matrix_x = schatten(&d_x, p)?.value;
                // Hölder conjugate exponent: C_p = value · h^{1/p'}
                let conj_exp = if p.is_inf() { 1.0 } else { 1.0 - 1.0 / p.value() };
                values.push((format!("grad_xi_exact_p{name}"), exact));
                values.push((format!("grad_xi_p{name}"), matrix_xi));
                values.push((format!("grad_x_p{name}"), matrix_x));
                values.push((format!("c_p{name}"), matrix_xi * h.powf(conj_exp)));
            }
            Ok(SweepRow {
                label: format!("n={n}"),
                hbar: param.hbar(),
                values,
            })
        })
        .collect();
    let rows = rows?;
    let hbars: Vec<f64> = rows.iter().map(|r| r.hbar).collect();
    let mut fits = Vec::new();
    for (name, _) in ps {
        let key = format!("grad_xi_p{name}");
        let ys: Vec<f64> = rows.iter().map(|r| r.get(&key).unwrap()).collect();
        fits.push((key, fit_loglog(&hbars, &ys)?));
    }

    let mut verdicts = Vec::new();
    // exact 𝕃² law: ‖∇_{ξ₁}P‖_{𝕃²} = 1/√ℏ
    let mut worst_exact = 0.0f64;
    let mut worst_matrix = 0.0f64;
    for row in &rows {
        let law = 1.0 / row.hbar.sqrt();
        worst_exact = worst_exact.max(rel_err(row.get("grad_xi_exact_p2").unwrap(), law));
        worst_matrix = worst_matrix.max(rel_err(row.get("grad_xi_p2").unwrap(), law));
    }
    verdicts.push(Verdict {
        check: "harmonic_exact_l2_law".into(),
        statement: "‖∇_{ξ₁}P‖_{𝕃²} = 1/√ℏ for the level-n harmonic projection (d=1)".into(),
        passed: Some(worst_exact <= 1e-10 && worst_matrix <= 1e-8),
        details: format!(
            "closed-form rel err {worst_exact:.2e} (tol 1e-10), matrix rel err {worst_matrix:.2e} (tol 1e-8)"
        ),
    });
    // slopes {0, −1/2, −1} for p ∈ {1, 2, ∞}
    let targets = [("1", 0.0), ("2", -0.5), ("inf", -1.0)];
    let mut slope_details = Vec::new();
    let mut slopes_ok = true;
    for (name, target) in targets {
        let fit = fits
            .iter()
            .find(|(k, _)| k == &format!("grad_xi_p{name}"))
            .map(|(_, f)| f)
            .unwrap();
        slopes_ok &= (fit.slope - target).abs() <= 0.05;
        slope_details.push(format!("p={name}: slope {:.4} (target {target})", fit.slope));
    }
    verdicts.push(Verdict {
        check: "harmonic_gradient_slopes".into(),
        statement: "log-log slopes of ‖∇_{ξ₁}P‖_{𝕃^p} vs ℏ are {0, −1/2, −1} for p ∈ {1, 2, ∞}"
            .into(),
        passed: Some(slopes_ok),
        details: slope_details.join("; "),
    });
    // x/ξ gradient symmetry
    let mut worst_sym = 0.0f64;
    for row in &rows {
        for (name, _) in ps {
            worst_sym = worst_sym.max(rel_err(
                row.get(&format!("grad_x_p{name}")).unwrap(),
                row.get(&format!("grad_xi_p{name}")).unwrap(),
            ));
        }
    }
    verdicts.push(Verdict {
        check: "harmonic_gradient_symmetry".into(),
        statement: "the same norms hold with ∇_x in place of ∇_ξ (rotational symmetry)".into(),
        passed: Some(worst_sym <= 1e-8),
        details: format!("max relative x/ξ asymmetry {worst_sym:.2e} (tol 1e-8)"),
    });
    // constant bounds: 𝕃¹ ≤ 2√π and 𝕃^∞ ≤ √π/h in d = 1
    let mut bounds_ok = true;
    let mut worst_l1 = 0.0f64;
    for row in &rows {
        let l1 = row.get("grad_xi_p1").unwrap();
        let linf = row.get("grad_xi_pinf").unwrap();
        let h = 2.0 * std::f64::consts::PI * row.hbar;
        worst_l1 = worst_l1.max(l1 / (2.0 * std::f64::consts::PI.sqrt()));
        bounds_ok &= l1 <= 2.0 * std::f64::consts::PI.sqrt() * (1.0 + 1e-12);
        bounds_ok &= linf <= std::f64::consts::PI.sqrt() / h * (1.0 + 1e-12);
    }
    verdicts.push(Verdict {
        check: "harmonic_constant_bounds".into(),
        statement: "‖∇_{ξ₁}P‖_{𝕃¹} ≤ 2√π and ‖∇_{ξ₁}P‖_{𝕃^∞} ≤ √π/h (d=1)".into(),
        passed: Some(bounds_ok),
        details: format!("max 𝕃¹ saturation {worst_l1:.6} of the bound"),
    });

    Ok(SweepResult {
        family: "harmonic".into(),
        check: "gradient_laws".into(),
        rows,
        fits,
        verdicts,
        trend: None,
    })
}

/// Pick a companion grid for the Husimi comparison: the dual box must cover
/// the classical momenta |ξ| ≤ √(max U) plus Gaussian tails, while the x box
/// must still contain the classically allowed region. The dual half-width is
/// πℏM/(4L), so for small ℏ this means shrinking L below the sweep default.
fn husimi_grid(base: &Grid, param: SemiclassicalParam, potential: &Potential) -> Result<Grid> {
    let m = base.points_per_axis();
    let u = potential.sample(base)?;
    let umax = u.iter().cloned().fold(0.0f64, f64::max);
    let xi_max = umax.sqrt();
    let mut x_turn = 0.0f64;
    for j in 0..m {
        if u[j] > 0.0 {
            x_turn = x_turn.max(base.axis_node(j).abs());
        }
    }
    let hbar = param.hbar();
    let lower = x_turn + 4.0 * hbar.sqrt();
    let upper =
        std::f64::consts::PI * hbar * m as f64 / (4.0 * (xi_max + 2.0 * hbar.sqrt()));
    let l = if lower <= upper {
        upper.min(base.half_width()).max(lower)
    } else {
        // cannot satisfy both with this M; keep the x support intact and
        // accept a slightly clipped momentum box
        lower
    };
    Grid::new(l, m, 1)
}

/// L¹ and L² distances between husimi(P) and the classical indicator
/// 1_{ξ² ≤ U(x)} over Ω = {U > ε/2} (all ξ in the dual box).
fn husimi_indicator_distance(proj: &GridOperator, potential: &Potential) -> Result<(f64, f64)> {
    let f = husimi(proj)?;
    let grid = f.grid;
    let u = potential.sample(&grid)?;
    let eps = potential.eps();
    let m = grid.points_per_axis();
    let cell = f.cell();
    let (mut l1, mut l2) = (0.0f64, 0.0f64);
    for j in 0..m {
        if u[j] <= eps / 2.0 {
            continue;
        }
        for c in 0..m {
            let xi = f.xi_node(c);
            let indicator = if xi * xi <= u[j] { 1.0 } else { 0.0 };
            let d = (f.values[(j, c)] - indicator).abs();
            l1 += d * cell;
            l2 += d * d * cell;
        }
    }
    Ok((l1, l2.sqrt()))
}

/// Weyl-law sweep: per ℏ, the rank N of 1_{|p̂|²≤U(x)}, the deviation of
/// h·N from the classical phase-space volume, and the Husimi-to-indicator
/// distance. Verdicts: the deviation ends ≤ 3% and decreases strictly; the
/// L¹ distance decreases with at most one inversion.
pub fn weyl_law_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let SweepConfig::Schrodinger {
        hbar_values,
        potential,
        half_width,
        points_per_axis,
    } = cfg
    else {
        return Err(Error::InvalidParameter(
            "weyl_law_sweep needs a schrodinger family".into(),
        ));
    };
    let volume = classical_phase_volume(potential, 1)?;
    let rows: Result<Vec<SweepRow>> = hbar_values
        .par_iter()
        .map(|&hbar| {
            let param = SemiclassicalParam::new(hbar)?;
            let grid = Grid::new(*half_width, *points_per_axis, 1)?;
            let ham = schrodinger_hamiltonian(&grid, potential, param)?;
            let sp = spectral_projection(&ham, 0.0)?;
            let h_times_rank = param.h() * sp.rank as f64;
            let deviation = if volume > 1e-12 {
                (h_times_rank - volume).abs() / volume
            } else {
                h_times_rank.abs()
            };
            let hgrid = husimi_grid(&grid, param, potential)?;
            let hham = schrodinger_hamiltonian(&hgrid, potential, param)?;
            let hsp = spectral_projection(&hham, 0.0)?;
            let (l1, l2) = husimi_indicator_distance(&hsp.op, potential)?;
            Ok(SweepRow {
                label: format!("hbar={hbar}"),
                hbar,
                values: vec![
                    ("rank".into(), sp.rank as f64),
                    ("h_times_rank".into(), h_times_rank),
                    ("classical_volume".into(), volume),
                    ("weyl_rel_deviation".into(), deviation),
                    ("husimi_l1".into(), l1),
                    ("husimi_l2".into(), l2),
                    (
                        "degenerate_at_threshold".into(),
                        if sp.degenerate_at_threshold { 1.0 } else { 0.0 },
                    ),
                ],
            })
        })
        .collect();
    let rows = rows?;

    let deviations: Vec<f64> = rows
        .iter()
        .map(|r| r.get("weyl_rel_deviation").unwrap())
        .collect();
    let mut verdicts = Vec::new();
    let weyl_passed = if volume > 1e-12 {
        let last = *deviations.last().unwrap();
        let degenerate = rows.last().unwrap().get("degenerate_at_threshold").unwrap() > 0.5;
        let tol = if degenerate { 0.06 } else { 0.03 };
        // For spectra that hit the counting law exactly (e.g. the harmonic
        // well, where h·N equals the phase volume at every ℏ in the sweep)
        // the deviations plateau at the quadrature accuracy of the classical
        // volume; anything at that floor counts as decreasing.
        let decreasing = deviations.windows(2).all(|w| w[1] < w[0] || w[1] <= 1e-6);
        last <= tol && decreasing
    } else {
        rows.iter().all(|r| r.get("rank").unwrap() == 0.0)
    };
    verdicts.push(Verdict {
        check: "weyl_law".into(),
        statement: "h·N_ℏ → ∬ 1_{ξ² ≤ U(x)} dx dξ (eigenvalue-counting asymptotics)".into(),
        passed: Some(weyl_passed),
        details: format!(
            "classical volume {volume:.6}, relative deviations {:?}",
            deviations.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>()
        ),
    });
    let l1s: Vec<f64> = rows.iter().map(|r| r.get("husimi_l1").unwrap()).collect();
    let inversions = l1s.windows(2).filter(|w| w[1] >= w[0]).count();
    verdicts.push(Verdict {
        check: "husimi_convergence".into(),
        statement: "husimi(P) → 1_{ξ² ≤ U(x)} in L¹(Ω) along ℏ → 0 (≤ one inversion)".into(),
        passed: Some(volume <= 1e-12 || inversions <= 1),
        details: format!(
            "L¹(Ω) distances {:?} ({inversions} inversions)",
            l1s.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>()
        ),
    });

    Ok(SweepResult {
        family: "schrodinger".into(),
        check: "weyl_law".into(),
        rows,
        fits: Vec::new(),
        verdicts,
        trend: None,
    })
}

/// Build the swept projections as grid operators with labels.
pub fn build_family(cfg: &SweepConfig) -> Result<Vec<(String, GridOperator)>> {
    cfg.validate()?;
    match cfg {
        SweepConfig::Harmonic { n_values } => n_values
            .par_iter()
            .map(|&n| {
                let (grid, _) = harmonic_grid(n)?;
                let proj = harmonic_projection(n, 1)?;
                Ok((format!("n={n}"), fock_to_grid(&proj, &grid)?))
            })
            .collect(),
        SweepConfig::Schrodinger {
            hbar_values,
            potential,
            half_width,
            points_per_axis,
        } => hbar_values
            .par_iter()
            .map(|&hbar| {
                let param = SemiclassicalParam::new(hbar)?;
                let grid = Grid::new(*half_width, *points_per_axis, 1)?;
                let ham = schrodinger_hamiltonian(&grid, potential, param)?;
                Ok((format!("hbar={hbar}"), spectral_projection(&ham, 0.0)?.op))
            })
            .collect(),
    }
}

/// Precomputed translation differences for every member of a family, with a
/// shell count shared across the sweep so each row sees the same quadrature
/// shape (the radii scale with the row's grid).
pub struct FamilyCache {
    pub label: String,
    pub hbar: f64,
    pub operator: GridOperator,
    pub diffs: TranslationDifferences,
}

pub fn family_caches(cfg: &SweepConfig) -> Result<Vec<FamilyCache>> {
    let ops = build_family(cfg)?;
    let shells = ops
        .iter()
        .map(|(_, op)| QuadratureSpec::for_grid(&op.grid, op.param).shell_count())
        .min()
        .unwrap_or(0);
    if shells == 0 {
        return Err(Error::EmptyQuadrature);
    }
    ops.into_iter()
        .map(|(label, op)| {
            let mut spec = QuadratureSpec::for_grid(&op.grid, op.param);
            spec.max_shells = Some(shells);
            let diffs = TranslationDifferences::compute(&op, &spec)?;
            Ok(FamilyCache {
                label,
                hbar: op.param.hbar(),
                operator: op,
                diffs,
            })
        })
        .collect()
}

/// Besov-seminorm trend besov(s, p, q) over a precomputed family.
pub fn regularity_trend_from(
    family: &str,
    caches: &[FamilyCache],
    s: f64,
    p: PExp,
    q: PExp,
) -> Result<SweepResult> {
    if caches.len() < 2 {
        return Err(Error::InvalidParameter("trend needs at least two sweep points".into()));
    }
    let mut rows = Vec::new();
    for cache in caches {
        let report = besov(&cache.diffs, s, p, q)?;
        rows.push(SweepRow {
            label: cache.label.clone(),
            hbar: cache.hbar,
            values: vec![
                ("besov".into(), report.value),
                ("samples".into(), report.sample_count.unwrap_or(0) as f64),
            ],
        });
    }
    let hbars: Vec<f64> = rows.iter().map(|r| r.hbar).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.get("besov").unwrap()).collect();
    let fit = fit_loglog(&hbars, &values)?;
    let top = values.iter().cloned().fold(f64::MIN, f64::max);
    let bottom = values.iter().cloned().fold(f64::MAX, f64::min);
    // A clean power law ℏ^{−c} wins over the bounded-ratio heuristic: over a
    // modest ℏ span even a genuine blow-up rate c ≈ 0.2 only grows the values
    // by ~60%, so "growing" must be decided first, with a ratio floor to keep
    // flat-but-noisy sweeps out.
    let trend = if fit.r_squared >= 0.9 && fit.slope <= -0.05 && top / bottom >= 1.25 {
        Trend::Growing
    } else if bottom > 0.0 && top / bottom <= 2.0 {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    };
    let check = format!("besov_trend_s{s}_p{}_q{}", fmt_p(p), fmt_p(q));
    let verdicts = vec![Verdict {
        check: check.clone(),
        statement:
            "trend of the second-difference Besov seminorm as ℏ → 0: projections blow up for \
             s > 1/p and stay bounded at the critical line s = 1/p, q = ∞"
                .into(),
        passed: None,
        details: format!(
            "classified {trend:?}; max/min {:.3}, slope {:.3} (R² {:.3})",
            top / bottom,
            fit.slope,
            fit.r_squared
        ),
    }];
    Ok(SweepResult {
        family: family.into(),
        check,
        rows,
        fits: vec![("besov".into(), fit)],
        verdicts,
        trend: Some(trend),
    })
}

fn fmt_p(p: PExp) -> String {
    if p.is_inf() {
        "inf".into()
    } else {
        format!("{}", p.value())
    }
}

/// Convenience wrapper building the family fresh for a single (s, p, q).
pub fn regularity_trend(cfg: &SweepConfig, s: f64, p: PExp, q: PExp) -> Result<SweepResult> {
    let caches = family_caches(cfg)?;
    regularity_trend_from(cfg.family_name(), &caches, s, p, q)
}

/// One inequality evaluation with measured slack (rhs − lhs).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditCheck {
    pub name: String,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
}

impl AuditCheck {
    fn new(name: &str, statement: &str, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.into(),
            statement: statement.into(),
            lhs,
            rhs,
            slack,
            passed: slack >= -1e-12 * (1.0 + rhs.abs()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub label: String,
    pub checks: Vec<AuditCheck>,
    pub all_passed: bool,
}

/// The two stock audit targets: the harmonic n = 16 projection and the
/// Schrödinger bump-potential projection at ℏ = 0.05.
pub fn audit_targets() -> Result<Vec<(String, GridOperator)>> {
    let (grid, _) = harmonic_grid(16)?;
    let harmonic = fock_to_grid(&harmonic_projection(16, 1)?, &grid)?;
    let param = SemiclassicalParam::new(0.05)?;
    let sgrid = Grid::new(6.0, 256, 1)?;
    let potential = Potential::Bump {
        u0: 1.0,
        radius: 1.0,
        eps: 0.1,
    };
    let ham = schrodinger_hamiltonian(&sgrid, &potential, param)?;
    let schrodinger = spectral_projection(&ham, 0.0)?.op;
    Ok(vec![
        ("harmonic_n16".into(), harmonic),
        ("schrodinger_bump_hbar0.05".into(), schrodinger),
    ])
}

fn field_gradient_lp(f: &PhaseField, p: f64) -> Result<f64> {
    let gx = f.partial_x();
    let gxi = f.partial_xi();
    let m = f.grid.points_per_axis();
    let mut sum = 0.0;
    for j in 0..m {
        for c in 0..m {
            let g2 = gx.values[(j, c)].powi(2) + gxi.values[(j, c)].powi(2);
            sum += g2.powf(p / 2.0);
        }
    }
    Ok((sum * f.cell()).powf(1.0 / p))
}

/// Evaluate the five inequality audits on a Hermitian projection-like
/// operator: Besov interpolation, Besov-vs-Sobolev comparison, Wick/Husimi
/// contraction, the Töplitz product defect, and the commutator variance
/// bound. Failures are findings, not errors.
pub fn inequality_audit(label: &str, op: &GridOperator, seed: u64) -> Result<AuditReport> {
    if !op.is_hermitian(1e-10) {
        return Err(Error::InvalidParameter("inequality audit needs a Hermitian operator".into()));
    }
    let grid = op.grid;
    let param = op.param;
    let hbar = param.hbar();
    let spec = QuadratureSpec::for_grid(&grid, param);
    let cache = TranslationDifferences::compute(op, &spec)?;
    let mut checks = Vec::new();

    // 1. interpolation: ‖op‖_{B^{sθ}_{pθ,qθ}} ≤ ‖op‖^{1−θ}_{B^{s0}} ‖op‖^{θ}_{B^{s1}}
    {
        let p2 = PExp::new(2.0)?;
        let q2 = PExp::new(2.0)?;
        let ends = (besov(&cache, 0.25, p2, q2)?.value, besov(&cache, 0.75, p2, q2)?.value);
        for theta in [0.25, 0.5, 0.75] {
            let s_theta = (1.0 - theta) * 0.25 + theta * 0.75;
            let mid = besov(&cache, s_theta, p2, q2)?.value;
            checks.push(AuditCheck::new(
                &format!("interpolation_theta{theta}"),
                "Besov interpolation inequality between (s,p,q) = (1/4,2,2) and (3/4,2,2)",
                mid,
                ends.0.powf(1.0 - theta) * ends.1.powf(theta),
            ));
        }
        // mixed Schatten exponents: p interpolates between 1 and ∞ at fixed s
        let b1 = besov(&cache, 0.5, PExp::new(1.0)?, PExp::INF)?.value;
        let binf = besov(&cache, 0.5, PExp::INF, PExp::INF)?.value;
        let bmid = besov(&cache, 0.5, p2, PExp::INF)?.value;
        checks.push(AuditCheck::new(
            "interpolation_schatten",
            "Besov interpolation in the Schatten index between p = 1 and p = ∞ at s = 1/2",
            bmid,
            (b1 * binf).sqrt(),
        ));
    }

    // 2. comparison: ‖op‖_{B¹_{p,∞}} ≤ 2 ‖op‖_{W^{1,p}}
    for p in [PExp::new(1.0)?, PExp::new(2.0)?, PExp::INF] {
        let b = besov(&cache, 1.0, p, PExp::INF)?.value;
        let w = sobolev1(op, p)?.value;
        checks.push(AuditCheck::new(
            &format!("comparison_p{}", fmt_p(p)),
            "second-difference Besov seminorm of order 1 bounded by twice the gradient norm",
            b,
            2.0 * w,
        ));
    }

    // 3. contraction: ‖Õp_f‖_{𝕃^p} ≤ ‖f‖_{L^p} and ‖husimi(op)‖_{L^p} ≤ ‖op‖_{𝕃^p}
    {
        let f = random_smooth(grid, param, seed, true)?;
        let wick = wick_quantize(&f)?;
        let wick_sv = linalg::singular_values(&wick.weighted_matrix())?;
        let op_sv = linalg::singular_values(&op.weighted_matrix())?;
        let hus = husimi(op)?;
        for p in [PExp::new(1.0)?, PExp::new(2.0)?, PExp::INF] {
            let pv = if p.is_inf() { f64::INFINITY } else { p.value() };
            checks.push(AuditCheck::new(
                &format!("wick_contraction_p{}", fmt_p(p)),
                "Wick quantization contracts: ‖Õp_f‖_{𝕃^p} ≤ ‖f‖_{L^p}",
                schatten_from_singulars(&wick_sv, p, param.h(), 1),
                f.lp_norm(pv)?,
            ));
            checks.push(AuditCheck::new(
                &format!("husimi_contraction_p{}", fmt_p(p)),
                "Husimi transform contracts: ‖f̃_op‖_{L^p} ≤ ‖op‖_{𝕃^p}",
                hus.lp_norm(pv)?,
                schatten_from_singulars(&op_sv, p, param.h(), 1),
            ));
        }
    }

    // 4. product defect: ‖(Õp_fÕp_g + Õp_gÕp_f)/2 − Õp_{fg}‖_{𝕃^{p/2}}
    //    ≤ 2^{d+1} d ℏ ‖∇f‖_{L^p} ‖∇g‖_{L^p}
    {
        let f = random_smooth(grid, param, seed + 1, true)?;
        let g = random_smooth(grid, param, seed + 2, true)?;
        let wf = wick_quantize(&f)?.weighted_matrix();
        let wg = wick_quantize(&g)?.weighted_matrix();
        let wfg = wick_quantize(&f.product(&g)?)?.weighted_matrix();
        let sym = linalg::scale(&(&wf * &wg + &wg * &wf), C64::from(0.5));
        let defect = &sym - &wfg;
        let sv = linalg::singular_values(&defect)?;
        for p in [2.0, 4.0] {
            let lhs = schatten_from_singulars(&sv, PExp::new(p / 2.0)?, param.h(), 1);
            let rhs = 4.0 * hbar * field_gradient_lp(&f, p)? * field_gradient_lp(&g, p)?;
            checks.push(AuditCheck::new(
                &format!("product_defect_p{p}"),
                "symmetrized Töplitz product stays 𝒪(ℏ)-close to the quantized product fg",
                lhs,
                rhs,
            ));
        }
    }

    // 5. variance bound: h Tr|[φ(x), op]|² ≤ h (Σ_ν |c_ν| |w_ν|^{1/2})² ·
    //    ‖op‖²_{B^{1/2}_{2,∞}} for a trigonometric φ with box-compatible
    //    frequencies w_ν = ν/(2L)
    {
        let m = grid.points_per_axis();
        let l = grid.half_width();
        let coeffs = [0.3, 0.15, 0.075, 0.0375];
        let phi = |x: f64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * (std::f64::consts::PI * (i + 1) as f64 * x / l).cos())
                .sum()
        };
        let base = op.weighted_matrix();
        let mut comm = CMat::zeros(m, m);
        for a in 0..m {
            let pa = phi(grid.axis_node(a));
            for b in 0..m {
                comm[(a, b)] = base[(a, b)] * C64::from(pa - phi(grid.axis_node(b)));
            }
        }
        let mut frob2 = 0.0;
        for a in 0..m {
            for b in 0..m {
                frob2 += comm[(a, b)].norm_sqr();
            }
        }
        let lhs = param.h() * frob2;
        let fourier_weight: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * ((i + 1) as f64 / (2.0 * l)).sqrt())
            .sum();
        let b = besov(&cache, 0.5, PExp::new(2.0)?, PExp::INF)?.value;
        checks.push(AuditCheck::new(
            "variance_bound",
            "position-observable variance: h Tr|[φ(x), op]|² ≤ ℏ ‖φ‖_{Ḣ^{1/2}} ‖op‖²_{B^{1/2}_{2,∞}}",
            lhs,
            param.h() * fourier_weight * fourier_weight * b * b,
        ));
    }

    let all_passed = checks.iter().all(|c| c.passed);
    Ok(AuditReport {
        label: label.into(),
        checks,
        all_passed,
    })
}
