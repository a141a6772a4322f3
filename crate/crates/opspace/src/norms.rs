//! Scaled Schatten norms and the quantum Sobolev / Besov scales built from
//! quantum gradients and phase-space translation differences.
//!
//! The scaled Schatten norm is ‖op‖_{𝕃^p} = h^{d/p} (Tr |op|^p)^{1/p} with
//! h = 2πℏ, so that rank-one spectral projections stay order one as ℏ → 0;
//! for p = ∞ it is the operator norm. First-order regularity uses the
//! quantum gradients ∇_x op = (i/ℏ)[p̂, op] and ∇_ξ op = (1/(iℏ))[x, op];
//! fractional regularity replaces difference quotients by quantum
//! translations T_z op = W_z op W_z* over a geometric shell quadrature of
//! phase space.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::de::Visitor;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::fock::{self, FockOperator, GradientKind};
use crate::grid::{self, Grid, GridOperator};
use crate::linalg::{self, CMat};
use crate::phasespace::{snap_to_grid, translate, PhasePoint};
use crate::{Error, Result, SemiclassicalParam};

/// A Schatten exponent p ∈ [1, ∞]. Serializes as a number, or as the string
/// `"inf"` for p = ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExp(f64);

impl PExp {
    pub const INF: PExp = PExp(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "Schatten exponent must satisfy p >= 1, got {p}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }
}

impl Serialize for PExp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_inf() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

struct PExpVisitor;

impl Visitor<'_> for PExpVisitor {
    type Value = PExp;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        write!(f, "a number >= 1 or the string \"inf\"")
    }

    fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<PExp, E> {
        PExp::new(v).map_err(E::custom)
    }

    fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<PExp, E> {
        PExp::new(v as f64).map_err(E::custom)
    }

    fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<PExp, E> {
        PExp::new(v as f64).map_err(E::custom)
    }

    fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<PExp, E> {
        match v {
            "inf" | "infinity" | "Inf" => Ok(PExp::INF),
            other => Err(E::custom(format!("unknown Schatten exponent {other:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for PExp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(PExpVisitor)
    }
}

/// Result of a norm measurement, self-describing for JSON/CSV export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: String,
    pub value: f64,
    pub p: PExp,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<PExp>,
    pub hbar: f64,
    /// Set when a Fock-side computation touched states at the basis cutoff.
    #[serde(default)]
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<usize>,
}

impl NormReport {
    fn plain(kind: &str, value: f64, p: PExp, hbar: f64) -> Self {
        Self {
            kind: kind.into(),
            value,
            p,
            s: None,
            q: None,
            hbar,
            truncated: false,
            sample_count: None,
        }
    }
}

/// Scaled Schatten norm from a descending list of singular values.
pub fn schatten_from_singulars(sv: &[f64], p: PExp, h: f64, d: usize) -> f64 {
    if p.is_inf() {
        return sv.first().copied().unwrap_or(0.0);
    }
    let pow: f64 = sv.iter().map(|s| s.powf(p.value())).sum();
    h.powf(d as f64 / p.value()) * pow.powf(1.0 / p.value())
}

/// Anything with a matrix representation whose products/traces follow plain
/// matrix algebra (kernels are pre-weighted by the cell volume).
pub trait SchattenOperand {
    fn weighted(&self) -> CMat;
    fn operand_param(&self) -> SemiclassicalParam;
    fn operand_dim(&self) -> usize;
    /// All 2d quantum gradient components in the weighted convention, plus a
    /// flag marking basis-truncation contamination.
    fn gradients(&self) -> Result<(Vec<CMat>, bool)>;
}

impl SchattenOperand for FockOperator {
    fn weighted(&self) -> CMat {
        self.matrix.clone()
    }

    fn operand_param(&self) -> SemiclassicalParam {
        self.space.param()
    }

    fn operand_dim(&self) -> usize {
        self.space.dim()
    }

    fn gradients(&self) -> Result<(Vec<CMat>, bool)> {
        let mut out = Vec::with_capacity(2 * self.space.dim());
        let mut touched = false;
        for axis in 0..self.space.dim() {
            for kind in [GradientKind::X, GradientKind::Xi] {
                let g = fock::quantum_gradient(self, kind, axis)?;
                let mut m = g.matrix;
                touched |= project_out_truncated(&g.space, &mut m);
                out.push(m);
            }
        }
        Ok((out, touched))
    }
}

impl SchattenOperand for GridOperator {
    fn weighted(&self) -> CMat {
        self.weighted_matrix()
    }

    fn operand_param(&self) -> SemiclassicalParam {
        self.param
    }

    fn operand_dim(&self) -> usize {
        self.grid.dim()
    }

    fn gradients(&self) -> Result<(Vec<CMat>, bool)> {
        let mut out = Vec::with_capacity(2 * self.grid.dim());
        for axis in 0..self.grid.dim() {
            for kind in [GradientKind::X, GradientKind::Xi] {
                let g = grid::quantum_gradient(self, kind, axis)?;
                out.push(g.weighted_matrix());
            }
        }
        Ok((out, false))
    }
}

/// Zero the rows and columns at truncation-affected basis states; returns
/// whether anything nonzero was removed.
fn project_out_truncated(space: &crate::fock::FockSpace, m: &mut CMat) -> bool {
    let n = space.len();
    let scale = linalg::operator_scale(m);
    let tol = 1e-14 * (1.0 + scale);
    let mut touched = false;
    for i in 0..n {
        if !space.is_truncation_affected(i) {
            continue;
        }
        for j in 0..n {
            if m[(i, j)].norm() > tol || m[(j, i)].norm() > tol {
                touched = true;
            }
            m[(i, j)] = C64::new(0.0, 0.0);
            m[(j, i)] = C64::new(0.0, 0.0);
        }
    }
    touched
}

/// Scaled Schatten norm ‖op‖_{𝕃^p}.
pub fn schatten<T: SchattenOperand>(op: &T, p: PExp) -> Result<NormReport> {
    let sv = linalg::singular_values(&op.weighted())?;
    let value = schatten_from_singulars(&sv, p, op.operand_param().h(), op.operand_dim());
    Ok(NormReport::plain("schatten", value, p, op.operand_param().hbar()))
}

/// First-order quantum Sobolev seminorm ‖|∇op|‖_{𝕃^p}, with
/// |∇op| = (Σ_k (∇_k op)*(∇_k op))^{1/2} over all 2d gradient components.
pub fn sobolev1<T: SchattenOperand>(op: &T, p: PExp) -> Result<NormReport> {
    let (grads, truncated) = op.gradients()?;
    let n = grads[0].nrows();
    let mut total = CMat::zeros(n, n);
    for g in &grads {
        total += linalg::adjoint(g) * g;
    }
    let mut sv: Vec<f64> = linalg::eigvalsh(&total)?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let value = schatten_from_singulars(&sv, p, op.operand_param().h(), op.operand_dim());
    let mut report = NormReport::plain("sobolev1", value, p, op.operand_param().hbar());
    report.s = Some(1.0);
    report.truncated = truncated;
    Ok(report)
}

/// One quadrature node: a grid-compatible phase point with its shell radius
/// and polar weight (approximating ∫ dz/|z|²).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadSample {
    pub z: PhasePoint,
    pub radius: f64,
    pub weight: f64,
}

/// Geometric-shell quadrature of phase space used by the fractional norms:
/// radii r_min ρ^i up to r_max, `directions` points per shell, each snapped
/// to the translation-compatible lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub rho: f64,
    pub directions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_shells: Option<usize>,
}

impl QuadratureSpec {
    /// Default quadrature for a grid: shells from twice the lattice spacing
    /// out to L/4, growth ratio 2^{1/4}, eight directions per shell.
    pub fn for_grid(grid: &Grid, param: SemiclassicalParam) -> Self {
        let dxi_t = std::f64::consts::PI * param.hbar() / grid.half_width();
        Self {
            r_min: 2.0 * grid.spacing().max(dxi_t),
            r_max: grid.half_width() / 4.0,
            rho: 2f64.powf(0.25),
            directions: 8,
            max_shells: None,
        }
    }

    /// Number of shells that fit between r_min and r_max.
    pub fn shell_count(&self) -> usize {
        if self.r_max < self.r_min {
            return 0;
        }
        let raw = ((self.r_max / self.r_min).ln() / self.rho.ln()).floor() as usize + 1;
        match self.max_shells {
            Some(cap) => raw.min(cap),
            None => raw,
        }
    }

    /// Snapped, deduplicated quadrature nodes. Weight lnρ · 2π/directions per
    /// node; the origin and duplicate lattice points are dropped.
    pub fn samples(&self, grid: &Grid, param: SemiclassicalParam) -> Result<Vec<QuadSample>> {
        if !(self.r_min > 0.0) || !(self.rho > 1.0) || self.directions == 0 {
            return Err(Error::InvalidParameter(
                "quadrature needs r_min > 0, rho > 1, directions >= 1".into(),
            ));
        }
        let weight = self.rho.ln() * 2.0 * std::f64::consts::PI / self.directions as f64;
        let mut seen = std::collections::HashSet::new();
        let dx = grid.spacing();
        let dxi_t = std::f64::consts::PI * param.hbar() / grid.half_width();
        let mut out = Vec::new();
        for shell in 0..self.shell_count() {
            let r = self.r_min * self.rho.powi(shell as i32);
            for k in 0..self.directions {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / self.directions as f64;
                let z = snap_to_grid(
                    grid,
                    param,
                    PhasePoint::new(r * theta.cos(), r * theta.sin()),
                );
                let steps = (
                    (z.x / dx).round() as i64,
                    (z.xi / dxi_t).round() as i64,
                );
                if steps == (0, 0) || !seen.insert(steps) {
                    continue;
                }
                out.push(QuadSample {
                    z,
                    radius: z.norm(),
                    weight,
                });
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyQuadrature);
        }
        Ok(out)
    }
}

/// Per-sample singular values of the first (T_z op − op) and second
/// (T_{2z} op − 2 T_z op + op) translation differences, shared by all
/// fractional-norm evaluations of one operator.
#[derive(Debug, Clone)]
pub struct TranslationDifferences {
    pub samples: Vec<QuadSample>,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
    pub param: SemiclassicalParam,
    pub dim: usize,
}

impl TranslationDifferences {
    pub fn compute(op: &GridOperator, spec: &QuadratureSpec) -> Result<Self> {
        let samples = spec.samples(&op.grid, op.param)?;
        let base = op.weighted_matrix();
        let diffs: Result<Vec<(Vec<f64>, Vec<f64>)>> = samples
            .par_iter()
            .map(|sample| {
                let t1 = translate(op, sample.z)?.weighted_matrix();
                let t2 = translate(op, sample.z.scaled(2.0))?.weighted_matrix();
                let d1 = &t1 - &base;
                let d2 = &t2 - linalg::scale(&t1, C64::from(2.0)) + &base;
                Ok((linalg::singular_values(&d1)?, linalg::singular_values(&d2)?))
            })
            .collect();
        let diffs = diffs?;
        let (first, second) = diffs.into_iter().unzip();
        Ok(Self {
            samples,
            first,
            second,
            param: op.param,
            dim: op.grid.dim(),
        })
    }

    fn schatten_at(&self, sv: &[f64], p: PExp) -> f64 {
        schatten_from_singulars(sv, p, self.param.h(), self.dim)
    }
}

/// Fractional quantum Sobolev seminorm of order s ∈ (0, 1):
/// (Σ_z w_z (‖T_z op − op‖_{𝕃^p} / |z|^s)^p)^{1/p}, sup over z for p = ∞.
pub fn frac_sobolev(cache: &TranslationDifferences, s: f64, p: PExp) -> Result<NormReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fractional Sobolev order must lie in (0, 1), got {s}"
        )));
    }
    let ratios = cache
        .samples
        .iter()
        .zip(cache.first.iter())
        .map(|(sample, sv)| (cache.schatten_at(sv, p) / sample.radius.powf(s), sample.weight));
    let value = if p.is_inf() {
        ratios.map(|(r, _)| r).fold(0.0f64, f64::max)
    } else {
        let sum: f64 = ratios.map(|(r, w)| w * r.powf(p.value())).sum();
        sum.powf(1.0 / p.value())
    };
    let mut report = NormReport::plain("frac_sobolev", value, p, cache.param.hbar());
    report.s = Some(s);
    report.sample_count = Some(cache.samples.len());
    Ok(report)
}

/// Quantum Besov seminorm of order s ∈ (0, 2) with summation exponent q:
/// the ℓ^q(w) aggregate of ‖Δ²_z op‖_{𝕃^p} / |z|^s over the quadrature,
/// where Δ²_z op = T_{2z} op − 2 T_z op + op.
pub fn besov(cache: &TranslationDifferences, s: f64, p: PExp, q: PExp) -> Result<NormReport> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "Besov order must lie in (0, 2), got {s}"
        )));
    }
    let ratios = cache
        .samples
        .iter()
        .zip(cache.second.iter())
        .map(|(sample, sv)| (cache.schatten_at(sv, p) / sample.radius.powf(s), sample.weight));
    let value = if q.is_inf() {
        ratios.map(|(r, _)| r).fold(0.0f64, f64::max)
    } else {
        let sum: f64 = ratios.map(|(r, w)| w * r.powf(q.value())).sum();
        sum.powf(1.0 / q.value())
    };
    let mut report = NormReport::plain("besov", value, p, cache.param.hbar());
    report.s = Some(s);
    report.q = Some(q);
    report.sample_count = Some(cache.samples.len());
    Ok(report)
}

/// Direction of the conjugating exponential in
/// [`commutator_exponential`]: e^{2πi x w} or e^{2πi p̂ w}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    P,
}

/// Scaled Schatten norm of the commutator [e^{2πi x w}, op] (direction X) or
/// [e^{2πi p̂ w}, op] (direction P). The frequency must make the induced
/// phase-space translation grid-compatible: w ∈ (1/(2L))·ℤ.
pub fn commutator_exponential(
    op: &GridOperator,
    direction: Direction,
    w: f64,
    p: PExp,
) -> Result<NormReport> {
    if op.grid.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            dim: op.grid.dim(),
            reason: "commutator norms are implemented for d = 1".into(),
        });
    }
    let m = op.grid.points_per_axis();
    let shift = 2.0 * std::f64::consts::PI * op.param.hbar() * w;
    let z = match direction {
        Direction::X => PhasePoint::new(0.0, shift),
        Direction::P => PhasePoint::new(shift, 0.0),
    };
    let snapped = snap_to_grid(&op.grid, op.param, z);
    if (snapped.x - z.x).abs() > 1e-9 * (1.0 + z.x.abs())
        || (snapped.xi - z.xi).abs() > 1e-9 * (1.0 + z.xi.abs())
    {
        return Err(Error::IncompatiblePhasePoint {
            x: z.x,
            xi: z.xi,
            nearest_x: snapped.x,
            nearest_xi: snapped.xi,
        });
    }
    let base = op.weighted_matrix();
    let unitary: CMat = match direction {
        Direction::X => CMat::from_fn(m, m, |a, b| {
            if a == b {
                let phase = 2.0 * std::f64::consts::PI * op.grid.axis_node(a) * w;
                C64::new(phase.cos(), phase.sin())
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        Direction::P => {
            let steps = (shift / op.grid.spacing()).round() as i64;
            CMat::from_fn(m, m, |a, b| {
                if a as i64 == (b as i64 + steps).rem_euclid(m as i64) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
    };
    let comm = &unitary * &base - &base * &unitary;
    let sv = linalg::singular_values(&comm)?;
    let value = schatten_from_singulars(&sv, p, op.param.h(), 1);
    let mut report = NormReport::plain("commutator_exponential", value, p, op.param.hbar());
    report.sample_count = Some(1);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{gradient_xi_schatten_exact, harmonic_projection, harmonic_projection_custom};
    use crate::grid::fock_to_grid;
    use approx::assert_relative_eq;

    fn grid_projection(n: usize, half_width: f64, m: usize) -> GridOperator {
        let p = harmonic_projection(n, 1).unwrap();
        let grid = Grid::new(half_width, m, 1).unwrap();
        fock_to_grid(&p, &grid).unwrap()
    }

    #[test]
    fn projection_schatten_norms() {
        let p = harmonic_projection(2, 1).unwrap();
        // rank N with N h = 1, so h^{1/q} (Tr P^q)^{1/q} = (h N)^{1/q} = 1
        // for every q, and the top singular value is 1.
        for exp in [PExp::new(1.0).unwrap(), PExp::new(2.0).unwrap(), PExp::INF] {
            let report = schatten(&p, exp).unwrap();
            assert_relative_eq!(report.value, 1.0, max_relative = 1e-12);
        }
        // Unlinked ℏ breaks the coincidence: rank 1 at level 0 gives h^{1/q}.
        let q = harmonic_projection_custom(0, 1, 6, Some(SemiclassicalParam::new(0.5).unwrap()))
            .unwrap();
        let h = q.space.param().h();
        assert_relative_eq!(
            schatten(&q, PExp::new(2.0).unwrap()).unwrap().value,
            h.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn schatten_is_homogeneous() {
        let p = harmonic_projection(1, 1).unwrap();
        let scaled = FockOperator::new(linalg::scale(&p.matrix, C64::from(-3.0)), p.space.clone())
            .unwrap();
        let p2 = PExp::new(2.0).unwrap();
        assert_relative_eq!(
            schatten(&scaled, p2).unwrap().value,
            3.0 * schatten(&p, p2).unwrap().value,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sobolev1_matches_exact_harmonic_value() {
        let p = harmonic_projection(3, 1).unwrap();
        let report = sobolev1(&p, PExp::new(2.0).unwrap()).unwrap();
        assert!(!report.truncated);
        let exact_xi = gradient_xi_schatten_exact(3, 1, 2.0).unwrap();
        // x and ξ gradients contribute symmetrically to |∇|²
        assert_relative_eq!(
            report.value * report.value,
            2.0 * exact_xi * exact_xi,
            max_relative = 1e-10
        );
    }

    #[test]
    fn quadrature_samples_are_clean() {
        let grid = Grid::new(4.0, 128, 1).unwrap();
        let param = SemiclassicalParam::new(0.05).unwrap();
        let spec = QuadratureSpec::for_grid(&grid, param);
        let samples = spec.samples(&grid, param).unwrap();
        assert!(!samples.is_empty());
        let w0 = samples[0].weight;
        let mut seen = std::collections::HashSet::new();
        for s in &samples {
            assert!(s.radius > 0.0);
            assert_eq!(s.weight, w0);
            assert!(s.radius <= spec.r_max * 1.5);
            let key = (
                (s.z.x / grid.spacing()).round() as i64,
                (s.z.xi / (std::f64::consts::PI * param.hbar() / grid.half_width())).round()
                    as i64,
            );
            assert!(seen.insert(key), "duplicate sample {key:?}");
        }
    }

    #[test]
    fn identity_has_zero_fractional_norms() {
        let grid = Grid::new(4.0, 64, 1).unwrap();
        let param = SemiclassicalParam::new(0.1).unwrap();
        let id = GridOperator::identity(grid, param);
        let spec = QuadratureSpec::for_grid(&grid, param);
        let cache = TranslationDifferences::compute(&id, &spec).unwrap();
        let p2 = PExp::new(2.0).unwrap();
        assert!(frac_sobolev(&cache, 0.5, p2).unwrap().value <= 1e-10);
        assert!(besov(&cache, 0.5, p2, PExp::INF).unwrap().value <= 1e-10);
    }

    #[test]
    fn besov_numerator_bounded_by_four_norms() {
        let op = grid_projection(1, 4.0, 128);
        let spec = QuadratureSpec::for_grid(&op.grid, op.param);
        let cache = TranslationDifferences::compute(&op, &spec).unwrap();
        let p1 = PExp::new(1.0).unwrap();
        let base = schatten(&op, p1).unwrap().value;
        for sv in &cache.second {
            let num = schatten_from_singulars(sv, p1, op.param.h(), 1);
            assert!(num <= 4.0 * base * (1.0 + 1e-10));
        }
    }

    #[test]
    fn commutator_equals_translation_difference() {
        let op = grid_projection(2, 4.0, 128);
        let l = op.grid.half_width();
        // X needs the ξ shift hw on the Δξ_t = h/(2L) lattice; P needs the
        // x shift hw on the Δx lattice.
        let w_x = 3.0 / (2.0 * l);
        let w_p = -2.0 * op.grid.spacing() / op.param.h();
        for (direction, w) in [(Direction::X, w_x), (Direction::P, w_p)] {
            let p2 = PExp::new(2.0).unwrap();
            let comm = commutator_exponential(&op, direction, w, p2).unwrap();
            let shift = 2.0 * std::f64::consts::PI * op.param.hbar() * w;
            let z = match direction {
                Direction::X => PhasePoint::new(0.0, shift),
                Direction::P => PhasePoint::new(shift, 0.0),
            };
            let moved = translate(&op, z).unwrap();
            let diff = &moved.weighted_matrix() - &op.weighted_matrix();
            let sv = linalg::singular_values(&diff).unwrap();
            let trans = schatten_from_singulars(&sv, p2, op.param.h(), 1);
            assert!(
                (comm.value - trans).abs() <= 1e-10 * (1.0 + trans),
                "{direction:?}: commutator {} vs translation {}",
                comm.value,
                trans
            );
        }
    }

    #[test]
    fn incompatible_frequency_is_rejected() {
        let op = grid_projection(0, 4.0, 128);
        let l = op.grid.half_width();
        let w = 0.4 / (2.0 * l);
        let err = commutator_exponential(&op, Direction::X, w, PExp::INF);
        assert!(matches!(err, Err(Error::IncompatiblePhasePoint { .. })));
    }

    #[test]
    fn hoelder_inequality() {
        let a = grid_projection(1, 4.0, 128);
        let b = grid_projection(2, 4.0, 128);
        let prod = &a.weighted_matrix() * &b.weighted_matrix();
        let sv = linalg::singular_values(&prod).unwrap();
        let lhs = schatten_from_singulars(&sv, PExp::new(1.0).unwrap(), a.param.h(), 1);
        let p2 = PExp::new(2.0).unwrap();
        let rhs = schatten(&a, p2).unwrap().value * schatten(&b, p2).unwrap().value;
        assert!(lhs <= rhs * (1.0 + 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn schatten_invariant_under_translation() {
        let op = grid_projection(1, 4.0, 128);
        let dx = op.grid.spacing();
        let dxi = std::f64::consts::PI * op.param.hbar() / op.grid.half_width();
        let moved = translate(&op, PhasePoint::new(5.0 * dx, 3.0 * dxi)).unwrap();
        for p in [PExp::new(1.0).unwrap(), PExp::new(2.0).unwrap(), PExp::INF] {
            assert_relative_eq!(
                schatten(&op, p).unwrap().value,
                schatten(&moved, p).unwrap().value,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn pexp_serde_round_trip() {
        let finite: PExp = serde_json::from_str("2.5").unwrap();
        assert_eq!(finite.value(), 2.5);
        let inf: PExp = serde_json::from_str("\"inf\"").unwrap();
        assert!(inf.is_inf());
        assert_eq!(serde_json::to_string(&inf).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&finite).unwrap(), "2.5");
        assert!(serde_json::from_str::<PExp>("0.5").is_err());
    }
}
