//! The symmetric space of SL_n(ℝ) as determinant-one SPD matrices, the
//! displacement function of a real representation and its minimization.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::reptheory::{composition_series, Representation};

/// Gradient norm at which a point is a candidate minimizer.
pub const GRAD_TOL: f64 = 1e-6;
/// Largest Newton step (pseudo-inverse of the finite-difference Hessian)
/// accepted at a minimizer.
pub const NEWTON_TOL: f64 = 1e-3;
/// Candidate minimizers farther than this from the identity count as escapes.
pub const RADIUS_GUARD: f64 = 20.0;
/// Distance beyond which a stalled descent is declared divergent.
pub const ESCAPE_RADIUS: f64 = 50.0;
/// Objective decrease per unit distance below which descent has stalled.
pub const STALL_TOL: f64 = 1e-6;
pub const DEFAULT_BUDGET: usize = 5000;

const ARMIJO_C: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const MAX_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-12;
const MAX_ESCAPES: usize = 3;
const FD_DELTA: f64 = 1e-4;
const PINV_CUTOFF: f64 = 1e-11;
const POLISH_GRAD: f64 = 1e-10;
const POLISH_STEPS: usize = 200;

/// A symmetric positive-definite matrix of determinant one.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdPoint {
    m: DMatrix<f64>,
}

fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn eig_sym(a: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(symmetrize(a))
}

fn spectral(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = eig_sym(a);
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// exp of a symmetric matrix.
pub fn expm_sym(s: &DMatrix<f64>) -> DMatrix<f64> {
    spectral(s, f64::exp)
}

impl SpdPoint {
    /// Checks symmetry (1e-12 relative), positivity and det = 1 (1e-9).
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let p = SpdPoint::normalized(m.clone())?;
        let det = m.determinant();
        if (det - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "SPD point must have determinant 1, got {det}"
            )));
        }
        Ok(p)
    }

    /// Rescales a symmetric positive-definite matrix to determinant one.
    pub fn normalized(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidInput(
                "SPD point must be a nonempty square matrix".into(),
            ));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (&m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidInput("SPD point must be symmetric".into()));
        }
        let m = symmetrize(&m);
        let e = eig_sym(&m);
        if e.eigenvalues.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidInput(
                "SPD point must be positive definite".into(),
            ));
        }
        let n = m.nrows() as f64;
        let log_det: f64 = e.eigenvalues.iter().map(|w| w.ln()).sum();
        Ok(SpdPoint {
            m: m * (-log_det / n).exp(),
        })
    }

    pub fn identity(n: usize) -> Self {
        SpdPoint {
            m: DMatrix::identity(n, n),
        }
    }

    /// h·hᵀ, rescaled to determinant one.
    pub fn from_frame(h: &DMatrix<f64>) -> Result<Self> {
        SpdPoint::normalized(symmetrize(&(h * h.transpose())))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// g·x = g x gᵀ, rescaled to determinant one.
    pub fn act(&self, g: &DMatrix<f64>) -> Result<SpdPoint> {
        SpdPoint::normalized(symmetrize(&(g * &self.m * g.transpose())))
    }

    pub fn sqrt(&self) -> DMatrix<f64> {
        spectral(&self.m, f64::sqrt)
    }
}

/// Riemannian distance sqrt(Σ log² μ_i), μ the eigenvalues of x⁻¹y.
pub fn dist(x: &SpdPoint, y: &SpdPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let l = x.m.clone().cholesky().ok_or(Error::Singular)?.l();
    let li = l.try_inverse().ok_or(Error::Singular)?;
    let c = &li * &y.m * li.transpose();
    let e = eig_sym(&c);
    Ok(e.eigenvalues
        .iter()
        .map(|w| w.ln().powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Generators rescaled to determinant ±1, as f64 matrices.
pub fn normalized_generators(rho: &Representation) -> Result<Vec<DMatrix<f64>>> {
    rho.det_normalized()?
        .matrices()
        .map(|m| m.to_dmatrix())
        .collect()
}

fn raw_generators(rho: &Representation) -> Result<Vec<DMatrix<f64>>> {
    if !rho.field().is_real() {
        return Err(Error::NotRealField);
    }
    rho.matrices().map(|m| m.to_dmatrix()).collect()
}

/// d_ρ(x) = sqrt(Σ_s d(x, ρ(s)·x)²) for the determinant-normalized generators.
pub fn displacement(rho: &Representation, x: &SpdPoint) -> Result<f64> {
    let gens = normalized_generators(rho)?;
    let mut total = 0.0;
    for g in &gens {
        if g.nrows() != x.dim() {
            return Err(Error::DimensionMismatch(g.nrows(), x.dim()));
        }
        total += dist(x, &x.act(g)?)?.powi(2);
    }
    Ok(total.sqrt())
}

fn check_direction(dir: &DMatrix<f64>, n: usize) -> Result<()> {
    if dir.nrows() != n || dir.ncols() != n {
        return Err(Error::DimensionMismatch(n, dir.nrows()));
    }
    let scale = dir.amax().max(1.0);
    if (dir - dir.transpose()).amax() > 1e-12 * scale || dir.trace().abs() > 1e-12 * scale {
        return Err(Error::InvalidInput(
            "direction must be symmetric and traceless".into(),
        ));
    }
    Ok(())
}

fn conjugated(gens: &[DMatrix<f64>], h: &DMatrix<f64>) -> Result<Vec<DMatrix<f64>>> {
    let hi = h.clone().try_inverse().ok_or(Error::Singular)?;
    if !hi.iter().all(|x| x.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(gens.iter().map(|g| &hi * g * h).collect())
}

/// J(h) = Σ_s tr(log²(M_s M_sᵀ)) with M_s = h⁻¹ρ(s)h, using the generators as given.
pub fn objective(rho: &Representation, h: &DMatrix<f64>) -> Result<f64> {
    let ms = conjugated(&raw_generators(rho)?, h)?;
    Ok(objective_and_gradient(&ms)?.0)
}

/// Directional derivative of J at h along h ↦ h·exp(tH).
pub fn grad_objective(rho: &Representation, h: &DMatrix<f64>, dir: &DMatrix<f64>) -> Result<f64> {
    let gens = raw_generators(rho)?;
    check_direction(dir, rho.dim())?;
    let ms = conjugated(&gens, h)?;
    let mut total = 0.0;
    for m in &ms {
        let a = m * m.transpose();
        let e = eig_sym(&a);
        if e.eigenvalues.iter().any(|&w| w <= 0.0) {
            return Err(Error::Singular);
        }
        let log_a = spectral(&a, f64::ln);
        let a_inv = spectral(&a, |w| 1.0 / w);
        let c = m * dir - dir * m;
        let da = &c * m.transpose() + m * c.transpose();
        total += 2.0 * (log_a * a_inv * da).trace();
    }
    Ok(total)
}

/// Orthogonal projection onto symmetric traceless matrices.
fn project(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let s = symmetrize(g);
    let t = s.trace() / n as f64;
    s - DMatrix::identity(n, n) * t
}

/// Objective and its Riemannian gradient (symmetric traceless) at the
/// conjugated generators.
fn objective_and_gradient(ms: &[DMatrix<f64>]) -> Result<(f64, DMatrix<f64>)> {
    let n = ms[0].nrows();
    let mut j = 0.0;
    let mut g = DMatrix::zeros(n, n);
    for m in ms {
        let a = m * m.transpose();
        let e = eig_sym(&a);
        if e.eigenvalues
            .iter()
            .any(|&w| w.is_nan() || w <= 0.0 || w.is_infinite())
        {
            return Err(Error::Singular);
        }
        let lw = e.eigenvalues.map(f64::ln);
        let l = &e.eigenvectors * DMatrix::from_diagonal(&lw) * e.eigenvectors.transpose();
        let bw = DVector::from_iterator(n, lw.iter().zip(e.eigenvalues.iter()).map(|(l, w)| l / w));
        let b = &e.eigenvectors * DMatrix::from_diagonal(&bw) * e.eigenvectors.transpose();
        j += lw.iter().map(|x| x * x).sum::<f64>();
        g += (m.transpose() * b * m - l) * 4.0;
    }
    Ok((j, project(&g)))
}

/// Orthonormal basis of symmetric traceless n×n matrices (Frobenius inner product).
pub fn sym_traceless_basis(n: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            let mut e = DMatrix::zeros(n, n);
            e[(i, j)] = r;
            e[(j, i)] = r;
            out.push(e);
        }
    }
    for i in 0..n.saturating_sub(1) {
        let mut e = DMatrix::zeros(n, n);
        for k in 0..=i {
            e[(k, k)] = 1.0;
        }
        e[(i + 1, i + 1)] = -((i + 1) as f64);
        let norm = e.norm();
        out.push(e / norm);
    }
    out
}

fn step_generators(ms: &[DMatrix<f64>], p: &DMatrix<f64>, t: f64) -> Vec<DMatrix<f64>> {
    let e = expm_sym(&(p * t));
    let ei = expm_sym(&(p * -t));
    ms.iter().map(|m| &ei * m * &e).collect()
}

/// Length of the Newton step from a central-difference Hessian of the gradient,
/// ignoring directions whose curvature is below the pseudo-inverse cutoff
/// relative to the largest curvature. A relative cutoff keeps the step
/// meaningful far out on an escape ray, where all curvatures are tiny.
fn newton_length(ms: &[DMatrix<f64>], g: &DMatrix<f64>) -> Result<f64> {
    let n = ms[0].nrows();
    let basis = sym_traceless_basis(n);
    let m = basis.len();
    if m == 0 {
        return Ok(0.0);
    }
    let coords = DVector::from_iterator(m, basis.iter().map(|b| g.dot(b)));
    let mut hess = DMatrix::zeros(m, m);
    for (j, b) in basis.iter().enumerate() {
        let (_, gp) = objective_and_gradient(&step_generators(ms, b, FD_DELTA))?;
        let (_, gm) = objective_and_gradient(&step_generators(ms, b, -FD_DELTA))?;
        let diff = (gp - gm) / (2.0 * FD_DELTA);
        for (i, c) in basis.iter().enumerate() {
            hess[(i, j)] = diff.dot(c);
        }
    }
    let e = eig_sym(&hess);
    let top = e.eigenvalues.iter().fold(0.0f64, |a, &w| a.max(w));
    if top <= 0.0 {
        return Ok(0.0);
    }
    let c = e.eigenvectors.transpose() * coords;
    Ok(c.iter()
        .zip(e.eigenvalues.iter())
        .filter(|(_, &w)| w > PINV_CUTOFF * top)
        .map(|(c, w)| (c / w).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Distance from the identity to h·hᵀ.
fn frame_distance(h: &DMatrix<f64>) -> f64 {
    let sv = h.clone().svd(false, false).singular_values;
    sv.iter()
        .map(|s| (2.0 * s.ln()).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Attainment {
    Attained,
    Diverged,
    Maxiter,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub objective: f64,
    /// Geodesic length of the accepted step.
    pub step: f64,
    /// Distance from the identity to the current point.
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementReport {
    pub lambda_est: f64,
    pub status: Attainment,
    pub minimizer: Option<SpdPoint>,
    /// Final frame h; the last point is h·hᵀ.
    pub frame: DMatrix<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub newton_step: Option<f64>,
    pub escapes: usize,
    pub trace: Vec<TraceEntry>,
}

impl DisplacementReport {
    pub fn attained(&self) -> bool {
        self.status == Attainment::Attained
    }

    pub fn final_point(&self) -> Result<SpdPoint> {
        SpdPoint::from_frame(&self.frame)
    }
}

struct State {
    ms: Vec<DMatrix<f64>>,
    h: DMatrix<f64>,
    j: f64,
    g: DMatrix<f64>,
}

enum LineSearch {
    Accepted {
        ms: Vec<DMatrix<f64>>,
        j: f64,
        g: DMatrix<f64>,
        e: DMatrix<f64>,
        t: f64,
    },
    Failed,
}

fn line_search(st: &State, p: &DMatrix<f64>, slope: f64) -> LineSearch {
    let pn = p.norm();
    let mut t = if pn > 0.0 {
        (MAX_STEP / pn).min(1.0)
    } else {
        1.0
    };
    loop {
        let ms = step_generators(&st.ms, p, t);
        if let Ok((j, g)) = objective_and_gradient(&ms) {
            if j <= st.j + ARMIJO_C * t * slope {
                return LineSearch::Accepted {
                    ms,
                    j,
                    g,
                    e: expm_sym(&(p * t)),
                    t,
                };
            }
        }
        t *= SHRINK;
        if t < MIN_STEP {
            return LineSearch::Failed;
        }
    }
}

fn flatten(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.len(), m.iter().copied())
}

/// Quasi-Newton descent of J over frames h, with x = h·hᵀ.
///
/// A stationary point is accepted only if the Newton step is short and the
/// point lies inside [`RADIUS_GUARD`]; otherwise it counts as an escape, and
/// after [`MAX_ESCAPES`] the run is declared divergent. Divergent runs keep
/// descending to sharpen the estimate of the infimum.
pub fn minimize_displacement(rho: &Representation, budget: usize) -> Result<DisplacementReport> {
    let gens = normalized_generators(rho)?;
    let n = rho.dim();
    let nn = n * n;
    let (j, g) = objective_and_gradient(&gens)?;
    let mut st = State {
        ms: gens,
        h: DMatrix::identity(n, n),
        j,
        g,
    };
    let mut hinv = DMatrix::<f64>::identity(nn, nn);
    let mut escapes = 0;
    let mut diverged = false;
    let mut newton_step = None;
    let mut trace = Vec::new();
    let mut iterations = 0;

    let finish = |st: &State, status, iterations, newton_step, escapes, trace| {
        let minimizer = if status == Attainment::Attained {
            Some(SpdPoint::from_frame(&st.h)?)
        } else {
            None
        };
        Ok(DisplacementReport {
            lambda_est: st.j.max(0.0).sqrt(),
            status,
            minimizer,
            frame: st.h.clone(),
            iterations,
            gradient_norm: st.g.norm(),
            newton_step,
            escapes,
            trace,
        })
    };

    while iterations < budget {
        let gn = st.g.norm();
        let d = frame_distance(&st.h);
        if !diverged && gn <= GRAD_TOL {
            let nl = newton_length(&st.ms, &st.g)?;
            newton_step = Some(nl);
            if nl <= NEWTON_TOL && d <= RADIUS_GUARD {
                polish(&mut st, &mut trace, &mut iterations);
                return finish(
                    &st,
                    Attainment::Attained,
                    iterations,
                    newton_step,
                    escapes,
                    trace,
                );
            }
            escapes += 1;
            if escapes >= MAX_ESCAPES {
                diverged = true;
            }
        }
        if d > ESCAPE_RADIUS {
            let stalled = trace.last().is_none_or(|e: &TraceEntry| {
                let prev = trace
                    .len()
                    .checked_sub(2)
                    .map_or(e.objective, |k| trace[k].objective);
                e.step == 0.0 || (prev - e.objective) / e.step < STALL_TOL
            });
            if diverged || stalled {
                return finish(
                    &st,
                    Attainment::Diverged,
                    iterations,
                    newton_step,
                    escapes,
                    trace,
                );
            }
        }

        let gv = flatten(&st.g);
        let mut p = project(&DMatrix::from_column_slice(
            n,
            n,
            (-(&hinv * &gv)).as_slice(),
        ));
        let mut slope = p.dot(&st.g);
        if slope >= 0.0 || !slope.is_finite() {
            hinv = DMatrix::identity(nn, nn);
            p = -st.g.clone();
            slope = -gn * gn;
        }
        if gn == 0.0 {
            return finish(
                &st,
                if diverged {
                    Attainment::Diverged
                } else {
                    Attainment::Maxiter
                },
                iterations,
                newton_step,
                escapes,
                trace,
            );
        }
        match line_search(&st, &p, slope) {
            LineSearch::Failed => {
                if diverged {
                    return finish(
                        &st,
                        Attainment::Diverged,
                        iterations,
                        newton_step,
                        escapes,
                        trace,
                    );
                }
                let nl = newton_length(&st.ms, &st.g)?;
                newton_step = Some(nl);
                let status = if nl <= NEWTON_TOL && d <= RADIUS_GUARD && gn <= GRAD_TOL {
                    Attainment::Attained
                } else if nl > NEWTON_TOL || d > RADIUS_GUARD {
                    Attainment::Diverged
                } else {
                    Attainment::Maxiter
                };
                return finish(&st, status, iterations, newton_step, escapes, trace);
            }
            LineSearch::Accepted { ms, j, g, e, t } => {
                let s = flatten(&(&p * t));
                let y = flatten(&(&g - &st.g));
                let sy = s.dot(&y);
                if sy > 1e-16 * s.norm() * y.norm() {
                    let r = 1.0 / sy;
                    let id = DMatrix::<f64>::identity(nn, nn);
                    let left = &id - (&s * y.transpose()) * r;
                    let right = &id - (&y * s.transpose()) * r;
                    hinv = left * &hinv * right + (&s * s.transpose()) * r;
                }
                st.h = &st.h * e;
                st.ms = ms;
                st.j = j;
                st.g = g;
                iterations += 1;
                trace.push(TraceEntry {
                    objective: j,
                    step: 2.0 * t * p.norm(),
                    distance: frame_distance(&st.h),
                });
            }
        }
    }
    finish(
        &st,
        if diverged {
            Attainment::Diverged
        } else {
            Attainment::Maxiter
        },
        iterations,
        newton_step,
        escapes,
        trace,
    )
}

/// Extra gradient steps at an accepted minimizer to tighten its location.
fn polish(st: &mut State, trace: &mut Vec<TraceEntry>, iterations: &mut usize) {
    for _ in 0..POLISH_STEPS {
        let gn = st.g.norm();
        if gn <= POLISH_GRAD {
            return;
        }
        let p = -st.g.clone();
        match line_search(st, &p, -gn * gn) {
            LineSearch::Failed => return,
            LineSearch::Accepted { ms, j, g, e, t } => {
                st.h = &st.h * e;
                st.ms = ms;
                st.j = j;
                st.g = g;
                *iterations += 1;
                trace.push(TraceEntry {
                    objective: j,
                    step: 2.0 * t * p.norm(),
                    distance: frame_distance(&st.h),
                });
            }
        }
    }
}

/// Along geodesics through the minimizer toward each invariant flag of the
/// composition series, a displacement that is non-increasing on the
/// positive ray must be constant on the whole line.
pub fn check_symmetry_at_min(
    rho: &Representation,
    report: &DisplacementReport,
    seed: u64,
) -> Result<bool> {
    if !rho.field().is_real() {
        return Err(Error::NotRealField);
    }
    let x = match (&report.status, &report.minimizer) {
        (Attainment::Attained, Some(x)) => x.clone(),
        _ => return Err(Error::NotAttained),
    };
    let n = rho.dim();
    let flag = composition_series(rho, seed);
    if flag.block_sizes.len() < 2 {
        return Ok(true);
    }
    let gens = normalized_generators(rho)?;
    let xh = x.sqrt();
    let xhi = xh.clone().try_inverse().ok_or(Error::Singular)?;
    let q = (&xhi * flag.basis_change.to_dmatrix()?).qr().q();
    let b = &xh * q;
    let offsets = flag.offsets();
    for &k in &offsets[1..offsets.len() - 1] {
        let w: Vec<f64> = (0..n)
            .map(|i| if i < k { (n - k) as f64 } else { -(k as f64) })
            .collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let wd = DVector::from_iterator(n, w.iter().map(|v| v / norm));
        for g in &gens {
            let f = |t: i32| -> Result<f64> {
                let e = DMatrix::from_diagonal(&wd.map(|v| (v * t as f64).exp()));
                let r = SpdPoint::normalized(symmetrize(&(&b * e * b.transpose())))?;
                dist(&r, &r.act(g)?)
            };
            let values: Vec<f64> = (-5..=5).map(f).collect::<Result<_>>()?;
            let positive = &values[5..];
            let non_increasing = positive.windows(2).all(|p| p[1] <= p[0] + 1e-7);
            if non_increasing {
                let hi = values.iter().copied().fold(f64::MIN, f64::max);
                let lo = values.iter().copied().fold(f64::MAX, f64::min);
                if hi - lo > 1e-6 * hi.max(1.0) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
