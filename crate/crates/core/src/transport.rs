//! Parallel transport along loops on round spheres: classical 4th-order
//! Runge-Kutta integration of the transport equation
//! `dX/dt = -<x'(t), X> x(t)` with per-step tangency reprojection, and the
//! closed-form transported vectors of the circle family
//! `x_t = (r cos t, r sin t, 0, sqrt(1-r^2), 0, ..., 0)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{HoloError, Result};
use crate::linalg::SubspaceBasis;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Minimal number of integration steps accepted per loop.
pub const MIN_STEPS: usize = 100;

/// Default step count; the RK4 truncation error is then far below roundoff.
pub const DEFAULT_STEPS: usize = 200_000;

/// A closed loop on the unit sphere, parametrized over `[0, 2*pi]`.
#[derive(Debug, Clone)]
pub struct LoopSpec {
    kind: LoopKind,
    reversed: bool,
}

#[derive(Debug, Clone)]
enum LoopKind {
    /// `x_t = (r cos t, r sin t, 0, sqrt(1-r^2), 0, ..., 0)` on S^6 or S^7.
    SmallCircle { r: f64, sphere_dim: usize },
    /// Periodic cubic-spline interpolation of caller-supplied samples on a
    /// uniform grid. Interpolation error is the caller's responsibility.
    Sampled { spline: PeriodicSpline },
}

impl LoopSpec {
    /// The circle family at radius `r` in `(0, 1)` on the 6- or 7-sphere.
    pub fn small_circle(r: f64, sphere_dim: usize) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(HoloError::OutOfRange(format!(
                "circle radius must lie in (0, 1), got {r}"
            )));
        }
        if sphere_dim != 6 && sphere_dim != 7 {
            return Err(HoloError::OutOfRange(format!(
                "circle family lives on S^6 or S^7, got S^{sphere_dim}"
            )));
        }
        Ok(Self {
            kind: LoopKind::SmallCircle { r, sphere_dim },
            reversed: false,
        })
    }

    /// A loop through unit-norm samples at `t_k = 2 pi k / N`; the closing
    /// point `x_{2 pi} = x_0` is implied by periodicity.
    pub fn sampled(positions: Vec<DVector<f64>>) -> Result<Self> {
        if positions.len() < 4 {
            return Err(HoloError::OutOfRange(
                "sampled loop needs at least 4 samples".into(),
            ));
        }
        let dim = positions[0].len();
        for p in &positions {
            if p.len() != dim {
                return Err(HoloError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if (p.norm() - 1.0).abs() > 1e-12 {
                return Err(HoloError::OutOfRange(format!(
                    "loop sample leaves the unit sphere by {:.3e}",
                    (p.norm() - 1.0).abs()
                )));
            }
        }
        Ok(Self {
            kind: LoopKind::Sampled {
                spline: PeriodicSpline::fit(&positions),
            },
            reversed: false,
        })
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        Self {
            kind: self.kind.clone(),
            reversed: !self.reversed,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.kind {
            LoopKind::SmallCircle { sphere_dim, .. } => sphere_dim + 1,
            LoopKind::Sampled { spline } => spline.dim(),
        }
    }

    pub fn position(&self, t: f64) -> DVector<f64> {
        let t = if self.reversed { TWO_PI - t } else { t };
        match &self.kind {
            LoopKind::SmallCircle { r, sphere_dim } => {
                let s = (1.0 - r * r).sqrt();
                let mut x = DVector::zeros(sphere_dim + 1);
                x[0] = r * t.cos();
                x[1] = r * t.sin();
                x[3] = s;
                x
            }
            LoopKind::Sampled { spline } => spline.value(t),
        }
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        let (t, sign) = if self.reversed {
            (TWO_PI - t, -1.0)
        } else {
            (t, 1.0)
        };
        let v = match &self.kind {
            LoopKind::SmallCircle { r, sphere_dim } => {
                let mut v = DVector::zeros(sphere_dim + 1);
                v[0] = -r * t.sin();
                v[1] = r * t.cos();
                v
            }
            LoopKind::Sampled { spline } => spline.derivative(t),
        };
        v * sign
    }
}

/// Periodic cubic spline on a uniform grid over `[0, 2*pi)`, one spline per
/// coordinate, solved with the cyclic Thomas algorithm.
#[derive(Debug, Clone)]
struct PeriodicSpline {
    /// Sample values, one row of coordinates per grid point.
    values: Vec<DVector<f64>>,
    /// Second derivatives at the grid points.
    second: Vec<DVector<f64>>,
    h: f64,
}

impl PeriodicSpline {
    fn fit(positions: &[DVector<f64>]) -> Self {
        let n = positions.len();
        let dim = positions[0].len();
        let h = TWO_PI / n as f64;
        let mut second = vec![DVector::zeros(dim); n];
        for c in 0..dim {
            let rhs: Vec<f64> = (0..n)
                .map(|k| {
                    let prev = positions[(k + n - 1) % n][c];
                    let next = positions[(k + 1) % n][c];
                    6.0 * (prev - 2.0 * positions[k][c] + next) / (h * h)
                })
                .collect();
            let m = solve_cyclic_tridiagonal(1.0, 4.0, 1.0, &rhs);
            for k in 0..n {
                second[k][c] = m[k];
            }
        }
        Self {
            values: positions.to_vec(),
            second,
            h,
        }
    }

    fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn locate(&self, t: f64) -> (usize, usize, f64) {
        let n = self.values.len();
        let mut t = t % TWO_PI;
        if t < 0.0 {
            t += TWO_PI;
        }
        let k = ((t / self.h) as usize).min(n - 1);
        let u = (t - k as f64 * self.h) / self.h;
        (k, (k + 1) % n, u)
    }

    fn value(&self, t: f64) -> DVector<f64> {
        let (k, k1, u) = self.locate(t);
        let a = 1.0 - u;
        let h2 = self.h * self.h / 6.0;
        &self.values[k] * a
            + &self.values[k1] * u
            + &self.second[k] * ((a * a * a - a) * h2)
            + &self.second[k1] * ((u * u * u - u) * h2)
    }

    fn derivative(&self, t: f64) -> DVector<f64> {
        let (k, k1, u) = self.locate(t);
        let a = 1.0 - u;
        let h6 = self.h / 6.0;
        (&self.values[k1] - &self.values[k]) / self.h
            + &self.second[k] * ((1.0 - 3.0 * a * a) * h6)
            + &self.second[k1] * ((3.0 * u * u - 1.0) * h6)
    }
}

/// Solves the cyclic tridiagonal system with constant bands `(sub, diag, sup)`
/// by the Thomas algorithm plus a Sherman-Morrison corner correction.
fn solve_cyclic_tridiagonal(sub: f64, diag: f64, sup: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    assert!(n >= 3);
    let gamma = -diag;
    // Modified system without the corner entries.
    let mut dprime = vec![diag; n];
    dprime[0] = diag - gamma;
    dprime[n - 1] = diag - sub * sup / gamma;
    let thomas = |d: &[f64], r: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        c[0] = sup / d[0];
        x[0] = r[0] / d[0];
        for i in 1..n {
            let m = d[i] - sub * c[i - 1];
            c[i] = sup / m;
            x[i] = (r[i] - sub * x[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    };
    let y = thomas(&dprime, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup;
    let z = thomas(&dprime, &u);
    let factor = (y[0] + sub * y[n - 1] / gamma) / (1.0 + z[0] + sub * z[n - 1] / gamma);
    (0..n).map(|i| y[i] - factor * z[i]).collect()
}

/// A transported vector with its integration diagnostics.
#[derive(Debug, Clone)]
pub struct TransportedVector {
    pub vector: DVector<f64>,
    /// Largest `|<X, x>|` seen before reprojection.
    pub tangency_drift: f64,
    /// `| |X_end| - |X_0| |`.
    pub norm_drift: f64,
}

/// Transports a tangent vector around the loop by RK4 with per-step tangency
/// reprojection. Requires `steps >= 100` and `<X_0, x_0> = 0` within 1e-10.
pub fn transport_vector(
    loop_spec: &LoopSpec,
    x0: &DVector<f64>,
    steps: usize,
) -> Result<TransportedVector> {
    let runs = transport_many(loop_spec, std::slice::from_ref(x0), steps)?;
    Ok(runs.into_iter().next().unwrap())
}

/// Transports several tangent vectors around the loop in one integration pass.
pub fn transport_many(
    loop_spec: &LoopSpec,
    initial: &[DVector<f64>],
    steps: usize,
) -> Result<Vec<TransportedVector>> {
    if steps < MIN_STEPS {
        return Err(HoloError::OutOfRange(format!(
            "need at least {MIN_STEPS} integration steps, got {steps}"
        )));
    }
    let d = loop_spec.ambient_dim();
    let base = loop_spec.position(0.0);
    for v in initial {
        if v.len() != d {
            return Err(HoloError::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        let pairing = v.dot(&base).abs();
        if pairing > 1e-10 {
            return Err(HoloError::NotTangent { residual: pairing });
        }
    }

    let h = TWO_PI / steps as f64;
    let mut states: Vec<DVector<f64>> = initial.to_vec();
    let norms0: Vec<f64> = initial.iter().map(|v| v.norm()).collect();
    let mut tangency_drift = vec![0.0f64; initial.len()];

    // Stage data shared by all transported vectors.
    let mut pos_t = base;
    for k in 0..steps {
        let t = k as f64 * h;
        let vel_t = loop_spec.velocity(t);
        let pos_half = loop_spec.position(t + 0.5 * h);
        let vel_half = loop_spec.velocity(t + 0.5 * h);
        let pos_next = loop_spec.position(t + h);
        let vel_next = loop_spec.velocity(t + h);
        for (idx, x) in states.iter_mut().enumerate() {
            let k1 = -&pos_t * vel_t.dot(x);
            let s1 = &*x + &k1 * (0.5 * h);
            let k2 = -&pos_half * vel_half.dot(&s1);
            let s2 = &*x + &k2 * (0.5 * h);
            let k3 = -&pos_half * vel_half.dot(&s2);
            let s3 = &*x + &k3 * h;
            let k4 = -&pos_next * vel_next.dot(&s3);
            *x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            // Tangency reprojection at the new base point; the pre-projection
            // pairing is the recorded drift.
            let pairing = x.dot(&pos_next);
            tangency_drift[idx] = tangency_drift[idx].max(pairing.abs());
            x.axpy(-pairing, &pos_next, 1.0);
        }
        pos_t = pos_next;
    }

    Ok(states
        .into_iter()
        .enumerate()
        .map(|(idx, vector)| {
            let norm_drift = (vector.norm() - norms0[idx]).abs();
            TransportedVector {
                vector,
                tangency_drift: tangency_drift[idx],
                norm_drift,
            }
        })
        .collect())
}

/// Transport of an orthonormal tangent frame around the loop.
#[derive(Debug, Clone)]
pub struct TransportResult {
    /// Transported frame vectors as columns (`ambient_dim x frame_dim`);
    /// maps initial frame coordinates to final vectors.
    pub matrix: DMatrix<f64>,
    /// Max deviation of the transported frame's Gram matrix from the identity.
    pub ortho_drift: f64,
    /// Max tangency drift over the frame vectors.
    pub tangency_drift: f64,
    pub steps: usize,
}

impl TransportResult {
    /// Coordinates of the transported vectors in the initial frame, a square
    /// `frame_dim x frame_dim` matrix. For a full tangent frame of a closed
    /// loop this is the holonomy element.
    pub fn frame_matrix(&self, frame: &SubspaceBasis) -> DMatrix<f64> {
        frame.as_matrix().transpose() * &self.matrix
    }
}

/// Transports each frame vector and aggregates the diagnostics.
pub fn transport_frame(
    loop_spec: &LoopSpec,
    frame: &SubspaceBasis,
    steps: usize,
) -> Result<TransportResult> {
    let defect = frame.orthonormality_defect();
    if defect > 1e-9 {
        return Err(HoloError::ConstructionFailure(format!(
            "frame is not orthonormal (defect {defect:.3e})"
        )));
    }
    let runs = transport_many(loop_spec, frame.vectors(), steps)?;
    let d = loop_spec.ambient_dim();
    let p = frame.dim();
    let mut matrix = DMatrix::zeros(d, p);
    let mut tangency_drift: f64 = 0.0;
    for (j, run) in runs.iter().enumerate() {
        matrix.set_column(j, &run.vector);
        tangency_drift = tangency_drift.max(run.tangency_drift);
    }
    let gram = matrix.transpose() * &matrix;
    let mut ortho_drift: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let target = if i == j { 1.0 } else { 0.0 };
            ortho_drift = ortho_drift.max((gram[(i, j)] - target).abs());
        }
    }
    Ok(TransportResult {
        matrix,
        ortho_drift,
        tangency_drift,
        steps,
    })
}

/// Closed-form transport of the initial velocity `X_0 = (0, r, 0, ...)` of the
/// circle family; `sphere_dim` 6 or 7 selects the output length 7 or 8.
pub fn closed_form_x(r: f64, t: f64, sphere_dim: usize) -> Result<DVector<f64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(HoloError::OutOfRange(format!(
            "closed form requires r in (0, 1), got {r}"
        )));
    }
    if sphere_dim != 6 && sphere_dim != 7 {
        return Err(HoloError::OutOfRange(format!(
            "closed form lives on S^6 or S^7, got S^{sphere_dim}"
        )));
    }
    let s = (1.0 - r * r).sqrt();
    let r3 = r.powi(3);
    let plus = r3 / (2.0 * (1.0 + s));
    let minus = r3 / (2.0 * (1.0 - s));
    let mut x = DVector::zeros(sphere_dim + 1);
    x[0] = -plus * ((1.0 + s) * t).sin() - minus * ((1.0 - s) * t).sin();
    x[1] = plus * ((1.0 + s) * t).cos() + minus * ((1.0 - s) * t).cos();
    x[3] = -r * r * (s * t).sin();
    Ok(x)
}

/// Closed-form transport of the companion vector `Z_0` on the 7-sphere.
pub fn closed_form_z(r: f64, t: f64) -> Result<DVector<f64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(HoloError::OutOfRange(format!(
            "closed form requires r in (0, 1), got {r}"
        )));
    }
    let s = (1.0 - r * r).sqrt();
    let r5 = r.powi(5);
    let plus = r5 / (2.0 * (1.0 + s));
    let minus = r5 / (2.0 * (1.0 - s));
    let mut z = DVector::zeros(8);
    z[0] = plus * ((1.0 + s) * t).cos() - minus * ((1.0 - s) * t).cos();
    z[1] = plus * ((1.0 + s) * t).sin() - minus * ((1.0 - s) * t).sin();
    z[3] = r.powi(4) * (s * t).cos();
    z[4] = r.powi(3) * s;
    z[7] = r * r * (1.0 - r * r);
    Ok(z)
}

/// Initial velocity of the circle family.
pub fn circle_x0(r: f64, sphere_dim: usize) -> DVector<f64> {
    let mut x = DVector::zeros(sphere_dim + 1);
    x[1] = r;
    x
}

/// The invariant companion vector `Y_0 = (0, 0, r^2, 0, 0, -r sqrt(1-r^2), 0, ...)`.
pub fn circle_y0(r: f64, sphere_dim: usize) -> DVector<f64> {
    let s = (1.0 - r * r).sqrt();
    let mut y = DVector::zeros(sphere_dim + 1);
    y[2] = r * r;
    y[5] = -r * s;
    y
}
