//! Closed-form target distributions and a Haar-measure sampling oracle.
//!
//! The spacing surmises and the χ²ᵥ amplitude laws (ν = 1, 2, 4 for COE,
//! CUE, CSE) are all unit-mean densities on `[0, ∞)`. CDFs use closed forms
//! where elementary and adaptive quadrature with a cached cumulative grid
//! elsewhere; the χ²₁ integrable singularity at the origin is removed by
//! integrating in `t = √y`.

use crate::ensembles::{z_operator, EnsembleLabel, ZMode};
use crate::linalg::{backend, ComplexMatrix};
use crate::rng::SplitMix64;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Which statistic a curve describes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CurveKind {
    SpacingSurmise,
    AmplitudeLaw,
}

/// Absolute tolerance of the adaptive quadrature behind grid-backed CDFs.
const QUAD_TOL: f64 = 1e-10;
/// Cells of the cached cumulative grid.
const GRID_CELLS: usize = 2048;

// --- spacing surmises -------------------------------------------------------

fn spacing_cue_pdf(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    let a = 4.0 / PI;
    (32.0 / (PI * PI)) * s * s * (-a * s * s).exp()
}

fn spacing_coe_pdf(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    (PI * s / 2.0) * (-PI * s * s / 4.0).exp()
}

fn spacing_coe_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    1.0 - (-PI * s * s / 4.0).exp()
}

fn spacing_cse_pdf(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    let a = 64.0 / (9.0 * PI);
    a.powi(3) * s.powi(4) * (-a * s * s).exp()
}

// --- amplitude laws ---------------------------------------------------------

fn amplitude_cue_pdf(y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    (-y).exp()
}

fn amplitude_cue_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    1.0 - (-y).exp()
}

fn amplitude_coe_pdf(y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    if y == 0.0 {
        return f64::INFINITY;
    }
    (2.0 * PI * y).sqrt().recip() * (-y / 2.0).exp()
}

/// χ²₁ density in `t = √y`: `2t · pdf(t²) = √(2/π) e^{-t²/2}`, smooth at 0.
fn amplitude_coe_integrand_t(t: f64) -> f64 {
    (2.0 / PI).sqrt() * (-t * t / 2.0).exp()
}

fn amplitude_cse_pdf(y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    4.0 * y * (-2.0 * y).exp()
}

fn amplitude_cse_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    1.0 - (1.0 + 2.0 * y) * (-2.0 * y).exp()
}

// --- adaptive quadrature ----------------------------------------------------

fn simpson_estimate(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_estimate(a, m, fa, flm, fm);
    let right = simpson_estimate(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
fn adaptive_simpson(f: fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson_estimate(a, b, fa, fm, fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Cumulative quadrature grid over `[0, upper]` in an internal coordinate.
struct GridCdf {
    /// Density in the internal coordinate.
    integrand: fn(f64) -> f64,
    /// Internal coordinate upper limit (tail mass beyond it is < 1e-10).
    upper: f64,
    /// Maps the statistic value to the internal coordinate.
    sqrt_transform: bool,
    cum: OnceLock<Vec<f64>>,
}

impl GridCdf {
    const fn new(integrand: fn(f64) -> f64, upper: f64, sqrt_transform: bool) -> Self {
        Self {
            integrand,
            upper,
            sqrt_transform,
            cum: OnceLock::new(),
        }
    }

    fn step(&self) -> f64 {
        self.upper / GRID_CELLS as f64
    }

    fn grid(&self) -> &Vec<f64> {
        self.cum.get_or_init(|| {
            let step = self.step();
            let cell_tol = QUAD_TOL / GRID_CELLS as f64;
            let mut cum = Vec::with_capacity(GRID_CELLS + 1);
            cum.push(0.0);
            let mut acc = 0.0;
            for i in 0..GRID_CELLS {
                let a = i as f64 * step;
                acc += adaptive_simpson(self.integrand, a, a + step, cell_tol);
                cum.push(acc);
            }
            cum
        })
    }

    fn to_internal(&self, x: f64) -> f64 {
        if self.sqrt_transform {
            x.max(0.0).sqrt()
        } else {
            x
        }
    }

    fn from_internal(&self, t: f64) -> f64 {
        if self.sqrt_transform {
            t * t
        } else {
            t
        }
    }

    /// CDF at internal coordinate `t`.
    fn eval_internal(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let cum = self.grid();
        if t >= self.upper {
            return cum[GRID_CELLS].min(1.0);
        }
        let step = self.step();
        let node = ((t / step) as usize).min(GRID_CELLS - 1);
        let base = node as f64 * step;
        (cum[node] + adaptive_simpson(self.integrand, base, t, QUAD_TOL)).min(1.0)
    }

    fn eval(&self, x: f64) -> f64 {
        self.eval_internal(self.to_internal(x))
    }

    /// Inverse CDF by cell bracketing plus bisection inside one cell.
    fn quantile(&self, u: f64) -> f64 {
        let cum = self.grid();
        if u <= 0.0 {
            return 0.0;
        }
        if u >= cum[GRID_CELLS] {
            return self.from_internal(self.upper);
        }
        let cell = cum.partition_point(|&c| c < u).max(1) - 1;
        let step = self.step();
        let mut lo = cell as f64 * step;
        let mut hi = lo + step;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.eval_internal(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.from_internal(0.5 * (lo + hi))
    }
}

enum CdfStrategy {
    Closed { cdf: fn(f64) -> f64, upper: f64 },
    Grid(GridCdf),
}

/// A reference distribution: a pdf together with a CDF usable for
/// goodness-of-fit tests and inverse-transform sampling.
pub struct DistributionCurve {
    pub kind: CurveKind,
    pub ensemble: EnsembleLabel,
    pdf: fn(f64) -> f64,
    cdf: CdfStrategy,
}

impl DistributionCurve {
    pub fn pdf(&self, x: f64) -> f64 {
        (self.pdf)(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match &self.cdf {
            CdfStrategy::Closed { cdf, .. } => cdf(x),
            CdfStrategy::Grid(grid) => grid.eval(x),
        }
    }

    /// Inverse CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match &self.cdf {
            CdfStrategy::Closed { cdf, upper } => {
                let (mut lo, mut hi) = (0.0f64, *upper);
                if u >= cdf(hi) {
                    return hi;
                }
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            CdfStrategy::Grid(grid) => grid.quantile(u),
        }
    }

    /// Draw one value by inverse-transform sampling.
    pub fn sample(&self, rng: &mut SplitMix64) -> f64 {
        self.quantile(rng.next_f64())
    }
}

/// Nearest-neighbor spacing surmise of an ensemble:
/// CUE `(32s²/π²)e^{-4s²/π}`, COE `(πs/2)e^{-πs²/4}`,
/// CSE `(64/9π)³s⁴e^{-64s²/9π}`.
pub fn spacing_surmise(ensemble: EnsembleLabel) -> DistributionCurve {
    match ensemble {
        EnsembleLabel::Cue => DistributionCurve {
            kind: CurveKind::SpacingSurmise,
            ensemble,
            pdf: spacing_cue_pdf,
            cdf: CdfStrategy::Grid(GridCdf::new(spacing_cue_pdf, 8.0, false)),
        },
        EnsembleLabel::Coe => DistributionCurve {
            kind: CurveKind::SpacingSurmise,
            ensemble,
            pdf: spacing_coe_pdf,
            cdf: CdfStrategy::Closed {
                cdf: spacing_coe_cdf,
                upper: 8.0,
            },
        },
        EnsembleLabel::Cse => DistributionCurve {
            kind: CurveKind::SpacingSurmise,
            ensemble,
            pdf: spacing_cse_pdf,
            cdf: CdfStrategy::Grid(GridCdf::new(spacing_cse_pdf, 8.0, false)),
        },
    }
}

/// Unit-mean χ²ᵥ law of eigenvector component amplitudes, ν = 1, 2, 4 for
/// COE, CUE, CSE: `e^{-y}`, `(2πy)^{-1/2}e^{-y/2}`, `4ye^{-2y}`.
pub fn amplitude_law(ensemble: EnsembleLabel) -> DistributionCurve {
    match ensemble {
        EnsembleLabel::Cue => DistributionCurve {
            kind: CurveKind::AmplitudeLaw,
            ensemble,
            pdf: amplitude_cue_pdf,
            cdf: CdfStrategy::Closed {
                cdf: amplitude_cue_cdf,
                upper: 64.0,
            },
        },
        EnsembleLabel::Coe => DistributionCurve {
            kind: CurveKind::AmplitudeLaw,
            ensemble,
            pdf: amplitude_coe_pdf,
            // t = √y grid: χ²₁ mass beyond y = 64 is ~1e-15.
            cdf: CdfStrategy::Grid(GridCdf::new(amplitude_coe_integrand_t, 8.0, true)),
        },
        EnsembleLabel::Cse => DistributionCurve {
            kind: CurveKind::AmplitudeLaw,
            ensemble,
            pdf: amplitude_cse_pdf,
            cdf: CdfStrategy::Closed {
                cdf: amplitude_cse_cdf,
                upper: 32.0,
            },
        },
    }
}

// --- Haar oracle ------------------------------------------------------------

/// Haar-distributed unitary, sampled by orthonormalizing a complex Gaussian
/// matrix (QR) and correcting each column by the unit phase of the conjugate
/// of the triangular factor's diagonal, which removes the decomposition bias.
pub fn haar_unitary(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    backend::seq();
    let mut gauss = faer::Mat::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let (re, im) = rng.next_normal_pair();
            gauss[(i, j)] = Complex64::new(re, im);
        }
    }
    let qr = gauss.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d.conj() / d.norm()
        };
        for i in 0..dim {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

/// Haar COE draw: `U^T U` of a Haar CUE draw; symmetric unitary.
pub fn haar_coe(dim: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let u = haar_unitary(dim, rng);
    u.transpose().matmul(&u).expect("square dims")
}

/// Haar CSE draw on `n` qubits: `-Z U^T Z U` with the standard
/// `Z = I ⊗ ... ⊗ I ⊗ z`; self-dual with a doubly degenerate spectrum.
pub fn haar_cse(n_qubits: usize, rng: &mut SplitMix64) -> ComplexMatrix {
    let dim = 1usize << n_qubits;
    let u = haar_unitary(dim, rng);
    let z = z_operator(n_qubits, ZMode::Standard).expect("standard z always exists");
    let zu = z.matmul(&u).expect("square dims");
    let tzu = u.transpose().matmul(&zu).expect("square dims");
    z.matmul(&tzu)
        .expect("square dims")
        .scale(Complex64::new(-1.0, 0.0))
}
