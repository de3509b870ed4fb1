//! Spectral statistics: unfolded nearest-neighbor eigenangle spacings,
//! eigenvector component amplitudes, Kramers pairing of degenerate
//! symplectic spectra, histograms, and Kolmogorov-Smirnov distances.

use crate::ensembles::{Architecture, EnsembleLabel};
use crate::linalg::SpectralDecomposition;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("need at least 2 angles for spacings, got {got}")]
    TooFewAngles { got: usize },
    #[error("Kramers pairing needs an even dimension, got {dim}")]
    OddDimension { dim: usize },
    #[error("spectrum is not pairwise degenerate: pair gap {max_gap:.3e} exceeds tolerance {tol:.3e}")]
    Unpairable { max_gap: f64, tol: f64 },
    #[error("invalid histogram request: {0}")]
    InvalidRange(String),
    #[error("empty sample")]
    EmptySample,
    #[error("partner mask {mask:#x} invalid for dimension {dim}")]
    BadPartnerMask { mask: usize, dim: usize },
    #[error("{label:?} sample mean {mean} violates the unit-mean contract (tolerance {tol:.1e})")]
    MeanInvariant {
        label: SampleLabel,
        mean: f64,
        tol: f64,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Unfolded nearest-neighbor spacings of angles on the circle.
///
/// Returns as many spacings as angles, including the wraparound gap
/// `2π + θ_0 - θ_{K-1}`, each divided by the mean raw spacing `2π/K` so the
/// output mean is 1.
pub fn nn_spacings(angles: &[f64]) -> Result<Vec<f64>, SpectraError> {
    let k = angles.len();
    if k < 2 {
        return Err(SpectraError::TooFewAngles { got: k });
    }
    let scale = k as f64 / TAU;
    let mut out = Vec::with_capacity(k);
    for w in angles.windows(2) {
        out.push((w[1] - w[0]) * scale);
    }
    out.push((TAU + angles[0] - angles[k - 1]) * scale);
    Ok(out)
}

/// Grouping of a doubly degenerate spectrum into `N/2` distinct angles.
#[derive(Clone, Debug)]
pub struct KramersPairing {
    /// `N/2` distinct angles (pair means), ascending.
    pub distinct_angles: Vec<f64>,
    /// Index pairs into the parent decomposition, aligned with
    /// `distinct_angles`.
    pub pair_indices: Vec<(usize, usize)>,
    /// Largest intra-pair angle difference found.
    pub max_pair_gap: f64,
}

/// Pair adjacent sorted angles of a doubly degenerate spectrum.
///
/// Two circular perfect matchings of adjacent angles exist: `(0,1),(2,3),...`
/// and the shifted one that pairs across the `2π` wraparound. The matching
/// with the smaller worst gap is used; pairing fails if that gap exceeds
/// `tol`, which signals a non-symplectic input.
pub fn kramers_pair(
    decomp: &SpectralDecomposition,
    tol: f64,
) -> Result<KramersPairing, SpectraError> {
    let n = decomp.dim();
    if n % 2 != 0 {
        return Err(SpectraError::OddDimension { dim: n });
    }
    let angles = &decomp.angles;
    let pairs = n / 2;

    // Straight matching: (0,1), (2,3), ...
    let straight: Vec<(usize, usize)> = (0..pairs).map(|p| (2 * p, 2 * p + 1)).collect();
    // Shifted matching: (1,2), (3,4), ..., (n-1, 0) across the wraparound.
    let shifted: Vec<(usize, usize)> = (0..pairs)
        .map(|p| {
            if p + 1 < pairs {
                (2 * p + 1, 2 * p + 2)
            } else {
                (n - 1, 0)
            }
        })
        .collect();

    let gap_of = |&(i, j): &(usize, usize)| -> f64 {
        if i <= j {
            angles[j] - angles[i]
        } else {
            TAU + angles[j] - angles[i]
        }
    };
    let max_gap = |m: &[(usize, usize)]| m.iter().map(gap_of).fold(0.0f64, f64::max);

    let straight_gap = max_gap(&straight);
    let shifted_gap = max_gap(&shifted);
    let (matching, max_pair_gap) = if straight_gap <= shifted_gap {
        (straight, straight_gap)
    } else {
        (shifted, shifted_gap)
    };
    if max_pair_gap > tol {
        return Err(SpectraError::Unpairable {
            max_gap: max_pair_gap,
            tol,
        });
    }

    let mut entries: Vec<(f64, (usize, usize))> = matching
        .iter()
        .map(|&(i, j)| {
            let mut mean = angles[i] + gap_of(&(i, j)) / 2.0;
            if mean >= TAU {
                mean -= TAU;
            }
            (mean, (i, j))
        })
        .collect();
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    Ok(KramersPairing {
        distinct_angles: entries.iter().map(|e| e.0).collect(),
        pair_indices: entries.iter().map(|e| e.1).collect(),
        max_pair_gap,
    })
}

/// What a [`StatSample`] holds.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleLabel {
    Spacings,
    Amplitudes,
}

/// Experiment parameters a sample was gathered under.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub architecture: Architecture,
    pub n_qubits: usize,
    pub iterations: usize,
    pub realizations: usize,
}

/// A labeled collection of scalar samples ready for histogramming and
/// goodness-of-fit tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatSample {
    pub label: SampleLabel,
    pub ensemble: EnsembleLabel,
    #[serde(flatten)]
    pub meta: SampleMeta,
    pub values: Vec<f64>,
}

impl StatSample {
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return f64::NAN;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Enforce the unit-mean contract: spacings within 1e-12, amplitudes
    /// within 1e-10.
    pub fn verify_mean(&self) -> Result<(), SpectraError> {
        let tol = match self.label {
            SampleLabel::Spacings => 1e-12,
            SampleLabel::Amplitudes => 1e-10,
        };
        let mean = self.mean();
        if (mean - 1.0).abs() > tol {
            return Err(SpectraError::MeanInvariant {
                label: self.label,
                mean,
                tol,
            });
        }
        Ok(())
    }

    pub fn to_json_writer<W: Write>(&self, w: W) -> Result<(), SpectraError> {
        serde_json::to_writer(w, self)?;
        Ok(())
    }

    pub fn from_json_reader<R: Read>(r: R) -> Result<Self, SpectraError> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// Eigenvector component amplitudes `y = N |v_k|²`, flattened over all
/// components of all eigenvectors; `<y> = 1` per unit vector.
pub fn amplitudes_standard(
    decomp: &SpectralDecomposition,
    ensemble: EnsembleLabel,
    meta: SampleMeta,
) -> StatSample {
    let n = decomp.dim();
    let scale = n as f64;
    let mut values = Vec::with_capacity(n * n);
    for k in 0..n {
        for i in 0..n {
            values.push(scale * decomp.vectors[(i, k)].norm_sqr());
        }
    }
    StatSample {
        label: SampleLabel::Amplitudes,
        ensemble,
        meta,
        values,
    }
}

/// Degeneracy-invariant amplitudes of a symplectic spectrum.
///
/// For one eigenvector per Kramers pair, the weight in each time-reversal
/// basis pair `{k, k ^ mask}` is `y = (N/2)(|v_k|² + |v_{k^mask}|²)`; this is
/// unchanged under remixing inside the degenerate eigenspace. `partner_mask`
/// is the basis-index XOR mask of the `Z` used to build the operator
/// (`ensembles::partner_mask`).
pub fn amplitudes_cse(
    decomp: &SpectralDecomposition,
    pairing: &KramersPairing,
    partner_mask: usize,
    meta: SampleMeta,
) -> Result<StatSample, SpectraError> {
    let n = decomp.dim();
    if partner_mask == 0 || partner_mask >= n {
        return Err(SpectraError::BadPartnerMask {
            mask: partner_mask,
            dim: n,
        });
    }
    let scale = n as f64 / 2.0;
    let mut values = Vec::with_capacity(pairing.pair_indices.len() * n / 2);
    for &(i, j) in &pairing.pair_indices {
        let col = i.min(j);
        for k in 0..n {
            let partner = k ^ partner_mask;
            if k < partner {
                let y = decomp.vectors[(k, col)].norm_sqr()
                    + decomp.vectors[(partner, col)].norm_sqr();
                values.push(scale * y);
            }
        }
    }
    Ok(StatSample {
        label: SampleLabel::Amplitudes,
        ensemble: EnsembleLabel::Cse,
        meta,
        values,
    })
}

/// One histogram bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
    pub density: f64,
}

/// Histogram with an out-of-range tally. Densities are normalized against
/// the full sample size, so `Σ density · bin_width` equals the fraction of
/// samples inside the range.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    pub out_of_range: usize,
}

pub fn histogram(
    values: &[f64],
    bin_count: usize,
    range: (f64, f64),
) -> Result<Histogram, SpectraError> {
    let (lo, hi) = range;
    if bin_count == 0 {
        return Err(SpectraError::InvalidRange("bin count must be >= 1".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(SpectraError::InvalidRange(format!(
            "range [{lo}, {hi}] must be finite with positive width"
        )));
    }
    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0usize; bin_count];
    let mut out_of_range = 0usize;
    for &x in values {
        if x >= lo && x <= hi {
            let idx = (((x - lo) / width) as usize).min(bin_count - 1);
            counts[idx] += 1;
        } else {
            out_of_range += 1;
        }
    }
    let total = values.len();
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| HistogramBin {
            bin_left: lo + i as f64 * width,
            bin_right: lo + (i + 1) as f64 * width,
            count,
            density: if total == 0 {
                0.0
            } else {
                count as f64 / (total as f64 * width)
            },
        })
        .collect();
    Ok(Histogram { bins, out_of_range })
}

impl Histogram {
    /// CSV rendering: `bin_left,bin_right,count,density` rows followed by a
    /// final `# out_of_range,<count>` comment row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count,density\n");
        for b in &self.bins {
            out.push_str(&format!(
                "{},{},{},{}\n",
                b.bin_left, b.bin_right, b.count, b.density
            ));
        }
        out.push_str(&format!("# out_of_range,{}\n", self.out_of_range));
        out
    }
}

/// One-sample Kolmogorov-Smirnov statistic
/// `D = max_i max(|i/K - F(x_i)|, |(i-1)/K - F(x_i)|)` over the sorted sample.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, SpectraError> {
    if values.is_empty() {
        return Err(SpectraError::EmptySample);
    }
    let mut xs = values.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / k - f).abs());
        d = d.max((i as f64 / k - f).abs());
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov statistic: the largest distance between the
/// two empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64, SpectraError> {
    if a.is_empty() || b.is_empty() {
        return Err(SpectraError::EmptySample);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}
