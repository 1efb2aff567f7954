//! Classical Mach-Zehnder realization of a qubit measurement.
//!
//! Two classical analytic signals `aᵢ I(t)` enter the ports, a tuned 2×2
//! unitary mixes them into `a′ = U a`, and each detector integrates
//! `|a′ᵢ I(t)|²`. Weighting the detector readings with the observable's
//! eigenvalues gives exactly the Born-rule average; the common envelope
//! `I(t)` cancels in the normalized ratio.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hvmodels::Tag;
use crate::opalg::{DensityMatrix, HermitianOperator, OpError};
use crate::rng::{complex_gaussian, substream};
use crate::scalar::{cz, Scalar, C};

/// Allowed disagreement between the time-integrated ratio and the
/// envelope-free closed form, relative to the largest weight.
pub const CANCELLATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("interferometer acts on qubits; observable has dimension {0}")]
    WrongDimension(usize),
    #[error("both input amplitudes are zero")]
    ZeroAmplitudes,
    #[error("signal carries no intensity")]
    EmptySignal,
    #[error("unknown signal kind {0:?} (expected constant, gaussian-noise or chirp)")]
    UnknownSignalKind(String),
    #[error("envelope did not cancel: ratio {ratio} vs closed form {direct}")]
    CancellationMismatch { ratio: f64, direct: f64 },
}

/// A 2×2 unitary plus the detector weights that realize one observable.
///
/// Row convention: `a′ᵢ = Σⱼ Uᵢⱼ aⱼ`, and detector `i` carries weight `λᵢ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct InterferometerTuning<T: Scalar> {
    pub unitary: [[C<T>; 2]; 2],
    pub weights: [T; 2],
    pub observable_tag: Option<Tag>,
}

impl<T: Scalar> InterferometerTuning<T> {
    pub fn with_tag(mut self, tag: Tag) -> Self {
        self.observable_tag = Some(tag);
        self
    }

    /// Same interferometer, readings squared: realizes `X²` classically.
    pub fn squared(&self) -> Self {
        Self {
            weights: self.weights.map(|w| w * w),
            ..self.clone()
        }
    }

    pub fn apply(&self, a: [C<T>; 2]) -> [C<T>; 2] {
        let u = &self.unitary;
        [
            u[0][0] * a[0] + u[0][1] * a[1],
            u[1][0] * a[0] + u[1][1] * a[1],
        ]
    }

    /// max |(U†U − I)ᵢⱼ|.
    pub fn unitarity_defect(&self) -> T {
        let u = &self.unitary;
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = u.iter().fold(cz(), |acc, row| acc + row[i].conj() * row[j]);
                if i == j {
                    acc.re = acc.re - T::one();
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

pub fn tuning_from_observable<T: Scalar>(
    x: &HermitianOperator<T>,
) -> Result<InterferometerTuning<T>, OpticsError> {
    if x.dim() != 2 {
        return Err(OpticsError::WrongDimension(x.dim()));
    }
    let s = x.spectral()?;
    let row = |v: &Vec<C<T>>| [v[0].conj(), v[1].conj()];
    Ok(InterferometerTuning {
        unitary: [row(&s.eigenvectors[0]), row(&s.eigenvectors[1])],
        weights: [s.eigenvalues[0], s.eigenvalues[1]],
        observable_tag: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    Constant,
    GaussianNoise,
    Chirp,
}

impl SignalKind {
    pub const ALL: [SignalKind; 3] = [
        SignalKind::Constant,
        SignalKind::GaussianNoise,
        SignalKind::Chirp,
    ];
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignalKind::Constant => "constant",
            SignalKind::GaussianNoise => "gaussian-noise",
            SignalKind::Chirp => "chirp",
        })
    }
}

impl FromStr for SignalKind {
    type Err = OpticsError;

    fn from_str(s: &str) -> Result<Self, OpticsError> {
        match s {
            "constant" => Ok(SignalKind::Constant),
            "gaussian-noise" => Ok(SignalKind::GaussianNoise),
            "chirp" => Ok(SignalKind::Chirp),
            other => Err(OpticsError::UnknownSignalKind(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalDescription {
    pub kind: SignalKind,
    pub seed: u64,
    pub length: usize,
}

/// Samples of the common envelope `I(t)` at discrete ticks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ClassicalSignal<T: Scalar> {
    pub samples: Vec<C<T>>,
    pub description: SignalDescription,
}

impl<T: Scalar> ClassicalSignal<T> {
    /// `⟨⟨|I(t)|²⟩⟩` as a plain sum over ticks.
    pub fn intensity(&self) -> T {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn generate_signal<T: Scalar>(
    kind: SignalKind,
    n: usize,
    seed: u64,
) -> Result<ClassicalSignal<T>, OpticsError> {
    let samples: Vec<C<T>> = match kind {
        SignalKind::Constant => vec![C::new(T::one(), T::zero()); n],
        SignalKind::GaussianNoise => {
            let mut rng = substream(seed, 0);
            (0..n).map(|_| complex_gaussian(&mut rng)).collect()
        }
        SignalKind::Chirp => {
            let len = T::from_usize(n.max(1)).unwrap();
            (0..n)
                .map(|t| {
                    let t = T::from_usize(t).unwrap();
                    C::from_polar(T::one(), T::PI() * t * t / len)
                })
                .collect()
        }
    };
    let signal = ClassicalSignal {
        samples,
        description: SignalDescription {
            kind,
            seed,
            length: n,
        },
    };
    if signal.intensity() <= T::zero() {
        return Err(OpticsError::EmptySignal);
    }
    Ok(signal)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OpticsResult<T: Scalar> {
    /// `Σᵢ λᵢ ⟨⟨|a′ᵢI|²⟩⟩ / (⟨⟨|I|²⟩⟩ ‖a‖²)`
    pub weighted_average: T,
    /// `⟨⟨|a′ᵢ I(t)|²⟩⟩` for the two output ports.
    pub per_detector_intensity: [T; 2],
    /// `⟨⟨|I(t)|²⟩⟩`
    pub normalization: T,
}

pub fn simulate<T: Scalar>(
    tuning: &InterferometerTuning<T>,
    amplitudes: [C<T>; 2],
    signal: &ClassicalSignal<T>,
) -> Result<OpticsResult<T>, OpticsError> {
    let input_power = amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr();
    if input_power == T::zero() {
        return Err(OpticsError::ZeroAmplitudes);
    }
    let out = tuning.apply(amplitudes);
    let mut per_detector_intensity = [T::zero(); 2];
    for (port, intensity) in out.iter().zip(per_detector_intensity.iter_mut()) {
        *intensity = signal.samples.iter().map(|s| (*port * *s).norm_sqr()).sum();
    }
    let normalization = signal.intensity();
    if normalization <= T::zero() {
        return Err(OpticsError::EmptySignal);
    }
    let numerator: T = tuning
        .weights
        .iter()
        .zip(&per_detector_intensity)
        .map(|(w, i)| *w * *i)
        .sum();
    let weighted_average = numerator / (normalization * input_power);

    let direct: T = tuning
        .weights
        .iter()
        .zip(&out)
        .map(|(w, port)| *w * port.norm_sqr())
        .sum::<T>()
        / input_power;
    let scale = tuning.weights.iter().fold(T::one(), |m, w| m.max(w.abs()));
    if (weighted_average - direct).abs() > T::tol(CANCELLATION_TOL) * scale {
        return Err(OpticsError::CancellationMismatch {
            ratio: weighted_average.as_f64(),
            direct: direct.as_f64(),
        });
    }
    Ok(OpticsResult {
        weighted_average,
        per_detector_intensity,
        normalization,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QuantumComparison<T: Scalar> {
    pub classical: T,
    /// Tr(ρₐ X)
    pub quantum: T,
    pub deviation: T,
}

/// Classical interferometer average (constant envelope) against the Born
/// rule for the pure state with the same amplitudes.
pub fn compare_with_quantum<T: Scalar>(
    x: &HermitianOperator<T>,
    amplitudes: [C<T>; 2],
) -> Result<QuantumComparison<T>, OpticsError> {
    let tuning = tuning_from_observable(x)?;
    let signal = generate_signal(SignalKind::Constant, 1, 0)?;
    let classical = simulate(&tuning, amplitudes, &signal)?.weighted_average;
    let rho = DensityMatrix::pure(&amplitudes)?;
    let quantum = rho.expectation(x)?;
    Ok(QuantumComparison {
        classical,
        quantum,
        deviation: (classical - quantum).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{canonical_pair, paper_state_amplitudes};

    fn amps(a: f64, b: f64) -> [C<f64>; 2] {
        [C::new(a, 0.0), C::new(b, 0.0)]
    }

    #[test]
    fn diagonal_observable_needs_no_mixing() {
        let (a, _) = canonical_pair::<f64>();
        let t = tuning_from_observable(&a).unwrap();
        assert_eq!(t.weights, [0.0, 1.0]);
        // eigenvalue 0 belongs to |1⟩, so the ports are swapped relative to I.
        assert_eq!(
            t.unitary,
            [
                [C::new(0.0, 0.0), C::new(1.0, 0.0)],
                [C::new(1.0, 0.0), C::new(0.0, 0.0)]
            ]
        );
    }

    #[test]
    fn canonical_tunings() {
        let (a, b) = canonical_pair::<f64>();
        let tb = tuning_from_observable(&b).unwrap();
        let r = 0.5f64.sqrt();
        assert!((tb.weights[0] - (1.0 - r)).abs() < 1e-14);
        assert!((tb.weights[1] - (1.0 + r)).abs() < 1e-14);
        assert!(tb.unitarity_defect() < 1e-12);
        let tc = tuning_from_observable(&b.sub(&a).unwrap()).unwrap();
        assert!(tc.weights[0].abs() < 1e-15 && (tc.weights[1] - 1.0).abs() < 1e-15);
        let three = HermitianOperator::<f64>::identity(3);
        assert_eq!(
            tuning_from_observable(&three),
            Err(OpticsError::WrongDimension(3))
        );
    }

    #[test]
    fn signals() {
        let s = generate_signal::<f64>(SignalKind::Constant, 8, 0).unwrap();
        assert_eq!(s.samples, vec![C::new(1.0, 0.0); 8]);
        let g1 = generate_signal::<f64>(SignalKind::GaussianNoise, 64, 3).unwrap();
        let g2 = generate_signal::<f64>(SignalKind::GaussianNoise, 64, 3).unwrap();
        assert_eq!(g1, g2);
        assert!(
            generate_signal::<f64>(SignalKind::GaussianNoise, 10_000, 3)
                .unwrap()
                .intensity()
                > 0.0
        );
        let chirp = generate_signal::<f64>(SignalKind::Chirp, 16, 0).unwrap();
        assert!(chirp.samples.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert_eq!(
            generate_signal::<f64>(SignalKind::Constant, 0, 0),
            Err(OpticsError::EmptySignal)
        );
        assert_eq!("chirp".parse::<SignalKind>().unwrap(), SignalKind::Chirp);
        assert!("sine".parse::<SignalKind>().is_err());
    }

    #[test]
    fn simulate_examples() {
        let (a, b) = canonical_pair::<f64>();
        let ta = tuning_from_observable(&a).unwrap();
        let reference = paper_state_amplitudes::<f64>();
        let noise = generate_signal(SignalKind::GaussianNoise, 512, 1).unwrap();
        let r = simulate(&ta, [reference[0], reference[1]], &noise).unwrap();
        let born = 0.391f64.powi(2) / (0.391f64.powi(2) + 0.920f64.powi(2));
        assert!((r.weighted_average - born).abs() < 1e-12);
        let r = simulate(&ta, amps(1.0, 0.0), &noise).unwrap();
        assert!((r.weighted_average - 1.0).abs() < 1e-12);
        let tc = tuning_from_observable(&b.sub(&a).unwrap()).unwrap();
        let r = simulate(&tc, amps(0.6, -0.8), &noise).unwrap();
        assert!(r.weighted_average >= -1e-12);
        assert_eq!(
            simulate(&ta, amps(0.0, 0.0), &noise),
            Err(OpticsError::ZeroAmplitudes)
        );
    }

    #[test]
    fn compare_examples() {
        let (a, b) = canonical_pair::<f64>();
        let reference = paper_state_amplitudes::<f64>();
        assert!(
            compare_with_quantum(&a, [reference[0], reference[1]])
                .unwrap()
                .deviation
                < 1e-12
        );
        let cmp = compare_with_quantum(&b, amps(1.0, 0.0)).unwrap();
        assert!(cmp.deviation < 1e-12);
        assert!((cmp.classical - 1.5).abs() < 1e-12);
        let s = b.spectral().unwrap();
        let v = &s.eigenvectors[1];
        let cmp = compare_with_quantum(&b, [v[0], v[1]]).unwrap();
        assert!(cmp.deviation < 1e-12);
        assert!((cmp.classical - s.eigenvalues[1]).abs() < 1e-12);
    }

    #[test]
    fn squared_tuning_reproduces_second_moments() {
        let (a, b) = canonical_pair::<f64>();
        let reference = paper_state_amplitudes::<f64>();
        let input = [reference[0], reference[1]];
        let rho = DensityMatrix::pure(&reference).unwrap();
        let signal = generate_signal(SignalKind::Chirp, 100, 0).unwrap();
        for x in [&a, &b] {
            let sq = tuning_from_observable(x).unwrap().squared();
            let r = simulate(&sq, input, &signal).unwrap();
            assert!((r.weighted_average - rho.expectation(&x.square()).unwrap()).abs() < 1e-12);
        }
    }
}
