//! Product hidden-variable models.
//!
//! The measurement outcomes themselves play the role of hidden variables:
//! each observable gets an alphabet of eigenvalues with Born probabilities,
//! and the joint distribution is the product of those marginals. The model
//! reproduces every single-observable moment, including `⟨A²⟩ > ⟨B²⟩` for
//! criterion-violating triples, while individual valuations break the
//! additivity rule `v(B − A) = v(B) − v(A)`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criterion::CriterionError;
use crate::opalg::{
    inner, refined_born, same_dim, DensityMatrix, HermitianOperator, OpError, CLUSTER_GAP,
};
use crate::rng::{run_indexed, substream};
use crate::scalar::{Scalar, C};

/// Draws per sampling partition. Partition `p` always uses stream `p` of the
/// seed, so the merged report does not depend on the number of workers.
pub const PARTITION_SIZE: usize = 8192;

pub const PROBABILITY_TOL: f64 = 1e-12;

/// `|v(C) − (v(B) − v(A))|` below this counts as the additivity rule holding.
pub const SUM_RULE_TOL: f64 = 1e-9;

pub const COMMUTING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tag {
    A,
    B,
    C,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tag::A => "A",
            Tag::B => "B",
            Tag::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HvError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error("model has no observable tagged {0}")]
    UnknownTag(Tag),
    #[error("moment power {0} is not 1 or 2")]
    UnsupportedPower(u32),
    #[error("operation needs a three-observable (A, B, C) model")]
    NotTriple,
    #[error("observables do not commute (commutator norm {0:e})")]
    NotCommuting(f64),
    #[error("sample size must be at least 1")]
    ZeroSamples,
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Eigenvalues of one observable with their Born probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OutcomeAlphabet<T: Scalar> {
    pub label: Tag,
    pub values: Vec<T>,
    pub probabilities: Vec<T>,
}

impl<T: Scalar> OutcomeAlphabet<T> {
    /// Outcomes are eigenvalue clusters; degenerate eigenvalues merge into one
    /// outcome whose probability is the weight of the summed projector.
    pub fn born(
        label: Tag,
        x: &HermitianOperator<T>,
        rho: &DensityMatrix<T>,
    ) -> Result<Self, HvError> {
        same_dim(x.dim(), rho.dim())?;
        let spectral = x.spectral()?;
        let gap = T::of(CLUSTER_GAP) * T::one().max(x.max_abs());
        let mut values = Vec::new();
        let mut probabilities = Vec::new();
        let (refined, weights) = refined_born(x.matrix(), &spectral, rho.matrix(), gap);
        for cluster in spectral.clusters(gap) {
            let p: T = cluster.indices.iter().map(|&k| weights[k]).sum();
            let size = T::from_usize(cluster.indices.len()).unwrap();
            values.push(cluster.indices.iter().map(|&k| refined[k]).sum::<T>() / size);
            probabilities.push(p.max(T::zero()));
        }
        Ok(Self {
            label,
            values,
            probabilities,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn moment(&self, power: u32) -> T {
        self.values
            .iter()
            .zip(&self.probabilities)
            .map(|(v, p)| *p * v.powi(power as i32))
            .sum()
    }
}

/// Joint probability table over the product of outcome alphabets, stored
/// flat in lexicographic index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", try_from = "RawModel<T>")]
pub struct HiddenVariableModel<T: Scalar> {
    alphabets: Vec<OutcomeAlphabet<T>>,
    joint: Vec<T>,
    factorized: bool,
    /// The state the probabilities were computed for.
    state: Option<DensityMatrix<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct RawModel<T: Scalar> {
    alphabets: Vec<OutcomeAlphabet<T>>,
    joint: Vec<T>,
    factorized: bool,
    state: Option<DensityMatrix<T>>,
}

impl<T: Scalar> TryFrom<RawModel<T>> for HiddenVariableModel<T> {
    type Error = HvError;

    fn try_from(raw: RawModel<T>) -> Result<Self, HvError> {
        Self::from_parts(raw.alphabets, raw.joint, raw.factorized, raw.state)
    }
}

impl<T: Scalar> HiddenVariableModel<T> {
    /// Product model over the given alphabets.
    pub fn product(alphabets: Vec<OutcomeAlphabet<T>>, state: Option<DensityMatrix<T>>) -> Self {
        let mut joint = vec![T::one()];
        for alphabet in &alphabets {
            joint = joint
                .iter()
                .flat_map(|&head| alphabet.probabilities.iter().map(move |&p| head * p))
                .collect();
        }
        Self {
            alphabets,
            joint,
            factorized: true,
            state,
        }
    }

    /// Validates a model read from outside: 2 or 3 distinct tags, a
    /// nonnegative normalized table whose marginals match the alphabets, and
    /// an exact product when `factorized` is set.
    pub fn from_parts(
        alphabets: Vec<OutcomeAlphabet<T>>,
        joint: Vec<T>,
        factorized: bool,
        state: Option<DensityMatrix<T>>,
    ) -> Result<Self, HvError> {
        let bad = |msg: String| Err(HvError::InvalidModel(msg));
        if !(2..=3).contains(&alphabets.len()) {
            return bad(format!(
                "expected 2 or 3 alphabets, got {}",
                alphabets.len()
            ));
        }
        let tol = T::tol(PROBABILITY_TOL);
        for (i, alphabet) in alphabets.iter().enumerate() {
            if alphabets[..i]
                .iter()
                .any(|other| other.label == alphabet.label)
            {
                return bad(format!("duplicate tag {}", alphabet.label));
            }
            if alphabet.is_empty() || alphabet.values.len() != alphabet.probabilities.len() {
                return bad(format!("alphabet {} is empty or ragged", alphabet.label));
            }
            if alphabet
                .probabilities
                .iter()
                .any(|p| !p.is_finite() || *p < T::zero())
            {
                return bad(format!(
                    "alphabet {} has a negative probability",
                    alphabet.label
                ));
            }
            let total: T = alphabet.probabilities.iter().copied().sum();
            if (total - T::one()).abs() > tol {
                return bad(format!("alphabet {} sums to {total}", alphabet.label));
            }
        }
        let size: usize = alphabets.iter().map(OutcomeAlphabet::len).product();
        if joint.len() != size {
            return bad(format!(
                "joint table has {} entries, expected {size}",
                joint.len()
            ));
        }
        if joint.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return bad("joint table has a negative entry".into());
        }
        let total: T = joint.iter().copied().sum();
        if (total - T::one()).abs() > tol {
            return bad(format!("joint table sums to {total}"));
        }
        let model = Self {
            alphabets,
            joint,
            factorized,
            state,
        };
        for (axis, alphabet) in model.alphabets.iter().enumerate() {
            let marginal = model.marginal_axis(axis);
            for (m, p) in marginal.iter().zip(&alphabet.probabilities) {
                if (*m - *p).abs() > tol {
                    return bad(format!(
                        "marginal of {} disagrees with its alphabet",
                        alphabet.label
                    ));
                }
            }
        }
        if factorized {
            let product = Self::product(model.alphabets.clone(), None);
            let exact = T::tol(1e-14);
            if product
                .joint
                .iter()
                .zip(&model.joint)
                .any(|(x, y)| (*x - *y).abs() > exact)
            {
                return bad("table marked factorized is not a product".into());
            }
        }
        Ok(model)
    }

    pub fn alphabets(&self) -> &[OutcomeAlphabet<T>] {
        &self.alphabets
    }

    pub fn joint(&self) -> &[T] {
        &self.joint
    }

    pub fn factorized(&self) -> bool {
        self.factorized
    }

    pub fn state(&self) -> Option<&DensityMatrix<T>> {
        self.state.as_ref()
    }

    pub fn tags(&self) -> Vec<Tag> {
        self.alphabets.iter().map(|a| a.label).collect()
    }

    pub fn alphabet(&self, tag: Tag) -> Result<&OutcomeAlphabet<T>, HvError> {
        self.alphabets
            .iter()
            .find(|a| a.label == tag)
            .ok_or(HvError::UnknownTag(tag))
    }

    fn axis_of(&self, tag: Tag) -> Result<usize, HvError> {
        self.alphabets
            .iter()
            .position(|a| a.label == tag)
            .ok_or(HvError::UnknownTag(tag))
    }

    /// Per-axis outcome indices of a flat joint index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.alphabets.len()];
        for (axis, alphabet) in self.alphabets.iter().enumerate().rev() {
            idx[axis] = flat % alphabet.len();
            flat /= alphabet.len();
        }
        idx
    }

    fn marginal_axis(&self, axis: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.alphabets[axis].len()];
        for (flat, &p) in self.joint.iter().enumerate() {
            let i = self.unflatten(flat)[axis];
            out[i] = out[i] + p;
        }
        out
    }

    /// Marginal distribution of one observable, summed from the joint table.
    pub fn marginal(&self, tag: Tag) -> Result<Vec<T>, HvError> {
        Ok(self.marginal_axis(self.axis_of(tag)?))
    }

    /// The valuation assigned by one joint outcome.
    pub fn valuation(&self, flat: usize) -> DispersionFreeValuation<T> {
        let idx = self.unflatten(flat);
        DispersionFreeValuation {
            assignments: self
                .alphabets
                .iter()
                .zip(idx)
                .map(|(alphabet, i)| (alphabet.label, alphabet.values[i]))
                .collect(),
        }
    }
}

/// `P_HV(Aᵢ, Bⱼ) = P(Aᵢ|ρ) P(Bⱼ|ρ)`.
pub fn build_pair_model<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    rho: &DensityMatrix<T>,
) -> Result<HiddenVariableModel<T>, HvError> {
    same_dim(a.dim(), b.dim())?;
    let alphabets = vec![
        OutcomeAlphabet::born(Tag::A, a, rho)?,
        OutcomeAlphabet::born(Tag::B, b, rho)?,
    ];
    Ok(HiddenVariableModel::product(alphabets, Some(rho.clone())))
}

/// `P_HV(Aᵢ, Bⱼ, C_k) = P(Aᵢ|ρ) P(Bⱼ|ρ) P(C_k|ρ)` with `C = B − A ≥ 0`.
pub fn build_triple_model<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    rho: &DensityMatrix<T>,
) -> Result<HiddenVariableModel<T>, HvError> {
    same_dim(a.dim(), b.dim())?;
    let c = b.sub(a)?;
    let check = c.is_psd()?;
    if !check.flag {
        return Err(CriterionError::InvalidTriple {
            failed: vec!["B-A".into()],
            min_eigs: [f64::NAN, f64::NAN, check.min_eigenvalue.as_f64()],
        }
        .into());
    }
    let alphabets = vec![
        OutcomeAlphabet::born(Tag::A, a, rho)?,
        OutcomeAlphabet::born(Tag::B, b, rho)?,
        OutcomeAlphabet::born(Tag::C, &c, rho)?,
    ];
    Ok(HiddenVariableModel::product(alphabets, Some(rho.clone())))
}

/// `Σ P · valueᵖ` over the marginal of `tag`, computed from the joint table.
pub fn model_moment<T: Scalar>(
    model: &HiddenVariableModel<T>,
    tag: Tag,
    power: u32,
) -> Result<T, HvError> {
    if !(1..=2).contains(&power) {
        return Err(HvError::UnsupportedPower(power));
    }
    let alphabet = model.alphabet(tag)?;
    let marginal = model.marginal(tag)?;
    Ok(alphabet
        .values
        .iter()
        .zip(&marginal)
        .map(|(v, p)| *p * v.powi(power as i32))
        .sum())
}

/// One individual run: a definite value for each observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DispersionFreeValuation<T: Scalar> {
    pub assignments: BTreeMap<Tag, T>,
}

impl<T: Scalar> DispersionFreeValuation<T> {
    pub fn get(&self, tag: Tag) -> Option<T> {
        self.assignments.get(&tag).copied()
    }

    /// `|v(C) − (v(B) − v(A))|`, when all three are assigned.
    pub fn sum_rule_residue(&self) -> Option<T> {
        Some((self.get(Tag::C)? - (self.get(Tag::B)? - self.get(Tag::A)?)).abs())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EmpiricalMoment<T: Scalar> {
    pub tag: Tag,
    pub power: u32,
    pub empirical: T,
    pub exact: T,
    /// Standard error `√(Var(Xᵖ)/n)` under the exact model.
    pub sigma: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EmpiricalReport<T: Scalar> {
    pub n: usize,
    pub seed: u64,
    /// Counts per joint outcome, lexicographic order.
    pub counts: Vec<u64>,
    pub moments: Vec<EmpiricalMoment<T>>,
    /// Joint outcome index of every draw, in draw order.
    #[serde(skip)]
    pub draws: Vec<u32>,
}

/// One row of the joint-outcome table of an [`EmpiricalReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow<T> {
    pub indices: Vec<usize>,
    pub values: Vec<T>,
    pub count: u64,
}

impl<T: Scalar> EmpiricalReport<T> {
    pub fn rows(&self, model: &HiddenVariableModel<T>) -> Vec<OutcomeRow<T>> {
        self.counts
            .iter()
            .enumerate()
            .map(|(flat, &count)| {
                let indices = model.unflatten(flat);
                let values = model
                    .alphabets()
                    .iter()
                    .zip(&indices)
                    .map(|(a, &i)| a.values[i])
                    .collect();
                OutcomeRow {
                    indices,
                    values,
                    count,
                }
            })
            .collect()
    }

    /// The stream of valuations, one per draw.
    pub fn valuations<'a>(
        &'a self,
        model: &'a HiddenVariableModel<T>,
    ) -> impl Iterator<Item = DispersionFreeValuation<T>> + 'a {
        self.draws
            .iter()
            .map(move |&flat| model.valuation(flat as usize))
    }
}

fn draw_partition(cdf: &[f64], seed: u64, partition: usize, len: usize) -> Vec<u32> {
    let mut rng = substream(seed, partition as u64);
    let total = *cdf.last().expect("nonempty table");
    (0..len)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u32
        })
        .collect()
}

/// `n` i.i.d. draws by inverse CDF over the lexicographic outcome order.
pub fn sample<T: Scalar>(
    model: &HiddenVariableModel<T>,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<EmpiricalReport<T>, HvError> {
    if n == 0 {
        return Err(HvError::ZeroSamples);
    }
    let cdf: Vec<f64> = model
        .joint()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p.as_f64();
            Some(*acc)
        })
        .collect();
    let partitions = n.div_ceil(PARTITION_SIZE);
    let chunks = run_indexed(partitions, workers, |p| {
        let len = PARTITION_SIZE.min(n - p * PARTITION_SIZE);
        draw_partition(&cdf, seed, p, len)
    });
    let draws: Vec<u32> = chunks.into_iter().flatten().collect();

    let mut counts = vec![0u64; model.joint().len()];
    for &d in &draws {
        counts[d as usize] += 1;
    }

    let n_t = T::from_usize(n).unwrap();
    let mut moments = Vec::new();
    for (axis, alphabet) in model.alphabets().iter().enumerate() {
        let mut marginal_counts = vec![0u64; alphabet.len()];
        for (flat, &c) in counts.iter().enumerate() {
            marginal_counts[model.unflatten(flat)[axis]] += c;
        }
        for power in 1..=2u32 {
            let empirical = alphabet
                .values
                .iter()
                .zip(&marginal_counts)
                .map(|(v, &c)| v.powi(power as i32) * T::from_u64(c).unwrap())
                .sum::<T>()
                / n_t;
            let exact = model_moment(model, alphabet.label, power)?;
            let second = model_moment_any(model, axis, 2 * power);
            let variance = (second - exact * exact).max(T::zero());
            moments.push(EmpiricalMoment {
                tag: alphabet.label,
                power,
                empirical,
                exact,
                sigma: (variance / n_t).sqrt(),
            });
        }
    }
    Ok(EmpiricalReport {
        n,
        seed,
        counts,
        moments,
        draws,
    })
}

fn model_moment_any<T: Scalar>(model: &HiddenVariableModel<T>, axis: usize, power: u32) -> T {
    let marginal = model.marginal_axis(axis);
    model.alphabets()[axis]
        .values
        .iter()
        .zip(&marginal)
        .map(|(v, p)| *p * v.powi(power as i32))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ValuationAudit<T: Scalar> {
    pub samples: usize,
    /// Fraction of runs with `v(B) − v(A) < 0`.
    pub frac_negative_diff: T,
    /// Smallest `v(C)` seen over all runs.
    pub min_vc: T,
    /// Fraction of runs with `|v(C) − (v(B) − v(A))| < 1e-9`.
    pub frac_sum_rule_holds: T,
}

/// Samples a triple model and checks, run by run, which valuation rules hold.
pub fn audit_valuations<T: Scalar>(
    model: &HiddenVariableModel<T>,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<ValuationAudit<T>, HvError> {
    if model.tags() != [Tag::A, Tag::B, Tag::C] {
        return Err(HvError::NotTriple);
    }
    let report = sample(model, n, seed, workers)?;
    let mut negative = 0u64;
    let mut holds = 0u64;
    let mut min_vc = T::infinity();
    let tol = T::tol(SUM_RULE_TOL);
    for (flat, &count) in report.counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let v = model.valuation(flat);
        let (va, vb, vc) = (
            v.get(Tag::A).unwrap(),
            v.get(Tag::B).unwrap(),
            v.get(Tag::C).unwrap(),
        );
        if vb - va < T::zero() {
            negative += count;
        }
        if (vc - (vb - va)).abs() < tol {
            holds += count;
        }
        min_vc = min_vc.min(vc);
    }
    let n_t = T::from_usize(n).unwrap();
    Ok(ValuationAudit {
        samples: n,
        frac_negative_diff: T::from_u64(negative).unwrap() / n_t,
        min_vc,
        frac_sum_rule_holds: T::from_u64(holds).unwrap() / n_t,
    })
}

/// Valuations given by the vectors of a simultaneous eigenbasis of commuting
/// `A` and `B`. Each satisfies `v(B − A) = v(B) − v(A)`.
pub fn joint_eigenbasis_valuation<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<Vec<DispersionFreeValuation<T>>, HvError> {
    let comm = a.commutator_norm(b)?;
    if comm >= T::tol(COMMUTING_TOL) {
        return Err(HvError::NotCommuting(comm.as_f64()));
    }
    let c = b.sub(a)?;
    let spectral = a.spectral()?;
    let gap = T::of(CLUSTER_GAP) * T::one().max(a.max_abs());
    let mut basis: Vec<Vec<C<T>>> = Vec::with_capacity(a.dim());
    for cluster in spectral.clusters(gap) {
        let vs: Vec<&Vec<C<T>>> = cluster
            .indices
            .iter()
            .map(|&k| &spectral.eigenvectors[k])
            .collect();
        if vs.len() == 1 {
            basis.push(vs[0].clone());
            continue;
        }
        // Diagonalize B restricted to the degenerate eigenspace of A.
        let block: Vec<Vec<C<T>>> = vs
            .iter()
            .map(|vi| {
                vs.iter()
                    .map(|vj| inner(vi, &b.matrix().matvec(vj)))
                    .collect()
            })
            .collect();
        let restricted = HermitianOperator::from_trusted(crate::opalg::CMatrix::from_flat(
            vs.len(),
            block.into_iter().flatten().collect(),
        ));
        for w in restricted.spectral()?.eigenvectors {
            let mut v = vec![C::new(T::zero(), T::zero()); a.dim()];
            for (coef, basis_vec) in w.iter().zip(&vs) {
                for (x, y) in v.iter_mut().zip(basis_vec.iter()) {
                    *x = *x + *y * *coef;
                }
            }
            basis.push(v);
        }
    }
    Ok(basis
        .iter()
        .map(|v| {
            let rayleigh = |x: &HermitianOperator<T>| x.matrix().quadratic_form(v).re;
            DispersionFreeValuation {
                assignments: [
                    (Tag::A, rayleigh(a)),
                    (Tag::B, rayleigh(b)),
                    (Tag::C, rayleigh(&c)),
                ]
                .into_iter()
                .collect(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{
        canonical_pair, commuting_valid_pair, optimal_violation_state, paper_state_amplitudes,
    };

    fn reference_state() -> DensityMatrix<f64> {
        DensityMatrix::pure(&paper_state_amplitudes()).unwrap()
    }

    #[test]
    fn pair_model_on_reference_state() {
        let (a, b) = canonical_pair::<f64>();
        let model = build_pair_model(&a, &b, &reference_state()).unwrap();
        let alpha = model.alphabet(Tag::A).unwrap();
        assert_eq!(alpha.values, vec![0.0, 1.0]);
        let norm_sq = 0.391f64.powi(2) + 0.920f64.powi(2);
        assert!((alpha.probabilities[1] - 0.391f64.powi(2) / norm_sq).abs() < 1e-14);
        assert!((alpha.probabilities[1] - 0.15299).abs() < 1e-5);
        assert!((alpha.probabilities[0] - 0.84701).abs() < 1e-5);
        assert!(model.factorized());
        assert_eq!(model.joint().len(), 4);
    }

    #[test]
    fn identical_observables_stay_uncorrelated() {
        let (a, _) = canonical_pair::<f64>();
        let rho = DensityMatrix::maximally_mixed(2);
        let model = build_pair_model(&a, &a, &rho).unwrap();
        assert_eq!(model.alphabets()[0].values, model.alphabets()[1].values);
        assert_eq!(model.joint(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn triple_model_on_optimal_state() {
        let (a, b) = canonical_pair::<f64>();
        let opt = optimal_violation_state(&a, &b).unwrap();
        let model = build_triple_model(&a, &b, &opt.rho).unwrap();
        let c = model.alphabet(Tag::C).unwrap();
        assert!(c.values[0].abs() < 1e-15 && (c.values[1] - 1.0).abs() < 1e-15);
        for tag in [Tag::A, Tag::B, Tag::C] {
            let marginal = model.marginal(tag).unwrap();
            let born = &model.alphabet(tag).unwrap().probabilities;
            for (m, p) in marginal.iter().zip(born) {
                assert!((m - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triple_model_rejects_invalid_difference() {
        let i = HermitianOperator::<f64>::identity(2);
        let err = build_triple_model(&i, &i.scale(0.5), &DensityMatrix::maximally_mixed(2));
        assert!(matches!(
            err,
            Err(HvError::Criterion(CriterionError::InvalidTriple { .. }))
        ));
    }

    #[test]
    fn zero_difference_triple() {
        let (_, b) = canonical_pair::<f64>();
        let model = build_triple_model(&b, &b, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(model.alphabet(Tag::C).unwrap().values.len(), 1);
        let audit = audit_valuations(&model, 2000, 3, 1).unwrap();
        let report = sample(&model, 2000, 3, 1).unwrap();
        let equal: u64 = report
            .counts
            .iter()
            .enumerate()
            .filter(|(flat, _)| {
                let v = model.valuation(*flat);
                v.get(Tag::A) == v.get(Tag::B)
            })
            .map(|(_, c)| *c)
            .sum();
        assert_eq!(audit.frac_sum_rule_holds, equal as f64 / 2000.0);
        assert_eq!(audit.min_vc, 0.0);
    }

    #[test]
    fn moments_match_born_rule() {
        let (a, b) = canonical_pair::<f64>();
        let rho = reference_state();
        let model = build_pair_model(&a, &b, &rho).unwrap();
        let m = model_moment(&model, Tag::A, 1).unwrap();
        assert!((m - rho.expectation(&a).unwrap()).abs() < 1e-12);
        assert_eq!(model_moment(&model, Tag::A, 2).unwrap(), m);
        let m2 = model_moment(&model, Tag::B, 2).unwrap();
        assert!((m2 - rho.expectation(&b.square()).unwrap()).abs() < 1e-12);
        assert_eq!(
            model_moment(&model, Tag::C, 1),
            Err(HvError::UnknownTag(Tag::C))
        );
        assert_eq!(
            model_moment(&model, Tag::A, 3),
            Err(HvError::UnsupportedPower(3))
        );
    }

    #[test]
    fn sampling_is_deterministic_and_worker_independent() {
        let (a, b) = canonical_pair::<f64>();
        let model = build_pair_model(&a, &b, &reference_state()).unwrap();
        let one = sample(&model, 20_000, 5, 1).unwrap();
        let three = sample(&model, 20_000, 5, 3).unwrap();
        assert_eq!(one, three);
        assert_eq!(one.draws, three.draws);
        assert_eq!(one.counts.iter().sum::<u64>(), 20_000);
        assert_eq!(sample(&model, 0, 5, 1), Err(HvError::ZeroSamples));
    }

    #[test]
    fn single_draw_from_deterministic_model() {
        let a = HermitianOperator::<f64>::diagonal(&[1.0, 2.0]);
        let b = HermitianOperator::<f64>::diagonal(&[2.0, 3.0]);
        let rho = DensityMatrix::pure(&[C::new(0.0, 0.0), C::new(1.0, 0.0)]).unwrap();
        let model = build_pair_model(&a, &b, &rho).unwrap();
        let report = sample(&model, 1, 99, 1).unwrap();
        assert_eq!(report.counts, vec![0, 0, 0, 1]);
        let v: Vec<_> = report.valuations(&model).collect();
        assert_eq!(v[0].get(Tag::A), Some(2.0));
        assert_eq!(v[0].get(Tag::B), Some(3.0));
    }

    #[test]
    fn audit_requires_triple() {
        let (a, b) = canonical_pair::<f64>();
        let model = build_pair_model(&a, &b, &reference_state()).unwrap();
        assert_eq!(audit_valuations(&model, 10, 1, 1), Err(HvError::NotTriple));
    }

    #[test]
    fn commuting_shared_basis_audit_keeps_c_nonnegative() {
        let (a, b) = commuting_valid_pair::<f64>(3, 4).unwrap();
        let model = build_triple_model(&a, &b, &DensityMatrix::maximally_mixed(3)).unwrap();
        let audit = audit_valuations(&model, 10_000, 8, 2).unwrap();
        assert!(audit.min_vc >= -1e-12);
    }

    #[test]
    fn eigenbasis_valuations() {
        let a = HermitianOperator::<f64>::diagonal(&[1.0, 2.0]);
        let b = HermitianOperator::<f64>::diagonal(&[2.0, 3.0]);
        let vals = joint_eigenbasis_valuation(&a, &b).unwrap();
        let triples: Vec<_> = vals
            .iter()
            .map(|v| {
                (
                    v.get(Tag::A).unwrap(),
                    v.get(Tag::B).unwrap(),
                    v.get(Tag::C).unwrap(),
                )
            })
            .collect();
        assert_eq!(triples, vec![(1.0, 2.0, 1.0), (2.0, 3.0, 1.0)]);
        assert!(vals.iter().all(|v| v.sum_rule_residue() == Some(0.0)));

        let (ca, cb) = commuting_valid_pair::<f64>(3, 17).unwrap();
        for v in joint_eigenbasis_valuation(&ca, &cb).unwrap() {
            assert!(v.sum_rule_residue().unwrap() < 1e-9);
        }

        let (sa, sb) = canonical_pair::<f64>();
        assert!(matches!(
            joint_eigenbasis_valuation(&sa, &sb),
            Err(HvError::NotCommuting(_))
        ));
    }

    #[test]
    fn degenerate_commuting_pair_uses_restricted_basis() {
        // A has a doubly degenerate eigenvalue; B splits it.
        let a = HermitianOperator::<f64>::diagonal(&[1.0, 1.0, 0.0]);
        let b = HermitianOperator::<f64>::from_real(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let vals = joint_eigenbasis_valuation(&a, &b).unwrap();
        let mut bs: Vec<f64> = vals.iter().map(|v| v.get(Tag::B).unwrap()).collect();
        bs.sort_by(f64::total_cmp);
        assert!(
            (bs[0] - 1.0).abs() < 1e-12
                && (bs[1] - 1.0).abs() < 1e-12
                && (bs[2] - 3.0).abs() < 1e-12
        );
        assert!(vals.iter().all(|v| v.sum_rule_residue().unwrap() < 1e-12));
    }

    #[test]
    fn model_json_validation() {
        let (a, b) = canonical_pair::<f64>();
        let model = build_pair_model(&a, &b, &reference_state()).unwrap();
        let json = serde_json::to_string(&model).unwrap();
        let back: HiddenVariableModel<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.alphabets(), model.alphabets());
        assert_eq!(back.joint(), model.joint());
        let (x, y) = (
            back.state().unwrap().matrix(),
            model.state().unwrap().matrix(),
        );
        assert!(x.zip_with(y, |p, q| p - q).max_abs() < 1e-15);

        let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
        value["joint"][0] = serde_json::json!(0.9);
        assert!(serde_json::from_value::<HiddenVariableModel<f64>>(value).is_err());
    }
}
