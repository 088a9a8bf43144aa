//! Sequence-level classification of `⊗ P_{z_n}` against `⊗ P_{w_n}`.
//!
//! The product laws are equivalent iff `∑ chi(z_n, w_n) < ∞` and mutually
//! singular otherwise. Declared families are decided analytically from the
//! known behavior of their series. Arbitrary generators are only observed
//! up to a horizon, so they are reported as inconclusive with a suggested
//! direction, except when the caller declares `chi_n` monotone and
//! unbounded and the observed terms exceed a threshold: an unbounded
//! `chi_n` rules out equivalence.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{kakutani_from_chi, ChainTriple};
use crate::error::{require, Error, Result};
use crate::halfplane::{canonical_lambda, canonical_lambda_excess, chi, MoebiusMap, UHPoint};
use crate::numerics::{neumaier_sum, partial_sum_diagnostics, SeriesDiagnostics, Trend};

pub const DEFAULT_N_MAX: usize = 1 << 16;
pub const DEFAULT_REPORT_TERMS: usize = 1024;
pub const DEFAULT_UNBOUNDEDNESS_THRESHOLD: f64 = 1e6;
const MIN_N_MAX: usize = 16;
const CHAIN_SLACK: f64 = 1e-12;

/// How a family's `chi_n` is turned into a concrete pair `(z_n, w_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// `(√chi + i, i)`: pure location shift at unit scale.
    #[default]
    Location,
    /// `(i, λ i)` with `(λ - 1)² / λ = chi`: pure scale change.
    Scale,
}

impl Embedding {
    pub fn realize(self, t: f64) -> Result<(UHPoint, UHPoint)> {
        require(t.is_finite() && t >= 0.0, "chi", "finite and >= 0", t)?;
        match self {
            Embedding::Location => Ok((UHPoint::new(t.sqrt(), 1.0)?, UHPoint::I)),
            Embedding::Scale => Ok((UHPoint::I, UHPoint::on_axis(canonical_lambda(t)?)?)),
        }
    }
}

/// What happens after the listed terms of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDeclaration {
    /// `z_n = w_n` beyond the listed pairs.
    EqualAfterN,
    /// The sequence goes on; listed terms are only a prefix.
    FamilyContinues,
}

type PairFn = dyn Fn(usize) -> (UHPoint, UHPoint) + Send + Sync;

/// A caller-supplied sequence of pairs, indexed from `n = 1`.
#[derive(Clone)]
pub struct Generator {
    func: Arc<PairFn>,
    len: Option<usize>,
    monotone_unbounded: bool,
    sequential_only: bool,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("len", &self.len)
            .field("monotone_unbounded", &self.monotone_unbounded)
            .field("sequential_only", &self.sequential_only)
            .finish_non_exhaustive()
    }
}

impl Generator {
    pub fn new<F>(func: F) -> Self
    where
        F: Fn(usize) -> (UHPoint, UHPoint) + Send + Sync + 'static,
    {
        Generator {
            func: Arc::new(func),
            len: None,
            monotone_unbounded: false,
            sequential_only: false,
        }
    }

    /// An observed prefix of an otherwise unknown sequence.
    pub fn from_prefix(pairs: Vec<(UHPoint, UHPoint)>) -> Self {
        let len = pairs.len();
        let mut g = Generator::new(move |n| pairs[n - 1]);
        g.len = Some(len);
        g
    }

    /// Declares that `chi_n` is non-decreasing and unbounded.
    pub fn monotone_unbounded(mut self, yes: bool) -> Self {
        self.monotone_unbounded = yes;
        self
    }

    /// Forces sequential evaluation of the callback.
    pub fn sequential_only(mut self, yes: bool) -> Self {
        self.sequential_only = yes;
        self
    }

    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    pub fn is_monotone_unbounded(&self) -> bool {
        self.monotone_unbounded
    }

    pub fn pair(&self, n: usize) -> Option<(UHPoint, UHPoint)> {
        if n == 0 || self.len.is_some_and(|len| n > len) {
            return None;
        }
        Some((self.func)(n))
    }

    fn map<F>(&self, f: F) -> Generator
    where
        F: Fn((UHPoint, UHPoint)) -> (UHPoint, UHPoint) + Send + Sync + 'static,
    {
        let inner = Arc::clone(&self.func);
        Generator {
            func: Arc::new(move |n| f(inner(n))),
            ..self.clone()
        }
    }
}

/// Kind tag of a [`ParamSequencePair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    ExplicitFinite,
    PowerLaw,
    Geometric,
    Constant,
    GeneratorCallback,
}

/// The two parameter sequences `(z_n)` and `(w_n)`.
///
/// Parametric kinds describe `chi_n` directly:
/// `PowerLaw`: `c·n^(-p)`, `Geometric`: `c·r^(n-1)`, `Constant`: `c`.
#[derive(Debug, Clone)]
pub enum ParamSequencePair {
    ExplicitFinite { pairs: Vec<(UHPoint, UHPoint)> },
    PowerLaw { c: f64, p: f64 },
    Geometric { c: f64, r: f64 },
    Constant { c: f64 },
    GeneratorCallback(Generator),
}

impl ParamSequencePair {
    pub fn power_law(c: f64, p: f64) -> Result<Self> {
        let s = ParamSequencePair::PowerLaw { c, p };
        s.validate()?;
        Ok(s)
    }

    pub fn geometric(c: f64, r: f64) -> Result<Self> {
        let s = ParamSequencePair::Geometric { c, r };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(c: f64) -> Result<Self> {
        let s = ParamSequencePair::Constant { c };
        s.validate()?;
        Ok(s)
    }

    /// Listed pairs with an explicit statement of what follows them.
    pub fn from_pairs(pairs: Vec<(UHPoint, UHPoint)>, tail: TailDeclaration) -> Self {
        match tail {
            TailDeclaration::EqualAfterN => ParamSequencePair::ExplicitFinite { pairs },
            TailDeclaration::FamilyContinues => ParamSequencePair::GeneratorCallback(Generator::from_prefix(pairs)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let amplitude = |c: f64| require(c.is_finite() && c >= 0.0, "c", "finite and >= 0", c);
        match *self {
            ParamSequencePair::PowerLaw { c, p } => {
                amplitude(c)?;
                require(p.is_finite(), "p", "finite", p)
            }
            ParamSequencePair::Geometric { c, r } => {
                amplitude(c)?;
                require(r > 0.0 && r < 1.0, "r", "in (0, 1)", r)
            }
            ParamSequencePair::Constant { c } => amplitude(c),
            ParamSequencePair::ExplicitFinite { .. } | ParamSequencePair::GeneratorCallback(_) => Ok(()),
        }
    }

    pub fn kind(&self) -> SequenceKind {
        match self {
            ParamSequencePair::ExplicitFinite { .. } => SequenceKind::ExplicitFinite,
            ParamSequencePair::PowerLaw { .. } => SequenceKind::PowerLaw,
            ParamSequencePair::Geometric { .. } => SequenceKind::Geometric,
            ParamSequencePair::Constant { .. } => SequenceKind::Constant,
            ParamSequencePair::GeneratorCallback(_) => SequenceKind::GeneratorCallback,
        }
    }

    pub fn tail_declaration(&self) -> TailDeclaration {
        match self {
            ParamSequencePair::ExplicitFinite { .. } => TailDeclaration::EqualAfterN,
            _ => TailDeclaration::FamilyContinues,
        }
    }

    /// Number of terms available, `None` when unlimited.
    pub fn available_terms(&self) -> Option<usize> {
        match self {
            ParamSequencePair::GeneratorCallback(g) => g.len(),
            _ => None,
        }
    }

    /// `chi_n` for `n ≥ 1`.
    pub fn chi_term(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        let k = n as f64;
        match self {
            ParamSequencePair::ExplicitFinite { pairs } => Some(pairs.get(n - 1).map_or(0.0, |&(z, w)| chi(z, w))),
            ParamSequencePair::PowerLaw { c, p } => Some(if *c == 0.0 { 0.0 } else { c * k.powf(-p) }),
            ParamSequencePair::Geometric { c, r } => Some(c * r.powf(k - 1.0)),
            ParamSequencePair::Constant { c } => Some(*c),
            ParamSequencePair::GeneratorCallback(g) => g.pair(n).map(|(z, w)| chi(z, w)),
        }
    }

    /// The concrete pair `(z_n, w_n)`, realizing parametric kinds through
    /// `embedding`.
    pub fn pair(&self, n: usize, embedding: Embedding) -> Result<(UHPoint, UHPoint)> {
        let missing = || Error::TooFewTerms {
            available: self.available_terms().unwrap_or(0),
            required: n,
        };
        match self {
            ParamSequencePair::ExplicitFinite { pairs } if n >= 1 => {
                Ok(pairs.get(n - 1).copied().unwrap_or((UHPoint::I, UHPoint::I)))
            }
            ParamSequencePair::GeneratorCallback(g) => g.pair(n).ok_or_else(missing),
            _ => embedding.realize(self.chi_term(n).ok_or_else(missing)?),
        }
    }

    /// Pairs `n = 1..=horizon`.
    pub fn concrete_pairs(&self, horizon: usize, embedding: Embedding) -> Result<Vec<(UHPoint, UHPoint)>> {
        self.validate()?;
        if let Some(len) = self.available_terms() {
            if len < horizon {
                return Err(Error::TooFewTerms {
                    available: len,
                    required: horizon,
                });
            }
        }
        if self.is_parallel() {
            (1..=horizon).into_par_iter().map(|n| self.pair(n, embedding)).collect()
        } else {
            (1..=horizon).map(|n| self.pair(n, embedding)).collect()
        }
    }

    /// Applies one Möbius map to every pair. Parametric kinds depend only
    /// on `chi_n` and are returned unchanged.
    pub fn conjugate(&self, map: MoebiusMap) -> ParamSequencePair {
        match self {
            ParamSequencePair::ExplicitFinite { pairs } => ParamSequencePair::ExplicitFinite {
                pairs: pairs.iter().map(|&(z, w)| map.act_pair(z, w)).collect(),
            },
            ParamSequencePair::GeneratorCallback(g) => {
                ParamSequencePair::GeneratorCallback(g.map(move |(z, w)| map.act_pair(z, w)))
            }
            other => other.clone(),
        }
    }

    /// Exchanges the roles of `(z_n)` and `(w_n)`.
    pub fn swapped(&self) -> ParamSequencePair {
        match self {
            ParamSequencePair::ExplicitFinite { pairs } => ParamSequencePair::ExplicitFinite {
                pairs: pairs.iter().map(|&(z, w)| (w, z)).collect(),
            },
            ParamSequencePair::GeneratorCallback(g) => ParamSequencePair::GeneratorCallback(g.map(|(z, w)| (w, z))),
            other => other.clone(),
        }
    }

    fn is_parallel(&self) -> bool {
        match self {
            ParamSequencePair::GeneratorCallback(g) => !g.sequential_only,
            _ => true,
        }
    }
}

/// `chi_n` for `n = 1..=n_max`; explicit lists are zero-padded.
pub fn chi_sequence(seq: &ParamSequencePair, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::HorizonTooSmall { horizon: n_max, min: 1 });
    }
    seq.validate()?;
    if let Some(len) = seq.available_terms() {
        if len < n_max {
            return Err(Error::TooFewTerms {
                available: len,
                required: n_max,
            });
        }
    }
    let term = |n: usize| seq.chi_term(n).expect("term within available range");
    Ok(if seq.is_parallel() {
        (1..=n_max).into_par_iter().map(term).collect()
    } else {
        (1..=n_max).map(term).collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    Singular,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "equivalent",
            Verdict::Singular => "singular",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// What a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Known convergence behavior of a declared family.
    Analytic,
    /// Declared-unbounded `chi_n` exceeded the threshold.
    BoundednessViolation,
    /// Only finite-horizon numerics; never decisive.
    NumericHeuristic,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Analytic => "analytic",
            Basis::BoundednessViolation => "boundedness_violation",
            Basis::NumericHeuristic => "numeric_heuristic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// `chi_n` above this counts as evidence of unboundedness.
    pub unboundedness_threshold: f64,
    /// Per-term vectors in the report are cut to this length.
    pub report_terms: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            unboundedness_threshold: DEFAULT_UNBOUNDEDNESS_THRESHOLD,
            report_terms: DEFAULT_REPORT_TERMS,
        }
    }
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub verdict: Verdict,
    pub basis: Basis,
    /// Direction hinted by the numerics when the verdict is inconclusive.
    pub suggested: Option<Verdict>,
    pub kind: SequenceKind,
    pub tail: TailDeclaration,
    pub terms_evaluated: usize,
    pub chi_sum: f64,
    pub kakutani_sum: f64,
    pub sup_chi: f64,
    /// `sup chi_n` stayed below the unboundedness threshold. Equivalence
    /// forces `chi_n` to be bounded.
    pub chi_bounded: bool,
    pub partial_sums: Option<SeriesDiagnostics>,
    pub chain_violations: usize,
    pub chi_terms: Vec<f64>,
    pub chain_audit: Vec<ChainTriple>,
    pub lambda_terms: Vec<f64>,
    /// `λ_n - 1`, kept separately for accuracy when `chi_n` is tiny.
    pub lambda_excess: Vec<f64>,
}

impl DichotomyReport {
    pub fn is_decided(&self) -> bool {
        self.verdict != Verdict::Inconclusive
    }
}

pub fn classify(seq: &ParamSequencePair, n_max: usize) -> Result<DichotomyReport> {
    classify_with(seq, n_max, &ClassifyOptions::default())
}

pub fn classify_with(seq: &ParamSequencePair, n_max: usize, opts: &ClassifyOptions) -> Result<DichotomyReport> {
    if n_max < MIN_N_MAX {
        return Err(Error::HorizonTooSmall {
            horizon: n_max,
            min: MIN_N_MAX,
        });
    }
    seq.validate()?;
    let n_eval = seq.available_terms().map_or(n_max, |len| len.min(n_max));
    if n_eval == 0 {
        return Err(Error::InvalidSequence("generator provides no terms".into()));
    }
    let chis = chi_sequence(seq, n_eval)?;
    let chains: Vec<ChainTriple> = chis
        .par_iter()
        .map(|&t| ChainTriple::from_chi(t))
        .collect::<Result<_>>()?;

    let sup_chi = chis.iter().copied().fold(0.0, f64::max);
    let chi_bounded = sup_chi <= opts.unboundedness_threshold;
    let partial_sums = if n_eval >= MIN_N_MAX {
        Some(partial_sum_diagnostics(&chis, n_eval)?)
    } else {
        None
    };

    let (verdict, basis, suggested) = match *seq {
        ParamSequencePair::ExplicitFinite { .. } => (Verdict::Equivalent, Basis::Analytic, None),
        ParamSequencePair::PowerLaw { c, p } => {
            let v = if c == 0.0 || p > 1.0 {
                Verdict::Equivalent
            } else {
                Verdict::Singular
            };
            (v, Basis::Analytic, None)
        }
        ParamSequencePair::Geometric { .. } => (Verdict::Equivalent, Basis::Analytic, None),
        ParamSequencePair::Constant { c } => {
            let v = if c == 0.0 {
                Verdict::Equivalent
            } else {
                Verdict::Singular
            };
            (v, Basis::Analytic, None)
        }
        ParamSequencePair::GeneratorCallback(ref g) => {
            let last = chis[n_eval - 1];
            let rising = chis[(n_eval - 1) / 2] < last;
            if g.is_monotone_unbounded() && last > opts.unboundedness_threshold && rising {
                (Verdict::Singular, Basis::BoundednessViolation, None)
            } else {
                let hint = partial_sums.as_ref().and_then(|d| match d.trend {
                    Trend::Plateauing => Some(Verdict::Equivalent),
                    Trend::Growing => Some(Verdict::Singular),
                    Trend::Indeterminate => None,
                });
                (Verdict::Inconclusive, Basis::NumericHeuristic, hint)
            }
        }
    };

    let keep = opts.report_terms.min(n_eval);
    let lambda_excess: Vec<f64> = chis[..keep]
        .iter()
        .map(|&t| canonical_lambda_excess(t))
        .collect::<Result<_>>()?;
    Ok(DichotomyReport {
        verdict,
        basis,
        suggested,
        kind: seq.kind(),
        tail: seq.tail_declaration(),
        terms_evaluated: n_eval,
        chi_sum: neumaier_sum(chis.iter().copied()),
        kakutani_sum: neumaier_sum(chains.iter().map(|c| c.kakutani)),
        sup_chi,
        chi_bounded,
        partial_sums,
        chain_violations: chains.iter().filter(|c| !c.holds(CHAIN_SLACK)).count(),
        chi_terms: chis[..keep].to_vec(),
        chain_audit: chains[..keep].to_vec(),
        lambda_terms: lambda_excess.iter().map(|e| 1.0 + e).collect(),
        lambda_excess,
    })
}

/// Side-by-side convergence diagnostics of `∑ -ln I_n` and `∑ chi_n / 8`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KakutaniComparison {
    pub kakutani: SeriesDiagnostics,
    pub chi_eighth: SeriesDiagnostics,
    pub agree: bool,
}

/// Cross-checks the Kakutani series against the `chi` series on the same
/// sequence.
pub fn equivalent_iff_kakutani(seq: &ParamSequencePair, n_max: usize) -> Result<KakutaniComparison> {
    if n_max < MIN_N_MAX {
        return Err(Error::HorizonTooSmall {
            horizon: n_max,
            min: MIN_N_MAX,
        });
    }
    let chis = chi_sequence(seq, n_max)?;
    let kak: Vec<f64> = chis.par_iter().map(|&t| kakutani_from_chi(t)).collect::<Result<_>>()?;
    let eighth: Vec<f64> = chis.iter().map(|t| 0.125 * t).collect();
    let kakutani = partial_sum_diagnostics(&kak, n_max)?;
    let chi_eighth = partial_sum_diagnostics(&eighth, n_max)?;
    let agree = kakutani.trend == chi_eighth.trend;
    Ok(KakutaniComparison {
        kakutani,
        chi_eighth,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> UHPoint {
        UHPoint::new(x, y).unwrap()
    }

    #[test]
    fn chi_sequence_examples() {
        let eq = ParamSequencePair::from_pairs(vec![(p(1.0, 2.0), p(1.0, 2.0)); 3], TailDeclaration::EqualAfterN);
        assert!(chi_sequence(&eq, 8).unwrap().iter().all(|&t| t == 0.0));

        let pl = ParamSequencePair::power_law(1.0, 2.0).unwrap();
        let s = chi_sequence(&pl, 5).unwrap();
        for (n, t) in s.iter().enumerate() {
            assert_eq!(*t, ((n + 1) as f64).powi(-2));
        }

        let one = ParamSequencePair::from_pairs(vec![(p(0.0, 2.0), UHPoint::I)], TailDeclaration::EqualAfterN);
        assert_eq!(chi_sequence(&one, 4).unwrap(), vec![0.5, 0.0, 0.0, 0.0]);
        assert!(chi_sequence(&one, 0).is_err());
    }

    #[test]
    fn family_validation() {
        assert!(ParamSequencePair::power_law(-1.0, 2.0).is_err());
        assert!(ParamSequencePair::power_law(1.0, f64::NAN).is_err());
        assert!(ParamSequencePair::geometric(1.0, 1.0).is_err());
        assert!(ParamSequencePair::geometric(1.0, 0.0).is_err());
        assert!(ParamSequencePair::constant(f64::INFINITY).is_err());
        let bad = ParamSequencePair::Geometric { c: 1.0, r: 2.0 };
        assert!(classify(&bad, 64).is_err());
    }

    #[test]
    fn truth_table() {
        let cases = [
            (ParamSequencePair::power_law(1.0, 2.0).unwrap(), Verdict::Equivalent),
            (ParamSequencePair::power_law(1.0, 1.0).unwrap(), Verdict::Singular),
            (ParamSequencePair::power_law(0.0, 0.5).unwrap(), Verdict::Equivalent),
            (ParamSequencePair::constant(1.0).unwrap(), Verdict::Singular),
            (ParamSequencePair::constant(0.0).unwrap(), Verdict::Equivalent),
            (ParamSequencePair::geometric(3.0, 0.9).unwrap(), Verdict::Equivalent),
            (
                ParamSequencePair::from_pairs(vec![(p(100.0, 1e-3), p(-4.0, 9.0)); 50], TailDeclaration::EqualAfterN),
                Verdict::Equivalent,
            ),
        ];
        for (seq, expected) in cases {
            let r = classify(&seq, 256).unwrap();
            assert_eq!(r.verdict, expected, "{seq:?}");
            assert_eq!(r.basis, Basis::Analytic);
            assert_eq!(r.chain_violations, 0);
        }
    }

    #[test]
    fn small_horizon_rejected() {
        let seq = ParamSequencePair::constant(1.0).unwrap();
        assert!(classify(&seq, 15).is_err());
        assert!(equivalent_iff_kakutani(&seq, 8).is_err());
    }

    #[test]
    fn generator_is_inconclusive() {
        let g = Generator::new(|n| (p(1.0 / n as f64, 1.0), UHPoint::I));
        let r = classify(&ParamSequencePair::GeneratorCallback(g), 4096).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.basis, Basis::NumericHeuristic);
        assert_eq!(r.suggested, Some(Verdict::Equivalent));
        assert!(r.partial_sums.is_some());
    }

    #[test]
    fn boundedness_violation_needs_declaration() {
        let grow = |n: usize| (p(n as f64, 1.0), UHPoint::I);
        let undeclared = ParamSequencePair::GeneratorCallback(Generator::new(grow));
        let r = classify(&undeclared, 4096).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.suggested, Some(Verdict::Singular));
        assert!(!r.chi_bounded);

        let declared = ParamSequencePair::GeneratorCallback(Generator::new(grow).monotone_unbounded(true));
        let r = classify(&declared, 4096).unwrap();
        assert_eq!(r.verdict, Verdict::Singular);
        assert_eq!(r.basis, Basis::BoundednessViolation);

        // Declared but below threshold at this horizon.
        let r = classify(&declared, 256).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn observed_prefix_uses_available_terms() {
        let pairs: Vec<_> = (1..=20).map(|n| (p(1.0 / n as f64, 1.0), UHPoint::I)).collect();
        let seq = ParamSequencePair::from_pairs(pairs, TailDeclaration::FamilyContinues);
        assert_eq!(seq.kind(), SequenceKind::GeneratorCallback);
        let r = classify(&seq, 1024).unwrap();
        assert_eq!(r.terms_evaluated, 20);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(seq.concrete_pairs(21, Embedding::Location).is_err());
        assert_eq!(seq.concrete_pairs(20, Embedding::Location).unwrap().len(), 20);
    }

    #[test]
    fn report_is_truncated() {
        let seq = ParamSequencePair::power_law(1.0, 1.0).unwrap();
        let r = classify(&seq, 5000).unwrap();
        assert_eq!(r.chi_terms.len(), DEFAULT_REPORT_TERMS);
        assert_eq!(r.chain_audit.len(), DEFAULT_REPORT_TERMS);
        assert_eq!(r.lambda_terms.len(), DEFAULT_REPORT_TERMS);
        assert_eq!(r.terms_evaluated, 5000);
        let harmonic: f64 = (1..=5000).map(|n| 1.0 / n as f64).sum();
        assert!((r.chi_sum - harmonic).abs() < 1e-10);
    }

    #[test]
    fn embeddings_realize_chi() {
        for t in [0.0, 1e-6, 0.5, 1.0, 37.0, 1e5] {
            for e in [Embedding::Location, Embedding::Scale] {
                let (z, w) = e.realize(t).unwrap();
                assert!((chi(z, w) - t).abs() <= 1e-9 * (1.0 + t), "{e:?} {t}");
            }
        }
        assert!(Embedding::Location.realize(-1.0).is_err());
    }

    #[test]
    fn kakutani_comparison() {
        for (seq, trend) in [
            (ParamSequencePair::power_law(1.0, 2.0).unwrap(), Trend::Plateauing),
            (ParamSequencePair::constant(1.0).unwrap(), Trend::Growing),
            (ParamSequencePair::constant(0.0).unwrap(), Trend::Plateauing),
        ] {
            let cmp = equivalent_iff_kakutani(&seq, DEFAULT_N_MAX).unwrap();
            assert!(cmp.agree);
            assert_eq!(cmp.kakutani.trend, trend);
        }
        let zero = equivalent_iff_kakutani(&ParamSequencePair::constant(0.0).unwrap(), 64).unwrap();
        assert_eq!(zero.kakutani.total(), 0.0);
        assert_eq!(zero.chi_eighth.total(), 0.0);
        // Constant chi: linear growth with slope -ln J(1) > 0.
        let c = equivalent_iff_kakutani(&ParamSequencePair::constant(1.0).unwrap(), 64).unwrap();
        let slope = kakutani_from_chi(1.0).unwrap();
        assert!(slope > 0.0);
        assert!((c.kakutani.total() - 64.0 * slope).abs() < 1e-12);
    }
}
