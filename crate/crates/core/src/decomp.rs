//! Zariski decompositions: with support in a negative definite cycle (for
//! effective and for arbitrary divisors), with support in an arbitrary cycle
//! for pseudo-effective divisors, and the full nef/negative decomposition.
//!
//! Every variant reduces to [`least_nonneg_solution`]: the negative part
//! `N = sum x_j G_j` has as coefficients the least `x >= 0` with
//! `mu_G x <= (D . G_j)_j`.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactalg::{
    int, lp_optimize, solve_linear, sylvester_negative_definite, vec_leq, AlgebraError, Direction,
    LinearProgram, LpStatus, RatVector, Rational, Relation,
};
use crate::surface::{certify_negdef, is_effective, pair, submatrix, Cycle, QDivisor};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    EffectiveSupport,
    GeneralSupport,
    PseffAnyCycle,
    Fujita,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::EffectiveSupport => "effective_support",
            Variant::GeneralSupport => "general_support",
            Variant::PseffAnyCycle => "pseff_any_cycle",
            Variant::Fujita => "fujita",
        })
    }
}

/// `D = P + N` together with the sequence of cycles the iterated variants
/// passed through. The trace is empty for single-pass variants and for
/// inputs that needed no correction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub variant: Variant,
    pub nef_part: QDivisor,
    pub negative_part: QDivisor,
    pub support_trace: Vec<Cycle>,
    /// Pseudo-effectivity evidence for `P` (iterated variants only).
    pub nef_certificate: Option<PseffCertificate>,
}

impl Decomposition {
    /// The decomposed divisor, `P + N`.
    pub fn divisor(&self) -> QDivisor {
        self.nef_part
            .try_add(&self.negative_part)
            .expect("parts share a configuration")
    }

    /// Assembles a decomposition from stored parts, e.g. a result file.
    pub fn from_parts(
        variant: Variant,
        nef_part: QDivisor,
        negative_part: QDivisor,
        support_trace: Vec<Cycle>,
    ) -> Self {
        Self {
            variant,
            nef_part,
            negative_part,
            support_trace,
            nef_certificate: None,
        }
    }

    fn trivial(variant: Variant, d: &QDivisor, cert: Option<PseffCertificate>) -> Self {
        Self {
            nef_certificate: cert,
            ..Self::from_parts(variant, d.clone(), QDivisor::zero(d.config()), Vec::new())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// `D` is numerically equivalent to a nonnegative combination of curves.
    EffectiveCombination,
    /// The caller vouches for pseudo-effectivity.
    Asserted,
    /// Inherited from the previous step of an iteration.
    Propagated,
}

/// Evidence that a divisor is pseudo-effective in the closed-world model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseffCertificate {
    pub kind: CertificateKind,
    /// Nonnegative curve coefficients `a` with `mu a = mu d`
    /// (present for `EffectiveCombination` only).
    pub witness: Option<RatVector>,
    pub provenance: String,
}

impl PseffCertificate {
    pub fn asserted(note: impl Into<String>) -> Self {
        Self {
            kind: CertificateKind::Asserted,
            witness: None,
            provenance: note.into(),
        }
    }

    fn propagated(step: usize) -> Self {
        Self {
            kind: CertificateKind::Propagated,
            witness: None,
            provenance: format!("nef part after step {step}"),
        }
    }

    pub fn effective_combination(witness: RatVector) -> Self {
        Self {
            kind: CertificateKind::EffectiveCombination,
            witness: Some(witness),
            provenance: "nonnegative combination of configuration curves".into(),
        }
    }

    /// Checks an effective-combination witness against `d`; other kinds are
    /// accepted as given.
    pub fn validate(&self, d: &QDivisor) -> Result<()> {
        if self.kind != CertificateKind::EffectiveCombination {
            return Ok(());
        }
        let Some(w) = &self.witness else {
            return Err(Error::NotPseudoEffective(
                "effective-combination certificate without a witness".into(),
            ));
        };
        if w.len() != d.coeffs().len() {
            return Err(Error::NotPseudoEffective(
                "witness length does not match the configuration".into(),
            ));
        }
        if let Some(i) = w.iter().position(|a| a.is_negative()) {
            return Err(Error::NotPseudoEffective(format!(
                "witness coefficient of {} is negative",
                d.config().name(i)
            )));
        }
        let wd = QDivisor::new(d.config().clone(), w.clone())?;
        if wd.intersections() != d.intersections() {
            return Err(Error::NotPseudoEffective(
                "witness is not numerically equivalent to the divisor".into(),
            ));
        }
        Ok(())
    }
}

/// `D . G_i >= 0` for every member of `G`.
pub fn is_g_nef(d: &QDivisor, g: &Cycle) -> Result<bool> {
    Ok(g.pairings(d)?.iter().all(|x| !x.is_negative()))
}

/// Nef against every curve of the configuration.
pub fn is_nef_closed_world(d: &QDivisor) -> bool {
    d.intersections().iter().all(|x| !x.is_negative())
}

/// Finds `a >= 0` with `sum a_i C_i` numerically equivalent to `D`.
pub fn is_pseff_closed_world(d: &QDivisor) -> Result<PseffCertificate> {
    if is_effective(d) {
        return Ok(PseffCertificate::effective_combination(d.coeffs().to_vec()));
    }
    let config = d.config();
    let n = config.len();
    let target = d.intersections();
    let mut lp = LinearProgram::new(Direction::Minimize, vec![int(1); n]).all_nonneg();
    for (i, t) in target.into_iter().enumerate() {
        lp = lp.constrain(config.mu().row(i).to_vec(), Relation::Eq, t);
    }
    let sol = lp_optimize(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(PseffCertificate::effective_combination(sol.point)),
        _ => Err(Error::NotPseudoEffective(format!(
            "no nonnegative combination of curves is numerically equivalent to {d}"
        ))),
    }
}

/// Least `x >= 0` with `mu_G x <= b`, by growing the candidate support:
/// start from the members where `b` is negative, solve `mu_S x_S = b_S`,
/// and add every member whose constraint the solution violates.
///
/// `-mu_G` is a Stieltjes matrix, so each restricted inverse is entrywise
/// nonnegative and the iterates increase monotonically from zero.
pub fn least_nonneg_solution(g: &Cycle, b: &[Rational]) -> Result<RatVector> {
    let g = certify_negdef(g)?;
    let m = g.len();
    if b.len() != m {
        return Err(AlgebraError::DimensionMismatch {
            expected: m,
            found: b.len(),
        }
        .into());
    }
    let mu = submatrix(&g);
    let mut support: Vec<usize> = (0..m).filter(|&j| b[j].is_negative()).collect();
    let mut x = vec![Rational::zero(); m];
    while !support.is_empty() {
        let rhs: RatVector = support.iter().map(|&j| b[j].clone()).collect();
        let xs = solve_linear(&mu.principal(&support), &rhs)?;
        let mut next = vec![Rational::zero(); m];
        for (&j, v) in support.iter().zip(xs) {
            next[j] = v;
        }
        if next.iter().any(|v| v.is_negative()) || !vec_leq(&x, &next) {
            return Err(Error::InvariantViolation(format!(
                "support-growing iterate is not nonnegative and nondecreasing on support {support:?}"
            )));
        }
        x = next;
        let r = mu.mul_vec(&x)?;
        let violated: Vec<usize> = (0..m).filter(|&j| r[j] > b[j]).collect();
        if violated.is_empty() {
            break;
        }
        if violated.iter().any(|j| support.contains(j)) {
            return Err(Error::InvariantViolation(
                "solved constraint reported as violated".into(),
            ));
        }
        support.extend(violated);
        support.sort_unstable();
    }
    Ok(x)
}

/// The split `D = P + N` with `N` supported on the certified cycle `g`.
fn split_on(d: &QDivisor, g: &Cycle) -> Result<(QDivisor, QDivisor)> {
    let b = g.pairings(d)?;
    let x = least_nonneg_solution(g, &b)?;
    let n = g.divisor(&x)?;
    let p = d.try_sub(&n)?;
    Ok((p, n))
}

fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvariantViolation(what()))
    }
}

/// Clauses (b)-(d) of a decomposition of `d` with support in `g`, plus
/// negative definiteness of `N`'s support. Together with (b)-(d) the latter
/// forces `P` to be the largest `G`-nef subdivisor.
fn check_support_clauses(d: &QDivisor, g: &Cycle, p: &QDivisor, n: &QDivisor) -> Result<()> {
    invariant(&p.try_add(n)? == d, || format!("P + N != D for D = {d}"))?;
    invariant(is_effective(n), || format!("N = {n} is not effective"))?;
    let supp = n.support();
    invariant(supp.iter().all(|&i| g.contains(i)), || {
        format!("N = {n} is not supported on the cycle")
    })?;
    invariant(is_g_nef(p, g)?, || format!("P = {p} is not G-nef"))?;
    invariant(pair(p, n)?.is_zero(), || {
        format!("P = {p} and N = {n} are not orthogonal")
    })?;
    invariant(supp.iter().all(|&i| p.dot_curve(i).is_zero()), || {
        format!("P = {p} is not numerically trivial on the support of N")
    })?;
    let test = sylvester_negative_definite(&p.config().mu().principal(&supp))?;
    invariant(test.passed(), || {
        format!("support of N = {n} is not negative definite")
    })
}

/// Decomposition of an effective `D` with support in a negative definite
/// cycle: `P` is the largest effective `G`-nef subdivisor of `D`.
pub fn decompose_effective_support(d: &QDivisor, g: &Cycle) -> Result<Decomposition> {
    if let Some(i) = d.coeffs().iter().position(|c| c.is_negative()) {
        return Err(Error::NotEffective {
            curve: d.config().name(i).to_string(),
            coeff: d.coeff(i).clone(),
        });
    }
    let g = certify_negdef(g)?;
    let (p, n) = split_on(d, &g)?;
    invariant(is_effective(&p), || {
        format!("P = {p} of effective D = {d} is not effective")
    })?;
    check_support_clauses(d, &g, &p, &n)?;
    Ok(Decomposition::from_parts(
        Variant::EffectiveSupport,
        p,
        n,
        Vec::new(),
    ))
}

/// Decomposition of an arbitrary ℚ-divisor with support in a negative
/// definite cycle. `P` need not be effective.
pub fn decompose_support(d: &QDivisor, g: &Cycle) -> Result<Decomposition> {
    let g = certify_negdef(g)?;
    let (p, n) = split_on(d, &g)?;
    check_support_clauses(d, &g, &p, &n)?;
    Ok(Decomposition::from_parts(
        Variant::GeneralSupport,
        p,
        n,
        Vec::new(),
    ))
}

/// Decomposition of a pseudo-effective `D` with support in any reduced
/// cycle, by repeatedly decomposing the current nef part with support in the
/// members of `G` it is still negative on.
///
/// Without a certificate one is searched for with
/// [`is_pseff_closed_world`] unless `D` is already `G`-nef.
pub fn decompose_pseff_any_cycle(
    d: &QDivisor,
    cert: Option<&PseffCertificate>,
    g: &Cycle,
) -> Result<Decomposition> {
    iterate(d, cert, g, Variant::PseffAnyCycle)
}

/// Nef/negative decomposition of a pseudo-effective `D` over the whole
/// configuration.
pub fn decompose_fujita(d: &QDivisor, cert: Option<&PseffCertificate>) -> Result<Decomposition> {
    iterate(d, cert, &Cycle::full(d.config()), Variant::Fujita)
}

fn iterate(
    d: &QDivisor,
    cert: Option<&PseffCertificate>,
    g: &Cycle,
    variant: Variant,
) -> Result<Decomposition> {
    if d.config() != g.config() {
        return Err(Error::ConfigMismatch);
    }
    let mut cert = match cert {
        Some(c) => {
            c.validate(d)?;
            Some(c.clone())
        }
        None if !is_g_nef(d, g)? => Some(is_pseff_closed_world(d)?),
        None => None,
    };
    if g.is_empty() || d.is_zero() {
        return Ok(Decomposition::trivial(variant, d, cert));
    }

    let fujita = variant == Variant::Fujita;
    let mut p = d.clone();
    let mut n_total = QDivisor::zero(d.config());
    let mut members: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    for step in 1..=g.len() {
        let negative: Vec<usize> = g
            .members()
            .iter()
            .copied()
            .filter(|&i| p.dot_curve(i).is_negative())
            .collect();
        if negative.is_empty() {
            break;
        }
        invariant(negative.iter().all(|i| !members.contains(i)), || {
            format!(
                "nef part of step {} is negative on a curve it was decomposed against",
                step - 1
            )
        })?;
        members.extend(&negative);
        let cycle = Cycle::new(g.config(), members.clone())?;
        let cycle = certify_negdef(&cycle).map_err(|e| match e {
            Error::NotNegativeDefinite { order, minor } => {
                Error::InternalNegdefViolation { step, order, minor }
            }
            other => other,
        })?;
        let (p_next, n_step) = split_on(&p, &cycle)?;
        if fujita {
            invariant(negative.iter().all(|&i| !n_step.coeff(i).is_zero()), || {
                format!("a curve negative on the nef part is missing from N at step {step}")
            })?;
            for &i in cycle.members() {
                invariant(n_step.dot_curve(i) == p.dot_curve(i), || {
                    format!("N_G . G_i != D . G_i at step {step}")
                })?;
            }
        }
        n_total = n_total.try_add(&n_step)?;
        p = p_next;
        trace.push(cycle);
        cert = Some(PseffCertificate::propagated(step));
    }
    invariant(is_g_nef(&p, g)?, || {
        format!("iteration did not terminate with a G-nef part for D = {d}")
    })?;

    let last = trace.last().cloned().unwrap_or_else(|| g.clone());
    let last = if last.is_certified() {
        last
    } else {
        Cycle::new(g.config(), vec![])?
    };
    check_support_clauses(d, &last, &p, &n_total)?;
    if fujita {
        for &i in last.members() {
            invariant(n_total.dot_curve(i) == d.dot_curve(i), || {
                format!("N . G_i != D . G_i for {}", d.config().name(i))
            })?;
        }
    }
    Ok(Decomposition {
        nef_certificate: cert,
        ..Decomposition::from_parts(variant, p, n_total, trace)
    })
}
