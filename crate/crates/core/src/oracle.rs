//! Independent verifiers and instance generators.
//!
//! Nothing here calls into [`crate::decomp`] beyond its data types: the
//! checks are re-derived from the pairing and from exact linear programs so
//! that agreement with the solvers means something.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::{Decomposition, Variant};
use crate::exactalg::{
    all_principal_minors_nonneg, all_principal_minors_positive, format_rational, int,
    is_negative_definite, lp_optimize, rat, sylvester_negative_definite, Bound, Direction,
    LinearProgram, LpStatus, RatMatrix, RatVector, Rational, Relation,
};
use crate::surface::{
    certify_negdef, max_divisor, submatrix, ConfigRef, CurveConfiguration, Cycle, QDivisor,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Counterexample on failure; exhibited solution or note otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub variant: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(variant: impl Into<String>) -> Self {
        Self {
            variant: variant.into(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, passed: bool, witness: Option<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            witness,
        });
    }

    /// Records `Ok(())` as a pass and `Err(w)` as a failure with witness `w`.
    fn record(&mut self, name: &str, outcome: std::result::Result<(), String>) {
        match outcome {
            Ok(()) => self.push(name, true, None),
            Err(w) => self.push(name, false, Some(w)),
        }
    }
}

fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// LP over curve coefficients `x` with `0 <= x <= d` and `x . G_j >= 0`.
fn nef_subdivisor_lp(d: &QDivisor, g: &Cycle, objective: RatVector) -> LinearProgram {
    let config = d.config();
    let bounds = d
        .coeffs()
        .iter()
        .map(|c| Bound::between(Rational::zero(), c.clone()))
        .collect();
    let mut lp = LinearProgram::new(Direction::Maximize, objective).with_bounds(bounds);
    for &j in g.members() {
        lp = lp.constrain(config.mu().row(j).to_vec(), Relation::Ge, Rational::zero());
    }
    lp
}

fn unit(n: usize, i: usize) -> RatVector {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

/// The largest `G`-nef subdivisor `0 <= P <= D`, found by sweeping the
/// hyperplanes `sum x_i = t` (maximize the coefficient sum), then refining
/// coordinate by coordinate and taking the coefficientwise maximum.
pub fn bauer_max_subdivisor(d: &QDivisor, g: &Cycle) -> Result<QDivisor> {
    if let Some(i) = d.coeffs().iter().position(|c| c.is_negative()) {
        return Err(Error::NotEffective {
            curve: d.config().name(i).to_string(),
            coeff: d.coeff(i).clone(),
        });
    }
    let g = certify_negdef(g)?;
    let n = d.config().len();
    let optimum = |objective: RatVector| -> Result<QDivisor> {
        let sol = lp_optimize(&nef_subdivisor_lp(d, &g, objective))?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::InvariantViolation(format!(
                "nef-subdivisor LP for {d} is {:?}",
                sol.status
            )));
        }
        QDivisor::new(d.config().clone(), sol.point)
    };
    let mut best = optimum(vec![Rational::one(); n])?;
    for i in 0..n {
        if d.coeff(i).is_zero() {
            continue;
        }
        best = max_divisor(&best, &optimum(unit(n, i))?)?;
    }
    Ok(best)
}

/// Least element of `{x >= 0 : mu_G x <= b}` as the minimizer of `sum x`.
pub fn least_element_bruteforce(g: &Cycle, b: &[Rational]) -> Result<RatVector> {
    let g = certify_negdef(g)?;
    let mu = submatrix(&g);
    let mut lp =
        LinearProgram::new(Direction::Minimize, vec![Rational::one(); g.len()]).all_nonneg();
    for (row, bj) in mu.rows().zip(b) {
        lp = lp.constrain(row.to_vec(), Relation::Le, bj.clone());
    }
    let sol = lp_optimize(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::InvariantViolation(format!(
            "least-element LP is {:?}",
            sol.status
        )));
    }
    Ok(sol.point)
}

/// Re-checks every clause of a decomposition of `d` from scratch.
///
/// `g` is the prescribed cycle for the support variants and ignored for
/// [`Variant::Fujita`].
pub fn verify_decomposition(
    d: &QDivisor,
    g: Option<&Cycle>,
    dec: &Decomposition,
) -> VerificationReport {
    let mut report = VerificationReport::new(dec.variant.to_string());
    let p = &dec.nef_part;
    let n = &dec.negative_part;
    let config = d.config();
    if p.config() != config || n.config() != config {
        report.push(
            "same_configuration",
            false,
            Some("parts live on another configuration".into()),
        );
        return report;
    }
    let name = |i: usize| config.name(i).to_string();
    let cycle = match (dec.variant, g) {
        (Variant::Fujita, _) => Cycle::full(config),
        (_, Some(g)) => g.clone(),
        (_, None) => {
            report.push(
                "cycle_present",
                false,
                Some("variant requires a cycle".into()),
            );
            return report;
        }
    };

    report.record(
        "reconstruction",
        match (0..config.len()).find(|&i| p.coeff(i) + n.coeff(i) != *d.coeff(i)) {
            None => Ok(()),
            Some(i) => Err(format!(
                "coefficient of {}: P + N = {} but D = {}",
                name(i),
                format_rational(&(p.coeff(i) + n.coeff(i))),
                format_rational(d.coeff(i))
            )),
        },
    );
    let negative_coeff = |x: &QDivisor| x.coeffs().iter().position(|c| c.is_negative());
    report.record(
        "negative_part_effective",
        match negative_coeff(n) {
            None => Ok(()),
            Some(i) => Err(format!("N has coefficient {} on {}", n.coeff(i), name(i))),
        },
    );
    if dec.variant == Variant::EffectiveSupport {
        report.record(
            "nef_part_effective",
            match negative_coeff(p) {
                None => Ok(()),
                Some(i) => Err(format!("P has coefficient {} on {}", p.coeff(i), name(i))),
            },
        );
    }

    let supp = n.support();
    let last = dec.support_trace.last();
    report.record(
        "support_containment",
        match supp
            .iter()
            .find(|&&i| !cycle.contains(i) || last.is_some_and(|c| !c.contains(i)))
        {
            None => Ok(()),
            Some(&i) => Err(format!("N has component {} outside the cycle", name(i))),
        },
    );
    if !dec.support_trace.is_empty() {
        let chain =
            dec.support_trace.windows(2).all(|w| {
                w[0].len() < w[1].len() && w[0].members().iter().all(|&i| w[1].contains(i))
            }) && !dec.support_trace[0].is_empty()
                && last.is_some_and(|c| c.members().iter().all(|&i| cycle.contains(i)));
        report.record(
            "trace_monotone",
            if chain {
                Ok(())
            } else {
                Err(format!(
                    "trace {:?} is not a strictly increasing chain inside the cycle",
                    dec.support_trace
                ))
            },
        );
    }

    let nef_label = if dec.variant == Variant::Fujita {
        "nef"
    } else {
        "g_nef"
    };
    report.record(
        nef_label,
        match cycle
            .members()
            .iter()
            .map(|&i| (i, p.dot_curve(i)))
            .find(|(_, v)| v.is_negative())
        {
            None => Ok(()),
            Some((i, v)) => Err(format!("P . {} = {}", name(i), format_rational(&v))),
        },
    );

    let pn: Rational = crate::exactalg::dot(p.coeffs(), &n.intersections());
    report.record(
        "orthogonality",
        if pn.is_zero() {
            Ok(())
        } else {
            Err(format!("P . N = {}", format_rational(&pn)))
        },
    );
    report.record(
        "trivial_on_support",
        match supp
            .iter()
            .map(|&i| (i, p.dot_curve(i)))
            .find(|(_, v)| !v.is_zero())
        {
            None => Ok(()),
            Some((i, v)) => Err(format!("P . {} = {}", name(i), format_rational(&v))),
        },
    );
    let (d2, p2, n2) = (
        d.self_intersection(),
        p.self_intersection(),
        n.self_intersection(),
    );
    report.record(
        "square_splitting",
        if d2 == &p2 + &n2 {
            Ok(())
        } else {
            Err(format!(
                "D^2 = {} but P^2 + N^2 = {} + {}",
                format_rational(&d2),
                format_rational(&p2),
                format_rational(&n2)
            ))
        },
    );
    report.record("negative_definite_support", {
        let m = config.mu().principal(&supp);
        match sylvester_negative_definite(&m) {
            Ok(t) if t.passed() => Ok(()),
            Ok(t) => {
                let k = t.first_failure.unwrap_or(0);
                Err(format!(
                    "leading minor of order {k} of N's support matrix is {}",
                    format_rational(&t.minors[k - 1])
                ))
            }
            Err(e) => Err(e.to_string()),
        }
    });

    if dec.variant == Variant::EffectiveSupport {
        report.record("maximality", check_maximality(d, &cycle, p));
    } else {
        let frame = last.cloned().unwrap_or_else(|| cycle.clone());
        report.record(
            "least_element",
            check_least_element(d, &frame, n, last.is_none()),
        );
    }
    report
}

/// Per-coordinate LPs: `max x_i` over the `G`-nef subdivisors of `D` must
/// equal `P_i`.
fn check_maximality(d: &QDivisor, g: &Cycle, p: &QDivisor) -> std::result::Result<(), String> {
    if d.coeffs().iter().any(|c| c.is_negative()) {
        return Err("D is not effective".into());
    }
    let n = d.config().len();
    for i in 0..n {
        let sol = lp_optimize(&nef_subdivisor_lp(d, g, unit(n, i))).map_err(|e| e.to_string())?;
        if sol.status != LpStatus::Optimal {
            return Err(format!(
                "coordinate LP for {} is {:?}",
                d.config().name(i),
                sol.status
            ));
        }
        if sol.value != *p.coeff(i) {
            return Err(format!(
                "G-nef subdivisor E = {} has E_{} = {} but P_{} = {}",
                fmt_vec(&sol.point),
                d.config().name(i),
                format_rational(&sol.value),
                d.config().name(i),
                format_rational(p.coeff(i))
            ));
        }
    }
    Ok(())
}

/// `N`'s coefficients on `frame` must be feasible for `mu x <= (D . G_j)`
/// and coordinatewise minimal among all feasible points.
fn check_least_element(
    d: &QDivisor,
    frame: &Cycle,
    n: &QDivisor,
    untouched: bool,
) -> std::result::Result<(), String> {
    if frame.is_empty()
        || (untouched
            && frame
                .members()
                .iter()
                .all(|&i| !d.dot_curve(i).is_negative()))
    {
        return match n.is_zero() {
            true => Ok(()),
            false => Err(format!("D is nef on the cycle but N = {n}")),
        };
    }
    let mu = submatrix(frame);
    match is_negative_definite(&mu) {
        Ok(true) => {}
        _ => {
            return Err(format!(
                "cycle {:?} is not negative definite",
                frame.member_names()
            ))
        }
    }
    let b: RatVector = frame.members().iter().map(|&i| d.dot_curve(i)).collect();
    let x: RatVector = frame
        .members()
        .iter()
        .map(|&i| n.coeff(i).clone())
        .collect();
    let mx = mu.mul_vec(&x).map_err(|e| e.to_string())?;
    if let Some(j) = (0..x.len()).find(|&j| mx[j] > b[j] || x[j].is_negative()) {
        return Err(format!(
            "N is infeasible at {}: (mu x)_j = {}, bound {}",
            frame.member_names()[j],
            format_rational(&mx[j]),
            format_rational(&b[j])
        ));
    }
    for j in 0..x.len() {
        let mut lp = LinearProgram::new(Direction::Minimize, unit(x.len(), j)).all_nonneg();
        for (row, bj) in mu.rows().zip(&b) {
            lp = lp.constrain(row.to_vec(), Relation::Le, bj.clone());
        }
        let sol = lp_optimize(&lp).map_err(|e| e.to_string())?;
        if sol.status != LpStatus::Optimal || sol.value != x[j] {
            return Err(format!(
                "feasible point {} has coordinate {} below N's {}",
                fmt_vec(&sol.point),
                frame.member_names()[j],
                format_rational(&x[j])
            ));
        }
    }
    Ok(())
}

/// Probes the principal-minor feasibility facts for `{x >= 0, Mx >= 0}`.
///
/// Every check is an implication and passes vacuously when its hypothesis
/// fails. `nontrivial_solution` fails when all principal minors are
/// nonnegative but only `x = 0` solves the system.
pub fn karamardian_check(m: &RatMatrix) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("karamardian");
    let nonneg = all_principal_minors_nonneg(m)?;
    let n = m.dim();
    if !nonneg {
        report.push(
            "nontrivial_solution",
            true,
            Some("hypothesis not met: some principal minor is negative".into()),
        );
        return Ok(report);
    }

    // max sum x over {x >= 0, Mx >= 0, sum x <= 1}
    let mut lp = LinearProgram::new(Direction::Maximize, vec![Rational::one(); n]).all_nonneg();
    for row in m.rows() {
        lp = lp.constrain(row.to_vec(), Relation::Ge, Rational::zero());
    }
    lp = lp.constrain(vec![Rational::one(); n], Relation::Le, Rational::one());
    let sol = lp_optimize(&lp)?;
    let found = sol.is_optimal() && sol.value.is_positive();
    report.push(
        "nontrivial_solution",
        found || n == 0,
        Some(if found {
            format!("x = {}", fmt_vec(&sol.point))
        } else {
            "only x = 0 satisfies x >= 0, Mx >= 0".into()
        }),
    );

    if !all_principal_minors_positive(m)? {
        return Ok(report);
    }
    // Mx > 0 is solvable iff Mx >= 1 is, by scaling.
    let strict = |lower: Rational| -> Result<Option<RatVector>> {
        let mut lp = LinearProgram::new(Direction::Minimize, vec![Rational::zero(); n])
            .with_bounds(vec![
                Bound {
                    lower: Some(lower),
                    upper: None
                };
                n
            ]);
        for row in m.rows() {
            lp = lp.constrain(row.to_vec(), Relation::Ge, Rational::one());
        }
        let sol = lp_optimize(&lp)?;
        Ok(sol.is_optimal().then_some(sol.point))
    };
    let semi = strict(Rational::zero())?;
    let full = strict(Rational::one())?;
    report.push(
        "strict_solution",
        semi.is_some() || n == 0,
        Some(match &semi {
            Some(x) => format!("x = {}", fmt_vec(x)),
            None => "no x >= 0 with Mx > 0".into(),
        }),
    );
    report.push(
        "strict_positive_equivalence",
        semi.is_some() == full.is_some(),
        Some(match &full {
            Some(x) => format!("x > 0: {}", fmt_vec(x)),
            None => "no x > 0 with Mx > 0".into(),
        }),
    );
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    /// A rejection-sampled negative definite block inside random curves.
    Random,
    /// The `A_n` chain: self-intersection -2, consecutive curves meet once.
    AChain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub seed: u64,
    pub n_curves: usize,
    pub coeff_bound: Rational,
    /// Share of the curves placed in the negative definite block.
    pub negdef_fraction: Rational,
    pub template: Template,
}

impl InstanceSpec {
    pub fn new(seed: u64, n_curves: usize, template: Template) -> Self {
        Self {
            seed,
            n_curves,
            coeff_bound: int(10),
            negdef_fraction: rat(1, 2),
            template,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub config: ConfigRef,
    pub divisor: QDivisor,
    /// A certified negative definite cycle.
    pub cycle: Cycle,
}

pub const MAX_REJECTIONS: usize = 1000;

/// Deterministic in `spec.seed`.
pub fn generate_instance(spec: &InstanceSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_curves;
    let names: Vec<String> = (1..=n).map(|i| format!("C{i}")).collect();
    let (mu, block) = match spec.template {
        Template::AChain => (a_chain(n), n),
        Template::Random => random_matrix(&mut rng, n, &spec.negdef_fraction)?,
    };
    let config = CurveConfiguration::new(names, mu)?;

    let bound = spec.coeff_bound.abs();
    let coeffs = (0..n)
        .map(|_| {
            if rng.gen_ratio(1, 4) {
                return Rational::zero();
            }
            let den: i64 = rng.gen_range(1..=4);
            let top = (&bound * int(den))
                .floor()
                .to_integer()
                .to_i64()
                .unwrap_or(0);
            rat(rng.gen_range(0..=top.max(0)), den)
        })
        .collect();
    let divisor = QDivisor::new(config.clone(), coeffs)?;

    // A nonempty sub-cycle of the block; principal submatrices of a negative
    // definite matrix stay negative definite.
    let members: Vec<usize> = if block == 0 {
        Vec::new()
    } else {
        let picked: Vec<usize> = (0..block).filter(|_| rng.gen_ratio(3, 4)).collect();
        if picked.is_empty() {
            vec![rng.gen_range(0..block)]
        } else {
            picked
        }
    };
    let cycle = certify_negdef(&Cycle::new(&config, members)?)?;
    Ok(Instance {
        config,
        divisor,
        cycle,
    })
}

pub fn a_chain(n: usize) -> RatMatrix {
    let mut m = RatMatrix::zero(n);
    for i in 0..n {
        m.set(i, i, int(-2));
        if i + 1 < n {
            m.set(i, i + 1, int(1));
            m.set(i + 1, i, int(1));
        }
    }
    m
}

/// Curves `0..k` form a negative definite block; the rest is unconstrained
/// apart from nonnegative off-diagonal entries.
fn random_matrix(
    rng: &mut ChaCha8Rng,
    n: usize,
    fraction: &Rational,
) -> Result<(RatMatrix, usize)> {
    if n == 0 {
        return Ok((RatMatrix::zero(0), 0));
    }
    let k = (fraction * int(n as i64))
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(1)
        .clamp(1, n);
    let mut block = None;
    for _ in 0..MAX_REJECTIONS {
        let mut b = RatMatrix::zero(k);
        for i in 0..k {
            b.set(i, i, int(rng.gen_range(-4..=-1)));
            for j in i + 1..k {
                let v = int(if rng.gen_ratio(1, 3) { 1 } else { 0 });
                b.set(i, j, v.clone());
                b.set(j, i, v);
            }
        }
        if is_negative_definite(&b)? {
            block = Some(b);
            break;
        }
    }
    let block = block.ok_or(Error::GenerationExhausted(MAX_REJECTIONS))?;
    let mut m = RatMatrix::zero(n);
    for i in 0..n {
        for j in i..n {
            let v = if i < k && j < k {
                block.get(i, j).clone()
            } else if i == j {
                int(rng.gen_range(-3..=2))
            } else {
                int(*[0, 0, 0, 1, 1, 2].get(rng.gen_range(0..6)).unwrap_or(&0))
            };
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    Ok((m, k))
}
