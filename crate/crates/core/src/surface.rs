//! The closed-world surface: a finite list of integral curves, their
//! intersection matrix, and ℚ-divisors and cycles built on top of it.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::exactalg::{
    dot, format_rational, sylvester_negative_definite, AlgebraError, RatMatrix, RatVector, Rational,
};
use crate::{Error, Result};

/// Named integral curves and their pairwise intersection numbers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CurveConfiguration {
    names: Vec<String>,
    mu: RatMatrix,
}

pub type ConfigRef = Arc<CurveConfiguration>;

impl CurveConfiguration {
    /// Validates symmetry, nonnegative off-diagonal entries and unique,
    /// nonempty names.
    pub fn new(names: Vec<String>, mu: RatMatrix) -> Result<ConfigRef> {
        if mu.dim() != names.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: names.len(),
                found: mu.dim(),
            }
            .into());
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidConfiguration(format!(
                    "curve {i} has an empty name"
                )));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidConfiguration(format!(
                    "duplicate curve name {name:?}"
                )));
            }
        }
        if let Some((i, j)) = mu.asymmetry() {
            return Err(Error::InvalidConfiguration(format!(
                "intersection matrix is not symmetric: {}.{} != {}.{}",
                names[i], names[j], names[j], names[i]
            )));
        }
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                if mu.get(i, j).is_negative() {
                    return Err(Error::InvalidConfiguration(format!(
                        "distinct curves {} and {} meet negatively ({})",
                        names[i],
                        names[j],
                        mu.get(i, j)
                    )));
                }
            }
        }
        Ok(Arc::new(Self { names, mu }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn resolve(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn mu(&self) -> &RatMatrix {
        &self.mu
    }

    pub fn intersection(&self, i: usize, j: usize) -> &Rational {
        self.mu.get(i, j)
    }
}

impl fmt::Debug for CurveConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveConfiguration")
            .field("names", &self.names)
            .field("mu", &self.mu)
            .finish()
    }
}

fn same_config(a: &ConfigRef, b: &ConfigRef) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ConfigMismatch)
    }
}

/// A ℚ-divisor: one rational coefficient per configuration curve.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QDivisor {
    config: ConfigRef,
    coeffs: RatVector,
}

impl QDivisor {
    pub fn new(config: ConfigRef, coeffs: RatVector) -> Result<Self> {
        if coeffs.len() != config.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: config.len(),
                found: coeffs.len(),
            }
            .into());
        }
        Ok(Self { config, coeffs })
    }

    pub fn zero(config: &ConfigRef) -> Self {
        Self {
            coeffs: vec![Rational::zero(); config.len()],
            config: config.clone(),
        }
    }

    /// The divisor `1 * C_i`.
    pub fn curve(config: &ConfigRef, i: usize) -> Self {
        let mut d = Self::zero(config);
        d.coeffs[i] = Rational::from_integer(1.into());
        d
    }

    /// Builds a divisor from `(curve name, coefficient)` pairs; repeated
    /// names accumulate.
    pub fn from_terms(config: &ConfigRef, terms: &[(&str, Rational)]) -> Result<Self> {
        let mut d = Self::zero(config);
        for (name, c) in terms {
            let i = config.resolve(name)?;
            d.coeffs[i] += c;
        }
        Ok(d)
    }

    pub fn config(&self) -> &ConfigRef {
        &self.config
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn into_coeffs(self) -> RatVector {
        self.coeffs
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&i| !self.coeffs[i].is_zero())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn try_add(&self, other: &QDivisor) -> Result<QDivisor> {
        same_config(&self.config, &other.config)?;
        Ok(Self {
            config: self.config.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &QDivisor) -> Result<QDivisor> {
        same_config(&self.config, &other.config)?;
        Ok(Self {
            config: self.config.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, lambda: &Rational) -> QDivisor {
        Self {
            config: self.config.clone(),
            coeffs: self.coeffs.iter().map(|a| a * lambda).collect(),
        }
    }

    /// `D . C_i` for every configuration curve, i.e. `mu * d`.
    pub fn intersections(&self) -> RatVector {
        self.config
            .mu
            .mul_vec(&self.coeffs)
            .expect("coefficient count matches configuration")
    }

    /// `D . C_i` for a single curve.
    pub fn dot_curve(&self, i: usize) -> Rational {
        dot(self.config.mu.row(i), &self.coeffs)
    }

    pub fn self_intersection(&self) -> Rational {
        dot(&self.coeffs, &self.intersections())
    }
}

impl fmt::Display for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = self.config.name(i);
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == Rational::from_integer(1.into()) {
                f.write_str(name)?;
            } else {
                write!(f, "{} {name}", format_rational(&mag))?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QDivisor({self})")
    }
}

/// A reduced cycle: distinct configuration curves, in a fixed order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    config: ConfigRef,
    members: Vec<usize>,
    negdef_certificate: Option<Vec<Rational>>,
}

impl Cycle {
    pub fn new(config: &ConfigRef, members: Vec<usize>) -> Result<Self> {
        for (k, &i) in members.iter().enumerate() {
            if i >= config.len() {
                return Err(Error::InvalidConfiguration(format!(
                    "cycle member index {i} out of range"
                )));
            }
            if members[..k].contains(&i) {
                return Err(Error::InvalidConfiguration(format!(
                    "cycle is not reduced: {} appears twice",
                    config.name(i)
                )));
            }
        }
        Ok(Self {
            config: config.clone(),
            members,
            negdef_certificate: None,
        })
    }

    pub fn from_names(config: &ConfigRef, names: &[&str]) -> Result<Self> {
        let members = names
            .iter()
            .map(|n| config.resolve(n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(config, members)
    }

    /// Every curve of the configuration, in configuration order.
    pub fn full(config: &ConfigRef) -> Self {
        Self {
            config: config.clone(),
            members: (0..config.len()).collect(),
            negdef_certificate: None,
        }
    }

    pub fn config(&self) -> &ConfigRef {
        &self.config
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, curve: usize) -> bool {
        self.members.contains(&curve)
    }

    pub fn member_names(&self) -> Vec<&str> {
        self.members.iter().map(|&i| self.config.name(i)).collect()
    }

    /// Leading principal minors of `mu_G`, present once certified.
    pub fn certificate(&self) -> Option<&[Rational]> {
        self.negdef_certificate.as_deref()
    }

    pub fn is_certified(&self) -> bool {
        self.negdef_certificate.is_some()
    }

    /// `sum y_k G_k` as a divisor on the whole configuration.
    pub fn divisor(&self, y: &[Rational]) -> Result<QDivisor> {
        if y.len() != self.members.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.members.len(),
                found: y.len(),
            }
            .into());
        }
        let mut d = QDivisor::zero(&self.config);
        for (&i, c) in self.members.iter().zip(y) {
            d.coeffs[i] += c;
        }
        Ok(d)
    }

    /// `D . G_k` for each member.
    pub fn pairings(&self, d: &QDivisor) -> Result<RatVector> {
        same_config(&self.config, &d.config)?;
        Ok(self.members.iter().map(|&i| d.dot_curve(i)).collect())
    }
}

impl fmt::Debug for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cycle{:?}", self.member_names())?;
        if self.is_certified() {
            f.write_str(" (negdef)")?;
        }
        Ok(())
    }
}

/// The intersection pairing `D1 . D2`.
pub fn pair(d1: &QDivisor, d2: &QDivisor) -> Result<Rational> {
    same_config(&d1.config, &d2.config)?;
    Ok(dot(&d1.coeffs, &d2.intersections()))
}

/// `Phi_G(y) = y^T mu_G y`.
pub fn phi(g: &Cycle, y: &[Rational]) -> Result<Rational> {
    Ok(submatrix(g).quadratic_form(y)?)
}

/// `mu_G`, rows and columns in member order.
pub fn submatrix(g: &Cycle) -> RatMatrix {
    g.config.mu.principal(&g.members)
}

/// Attaches the Sylvester certificate, or reports the first leading minor
/// with the wrong sign.
pub fn certify_negdef(g: &Cycle) -> Result<Cycle> {
    if g.is_certified() {
        return Ok(g.clone());
    }
    let test = sylvester_negative_definite(&submatrix(g))?;
    if let Some(order) = test.first_failure {
        return Err(Error::NotNegativeDefinite {
            order,
            minor: test.minors[order - 1].clone(),
        });
    }
    Ok(Cycle {
        negdef_certificate: Some(test.minors),
        ..g.clone()
    })
}

/// `C <= D` coefficientwise.
pub fn leq_divisor(c: &QDivisor, d: &QDivisor) -> Result<bool> {
    same_config(&c.config, &d.config)?;
    Ok(c.coeffs.iter().zip(&d.coeffs).all(|(a, b)| a <= b))
}

pub fn is_effective(d: &QDivisor) -> bool {
    d.coeffs.iter().all(|c| !c.is_negative())
}

/// Coefficientwise maximum.
pub fn max_divisor(p1: &QDivisor, p2: &QDivisor) -> Result<QDivisor> {
    same_config(&p1.config, &p2.config)?;
    Ok(QDivisor {
        config: p1.config.clone(),
        coeffs: p1
            .coeffs
            .iter()
            .zip(&p2.coeffs)
            .map(|(a, b)| if a >= b { a.clone() } else { b.clone() })
            .collect(),
    })
}

/// `D^2` for `D` supported on a negative definite cycle; asserts `D^2 <= 0`
/// with equality only for `D = 0`.
pub fn check_supported_negsquare(d: &QDivisor, g: &Cycle) -> Result<Rational> {
    same_config(&d.config, &g.config)?;
    let g = certify_negdef(g)?;
    if let Some(i) = d.support().into_iter().find(|&i| !g.contains(i)) {
        return Err(Error::SupportViolation {
            curve: d.config.name(i).to_string(),
        });
    }
    let sq = d.self_intersection();
    if sq.is_positive() || (sq.is_zero() && !d.is_zero()) {
        return Err(Error::InvariantViolation(format!(
            "{d} is supported on a negative definite cycle but has square {sq}"
        )));
    }
    Ok(sq)
}
