use serde::Serialize;

use crate::polycore::{qserde, Rational};

/// A closed interval `[lo, hi]` known to contain a root; `lo == hi` pins it exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "qserde::rational")]
    pub lo: Rational,
    #[serde(serialize_with = "qserde::rational")]
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum Verdict {
    GConvex { certificate: Certificate },
    NotGConvex { witness: Witness },
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    ConstantFunction,
    /// The gradient never vanishes.
    NoCriticalPoint,
    /// `f' = (x - u)^m p(x)` with `m` odd and `p > 0` on the whole line.
    UnivariateOddRoot {
        root: Interval,
        multiplicity: u32,
        cofactor_positive: bool,
    },
    /// The quadratic part is positive semidefinite, so `f` is convex.
    QuadraticPsd,
    /// `A x = -b` has no solution.
    QuadraticNoCritical,
    /// `a x_j^d` with `a > 0` and `d` even; `variable` is 1-based.
    MonomialEvenPower {
        variable: usize,
        degree: u32,
        #[serde(serialize_with = "qserde::rational")]
        coefficient: Rational,
    },
    /// Every block of the finest additive splitting is g-convex.
    Separable { blocks: Vec<BlockCertificate> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCertificate {
    /// 1-based variable indices of the block.
    pub variables: Vec<usize>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Witness {
    /// The only critical point type forbidden at a single root: even order.
    EvenMultiplicityRoot { root: Interval, multiplicity: u32 },
    /// Disjoint intervals, each holding an odd number of roots of `f'` counted
    /// with multiplicity, hence each a distinct root of odd multiplicity.
    MultipleOddRoots { roots: Vec<Interval> },
    /// A single odd root, but `f'` is negative to the right of it.
    NegativeLeadingCofactor { root: Interval, multiplicity: u32 },
    /// An exact critical point whose Hessian is not positive semidefinite.
    IndefiniteHessianAtCritical {
        #[serde(serialize_with = "qserde::vec")]
        point: Vec<Rational>,
    },
    MonomialStructure { obstruction: MonomialObstruction },
    /// Every block has a critical point and the named block (1-based) fails.
    SeparableFailure {
        block: usize,
        variables: Vec<usize>,
        witness: Box<Witness>,
    },
}

/// Why a monomial `a x_1^{d_1} ... x_n^{d_n}` admits no convexifying connection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule")]
pub enum MonomialObstruction {
    /// Some exponent is odd and at least 3.
    OddPower { variable: usize, degree: u32 },
    /// At least two variables appear to the first power.
    SeveralLinearFactors,
    /// One linear factor times even powers of other variables.
    LinearTimesEvenPowers,
    /// Two or more variables with even exponents at least 2.
    SeveralEvenPowers,
    /// A single even power with a negative coefficient.
    NegativeCoefficient,
}

impl Verdict {
    pub fn is_gconvex(&self) -> bool {
        matches!(self, Verdict::GConvex { .. })
    }

    pub fn is_not_gconvex(&self) -> bool {
        matches!(self, Verdict::NotGConvex { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn outcome(&self) -> &'static str {
        match self {
            Verdict::GConvex { .. } => "GConvex",
            Verdict::NotGConvex { .. } => "NotGConvex",
            Verdict::Unknown { .. } => "Unknown",
        }
    }

    /// Outcome and certificate/witness variant, e.g. `"GConvex/NoCriticalPoint"`;
    /// the part of a verdict invariant under scaling and translation.
    pub fn kind(&self) -> String {
        match self {
            Verdict::GConvex { certificate } => format!("GConvex/{}", certificate.name()),
            Verdict::NotGConvex { witness } => format!("NotGConvex/{}", witness.name()),
            Verdict::Unknown { .. } => "Unknown".into(),
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::GConvex { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::NotGConvex { witness } => Some(witness),
            _ => None,
        }
    }

    pub(crate) fn gconvex(certificate: Certificate) -> Self {
        Verdict::GConvex { certificate }
    }

    pub(crate) fn not_gconvex(witness: Witness) -> Self {
        Verdict::NotGConvex { witness }
    }
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::ConstantFunction => "ConstantFunction",
            Certificate::NoCriticalPoint => "NoCriticalPoint",
            Certificate::UnivariateOddRoot { .. } => "UnivariateOddRoot",
            Certificate::QuadraticPsd => "QuadraticPSD",
            Certificate::QuadraticNoCritical => "QuadraticNoCritical",
            Certificate::MonomialEvenPower { .. } => "MonomialEvenPower",
            Certificate::Separable { .. } => "Separable",
        }
    }

    /// Whether this certificate proves the function has no critical point.
    pub fn excludes_critical_points(&self) -> bool {
        matches!(
            self,
            Certificate::NoCriticalPoint | Certificate::QuadraticNoCritical
        )
    }
}

impl Witness {
    pub fn name(&self) -> &'static str {
        match self {
            Witness::EvenMultiplicityRoot { .. } => "EvenMultiplicityRoot",
            Witness::MultipleOddRoots { .. } => "MultipleOddRoots",
            Witness::NegativeLeadingCofactor { .. } => "NegativeLeadingCofactor",
            Witness::IndefiniteHessianAtCritical { .. } => "IndefiniteHessianAtCritical",
            Witness::MonomialStructure { .. } => "MonomialStructure",
            Witness::SeparableFailure { .. } => "SeparableFailure",
        }
    }
}
