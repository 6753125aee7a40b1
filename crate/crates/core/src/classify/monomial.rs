use num_traits::Signed;

use super::verdict::{Certificate, MonomialObstruction, Verdict, Witness};
use super::ClassifyError;
use crate::polycore::Polynomial;

/// A monomial `a x^d` is g-convex for some connection iff it is convex, i.e.
/// `a x_j^{d_j}` with `a > 0` and `d_j` even, or it has total degree at most 1.
/// Linear monomials have no critical point, which is why they qualify even
/// though they are not even powers.
pub fn classify_monomial(f: &Polynomial) -> Result<Verdict, ClassifyError> {
    if f.num_terms() != 1 {
        return Err(ClassifyError::NotMonomial);
    }
    let (e, a) = f.terms().next().expect("one term");
    let present: Vec<(usize, u32)> = e
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(i, &d)| (i, d))
        .collect();
    let total: u32 = present.iter().map(|(_, d)| d).sum();
    if total == 0 {
        return Ok(Verdict::gconvex(Certificate::ConstantFunction));
    }
    if total == 1 {
        return Ok(Verdict::gconvex(Certificate::NoCriticalPoint));
    }
    let obstruction = if let Some(&(i, d)) = present.iter().find(|(_, d)| *d >= 3 && d % 2 == 1) {
        MonomialObstruction::OddPower {
            variable: i + 1,
            degree: d,
        }
    } else {
        let linear = present.iter().filter(|(_, d)| *d == 1).count();
        let even = present.len() - linear;
        match (linear, even) {
            (0, 1) => {
                let (j, d) = present[0];
                if a.is_positive() {
                    return Ok(Verdict::gconvex(Certificate::MonomialEvenPower {
                        variable: j + 1,
                        degree: d,
                        coefficient: a.clone(),
                    }));
                }
                MonomialObstruction::NegativeCoefficient
            }
            (l, _) if l >= 2 => MonomialObstruction::SeveralLinearFactors,
            (1, _) => MonomialObstruction::LinearTimesEvenPowers,
            _ => MonomialObstruction::SeveralEvenPowers,
        }
    };
    Ok(Verdict::not_gconvex(Witness::MonomialStructure { obstruction }))
}
