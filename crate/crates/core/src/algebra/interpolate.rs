use std::collections::BTreeSet;

use super::lambda::LambdaPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Reconstructs the polynomial of degree `<= max_degree` through the samples.
///
/// The first `max_degree + 1` samples determine the polynomial (Newton
/// divided differences); every remaining sample must lie on it, otherwise
/// [`Error::DegreeOverflow`] is returned.
pub fn interpolate_lambda(samples: &[(Rational, Rational)], max_degree: usize) -> Result<LambdaPoly> {
    let needed = max_degree + 1;
    if samples.len() < needed {
        return Err(Error::InsufficientSamples { needed, got: samples.len() });
    }
    let mut seen = BTreeSet::new();
    for (x, _) in samples {
        if !seen.insert(x.clone()) {
            return Err(Error::DuplicateNode(x.to_string()));
        }
    }

    let (fit, extra) = samples.split_at(needed);
    let xs: Vec<&Rational> = fit.iter().map(|(x, _)| x).collect();
    let mut dd: Vec<Rational> = fit.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..needed {
        for i in (level..needed).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }

    // Horner-style expansion of the Newton form.
    let mut poly = LambdaPoly::constant(dd[needed - 1].clone());
    for i in (0..needed - 1).rev() {
        let factor = LambdaPoly::linear(-xs[i].clone(), Rational::from_integer(1.into()));
        poly = &(&poly * &factor) + &LambdaPoly::constant(dd[i].clone());
    }

    if extra.iter().any(|(x, y)| &poly.eval(x) != y) {
        return Err(Error::DegreeOverflow { max_degree });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn pts(v: &[(i64, i64)]) -> Vec<(Rational, Rational)> {
        v.iter().map(|&(x, y)| (int(x), int(y))).collect()
    }

    #[test]
    fn constant_data() {
        let p = interpolate_lambda(&pts(&[(0, 1), (1, 1)]), 0).unwrap();
        assert_eq!(p, LambdaPoly::one());
    }

    #[test]
    fn collinear_data() {
        let p = interpolate_lambda(&pts(&[(0, 0), (1, 2), (2, 4)]), 1).unwrap();
        assert_eq!(p, LambdaPoly::linear(int(0), int(2)));
    }

    #[test]
    fn quadratic_data_overflows_degree_one() {
        let err = interpolate_lambda(&pts(&[(0, 0), (1, 1), (2, 4), (3, 9)]), 1).unwrap_err();
        assert_eq!(err, Error::DegreeOverflow { max_degree: 1 });
    }

    #[test]
    fn duplicate_nodes_and_too_few_samples() {
        assert!(matches!(interpolate_lambda(&pts(&[(1, 0), (1, 2)]), 1), Err(Error::DuplicateNode(_))));
        assert!(matches!(interpolate_lambda(&pts(&[(1, 0)]), 1), Err(Error::InsufficientSamples { .. })));
    }
}
