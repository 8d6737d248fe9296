use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Multi-index of non-negative exponents, one per coordinate axis.
///
/// Ordered graded-lexicographically: first by total degree, then
/// lexicographically with axis 0 most significant.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Exponents(SmallVec<[u16; 4]>);

impl Exponents {
    pub fn zero(dim: usize) -> Self {
        Exponents(SmallVec::from_elem(0, dim))
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = Self::zero(dim);
        e.0[axis] = 1;
        e
    }

    pub fn from_slice(exps: &[u16]) -> Self {
        Exponents(SmallVec::from_slice(exps))
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn get(&self, axis: usize) -> u16 {
        self.0[axis]
    }

    pub fn set(&mut self, axis: usize, value: u16) {
        self.0[axis] = value;
    }

    pub fn add(&self, other: &Exponents) -> Exponents {
        debug_assert_eq!(self.dim(), other.dim());
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` when some component would go negative.
    pub fn checked_sub(&self, other: &Exponents) -> Option<Exponents> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<SmallVec<_>>>().map(Exponents)
    }

    /// All multi-indices `g` with `g <= self` componentwise.
    pub fn sub_indices(&self) -> Vec<Exponents> {
        let mut out = vec![Exponents::zero(self.dim())];
        for (axis, &top) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
            for base in &out {
                for e in 0..=top {
                    let mut g = base.clone();
                    g.0[axis] = e;
                    next.push(g);
                }
            }
            out = next;
        }
        out
    }

    /// Product of binomial coefficients `C(self_i, g_i)`.
    pub fn binomial(&self, g: &Exponents) -> num_bigint::BigInt {
        self.0.iter().zip(&g.0).map(|(&n, &k)| super::rational::binomial(n as u32, k as u32)).product()
    }

    /// Expands the multi-index into a non-decreasing list of axes, e.g.
    /// `(2, 1)` becomes `[0, 0, 1]`.
    pub fn axes(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(axis, &e)| std::iter::repeat_n(axis, e as usize)).collect()
    }

    /// All multi-indices of dimension `dim` with total degree exactly `degree`,
    /// in descending graded-lex order.
    pub fn all_of_degree(dim: usize, degree: usize) -> Vec<Exponents> {
        fn rec(dim: usize, left: usize, prefix: &mut Vec<u16>, out: &mut Vec<Exponents>) {
            if prefix.len() + 1 == dim {
                prefix.push(left as u16);
                out.push(Exponents::from_slice(prefix));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e as u16);
                rec(dim, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            return out;
        }
        rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
        out
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = Exponents::from_slice(&[0, 2]);
        let b = Exponents::from_slice(&[1, 1]);
        let c = Exponents::from_slice(&[3, 0]);
        assert!(a < b && b < c);
        assert!(Exponents::from_slice(&[0, 0]) < Exponents::from_slice(&[0, 1]));
    }

    #[test]
    fn enumerates_sub_indices() {
        let e = Exponents::from_slice(&[2, 1]);
        assert_eq!(e.sub_indices().len(), 6);
        assert_eq!(e.axes(), vec![0, 0, 1]);
        assert_eq!(Exponents::all_of_degree(3, 2).len(), 6);
        assert_eq!(Exponents::all_of_degree(2, 2)[0], Exponents::from_slice(&[2, 0]));
    }
}
