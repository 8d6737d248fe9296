//! Seeded generators of random test data, shared by the `check` verbs of the
//! command-line driver and the test suites.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, Exponents, MultiPoly, Rational};
use crate::density::{DensityOperator, TermKey, VectorField};
use crate::sdiff::VolumeStructure;

/// Deterministic sampler; the same seed always yields the same stream.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent sampler for trial `index` of a run seeded with `seed`.
    pub fn for_trial(seed: u64, index: usize) -> Self {
        Self::new(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    /// Small rational `a/b` with `|a| <= 6`, `1 <= b <= 4`.
    pub fn rational(&mut self) -> Rational {
        rat(self.rng.gen_range(-6..=6), self.rng.gen_range(1..=4))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    /// Rational outside `excluded`.
    pub fn rational_avoiding(&mut self, excluded: &[Rational]) -> Rational {
        loop {
            let r = self.rational();
            if !excluded.contains(&r) {
                return r;
            }
        }
    }

    pub fn exponents(&mut self, dim: usize, degree: usize) -> Exponents {
        let mut e = Exponents::zero(dim);
        for _ in 0..degree {
            let i = self.below(dim);
            e.set(i, e.get(i) + 1);
        }
        e
    }

    /// Polynomial of degree at most `max_degree` with at most `max_terms`
    /// terms.
    pub fn poly(&mut self, dim: usize, max_degree: usize, max_terms: usize) -> MultiPoly {
        let count = self.rng.gen_range(0..=max_terms);
        let terms: Vec<_> = (0..count)
            .map(|_| {
                let deg = self.rng.gen_range(0..=max_degree);
                (self.exponents(dim, deg), self.rational())
            })
            .collect();
        MultiPoly::from_terms(dim, terms)
    }

    pub fn nonzero_poly(&mut self, dim: usize, max_degree: usize, max_terms: usize) -> MultiPoly {
        loop {
            let p = self.poly(dim, max_degree, max_terms.max(1));
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// Operator with spatial order at most `order`, coefficient degree at
    /// most `coeff_degree` and `w`-degree at most `weight_degree`.
    pub fn operator(
        &mut self,
        dim: usize,
        order: usize,
        coeff_degree: usize,
        weight_degree: u32,
        max_terms: usize,
    ) -> DensityOperator {
        let mut out = DensityOperator::zero(dim);
        let count = self.rng.gen_range(1..=max_terms.max(1));
        for _ in 0..count {
            let k = self.rng.gen_range(0..=order);
            let key = TermKey { alpha: self.exponents(dim, k), wpow: self.rng.gen_range(0..=weight_degree) };
            let c = self.poly(dim, coeff_degree, 2);
            out.add_term(key, c);
        }
        out
    }

    /// `w`-free operator whose order-`order` part is nonzero.
    pub fn operator_of_order(
        &mut self,
        dim: usize,
        order: usize,
        coeff_degree: usize,
        max_terms: usize,
    ) -> DensityOperator {
        let lower = if order == 0 {
            DensityOperator::zero(dim)
        } else {
            self.operator(dim, order - 1, coeff_degree, 0, max_terms)
        };
        let alpha = self.exponents(dim, order);
        let top = DensityOperator::monomial(self.nonzero_poly(dim, coeff_degree, 2), alpha, 0);
        &lower + &top
    }

    pub fn field(&mut self, dim: usize, max_degree: usize) -> VectorField {
        VectorField::new((0..dim).map(|_| self.poly(dim, max_degree, 3)).collect()).expect("consistent dims")
    }

    /// Random element of the span of the given generators with small
    /// integer coefficients.
    pub fn combination(&mut self, generators: &[VectorField]) -> VectorField {
        let dim = generators[0].dim();
        let mut acc = vec![MultiPoly::zero(dim); dim];
        for g in generators {
            let c = rat(self.rng.gen_range(-2..=2), 1);
            for (a, gi) in acc.iter_mut().zip(g.components()) {
                *a = &*a + &gi.scale(&c);
            }
        }
        VectorField::new(acc).expect("consistent dims")
    }

    /// Closed `Gamma = grad(phi)` for a random potential of degree at most
    /// `max_degree`.
    pub fn volume(&mut self, dim: usize, max_degree: usize) -> (MultiPoly, VolumeStructure) {
        let phi = self.poly(dim, max_degree, 3);
        let vol = VolumeStructure::from_potential(&phi);
        (phi, vol)
    }

    /// Polynomial field preserving the volume `exp(-phi) dx`: in dimension 2
    /// `g(phi) J grad(phi)`, in dimension 3 `g(phi) grad(phi) x grad(psi)`,
    /// and constant fields for constant `phi`.
    pub fn volume_preserving_field(&mut self, phi: &MultiPoly) -> VectorField {
        let dim = phi.dim();
        let g = {
            let a = self.rational();
            let b = self.rational();
            &MultiPoly::constant(dim, a) + &phi.scale(&b)
        };
        let grad: Vec<MultiPoly> = (0..dim).map(|i| phi.diff(i)).collect();
        let comps = match dim {
            2 => vec![grad[1].clone(), -&grad[0]],
            3 => {
                let psi = self.poly(dim, 2, 2);
                let h: Vec<MultiPoly> = (0..dim).map(|i| psi.diff(i)).collect();
                (0..3)
                    .map(|i| {
                        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                        &(&grad[j] * &h[k]) - &(&grad[k] * &h[j])
                    })
                    .collect()
            }
            _ => grad.iter().map(|_| MultiPoly::zero(dim)).collect(),
        };
        if grad.iter().all(MultiPoly::is_zero) {
            let mut c: Vec<MultiPoly> = (0..dim).map(|_| MultiPoly::constant(dim, self.rational())).collect();
            c.shuffle(&mut self.rng);
            return VectorField::new(c).expect("consistent dims");
        }
        VectorField::new(comps.iter().map(|c| &g * c).collect()).expect("consistent dims")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a = Sampler::new(7).operator(2, 3, 2, 1, 5);
        let b = Sampler::new(7).operator(2, 3, 2, 1, 5);
        assert_eq!(a, b);
        assert_eq!(Sampler::for_trial(1, 3).rational(), Sampler::for_trial(1, 3).rational());
    }

    #[test]
    fn preserving_fields_are_divergence_free() {
        let mut s = Sampler::new(11);
        for dim in 1..=3 {
            for _ in 0..10 {
                let (phi, vol) = s.volume(dim, 2);
                let k = s.volume_preserving_field(&phi);
                assert!(vol.div_rho(&k).unwrap().is_zero(), "{phi:?}");
            }
        }
    }

    #[test]
    fn operator_of_order_has_that_order() {
        let mut s = Sampler::new(3);
        for order in 0..4 {
            assert_eq!(s.operator_of_order(2, order, 2, 4).spatial_order(), Some(order));
        }
    }
}
