//! Seeded random polynomial sections.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GaussianRational, Jet, MatrixJet, Rational};

use super::Section;

/// Shape of random sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectionSpec {
    /// Maximal total degree of a monomial.
    pub max_degree: u32,
    /// Monomials per matrix entry and ν-order.
    pub terms: usize,
    /// Real and imaginary parts are drawn from `−bound..=bound`.
    pub bound: i64,
    /// Highest ν-order with a nonzero coefficient.
    pub nu_top: i32,
}

impl Default for SectionSpec {
    fn default() -> Self {
        SectionSpec { max_degree: 3, terms: 3, bound: 2, nu_top: 1 }
    }
}

/// Which variables a random polynomial may involve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variables {
    All,
    Holomorphic,
    Antiholomorphic,
}

fn random_coeff(rng: &mut ChaCha8Rng, bound: i64) -> GaussianRational {
    loop {
        let re = rng.random_range(-bound..=bound);
        let im = rng.random_range(-bound..=bound);
        let c = GaussianRational::new(Rational::from_int(re), Rational::from_int(im));
        if !c.is_zero() {
            return c;
        }
    }
}

/// A sparse polynomial in `2m` variables.
pub fn random_polynomial(rng: &mut ChaCha8Rng, m: usize, spec: &SectionSpec, vars: Variables) -> Jet {
    let n = 2 * m;
    let allowed: Vec<usize> = match vars {
        Variables::All => (0..n).collect(),
        Variables::Holomorphic => (0..m).collect(),
        Variables::Antiholomorphic => (m..n).collect(),
    };
    let mut p = Jet::zero(n);
    for _ in 0..spec.terms {
        let deg = rng.random_range(0..=spec.max_degree);
        let mut exps = vec![0u32; n];
        for _ in 0..deg {
            exps[allowed[rng.random_range(0..allowed.len())]] += 1;
        }
        p = &p + &Jet::monomial(n, &exps, random_coeff(rng, spec.bound));
    }
    p
}

/// A `d × d` section with random polynomial entries at orders `0..=nu_top`.
pub fn random_section(rng: &mut ChaCha8Rng, m: usize, d: usize, spec: &SectionSpec, vars: Variables) -> Section {
    let template = MatrixJet::zero(d, 2 * m);
    let mut s = Section::zero(&template);
    for order in 0..=spec.nu_top {
        let entries = (0..d * d).map(|_| random_polynomial(rng, m, spec, vars)).collect();
        s = s.add(&Section::monomial(order, MatrixJet::from_entries(d, entries)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn seeded_and_shaped() {
        let spec = SectionSpec::default();
        let a = random_section(&mut ChaCha8Rng::seed_from_u64(7), 1, 2, &spec, Variables::All);
        let b = random_section(&mut ChaCha8Rng::seed_from_u64(7), 1, 2, &spec, Variables::All);
        assert_eq!(a, b);
        assert!(a.top_order().unwrap() <= 1);
        for (_, c) in a.iter() {
            for e in c.entries() {
                assert!(e.is_exact() && e.max_degree().unwrap_or(0) <= 3);
            }
        }
        let h = random_section(&mut ChaCha8Rng::seed_from_u64(1), 1, 2, &spec, Variables::Holomorphic);
        for (_, c) in h.iter() {
            assert!(c.derive(1).is_zero());
        }
    }
}
