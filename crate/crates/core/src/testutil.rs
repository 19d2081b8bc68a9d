use crate::field::{PrimeField, Rng};
use crate::poly::{monomials_up_to, MultiPoly};

/// Random polynomial with up to `terms` terms of degree `<= max_deg`.
pub fn random_poly(field: PrimeField, n: usize, max_deg: u32, terms: usize, rng: &mut Rng) -> MultiPoly {
    let mons = monomials_up_to(n, max_deg);
    MultiPoly::from_terms(
        field,
        n,
        (0..terms).map(|_| {
            let m = mons[rng.below(mons.len() as u64) as usize].clone();
            (m, rng.element(field))
        }),
    )
    .unwrap()
}

/// Random dense polynomial: every monomial of degree `<= d` gets a random
/// coefficient.
pub fn random_dense(field: PrimeField, n: usize, d: u32, rng: &mut Rng) -> MultiPoly {
    MultiPoly::from_terms(
        field,
        n,
        monomials_up_to(n, d).into_iter().map(|m| (m, rng.element(field))),
    )
    .unwrap()
}
