#![allow(dead_code)]

use bhlab::{Coef, MonomialTerm, MultilinearForm};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

pub fn config(cases: u32, seed: u64) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

fn decode(mut lin: u32, dims: &[u32]) -> Vec<u32> {
    dims.iter()
        .map(|&d| {
            let i = lin % d + 1;
            lin /= d;
            i
        })
        .collect()
}

fn build(dims: &[u32], cells: std::collections::BTreeMap<u32, i64>) -> MultilinearForm {
    let terms = cells.into_iter().map(|(lin, c)| MonomialTerm::new(decode(lin, dims), Coef::int(c))).collect();
    MultilinearForm::from_terms(dims.len(), terms).unwrap()
}

fn nonzero(max: i64) -> impl Strategy<Value = i64> {
    (1..=max, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v })
}

/// Forms of arity in `arity`, each dim in `1..=max_dim`, integer coefficients
/// bounded by `max_coef` in magnitude (1 gives unimodular forms).
pub fn int_form(
    arity: std::ops::RangeInclusive<usize>,
    max_dim: u32,
    max_coef: i64,
) -> impl Strategy<Value = MultilinearForm> {
    arity
        .prop_flat_map(move |m| prop::collection::vec(1..=max_dim, m))
        .prop_flat_map(move |dims| {
            let cells: u32 = dims.iter().product();
            (Just(dims), prop::collection::btree_map(0..cells, nonzero(max_coef), 1..=cells as usize))
        })
        .prop_map(|(dims, cells)| build(&dims, cells))
}

/// Unimodular forms with at most `K^m` monomials, dims up to `K + 1`.
pub fn restricted_form(max_m: usize, max_k: usize) -> impl Strategy<Value = (usize, MultilinearForm)> {
    (2..=max_m, 1..=max_k)
        .prop_flat_map(|(m, k)| (Just(k), prop::collection::vec(1..=k as u32 + 1, m)))
        .prop_flat_map(|(k, dims)| {
            let cells: u32 = dims.iter().product();
            let cap = (k as u32).pow(dims.len() as u32).min(cells) as usize;
            (Just(k), Just(dims), prop::collection::btree_map(0..cells, nonzero(1), 1..=cap))
        })
        .prop_map(|(k, dims, cells)| (k, build(&dims, cells)))
}

/// Random permutation of `1..=m`.
pub fn permutation(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=m).collect::<Vec<usize>>()).prop_shuffle()
}

pub mod suites {
    use bhlab::entropy::{holder_k_bound, ratio};
    use bhlab::hypercube_norm::{sup_norm_exact, DEFAULT_BUDGET};
    use bhlab::mixed_norms::{mixed_sum, Exponent, ExponentTuple};
    use bhlab::MultilinearForm;
    use proptest::prelude::*;
    use proptest::test_runner::TestCaseError;

    use super::{int_form, permutation, restricted_form};

    type Check = std::result::Result<(), TestCaseError>;

    fn real_tuple(values: &[f64]) -> ExponentTuple {
        ExponentTuple::new(values.iter().map(|&q| Exponent::Real(q)).collect()).unwrap()
    }

    pub fn l2_forms() -> impl Strategy<Value = MultilinearForm> {
        int_form(1..=3, 3, 5)
    }

    /// Coefficient ℓ₂ norm never exceeds the sup norm.
    pub fn l2_bound(form: &MultilinearForm) -> Check {
        let l2 = mixed_sum(form, &ExponentTuple::uniform(Exponent::int(2), form.arity()).unwrap(), None).unwrap();
        let norm = sup_norm_exact(form, DEFAULT_BUDGET).unwrap().value;
        prop_assert!(l2 <= norm * (1.0 + 1e-12), "l2 {l2} > norm {norm}");
        Ok(())
    }

    pub fn interchange_inputs() -> impl Strategy<Value = (MultilinearForm, f64, f64)> {
        (int_form(2..=2, 4, 9), 1.0f64..4.0, 0.0f64..4.0).prop_map(|(f, p, extra)| (f, p, p + extra))
    }

    /// For `p ≤ q`, the ℓ_q-outer/ℓ_p-inner sum is at most the swapped one.
    pub fn interchange(form: &MultilinearForm, p: f64, q: f64) -> Check {
        let lhs = mixed_sum(form, &real_tuple(&[q, p]), None).unwrap();
        let rhs = mixed_sum(form, &real_tuple(&[p, q]), Some(&[2, 1])).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
        Ok(())
    }

    pub fn holder_forms() -> impl Strategy<Value = MultilinearForm> {
        int_form(2..=3, 3, 4)
    }

    /// The `(2,…,2,1)` ratio is at most `√k` for `k` monomials.
    pub fn holder_sqrt_k(form: &MultilinearForm) -> Check {
        let (bound, observed) = holder_k_bound(form, DEFAULT_BUDGET).unwrap();
        prop_assert!(observed <= bound + 1e-12);
        Ok(())
    }

    pub fn restricted_inputs() -> impl Strategy<Value = (usize, MultilinearForm)> {
        restricted_form(3, 3)
    }

    /// Bohnenblust–Hille ratio at most `√K` with at most `K^m` monomials.
    pub fn restricted_sqrt_k(k: usize, form: &MultilinearForm) -> Check {
        let r = ratio(form, &ExponentTuple::bh(form.arity()), None, DEFAULT_BUDGET).unwrap().ratio;
        prop_assert!(r <= (k as f64).sqrt() * (1.0 + 1e-12), "ratio {r} with K = {k}");
        Ok(())
    }

    pub fn order_inputs() -> impl Strategy<Value = (MultilinearForm, Vec<usize>, f64)> {
        (
            int_form(1..=4, 3, 7).prop_flat_map(|f| {
                let m = f.arity();
                (Just(f), permutation(m))
            }),
            1.0f64..6.0,
        )
            .prop_map(|((f, perm), q)| (f, perm, q))
    }

    /// With one exponent everywhere the nesting order does not matter.
    pub fn order_independent(form: &MultilinearForm, perm: &[usize], q: f64) -> Check {
        let exps = ExponentTuple::uniform(Exponent::Real(q), form.arity()).unwrap();
        let a = mixed_sum(form, &exps, None).unwrap();
        let b = mixed_sum(form, &exps, Some(perm)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(b), "{a} vs {b}");
        Ok(())
    }
}
