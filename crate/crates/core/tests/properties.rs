use proptest::prelude::*;

use ri_copoly::chainseq::{minimal_parameters, perturbed_delta, szego_from_delta, ChainSequence, VerblunskySeq};
use ri_copoly::perturbation::{perturbed_family_direct, perturbed_family_represented, transfer_identity_residual};
use ri_copoly::recurrence::{generate_family, transfer_step};
use ri_copoly::scalar::{int, rat, Rational};
use ri_copoly::stieltjes::{full_law_residual, homography_from_full, tail_from_full_residual, tail_law_residual};
use ri_copoly::toda::{affected_levels, toda_rhs, CoefficientFrame, ScheduleValues, TodaParams};
use ri_copoly::zeros::{casoratti_assoc_residual, corecursive_casoratti_residual, ProductStart};
use ri_copoly::{CoefficientSequences, Perturbation, Poly, PolyMatrix};

const DEG: usize = 7;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn pos_rat() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

/// Unit fraction-ish values in (0, 1).
fn unit_rat() -> impl Strategy<Value = Rational> {
    (1i64..=8).prop_map(|n| rat(n, 9))
}

fn family() -> impl Strategy<Value = CoefficientSequences<Rational>> {
    (
        prop::collection::vec(small_rat(), DEG + 2),
        prop::collection::vec(pos_rat(), DEG + 2),
        prop::collection::vec(small_rat(), DEG + 2),
    )
        .prop_map(|(c, l, a)| CoefficientSequences::from_lists(c, l, a))
}

fn perturbation() -> impl Strategy<Value = Perturbation<Rational>> {
    (1usize..=4, small_rat(), pos_rat()).prop_map(|(k, mu, nu)| Perturbation { k, mu, nu })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn representation_matches_direct(seqs in family(), pert in perturbation()) {
        let rep = perturbed_family_represented(&seqs, &pert, DEG).unwrap();
        let dir = perturbed_family_direct(&seqs, &pert, DEG).unwrap();
        prop_assert_eq!(rep, dir);
    }

    #[test]
    fn transfer_identity_is_exact(seqs in family(), pert in perturbation()) {
        for n in pert.k.saturating_sub(1)..DEG {
            let [a, b] = transfer_identity_residual(&seqs, &pert, n).unwrap();
            prop_assert!(a.is_zero() && b.is_zero());
        }
    }

    #[test]
    fn transfer_product_determinant(seqs in family(), n in 1usize..=DEG) {
        let mut m = PolyMatrix::identity();
        let mut want = Poly::one();
        for j in 1..=n {
            m = transfer_step(&seqs, j).unwrap().mul(&m);
            want = &want * &seqs.lambda_term(j).unwrap();
        }
        prop_assert_eq!(m.det(), want);
    }

    #[test]
    fn casoratti_identities(seqs in family(), k in 1usize..=3, mu in small_rat()) {
        for n in k..DEG {
            prop_assert!(casoratti_assoc_residual(&seqs, k, n).unwrap().is_zero());
            let pert = Perturbation { k, mu: mu.clone(), nu: int(1) };
            prop_assert!(corecursive_casoratti_residual(&seqs, &pert, n, ProductStart::AfterK).unwrap().is_zero());
        }
    }

    #[test]
    fn truncation_laws_vanish(seqs in family(), pert in perturbation()) {
        let hf = match homography_from_full(&seqs, &pert) {
            Ok(h) => h,
            // degenerate homographies are reported as errors, not checked
            Err(_) => return Ok(()),
        };
        for m in 0..=(DEG - pert.k - 1).min(3) {
            prop_assert!(tail_law_residual(&seqs, &pert, m).unwrap().is_zero());
            prop_assert!(tail_from_full_residual(&seqs, pert.k, m).unwrap().is_zero());
            prop_assert!(full_law_residual(&seqs, &pert, &hf, pert.k + 1 + m).unwrap().is_zero());
        }
    }

    #[test]
    fn minimal_parameters_reproduce_chain(g in prop::collection::vec(unit_rat(), 8)) {
        // d_{n+1} = (1 - g_n) g_{n+1} with g_0 = 0 has minimal parameters g
        let mut params = vec![int(0)];
        params.extend(g);
        let d: Vec<Rational> = (0..8).map(|n| (int(1) - params[n].clone()) * params[n + 1].clone()).collect();
        let chain = ChainSequence::from_list(d.clone(), "random");
        let m = minimal_parameters(&chain, 8).unwrap();
        prop_assert_eq!(&m, &params);
        for n in 0..8 {
            prop_assert_eq!(d[n].clone(), (int(1) - m[n].clone()) * m[n + 1].clone());
        }
    }

    #[test]
    fn szego_reversal(delta in prop::collection::vec((-8i64..=8).prop_map(|n| rat(n, 9)), 6)) {
        let (phi, star) = szego_from_delta(&delta, 6).unwrap();
        for n in 0..=6 {
            prop_assert_eq!(&star[n], &phi[n].reversed_conj(n));
        }
    }

    #[test]
    fn perturbed_delta_matches_direct_recursion(
        delta1 in (-8i64..=-1).prop_map(|n| rat(n, 9)),
        d in prop::collection::vec(unit_rat().prop_map(|x| x / int(4)), 8),
        k in 1usize..=4,
        nu in pos_rat(),
    ) {
        let chain = ChainSequence::from_list(d, "random");
        let mut delta = vec![delta1];
        for j in 1..6 {
            if delta[j - 1] == int(0) {
                return Ok(());
            }
            let next = (int(1) - int(4) * chain.d(j + 1).unwrap()) / (int(2) * delta[j - 1].clone());
            delta.push(next);
        }
        if delta.iter().any(|x| *x == int(0)) {
            return Ok(());
        }
        let p = match perturbed_delta(&VerblunskySeq::explicit(delta.clone()), &chain, k, nu.clone(), 6) {
            Ok(p) => p,
            // a later perturbed delta may vanish; the recursion then stops
            Err(ri_copoly::Error::DivisionByZero(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let dilated = chain.co_dilate(k + 1, nu).unwrap();
        let direct = (int(1) - int(4) * dilated.d(k + 1).unwrap()) / (int(2) * delta[k - 1].clone());
        prop_assert_eq!(&p.delta[..k], &delta[..k]);
        prop_assert_eq!(p.delta[k].clone(), direct);
    }

    #[test]
    fn toda_identity_schedule_and_locality(
        c in prop::collection::vec(pos_rat(), 7),
        l in prop::collection::vec(pos_rat(), 6),
        k in 0usize..=3,
        mu in small_rat(),
        nu in pos_rat(),
    ) {
        let frame = CoefficientFrame::from_coefficients(0.0, &c, &l).closed();
        let params = TodaParams::new(0.75, 1.25, 0.0);
        let id = ScheduleValues::identity(k);
        let sv = ScheduleValues { k, mu, nu, mu_dot: rat(1, 3), nu_dot: rat(-1, 2) };
        let (c_aff, l_aff) = affected_levels(k);
        for n in 1..=5 {
            let plain = toda_rhs(&frame, &params, None, n);
            let reduced = toda_rhs(&frame, &params, Some(&id), n);
            prop_assert_eq!(&plain, &reduced);
            let (Ok(plain), Ok(pert)) = (plain, toda_rhs(&frame, &params, Some(&sv), n)) else { continue };
            if !c_aff.contains(&n) {
                prop_assert_eq!(&plain.0, &pert.0);
            }
            if !l_aff.contains(&n) {
                prop_assert_eq!(&plain.1, &pert.1);
            }
        }
    }
}

#[test]
fn unperturbed_family_is_monic() {
    let seqs = CoefficientSequences::from_lists(vec![int(1); 4], vec![rat(1, 4); 4], vec![int(0); 4]);
    for (n, p) in generate_family(&seqs, 4, 0).unwrap().iter().enumerate() {
        assert_eq!(p.degree(), n as isize);
        assert!(p.is_monic());
    }
}
