use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use qseal::analysis::{
    classify_family, entropies, joint_distribution, partition_correct_prob, string_correct_prob,
    superposition_vs_mixture_gap, ClassifierConfig, InstrumentRule,
};
use qseal::oracle::{oracle_entropies, oracle_joint_distribution};
use qseal::quantum::{
    apply_instrument, fidelity, inner, tensor, trace_distance, MeasurementInstrument, PureState,
    C64,
};
use qseal::seals::{
    angle_bound, AngleRule, FourierSeal, MatrixSeal, Message, SealFamily, SealScheme,
    TiltedProductSeal,
};
use qseal::strategies::{honest_full_readout, partition_readout, projective_decode, q_povm};
use qseal::verifier::{escape_probability, escape_probability_by_enumeration};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn state(dim: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec(complex(), dim)
        .prop_filter("nonzero", |v| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(|v| PureState::normalize(v).unwrap())
}

fn any_state() -> impl Strategy<Value = PureState> {
    (1usize..=4).prop_flat_map(|q| state(1 << q))
}

/// Tilted seal with angles drawn inside the admissible band.
fn tilted_seal(max_n: usize) -> impl Strategy<Value = TiltedProductSeal> {
    (1..=max_n, 0.01..0.78f64, 0.1..1.0f64).prop_flat_map(|(n, cap, alpha)| {
        let bound = angle_bound(cap, alpha, n);
        prop::collection::vec(-bound..=bound, n)
            .prop_map(move |angles| TiltedProductSeal::new(cap, alpha, angles).unwrap())
    })
}

fn bits(n: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), n)
}

fn instruments_for(dim: usize) -> Vec<MeasurementInstrument> {
    let q = dim.trailing_zeros() as usize;
    let mut out: Vec<_> = (1..=q).map(|k| partition_readout(q, k).unwrap()).collect();
    for nu in [0.0, 0.3, 0.8, 1.0] {
        out.push(q_povm(dim, nu).unwrap());
    }
    out.push(projective_decode(&SealScheme::Fourier(FourierSeal::new(dim).unwrap())).unwrap());
    out
}

fn close(a: f64, b: f64, tol: f64) -> Result<(), TestCaseError> {
    prop_assert!((a - b).abs() <= tol, "{} vs {} (tol {})", a, b, tol);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcome_probabilities_sum_to_one(psi in any_state()) {
        for inst in instruments_for(psi.dim().unwrap()) {
            let ens = apply_instrument(&inst, &psi).unwrap();
            close(ens.total_probability(), 1.0, 1e-10)?;
            for o in &ens.outcomes {
                let n2: f64 = o.post_state.amplitudes().unwrap().iter().map(|z| z.norm_sqr()).sum();
                close(n2, 1.0, 1e-10)?;
            }
        }
    }

    #[test]
    fn completeness_of_every_instrument(q in 1usize..=6, nu in 0.0..=1.0f64) {
        let dim = 1 << q;
        prop_assert!(q_povm(dim, nu).unwrap().completeness_residual().unwrap() <= 1e-12);
        for k in 1..=q {
            prop_assert!(partition_readout(q, k).unwrap().completeness_residual().unwrap() <= 1e-12);
        }
    }

    #[test]
    fn tensor_is_associative(a in state(2), b in state(4), c in state(2)) {
        let left = tensor(&tensor(&a, &b).unwrap(), &c).unwrap();
        let right = tensor(&a, &tensor(&b, &c).unwrap()).unwrap();
        for (x, y) in left.amplitudes().unwrap().iter().zip(right.amplitudes().unwrap()) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn fidelity_one_iff_zero_trace_distance(a in state(4), b in state(4), phase in 0.0..std::f64::consts::TAU) {
        let rotated = PureState::from_amplitudes(
            a.amplitudes().unwrap().iter().map(|z| z * C64::from_polar(1.0, phase)).collect(),
        ).unwrap();
        for other in [&b, &rotated] {
            let f = fidelity(&a, other).unwrap();
            let t = trace_distance(&a.density().unwrap(), &other.density().unwrap()).unwrap();
            // for pure states T = √(1 − F)
            close(t, (1.0 - f).max(0.0).sqrt(), 1e-7)?;
            prop_assert_eq!((f - 1.0).abs() <= 1e-10, t <= 1e-5);
        }
        close(fidelity(&a, &rotated).unwrap(), 1.0, 1e-10)?;
    }

    #[test]
    fn product_fast_paths_match_dense(seal in tilted_seal(8), b in bits(8), k in 1usize..=8) {
        let n = seal.n();
        let k = k.min(n);
        let scheme = SealScheme::Tilted(seal);
        let msg = Message::Bits(b[..n].to_vec());
        let factored = scheme.encode(&msg).unwrap();
        prop_assert!(factored.qubit_factorization().is_some());
        let dense = PureState::from_amplitudes(factored.amplitudes().unwrap().to_vec()).unwrap();
        prop_assert!(dense.qubit_factorization().is_none());
        let inst = partition_readout(n, k).unwrap();
        let fast = escape_probability(&factored, &inst).unwrap();
        let slow = escape_probability_by_enumeration(&dense, &inst).unwrap();
        close(fast, slow, 1e-10)?;
        let ef = apply_instrument(&inst, &factored).unwrap();
        let ed = apply_instrument(&inst, &dense).unwrap();
        for o in &ef.outcomes {
            close(o.probability, ed.probability_of(o.index), 1e-10)?;
        }
    }

    #[test]
    fn encoded_states_are_normalized_and_factored(seal in tilted_seal(12), b in bits(12)) {
        let n = seal.n();
        let s = SealScheme::Tilted(seal).encode(&Message::Bits(b[..n].to_vec())).unwrap();
        let f = s.qubit_factorization().unwrap();
        let expanded = PureState::product(f.to_vec()).unwrap();
        let n2: f64 = expanded.amplitudes().unwrap().iter().map(|z| z.norm_sqr()).sum();
        close(n2, 1.0, 1e-12)?;
        prop_assert_eq!(s.amplitudes().unwrap(), expanded.amplitudes().unwrap());
    }

    #[test]
    fn single_flip_overlap_is_sin_two_theta(seal in tilted_seal(10), b in bits(10), pos in 0usize..10) {
        let n = seal.n();
        let pos = pos % n;
        let theta = seal.angles()[pos];
        let scheme = SealScheme::Tilted(seal);
        let a = b[..n].to_vec();
        let mut c = a.clone();
        c[pos] = !c[pos];
        let sa = scheme.encode(&Message::Bits(a)).unwrap();
        let sc = scheme.encode(&Message::Bits(c)).unwrap();
        let want = (2.0 * theta).sin().abs();
        close(inner(&sa, &sc).unwrap().norm(), want, 1e-10)?;
        // dense cross-check
        let da = sa.amplitudes().unwrap();
        let dc = sc.amplitudes().unwrap();
        let dense: C64 = da.iter().zip(dc).map(|(x, y)| x.conj() * y).sum();
        close(dense.norm(), want, 1e-10)?;
    }

    #[test]
    fn q_povm_favors_aligned_outcomes(psi in state(8), nu in 0.01..=1.0f64) {
        let ens = apply_instrument(&q_povm(8, nu).unwrap(), &psi).unwrap();
        let amps = psi.amplitudes().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if amps[i].norm_sqr() + 1e-9 < amps[j].norm_sqr() {
                    prop_assert!(ens.probability_of(i) < ens.probability_of(j));
                }
            }
        }
    }

    #[test]
    fn q_povm_escape_non_increasing_in_nu(psi in state(8)) {
        let mut prev = f64::INFINITY;
        for j in 0..=20 {
            let e = escape_probability(&psi, &q_povm(8, j as f64 / 20.0).unwrap()).unwrap();
            prop_assert!((0.0..=1.0 + 1e-10).contains(&e));
            prop_assert!(e <= prev + 1e-12, "escape rose to {} from {}", e, prev);
            prev = e;
        }
    }

    #[test]
    fn partition_leaves_tail_factors_untouched(seal in tilted_seal(10), b in bits(10), k in 1usize..10) {
        let n = seal.n();
        prop_assume!(k < n);
        let scheme = SealScheme::Tilted(seal);
        let s = scheme.encode(&Message::Bits(b[..n].to_vec())).unwrap();
        let before = s.qubit_factorization().unwrap().to_vec();
        for o in apply_instrument(&partition_readout(n, k).unwrap(), &s).unwrap().outcomes {
            let after = o.post_state.qubit_factorization().unwrap();
            prop_assert_eq!(&after[k..], &before[k..]);
        }
    }

    #[test]
    fn escape_is_one_for_undisturbing_instruments(psi in any_state()) {
        let dim = psi.dim().unwrap();
        close(escape_probability(&psi, &q_povm(dim, 0.0).unwrap()).unwrap(), 1.0, 1e-10)?;
        // a basis state is not disturbed by any standard-basis readout
        let basis = PureState::basis(dim, dim - 1).unwrap();
        let q = dim.trailing_zeros() as usize;
        close(escape_probability(&basis, &honest_full_readout(q).unwrap()).unwrap(), 1.0, 1e-10)?;
        let e = escape_probability(&psi, &honest_full_readout(q).unwrap()).unwrap();
        let max_p = psi.amplitudes().unwrap().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        if max_p < 1.0 - 1e-6 {
            prop_assert!(e < 1.0 - 1e-12);
        }
    }

    #[test]
    fn superposition_never_a_mixture(x in 0.05..0.95f64, phase in 0.0..std::f64::consts::TAU, b in 0.05..2.0f64, a in 0.1..2.0f64) {
        let psi = PureState::normalize(vec![
            C64::new(x.sqrt(), 0.0),
            C64::from_polar((1.0 - x).sqrt(), phase),
        ]).unwrap();
        prop_assert!(superposition_vs_mixture_gap(&psi, 0, a, b).unwrap() > 1e-6);
    }

    #[test]
    fn factorized_entropy_matches_dense(seal in tilted_seal(6), k in 1usize..=6) {
        let n = seal.n();
        let scheme = SealScheme::Tilted(seal);
        let inst = partition_readout(n, k.min(n)).unwrap();
        let fast = joint_distribution(&scheme, &inst, None).unwrap();
        prop_assert!(fast.factorized.is_some());
        let dense = oracle_joint_distribution(&scheme, &inst).unwrap();
        let (ef, ed) = (entropies(&fast).unwrap(), oracle_entropies(dense.table.as_deref().unwrap()));
        close(ef.h, ed.h, 1e-10)?;
        close(ef.h_cond, ed.h_cond, 1e-10)?;
        close(ef.mutual_info / ef.h + ef.h_cond / ef.h, 1.0, 1e-10)?;
    }

    #[test]
    fn full_partition_equals_string_probability(seal in tilted_seal(200)) {
        let n = seal.n();
        let scheme = SealScheme::Tilted(seal);
        prop_assert_eq!(partition_correct_prob(&scheme, n).unwrap(), string_correct_prob(&scheme).unwrap());
    }

    #[test]
    fn fourier_states_orthonormal(n_messages in 1usize..=64) {
        let seal = FourierSeal::new(n_messages).unwrap();
        let rows: Vec<_> = (0..n_messages).map(|i| seal.row(i).unwrap()).collect();
        for i in 0..n_messages {
            for k in 0..n_messages {
                let d: C64 = rows[i].iter().zip(&rows[k]).map(|(x, y)| x.conj() * y).sum();
                close(d.norm(), if i == k { 1.0 } else { 0.0 }, 1e-10)?;
            }
        }
    }
}

/// Ramp-angle tilted seal with its qubits relabeled by `perm(n)`.
fn permuted_family(cap: f64, alpha: f64, reverse: bool) -> SealFamily {
    SealFamily::Matrix(Arc::new(move |n| {
        let base = SealFamily::Tilted {
            theta_cap: cap,
            alpha,
            rule: AngleRule::Ramp,
        }
        .instantiate(n)?;
        let mut angles = base.product_angles().unwrap().into_owned();
        if reverse {
            angles.reverse();
        } else {
            angles.rotate_left(1);
        }
        let rows = SealScheme::Tilted(TiltedProductSeal::new(cap, alpha, angles)?).dense_rows()?;
        let d = rows.len();
        MatrixSeal::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classification_ignores_qubit_order(cap in 0.05..0.78f64, alpha in 0.1..1.2f64, reverse in any::<bool>()) {
        let cfg = ClassifierConfig { n_grid: vec![2, 3, 4, 5], ..ClassifierConfig::default() };
        let family = SealFamily::Tilted { theta_cap: cap, alpha, rule: AngleRule::Ramp };
        let a = classify_family(&family, InstrumentRule::FullReadout, &cfg).unwrap();
        let b = classify_family(&permuted_family(cap, alpha, reverse), InstrumentRule::FullReadout, &cfg).unwrap();
        for (x, y) in a.evidence.iter().zip(&b.evidence) {
            close(x.h_cond, y.h_cond, 1e-10)?;
        }
        prop_assert_eq!(a.criterion, b.criterion);
    }
}
