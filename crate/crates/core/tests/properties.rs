use dirac_pol::oracle::synthetic_spectrum;
use dirac_pol::{shift_report, DipoleEigenMatrix, Spectrum};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identity_and_signs(seed in any::<u64>(), n_pos in 1usize..=30, n_neg in 0usize..=30) {
        let (s, x) = synthetic_spectrum(seed, n_pos, n_neg).unwrap();
        let r = shift_report(&s, &x, 1.0, None).unwrap();
        prop_assert!(r.identity_residual <= r.identity_bound());
        prop_assert!(r.signs_hold());
        prop_assert_eq!(r.per_level_vac.len(), n_neg);
    }

    #[test]
    fn alpha_scales_with_charge_squared(seed in any::<u64>(), q in 0.1f64..5.0) {
        let (s, x) = synthetic_spectrum(seed, 8, 8).unwrap();
        let unit = shift_report(&s, &x, 1.0, None).unwrap();
        let r = shift_report(&s, &x, q, None).unwrap();
        prop_assert_eq!(r.s_qm, unit.s_qm);
        prop_assert!((r.alpha - q * q * unit.alpha).abs() <= 1e-12 * r.alpha.abs().max(1.0));
        prop_assert!((r.alpha_qm - q * q * unit.alpha_qm).abs() <= 1e-12 * r.alpha_qm.abs().max(1.0));
    }

    #[test]
    fn invariant_under_dipole_sign(seed in any::<u64>()) {
        let (s, x) = synthetic_spectrum(seed, 6, 5).unwrap();
        let flipped = DipoleEigenMatrix::new(-x.matrix.clone()).unwrap();
        let a = shift_report(&s, &x, 1.0, None).unwrap();
        let b = shift_report(&s, &flipped, 1.0, None).unwrap();
        prop_assert_eq!(a.s_ht, b.s_ht);
        prop_assert_eq!(a.s_qm, b.s_qm);
    }

    #[test]
    fn input_order_irrelevant(seed in any::<u64>(), shift in 1usize..10) {
        let (s, x) = synthetic_spectrum(seed, 5, 5).unwrap();
        let dim = s.energies.len();
        let perm: Vec<usize> = (0..dim).map(|i| (i + shift) % dim).collect();
        let energies = perm.iter().map(|&i| s.energies[i]).collect();
        let states = nalgebra::DMatrix::from_fn(dim, dim, |r, c| if r == perm[c] { 1.0 } else { 0.0 });
        let shuffled = Spectrum::from_eigenpairs(energies, states, 1e-8).unwrap();
        // The sorted basis is the identity again, so X is unchanged.
        prop_assert_eq!(&shuffled.energies, &s.energies);
        let a = shift_report(&s, &x, 1.0, None).unwrap();
        let b = shift_report(&shuffled, &x, 1.0, None).unwrap();
        prop_assert_eq!(a.s_ht, b.s_ht);
    }
}

#[test]
fn two_level_system() {
    let s = Spectrum::from_eigenpairs(vec![-1.0, 1.0], nalgebra::DMatrix::identity(2, 2), 1e-8).unwrap();
    let x = DipoleEigenMatrix::new(nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    let r = shift_report(&s, &x, 1.0, None).unwrap();
    assert!((r.s_qm - 0.5).abs() <= 1e-14);
    assert_eq!(r.s_one, 0.0);
    assert_eq!(r.s_vac, 0.0);
    assert!((r.s_vac_prime + 0.5).abs() <= 1e-14);
    assert!((r.alpha_qm + 1.0).abs() <= 1e-14);
    assert!((r.alpha_vac_prime - 1.0).abs() <= 1e-14);
    assert!(r.alpha.abs() <= 1e-14);
}
