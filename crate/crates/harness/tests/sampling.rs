use modgate_core::xpm::{xpm_outcome, CoherentTruncation, PostselectionFamily};
use modgate_core::{principal_angle, PhaseAbsorbParams};
use modgate_harness::sample::{analytic_angles, run_sample, Basis, SampleConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Statistical: expected failures per seed are ~6e-5 at 4 standard errors.
#[test]
fn p_hat_converges_across_seeds() {
    let params = PhaseAbsorbParams::new(0.2, 0.1).unwrap();
    let fam = PostselectionFamily::epsilon(0.6).unwrap();
    let out = xpm_outcome(&params, &fam, &CoherentTruncation::from_polar(0.3, 0.4).unwrap());
    let p = out.success_probability;
    assert!(p > 0.2 && p < 0.5, "{p}");
    let within = (0..100)
        .filter(|&seed| {
            let est = run_sample(&out, &SampleConfig::new(10_000, seed, &[]).unwrap());
            (est.p_hat - p).abs() / est.p_stderr <= 4.0
        })
        .count();
    assert!(within >= 99, "{within} of 100");
}

/// Statistical: 40 comparisons at 3 standard errors.
#[test]
fn tomography_matches_analytic_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..20 {
        let params = PhaseAbsorbParams::new(rng.random_range(-0.5..0.5), rng.random_range(0.0..0.3)).unwrap();
        let fam = PostselectionFamily::epsilon(rng.random_range(0.3..0.7)).unwrap();
        let alpha = CoherentTruncation::from_polar(rng.random_range(0.1..0.3), rng.random_range(-3.0..3.0)).unwrap();
        let out = xpm_outcome(&params, &fam, &alpha);
        let est = run_sample(&out, &SampleConfig::new(1_000_000, 500 + k, &Basis::ALL).unwrap());
        let t = est.tomography.unwrap();
        let (theta_f, phase) = analytic_angles(alpha.prep(), &out).unwrap();
        let z_theta = (t.theta_f_hat.unwrap() - theta_f).abs() / t.theta_f_stderr.unwrap();
        let z_phase = principal_angle(t.phase_hat.unwrap() - phase).abs() / t.phase_stderr.unwrap();
        assert!(
            z_theta <= 3.0 && z_phase <= 3.0,
            "instance {k}: z_theta {z_theta}, z_phase {z_phase}"
        );
    }
}

#[test]
fn substreams_are_independent_and_reproducible() {
    let params = PhaseAbsorbParams::new(0.1, 0.05).unwrap();
    let fam = PostselectionFamily::delta(0.5).unwrap();
    let out = xpm_outcome(&params, &fam, &CoherentTruncation::from_polar(0.2, 0.0).unwrap());
    let base = SampleConfig::new(100_000, 7, &Basis::ALL).unwrap();
    let runs: Vec<_> = (0..8).map(|s| run_sample(&out, &base.clone().with_stream(s))).collect();
    for (s, r) in runs.iter().enumerate() {
        assert_eq!(*r, run_sample(&out, &base.clone().with_stream(s as u64)));
    }
    let distinct: std::collections::HashSet<u64> = runs.iter().map(|r| r.successes).collect();
    assert!(distinct.len() >= 6);
}
