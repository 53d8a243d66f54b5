use proptest::prelude::*;
use rand::Rng;

use stablesv::experiment::rng_from_seed;
use stablesv::filters::resample::resample_indices;
use stablesv::filters::weights::{ess, normalize, weighted_mean};
use stablesv::filters::{
    abc_apf_run, abc_apf_run_with, abc_apf_step, kalman_run, resample, FilterConfig, LinearGaussian, ParticleCloud,
    ResampleScheme,
};
use stablesv::proposals::{Lookahead, ProposalKind, ProposalSpec, TProposal};
use stablesv::svm::{simulate_seeded, StateSpaceModel, SvmParams};
use stablesv::Result;

struct Constant(f64);

impl Lookahead for Constant {
    fn log_phat(&self, _y: f64, _xi: f64) -> Result<f64> {
        Ok(self.0)
    }
}

struct Scaled<L> {
    inner: L,
    log_c: f64,
}

impl<L: Lookahead> Lookahead for Scaled<L> {
    fn log_phat(&self, y: f64, xi: f64) -> Result<f64> {
        Ok(self.inner.log_phat(y, xi)? + self.log_c)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalized_weights_sum_to_one(raw in prop::collection::vec(-800.0f64..50.0, 1..300)) {
        let mut w = raw;
        normalize(&mut w).unwrap();
        let total: f64 = w.iter().map(|x| x.exp()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|x| x.exp() >= 0.0));
        let e = ess(&w);
        prop_assert!(e >= 1.0 && e <= w.len() as f64);
    }

    #[test]
    fn ess_is_n_exactly_for_uniform(n in 1usize..500, level in -50.0f64..50.0) {
        let w = vec![level; n];
        prop_assert!((ess(&w) - n as f64).abs() < 1e-9 * n as f64);
    }

    #[test]
    fn resampling_preserves_size(raw in prop::collection::vec(-5.0f64..5.0, 2..200), seed in any::<u64>()) {
        let mut lw = raw;
        normalize(&mut lw).unwrap();
        let cloud = ParticleCloud { states: (0..lw.len()).map(|i| i as f64).collect(), log_weights: lw, t: 3 };
        for scheme in [ResampleScheme::Multinomial, ResampleScheme::Systematic] {
            let (out, anc) = resample(&cloud, scheme, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(out.len(), cloud.len());
            prop_assert_eq!(anc.len(), cloud.len());
            prop_assert!((out.weight_sum() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn ess_below_n_for_uneven_weights() {
    let mut w = vec![0.0, 0.0, 0.0, 1e-3];
    normalize(&mut w).unwrap();
    assert!(ess(&w) < 4.0);
}

#[test]
fn resampled_mean_is_unbiased_over_many_repetitions() {
    let states: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
    let mut lw: Vec<f64> = (0..50).map(|i| -0.1 * i as f64).collect();
    normalize(&mut lw).unwrap();
    let target = weighted_mean(&states, &lw);
    let cloud = ParticleCloud {
        states,
        log_weights: lw,
        t: 0,
    };
    for scheme in [ResampleScheme::Multinomial, ResampleScheme::Systematic] {
        let mut rng = rng_from_seed(77);
        let reps = 10_000;
        let means: Vec<f64> = (0..reps)
            .map(|_| resample(&cloud, scheme, &mut rng).unwrap().0.mean())
            .collect();
        let m = means.iter().sum::<f64>() / reps as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!((m - target).abs() < 4.0 * se, "{scheme:?}: {m} vs {target} (se {se})");
    }
}

#[test]
fn constant_lookahead_reduces_to_bootstrap_step() {
    let model = SvmParams::reference();
    let config = FilterConfig::apf(400, 0.25, ProposalKind::ShiftedT).unwrap();
    let y = 0.07;
    let mut init = rng_from_seed(1);
    let states: Vec<f64> = (0..400).map(|_| model.initial_sample(&mut init)).collect();

    let mut cloud = ParticleCloud::uniform(states.clone(), 0);
    let diag = abc_apf_step(&mut cloud, y, &model, &Constant(-3.5), &config, &mut rng_from_seed(2)).unwrap();

    // bootstrap ABC step on the same stream
    let mut rng = rng_from_seed(2);
    let mut ancestors = Vec::new();
    resample_indices(
        &vec![1.0 / 400.0; 400],
        400,
        config.resample_scheme,
        &mut rng,
        &mut ancestors,
    )
    .unwrap();
    assert_eq!(diag.ancestors, ancestors);
    let mut lw = Vec::new();
    let mut xs = Vec::new();
    for &a in &ancestors {
        let x = model.transition_sample(states[a], &mut rng);
        let y_sim = model.observe_sample(x, &mut rng);
        xs.push(x);
        lw.push(config.kernel.log_kernel(y_sim - y));
    }
    normalize(&mut lw).unwrap();
    assert_eq!(cloud.states, xs);
    for (a, b) in cloud.log_weights.iter().zip(&lw) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn lookahead_scale_does_not_change_the_filter() {
    let model = SvmParams::reference();
    let traj = simulate_seeded(&model, 100, 4).unwrap();
    let config = FilterConfig::apf(1000, 0.25, ProposalKind::ShiftedT).unwrap();
    let base = TProposal::new(ProposalSpec::with_default_dof(ProposalKind::ShiftedT));
    let a = abc_apf_run_with(&traj.y, &model, &base, &config, &mut rng_from_seed(5)).unwrap();
    for log_c in [-30.0, 2f64.ln(), 12.5] {
        let scaled = Scaled { inner: base, log_c };
        let b = abc_apf_run_with(&traj.y, &model, &scaled, &config, &mut rng_from_seed(5)).unwrap();
        assert_eq!(a.resample_count, b.resample_count);
        for (x, y) in a.filtered_mean.iter().zip(&b.filtered_mean) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }
}

/// Mean absolute gap to the Kalman means and the particle standard error
/// sqrt(P_t / ESS_t) averaged over time, both averaged over seeds.
fn kalman_gap(lg: &LinearGaussian, eps: f64, seeds: u64, horizon: usize) -> (f64, f64) {
    let config = FilterConfig::apf(5000, eps, ProposalKind::ShiftedT).unwrap();
    let mut gap = 0.0;
    let mut noise = 0.0;
    for s in 0..seeds {
        let traj = simulate_seeded(lg, horizon, 1000 + s).unwrap();
        let exact = kalman_run(lg, &traj.y).unwrap();
        let out = abc_apf_run(&traj.y, lg, &config, &mut rng_from_seed(s)).unwrap();
        for t in 0..horizon {
            gap += (out.filtered_mean[t] - exact.means[t]).abs();
            noise += (exact.variances[t] / out.ess_trace[t]).sqrt();
        }
    }
    let scale = (seeds as usize * horizon) as f64;
    (gap / scale, noise / scale)
}

#[test]
fn shrinking_epsilon_tracks_kalman_within_particle_noise() {
    let lg = LinearGaussian::new(0.0, 0.9, 0.5, 0.5).unwrap();
    let gaps: Vec<(f64, f64)> = [0.25, 0.1, 0.05].iter().map(|&e| kalman_gap(&lg, e, 20, 100)).collect();
    for w in gaps.windows(2) {
        let ((prev, _), (next, noise)) = (w[0], w[1]);
        assert!(next <= prev + noise, "{gaps:?}");
    }
    assert!(gaps[2].0 < 0.1, "{gaps:?}");
}

#[test]
fn every_step_ess_stays_in_bounds() {
    let model = SvmParams::reference();
    let traj = simulate_seeded(&model, 80, 6).unwrap();
    let mut rng = rng_from_seed(9);
    for kind in [
        ProposalKind::CentralT,
        ProposalKind::ShiftedT,
        ProposalKind::NoncentralT,
    ] {
        let config = FilterConfig::apf(300 + rng.random_range(0..50), 0.5, kind).unwrap();
        let out = abc_apf_run(&traj.y, &model, &config, &mut rng).unwrap();
        let n = config.n_particles as f64;
        assert!(out.ess_trace.iter().all(|&e| (1.0..=n).contains(&e)));
    }
}
