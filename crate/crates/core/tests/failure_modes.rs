use softbayes_core::comparators::{best_fixed_mixture, SOLVER_MAX_ITER, SOLVER_TOLERANCE};
use softbayes_core::generators::{gen_ogd_flip, gen_random_mixture, gen_theorem2, gen_theorem2_constant};
use softbayes_core::learners::{
    default_meta_rates, eg_step, EgState, ExponentiatedGradient, Learner, MetaBayes, OnlineGradientDescent, SoftBayes,
};
use softbayes_core::rates::ScheduleConfig;
use softbayes_core::trace::{run_learner, DivergencePolicy};
use softbayes_core::SimplexVector;

#[test]
fn eg_starves_the_idle_expert() {
    let stream = gen_theorem2_constant(50).unwrap();
    let mut state = EgState::new(&SimplexVector::uniform(2));
    for r in stream.rounds() {
        eg_step(&mut state, r, 0.5).unwrap();
    }
    // 50 rounds at η = 0.5: ln w^a_51 <= -25.
    assert!(state.log_weights()[0] <= -25.0);
    assert!(state.weights()[0] <= 1.4e-11);
}

#[test]
fn eg_pays_for_the_first_flip() {
    let stream = gen_theorem2(100).unwrap();
    let mut eg = ExponentiatedGradient::new(0.5, &SimplexVector::uniform(2)).unwrap();
    let trace = run_learner(&mut eg, &stream, DivergencePolicy::Continue, 1).unwrap();
    // Round 52 is the first round on which the starved expert is right.
    let loss52 = trace.rows[51].loss.value();
    assert!(loss52 >= 12.5, "round 52 loss {loss52}");
}

#[test]
fn soft_bayes_survives_the_flip() {
    let stream = gen_theorem2(100).unwrap();
    let mut sb = SoftBayes::uniform(ScheduleConfig::Anytime, 2).unwrap();
    let trace = run_learner(&mut sb, &stream, DivergencePolicy::Halt, 1).unwrap();
    assert!(!trace.diverged());
    let best = best_fixed_mixture(&stream, SOLVER_TOLERANCE, SOLVER_MAX_ITER).unwrap();
    assert!(trace.ledger.total() - best.loss < 40.0);
}

#[test]
fn ogd_diverges_after_the_flip() {
    let stream = gen_ogd_flip(10).unwrap();
    let mut ogd = OnlineGradientDescent::new(0.5, SimplexVector::uniform(2)).unwrap();
    let trace = run_learner(&mut ogd, &stream, DivergencePolicy::Halt, 1).unwrap();
    assert!(trace.diverged());
    assert_eq!(trace.rows.len(), 11);
    assert_eq!(trace.ledger.total(), f64::INFINITY);
    // w^b reaches one within 3 rounds.
    assert_eq!(trace.rows[2].weights.as_deref(), Some(&[0.0, 1.0][..]));
}

#[test]
fn meta_mixture_tracks_best_rate() {
    let stream = gen_random_mixture(4, 400, 3, 11).unwrap();
    let rates = default_meta_rates(stream.horizon());
    let mut meta = MetaBayes::new(&rates, SimplexVector::uniform(4)).unwrap();
    let meta_loss = run_learner(&mut meta, &stream, DivergencePolicy::Halt, 1).unwrap().ledger.total();
    let best_sub = rates
        .iter()
        .map(|&eta| {
            let mut sb = SoftBayes::uniform(ScheduleConfig::Fixed(eta), 4).unwrap();
            run_learner(&mut sb, &stream, DivergencePolicy::Halt, 1).unwrap().ledger.total()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(meta_loss <= best_sub + (rates.len() as f64).ln() + 1e-9);
    let w: f64 = meta.weights().iter().sum();
    assert!((w - 1.0).abs() < 1e-12);
}
