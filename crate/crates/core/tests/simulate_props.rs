use heavytail_ldp::cadlag::TargetSet;
use heavytail_ldp::experiments::{mc_probability, Source};
use heavytail_ldp::levy_model::{LevyModel, TailModel};
use heavytail_ldp::rng::RngStream;
use heavytail_ldp::simulate::{sample_scaled_levy, sample_scaled_rw, subordinated_walk, IncrementModel};

#[test]
fn same_stream_gives_bit_identical_paths() {
    let model = LevyModel::two_sided(TailModel::pareto(1.0, 2.0).unwrap(), TailModel::pareto(0.5, 3.0).unwrap());
    let inc = IncrementModel::symmetric(1.0, 2.0, 2.0).unwrap();
    let s = RngStream::new(42, 9);
    let a = sample_scaled_levy(&model, 200, 1000, &mut s.rng()).unwrap();
    let b = sample_scaled_levy(&model, 200, 1000, &mut s.rng()).unwrap();
    assert_eq!(a.values(), b.values());
    let a = sample_scaled_rw(&inc, 200, &mut s.rng()).unwrap();
    let b = sample_scaled_rw(&inc, 200, &mut s.rng()).unwrap();
    assert_eq!(a.values(), b.values());
    let a = subordinated_walk(&inc, 200, 300, &mut s.rng()).unwrap();
    let b = subordinated_walk(&inc, 200, 300, &mut s.rng()).unwrap();
    assert_eq!(a.values(), b.values());
    let c = sample_scaled_levy(&model, 200, 1000, &mut RngStream::new(42, 10).rng()).unwrap();
    assert_ne!(c.values(), sample_scaled_levy(&model, 200, 1000, &mut s.rng()).unwrap().values());
}

#[test]
fn one_big_jump_sanity() {
    let tail = TailModel::pareto(1.0, 2.0).unwrap();
    let source = Source::Levy(LevyModel::one_sided(tail));
    for (i, (a, n)) in [(1.0, 100u64), (2.0, 100), (1.0, 400), (2.0, 400)].into_iter().enumerate() {
        let set = TargetSet::terminal_above(a, true);
        let p = mc_probability(&source, n, &set, 1_000_000, RngStream::new(77, i as u64)).unwrap();
        let ratio = p.value / (n as f64 * tail.tail(n as f64 * a).unwrap());
        assert!((0.7..=1.4).contains(&ratio), "a = {a}, n = {n}: ratio {ratio}");
    }
}
