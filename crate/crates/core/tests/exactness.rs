use proptest::prelude::*;

use kmpp::{
    accel_seed_with, sed, standard_seed_with, AccelConfig, Counters, Dataset, RandomStream, SamplingMode, SeedObserver,
    SkipEvent, StandardConfig,
};

/// Distances that tie in exact arithmetic may differ by an ulp once rounded.
const REL_TOL: f64 = 1e-9;

/// Checks every weight vector against brute force and every skip against
/// the true distance to the new center.
struct Oracle<'a> {
    ds: &'a Dataset,
    weight_mismatches: usize,
    hidden_reassignments: usize,
    skips: usize,
}

impl<'a> Oracle<'a> {
    fn new(ds: &'a Dataset) -> Self {
        Self {
            ds,
            weight_mismatches: 0,
            hidden_reassignments: 0,
            skips: 0,
        }
    }
}

impl SeedObserver for Oracle<'_> {
    fn on_weights(&mut self, centers: &[usize], weights: &[f64]) {
        for (i, x) in self.ds.rows().enumerate() {
            let best = centers
                .iter()
                .map(|&c| sed(x, self.ds.row(c)))
                .fold(f64::INFINITY, f64::min);
            if (weights[i] - best).abs() > REL_TOL * best {
                self.weight_mismatches += 1;
            }
        }
    }

    fn on_skip(&mut self, e: SkipEvent<'_>) {
        let c = self.ds.row(e.new_center);
        for &i in e.points {
            self.skips += 1;
            if sed(self.ds.row(i), c) < e.weights[i] * (1.0 - REL_TOL) {
                self.hidden_reassignments += 1;
            }
        }
    }
}

fn configs() -> Vec<AccelConfig> {
    let strict = |c: AccelConfig| c.with_sampling(SamplingMode::Strict);
    vec![
        strict(AccelConfig::tie()),
        strict(AccelConfig::tie_norm()),
        strict(AccelConfig::tie_norm().with_center_skip(true)),
        strict(AccelConfig::tie().with_center_skip(true)),
    ]
}

fn instance() -> impl Strategy<Value = (Dataset, usize, u64)> {
    (20usize..160, 1usize..6, any::<u64>(), 1u32..4)
        .prop_flat_map(|(n, d, seed, grain)| (Just(n), Just(d), Just(seed), Just(grain), 2usize..=n.min(24)))
        .prop_map(|(n, d, seed, grain, k)| {
            // coarse grids produce duplicate points and distance ties
            let mut rng = RandomStream::new(seed);
            let scale = 10f64.powi(grain as i32);
            let data = (0..n * d)
                .map(|_| (rng.next_uniform() * scale).floor() / 10.0)
                .collect();
            (Dataset::new(d, data).unwrap(), k, seed)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strict_runs_agree_with_standard((ds, k, seed) in instance()) {
        let mut std_counters = Counters::default();
        let mut std_oracle = Oracle::new(&ds);
        let cfg = StandardConfig { sampling: SamplingMode::Strict, trace: false };
        let standard = standard_seed_with(&ds, k, &mut RandomStream::new(seed), cfg, &mut std_counters, &mut std_oracle);
        prop_assert_eq!(std_oracle.weight_mismatches, 0);

        for cfg in configs() {
            let mut counters = Counters::default();
            let mut oracle = Oracle::new(&ds);
            let accel = accel_seed_with(&ds, k, &mut RandomStream::new(seed), &cfg, &mut counters, &mut oracle);
            match (&standard, &accel) {
                (Ok(s), Ok(a)) => prop_assert_eq!(&s.centers, &a.centers, "{:?}", cfg),
                (Err(s), Err(a)) => {
                    prop_assert!(s.is_degenerate() && a.is_degenerate());
                    continue;
                }
                _ => prop_assert!(false, "outcomes differ: {:?} vs {:?}", standard.as_ref().err(), accel.as_ref().err()),
            }
            prop_assert_eq!(oracle.weight_mismatches, 0, "{:?}", cfg);
            prop_assert_eq!(oracle.hidden_reassignments, 0, "{:?}", cfg);

            // per added center: at most one extra visit and one extra
            // distance per existing cluster
            let n = ds.n() as u64;
            let k = k as u64;
            let extra = (k - 1) * (k - 2) / 2;
            prop_assert!(counters.points_examined_update <= std_counters.points_examined_update + extra);
            prop_assert!(counters.distances_computed <= std_counters.distances_computed + extra);
            prop_assert_eq!(counters.norms_computed, if cfg.norm_filter { n } else { 0 });
            prop_assert!(counters.distances_computed >= n - 1);
        }
    }

    #[test]
    fn standard_distance_count_is_closed_form((ds, k, seed) in instance()) {
        let mut counters = Counters::default();
        let cfg = StandardConfig { sampling: SamplingMode::Fast, trace: false };
        if standard_seed_with(&ds, k, &mut RandomStream::new(seed), cfg, &mut counters, &mut kmpp::NoObserver).is_ok() {
            let n = ds.n() as u64;
            let expected: u64 = (1..k as u64).map(|t| n - t).sum();
            prop_assert_eq!(counters.distances_computed, expected);
            prop_assert_eq!(counters.points_examined_update, expected);
        }
    }
}

#[test]
fn fast_mode_skips_are_sound_on_clustered_data() {
    let mut rng = RandomStream::new(5);
    let (n, d) = (3000, 3);
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        let blob = (i % 20) as f64;
        for j in 0..d {
            data.push(blob * 7.0 * (j as f64 + 1.0) + rng.next_uniform());
        }
    }
    let ds = Dataset::new(d, data).unwrap();
    for cfg in [
        AccelConfig::tie(),
        AccelConfig::tie_norm(),
        AccelConfig::tie_norm().with_center_skip(true),
    ] {
        let mut oracle = Oracle::new(&ds);
        accel_seed_with(
            &ds,
            64,
            &mut RandomStream::new(9),
            &cfg,
            &mut Counters::default(),
            &mut oracle,
        )
        .unwrap();
        assert_eq!(oracle.weight_mismatches, 0);
        assert_eq!(oracle.hidden_reassignments, 0);
        assert!(oracle.skips > 10_000, "only {} skips", oracle.skips);
    }
}
