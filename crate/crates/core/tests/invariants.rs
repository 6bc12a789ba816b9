use proptest::prelude::*;
use wcec_lab::compose::{convolve, discretize, GriddedPdf, TransitionKey, TransitionTable};
use wcec_lab::distfit::{
    probabilistic_max, weibull_from_moments, DataSpaceSize, WeibullParams,
};
use wcec_lab::isa_sim::{hamming_distance, hamming_weight, Instruction, MachineState, Opcode, PowerModelParams};
use wcec_lab::rng::seeded;

fn opcode() -> impl Strategy<Value = Opcode> {
    prop::sample::select(Opcode::ALL.to_vec())
}

fn weibull() -> impl Strategy<Value = WeibullParams> {
    (0.6f64..8.0, -100.0f64..100.0, 0.1f64..50.0).prop_map(|(k, mu, s)| WeibullParams::new(k, mu, s).unwrap())
}

fn gridded() -> impl Strategy<Value = GriddedPdf> {
    (-50.0f64..50.0, prop::collection::vec(0.0f64..1.0, 1..200)).prop_filter_map("needs mass", |(origin, mut d)| {
        d[0] += 1e-3;
        GriddedPdf::new(origin, 0.5, d).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_inverts_cdf(p in weibull(), prob in 0.0f64..0.999_999) {
        let x = p.quantile(prob).unwrap();
        prop_assert!((p.cdf(x) - prob).abs() < 1e-12);
        prop_assert!(x >= p.mu);
    }

    #[test]
    fn cdf_is_monotone(p in weibull(), a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(p.cdf(p.mu + lo * p.sigma) <= p.cdf(p.mu + hi * p.sigma));
    }

    #[test]
    fn bound_grows_with_data_space(p in weibull(), n in 1u64..100_000) {
        let small = probabilistic_max(&p, DataSpaceSize::from_bits(n).unwrap());
        let large = probabilistic_max(&p, DataSpaceSize::from_bits(n + 1).unwrap());
        prop_assert!(large > small);
        prop_assert!(small > p.mu);
    }

    #[test]
    fn moments_round_trip(p in weibull()) {
        let q = weibull_from_moments(p.mean(), p.variance(), p.skewness()).unwrap();
        prop_assert!((q.k / p.k - 1.0).abs() < 1e-6);
        prop_assert!((q.mean() - p.mean()).abs() < 1e-6 * (1.0 + p.mean().abs()));
        prop_assert!((q.variance() / p.variance() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn convolution_keeps_mass_and_adds_moments(a in gridded(), b in gridded()) {
        let c = convolve(&a, &b);
        prop_assert!((c.total_mass() - 1.0).abs() < 1e-9);
        prop_assert!((c.mean() - (a.mean() + b.mean())).abs() < 1e-6);
        // Each bin's uniform spread adds step^2/12 once per operand but only once to the result.
        let expected_var = a.variance() + b.variance() - a.step() * a.step() / 12.0;
        prop_assert!((c.variance() - expected_var).abs() < 1e-6 * (1.0 + expected_var));
    }

    #[test]
    fn convolution_commutes(a in gridded(), b in gridded()) {
        let ab = convolve(&a, &b);
        let ba = convolve(&b, &a);
        prop_assert!((ab.origin() - ba.origin()).abs() < 1e-12);
        prop_assert_eq!(ab.len(), ba.len());
        for (x, y) in ab.densities().iter().zip(ba.densities()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn discretized_mean_tracks_continuous(p in weibull()) {
        let g = discretize(&p, p.sigma / 100.0).unwrap();
        prop_assert!((g.mean() - p.mean()).abs() < 1e-3 * p.sigma);
    }

    #[test]
    fn transition_key_is_unordered(a in opcode(), b in opcode()) {
        prop_assert_eq!(TransitionKey::new(a, b), TransitionKey::new(b, a));
        let mut t = TransitionTable::new();
        t.insert(a, b, WeibullParams::new(2.0, 1.0, 1.0).unwrap(), 10);
        prop_assert!(t.get(b, a).is_some());
        let back = TransitionTable::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn step_energy_is_bounded(op in opcode(), d in 2u8..30, s in 2u8..30, seed in any::<u64>()) {
        let p = PowerModelParams::default();
        let mut st = MachineState::randomized(&mut seeded(seed, 0));
        let (a, b, bus) = (st.regs[d as usize], st.regs[s as usize], st.prev_bus);
        let e = st.step(&Instruction::rr(op, d, s), &p);
        let base = p.base.get(op);
        prop_assert!(e >= base);
        if op != Opcode::Nop {
            let data = p.alpha * f64::from(hamming_weight(a.into()) + hamming_weight(b.into()))
                + p.beta * f64::from(hamming_distance(bus, st.prev_bus));
            let pp_max = if op == Opcode::Mul { 64.0 * p.gamma } else { 0.0 };
            prop_assert!(e - base >= data - 1e-9);
            prop_assert!(e - base <= data + pp_max + 1e-9);
        }
    }
}
