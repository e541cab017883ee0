use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hrrl::gradcheck::{check_grad_input, check_grad_params, check_mixed, FD_STEP, GRAD_TOL, MIXED_TOL};
use hrrl::FeedForwardNet;

fn arb_case() -> impl Strategy<Value = (Vec<usize>, u64, Vec<f64>)> {
    (prop::collection::vec(1usize..7, 1..4), 2usize..6, 1usize..4, any::<u64>())
        .prop_flat_map(|(hidden, n_in, n_out, seed)| {
            let mut sizes = vec![n_in];
            sizes.extend(hidden);
            sizes.push(n_out);
            let total = n_in * 2 + n_out * 3;
            (Just(sizes), Just(seed), prop::collection::vec(-1.5..1.5f64, total))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivatives_match_finite_differences((sizes, seed, v) in arb_case()) {
        let net = FeedForwardNet::new_random(&sizes, &mut ChaCha8Rng::seed_from_u64(seed));
        let n_in = sizes[0];
        let n_out = *sizes.last().unwrap();
        let (input, rest) = v.split_at(n_in);
        let (direction, rest) = rest.split_at(n_in);
        let (cot, rest) = rest.split_at(n_out);
        let (value_cot, slope_cot) = rest.split_at(n_out);

        prop_assert!(check_grad_params(&net, input, cot, FD_STEP).unwrap() <= GRAD_TOL);
        prop_assert!(check_grad_input(&net, input, FD_STEP).unwrap() <= GRAD_TOL);
        prop_assert!(check_mixed(&net, input, direction, value_cot, slope_cot, FD_STEP).unwrap() <= MIXED_TOL);
    }

    #[test]
    fn directional_slope_is_the_jacobian_product((sizes, seed, v) in arb_case()) {
        let net = FeedForwardNet::new_random(&sizes, &mut ChaCha8Rng::seed_from_u64(seed));
        let n_in = sizes[0];
        let n_out = *sizes.last().unwrap();
        let input = &v[..n_in];
        let direction = &v[n_in..2 * n_in];
        let zeros = vec![0.0; n_out];
        let (y, ydot, _) = net.directional_grad_params(input, direction, &zeros, &zeros).unwrap();
        prop_assert_eq!(y, net.forward(input).unwrap());
        let jac = net.grad_input(input).unwrap();
        for (o, row) in jac.iter().enumerate() {
            let expect: f64 = row.iter().zip(direction).map(|(a, b)| a * b).sum();
            prop_assert!((ydot[o] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }
}
