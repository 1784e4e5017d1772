macro_rules! example_test {
    ($module:ident, $file:literal) => {
        #[path = $file]
        mod $module;

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(beta_binomial, "../examples/beta_binomial.rs");
example_test!(kl_ucb_index, "../examples/kl_ucb_index.rs");
example_test!(policy_indices, "../examples/policy_indices.rs");
example_test!(single_trial, "../examples/single_trial.rs");
example_test!(regret_experiment, "../examples/regret_experiment.rs");
example_test!(lower_bound, "../examples/lower_bound.rs");
example_test!(proof_constants, "../examples/proof_constants.rs");
example_test!(tail_estimates, "../examples/tail_estimates.rs");
example_test!(invariant_suites, "../examples/invariant_suites.rs");
example_test!(config_run, "../examples/config_run.rs");
