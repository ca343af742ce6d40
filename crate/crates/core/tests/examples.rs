// Each example exposes `run_example`; the slower batch examples are left out.

macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(certificate_synthesis, certificate_synthesis_runs, "certificate_synthesis.rs");
example!(heat_decay, heat_decay_runs, "heat_decay.rs");
example!(fading_memory, fading_memory_runs, "fading_memory.rs");
example!(robin_nonlocal, robin_nonlocal_runs, "robin_nonlocal.rs");
example!(kirchhoff_transform, kirchhoff_transform_runs, "kirchhoff_transform.rs");
example!(lemma_oracles, lemma_oracles_runs, "lemma_oracles.rs");
example!(zeta_sweep, zeta_sweep_runs, "zeta_sweep.rs");
example!(scenario_file, scenario_file_runs, "scenario_file.rs");
