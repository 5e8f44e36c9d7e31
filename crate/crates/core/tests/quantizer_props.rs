use notchwave_core::projection::{generate_reference, project_notch, ProjectionRequest};
use notchwave_core::quantizer::{full_scale_normalize, quantization_report, quantize, quantize_part, step};
use notchwave_core::{Complex64, StopBand};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn designed(n: usize, seed: u64) -> Vec<Complex64> {
    let bands = vec![StopBand::from_hz(4e6, 5e6, 20e6, 0.0).unwrap(), StopBand::from_hz(8e6, 9e6, 20e6, 0.0).unwrap()];
    let c = project_notch(&ProjectionRequest::seeded(n, seed, bands).unwrap()).unwrap();
    full_scale_normalize(&c).unwrap().0.to_vec()
}

proptest! {
    #[test]
    fn error_is_within_half_a_step(x in -1.0..=1.0f64, bits in 1u32..=16) {
        let q = quantize_part(x, bits);
        prop_assert!((x - q).abs() <= step(bits) / 2.0 * (1.0 + 1e-12));
        prop_assert!((-1.0..=1.0).contains(&q));
        // q sits on a level: (q + 1)/Δ − 1/2 is an integer.
        let k = (q + 1.0) / step(bits) - 0.5;
        prop_assert!((k - k.round()).abs() < 1e-6);
    }

    #[test]
    fn normalization_pins_the_peak(seed in 0u64..500) {
        let c = generate_reference(257, seed).unwrap().scaled(3.7).unwrap();
        let (n, scale) = full_scale_normalize(&c).unwrap();
        let peak = n.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
        prop_assert_eq!(peak, 1.0);
        prop_assert!(scale > 0.0);
        prop_assert!(quantize(&n, 4).is_ok());
    }
}

#[test]
fn error_histogram_is_uniform() {
    let c = designed(100_000, 3);
    for bits in [8, 12] {
        let r = quantization_report(&c, bits, 50).unwrap();
        let total: u64 = r.error_histogram.counts.iter().sum();
        let expected = total as f64 / 50.0;
        let chi2: f64 = r.error_histogram.counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new(49.0).unwrap().cdf(chi2);
        assert!(p > 1e-3, "bits {bits}: chi2 {chi2}, p {p}");
    }
}

#[test]
fn variance_and_energy_follow_the_uniform_model() {
    let n = 100_000;
    let c = designed(n, 4);
    for bits in 6..=16 {
        let r = quantization_report(&c, bits, 50).unwrap();
        for v in [r.est_variance_re, r.est_variance_im] {
            assert!((v / r.theory_variance - 1.0).abs() < 0.05, "bits {bits}: {v} vs {}", r.theory_variance);
        }
        let law = 2.0 * n as f64 * r.theory_variance;
        assert!((r.energy_diff / law - 1.0).abs() < 0.1, "bits {bits}: {} vs {law}", r.energy_diff);
    }
}
