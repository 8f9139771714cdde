//! Noisy sampling with and without readout mitigation over a few seeds.
//!
//!     cargo run --release --example noisy_mitigation [p]

use frqi::experiment::{median, run, ExperimentConfig, Mitigation, Shots};
use frqi::image::Image;
use frqi::sim::{exact_calibration, CalibrationOptions, NoiseModel};

fn main() -> Result<(), frqi::Error> {
    let p: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let img = Image::new(2, vec![10, 85, 170, 255])?;

    let cal = exact_calibration(1, &NoiseModel::readout_only(p)?, CalibrationOptions::default())?;
    println!("single-qubit readout channel at p={p}:{:.3}", cal.matrix());

    for (label, p_gate) in [("readout only", 0.0), ("readout + gates", p)] {
        let (mut raw, mut fixed) = (Vec::new(), Vec::new());
        for seed in 0..10 {
            let cfg = ExperimentConfig {
                shots: Shots::Sampled(8192),
                noise: Some(NoiseModel::new(p, p_gate)?),
                mitigation: Mitigation::Own {
                    p_meas: p,
                    p_gate,
                    cal_shots: 8192,
                },
                seed,
                record_timing: false,
                ..Default::default()
            };
            let r = run(&cfg, &img)?;
            fixed.push(r.relative_difference);
            raw.push(r.unmitigated_relative_difference.unwrap_or(f64::NAN));
        }
        println!(
            "{label:<16} median diff: unmitigated {:.2}%  mitigated {:.2}%",
            median(&raw),
            median(&fixed)
        );
    }
    Ok(())
}
