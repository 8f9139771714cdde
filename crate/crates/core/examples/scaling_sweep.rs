//! Size sweep as CSV, plus shots-vs-accuracy at the largest simulated size.
//!
//!     cargo run --release --example scaling_sweep

use frqi::builder::BuilderVariant;
use frqi::experiment::{
    cmd_sweep_shots, cmd_sweep_size, shots_to_csv, sizes_to_csv, ExperimentConfig, ImageSource, Shots,
};

fn main() -> Result<(), frqi::Error> {
    let source = ImageSource::Random { seed: 1 };
    let cfg = ExperimentConfig {
        shots: Shots::Sampled(8192),
        record_timing: false,
        ..Default::default()
    };
    let rows = cmd_sweep_size(&cfg, 1..=4, &BuilderVariant::ALL, &source, false)?;
    print!("{}", sizes_to_csv(&rows));

    // construction only: how far each builder goes
    let rows = cmd_sweep_size(&cfg, 5..=9, &BuilderVariant::ALL, &source, true)?;
    print!("\n{}", sizes_to_csv(&rows));

    let img = source.image(3)?;
    let rows = cmd_sweep_shots(&cfg, &img, &[1024, 8192, 65536], 3)?;
    print!("\n{}", shots_to_csv(&rows));
    Ok(())
}
