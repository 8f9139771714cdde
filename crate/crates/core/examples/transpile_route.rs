//! Lower a 2x2 circuit and route it onto a device coupling map.
//!
//!     cargo run --example transpile_route [backend]

use frqi::builder::{build_circuit, BuildOptions, BuilderVariant};
use frqi::circuit::{circuit_to_text, Backend};
use frqi::image::{gray_to_angles, EncodingMode, Image};
use frqi::sim::{exact_probabilities, SimConfig};
use frqi::transpile::{lower, route, Placement};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let backend: Backend = std::env::args().nth(1).as_deref().unwrap_or("ibmq_manila").parse()?;
    let map = backend.coupling_map();
    let img = Image::new(2, vec![10, 85, 170, 255])?;
    let angles = gray_to_angles(&img, EncodingMode::Linear);
    let cfg = SimConfig::default();

    for variant in BuilderVariant::ALL {
        let logical = lower(&build_circuit(variant, &angles, &BuildOptions::default())?);
        let routed = route(&logical, &map, &Placement::Auto)?;
        let (compact, index) = routed.compact();

        let want = exact_probabilities(&logical, &cfg)?;
        let got = routed.logical_distribution(exact_probabilities(&compact, &cfg)?.probs(), &index);
        let err = want
            .probs()
            .iter()
            .zip(&got)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);

        println!(
            "{variant} on {backend}: layout {:?} -> {:?}, {} swaps, {} gates, max prob error {err:.1e}",
            routed.initial_layout,
            routed.final_layout,
            routed.swaps,
            routed.circuit.len()
        );
    }

    let mary = lower(&build_circuit(BuilderVariant::Mary, &angles, &BuildOptions::default())?);
    println!("\nlowered MARY circuit:\n{}", circuit_to_text(&mary));
    Ok(())
}
