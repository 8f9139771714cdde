//! Encode a 2x2 image, read back the exact state, decode it.
//!
//!     cargo run --example encode_decode

use frqi::builder::build_mary_circuit;
use frqi::image::{gray_to_angles, probs_to_image, relative_difference, DecodeVariant, EncodingMode, Image};
use frqi::sim::{exact_probabilities, SimConfig};

fn main() -> Result<(), frqi::Error> {
    let img = Image::new(2, vec![10, 85, 170, 255])?;
    for mode in [EncodingMode::Linear, EncodingMode::Arcsin] {
        let angles = gray_to_angles(&img, mode);
        let circuit = build_mary_circuit(&angles)?;
        let dist = exact_probabilities(&circuit, &SimConfig::default())?;

        println!("{mode}: angles {:.4?}", angles.thetas());
        // index j + c·4: position j, gray qubit c
        for (k, p) in dist.probs().iter().enumerate() {
            println!("  |c={} j={}>  {p:.6}", k >> 2, k & 3);
        }
        for decode in [DecodeVariant::Ratio, DecodeVariant::Scaled] {
            let out = probs_to_image(dist.probs(), 1, mode, decode)?;
            println!(
                "  {decode}: {:?} (diff {:.3}%)",
                out.image.pixels(),
                relative_difference(&img, &out.image)?
            );
        }
    }
    Ok(())
}
