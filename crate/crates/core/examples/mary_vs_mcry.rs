//! Gate costs of the two constructions, before and after lowering to
//! {X, SX, Rz, CX}.
//!
//!     cargo run --release --example mary_vs_mcry

use frqi::builder::{build_circuit, mary_cx_count, BuildOptions, BuilderVariant};
use frqi::circuit::{GateClass, MARY_ARITIES};
use frqi::image::AngleVector;
use frqi::transpile::lower_stats;

fn main() -> Result<(), frqi::Error> {
    println!("single gate: arity -> CX after lowering");
    for a in MARY_ARITIES {
        println!("  MARY{a:<2} {:>3}", mary_cx_count(a).expect("supported arity"));
    }

    println!("\n n  variant  qubits      depth        CX     total");
    for n in 1..=5 {
        let angles = AngleVector::new(n, (0..1 << (2 * n)).map(|i| 0.1 + (i % 7) as f64 * 0.2).collect())?;
        for variant in BuilderVariant::ALL {
            let c = build_circuit(variant, &angles, &BuildOptions::default())?;
            let s = lower_stats(&c);
            println!(
                "{n:>2}  {variant:<7} {:>7} {:>10} {:>9} {:>9}",
                c.num_qubits(),
                s.depth(),
                s.count(GateClass::CX),
                s.total()
            );
        }
    }
    Ok(())
}
