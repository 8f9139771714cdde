//! Ancilla layouts for large images, and the cost of one pixel at 8192x8192.
//!
//!     cargo run --release --example large_layout

use frqi::builder::{estimate, mary_single_pixel_circuit, AddressingStyle, BuilderVariant, LayoutPlan, MAX_LAYOUT_N};
use frqi::circuit::GateClass;
use frqi::transpile::lower_stats;

fn main() -> Result<(), frqi::Error> {
    println!(" n  qubits  ancillas  MARY arity  groups            est. basis gates");
    for n in 1..=MAX_LAYOUT_N {
        let plan = LayoutPlan::for_n(n)?;
        let est = estimate(BuilderVariant::Mary, n, AddressingStyle::TransitionMask)?;
        let groups: Vec<usize> = plan.groups.iter().map(Vec::len).collect();
        println!(
            "{n:>2} {:>7} {:>9} {:>11}  {:<17} {:>16}",
            plan.num_qubits(),
            plan.num_ancilla,
            plan.mary_arity,
            format!("{groups:?}"),
            est.lowered_gates
        );
    }

    // one pixel of a 2^13-sided image: ~10^3 gates where the full circuit needs ~10^11
    let plan = LayoutPlan::for_n(13)?;
    let index = 0x2A5_5A5;
    let c = mary_single_pixel_circuit(&plan, index, 0.9)?;
    let s = lower_stats(&c);
    println!(
        "\nn=13 pixel {index}: {} qubits, {} basis gates ({} CX)",
        c.num_qubits(),
        s.total(),
        s.count(GateClass::CX)
    );
    Ok(())
}
