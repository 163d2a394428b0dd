//! Enumerate a few finite Coxeter groups and print their orders, reflection
//! counts and longest elements.

use multinv::coxeter::{enumerate_group, CDDiagram};

fn main() -> multinv::Result<()> {
    for spec in ["A3", "B3", "D4", "I5", "H3", "A1+A2"] {
        let d = CDDiagram::parse(spec)?;
        let g = enumerate_group(&d)?;
        let longest = (0..g.order()).map(|x| g.length(x)).max().unwrap_or(0);
        println!(
            "{spec:>6}: order {:>4}, rank {}, {:>2} reflections, longest word {longest}",
            g.order(),
            g.rank(),
            g.reflections().len()
        );
    }
    Ok(())
}
