//! Why conditioning is needed: a mixture of a layout and its mirror image is
//! a perfectly valid relaxation optimizer whose per-variable means are all
//! wrong, and pinning a single variable collapses it.

use std::collections::BTreeMap;
use std::sync::Arc;

use samds::net::EpsNet;
use samds::rounding::round_pd;
use samds::sa::{PseudoDistribution, SubsetFamily};

fn main() -> samds::Result<()> {
    let delta = 5.0;
    let net = Arc::new(EpsNet::from_points(
        1,
        1.0,
        vec![vec![-delta], vec![delta]],
    )?);
    let family = SubsetFamily::full(6, 2)?;
    let labeling = vec![0usize, 0, 0, 1, 1, 1];
    let mirror: Vec<usize> = labeling.iter().map(|&v| 1 - v).collect();
    let pd = PseudoDistribution::mixture(Arc::clone(&net), family, &[labeling, mirror]);

    println!("uniform mixture of a two-cluster layout and its mirror:");
    for i in 0..6 {
        println!(
            "  x_{i}: pE = {:?}, pdev = {}",
            pd.pe_position(i)?,
            pd.pdev(i)?
        );
    }
    let naive = round_pd(&pd)?;
    println!("rounding without conditioning puts every point at {:?}", naive.points[0]);

    let mut zeta = BTreeMap::new();
    zeta.insert(0usize, 0usize); // observe x_0 on the left
    let cond = pd.condition(&zeta)?;
    println!("\nafter conditioning on x_0 = -{delta}:");
    for i in 0..6 {
        println!(
            "  x_{i}: pE = {:?}, pdev = {}",
            cond.pe_position(i)?,
            cond.pdev(i)?
        );
    }
    let rounded = round_pd(&cond)?;
    println!("rounded layout: {:?}", rounded.points);
    Ok(())
}
