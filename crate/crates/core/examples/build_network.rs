//! Build K(2,3), open it, and round-trip it through the text grammar.

use seqnet::{build_sequestration, format_network, fully_open_extension, parse_network};

fn main() -> seqnet::Result<()> {
    let base = build_sequestration(2, 3)?;
    let open = fully_open_extension(&base)?;
    let text = format_network(&open);
    print!("{text}");

    let n = open.stoichiometric_matrix();
    println!("stoichiometric matrix ({} species x {} reactions), rank {}:", open.num_species(), open.num_reactions(), n.rank());
    for i in 0..open.num_species() {
        let row: Vec<String> = (0..open.num_reactions()).map(|j| format!("{:>2}", n.column(j)[i])).collect();
        println!("  {}", row.join(" "));
    }

    let parsed = parse_network(&text)?;
    assert_eq!(parsed, open);
    println!("parsed back: tag {:?}", parsed.tag());
    Ok(())
}
