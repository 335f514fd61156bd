#![no_main]

use libfuzzer_sys::fuzz_target;
use lowtw_core::graph::{parse_graph, Format};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(g) = parse_graph(text, Format::Dimacs) else { return };
    // Whatever parses must survive its own writer.
    let again = parse_graph(&g.to_dimacs(), Format::Dimacs).expect("written graph parses");
    assert_eq!(again.node_count(), g.node_count());
    assert_eq!(again.edges(), g.edges());
});
