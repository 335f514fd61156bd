#![no_main]

use libfuzzer_sys::fuzz_target;
use lowtw_core::graph::{parse_graph, Format};
use lowtw_core::treedec::{validate, TreeDecomposition};

// Input: a graph in any supported format, a line `%%`, then a
// decomposition in bag-line text.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (graph, bags) = text.split_once("\n%%\n").unwrap_or(("", text));
    let Ok(g) = parse_graph(graph, Format::sniff(graph)) else { return };
    let Ok(t) = TreeDecomposition::from_text(bags, g.labels()) else { return };
    let _ = validate(&t, &g);
    let written = t.to_text(g.labels());
    let back = TreeDecomposition::from_text(&written, g.labels()).expect("written decomposition parses");
    assert_eq!(back.to_text(g.labels()), written);
});
