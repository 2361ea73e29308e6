//! Reference values for the five-town network.

use serde_json::json;
use spreadpot::diffusion::{seed_sets_to_json, SeedSet};
use spreadpot::graph::GroupedGraph;

/// `(label, pagerank at alpha 0.8, normalized harmonic)`.
pub const EXPECTED: [(&str, f64, f64); 15] = [
    ("r_t", 0.0770, 0.571429),
    ("r_m", 0.0770, 0.571429),
    ("r_b", 0.0770, 0.571429),
    ("o_t", 0.0547, 0.488095),
    ("o_m", 0.0653, 0.535714),
    ("o_b", 0.0653, 0.535714),
    ("b_t", 0.0653, 0.535714),
    ("b_m", 0.0653, 0.535714),
    ("b_b", 0.0547, 0.488095),
    ("g_t", 0.0660, 0.52381),
    ("g_m", 0.1259, 0.214286),
    ("g_b", 0.0660, 0.52381),
    ("p_t", 0.0469, 0.142857),
    ("p_m", 0.0469, 0.142857),
    ("p_b", 0.0469, 0.142857),
];

pub fn expected_csv() -> String {
    let mut s = String::from("node_label,pagerank,harmonic\n");
    for (l, pr, h) in EXPECTED {
        s.push_str(&format!("{l},{pr},{h}\n"));
    }
    s
}

pub fn town_sets_json(toy: &GroupedGraph) -> String {
    let sets: Vec<SeedSet> = toy
        .groups
        .iter()
        .map(|g| SeedSet {
            id: g.label.clone(),
            members: g.members.clone(),
        })
        .collect();
    format!("{}\n", seed_sets_to_json(&sets, &toy.graph))
}

/// Town-mode experiment over the files written next to it.
pub fn pipeline_config() -> String {
    let cfg = json!({
        "graph": "toy_edges.txt",
        "groups": "toy_groups.csv",
        "sets": "groups",
        "runs": 5000,
        "master_seed": 1,
        "measures": ["pagerank", "harmonic", "degree", "leaderrank"],
        "mc_samples": 100000,
        "top_k": 3
    });
    format!(
        "{}\n",
        serde_json::to_string_pretty(&cfg).expect("serializable")
    )
}
