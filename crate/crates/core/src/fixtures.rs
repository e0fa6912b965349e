//! Weighted Satake diagrams for the catalog rows, shipped with the crate.

/// `(name, json)` pairs; `name` is the file stem under `data/fixtures/`.
pub static FIXTURES: &[(&str, &str)] = &[
    ("table1_row1", include_str!("../data/fixtures/table1_row1.json")),
    ("table1_row10", include_str!("../data/fixtures/table1_row10.json")),
    ("table1_row10_m4", include_str!("../data/fixtures/table1_row10_m4.json")),
    ("table1_row10_m5", include_str!("../data/fixtures/table1_row10_m5.json")),
    ("table1_row10_m6", include_str!("../data/fixtures/table1_row10_m6.json")),
    ("table1_row11", include_str!("../data/fixtures/table1_row11.json")),
    ("table1_row11_n3", include_str!("../data/fixtures/table1_row11_n3.json")),
    ("table1_row11_n4", include_str!("../data/fixtures/table1_row11_n4.json")),
    ("table1_row11_n5", include_str!("../data/fixtures/table1_row11_n5.json")),
    ("table1_row12", include_str!("../data/fixtures/table1_row12.json")),
    ("table1_row12_n3", include_str!("../data/fixtures/table1_row12_n3.json")),
    ("table1_row12_n4", include_str!("../data/fixtures/table1_row12_n4.json")),
    ("table1_row12_n5", include_str!("../data/fixtures/table1_row12_n5.json")),
    ("table1_row13", include_str!("../data/fixtures/table1_row13.json")),
    ("table1_row1_delta1_k0", include_str!("../data/fixtures/table1_row1_delta1_k0.json")),
    ("table1_row1_delta1_k1", include_str!("../data/fixtures/table1_row1_delta1_k1.json")),
    ("table1_row1_delta1_k2", include_str!("../data/fixtures/table1_row1_delta1_k2.json")),
    ("table1_row1_delta2_k0", include_str!("../data/fixtures/table1_row1_delta2_k0.json")),
    ("table1_row1_delta2_k1", include_str!("../data/fixtures/table1_row1_delta2_k1.json")),
    ("table1_row1_delta2_k2", include_str!("../data/fixtures/table1_row1_delta2_k2.json")),
    ("table1_row2", include_str!("../data/fixtures/table1_row2.json")),
    ("table1_row2_n2", include_str!("../data/fixtures/table1_row2_n2.json")),
    ("table1_row2_n3", include_str!("../data/fixtures/table1_row2_n3.json")),
    ("table1_row2_n4", include_str!("../data/fixtures/table1_row2_n4.json")),
    ("table1_row3", include_str!("../data/fixtures/table1_row3.json")),
    ("table1_row3_m3", include_str!("../data/fixtures/table1_row3_m3.json")),
    ("table1_row3_m4", include_str!("../data/fixtures/table1_row3_m4.json")),
    ("table1_row4", include_str!("../data/fixtures/table1_row4.json")),
    ("table1_row4_m3", include_str!("../data/fixtures/table1_row4_m3.json")),
    ("table1_row4_m4", include_str!("../data/fixtures/table1_row4_m4.json")),
    ("table1_row5", include_str!("../data/fixtures/table1_row5.json")),
    ("table1_row6", include_str!("../data/fixtures/table1_row6.json")),
    ("table1_row6_n2", include_str!("../data/fixtures/table1_row6_n2.json")),
    ("table1_row6_n3", include_str!("../data/fixtures/table1_row6_n3.json")),
    ("table1_row6_n4", include_str!("../data/fixtures/table1_row6_n4.json")),
    ("table1_row7", include_str!("../data/fixtures/table1_row7.json")),
    ("table1_row7_k1", include_str!("../data/fixtures/table1_row7_k1.json")),
    ("table1_row7_k2", include_str!("../data/fixtures/table1_row7_k2.json")),
    ("table1_row7_k3", include_str!("../data/fixtures/table1_row7_k3.json")),
    ("table1_row8", include_str!("../data/fixtures/table1_row8.json")),
    ("table1_row8_m4", include_str!("../data/fixtures/table1_row8_m4.json")),
    ("table1_row8_m5", include_str!("../data/fixtures/table1_row8_m5.json")),
    ("table1_row8_m6", include_str!("../data/fixtures/table1_row8_m6.json")),
    ("table1_row9", include_str!("../data/fixtures/table1_row9.json")),
    ("table1_row9_m4", include_str!("../data/fixtures/table1_row9_m4.json")),
    ("table1_row9_m5", include_str!("../data/fixtures/table1_row9_m5.json")),
    ("table1_row9_m6", include_str!("../data/fixtures/table1_row9_m6.json")),
];

/// Looks up a fixture by stem, with or without `.json`.
pub fn fixture(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    FIXTURES.iter().find(|(n, _)| *n == stem).map(|(_, t)| *t)
}
