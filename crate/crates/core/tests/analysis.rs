use std::fs;

use srgswitch::analyze::*;
use srgswitch::explorer::{explore, ExplorationConfig};
use srgswitch::seeds::{load_appendix_seed, sp_graph, vno_minus_4_3, vo_minus_f2, AppendixSeed};
use srgswitch::switching::SwitchKind;
use srgswitch::{emit_graph6, Graph};

#[test]
fn van_lint_schrijver_geometry() {
    let g = vno_minus_4_3();
    let six = clique_count(&g, 6, false);
    assert!(six >= 81, "{six}");
    let PgVerdict::Found(lines) = detect_partial_geometry(&g, PgOrders { s: 5, t: 5, alpha: 2 }, false, DEFAULT_PACKING_CAP).unwrap()
    else {
        panic!("no geometry")
    };
    assert_eq!(lines.len(), 81);
    assert!(lines.iter().all(|l| l.len() == 6));
    verify_geometry(&g, PgOrders { s: 5, t: 5, alpha: 2 }, &lines).unwrap();
    let p = clique_packing(&g, 6, false, DEFAULT_PACKING_CAP);
    assert!(p.size >= 81 && !p.capped);
}

#[test]
fn seventy_vertex_candidates_are_not_geometries() {
    let dir = tempfile::tempdir().unwrap();
    let seed = load_appendix_seed(AppendixSeed::Sts21Srg70);
    explore(&seed, &ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(2)).unwrap();
    let graphs = read_store(dir.path()).unwrap();
    assert_eq!(graphs.len(), 9);
    for g in &graphs {
        let v = detect_partial_geometry(g, PgOrders { s: 6, t: 6, alpha: 4 }, true, DEFAULT_PACKING_CAP).unwrap();
        assert_eq!(v, PgVerdict::NotFound);
        let p = clique_packing(g, 7, true, DEFAULT_PACKING_CAP);
        assert!(p.size < 70, "{}", p.size);
    }
}

#[test]
fn sp62_depth_two_histogram() {
    let dir = tempfile::tempdir().unwrap();
    explore(&sp_graph(3, 2).unwrap(), &ExplorationConfig::new(SwitchKind::Gm4, dir.path()).depth(2)).unwrap();
    let graphs = read_store(dir.path()).unwrap();
    let h = aut_histogram(&graphs);
    assert_eq!(h.values().sum::<u64>(), 55);
    assert_eq!(h.get(&1451520u32.into()), Some(&1));
    let first_two = aut_histogram(&graphs[..3]);
    assert_eq!(first_two.values().sum::<u64>(), 3);
    assert_eq!(first_two.get(&1451520u32.into()), Some(&1));
}

#[test]
fn vo_minus_is_a_ramsey_witness() {
    let v = ramsey_witness_check(&vo_minus_f2(6).unwrap(), 5, 7).unwrap();
    assert!(v.is_witness());
    let v = ramsey_witness_check(&Graph::complete(5), 5, 3).unwrap();
    assert!(v.graph_hit.is_none());
}

#[test]
fn unreadable_store_line_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.g6");
    let k4 = String::from_utf8(emit_graph6(&Graph::complete(4))).unwrap();
    fs::write(&path, format!("{k4}\n{k4}\nnot graph6\n")).unwrap();
    let err = read_store(&path).unwrap_err().to_string();
    assert!(err.contains("store.g6:3"), "{err}");
    fs::write(&path, format!("{k4}\n")).unwrap();
    let census = clique_census(&read_store(&path).unwrap(), 3, false);
    assert_eq!(histogram_csv(&census), "value,count\n4,1\n");
}
