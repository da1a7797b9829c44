//! File formats, workspace checkpoints and CLI exit codes.

mod common;

use std::fs;
use std::sync::Arc;

use fusionbp::bimodule::Catalog;
use fusionbp::fusionring::builtin::builtin_ring;
use fusionbp::io::{parse_map, parse_modules, parse_ring, render_map, render_modules, render_ring, IoError};
use fusionbp::multcompat::{multiplication_maps, ProductTable};
use fusionbp::nimrep::Side;
use fusionbp::workspace::{Stage, Workspace, WorkspaceError, AH_RINGS};

#[test]
fn fixture_round_trips() {
    let n = common::round_trips(common::ah()).unwrap();
    assert!(n > 400);
}

#[test]
fn map_round_trip() {
    let z3 = Arc::new(builtin_ring("Z3").unwrap());
    let cat = Catalog::build(&[z3]);
    let bs = cat.bimodules("Z3", "Z3");
    let mut seen = 0;
    for k in bs {
        for l in bs {
            for m in bs {
                for v in multiplication_maps(k, l, m) {
                    let text = render_map("K", "L", "M", &v);
                    let (a, b, c, back) = parse_map(&text, v.l, v.m, v.n).unwrap();
                    assert_eq!((a.as_str(), b.as_str(), c.as_str()), ("K", "L", "M"));
                    assert_eq!(back, v);
                    assert_eq!(render_map("K", "L", "M", &back), text);
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn corrupted_dim2_reports_location() {
    let z2 = Arc::new(builtin_ring("Z2").unwrap());
    let cat = Catalog::build(std::slice::from_ref(&z2));
    let text = render_modules(cat.modules("Z2", Side::Left));
    let dim2_line = text.lines().position(|l| l.starts_with("%dim2")).unwrap() + 1;
    let bad = text.replacen("%dim2 ", "%dim2 x", 1);
    match parse_modules(&bad, std::slice::from_ref(&z2)) {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, dim2_line),
        other => panic!("expected a parse error, got {other:?}"),
    }
    // well-formed but inconsistent with the action
    let target = text.lines().position(|l| l.starts_with("%dim2 1")).unwrap() + 1;
    let wrong = text.replacen("%dim2 1", "%dim2 2", 1);
    match parse_modules(&wrong, &[z2]) {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, target),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn ring_snapshot_round_trip() {
    for name in fusionbp::fusionring::builtin::BUILTIN_NAMES {
        let r = builtin_ring(name).unwrap();
        let text = render_ring(&r);
        assert_eq!(render_ring(&parse_ring(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, ring_text, _) = common::cli(&["ring", "builtin", "AH1"]);
    assert_eq!(code, 0);
    let good = dir.path().join("ah1.ring");
    fs::write(&good, &ring_text).unwrap();
    assert_eq!(common::cli(&["ring", "validate", good.to_str().unwrap()]).0, 0);

    let (code, derived, _) = common::cli(&["ring", "builtin", "AH1", "--derive"]);
    assert_eq!(code, 0);
    assert_eq!(derived, ring_text);

    // one structure constant changed: parses, fails the axioms
    let mut lines: Vec<String> = ring_text.lines().map(String::from).collect();
    let i = lines.iter().position(|l| l == "%N").unwrap() + 8;
    let mut row: Vec<u32> = lines[i].split_whitespace().map(|x| x.parse().unwrap()).collect();
    *row.last_mut().unwrap() += 1;
    lines[i] = row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let bad = dir.path().join("bad.ring");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let (code, _, err) = common::cli(&["ring", "validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");

    let garbage = dir.path().join("garbage.ring");
    fs::write(&garbage, "%ring X\n%field nope\n").unwrap();
    assert_eq!(common::cli(&["ring", "validate", garbage.to_str().unwrap()]).0, 2);
    assert_eq!(common::cli(&["ring", "validate", "/nonexistent/file.ring"]).0, 2);
    assert_eq!(common::cli(&["ring", "builtin", "AH1", "--bogus"]).0, 2);
    assert_eq!(common::cli(&["ring", "builtin", "NoSuchRing"]).0, 2);
    assert_eq!(common::cli(&["--jobs", "0", "ring", "builtin", "Z2"]).0, 2);

    let missing = dir.path().join("empty-ws");
    assert_ne!(common::cli(&["groupoid", "deduce", "--workspace", missing.to_str().unwrap()]).0, 0);
}

#[test]
fn cli_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text, _) = common::cli(&["ring", "builtin", "Z2"]);
    let f = dir.path().join("z2.ring");
    fs::write(&f, &text).unwrap();
    let (code, out, _) = common::cli(&["modules", "enumerate", "--ring", f.to_str().unwrap(), "--side", "right"]);
    assert_eq!(code, 0);
    let z2 = Arc::new(parse_ring(&text).unwrap());
    let ms = parse_modules(&out, std::slice::from_ref(&z2)).unwrap();
    assert_eq!(ms.len(), 2);
    assert!(ms.iter().all(|m| m.side() == Side::Right));
    let (code, out, _) = common::cli(&["bimodules", "enumerate", "--left", f.to_str().unwrap(), "--right", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(fusionbp::io::parse_bimodules(&out, &[z2]).unwrap().len(), 2);
}

fn compat_files(ws: &Workspace) -> Vec<(String, std::time::SystemTime)> {
    let mut v: Vec<(String, std::time::SystemTime)> = fs::read_dir(ws.root().join("compat"))
        .map(|d| {
            d.map(|e| e.unwrap())
                .filter(|e| e.file_name().to_string_lossy().ends_with(".txt"))
                .map(|e| (e.file_name().to_string_lossy().into_owned(), e.metadata().unwrap().modified().unwrap()))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn interrupted_tables_resume_and_staleness_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let ws = Workspace::new(dir.path());
    assert!(matches!(ws.catalog(), Err(WorkspaceError::Missing(_))));
    ws.init_rings(&AH_RINGS).unwrap();
    ws.build_catalog().unwrap();
    assert!(ws.is_current(Stage::Catalog));
    assert!(!ws.is_current(Stage::Tables));

    assert_eq!(ws.build_tables(Some(4)).unwrap(), None);
    let partial = compat_files(&ws);
    assert_eq!(partial.len(), 4);
    assert!(!ws.is_current(Stage::Tables));

    let tables: ProductTable = ws.build_tables(None).unwrap().expect("complete run");
    let full = compat_files(&ws);
    assert_eq!(full.len(), 36);
    for (name, t) in &partial {
        let after = full.iter().find(|f| &f.0 == name).unwrap();
        assert_eq!(after.1, *t, "{name} was recomputed");
    }
    assert_eq!(tables, common::ah().tables);
    let cat = ws.catalog().unwrap();
    assert_eq!(ws.tables(&cat).unwrap(), tables);

    // graph export only needs the catalog
    let w = dir.path().to_str().unwrap();
    let (code, dot, _) = common::cli(&["graphs", "export", "--bimodule", "AH1-AH2-8", "--object", "0", "--format", "dot", "--workspace", w]);
    assert_eq!(code, 0);
    assert!(dot.contains("graph \"AH1-AH2-8-0-principal\""));
    assert_eq!(common::cli(&["graphs", "export", "--bimodule", "AH1-AH2-99", "--object", "0", "--workspace", w]).0, 2);

    // a hand-edited table invalidates the stage and everything after it
    let f = dir.path().join("compat/bim-AH2-AH2-AH2.txt");
    let text = fs::read_to_string(&f).unwrap();
    fs::write(&f, text.replacen("-> {}", "-> {AH2-AH2-0}", 1)).unwrap();
    assert!(matches!(ws.tables(&cat), Err(WorkspaceError::Stale(..))));
    let (code, _, err) = common::cli(&["groupoid", "deduce", "--workspace", w]);
    assert_eq!(code, 1);
    assert!(err.contains("stale"), "{err}");

    // an edited ring invalidates the catalog
    let r = dir.path().join("rings/AH3.ring");
    fs::write(&r, fs::read_to_string(&r).unwrap() + "# edited\n").unwrap();
    assert!(matches!(ws.catalog(), Err(WorkspaceError::Stale(..))));
}
