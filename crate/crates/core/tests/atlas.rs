use msgraphs::atlas::*;
use msgraphs::graphs::invariants;

fn s(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[test]
fn validation_statuses() {
    let session = AtlasSession::embedded();
    let report = session.validate(None);
    assert!(report.orbifolds.iter().all(|o| o.ok));
    assert_eq!(
        report.summary.failed,
        0,
        "{:#?}",
        report
            .rows
            .iter()
            .filter(|r| r.status == Status::Failed)
            .collect::<Vec<_>>()
    );
    let flagged: Vec<&str> = report
        .rows
        .iter()
        .filter(|r| r.status == Status::Flagged)
        .map(|r| r.label.as_str())
        .collect();
    assert_eq!(flagged, ["O27.a(5)", "O28.d(21,k) / O34.c(21,k)"]);
    let verified = report
        .rows
        .iter()
        .filter(|r| r.status == Status::Verified)
        .count();
    let with_arcs = session
        .atlas
        .rows
        .iter()
        .filter(|r| r.graphs.iter().any(|g| session.atlas.arc(&g.id).is_ok()))
        .count();
    assert_eq!(verified, with_arcs);
    assert_eq!(verified, 5);
}

#[test]
fn filter_by_orbifold_and_graph() {
    let session = AtlasSession::embedded();
    let r = session.validate(Some("O34"));
    assert_eq!(r.orbifolds.len(), 1);
    assert_eq!(r.rows.len(), 4);
    let r = session.validate(Some("O34.a'"));
    assert_eq!(r.rows.len(), 1);
    assert_eq!(r.rows[0].status, Status::Verified);
}

#[test]
fn rebuild_matches_printed_row() {
    let session = AtlasSession::embedded();
    let g = session.graph("O34.a'").unwrap();
    let inv = invariants(&g.graph).unwrap();
    assert_eq!(inv.to_string(), "d2=30 d3=20 E=60 D=10 G=12");
}

#[test]
fn equivalence_suite() {
    let session = AtlasSession::embedded();
    let reports = session.equivalence_suite().unwrap();
    assert_eq!(reports.len(), 4);
    for r in &reports {
        assert!(r.triples_ok && r.graphs_isomorphic(), "{r:?}");
    }
    let status: Vec<Status> = reports.iter().map(|r| r.status).collect();
    assert_eq!(
        status,
        [
            Status::Verified,
            Status::Flagged,
            Status::Verified,
            Status::Verified
        ]
    );
    let o20 = &reports[1];
    assert!(!o20.map.hom_defined);
    assert!(o20.corrected.as_ref().unwrap().ok());
}

#[test]
fn mutated_maps_rejected() {
    let session = AtlasSession::embedded();
    let good = session
        .check_map("O28.a'", "O34.b", &s(&["v", "vl", "vr"]))
        .unwrap();
    assert!(good.ok());
    for bad in [
        ["vr", "vl", "vr"],
        ["v", "vr", "vl"],
        ["v", "vl", "vr*v"],
        ["v", "v", "vr"],
    ] {
        let m = session.check_map("O28.a'", "O34.b", &s(&bad)).unwrap();
        assert!(!m.ok(), "{bad:?}");
    }
}

#[test]
fn atlas_file_override() {
    let dir = std::env::temp_dir().join(format!("msgraphs-atlas-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("atlas.json");
    let mut atlas = Atlas::embedded();
    atlas.orbifolds.retain(|o| o.id == "O34");
    atlas.orbifolds[0].order = Some(121);
    std::fs::write(&path, serde_json::to_string(&atlas).unwrap()).unwrap();
    let session = AtlasSession::new(Atlas::from_path(&path).unwrap());
    let r = session.validate(Some("O34"));
    assert!(!r.orbifolds[0].ok);
    assert_eq!(r.orbifolds[0].enumerated_order, Some(120));
    assert!(matches!(
        Atlas::from_path(&dir.join("missing.json")),
        Err(AtlasError::Io(_))
    ));
    std::fs::write(&path, "{").unwrap();
    assert!(matches!(
        Atlas::from_path(&path),
        Err(AtlasError::Format(_))
    ));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn knotted_labels() {
    let atlas = Atlas::embedded();
    let labels: Vec<String> = atlas.rows.iter().map(|r| r.label()).collect();
    assert!(labels.contains(&"O22B.a(121) / O22B.b(121,k)".to_string()));
    let knotted: Vec<&str> = atlas
        .rows
        .iter()
        .flat_map(|r| r.graphs.iter())
        .filter(|g| g.knotted)
        .map(|g| g.id.as_str())
        .collect();
    assert_eq!(
        knotted,
        ["O20C.b", "O34.b", "O22B.b", "O38.b", "O38.c", "O22C.b", "O28.d", "O34.c", "O38.d"]
    );
}
