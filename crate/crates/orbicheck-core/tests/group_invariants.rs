//! Structural invariants of the constructed groups.

use orbicheck_core::catalog::{build_catalog, build_point_group, CatalogLimits};
use orbicheck_core::group::{
    acts_freely, diagonal_embed, kleinian_group, Automorphism, KleinianFamily,
};
use orbicheck_core::matrix::is_symplectic;

#[test]
fn every_constructed_group_of_order_up_to_200_is_symplectic() {
    let catalog = build_catalog(&CatalogLimits::with_order_cap(200)).unwrap();
    let mut elements = 0;
    for entry in &catalog {
        let g = build_point_group(entry.family, entry.n, entry.k).unwrap();
        for m in g.elements() {
            assert!(is_symplectic(m), "{}: element fails MᵀJM = J", entry.label);
            elements += 1;
        }
    }
    assert!(elements > 5000, "swept {elements} elements");
}

#[test]
fn ade_orders() {
    for n in 1..=12 {
        assert_eq!(
            kleinian_group(KleinianFamily::Cyclic, Some(n)).unwrap().order(),
            n as usize
        );
    }
    for n in 2..=10 {
        assert_eq!(
            kleinian_group(KleinianFamily::BinaryDihedral, Some(n)).unwrap().order(),
            4 * n as usize
        );
    }
    assert_eq!(kleinian_group(KleinianFamily::BinaryTetrahedral, None).unwrap().order(), 24);
    assert_eq!(kleinian_group(KleinianFamily::BinaryOctahedral, None).unwrap().order(), 48);
    assert_eq!(kleinian_group(KleinianFamily::BinaryIcosahedral, None).unwrap().order(), 120);
}

#[test]
fn group_axioms_inverses_and_identity() {
    for (family, n) in [
        (KleinianFamily::Cyclic, Some(9)),
        (KleinianFamily::BinaryDihedral, Some(4)),
        (KleinianFamily::BinaryTetrahedral, None),
    ] {
        let h = kleinian_group(family, n).unwrap();
        let table = h.mult_table();
        // identity at index 0; every element has an inverse in the group
        for i in 0..h.order() {
            assert_eq!(table[0][i], i as u32);
            assert_eq!(table[i][0], i as u32);
            assert!(
                (0..h.order()).any(|j| table[i][j] == 0),
                "element {i} lacks an inverse"
            );
        }
    }
}

#[test]
fn exported_index2_specs_rebuild_identically() {
    // the group spec recorded for a twisted index-2 entry reproduces the
    // same group (same order and invariants) through the JSON interface
    use orbicheck_core::catalog::dihedral_index2;
    use orbicheck_core::group::GroupSpec;
    use orbicheck_core::invariants::local_invariants;

    for n in [2u32, 3, 5] {
        let (g, spec) = dihedral_index2(n, 1).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let parsed: GroupSpec = serde_json::from_str(&json).unwrap();
        let rebuilt = parsed.build().unwrap();
        assert_eq!(rebuilt.order(), g.order());
        assert_eq!(
            local_invariants(&rebuilt).unwrap(),
            local_invariants(&g).unwrap(),
            "Dtilde_{n}^[2]"
        );
    }
}

#[test]
fn identity_twist_embeddings_act_freely() {
    for n in 2..=30 {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(n)).unwrap();
        let g = diagonal_embed(&h, &Automorphism::identity(h.order())).unwrap();
        assert!(acts_freely(&g), "cyclic({n})");
    }
    for n in 2..=12 {
        let h = kleinian_group(KleinianFamily::BinaryDihedral, Some(n)).unwrap();
        let g = diagonal_embed(&h, &Automorphism::identity(h.order())).unwrap();
        assert!(acts_freely(&g), "binary_dihedral({n})");
    }
}
