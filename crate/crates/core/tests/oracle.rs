mod common;

use common::*;
use rydberg_floquet::operators::*;
use rydberg_floquet::{Boundary, ConstrainedBasis};

#[test]
fn basis_matches_brute_force() {
    for bc in [Boundary::Periodic, Boundary::Open] {
        for l in 3..=14 {
            let b = ConstrainedBasis::new(l, bc).unwrap();
            assert_eq!(b.states(), legal_states(l, bc).as_slice(), "L = {l} {bc:?}");
        }
    }
}

#[test]
fn builders_match_projected_full_space() {
    for bc in [Boundary::Periodic, Boundary::Open] {
        for l in 4..=10 {
            let b = ConstrainedBasis::new(l, bc).unwrap();
            let checks = [
                ("pxp", pap(l, bc, X), build_pxp(&b)),
                ("pyp", pap(l, bc, Y), build_pyp(&b)),
                ("pzp", pap(l, bc, Z), build_pzp(&b)),
                ("pxyp", pxyp(l, bc), build_pxyp(&b)),
                ("ziz", ziz(l, bc), build_ziz(&b)),
                ("n", number(l), build_number(&b)),
            ];
            for (name, full, op) in checks {
                let err = projected_error(&b, &full, |r, c| op.get(r, c));
                assert!(err < 1e-12, "{name} L = {l} {bc:?}: {err}");
            }
            for site in [0, l / 2, l - 1] {
                let full = product(l, &[(site, N)]);
                let op = build_local_n(&b, site).unwrap();
                assert!(projected_error(&b, &full, |r, c| op.get(r, c)) < 1e-12);
                let full = product(l, &[(site, Z)]);
                let op = build_sigma_z(&b, site).unwrap();
                assert!(projected_error(&b, &full, |r, c| op.get(r, c)) < 1e-12);
            }
        }
    }
}
