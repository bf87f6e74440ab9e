use num_complex::Complex64 as C64;
use rydberg_floquet::basis::ConstrainedBasis;
use rydberg_floquet::operators::*;
use rydberg_floquet::basis::Boundary;
const I: C64 = C64::new(0.0, 1.0);

fn basis(l: usize) -> ConstrainedBasis {
    ConstrainedBasis::new(l, Boundary::Periodic).unwrap()
}

fn at(op: &SparseOperator, b: &ConstrainedBasis, row: u64, col: u64) -> C64 {
    op.get(b.index_of(row).unwrap(), b.index_of(col).unwrap())
}

#[test]
fn pxp_from_vacuum() {
    let b = basis(4);
    let h = build_pxp(&b);
    let vac = b.index_of(0).unwrap();
    let row: Vec<_> = h.entries().filter(|e| e.0 == vac).collect();
    assert_eq!(row.len(), 4);
    assert!(row.iter().all(|e| e.2 == C64::new(1.0, 0.0) && e.1 != vac));
    assert_eq!(at(&h, &b, 0b0101, 0b0001), C64::new(1.0, 0.0));
}

#[test]
fn number_and_sigma_z() {
    let b = basis(4);
    let n = build_number(&b);
    let k = b.index_of(0b0101).unwrap();
    assert_eq!(n.get(k, k).re, 2.0);
    let z0 = build_sigma_z(&b, 0).unwrap();
    assert_eq!(z0.get(0, 0).re, 1.0);
    assert!(build_sigma_z(&b, 4).is_err());
    assert!(build_local_n(&b, 7).is_err());

    let locals: Vec<_> = (0..4).map(|i| build_local_n(&b, i).unwrap()).collect();
    let terms: Vec<_> = locals.iter().map(|op| (1.0, op)).collect();
    let sum = SparseOperator::linear_combination(&terms).unwrap();
    for i in 0..b.dim() {
        assert_eq!(sum.get(i, i), n.get(i, i));
    }
}

#[test]
fn pxyp_hops_one_excitation() {
    let b = basis(6);
    let h = build_pxyp(&b);
    assert_eq!(at(&h, &b, 0b000010, 0b000001), C64::new(1.0, 0.0));
    let b4 = basis(4);
    let h4 = build_pxyp(&b4);
    let k = b4.index_of(0b0101).unwrap();
    assert_eq!(h4.get(k, k), C64::new(0.0, 0.0));
}

#[test]
fn pyp_phase() {
    let b = basis(4);
    let h = build_pyp(&b);
    assert_eq!(at(&h, &b, 0b0001, 0b0000), I);
    assert_eq!(at(&h, &b, 0b0000, 0b0001), -I);
    assert!(h.hermiticity_error() < 1e-15);
}

#[test]
fn ziz_on_neel() {
    let b = basis(4);
    let z = build_ziz(&b);
    let k = b.index_of(0b0101).unwrap();
    assert_eq!(z.get(k, k).re, 4.0);
}

#[test]
fn pzp_decomposition_constant() {
    for l in 4..=12 {
        let b = basis(l);
        let (pzp, n, ziz) = (build_pzp(&b), build_number(&b), build_ziz(&b));
        let rest = SparseOperator::linear_combination(&[(1.0, &pzp), (3.0, &n), (-0.25, &ziz)])
            .unwrap();
        let d = rest.diagonal_values().unwrap();
        assert!(d.iter().all(|&x| (x - 0.75 * l as f64).abs() < 1e-12), "L={l}");
    }
}

#[test]
fn linear_combination_rejects_mismatched_bases() {
    let a = build_number(&basis(4));
    let c = build_number(&basis(6));
    assert!(SparseOperator::linear_combination(&[(1.0, &a), (1.0, &c)]).is_err());
    assert!(SparseOperator::linear_combination(&[]).is_err());
}

#[test]
fn triplet_dump() {
    let b = basis(4);
    let dir = std::env::temp_dir().join("rydberg_floquet_dump_test.json");
    build_pxp(&b).write_triplets(&dir).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&dir).unwrap()).unwrap();
    assert_eq!(v["dim"], 7);
    assert_eq!(v["entries"].as_array().unwrap().len(), 16);
}
