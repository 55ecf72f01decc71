//! The projection-diagonal identity on sign-sensitive spaces over ℤ:
//! for every pair of star-ring generators u, v the pullback of the table
//! product must equal the cup product of the pullbacks, as cohomology
//! classes of the triangulated total space.

use polyprod::complex::{library, SimplicialComplex};
use polyprod::decomposition::DEFAULT_BUDGET;
use polyprod::geometry::{verify_eta_ring, GeometricContext, TableView};
use polyprod::linalg::IntRing;
use polyprod::pairs::PairFamily;
use polyprod::star::multiplication_table;

fn check(k: &SimplicialComplex, family: PairFamily, label: &str) {
    let star = multiplication_table(IntRing, k, &family, DEFAULT_BUDGET).unwrap();
    let ctx = GeometricContext::full(IntRing, k, &family, DEFAULT_BUDGET).unwrap();
    let generators: Vec<(usize, usize, i32)> = star
        .generators
        .iter()
        .map(|g| (g.summand, g.position, g.total_degree))
        .collect();
    let entry = |i: usize, j: usize| star.table[i][j].coeffs.clone();
    let view = TableView { module: &star.module, generators: &generators, entry: &entry };
    let report = verify_eta_ring(&ctx, &view);
    assert!(
        report.pass,
        "{label}: {} of {} generator pairs failed, first: {:?}",
        report.failures.len(),
        report.pairs.len(),
        report
            .failures
            .first()
            .map(|f| (f.left_gen, f.right_gen, f.degree, f.lhs.clone(), f.rhs.clone()))
    );
}

#[test]
fn torus_from_four_cycle() {
    // nonzero product of two degree-1 classes: fixes the global sign
    check(&library::cycle(4), PairFamily::uniform_disk(4, 1), "C4 (D1,S0)");
}

#[test]
fn s3_x_s3_from_four_cycle() {
    check(&library::cycle(4), PairFamily::uniform_disk(4, 2), "C4 (D2,S1)");
}

#[test]
fn s2_x_s2_mixed_disks() {
    // disks (2,2,1,1): even shifts on both diagonal pairs
    check(&library::cycle(4), PairFamily::disks(&[2, 2, 1, 1]), "C4 mixed (2,2,1,1)");
}

#[test]
fn s2_x_s3_mixed_disks() {
    check(&library::cycle(4), PairFamily::disks(&[2, 1, 2, 1]), "C4 mixed (2,1,2,1)");
}

#[test]
fn three_sphere_from_two_points() {
    check(&library::disjoint_points(2), PairFamily::uniform_disk(2, 2), "2pts (D2,S1)");
}

#[test]
fn suspension_of_two_points() {
    // K = S⁰ * C3 is a 2-sphere: products of degree (0,1) internal classes
    let k = library::cycle(3).join(&library::disjoint_points(2));
    check(&k, PairFamily::uniform_disk(5, 1), "S2 join (D1,S0)");
    check(&k, PairFamily::disks(&[1, 1, 1, 2, 1]), "S2 join mixed");
}

#[test]
fn five_cycle_real() {
    // genus-5 surface: overlapping products go through the geometric path
    check(&library::cycle(5), PairFamily::uniform_disk(5, 1), "C5 (D1,S0)");
}
