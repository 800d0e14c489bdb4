use num_rational::Ratio;

use super::*;
use crate::cache::Compute;
use crate::group::IntMatrix;

fn unipotent(d: usize) -> IntegerMatrixElement {
    IntegerMatrixElement::elementary(d, 0, 1, 1)
}

fn minus_identity() -> IntegerMatrixElement {
    IntegerMatrixElement::from_rows(&[vec![-1, 0], vec![0, -1]]).unwrap()
}

/// `(s·(p−1)² − (p+1))² = 4p` for `s = ((1+√p)/(p−1))²` when `p ≡ 1 (mod 4)`,
/// and `s = (p+1)/(p−1)²` when `p ≡ 3 (mod 4)`.
fn matches_closed_form(p: i64, s: &CycloRational) -> bool {
    if p % 4 == 3 {
        return s.as_rational() == Some(Ratio::new(p + 1, (p - 1) * (p - 1)));
    }
    let n = s.order();
    let t = s
        .scale(Ratio::from_integer((p - 1) * (p - 1)))
        .sub(&CycloRational::from_ratio(n, Ratio::from_integer(p + 1)));
    t.mul(&t).as_rational() == Some(Ratio::from_integer(4 * p))
}

#[test]
fn unipotent_series_matches_closed_form() {
    let plan = ScanPlan::new(Family::Sl, 2, vec![3, 5, 7, 11, 13], vec![unipotent(2)]);
    let s = vanishing_scan(&plan, &Compute::default()).unwrap();
    assert!(s.truncated.is_none() && s.consistent());
    for e in &s.entries {
        let p = e.modulus as i64;
        let v = &e.probes[0];
        assert!(!v.central && v.max_abs > 0.0);
        assert!(matches_closed_form(p, &v.witness.as_ref().unwrap().abs_squared), "p = {p}");
    }
    let series = s.series(0);
    assert!((series[0] - 1.0).abs() < 1e-12);
    // not monotone: the value at 13 exceeds the one at 11
    assert!(series[4] > series[3]);
    assert!(series[4] * 2.0 < series[0]);
}

#[test]
fn central_probe_is_flagged() {
    let plan = ScanPlan::new(Family::Sl, 2, vec![3, 5, 7], vec![minus_identity(), unipotent(2)]);
    let s = vanishing_scan(&plan, &Compute::default()).unwrap();
    assert_eq!(s.central_probes(), vec![0]);
    assert!(s.series(0).iter().all(|&v| (v - 1.0).abs() < 1e-12));
    let faithful = ScanPlan { filter: RowFilter::Faithful, ..plan };
    let s = vanishing_scan(&faithful, &Compute::default()).unwrap();
    assert!(s.series(0).iter().all(|&v| (v - 1.0).abs() < 1e-12));
    assert!(s.entries.iter().all(|e| e.probes[0].rows_considered > 0));
}

#[test]
fn rank_two_unipotent_in_sl3() {
    let plan = ScanPlan::new(Family::Sl, 3, vec![2, 3], vec![unipotent(3)]);
    let s = vanishing_scan(&plan, &Compute::default()).unwrap();
    assert_eq!(s.entries[0].order, 168);
    assert_eq!(s.entries[1].order, 5616);
    // degrees 1,3,3,6,7,8 take values 1,-1,-1,2,-1,0 on involutions
    let w = s.entries[0].probes[0].witness.as_ref().unwrap();
    assert_eq!(w.abs_squared.as_rational(), Some(Ratio::new(1, 9)));
    // the 12-dimensional constituent of the action on 13 points takes 3 there
    assert!(s.entries[1].probes[0].max_abs >= 0.25 - 1e-12);
    assert!(s.consistent());
}

#[test]
fn plan_validation() {
    let mut plan = ScanPlan::new(Family::Sl, 2, vec![5, 3], vec![unipotent(2)]);
    assert!(plan.validate().is_err());
    plan.moduli = vec![3, 3];
    assert!(plan.validate().is_err());
    plan.moduli = vec![3, 5];
    plan.probes = vec![unipotent(3)];
    assert!(plan.validate().is_err());
    let json = r#"{"family":"sl","d":2,"moduli":[3,5],
        "probes":[{"kind":"linear","matrix":[[1,1],[0,1]]}],"filter":"faithful"}"#;
    let parsed = ScanPlan::from_json(json).unwrap();
    assert_eq!(parsed.filter, RowFilter::Faithful);
    assert_eq!(parsed.probes, vec![unipotent(2)]);
    assert!(ScanPlan::from_json(r#"{"family":"gl","d":2,"moduli":[3],"probes":[]}"#).is_err());
    let singular = r#"{"family":"sl","d":2,"moduli":[3],"probes":[{"kind":"linear","matrix":[[2,0],[0,1]]}]}"#;
    assert!(ScanPlan::from_json(singular).is_err());
}

#[test]
fn budget_truncates_series() {
    let mut plan = ScanPlan::new(Family::Sl, 2, vec![3, 5, 7, 11], vec![unipotent(2)]);
    plan.budget.order = 200;
    let s = vanishing_scan(&plan, &Compute::default()).unwrap();
    assert_eq!(s.entries.len(), 2);
    assert_eq!(s.truncated.as_ref().unwrap().modulus, 7);
    assert!(s.truncated.as_ref().unwrap().reason.contains("group order"));
}

#[test]
fn scans_are_deterministic() {
    let plan = ScanPlan::new(Family::Sl, 2, vec![3, 4, 5, 7, 9], vec![unipotent(2), minus_identity()]);
    let a = vanishing_scan(&plan, &Compute::default()).unwrap().to_csv();
    let b = vanishing_scan(&plan, &Compute::default()).unwrap().to_csv();
    assert_eq!(a, b);
    assert!(a.starts_with("modulus,group,probe,central,rows,max_abs,argmax_row,degree,chi,abs_squared\n"));
    assert!(a.contains(",\"sl(2,3)\",0,false,"));
}

#[test]
fn semidirect_translation_probe() {
    let probe = IntegerMatrixElement::affine(IntMatrix::identity(2), vec![1, 0]).unwrap();
    let s = semidirect_scan(2, &[3, 5, 7], probe, ScanBudget::default(), &Compute::default()).unwrap();
    assert!(!s.in_hypothesis);
    assert!(s.consistent());
    assert!(s.entries.iter().all(|e| !e.probes[0].central && e.probes[0].max_abs > 0.0));
    assert_eq!(s.entries[0].order, 24 * 9);
}

#[test]
fn faithful_affine_rows_at_a_translation() {
    // faithful rows restrict to the sum over all nonzero dual vectors
    let probe = IntegerMatrixElement::affine(IntMatrix::identity(3), vec![1, 0, 0]).unwrap();
    let plan = ScanPlan { filter: RowFilter::Faithful, ..ScanPlan::new(Family::Aff, 3, vec![2, 3], vec![probe.clone()]) };
    let s = vanishing_scan(&plan, &Compute::default()).unwrap();
    assert!(s.in_hypothesis && s.consistent());
    assert_eq!(s.entries[1].order, 151_632);
    for (e, q) in s.entries.iter().zip([7, 26]) {
        let w = e.probes[0].witness.as_ref().unwrap();
        assert_eq!(w.value.as_integer(), Some(-1));
        assert_eq!(w.abs_squared.as_rational(), Some(Ratio::new(1, q * q)));
        assert_eq!(e.probes[0].max_abs, 1.0 / q as f64);
    }
    // inflated rows of the linear quotient are trivial on translations
    let s = semidirect_scan(3, &[3], probe, ScanBudget::default(), &Compute::default()).unwrap();
    assert_eq!(s.series(0), vec![1.0]);
}

#[test]
fn semidirect_rejects_non_group_probe() {
    let minus = IntMatrix::from_rows(&[vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]]).unwrap();
    let probe = IntegerMatrixElement::affine(minus, vec![0, 0, 0]).unwrap();
    let err = semidirect_scan(3, &[2, 3], probe, ScanBudget::default(), &Compute::default());
    // −Id reduces to the identity mod 2 but has determinant −1 mod 3
    assert!(matches!(err, Err(Error::Precondition(_))));
    assert!(semidirect_scan(2, &[4], unipotent(2), ScanBudget::default(), &Compute::default()).is_err());
}

fn commutator_subgroup_order(g: &GroupHandle) -> usize {
    let n = g.order();
    let mut inside = vec![false; n];
    let mut list = vec![g.identity()];
    inside[g.identity()] = true;
    let comms: Vec<usize> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b)))
        .collect();
    for c in comms {
        if !inside[c] {
            inside[c] = true;
            list.push(c);
        }
    }
    let mut head = 0;
    while head < list.len() {
        let x = list[head];
        for y in 0..n {
            if inside[y] {
                let z = g.mul(x, y);
                if !inside[z] {
                    inside[z] = true;
                    list.push(z);
                }
            }
        }
        head += 1;
    }
    list.len()
}

#[test]
fn census_examples() {
    let c = dimension_census(Family::Sl, 2, &[3, 4, 5], ScanBudget::default(), &Compute::default()).unwrap();
    assert_eq!(c.rows[0].degrees, vec![1, 1, 1, 2, 2, 2, 3]);
    assert_eq!(c.rows[2].degrees, vec![1, 2, 2, 3, 3, 4, 4, 5, 6]);
    for r in &c.rows {
        let g = GroupHandle::build(&r.group, DEFAULT_ORDER_BUDGET).unwrap();
        assert_eq!(r.linear, g.order() / commutator_subgroup_order(&g));
        assert_eq!(r.degrees.iter().map(|d| d * d).sum::<u64>(), r.order as u64);
    }
    let one = c.degrees.iter().find(|x| x.degree == 1).unwrap();
    assert_eq!(one.total, c.rows.iter().map(|r| r.linear).sum::<usize>());
    assert!(c.to_csv().contains("\n5,\"sl(2,5)\",120,1,1 2 2 3 3 4 4 5 6\n"));
}

#[test]
fn exact_rendering() {
    let half = CycloRational::from_ratio(4, Ratio::new(-1, 2));
    assert_eq!(exact_text(&half), "-1/2");
    let i = Cyclotomic::root(4, 1);
    assert_eq!(coefficient_list(&i), "z4:[0 1]");
    assert_eq!(exact_text(&CycloRational::new(i, 3)), "z4:[0 1]/3");
    assert_eq!(sha256_hex(b"abc").len(), 64);
}
