mod common;

use std::path::PathBuf;

use common::CAP;
use liftedve::ground::{brute_force_ln_partition, brute_force_marginal, Factor, GroundModel};
use liftedve::io::{parse_model, parse_query, parse_wmc, serialize_model};
use liftedve::planner::{marginal, Query, Strategy};
use liftedve::wmc::{check_equivalence, import_wmc};
use liftedve::{Model, Potential};

/// `ln Z` of each golden model, frozen from the brute-force oracle.
const LN_Z: [(&str, f64); 8] = [
    ("antisymmetry", 6.98319535727),
    ("counting", 6.83556714266),
    ("homophily", 6.31814497445),
    ("mixed", 8.3518922339),
    ("reflexivity", 9.04086391917),
    ("swap", 16.0448918966),
    ("symmetry", 9.27883182279),
    ("transitive", 5.47307733983),
];

fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn model(name: &str) -> Model {
    parse_model(&golden(&format!("{name}.pfm"))).unwrap()
}

#[test]
fn frozen_partition_functions_match_the_oracle() {
    for (name, frozen) in LN_Z {
        let m = model(name);
        let oracle = brute_force_ln_partition(&GroundModel::from_model(&m, CAP).unwrap(), CAP).unwrap();
        assert!((oracle - frozen).abs() < 1e-9, "{name}: oracle {oracle} vs frozen {frozen}");
        let lifted = marginal(&m, &Query::partition(), Strategy::Auto, CAP).unwrap();
        assert!((lifted.ln_z - frozen).abs() < 1e-9, "{name}: lifted {} vs frozen {frozen}", lifted.ln_z);
    }
}

#[test]
fn swap_model_has_closed_form_partition() {
    // Twelve ordered pairs form six swapped pairs, each summing to
    // 2*2 + 0.5*1.5 + 1.5*0.5 + 3*3 = 14.5.
    let m = model("swap");
    let a = marginal(&m, &Query::partition(), Strategy::Auto, CAP).unwrap();
    assert!((a.ln_z - 6.0 * 14.5f64.ln()).abs() < 1e-10);
}

#[test]
fn every_applicable_strategy_agrees() {
    let strategies = [Strategy::TwoLogvar, Strategy::OneLogvarAtoms, Strategy::Generic, Strategy::Ground];
    for (name, frozen) in LN_Z {
        let m = model(name);
        let mut ran = 0;
        for s in strategies {
            match marginal(&m, &Query::partition(), s, CAP) {
                Ok(a) => {
                    assert!((a.ln_z - frozen).abs() < 1e-9, "{name} {s:?}: {} vs {frozen}", a.ln_z);
                    ran += 1;
                }
                Err(liftedve::Error::NotApplicable(_)) => {}
                Err(e) => panic!("{name} {s:?}: {e}"),
            }
        }
        assert!(ran >= 2, "{name}: only {ran} strategies ran");
    }
}

#[test]
fn golden_queries_match_brute_force_marginals() {
    for name in ["symmetry", "homophily"] {
        let m = model(name);
        let q = parse_query(&golden(&format!("{name}.qry"))).unwrap();
        let a = marginal(&m, &q, Strategy::Auto, CAP).unwrap();
        let (target, probs) = a.marginal.unwrap();
        let mut gm = GroundModel::from_model(&m, CAP).unwrap();
        for (atom, v) in q.resolve(&m).unwrap() {
            let r = gm.ranges[&atom];
            let onehot = (0..r).map(|k| if k == v { 1.0 } else { 0.0 }).collect();
            gm.push(Factor { args: vec![atom], potential: Potential::from_values(vec![r], onehot).unwrap() });
        }
        let f = brute_force_marginal(&gm, &[target.clone()].into(), CAP).unwrap();
        let total = f.potential.ln_total();
        for (k, p) in probs.iter().enumerate() {
            let expected = (f.potential.ln_at(&[k]) - total).exp();
            assert!((p - expected).abs() < 1e-9, "{name} {target}={k}: {p} vs {expected}");
        }
    }
}

#[test]
fn golden_files_are_in_canonical_form() {
    for (name, _) in LN_Z {
        let text = golden(&format!("{name}.pfm"));
        assert_eq!(serialize_model(&parse_model::<f64>(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn golden_wmc_files_import_faithfully() {
    for name in ["appendix", "weights_only"] {
        let w = parse_wmc(&golden(&format!("{name}.wmc"))).unwrap();
        let m: Model = import_wmc(&w).unwrap();
        for n in 1..=3 {
            assert!(check_equivalence(&w, &m, n, 1e-9, CAP).unwrap(), "{name} at |D|={n}");
        }
    }
}
