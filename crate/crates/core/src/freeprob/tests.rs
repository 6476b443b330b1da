use proptest::prelude::*;

use super::*;
use crate::matrix::Matrix;

fn literal_moments(kappa: &[f64]) -> Vec<f64> {
    (1..=kappa.len())
        .map(|q| {
            enumerate_nc(q).unwrap().iter().map(|p| p.block_sizes().iter().map(|&s| kappa[s - 1]).product::<f64>()).sum()
        })
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(1.0))
}

#[test]
fn catalan_counts() {
    let want = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
    for (k, &c) in want.iter().enumerate() {
        assert_eq!(catalan(k), c);
        if k >= 1 {
            assert_eq!(enumerate_nc(k).unwrap().len() as u64, c, "k={k}");
        }
    }
    assert!(enumerate_nc(0).is_err());
    assert!(enumerate_nc(13).is_err());
}

#[test]
fn enumerated_partitions_are_noncrossing_and_complete() {
    for k in 1..=7 {
        let nc = enumerate_nc(k).unwrap();
        assert!(nc.iter().all(NCPartition::is_noncrossing));
        let all = crate::diagrams::set_partitions(k);
        let count = all
            .iter()
            .filter(|p| NCPartition { k, blocks: p.blocks() }.is_noncrossing())
            .count();
        assert_eq!(count, nc.len());
    }
}

#[test]
fn kreweras_examples() {
    assert_eq!(kreweras(&NCPartition::discrete(4)).unwrap(), NCPartition::single_block(4));
    assert_eq!(kreweras(&NCPartition::single_block(4)).unwrap(), NCPartition::discrete(4));
    assert_eq!(kreweras(&NCPartition::single_block(2)).unwrap(), NCPartition::discrete(2));
    let crossing = NCPartition { k: 4, blocks: vec![vec![0, 2], vec![1, 3]] };
    assert!(kreweras(&crossing).is_err());
    assert!(NCPartition::new(4, vec![vec![0, 2], vec![1, 3]]).is_err());
}

#[test]
fn kreweras_is_an_order_reversing_involution() {
    for k in 1..=7 {
        let nc = enumerate_nc(k).unwrap();
        let images: Vec<NCPartition> = nc.iter().map(|p| kreweras(p).unwrap()).collect();
        for (p, kp) in nc.iter().zip(&images) {
            assert_eq!(&kreweras(kp).unwrap(), p);
            // block counts are complementary: |π| + |K(π)| = k + 1
            assert_eq!(p.blocks().len() + kp.blocks().len(), k + 1);
        }
        if k <= 6 {
            for (i, p) in nc.iter().enumerate() {
                for (j, r) in nc.iter().enumerate() {
                    if p.refines(r) {
                        assert!(images[j].refines(&images[i]));
                    }
                }
            }
        }
    }
}

#[test]
fn kreweras_complement_is_maximal_on_interleaved_points() {
    // π on even positions 2i, K(π) relabelled back to primed points 2i+1
    // after undoing the reflection; the union must be non-crossing and
    // merging any two blocks of the complement must create a crossing
    for k in 1..=6 {
        for p in enumerate_nc(k).unwrap() {
            let kp = kreweras(&p).unwrap();
            let primed: Vec<Vec<usize>> = kp.blocks().iter().map(|b| b.iter().map(|&x| k - 1 - x).collect()).collect();
            let primed_positions: Vec<Vec<usize>> =
                primed.iter().map(|b| b.iter().map(|&x| 2 * x + 1).collect()).collect();
            let unprimed: Vec<Vec<usize>> = p.blocks().iter().map(|b| b.iter().map(|&x| 2 * x).collect()).collect();
            let mut all = unprimed.clone();
            all.extend(primed_positions.iter().cloned());
            assert!(NCPartition::new(2 * k, all).is_ok());
            for i in 0..primed_positions.len() {
                for j in i + 1..primed_positions.len() {
                    let mut merged = primed_positions.clone();
                    let b = merged.remove(j);
                    merged[i].extend(b);
                    let mut all = unprimed.clone();
                    all.extend(merged);
                    assert!(NCPartition::new(2 * k, all).is_err());
                }
            }
        }
    }
}

#[test]
fn semicircle_and_rom_tables() {
    let goe = CumulantTable::preset("goe", 8).unwrap();
    let m = cumulants_to_moments(&goe).unwrap();
    assert_eq!(m.values, vec![0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0]);

    let rom = CumulantTable::preset("rom", 8).unwrap();
    assert_eq!(rom.values, vec![0.0, 1.0, 0.0, -1.0, 0.0, 2.0, 0.0, -5.0]);
    assert_eq!(cumulants_to_moments(&rom).unwrap(), CumulantTable::preset("rademacher", 8).unwrap());

    let k = moments_to_cumulants(&CumulantTable::preset("rademacher", 8).unwrap()).unwrap();
    assert_eq!(k, rom);
    let k = moments_to_cumulants(&CumulantTable::preset("semicircle", 8).unwrap()).unwrap();
    assert_eq!(k, goe);
}

#[test]
fn point_mass() {
    let c = 1.5;
    let m = cumulants_to_moments(&CumulantTable::cumulants(vec![c, 0.0, 0.0, 0.0, 0.0])).unwrap();
    assert!(close(&m.values, &(1..=5).map(|q| c.powi(q)).collect::<Vec<_>>(), 1e-14));
}

#[test]
fn tag_mismatch_is_rejected() {
    let m = CumulantTable::preset("semicircle", 4).unwrap();
    assert!(cumulants_to_moments(&m).is_err());
    assert!(moments_to_cumulants(&CumulantTable::preset("goe", 4).unwrap()).is_err());
    assert!(CumulantTable::preset("cauchy", 4).is_err());
}

#[test]
fn json_format() {
    let t: CumulantTable = serde_json::from_str(r#"{"tag":"cumulants","values":[0,1,0,-1]}"#).unwrap();
    assert_eq!(t, CumulantTable::preset("rom", 4).unwrap());
    assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"tag":"cumulants","values":[0.0,1.0,0.0,-1.0]}"#);
}

#[test]
fn cactus_traffic_examples() {
    let rom = CumulantTable::preset("rom", 8).unwrap();
    assert_eq!(cactus_traffic_value(&Diagram::bowtie(), &rom).unwrap().value, 0.0);
    assert_eq!(cactus_traffic_value(&Diagram::cycle(4), &rom).unwrap().value, -1.0);
    let goe = CumulantTable::preset("goe", 4).unwrap();
    assert_eq!(cactus_traffic_value(&Diagram::cycle(2), &goe).unwrap(), TrafficValue { value: 1.0, cactus: true });
    assert_eq!(cactus_traffic_value(&Diagram::theta(), &goe).unwrap(), TrafficValue { value: 0.0, cactus: false });
    assert!(matches!(cactus_traffic_value(&Diagram::cycle(6), &goe), Err(TampError::TableTooShort { .. })));
}

#[test]
fn diagonal_examples() {
    let rad = CumulantTable::preset("rademacher", 8).unwrap();
    for d in [Diagram::cycle(4), Diagram::bowtie(), Diagram::cycle(2), Diagram::cycle(3)] {
        let all_even = cycles_of_cactus(&d).unwrap().iter().all(|l| l % 2 == 0);
        assert_eq!(diagonal_from_spectral(&d, &rad).unwrap(), if all_even { 1.0 } else { 0.0 }, "{d}");
    }
    let semi = CumulantTable::preset("semicircle", 6).unwrap();
    assert_eq!(diagonal_from_spectral(&Diagram::cycle(4), &semi).unwrap(), 2.0);
    assert_eq!(diagonal_from_spectral(&Diagram::vertex(), &semi).unwrap(), 1.0);
    assert!(diagonal_from_spectral(&Diagram::theta(), &semi).is_err());
}

#[test]
fn cycle_mobius_matches_geodesic_paths() {
    // μ(α, β) as the Möbius function of the geodesic order from α, against
    // the product of signed Catalan numbers over the cycles of α ∪ β
    for k in [2usize, 4, 6, 8] {
        let all = all_matchings(k);
        let base = &all[0];
        let dist: Vec<usize> = all.iter().map(|m| base.distance(m)).collect();
        let mut order: Vec<usize> = (0..all.len()).collect();
        order.sort_by_key(|&i| dist[i]);
        let mut mu = vec![0i64; all.len()];
        for &b in &order {
            if dist[b] == 0 {
                mu[b] = 1;
                continue;
            }
            let mut s = 0;
            for &g in &order {
                if g != b && dist[g] + all[g].distance(&all[b]) == dist[b] {
                    s += mu[g];
                }
            }
            mu[b] = -s;
        }
        for (i, m) in all.iter().enumerate() {
            let formula: i64 = base.cycles_with(m).iter().map(|&l| nc_mobius_block(l / 2)).product();
            assert_eq!(mu[i], formula, "k={k}");
        }
    }
}

fn all_matchings(k: usize) -> Vec<HalfEdgeMatching> {
    fn rec(p: &mut Vec<usize>, out: &mut Vec<HalfEdgeMatching>) {
        let Some(a) = p.iter().position(|&x| x == usize::MAX) else {
            out.push(HalfEdgeMatching::from_partners(p.clone()).unwrap());
            return;
        };
        for b in a + 1..p.len() {
            if p[b] == usize::MAX {
                p[a] = b;
                p[b] = a;
                rec(p, out);
                p[a] = usize::MAX;
                p[b] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![usize::MAX; k], &mut out);
    out
}

#[test]
fn weingarten_examples() {
    let rad = CumulantTable::preset("rademacher", 8).unwrap();
    let rom = moments_to_cumulants(&rad).unwrap();
    for d in [Diagram::cycle(1), Diagram::cycle(2), Diagram::cycle(4), Diagram::bowtie(), Diagram::vertex()] {
        let w = weingarten_limit(&d, &rad).unwrap();
        let c = cactus_traffic_value(&d, &rom).unwrap().value;
        assert!((w - c).abs() < 1e-10, "{d}: {w} vs {c}");
    }
    assert_eq!(weingarten_limit(&Diagram::cycle(3), &rad).unwrap(), 0.0);
    assert_eq!(weingarten_limit(&Diagram::star(3), &rad).unwrap(), 0.0);
    // 2-edge-connected, Eulerian, not a cactus
    let d = Diagram::new(2, vec![(0, 1), (0, 1), (0, 1), (0, 1)], vec![]).unwrap();
    assert_eq!(weingarten_limit(&d, &rad).unwrap(), 0.0);
    assert!(weingarten_limit(&Diagram::cycle(9), &CumulantTable::preset("rademacher", 9).unwrap()).is_err());
}

#[test]
fn weingarten_agrees_with_cumulants_on_small_cactuses() {
    let semi = CumulantTable::moments(vec![0.3, 1.2, -0.4, 2.5, 0.1, 7.0]);
    let kappa = moments_to_cumulants(&semi).unwrap();
    for d in crate::diagrams::connected_diagrams(6) {
        if !classify(&d).cactus {
            continue;
        }
        let w = weingarten_limit(&d, &semi).unwrap();
        let c = cactus_traffic_value(&d, &kappa).unwrap().value;
        assert!((w - c).abs() < 1e-10 * c.abs().max(1.0), "{d}: {w} vs {c}");
    }
}

#[test]
fn block_limits() {
    let rom = CumulantTable::preset("rom", 8).unwrap();
    let mut one = BlockCumulants::new(1);
    one.set(0, 0, rom.clone()).unwrap();
    for d in [Diagram::bowtie().rooted_at(0), Diagram::cycle(4).rooted_at(1), Diagram::cycle(2).rooted_at(0)] {
        let b = block_cactus_limit(&d, 0, &one).unwrap();
        assert_eq!(b, cactus_traffic_value(&d, &rom).unwrap().value);
    }

    let sigma = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 2.0]]).unwrap();
    let bg = BlockCumulants::block_goe(&sigma, 4).unwrap();
    let two = Diagram::cycle(2).rooted_at(0);
    assert!((block_cactus_limit(&two, 0, &bg).unwrap() - 0.75).abs() < 1e-15);
    assert!((block_cactus_limit(&two, 1, &bg).unwrap() - 1.25).abs() < 1e-15);
    assert_eq!(block_cactus_limit(&Diagram::cycle(3).rooted_at(0), 0, &bg).unwrap(), 0.0);

    // 2-cycle with a 2-cycle hanging at the far vertex: Σ_c κ^{rc} Σ_d κ^{cd}
    let d = Diagram::new(3, vec![(0, 1), (0, 1), (1, 2), (1, 2)], vec![0]).unwrap();
    let want: f64 = (0..2).map(|c| sigma.get(0, c) / 2.0 * (0..2).map(|e| sigma.get(c, e) / 2.0).sum::<f64>()).sum();
    assert!((block_cactus_limit(&d, 0, &bg).unwrap() - want).abs() < 1e-15);
    assert!(block_cactus_limit(&Diagram::cycle(2), 0, &bg).is_err());
    assert!(BlockCumulants::new(2).get(0, 1).is_err());
}

proptest! {
    #[test]
    fn transforms_round_trip(values in proptest::collection::vec(-2.0f64..2.0, 1..=8)) {
        let k = CumulantTable::cumulants(values.clone());
        let m = cumulants_to_moments(&k).unwrap();
        prop_assert!(close(&m.values, &literal_moments(&values), 1e-12));
        let back = moments_to_cumulants(&m).unwrap();
        // cancellation in the inverse transform scales with the moment sizes
        let scale = m.values.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        prop_assert!(back.values.iter().zip(&values).all(|(x, y)| (x - y).abs() <= 1e-12 * scale));
    }
}
