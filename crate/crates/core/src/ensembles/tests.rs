use super::*;
use crate::diagrams::Diagram;
use crate::graphpoly::eval_w_uniform;
use crate::matrix::gemm_tn;
use crate::stats::mean_se;

fn gen(kind: EnsembleKind, n: usize, seed: u64) -> Matrix {
    generate(&EnsembleSpec::new(kind, n, seed)).unwrap().values
}

fn involution_error(m: &Matrix) -> f64 {
    m.matmul(m).unwrap().sub(&Matrix::identity(m.rows())).unwrap().frobenius_norm()
}

#[test]
fn hadamard_examples() {
    let h = hadamard(2);
    let s = 1.0 / 2f64.sqrt();
    assert_eq!(h.as_slice(), &[s, s, s, -s]);
    let h = gen(EnsembleKind::Hadamard, 64, 0);
    assert!(h.is_symmetric(0.0));
    assert!(involution_error(&h) < 1e-9);
    assert!(generate(&EnsembleSpec::new(EnsembleKind::Hadamard, 6, 0)).is_err());
}

#[test]
fn sine_and_cosine_transforms_are_involutions() {
    for n in [1, 7, 50, 64] {
        let d = dst(n);
        assert!(d.is_symmetric(0.0));
        assert!(involution_error(&d) < 1e-9, "dst {n}");
        assert!(d.max_abs() <= (2.0 / (n as f64 + 1.0)).sqrt() + 1e-15);
        let c = dct(n);
        assert!(c.is_symmetric(0.0));
        assert!(involution_error(&c) < 1e-9, "dct {n}");
        assert!(c.max_abs() <= 2f64.sqrt() / (n as f64).sqrt() + 1e-15);
    }
}

#[test]
fn rom_has_eigenvalues_plus_minus_one() {
    let n = 256;
    let m = gen(EnsembleKind::Rom, n, 3);
    assert!(m.is_symmetric(0.0));
    assert!(involution_error(&m) <= 1e-8 * n as f64);
    for l in m.symmetric_eigenvalues().unwrap() {
        assert!((l.abs() - 1.0).abs() < 1e-8, "{l}");
    }
    let r = gen(EnsembleKind::RRom, n, 3);
    assert!(r.row_sums().iter().all(|s| s.abs() < 1e-10 * (n as f64).sqrt()));
}

#[test]
fn haar_is_orthogonal_with_uniform_first_entry() {
    let q = gen(EnsembleKind::HaarOrthogonal, 40, 1);
    let qtq = gemm_tn(&q, &q);
    assert!(qtq.sub(&Matrix::identity(40)).unwrap().max_abs() < 1e-12);
    let n = 8;
    let xs: Vec<f64> = (0..200).map(|s| gen(EnsembleKind::HaarOrthogonal, n, s).get(0, 0).powi(2)).collect();
    let (m, se) = mean_se(&xs);
    assert!((m - 1.0 / n as f64).abs() <= 3.0 * se.unwrap(), "{m} vs {}", 1.0 / n as f64);
    // a panel boundary is crossed
    let f = haar_frame(150, 130, &mut stream_rng(5, 0));
    let g = crate::matrix::gemm_nt(&f, &f);
    assert!(g.sub(&Matrix::identity(130)).unwrap().max_abs() < 1e-12);
}

#[test]
fn reproducible_by_seed_and_stream() {
    let spec = EnsembleSpec::new(EnsembleKind::RRom, 64, 7);
    let a = generate(&spec).unwrap();
    let b = generate(&spec).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.provenance, Provenance { seed: 7, stream: 0 });
    let c = generate_stream(&spec, 1).unwrap();
    assert_ne!(a.values, c.values);
    assert_ne!(a.values, gen(EnsembleKind::RRom, 64, 8));
}

fn offdiag_variance(m: &Matrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> f64 {
    let mut acc = 0.0;
    let mut count = 0;
    for i in rows {
        for j in cols.clone() {
            if i != j {
                acc += m.get(i, j).powi(2);
                count += 1;
            }
        }
    }
    acc / count as f64
}

#[test]
fn wigner_variances() {
    let n = 300;
    let g = gen(EnsembleKind::Goe, n, 2);
    assert!(g.is_symmetric(0.0));
    assert!((offdiag_variance(&g, 0..n, 0..n) * n as f64 - 1.0).abs() < 0.03);
    let diag: f64 = g.diag().iter().map(|x| x * x).sum::<f64>() / n as f64;
    assert!((diag * n as f64 - 2.0).abs() < 0.5);
    let r = gen(EnsembleKind::Wigner { entry_law: EntryLaw::Rademacher }, n, 2);
    assert!(r.as_slice().iter().all(|x| (x.abs() - 1.0 / (n as f64).sqrt()).abs() < 1e-15));
    let w = gen(EnsembleKind::Wigner { entry_law: EntryLaw::Normal }, n, 2);
    assert!(w.is_symmetric(0.0));
}

#[test]
fn block_goe_layout() {
    let n = 400;
    let sigma = vec![1.0, 0.25, 0.25, 4.0];
    let m = gen(EnsembleKind::BlockGoe { q: 2, sigma }, n, 9);
    assert!(m.is_symmetric(0.0));
    let h = n / 2;
    let v = |r: std::ops::Range<usize>, c: std::ops::Range<usize>| offdiag_variance(&m, r, c) * n as f64;
    assert!((v(0..h, 0..h) - 1.0).abs() < 0.05);
    assert!((v(0..h, h..n) - 0.25).abs() < 0.02);
    assert!((v(h..n, h..n) - 4.0).abs() < 0.2);
    // off-diagonal blocks are symmetric themselves
    for i in 0..h {
        for j in 0..h {
            assert_eq!(m.get(i, h + j), m.get(j, h + i));
        }
    }
    let spec = EnsembleSpec::new(EnsembleKind::BlockGoe { q: 2, sigma: vec![1.0, 0.5, 0.5, 1.0] }, n, 0);
    assert_eq!(spec.block_labels().unwrap()[h], 1);
    for bad in [vec![1.0, 0.5, 0.4, 1.0], vec![1.0, -0.5, -0.5, 1.0], vec![1.0]] {
        assert!(generate(&EnsembleSpec::new(EnsembleKind::BlockGoe { q: 2, sigma: bad }, n, 0)).is_err());
    }
    assert!(generate(&EnsembleSpec::new(EnsembleKind::BlockGoe { q: 3, sigma: vec![1.0; 9] }, n, 0)).is_err());
}

#[test]
fn community_layout() {
    let n = 400;
    for inner in [CommunityInner::Goe, CommunityInner::Rom] {
        let m = gen(EnsembleKind::Community { q: 4, inner }, n, 4);
        assert!(m.is_symmetric(0.0));
        let b = n / 4;
        assert!((offdiag_variance(&m, 0..b, 0..b) * n as f64 - 1.0).abs() < 0.1);
        assert!((offdiag_variance(&m, b..n, 0..n) * n as f64 - 1.0).abs() < 0.05);
    }
    let k = CommunityInner::Rom.cumulants(4, 6).unwrap();
    assert!((k.get(2).unwrap() - 0.25).abs() < 1e-15);
    assert!((k.get(4).unwrap() + 1.0 / 16.0).abs() < 1e-15);
}

#[test]
fn orth_invariant_spectrum() {
    let vals = vec![3.0, -1.0, 0.5];
    let m = gen(EnsembleKind::OrthInvariant { eigenvalues: EigenSampler::Fixed { values: vals } }, 30, 1);
    assert!(m.is_symmetric(0.0));
    let ev = m.symmetric_eigenvalues().unwrap();
    assert!((ev[0] + 1.0).abs() < 1e-10 && (ev[29] - 3.0).abs() < 1e-10);
    let s = gen(EnsembleKind::OrthInvariant { eigenvalues: EigenSampler::Semicircle }, 200, 1);
    assert!((s.matmul(&s).unwrap().trace() / 200.0 - 1.0).abs() < 0.2);
    let u = gen(EnsembleKind::OrthInvariant { eigenvalues: EigenSampler::Uniform { lo: 1.0, hi: 2.0 } }, 20, 1);
    assert!(u.symmetric_eigenvalues().unwrap().iter().all(|&l| (1.0 - 1e-10..=2.0 + 1e-10).contains(&l)));
}

#[test]
fn puncture_examples() {
    let n = 12;
    let pi = puncture(&Matrix::identity(n)).unwrap();
    let expect = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64);
    assert!(pi.sub(&expect).unwrap().max_abs() < 1e-15);
    assert!(pi.matmul(&pi).unwrap().sub(&pi).unwrap().max_abs() < 1e-12);
    assert!(puncture(&Matrix::filled(n, n, 1.0)).unwrap().max_abs() < 1e-15);

    let a = gen(EnsembleKind::Goe, n, 1);
    let dense = pi.matmul(&a).unwrap().matmul(&pi).unwrap();
    let p = puncture(&a).unwrap();
    assert!(p.is_symmetric(0.0));
    assert!(p.sub(&dense).unwrap().max_abs() < 1e-12);
    assert!(puncture(&Matrix::zeros(2, 3)).is_err());
}

#[test]
fn puncturing_the_hadamard_matrix_removes_the_two_path() {
    let n = 1024;
    let h = hadamard(n);
    let path = Diagram::path(2);
    let w = |m: &Matrix| eval_w_uniform(&path, m).unwrap().as_scalar().unwrap();
    let diff = (w(&h) - w(&puncture(&h).unwrap())) / n as f64;
    assert!((diff - 1.0).abs() < 0.05, "{diff}");
}

fn hanging_triangle() -> Diagram {
    // path 0-1-2 with a triangle at 1, roots at the path ends
    Diagram::new(5, vec![(0, 1), (1, 2), (1, 3), (3, 4), (4, 1)], vec![0, 2]).unwrap()
}

#[test]
fn audit_examples() {
    let set = vec![
        ("path2".to_string(), Diagram::path(2).rooted_at_pair(0, 2)),
        ("triangle".to_string(), hanging_triangle()),
        ("rooted_cycle3".to_string(), Diagram::cycle(3).rooted_at(0)),
    ];
    let eye = delocalization_audit(&Matrix::identity(16), &set).unwrap();
    assert!(eye.entries[..2].iter().all(|e| e.value == 0.0));
    assert!((eye.norm - 1.0).abs() < 1e-9);

    let mut reports = Vec::new();
    for n in [64, 256, 1024] {
        let r = delocalization_audit(&hadamard(n), &set).unwrap();
        assert!(r.entries[0].value < 1e-12);
        reports.push(r);
    }
    let tri: Vec<f64> = reports.iter().map(|r| r.entries[1].value).collect();
    assert!(tri[0] > tri[1] && tri[1] > tri[2], "{tri:?}");
    let slopes = scaling_exponents(&reports);
    assert_eq!(slopes[0].0, "norm");
    assert!(slopes[0].1.unwrap().abs() < 1e-6);
    assert!(slopes[2].1.unwrap() < -0.3);
    assert!(slopes[1].1.is_none());
    assert!(delocalization_audit(&hadamard(4), &[("bare".into(), Diagram::cycle(3))]).is_err());
}

#[test]
fn spec_json() {
    let s: EnsembleSpec = serde_json::from_str(r#"{"kind":"hadamard","n":1024,"seed":7}"#).unwrap();
    assert_eq!(s, EnsembleSpec::new(EnsembleKind::Hadamard, 1024, 7));
    let b: EnsembleSpec = serde_json::from_str(r#"{"kind":"block_goe","q":2,"sigma":[1,0.5,0.5,1],"n":8}"#).unwrap();
    assert_eq!(b.kind, EnsembleKind::BlockGoe { q: 2, sigma: vec![1.0, 0.5, 0.5, 1.0] });
    let p: EnsembleSpec = serde_json::from_str(r#"{"kind":"punctured","inner":{"kind":"dst"},"n":8}"#).unwrap();
    assert_eq!(p.kind.name(), "punctured_dst");
    assert!(p.kind.is_deterministic());
    let o: EnsembleSpec =
        serde_json::from_str(r#"{"kind":"orth_invariant","eigenvalues":{"law":"uniform","lo":0,"hi":1},"n":4}"#).unwrap();
    let text = serde_json::to_string(&o).unwrap();
    assert_eq!(serde_json::from_str::<EnsembleSpec>(&text).unwrap(), o);
}
