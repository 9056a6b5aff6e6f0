use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zcz_core::gbf::binvec;
use zcz_core::{
    build_h, build_multiple_zcz, certify_family, check_h_shift_identity, example1, verify_inter_zccz, verify_zcz,
    ConstructionParams, HCoefficients, MultipleZczFamily,
};

/// Exponent of sequence `(t1, t2)` at index `idx`, straight from the generating formula.
fn sequence_oracle(p: &ConstructionParams, t1: usize, t2: usize, idx: u64) -> u32 {
    let (m, k, s, q) = (p.m, p.k, p.s, p.q);
    let x = binvec(idx, m + k + 2);
    let b: Vec<u8> = (0..=k)
        .map(|i| ((t2 >> i) & 1) as u8)
        .chain((0..s).map(|i| ((t1 >> i) & 1) as u8))
        .collect();
    let js = p.full_j();
    let (g1, g2) = p.ends();
    let h = build_h(k, &p.h).unwrap();
    let mut binary = h.evaluate(&x[m..]).unwrap();
    for beta in 0..k {
        binary += u32::from(x[m + beta] * x[js[beta]] + b[beta] * x[js[beta]]);
    }
    for beta in k - s..k {
        binary += u32::from(b[s + 1 + beta] * x[m + beta]);
    }
    binary += u32::from(x[m + k] * x[g1] + b[k] * x[g2]);
    (p.f.evaluate(&x[..m]).unwrap() + (q / 2) * (binary % 2)) % q
}

fn naive_pccf(a: &[u32], b: &[u32], q: u32, u: usize) -> (f64, f64) {
    let n = a.len();
    (0..n).fold((0.0, 0.0), |(re, im), i| {
        let d = (a[i] + q - b[(i + u) % n]) % q;
        let t = 2.0 * std::f64::consts::PI * f64::from(d) / f64::from(q);
        (re + t.cos(), im + t.sin())
    })
}

/// Zone checks over every pair and lag, with the naive periodic correlator.
fn oracle_zones(fam: &MultipleZczFamily) -> (bool, bool) {
    let q = fam.params.q;
    let len = fam.sequence_len();
    let zero = |a: &[u32], b: &[u32], u: usize| {
        let (re, im) = naive_pccf(a, b, q, u);
        re.abs() < 1e-6 && im.abs() < 1e-6
    };
    let lags = |z: usize| (0..=z).chain(len - z..len);
    let mut per_set = true;
    let mut inter = true;
    for (x, set_x) in fam.sets.iter().enumerate() {
        for (y, set_y) in fam.sets.iter().enumerate() {
            for (i, a) in set_x.iter().enumerate() {
                for (j, b) in set_y.iter().enumerate() {
                    if x == y {
                        per_set &= lags(fam.z)
                            .filter(|&u| !(i == j && u == 0))
                            .all(|u| zero(a.exponents(), b.exponents(), u));
                    } else {
                        inter &= lags(fam.zc).all(|u| zero(a.exponents(), b.exponents(), u));
                    }
                }
            }
        }
    }
    (per_set, inter)
}

#[test]
fn sequences_match_generating_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases = vec![example1(), ConstructionParams::with_defaults(2, 4, 2, 2).unwrap()];
    for (q, m, k, s) in [(4, 4, 2, 1), (2, 5, 3, 2), (4, 3, 1, 0), (8, 4, 2, 0)] {
        cases.push(ConstructionParams::random(q, m, k, s, &mut rng).unwrap());
    }
    for p in cases {
        let fam = build_multiple_zcz(&p).unwrap();
        for (t1, set) in fam.sets.iter().enumerate() {
            for (t2, seq) in set.iter().enumerate() {
                for idx in 0..seq.len() {
                    assert_eq!(
                        seq.exponent(idx),
                        Some(sequence_oracle(&p, t1, t2, idx as u64)),
                        "{p:?} ({t1},{t2})[{idx}]"
                    );
                }
            }
        }
    }
}

#[test]
fn certificates_agree_with_naive_oracle() {
    for p in [
        example1(),
        ConstructionParams::with_defaults(2, 4, 2, 2).unwrap(),
        ConstructionParams::with_defaults(4, 3, 1, 1).unwrap(),
    ] {
        let fam = build_multiple_zcz(&p).unwrap();
        assert_eq!(oracle_zones(&fam), (true, true));
        assert!(certify_family(&fam.sets, fam.z, fam.zc).unwrap().pass);
    }
}

#[test]
fn parameter_grid_certifies() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for q in [2u32, 4] {
        for m in 3..=5 {
            for k in 1..=m - 2 {
                for s in 0..=k {
                    for variant in 0..4 {
                        let p = if variant == 0 {
                            ConstructionParams::with_defaults(q, m, k, s).unwrap()
                        } else {
                            ConstructionParams::random(q, m, k, s, &mut rng).unwrap()
                        };
                        let fam = build_multiple_zcz(&p).unwrap();
                        assert_eq!((fam.z, fam.zc), (1 << m, (1 << (m - s)) - 1));
                        for set in &fam.sets {
                            let cert = verify_zcz(set, fam.z).unwrap();
                            assert!(cert.pass, "{p:?}: {:?}", cert.first_witness());
                        }
                        for a in 0..fam.sets.len() {
                            for b in a + 1..fam.sets.len() {
                                assert!(
                                    verify_inter_zccz(&fam.sets[a], &fam.sets[b], fam.zc).unwrap().pass,
                                    "{p:?}"
                                );
                            }
                        }
                        for t1 in 0..p.set_count() {
                            for t2 in 0..p.set_size() {
                                assert!(p.sequence_function(t1, t2).unwrap().degree() <= 2);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn shift_identity_holds_for_random_seed_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for sample in 0..120 {
        let k = sample % 5;
        let h = build_h(k, &HCoefficients::random(k, &mut rng)).unwrap();
        let report = check_h_shift_identity(&h, k).unwrap();
        assert!(report.pass, "k={k} {h}: {:?}", report.failures);
    }
    for k in 0..5 {
        let zero = zcz_core::Gbf::zero(2, k + 2).unwrap();
        assert!(!check_h_shift_identity(&zero, k).unwrap().pass);
    }
}

#[test]
fn zones_are_tight_for_examples() {
    let fam = build_multiple_zcz(&example1()).unwrap();
    assert!(!verify_inter_zccz(&fam.sets[0], &fam.sets[1], fam.zc + 1).unwrap().pass);
    assert!(!verify_zcz(&fam.sets[0], fam.z + 1).unwrap().pass);
}
