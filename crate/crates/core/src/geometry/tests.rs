use super::*;
use crate::parity::Parity;
use crate::superlin::{classical_superalgebra, stabilizer_algebra, ClassicalName, StructureTensor};
use crate::testing;

fn sf(text: &str, sig: ChartSignature) -> Superfunction {
    parse_superfunction(text, sig).unwrap()
}

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

use testing::odd_line;

fn unit_section(chart: Chart, b: usize) -> Vec<Superfunction> {
    (0..chart.r())
        .map(|a| if a == b { Superfunction::one(chart.sig) } else { Superfunction::zero(chart.sig) })
        .collect()
}

#[test]
fn flat_connection_has_zero_curvature() {
    let sig = ChartSignature::new(2, 2);
    let c = ConnectionData::zero(Chart::tangent(sig));
    assert!(curvature(&c).is_zero());
    assert!(ricci(&c).unwrap().is_zero());
    for t in covariant_derivatives(&c, None, 2).unwrap() {
        assert!(t.is_zero());
    }
}

#[test]
fn odd_line_example() {
    let c = odd_line();
    let sig = c.chart().sig;
    let r = curvature(&c);
    assert_eq!(*r.get(0, 0, 0, 0), Superfunction::constant(sig, s(2)));
    let t = torsion(&c).unwrap();
    assert_eq!(*t.get(0, 0, 0), sf("2*xi1", sig));
    assert_eq!(*ricci(&c).unwrap().get(0, 0), Superfunction::constant(sig, s(2)));
    assert!(!check_first_bianchi(&c).unwrap());
    assert_eq!(r.first_nonzero(), Some((0, 0, 0, 0)));
    // the first derivative at 0 stays proportional to the identity
    let tabs = covariant_derivatives(&c, None, 1).unwrap();
    for (_, m) in tabs[1].matrices_at(&[], SuperDim::new(0, 1)) {
        assert_eq!(m.dim(), SuperDim::new(0, 1));
    }
}

#[test]
fn operator_oracle_for_curvature() {
    let mut rng = testing::rng(11);
    let shapes = [((1, 1), (1, 1)), ((2, 1), (1, 1)), ((1, 2), (2, 2)), ((0, 2), (1, 1)), ((2, 2), (1, 1))];
    for _ in 0..6 {
        for &((n, m), (p, q)) in &shapes {
            let sig = ChartSignature::new(n, m);
            let chart = Chart::bundle(sig, SuperDim::new(p, q));
            let conn = testing::connection(&mut rng, chart, 0.6, 3, 2);
            let rt = curvature(&conn);
            for a in 0..chart.d() {
                for b in 0..chart.d() {
                    for bb in 0..chart.r() {
                        let e = unit_section(chart, bb);
                        let ab = nabla_section(&conn, a, &nabla_section(&conn, b, &e));
                        let ba = nabla_section(&conn, b, &nabla_section(&conn, a, &e));
                        let neg = chart.coord_parity(a) & chart.coord_parity(b) == 1;
                        for aa in 0..chart.r() {
                            let mut expect = ab[aa].clone();
                            expect.add_scaled(&ba[aa], &Scalar::sign(!neg));
                            assert_eq!(*rt.get(bb, a, b, aa), expect);
                        }
                    }
                }
            }
        }
    }
}

/// `(∇_{a_r} T)(rest) e_B = ∇_{a_r}(T(rest) e_B) − (−1)^{|a_r| S} T(rest)(∇_{a_r} e_B)`
/// with `T(f e_C) = (−1)^{|f| S} f T e_C`.
#[test]
fn operator_oracle_for_derivatives() {
    let mut rng = testing::rng(12);
    for (n, m, p, q) in [(1, 1, 1, 1), (1, 2, 1, 1), (2, 1, 2, 1), (0, 2, 1, 1)] {
        let sig = ChartSignature::new(n, m);
        let chart = Chart::bundle(sig, SuperDim::new(p, q));
        let conn = testing::connection(&mut rng, chart, 0.6, 3, 2);
        let tabs = covariant_derivatives(&conn, None, 2).unwrap();
        for order in 1..=2 {
            let (prev, next) = (&tabs[order - 1], &tabs[order]);
            for k in 0..next.slot_count() {
                let slots = next.slots(k);
                let (ar, rest) = (slots[0], &slots[1..]);
                let sp = rest.iter().map(|&x| chart.coord_parity(x)).sum::<u8>() & 1;
                for bb in 0..chart.r() {
                    let col: Vec<Superfunction> = (0..chart.r()).map(|aa| prev.get(rest, bb, aa).clone()).collect();
                    let mut expect = nabla_section(&conn, ar, &col);
                    for c in 0..chart.r() {
                        let g = conn.gamma(ar, bb, c);
                        let neg = (chart.coord_parity(ar) & sp) ^ (sp & ((chart.fiber_parity(c) + chart.fiber_parity(bb) + chart.coord_parity(ar)) & 1));
                        for aa in 0..chart.r() {
                            let t = g.mul(prev.get(rest, c, aa));
                            expect[aa].add_scaled(&t, &Scalar::sign(neg == 0));
                        }
                    }
                    for aa in 0..chart.r() {
                        assert_eq!(*next.get(&slots, bb, aa), expect[aa], "order {order} slots {slots:?}");
                    }
                }
            }
        }
    }
}

fn pointwise_span(tabs: &[DerivativeTable], rank: SuperDim, point: &[Scalar]) -> crate::superlin::SubSuperalgebra {
    let mats: Vec<SuperMatrix> = tabs.iter().flat_map(|t| t.matrices_at(point, rank)).map(|(_, m)| m).collect();
    crate::superlin::SubSuperalgebra::span(rank, &mats)
}

#[test]
fn derivative_span_is_reference_independent() {
    let mut rng = testing::rng(13);
    for (n, m) in [(1, 1), (2, 1), (1, 2)] {
        let sig = ChartSignature::new(n, m);
        let conn = testing::connection(&mut rng, Chart::tangent(sig), 0.6, 3, 2);
        let refc = testing::connection(&mut rng, Chart::tangent(sig), 0.6, 3, 2);
        let point: Vec<Scalar> = (0..n).map(|i| Scalar::from_int(i as i64 + 1)).collect();
        let a = covariant_derivatives(&conn, None, 2).unwrap();
        let b = covariant_derivatives(&conn, Some(&refc), 2).unwrap();
        for r in 0..=2 {
            let sa = pointwise_span(&a[..=r], conn.chart().rank, &point);
            let sb = pointwise_span(&b[..=r], conn.chart().rank, &point);
            assert!(sa.same_as(&sb), "order {r}");
        }
    }
}

#[test]
fn bianchi_identities_for_torsion_free_connections() {
    let mut rng = testing::rng(14);
    for (n, m) in [(2, 0), (1, 1), (2, 1), (0, 2), (1, 2)] {
        let sig = ChartSignature::new(n, m);
        for _ in 0..3 {
            let c = testing::torsion_free_connection(&mut rng, sig, 0.5, 2, 2);
            assert!(torsion(&c).unwrap().is_zero());
            assert!(check_first_bianchi(&c).unwrap());
            assert!(check_second_bianchi(&c).unwrap());
        }
    }
}

#[test]
fn tangent_only_operations_reject_bundles() {
    let c = ConnectionData::zero(Chart::bundle(ChartSignature::new(1, 0), SuperDim::new(1, 0)));
    assert_eq!(torsion(&c).unwrap_err(), GeometryError::NotTangent);
    assert_eq!(ricci(&c).unwrap_err(), GeometryError::NotTangent);
    let sig = ChartSignature::new(1, 1);
    let other = ConnectionData::zero(Chart::tangent(ChartSignature::new(2, 1)));
    let base = ConnectionData::zero(Chart::tangent(sig));
    assert_eq!(covariant_derivatives(&base, Some(&other), 1).unwrap_err(), GeometryError::ChartMismatch);
}

#[test]
fn parity_violations_are_rejected() {
    let sig = ChartSignature::new(1, 1);
    let mut map = BTreeMap::new();
    map.insert("1,1,2".to_string(), "x1".to_string());
    assert!(matches!(ConnectionData::from_map(Chart::tangent(sig), &map), Err(GeometryError::Parity { .. })));
    map.clear();
    map.insert("1,1,3".to_string(), "x1".to_string());
    assert!(matches!(ConnectionData::from_map(Chart::tangent(sig), &map), Err(GeometryError::KeyOutOfRange(_))));
}

#[test]
fn pure_gauge_connections_are_flat() {
    let mut rng = testing::rng(15);
    for (n, m, p, q) in [(1, 1, 1, 1), (2, 1, 1, 1), (1, 2, 2, 1), (2, 0, 2, 0)] {
        let sig = ChartSignature::new(n, m);
        let rank = SuperDim::new(p, q);
        let k = testing::gauge_matrix(&mut rng, sig, rank, 2, 2);
        let conn = gauge_connection(sig, rank, &k).unwrap();
        assert!(curvature(&conn).is_zero());
        for col in 0..rank.total() {
            let x: Vec<Superfunction> = (0..rank.total()).map(|d| k.get(d, col).clone()).collect();
            assert!(is_parallel(&conn, &x));
        }
    }
}

#[test]
fn constant_metric_has_zero_levi_civita() {
    let sig = ChartSignature::new(1, 2);
    let g = MetricData::constant(sig, &[vec![s(1), s(0), s(0)], vec![s(0), s(0), s(1)], vec![s(0), s(-1), s(0)]]).unwrap();
    let report = validate_metric(&g, &[s(0)]);
    assert!(report.valid, "{:?}", report.failures);
    assert_eq!(report.even_signature, Some((1, 0)));
    let c = levi_civita(&g).unwrap();
    assert!(c.is_zero());
    assert!(check_first_bianchi(&c).unwrap() && check_second_bianchi(&c).unwrap());
}

#[test]
fn walker_metric_matches_classical_christoffels() {
    // g = [[f, 1], [1, 0]]: classical Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})
    // with g^{-1} = [[0, 1], [1, −f]].
    let sig = ChartSignature::new(2, 0);
    let f = sf("x1*x2^2 + 3*x2", sig);
    let mut map = BTreeMap::new();
    map.insert("1,1".to_string(), f.to_string());
    map.insert("1,2".to_string(), "1".to_string());
    map.insert("2,1".to_string(), "1".to_string());
    let g = MetricData::from_map(sig, &map).unwrap();
    let conn = levi_civita(&g).unwrap();
    let gm = |i: usize, j: usize| g.get(i, j).clone();
    let ginv = |i: usize, j: usize| match (i, j) {
        (0, 1) | (1, 0) => Superfunction::one(sig),
        (1, 1) => f.neg(),
        _ => Superfunction::zero(sig),
    };
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut acc = Superfunction::zero(sig);
                for l in 0..2 {
                    let inner = gm(j, l).partial0(i).add(&gm(i, l).partial0(j)).sub(&gm(i, j).partial0(l));
                    acc = acc.add(&ginv(k, l).mul(&inner));
                }
                assert_eq!(*conn.gamma(i, j, k), acc.scale(&Scalar::ratio(1, 2)));
            }
        }
    }
    assert!(!curvature(&conn).is_zero());
    assert!(check_second_bianchi(&conn).unwrap());
}

#[test]
fn non_polynomial_inverse_is_rejected() {
    let sig = ChartSignature::new(2, 0);
    let mut map = BTreeMap::new();
    map.insert("1,1".to_string(), "1".to_string());
    map.insert("2,2".to_string(), "(1+x1)^2".to_string());
    let g = MetricData::from_map(sig, &map).unwrap();
    assert!(validate_metric(&g, &[s(0), s(0)]).valid);
    assert!(matches!(levi_civita(&g), Err(GeometryError::Metric(_))));
}

#[test]
fn odd_perturbed_metric_passes_post_conditions() {
    // g0 = diag(1, 1; J) plus x-dependent perturbations through ξ1ξ2
    let sig = ChartSignature::new(2, 2);
    let mut map = BTreeMap::new();
    for (k, v) in [
        ("1,1", "1 + x2*xi1*xi2"),
        ("2,2", "1 + x1^2*xi1*xi2"),
        ("1,2", "x1*xi1*xi2"),
        ("2,1", "x1*xi1*xi2"),
        ("3,4", "1 + x1*x2*xi1*xi2"),
        ("4,3", "-1 - x1*x2*xi1*xi2"),
        ("1,3", "x2*xi2"),
        ("3,1", "x2*xi2"),
    ] {
        map.insert(k.to_string(), v.to_string());
    }
    let g = MetricData::from_map(sig, &map).unwrap();
    assert!(validate_metric(&g, &[s(0), s(0)]).valid);
    let c = levi_civita(&g).unwrap();
    assert!(torsion(&c).unwrap().is_zero());
    assert!(is_metric_compatible(&c, &g));
    assert!(check_first_bianchi(&c).unwrap());
    assert!(check_second_bianchi(&c).unwrap());
}

#[test]
fn metric_validation_failures() {
    let sig = ChartSignature::new(1, 2);
    let good = [vec![s(1), s(0), s(0)], vec![s(0), s(0), s(1)], vec![s(0), s(-1), s(0)]];
    let mut mixed = good.clone();
    mixed[0][1] = s(1);
    mixed[1][0] = s(1);
    let r = validate_metric(&MetricData::constant(sig, &mixed).unwrap(), &[s(0)]);
    assert!(!r.valid && !r.body_blocks_ok);
    let mut sym = good.clone();
    sym[2][1] = s(1);
    let r = validate_metric(&MetricData::constant(sig, &sym).unwrap(), &[s(0)]);
    assert!(!r.valid && !r.supersymmetric);
    let r = validate_metric(&MetricData::constant(ChartSignature::new(2, 0), &[vec![s(1), s(0)], vec![s(0), s(0)]]).unwrap(), &[s(0), s(0)]);
    assert!(!r.nondegenerate);
    let lor = [vec![s(0), s(1)], vec![s(1), s(0)]];
    let r = validate_metric(&MetricData::constant(ChartSignature::new(2, 0), &lor).unwrap(), &[s(0), s(0)]);
    assert_eq!(r.even_signature, Some((1, 1)));
}

#[test]
fn identity_acts_trivially_on_endomorphisms() {
    let d = SuperDim::new(2, 1);
    assert!(tensor_extension(&SuperMatrix::identity(d), 1, 1).is_zero());
    assert_eq!(tensor_space_dim(d, 1, 1), SuperDim::new(5, 4));
    assert_eq!(tensor_space_dim(d, 0, 0), SuperDim::new(1, 0));
}

#[test]
fn dual_action_preserves_pairing() {
    // ⟨Aφ, X⟩ + (−1)^{|A||φ|} ⟨φ, AX⟩ = 0 on basis elements
    let mut rng = testing::rng(16);
    let d = SuperDim::new(2, 2);
    for parity in [Parity::Even, Parity::Odd] {
        let a = testing::matrix(&mut rng, d, parity, 0.8);
        let dual = tensor_extension(&a, 0, 1);
        let basis = tensor_basis(d, 0, 1);
        for (col, phi) in basis.iter().enumerate() {
            let b = phi[0];
            for x in 0..d.total() {
                let row = basis.iter().position(|t| t[0] == x).unwrap();
                let lhs = dual.get(row, col).clone();
                let rhs = a.get(b, x).clone();
                let total = if parity.bit() & d.parity(b) == 1 { &lhs - &rhs } else { &lhs + &rhs };
                assert!(total.is_zero());
            }
        }
    }
}

#[test]
fn metric_tensor_is_annihilated_by_its_stabilizer() {
    let d = SuperDim::new(2, 2);
    let g = crate::superlin::standard_even_form(2, 2).unwrap();
    let stab = stabilizer_algebra(&StructureTensor::form(g.clone()).unwrap());
    let v = form_as_tensor(&g);
    for (_, a) in stab.homogeneous_basis() {
        assert!(tensor_extension(&a, 0, 2).apply(&v).iter().all(Scalar::is_zero));
    }
    // and a generic gl element does not
    let gl = classical_superalgebra(ClassicalName::Gl, 2, 2).unwrap();
    assert!(gl.homogeneous_basis().iter().any(|(_, a)| tensor_extension(a, 0, 2).apply(&v).iter().any(|x| !x.is_zero())));
    let _ = d;
}

/// `½ str(J ∘ R(J∂_a, ∂_b))` with the plain supertrace `Σ_A (−1)^{|A|} M^A_A`.
fn half_str_j_r(rt: &CurvatureTable, j: &SuperMatrix, ch: Chart, a: usize, b: usize) -> Superfunction {
    let d = ch.d();
    let mut acc = Superfunction::zero(ch.sig);
    for aa in 0..d {
        for dd in 0..d {
            for c in 0..d {
                let coef = j.get(aa, dd) * j.get(c, a);
                if !coef.is_zero() {
                    acc.add_scaled(rt.get(aa, c, b, dd), &(&coef * &Scalar::sign(ch.coord_parity(aa) == 1)));
                }
            }
        }
    }
    acc.scale(&Scalar::ratio(1, 2))
}

#[test]
fn kahler_ricci_identity() {
    let flat_ricci = [false, true];
    for ((g, j), ricci_flat) in testing::kahler_examples().into_iter().zip(flat_ricci) {
        let conn = levi_civita(&g).unwrap();
        let ch = conn.chart();
        let d = ch.d();
        // J is parallel: Γ_a J = J Γ_a
        for a in 0..d {
            for r in 0..d {
                for c in 0..d {
                    let mut f = Superfunction::zero(ch.sig);
                    for k in 0..d {
                        f.add_scaled(conn.gamma(a, k, r), j.get(k, c));
                        f.add_scaled(conn.gamma(a, c, k), &-j.get(r, k));
                    }
                    assert!(f.is_zero());
                }
            }
        }
        let rt = curvature(&conn);
        assert!(!rt.is_zero());
        let ric = ricci(&conn).unwrap();
        assert_eq!(ric.is_zero(), ricci_flat);
        for a in 0..d {
            for b in 0..d {
                assert_eq!(*ric.get(a, b), half_str_j_r(&rt, &j, ch, a, b), "component ({a},{b})");
                let other = ric.get(b, a);
                let sym = if ch.coord_parity(a) & ch.coord_parity(b) == 1 { other.neg() } else { other.clone() };
                assert_eq!(*ric.get(a, b), sym);
            }
        }
    }
}
