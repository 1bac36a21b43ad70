//! Randomized algebraic identities. Each case draws a seed and builds its
//! inputs with the shared seeded generators.

use proptest::prelude::*;
use rand::Rng;

use superhol::berger::{act_on_curvature, curvature_space, stored_pairs, CurvatureElement};
use superhol::geometry::{check_first_bianchi, check_second_bianchi, curvature, gauge_connection};
use superhol::holonomy::{flatness_certificate, infinitesimal_holonomy};
use superhol::linalg::{Echelon, SparseVec};
use superhol::superfunc::{parse_superfunction, Superfunction};
use superhol::superlin::{
    bracket_with, classical_superalgebra, generate_subalgebra, stabilizer_algebra, standard_even_form, supertrace,
    ClassicalName, StructureTensor, SubSuperalgebra, SuperDim, SuperMatrix,
};
use superhol::testing::{self, TestRng};
use superhol::{ChartSignature, Parity, Scalar};

fn parity(rng: &mut TestRng) -> Parity {
    Parity::from_bool(rng.gen_bool(0.5))
}

fn sf(rng: &mut TestRng, sig: ChartSignature) -> (Parity, Superfunction) {
    let p = parity(rng);
    (p, testing::superfunction(rng, sig, p, 4, 2))
}

fn mat(rng: &mut TestRng, dim: SuperDim) -> (Parity, SuperMatrix) {
    let p = parity(rng);
    (p, testing::matrix(rng, dim, p, 0.6))
}

fn sig_strategy() -> impl Strategy<Value = ChartSignature> {
    (0usize..=2, 1usize..=3).prop_map(|(n, m)| ChartSignature::new(n, m))
}

fn dim_strategy() -> impl Strategy<Value = SuperDim> {
    (0usize..=2, 0usize..=2).prop_filter("nonzero", |(p, q)| p + q > 0).prop_map(|(p, q)| SuperDim::new(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn supercommutativity(seed in any::<u64>(), sig in sig_strategy()) {
        let mut rng = testing::rng(seed);
        let ((pf, f), (pg, g)) = (sf(&mut rng, sig), sf(&mut rng, sig));
        let s = Scalar::sign(pf.is_odd() && pg.is_odd());
        prop_assert_eq!(f.mul(&g), g.mul(&f).scale(&s));
    }

    #[test]
    fn super_leibniz(seed in any::<u64>(), sig in sig_strategy()) {
        let mut rng = testing::rng(seed);
        let ((pf, f), (_, g)) = (sf(&mut rng, sig), sf(&mut rng, sig));
        for a in 0..sig.dim() {
            let sign = Scalar::sign(sig.coord_parity(a) == 1 && pf.is_odd());
            let rhs = f.partial0(a).mul(&g).add(&f.mul(&g.partial0(a)).scale(&sign));
            prop_assert_eq!(f.mul(&g).partial0(a), rhs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn odd_derivatives_anticommute(seed in any::<u64>(), sig in sig_strategy()) {
        let mut rng = testing::rng(seed);
        let (_, f) = sf(&mut rng, sig);
        for a in sig.n..sig.dim() {
            prop_assert!(f.partial0(a).partial0(a).is_zero());
            for b in sig.n..sig.dim() {
                prop_assert_eq!(f.partial0(a).partial0(b), f.partial0(b).partial0(a).neg());
            }
        }
    }

    #[test]
    fn printing_then_parsing_is_the_identity(seed in any::<u64>(), sig in sig_strategy()) {
        let mut rng = testing::rng(seed);
        let (_, f) = sf(&mut rng, sig);
        let text = f.to_string();
        let g = parse_superfunction(&text, sig).unwrap();
        prop_assert_eq!(g.to_string(), text);
        prop_assert_eq!(g, f);
    }

    #[test]
    fn evaluation_is_multiplicative_on_even_parts(seed in any::<u64>(), sig in sig_strategy()) {
        let mut rng = testing::rng(seed);
        let f = testing::superfunction(&mut rng, sig, Parity::Even, 4, 2);
        let g = testing::superfunction(&mut rng, sig, Parity::Even, 4, 2);
        let x: Vec<Scalar> = (0..sig.n).map(|_| testing::small_int(&mut rng)).collect();
        prop_assert_eq!(f.mul(&g).value(&x), &f.value(&x) * &g.value(&x));
        prop_assert_eq!(f.add(&g).value(&x), &f.value(&x) + &g.value(&x));
    }

    #[test]
    fn super_jacobi(seed in any::<u64>(), dim in dim_strategy()) {
        let mut rng = testing::rng(seed);
        let ((pa, a), (pb, b), (pc, c)) = (mat(&mut rng, dim), mat(&mut rng, dim), mat(&mut rng, dim));
        let lhs = bracket_with(&a, pa, &bracket_with(&b, pb, &c, pc), pb + pc);
        let r1 = bracket_with(&bracket_with(&a, pa, &b, pb), pa + pb, &c, pc);
        let r2 = bracket_with(&b, pb, &bracket_with(&a, pa, &c, pc), pa + pc);
        prop_assert_eq!(lhs, r1.add(&r2.scale(&Scalar::sign(pa.is_odd() && pb.is_odd()))));
    }

    #[test]
    fn supertrace_kills_brackets(seed in any::<u64>(), dim in dim_strategy()) {
        let mut rng = testing::rng(seed);
        let ((pa, a), (pb, b)) = (mat(&mut rng, dim), mat(&mut rng, dim));
        prop_assert!(supertrace(&bracket_with(&a, pa, &b, pb)).is_zero());
    }

    #[test]
    fn echelon_idempotence(seed in any::<u64>(), len in 1usize..8, count in 0usize..8) {
        let mut rng = testing::rng(seed);
        let vecs: Vec<SparseVec> = (0..count)
            .map(|_| SparseVec::from_dense(&(0..len).map(|_| if rng.gen_bool(0.4) { Scalar::zero() } else { testing::small_int(&mut rng) }).collect::<Vec<_>>()))
            .collect();
        let mut e = Echelon::new(len);
        for v in &vecs {
            e.insert(v);
        }
        let basis = e.basis().to_vec();
        let mut again = Echelon::new(len);
        for v in &basis {
            again.insert(v);
        }
        prop_assert_eq!(again.basis(), basis.as_slice());
        prop_assert!(e.rank() <= len.min(count));
        for v in &vecs {
            prop_assert!(e.contains(v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_subalgebras_are_idempotent_and_monotone(seed in any::<u64>(), dim in dim_strategy()) {
        let mut rng = testing::rng(seed);
        let gens: Vec<SuperMatrix> = (0..2).map(|_| mat(&mut rng, dim).1).collect();
        let h = generate_subalgebra(dim, &gens).unwrap();
        let basis: Vec<SuperMatrix> = h.homogeneous_basis().into_iter().map(|(_, m)| m).collect();
        prop_assert!(generate_subalgebra(dim, &basis).unwrap().same_as(&h));
        let more = generate_subalgebra(dim, &[gens.clone(), vec![mat(&mut rng, dim).1]].concat()).unwrap();
        let (a, b) = (h.graded_dim(), more.graded_dim());
        prop_assert!(b.p >= a.p && b.q >= a.q);
        prop_assert!(more.contains_all(&h));
    }

    #[test]
    fn stabilizers_are_closed(seed in any::<u64>(), dim in dim_strategy()) {
        let mut rng = testing::rng(seed);
        let (_, m) = mat(&mut rng, dim);
        let s = stabilizer_algebra(&StructureTensor::endomorphism(m).unwrap());
        prop_assert!(s.is_bracket_closed());
        prop_assert!(s.closure_with(&[]).same_as(&s));
    }

    #[test]
    fn torsion_free_connections_satisfy_both_bianchi_identities(seed in any::<u64>(), n in 0usize..=2, m in 1usize..=2) {
        let mut rng = testing::rng(seed);
        let conn = testing::torsion_free_connection(&mut rng, ChartSignature::new(n, m), 0.5, 2, 1);
        prop_assert_eq!(check_first_bianchi(&conn), Ok(true));
        prop_assert_eq!(check_second_bianchi(&conn), Ok(true));
    }

    #[test]
    fn pure_gauge_connections_are_flat_with_zero_holonomy(seed in any::<u64>(), n in 0usize..=2, m in 0usize..=2, p in 0usize..=2, q in 0usize..=2) {
        prop_assume!(p + q > 0);
        let mut rng = testing::rng(seed);
        let (sig, rank) = (ChartSignature::new(n, m), SuperDim::new(p, q));
        let k = testing::gauge_matrix(&mut rng, sig, rank, 2, 2);
        let conn = gauge_connection(sig, rank, &k).unwrap();
        prop_assert!(curvature(&conn).is_zero());
        prop_assert!(flatness_certificate(&conn).is_flat());
        let h = infinitesimal_holonomy(&conn, &vec![Scalar::zero(); n], 3).unwrap();
        prop_assert!(h.algebra.is_zero());
    }
}

fn random_curvature(rng: &mut TestRng, g: &SubSuperalgebra) -> Option<CurvatureElement> {
    let space = curvature_space(g);
    let p = parity(rng);
    let part = space.part(p);
    let first = part.first()?;
    let mut r = CurvatureElement::zero(first.dim(), p);
    for el in part {
        r = r.add(&el.scale(&testing::small_int(rng)));
    }
    Some(r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn algebra_action_preserves_curvature_space(seed in any::<u64>(), pick in 0usize..3) {
        let g = match pick {
            0 => classical_superalgebra(ClassicalName::Gl, 1, 1).unwrap(),
            1 => classical_superalgebra(ClassicalName::Osp, 1, 2).unwrap(),
            _ => stabilizer_algebra(&StructureTensor::form(standard_even_form(2, 0).unwrap()).unwrap()),
        };
        let mut rng = testing::rng(seed);
        if let Some(r) = random_curvature(&mut rng, &g) {
            prop_assert!(r.satisfies_constraints(&g));
            for (pa, a) in g.homogeneous_basis() {
                prop_assert!(act_on_curvature(&a, pa, &r).satisfies_constraints(&g));
            }
        }
    }

    #[test]
    fn torsion_free_curvature_lies_in_curvature_space_of_holonomy(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = testing::rng(seed);
        let sig = ChartSignature::new(n, 1);
        let conn = testing::torsion_free_connection(&mut rng, sig, 0.5, 2, 1);
        let x = vec![Scalar::zero(); n];
        let hol = infinitesimal_holonomy(&conn, &x, 3).unwrap();
        let dim = SuperDim::new(n, 1);
        let table = curvature(&conn);
        let stored = stored_pairs(dim).into_iter().map(|(a, b)| table.matrix_at(a, b, &x, dim)).collect();
        prop_assert!(CurvatureElement::from_stored(dim, Parity::Even, stored).satisfies_constraints(&hol.algebra));
    }
}
