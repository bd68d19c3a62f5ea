mod common;

use proptest::prelude::*;
use zariski::decomp::{
    decompose_effective_support, decompose_fujita, decompose_support, is_g_nef,
    least_nonneg_solution,
};
use zariski::exactalg::{
    all_principal_minors_positive, determinant, int, is_negative_definite, lp_optimize, rat,
    solve_linear, Direction, LinearProgram, LpStatus, RatMatrix, Rational, Relation,
};
use zariski::surface::{
    check_supported_negsquare, leq_divisor, max_divisor, pair, phi, Cycle, QDivisor,
};

use common::instance;

fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn to_matrix(rows: &[Vec<i64>]) -> RatMatrix {
    RatMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect(),
    )
    .unwrap()
}

fn square(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n).prop_flat_map(move |n| prop::collection::vec(prop::collection::vec(lo..=hi, n), n))
}

fn symmetric(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    square(max_n, lo, hi).prop_map(|m| {
        let n = m.len();
        (0..n)
            .map(|i| (0..n).map(|j| m[i.min(j)][i.max(j)]).collect())
            .collect()
    })
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

/// A generated instance plus a second divisor on the same configuration.
fn instance_pair() -> impl Strategy<Value = (u64, QDivisor)> {
    (0u64..100_000, prop::collection::vec(small_rational(), 9)).prop_map(|(seed, raw)| {
        let inst = instance(seed);
        let n = inst.config.len();
        (
            seed,
            QDivisor::new(inst.config.clone(), raw[..n].to_vec()).unwrap(),
        )
    })
}

fn principal_minors_positive_by_cofactor(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<i64>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| m[i][j]).collect())
            .collect();
        cofactor_det(&sub) > 0
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn determinant_matches_cofactor_expansion(m in square(4, -9, 9)) {
        prop_assert_eq!(determinant(&to_matrix(&m)), int(cofactor_det(&m)));
    }

    #[test]
    fn determinant_scales_with_rational_rows(m in square(4, -9, 9), q in 1i64..=7) {
        let scaled = RatMatrix::from_rows(
            m.iter().map(|r| r.iter().map(|&v| rat(v, q)).collect()).collect(),
        ).unwrap();
        let expected = Rational::from_integer(cofactor_det(&m).into())
            / Rational::from_integer(num_bigint::BigInt::from(q).pow(m.len() as u32));
        prop_assert_eq!(determinant(&scaled), expected);
    }

    #[test]
    fn negative_definite_matches_minors_of_negation(m in symmetric(4, -4, 3)) {
        let neg: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        let expected = principal_minors_positive_by_cofactor(&neg);
        let mat = to_matrix(&m);
        prop_assert_eq!(is_negative_definite(&mat).unwrap(), expected);
        prop_assert_eq!(all_principal_minors_positive(&mat.neg()).unwrap(), expected);
    }

    #[test]
    fn negative_definite_forms_are_negative(
        m in symmetric(4, -4, 3),
        ys in prop::collection::vec(prop::collection::vec(-5i64..=5, 4), 100),
    ) {
        let mat = to_matrix(&m);
        if is_negative_definite(&mat).unwrap() {
            for y in ys {
                let y: Vec<Rational> = y[..m.len()].iter().map(|&v| int(v)).collect();
                if y.iter().any(|v| *v != int(0)) {
                    prop_assert!(mat.quadratic_form(&y).unwrap() < int(0));
                }
            }
        }
    }

    #[test]
    fn solve_has_zero_residual(m in square(4, -6, 6), b in prop::collection::vec(small_rational(), 4)) {
        let mat = to_matrix(&m);
        let b = &b[..m.len()];
        match solve_linear(&mat, b) {
            Ok(x) => prop_assert_eq!(mat.mul_vec(&x).unwrap(), b.to_vec()),
            Err(_) => prop_assert_eq!(cofactor_det(&m), 0),
        }
    }

    #[test]
    fn two_variable_lp_matches_vertex_enumeration(
        rows in prop::collection::vec((-4i64..=4, -4i64..=4, 0i64..=8), 1..5),
        c in (-3i64..=3, -3i64..=3),
    ) {
        // 0 <= x, y <= 5 plus random constraints a x + b y <= r (origin is feasible).
        let mut cons: Vec<(i64, i64, i64)> = rows.clone();
        cons.extend([(-1, 0, 0), (0, -1, 0), (1, 0, 5), (0, 1, 5)]);
        let mut lp = LinearProgram::new(Direction::Maximize, vec![int(c.0), int(c.1)]);
        for &(a, b, r) in &cons {
            lp = lp.constrain(vec![int(a), int(b)], Relation::Le, int(r));
        }
        let sol = lp_optimize(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let feasible = |x: &Rational, y: &Rational| {
            cons.iter().all(|&(a, b, r)| int(a) * x + int(b) * y <= int(r))
        };
        prop_assert!(feasible(&sol.point[0], &sol.point[1]));
        let mut best: Option<Rational> = None;
        for (i, &(a1, b1, r1)) in cons.iter().enumerate() {
            for &(a2, b2, r2) in &cons[i + 1..] {
                let det = a1 * b2 - a2 * b1;
                if det == 0 {
                    continue;
                }
                let x = rat(r1 * b2 - r2 * b1, det);
                let y = rat(a1 * r2 - a2 * r1, det);
                if feasible(&x, &y) {
                    let v = int(c.0) * &x + int(c.1) * &y;
                    if best.as_ref().is_none_or(|b| v > *b) {
                        best = Some(v);
                    }
                }
            }
        }
        prop_assert_eq!(Some(sol.value), best);
    }

    #[test]
    fn pairing_is_symmetric_and_bilinear(
        (seed, a) in instance_pair(),
        raw in prop::collection::vec(small_rational(), 9),
        s in small_rational(),
    ) {
        let x = instance(seed).config;
        let b = QDivisor::new(x.clone(), raw[..x.len()].to_vec()).unwrap();
        let d = instance(seed).divisor;
        prop_assert_eq!(pair(&a, &b).unwrap(), pair(&b, &a).unwrap());
        let lhs = pair(&a.scale(&s).try_add(&b).unwrap(), &d).unwrap();
        prop_assert_eq!(lhs, &s * pair(&a, &d).unwrap() + pair(&b, &d).unwrap());
    }

    #[test]
    fn phi_is_the_self_intersection_of_the_supported_divisor(
        seed in 0u64..100_000,
        y in prop::collection::vec(small_rational(), 9),
    ) {
        let g = instance(seed).cycle;
        let y = &y[..g.len()];
        let d = g.divisor(y).unwrap();
        prop_assert_eq!(phi(&g, y).unwrap(), d.self_intersection());
        let sq = check_supported_negsquare(&d, &g).unwrap();
        prop_assert!(sq <= int(0));
        prop_assert_eq!(sq == int(0), d.is_zero());
    }

    #[test]
    fn max_divisor_is_least_upper_bound((seed, a) in instance_pair(), raw in prop::collection::vec(small_rational(), 9)) {
        let x = instance(seed).config;
        let b = QDivisor::new(x.clone(), raw[..x.len()].to_vec()).unwrap();
        let m = max_divisor(&a, &b).unwrap();
        prop_assert_eq!(&m, &max_divisor(&b, &a).unwrap());
        prop_assert_eq!(max_divisor(&a, &a).unwrap(), a.clone());
        prop_assert!(leq_divisor(&a, &m).unwrap() && leq_divisor(&b, &m).unwrap());
        for i in 0..x.len() {
            prop_assert!(m.coeff(i) == a.coeff(i) || m.coeff(i) == b.coeff(i));
        }
    }

    #[test]
    fn support_decomposition_invariants((seed, d) in instance_pair()) {
        let g = instance(seed).cycle;
        let dec = decompose_support(&d, &g).unwrap();
        prop_assert_eq!(dec.divisor(), d.clone());
        prop_assert!(is_g_nef(&dec.nef_part, &g).unwrap());
        prop_assert_eq!(pair(&dec.nef_part, &dec.negative_part).unwrap(), int(0));
        prop_assert_eq!(
            d.self_intersection(),
            dec.nef_part.self_intersection() + dec.negative_part.self_intersection()
        );
        for i in dec.negative_part.support() {
            prop_assert!(g.contains(i));
        }
    }

    #[test]
    fn effective_decompositions_agree_on_effective_divisors(seed in 0u64..100_000) {
        let inst = instance(seed);
        let eff = decompose_effective_support(&inst.divisor, &inst.cycle).unwrap();
        let gen = decompose_support(&inst.divisor, &inst.cycle).unwrap();
        prop_assert_eq!(&eff.nef_part, &gen.nef_part);
        let fu = decompose_fujita(&inst.divisor, None).unwrap();
        prop_assert!(zariski::decomp::is_nef_closed_world(&fu.nef_part));
        prop_assert!(leq_divisor(&fu.nef_part, &inst.divisor).unwrap());
    }

    #[test]
    fn least_element_is_below_every_feasible_point(
        (seed, d) in instance_pair(),
        objectives in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 3),
    ) {
        let g: Cycle = instance(seed).cycle;
        let b = g.pairings(&d).unwrap();
        let least = least_nonneg_solution(&g, &b).unwrap();
        for obj in objectives {
            let mut lp = LinearProgram::new(Direction::Maximize, obj[..g.len()].iter().map(|&v| int(v)).collect())
                .with_bounds(vec![zariski::exactalg::Bound::between(int(0), int(50)); g.len()]);
            for (row, rhs) in zariski::surface::submatrix(&g).rows().zip(&b) {
                lp = lp.constrain(row.to_vec(), Relation::Le, rhs.clone());
            }
            let sol = lp_optimize(&lp).unwrap();
            if sol.status == LpStatus::Optimal {
                for (x, l) in sol.point.iter().zip(&least) {
                    prop_assert!(l <= x);
                }
            }
        }
    }
}
