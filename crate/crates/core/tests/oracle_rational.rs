//! Exact-rational oracles for the algebraic layer. Everything here runs
//! over `BigRational`, so equalities are exact: no tolerances, no rounding.
//! The checks re-derive the connection-matrix structure from first
//! principles (polynomial division only) and pin the frozen fixture values.

use num_bigint::BigInt;
use num_rational::BigRational;

use sextic::curve::{
    coefficient_row, cubic_discriminant, delta_row, discriminant, moduli_from_roots,
};
use sextic::gauss_manin::{gm_lower, gm_matrix, ConnectionMatrix};
use sextic::picard_fuchs::{pf_from_gm_roots, pf_matrices_from_roots, root_identity_residuals};

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Tiny deterministic generator for reproducible rational samples.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn rational(&mut self) -> Q {
        let n = (self.next() % 25) as i64 - 12;
        let d = (self.next() % 3) as i64 + 1;
        qr(n, d)
    }

    fn distinct_set<const N: usize>(&mut self) -> [Q; N] {
        loop {
            let cand: Vec<Q> = (0..N).map(|_| self.rational()).collect();
            let mut ok = true;
            for i in 0..N {
                for j in i + 1..N {
                    if cand[i] == cand[j] {
                        ok = false;
                    }
                }
            }
            if ok {
                return cand.try_into().unwrap();
            }
        }
    }
}

// Ascending-coefficient polynomial helpers over Q.

fn expand_roots(roots: &[Q]) -> Vec<Q> {
    let mut p = vec![Q::from_integer(BigInt::from(1))];
    for r in roots {
        let mut next = vec![q(0); p.len() + 1];
        for (i, ci) in p.iter().enumerate() {
            next[i + 1] += ci.clone();
            next[i] -= r * ci;
        }
        p = next;
    }
    p
}

fn derivative(p: &[Q]) -> Vec<Q> {
    (1..p.len()).map(|i| &p[i] * q(i as i64)).collect()
}

fn eval(p: &[Q], x: &Q) -> Q {
    let mut acc = q(0);
    for c in p.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// `(p(λ) − p(c)) / (λ − c)` by synthetic division; always exact.
fn divide_shifted(p: &[Q], c: &Q) -> Vec<Q> {
    let n = p.len() - 1;
    let mut s = vec![q(0); n];
    s[n - 1] = p[n].clone();
    for i in (1..n).rev() {
        s[i - 1] = p[i].clone() + c * &s[i];
    }
    s
}

#[test]
fn polynomial_helpers_are_exact() {
    let p = expand_roots(&[q(1), q(2)]);
    assert_eq!(p, vec![q(2), q(-3), q(1)]);
    assert_eq!(eval(&p, &q(5)), q(12));
    assert_eq!(derivative(&p), vec![q(-3), q(2)]);
    let s = divide_shifted(&p, &q(4));
    // (p(λ) − p(4))/(λ − 4) = λ + 1
    assert_eq!(s, vec![q(1), q(1)]);
}

#[test]
fn fixture_delta_row_and_frozen_values() {
    let e: [Q; 6] = [q(1), q(2), q(3), q(4), q(5), q(6)];
    let dr = delta_row(&e, 0);
    assert_eq!(dr.delta[0], q(-20));
    assert_eq!(dr.delta[4], q(-720));
    assert_eq!(dr.rprime, q(-120));
    assert_eq!(dr.rprime_via_quotient(&e[0]), q(-120));
    let others: Vec<Q> = e[1..].to_vec();
    let quotient = expand_roots(&others);
    for (i, d) in dr.delta.iter().enumerate() {
        assert_eq!(*d, quotient[4 - i], "delta coefficient {i}");
    }
    let row = coefficient_row(&e, 0);
    assert_eq!(row.b, qr(-61, 2));
    assert_eq!(row.a, q(2));
    assert_eq!(discriminant(&e), q(1194393600));
}

#[test]
fn delta_row_identity_at_random_sets() {
    let mut rng = Lcg(11);
    for _ in 0..25 {
        let e: [Q; 6] = rng.distinct_set();
        for k in 0..6 {
            let dr = delta_row(&e, k);
            assert_eq!(dr.rprime_via_quotient(&e[k]), dr.rprime);
        }
    }
}

/// The coefficient row from first principles. With Q(λ) = R(λ)/(λ−e_k),
/// the closed-cycle relations 0 = ∮ d(λ^m/w) and 0 = ∮ d(w/(λ−e_k)) give
/// ∮ dλ/((λ−e_k)w) = (2/R′(e_k)) ∮ (V−S)/w, where
/// V = (R′(λ)−R′(e_k))/(2(λ−e_k)) and S = (Q(λ)−Q(e_k))/(λ−e_k).
/// The stored row (G,D,C,B,A) must therefore equal the coefficients of
/// V−S, constant term first. This re-derivation uses nothing but exact
/// polynomial division.
#[test]
fn coefficient_row_matches_exact_division() {
    let mut rng = Lcg(23);
    for _ in 0..10 {
        let e: [Q; 6] = rng.distinct_set();
        let r_poly = expand_roots(&e);
        let r_prime = derivative(&r_poly);
        for k in 0..6 {
            let others: Vec<Q> = (0..6).filter(|i| *i != k).map(|i| e[i].clone()).collect();
            let quotient = expand_roots(&others);
            // sanity: Q(e_k) = R′(e_k)
            assert_eq!(eval(&quotient, &e[k]), eval(&r_prime, &e[k]));
            let v = divide_shifted(&r_prime, &e[k]);
            let s = divide_shifted(&quotient, &e[k]);
            let expect: Vec<Q> = v
                .iter()
                .zip(&s)
                .map(|(vi, si)| vi.clone() / q(2) - si.clone())
                .collect();
            let row = coefficient_row(&e, k).as_vec();
            for i in 0..5 {
                assert_eq!(row[i], expect[i], "row slot {i} at k={k}");
            }
        }
    }
}

#[test]
fn gm_matrix_matches_raw_assembly() {
    let mut rng = Lcg(37);
    for _ in 0..6 {
        let e: [Q; 6] = rng.distinct_set();
        for k in 0..6 {
            let m = gm_matrix(&e, k);
            // raw: (2/R′(e_k)) (1,e,...,e⁴)ᵀ(G,D,C,B,A) + strictly lower powers
            let dr = delta_row(&e, k);
            let row = coefficient_row(&e, k).as_vec();
            let mut raw = gm_lower(&e[k]);
            let mut col = vec![q(1)];
            for i in 1..5 {
                let last = col[i - 1].clone();
                col.push(last * e[k].clone());
            }
            let scale = q(2) / dr.rprime.clone();
            for i in 0..5 {
                for j in 0..5 {
                    raw.0[i][j] += scale.clone() * col[i].clone() * row[j].clone();
                }
            }
            assert_eq!(m.entries, raw, "k={k}");
            assert_eq!(
                m.entries,
                ConnectionMatrix::assemble(&m.parts, &m.lower),
                "reassembly k={k}"
            );
        }
    }
}

fn zero_sum_triple(rng: &mut Lcg) -> [Q; 3] {
    loop {
        let r1 = rng.rational();
        let r2 = rng.rational();
        let r3 = -(r1.clone() + r2.clone());
        if r1 != r2 && r1 != r3 && r2 != r3 {
            return [r1, r2, r3];
        }
    }
}

fn admissible_config(rng: &mut Lcg) -> ([Q; 3], [Q; 3]) {
    loop {
        let rho = zero_sum_triple(rng);
        let a: [Q; 3] = rng.distinct_set();
        let clash = rho.iter().any(|r| a.contains(r));
        if !clash {
            return (rho, a);
        }
    }
}

/// The moduli matrices built directly from the closed form and by pushing
/// the three branch-point matrices through the root-to-moduli chain rule
/// must agree entry by entry, exactly.
#[test]
fn moduli_route_equivalence_is_exact() {
    let mut rng = Lcg(51);
    for _ in 0..8 {
        let (rho, a) = admissible_config(&mut rng);
        let closed = pf_matrices_from_roots(&rho, &a);
        let transformed = pf_from_gm_roots(&rho, &a);
        assert_eq!(closed.u1.entries, transformed.u1.entries);
        assert_eq!(closed.u2.entries, transformed.u2.entries);
    }
}

/// The closed-form rows at each root must equal the generic coefficient
/// row of the six-point branch set evaluated at that root, and the weights
/// must be exactly ∓2ρ^p/(Φ(ρ)P′(ρ)²).
#[test]
fn moduli_rows_and_weights_match_generic_structure() {
    let mut rng = Lcg(67);
    for _ in 0..8 {
        let (rho, a) = admissible_config(&mut rng);
        let sys = pf_matrices_from_roots(&rho, &a);
        let e: [Q; 6] = [
            rho[0].clone(),
            rho[1].clone(),
            rho[2].clone(),
            a[0].clone(),
            a[1].clone(),
            a[2].clone(),
        ];
        for alpha in 0..3 {
            let generic = coefficient_row(&e, alpha).as_vec();
            assert_eq!(sys.u1.parts[alpha].row.to_vec(), generic.to_vec());
            assert_eq!(sys.u2.parts[alpha].row.to_vec(), generic.to_vec());
            let r = rho[alpha].clone();
            let beta = rho[(alpha + 1) % 3].clone();
            let gamma = rho[(alpha + 2) % 3].clone();
            let pprime = (r.clone() - beta) * (r.clone() - gamma);
            let phi = (r.clone() - a[0].clone())
                * (r.clone() - a[1].clone())
                * (r.clone() - a[2].clone());
            let pole = q(1) / (phi * pprime.clone() * pprime);
            assert_eq!(sys.u1.parts[alpha].weight, -(q(2) * r * pole.clone()));
            assert_eq!(sys.u2.parts[alpha].weight, -(q(2) * pole));
        }
    }
}

#[test]
fn root_identities_exact_at_rational_triples() {
    let samples: [[Q; 3]; 10] = [
        [q(1), q(2), q(-3)],
        [q(0), q(1), q(-1)],
        [qr(1, 2), qr(1, 3), qr(-5, 6)],
        [q(2), q(-5), q(3)],
        [qr(3, 4), qr(-1, 4), qr(-1, 2)],
        [q(7), q(-2), q(-5)],
        [qr(5, 3), qr(-2, 3), q(-1)],
        [q(4), q(1), q(-5)],
        [qr(-7, 2), q(3), qr(1, 2)],
        [q(6), q(-1), q(-5)],
    ];
    for rho in &samples {
        for (k, res) in root_identity_residuals(rho).iter().enumerate() {
            assert_eq!(*res, q(0), "identity k={} at {:?}", k + 1, rho);
        }
    }
    // the identities hold for arbitrary triples, not only zero-sum ones
    let general = [qr(1, 2), q(3), q(-1)];
    for res in root_identity_residuals(&general) {
        assert_eq!(res, q(0));
    }
}

#[test]
fn moduli_from_roots_round_trip_and_cubic_discriminant() {
    let mut rng = Lcg(83);
    for _ in 0..12 {
        let rho = zero_sum_triple(&mut rng);
        let (h1, h2) = moduli_from_roots(&rho);
        for r in &rho {
            let p = r * r * r + h1.clone() * r.clone() + h2.clone();
            assert_eq!(p, q(0));
        }
        let d3 = cubic_discriminant(&h1, &h2);
        let gaps = (rho[0].clone() - rho[1].clone())
            * (rho[0].clone() - rho[2].clone())
            * (rho[1].clone() - rho[2].clone());
        assert_eq!(d3, gaps.clone() * gaps);
    }
}

/// disc(R) factors as disc(P)·disc(A)·Res(P,A)² for R = P·A with
/// P = λ³+h₁λ+h₂ and A = ∏(λ−a_j); this closed form is what the path
/// safety check evaluates in h-space.
#[test]
fn sextic_discriminant_factorization() {
    let mut rng = Lcg(97);
    for _ in 0..10 {
        let (rho, a) = admissible_config(&mut rng);
        let (h1, h2) = moduli_from_roots(&rho);
        let e: [Q; 6] = [
            rho[0].clone(),
            rho[1].clone(),
            rho[2].clone(),
            a[0].clone(),
            a[1].clone(),
            a[2].clone(),
        ];
        let disc6 = discriminant(&e);
        let d3 = cubic_discriminant(&h1, &h2);
        let da = {
            let g01 = a[0].clone() - a[1].clone();
            let g02 = a[0].clone() - a[2].clone();
            let g12 = a[1].clone() - a[2].clone();
            g01.clone() * g01 * g02.clone() * g02 * g12.clone() * g12
        };
        let mut res2 = q(1);
        for aj in &a {
            let p = aj * aj * aj + h1.clone() * aj.clone() + h2.clone();
            res2 *= p.clone() * p;
        }
        assert_eq!(disc6, d3 * da * res2);
    }
}
