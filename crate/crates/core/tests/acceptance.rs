//! Acceptance criteria: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lgla::catalog::{condition_c, construct, pullback, CatalogName};
use lgla::classify::{classify, Classification};
use lgla::jordan::{kkt, AdmissibleDatum, GradedJordan};
use lgla::local_lie::lemma66_table;
use lgla::matrix::{echelon, nullspace, ExactMatrix};
use lgla::scalar_lie::{
    centroid_solve, check_jacobi, diagonal_equivalence, is_centroid_element, reflection, sigma_pi, verify_rescaling,
};
use lgla::symbols::{
    commutative_product, lemma65_maps, module_axiom_violations, module_recognize, opd_commutator, opd_product,
    poisson_bracket, ABKind, ABModule, ActionWindow, DensityModule, DensityModuleSpec, DensityTensor, PdoTerm,
    SymbolIndex, TwistedPDO,
};
use lgla::{AdditiveMap, GradingGroup, LatticeBox, LatticePoint, Scalar};

type Outcome = Result<String, String>;

fn q(s: &str) -> Scalar {
    s.parse().unwrap()
}

fn p1(x: i64) -> LatticePoint {
    LatticePoint(vec![x])
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {:.1?}, limit {:?}", t, limit))
    } else {
        Ok(())
    }
}

fn c1_jacobi() -> Outcome {
    let start = Instant::now();
    let pi = AdditiveMap::pair(vec![[q("1"), q("0")], [q("0"), q("i")]]);
    if !condition_c(&pi).map_err(|e| e.to_string())?.holds() {
        return Err("π(m,n) = (m, n·i) should satisfy condition 𝒞".into());
    }
    let s = construct(&CatalogName::WPi { pi }).map_err(|e| e.to_string())?;
    let v = check_jacobi(&s, &LatticeBox::new(4));
    within(Duration::from_secs(30), start)?;
    if v.is_empty() {
        Ok(format!("0 violations on 81 degrees in {:.2?}", start.elapsed()))
    } else {
        Err(format!("{} violations, first {:?}", v.len(), v[0]))
    }
}

fn c2_oracle() -> Outcome {
    let start = Instant::now();
    let xs = ["-2", "-1", "0", "1", "2", "1/2", "1/3"];
    let mut monomials = Vec::new();
    for s in -3..=3 {
        for x in xs {
            monomials.push((Scalar::from_int(s), q(x)));
        }
    }
    let mut cases = 0;
    for (s1, x1) in &monomials {
        for (s2, x2) in &monomials {
            let p = TwistedPDO::monomial(s1.clone(), x1.clone());
            let r = TwistedPDO::monomial(s2.clone(), x2.clone());
            let lam = SymbolIndex::from_exponents(s1, x1);
            let mu = SymbolIndex::from_exponents(s2, x2);
            // Leading product term: coefficient 1 on E_{λ+μ+ρ}.
            let prod = opd_product(&p, &r, 3);
            let (ps, px) = commutative_product(&lam, &mu).exponents();
            if !prod.coefficient(&ps, &px).is_one() || prod.terms.iter().any(|t| t.x.re > px.re && t.x.frac() == px.frac()) {
                return Err(format!("product leading term wrong for z^{s1}d^{x1} · z^{s2}d^{x2}"));
            }
            // Commutator: the top order cancels, the next one is the Poisson bracket.
            let comm = opd_commutator(&p, &r, 3);
            let (c, idx) = poisson_bracket(&lam, &mu);
            let (bs, bx) = idx.exponents();
            let top = comm.coefficient(&ps, &px);
            if !top.is_zero() || comm.coefficient(&bs, &bx) != c {
                return Err(format!("commutator leading term wrong for z^{s1}d^{x1}, z^{s2}d^{x2}"));
            }
            cases += 1;
        }
    }
    within(Duration::from_secs(10), start)?;
    if cases < 500 {
        return Err(format!("only {cases} cases"));
    }
    Ok(format!("{cases}/{cases} cases agree in {:.2?}", start.elapsed()))
}

fn c3_level3_dims() -> Outcome {
    let start = Instant::now();
    let deltas: Vec<Scalar> = ["-1", "2", "0", "1", "3", "1/3"].iter().map(|d| q(d)).collect();
    let rows = lemma66_table(&deltas, &Scalar::zero(), 12).map_err(|e| e.to_string())?;
    let dims: Vec<usize> = rows.iter().map(|r| r.dim).collect();
    within(Duration::from_secs(60), start)?;
    if dims != vec![1, 1, 2, 2, 2, 2] {
        return Err(format!("dims {dims:?}"));
    }
    if !rows.iter().all(|r| r.stable) {
        return Err("some dimensions change when the window shrinks".into());
    }
    Ok(format!("dims {dims:?} in {:.1?}", start.elapsed()))
}

fn small_gaussian(rng: &mut ChaCha8Rng) -> Scalar {
    let re = Scalar::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2));
    if rng.gen_bool(0.5) {
        &re + &(&Scalar::i() * &Scalar::ratio(rng.gen_range(-2..=2), rng.gen_range(1..=2)))
    } else {
        re
    }
}

/// Random rank-2 π with injective generator images satisfying condition 𝒞.
fn random_pi(rng: &mut ChaCha8Rng) -> AdditiveMap {
    loop {
        let pi = AdditiveMap::pair(
            (0..2).map(|_| [small_gaussian(rng), small_gaussian(rng)]).collect(),
        );
        let cc = condition_c(&pi).unwrap();
        if cc.injective && cc.holds() {
            return pi;
        }
    }
}

/// The π that the normalization stack (l(α) = 1, π(α) = (1,0)) assigns to
/// W_π: A·π with A fixing ρ and sending π(α) to (1, 0).
fn normalized_pi(pi: &AdditiveMap, alpha: &LatticePoint) -> AdditiveMap {
    let [a, b] = pi.apply2(alpha).unwrap();
    let d = &a - &b;
    let p = &(&Scalar::one() - &a) / &d;
    let qq = &(-&b) / &d;
    let one = Scalar::one();
    pi.compose_linear(&[vec![&one + &p, -&p], vec![qq.clone(), &one - &qq]])
}

fn c4_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let b = LatticeBox::new(4);
    let mut ok = 0;
    for k in 0..20 {
        let pi = random_pi(&mut rng);
        let s = construct(&CatalogName::WPi { pi: pi.clone() }).map_err(|e| e.to_string())?;
        match classify(&s, &b) {
            Classification::NonIntegrable { pi: got, alpha, witness, .. } => {
                let expect = normalized_pi(&pi, &alpha);
                if got != expect {
                    return Err(format!("instance {k}: recovered {:?}, expected {:?}", got.images, expect.images));
                }
                let target = construct(&CatalogName::WPi { pi: got }).unwrap();
                if !verify_rescaling(&s, &target, &b, &witness) {
                    return Err(format!("instance {k}: witness does not verify"));
                }
                ok += 1;
            }
            other => return Err(format!("instance {k} ({:?}): {other:?}", pi.images)),
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("{ok}/20 exact in {:.1?}", start.elapsed()))
}

fn c5_integrable() -> Outcome {
    let mut notes = Vec::new();
    for (name, radius, n, matched) in [
        (CatalogName::A1_1, 6, 1, "pullback(sl2_gamma3)"),
        (CatalogName::A2_2, 8, 2, "pullback(sl3_gamma8)"),
    ] {
        let s = construct(&name).unwrap();
        let b = LatticeBox::new(radius);
        match classify(&s, &b) {
            Classification::Integrable { type_n, matched: m, images, witness, .. } => {
                if type_n != n || m != matched {
                    return Err(format!("{name}: type {type_n}, matched {m}"));
                }
                let fin = construct(if n == 1 { &CatalogName::Sl2Gamma3 } else { &CatalogName::Sl3Gamma8 }).unwrap();
                let pb = pullback(&GradingGroup::free(1), &images, &fin).unwrap();
                if !verify_rescaling(&s, &pb, &b, &witness) {
                    return Err(format!("{name}: witness does not verify"));
                }
                notes.push(format!("{name} → type {type_n} {m}"));
            }
            other => return Err(format!("{name}: {other:?}")),
        }
    }
    Ok(notes.join("; "))
}

fn c6_kkt() -> Outcome {
    let d = AdmissibleDatum { j: GradedJordan::multiples(3), sublattice: vec![p1(3)], alpha: p1(1) };
    let b = LatticeBox::new(6);
    let s = kkt(&d, &b).map_err(|e| e.to_string())?;
    let a = construct(&CatalogName::A1_1).unwrap();
    match diagonal_equivalence(&s, &a, &b).map_err(|e| e.to_string())? {
        Some(t) if verify_rescaling(&s, &a, &b, &t) => Ok("kkt(ℂ[3ℤ]) ≅ A1_1 on box 6".into()),
        _ => Err("no rescaling found".into()),
    }
}

fn c7_centroid() -> Outcome {
    let g3 = construct(&CatalogName::Sl2Gamma3).unwrap();
    let a = pullback(&GradingGroup::free(1), &[p1(1)], &g3).unwrap();
    let b = LatticeBox::new(6);
    for mu in [1, 2] {
        let sols = centroid_solve(&a, &b, &p1(mu));
        if !sols.is_empty() {
            return Err(format!("unexpected centroid element of degree {mu}"));
        }
    }
    let sols = centroid_solve(&a, &b, &p1(3));
    if sols.len() != 1 {
        return Err(format!("{} centroid elements of degree 3", sols.len()));
    }
    if !is_centroid_element(&a, &b, &sols[0]) {
        return Err("degree-3 solution fails the centroid identity".into());
    }
    Ok("one element at degree 3, none at 1 and 2".into())
}

fn c8_reflection() -> Outcome {
    let s = construct(&CatalogName::Sl3Gamma8).unwrap();
    let g = &s.group;
    let alpha = p1(1);
    let refl = reflection(&s, &alpha).map_err(|e| e.to_string())?;
    if !refl.is_automorphism(&s) {
        return Err("s_α is not an automorphism".into());
    }
    let la = s.l(&alpha);
    let mut zero_l = 0;
    for d in 0..8 {
        let lam = p1(d);
        let k = (&s.l(&lam) / &la).to_i64().ok_or("l(λ)/l(α) is not an integer")?;
        let target = g.canonical(&lam.sub(&alpha.scale(2 * k)));
        let img = refl.image(&lam);
        if img.is_empty() || img.iter().any(|(p, _)| *p != target) {
            return Err(format!("s_α L_{d} is not in degree {target}"));
        }
        if k == 0 {
            zero_l += 1;
            let one = Scalar::one();
            if img.len() != 1 || img[0].0 != lam || (img[0].1 != one && img[0].1 != -&one) {
                return Err(format!("s_α L_{d} ≠ ±L_{d}"));
            }
        }
    }
    Ok(format!("(i) on 8 degrees, (ii) on {zero_l} degrees with l = 0, automorphism"))
}

fn c9_modules() -> Outcome {
    let xs_int: Vec<Scalar> = (-4..=4).map(Scalar::from_int).collect();
    let mut checked = 0;
    for (d, s) in [("0", "0"), ("1", "0"), ("1/2", "1/3"), ("-1", "0"), ("2", "1/2"), ("1/3+i", "i")] {
        let m = DensityModule { delta: q(d), s: q(s) };
        let xs: Vec<Scalar> = xs_int.iter().map(|x| x + &q(s)).collect();
        let v = module_axiom_violations(&m, -3..=3, &xs);
        if !v.is_empty() {
            return Err(format!("Ω^{d}_{s}: {v:?}"));
        }
        checked += 1;
    }
    for kind in [ABKind::A, ABKind::B] {
        for (a, b) in [("1", "0"), ("0", "1"), ("1", "1"), ("1", "-2"), ("2/3", "i"), ("0", "0")] {
            let m = ABModule { kind, a: q(a), b: q(b) };
            let v = module_axiom_violations(&m, -3..=3, &xs_int);
            if !v.is_empty() {
                return Err(format!("{kind:?}_{{{a},{b}}}: {v:?}"));
            }
            checked += 1;
        }
    }
    // Recognition of randomly rescaled windows, including δ vs 1 − δ.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut good = 0;
    for k in 0..50 {
        let delta = loop {
            let d = Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
            if !d.is_zero() && !d.is_one() {
                break d;
            }
        };
        // Every fifth case is the mirror of the previous one.
        let delta = if k % 5 == 4 { &Scalar::one() - &delta } else { delta };
        let s = Scalar::ratio(rng.gen_range(0..=5), 6);
        let x0 = &s - &Scalar::from_int(rng.gen_range(2..=5));
        let len = rng.gen_range(7..=10);
        let tau: Vec<Scalar> =
            (0..len).map(|_| Scalar::ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)) * if rng.gen_bool(0.5) { Scalar::one() } else { -Scalar::one() }).collect();
        let w = ActionWindow::from_module(&DensityModule { delta: delta.clone(), s: s.clone() }, x0, len, Some(&tau));
        match module_recognize(&w) {
            Ok(DensityModuleSpec::Density { delta: d, s: ss }) if d == delta && (&ss - &s).is_integer() => good += 1,
            other => return Err(format!("case {k}: Ω^{delta}_{s} recognized as {other:?}")),
        }
    }
    Ok(format!("{checked} module sweeps clean; {good}/50 recognitions exact"))
}

fn c10_tensor_maps() -> Outcome {
    let n = 4i64;
    let mut notes = Vec::new();
    for (delta, eta) in [("1/3", "1/2"), ("0", "-1"), ("2", "i")] {
        let (delta, eta) = (q(delta), q(eta));
        // Basis z^a∂^{−δ} ⊗ z^b∂^{−η}, a, b ∈ [−n, n]; π lands in z^{a+b}.
        let basis: Vec<(i64, i64)> = (-n..=n).flat_map(|a| (-n..=n).map(move |b| (a, b))).collect();
        let rows: Vec<Vec<Scalar>> = (-2 * n..=2 * n)
            .map(|s| basis.iter().map(|&(a, b)| if a + b == s { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        let kernel = nullspace(&ExactMatrix::from_rows(rows));
        let x1 = &(&-&delta - &eta) - &Scalar::one();
        let interior: Vec<i64> = (-n..=n).collect();
        let mut b1_rows = Vec::new();
        for v in &kernel {
            let t = DensityTensor {
                delta: delta.clone(),
                eta: eta.clone(),
                terms: basis
                    .iter()
                    .zip(v)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&(a, b), c)| (c.clone(), Scalar::from_int(a), Scalar::from_int(b)))
                    .collect(),
            };
            let (pi, b1, b2) = lemma65_maps(&t);
            if !pi.is_zero() {
                return Err("nullspace vector not killed by π".into());
            }
            if !b1.add(&b2).is_zero() {
                return Err(format!("β₁ + β₂ ≠ 0 on a kernel vector (δ = {delta}, η = {eta})"));
            }
            b1_rows.push(interior.iter().map(|&w| b1.coefficient(&Scalar::from_int(w), &x1)).collect::<Vec<_>>());
        }
        let rank = echelon(&ExactMatrix::from_rows(b1_rows)).pivots.len();
        if rank != interior.len() {
            return Err(format!("β₁ on ker π has rank {rank} < {}", interior.len()));
        }
        notes.push(format!("dim ker π = {}, rank β₁ = {rank}", kernel.len()));
        let _ = PdoTerm::new(Scalar::one(), Scalar::zero(), Scalar::zero());
    }
    Ok(notes.join("; "))
}

fn c11_sigma_predicate() -> Outcome {
    let b = LatticeBox::new(3);
    let mut structures = vec![
        construct(&CatalogName::WPi { pi: AdditiveMap::pair(vec![[q("1"), q("0")], [q("0"), q("i")]]) }).unwrap(),
        construct(&CatalogName::GenWitt { l: AdditiveMap::scalar(vec![q("1"), q("i")]) }).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        structures.push(construct(&CatalogName::WPi { pi: random_pi(&mut rng) }).unwrap());
    }
    for (k, s) in structures.iter().enumerate() {
        let sp = sigma_pi(s, &b);
        if !sp.sigma_is_nonzero_l {
            return Err(format!("instance {k} ({})", s.provenance));
        }
    }
    Ok(format!("Σ ∩ box = {{l ≠ 0}} on {} instances", structures.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("jacobi sweep on W_π(m, n·i), box 4", c1_jacobi),
        ("operator/symbol oracle coherence", c2_oracle),
        ("level-3 dimensions of the minimal algebra", c3_level3_dims),
        ("classifier round trip on 20 random W_π", c4_round_trip),
        ("integrable matching A1_1, A2_2", c5_integrable),
        ("kkt consistency", c6_kkt),
        ("centroid of the Γ₃ pullback", c7_centroid),
        ("reflection on Γ₈", c8_reflection),
        ("module machinery", c9_modules),
        ("tensor-product maps π, β₁, β₂", c10_tensor_maps),
        ("Σ equals the nonzero locus of l", c11_sigma_predicate),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", k + 1, start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{:.2?}]", k + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
