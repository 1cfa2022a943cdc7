//! Exhaustive checks of the A∞ relations, the morphism relations, solver
//! independence, and the structural statements about nonzero values.

use crate::arc_diagram::PairId;
use crate::homology::{classify_hdata, in_ideal_f, project, HDataTightness, HomologyClass};
use crate::strand_core::{Algebra, Diagram, Element, HData, LocalClass, Variant};
use crate::tensor_class::{classify_class_tensor, classify_class_tensor_local, TensorTightness};

use super::{
    creation, par_check, par_check_many, AinfEngine, ChoiceFunctions, EngineError, Mode, OrderingChoices, Report, TightIndex,
};

fn splice(m: &[HData], k: usize, j: usize, h: HData) -> Vec<HData> {
    let mut out = m[..k].to_vec();
    out.push(h);
    out.extend_from_slice(&m[k + j..]);
    out
}

fn fail_on_error<T>(report: &mut Report, m: &[HData], r: Result<T, EngineError>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            report.record(false, || format!("{m:?}: {e}"));
            None
        }
    }
}

/// `Σ X_{n-j+1}(1 ⊗ X_j ⊗ 1) = 0` for every viable class tensor of each length
/// `3..=n_max`.
pub fn verify_ainf_relations(engine: &AinfEngine, index: &TightIndex, n_max: usize) -> Vec<Report> {
    (3..=n_max)
        .map(|n| {
            par_check(index, n, &format!("ainf-relation n={n}"), |m, report| {
                let Some(ok) = fail_on_error(report, m, ainf_relation_holds(engine, m)) else {
                    return;
                };
                report.record(ok, || format!("{m:?}"));
            })
        })
        .collect()
}

fn ainf_relation_holds(engine: &AinfEngine, m: &[HData]) -> Result<bool, EngineError> {
    let n = m.len();
    // Every term has the H-data of `m`, and X vanishes off tight summands.
    let tight = HData::compose_all(m).is_some_and(|h| classify_hdata(engine.algebra(), &h) == HDataTightness::Tight);
    if !tight {
        return Ok(true);
    }
    let mut parity = false;
    let mut buf = Vec::with_capacity(n);
    for j in 2..n {
        for k in 0..=n - j {
            if let HomologyClass::Nonzero(h) = engine.x_inner(&m[k..k + j])? {
                buf.clear();
                buf.extend_from_slice(&m[..k]);
                buf.push(h);
                buf.extend_from_slice(&m[k + j..]);
                if !engine.x_inner(&buf)?.is_zero() {
                    parity = !parity;
                }
            }
        }
    }
    Ok(!parity)
}

/// Every nonzero `X_n` with `n <= n_max` raises the grading by `n - 2`.
pub fn verify_x_grading(engine: &AinfEngine, index: &TightIndex, n_max: usize) -> Report {
    let mut total = Report::new("X_n grading");
    for n in 2..=n_max {
        total.merge(par_check(index, n, "X_n grading", |m, report| {
            let Some(x) = fail_on_error(report, m, engine.x(m)) else {
                return;
            };
            if let HomologyClass::Nonzero(h) = x {
                let expected = engine.tensor_maslov(m).doubled() + 2 * (n as i32 - 2);
                let got = engine.algebra().maslov(&engine.f1(&h)).doubled();
                report.record(expected == got, || format!("{m:?}: grading {got} != {expected}"));
            }
        }));
    }
    total
}

/// The A∞ morphism relations into the algebra, checked exactly, together with
/// `∂f_n = f_1 X_n + U_n` and the grading of `f_n`. Needs a full-mode engine.
pub fn verify_morphism_relations(engine: &AinfEngine, index: &TightIndex, n_max: usize) -> Vec<Report> {
    assert_eq!(engine.config().mode, Mode::Full, "morphism relations need exact values");
    (1..=n_max)
        .map(|n| {
            par_check(index, n, &format!("morphism n={n}"), |m, report| {
                if let Some(result) = fail_on_error(report, m, morphism_checks(engine, m)) {
                    for (ok, what) in result {
                        report.record(ok, || format!("{m:?}: {what}"));
                    }
                }
            })
        })
        .collect()
}

fn morphism_checks(engine: &AinfEngine, m: &[HData]) -> Result<Vec<(bool, &'static str)>, EngineError> {
    let alg = engine.algebra();
    let n = m.len();
    let f = engine.f(m)?;
    let df = alg.d(&f);
    let mut lhs = Element::zero();
    if let HomologyClass::Nonzero(h) = engine.x(m)? {
        lhs += &Element::from_diagram(engine.f1(&h));
    }
    let f1x = lhs.clone();
    for j in 2..n {
        for k in 0..=n - j {
            if let HomologyClass::Nonzero(h) = engine.x(&m[k..k + j])? {
                lhs += &engine.f(&splice(m, k, j, h))?;
            }
        }
    }
    let mut rhs = df.clone();
    for i in 1..n {
        rhs += &alg.mul(&engine.f(&m[..i])?, &engine.f(&m[i..])?);
    }
    let mut checks = vec![(lhs == rhs, "morphism relation")];
    if n >= 2 {
        let u = engine.u(m)?;
        checks.push((alg.d(&u).is_zero(), "U_n is a cycle"));
        checks.push((&f1x + &u == df, "defining identity"));
        let expected = engine.tensor_maslov(m).doubled() + 2 * (n as i32 - 1);
        checks.push((
            f.iter().all(|d| alg.maslov(d).doubled() == expected),
            "f_n grading",
        ));
    } else {
        checks.push((df.is_zero(), "f_1 is a cycle"));
    }
    Ok(checks)
}

/// Runs full-mode engines with the least and greatest boundary preimages and a
/// quotient-mode engine side by side; `X_n` and `f_n` modulo F must agree.
pub fn perturbation_invariance_check(
    least: &AinfEngine,
    greatest: &AinfEngine,
    quotient: &AinfEngine,
    index: &TightIndex,
    n_max: usize,
) -> Report {
    let mut total = Report::new("perturbation invariance");
    for n in 2..=n_max {
        total.merge(par_check(index, n, "perturbation invariance", |m, report| {
            let run = || -> Result<bool, EngineError> {
                let xs = [least.x(m)?, greatest.x(m)?, quotient.x(m)?];
                let alg = quotient.algebra();
                let fs = [
                    project(alg, &least.f(m)?),
                    project(alg, &greatest.f(m)?),
                    quotient.f(m)?,
                ];
                Ok(xs[0] == xs[1] && xs[1] == xs[2] && fs[0] == fs[1] && fs[1] == fs[2])
            };
            if let Some(ok) = fail_on_error(report, m, run()) {
                report.record(ok, || format!("{m:?}"));
            }
        }));
    }
    total
}

/// Local tightness of a class tensor at every pair.
pub fn pair_tags(alg: &Algebra, m: &[HData]) -> Vec<TensorTightness> {
    alg.pairs()
        .map(|p| classify_class_tensor_local(alg, m, p).unwrap_or(TensorTightness::Singular))
        .collect()
}

fn count(tags: &[TensorTightness], t: TensorTightness) -> usize {
    tags.iter().filter(|&&x| x == t).count()
}

fn locally_tight(d: &Diagram, p: PairId) -> bool {
    let v = d.variant(p);
    !v.is_crossed() && v != Variant::W
}

/// The structural statements about nonzero `f̄_n` and `X_n`, checked on every
/// viable class tensor of length `2..=n_max` using a quotient-mode engine.
pub fn verify_structure_theorems(engine: &AinfEngine, index: &TightIndex, n_max: usize) -> Vec<Report> {
    assert_eq!(engine.config().mode, Mode::Quotient, "structure statements concern values modulo F");
    let mut reports: Vec<Report> = STRUCTURE_CHECKS.iter().map(|n| Report::new(*n)).collect();
    for n in 2..=n_max {
        let per_n = par_check_many(index, n, &STRUCTURE_CHECKS, |m, reports| {
            record_structure(engine, m, reports);
        });
        for (total, r) in reports.iter_mut().zip(per_n) {
            total.merge(r);
        }
    }
    reports
}

/// The structure checks on every tensor of length at least 2 in the memo
/// tables of `engine`.
pub fn verify_structure_on_memo(engine: &AinfEngine) -> Vec<Report> {
    assert_eq!(engine.config().mode, Mode::Quotient, "structure statements concern values modulo F");
    let mut tensors: Vec<Vec<HData>> = engine.memo_f().into_iter().map(|(m, _)| m).collect();
    tensors.extend(engine.memo_x().into_iter().map(|(m, _)| m));
    tensors.sort();
    tensors.dedup();
    let mut reports: Vec<Report> = STRUCTURE_CHECKS.iter().map(|n| Report::new(*n)).collect();
    for m in tensors.iter().filter(|m| m.len() >= 2) {
        record_structure(engine, m, &mut reports);
    }
    reports
}

fn record_structure(engine: &AinfEngine, m: &[HData], reports: &mut [Report]) {
    match structure_checks(engine, m) {
        Ok(results) => {
            for (slot, ok) in results {
                reports[slot].record(ok, || format!("{m:?}"));
            }
        }
        Err(e) => reports[STANDARD].record(false, || format!("{m:?}: {e}")),
    }
}

fn structure_checks(engine: &AinfEngine, m: &[HData]) -> Result<Vec<(usize, bool)>, EngineError> {
    let alg = engine.algebra();
    let n = m.len();
    let mut out = Vec::new();
    let f = engine.f(m)?;
    let x = engine.x(m)?;
    let tags = pair_tags(alg, m);
    let l = count(&tags, TensorTightness::Twisted);
    let c = count(&tags, TensorTightness::Critical);
    let others_tight = l + c + count(&tags, TensorTightness::Tight) == tags.len();
    if !f.is_zero() {
        let counts_ok = others_tight && l + c + 1 >= n && c + 2 <= n;
        let shape_ok = f.iter().all(|d| {
            let mut crossed_twisted = 0;
            let mut ok = true;
            for (k, tag) in tags.iter().enumerate() {
                let p = PairId(k);
                if *tag == TensorTightness::Twisted {
                    match d.variant(p) {
                        Variant::C => crossed_twisted += 1,
                        Variant::W => {}
                        _ => ok = false,
                    }
                } else {
                    ok &= locally_tight(d, p);
                }
            }
            ok && crossed_twisted + c + 1 == n
        });
        out.push((F_STRUCTURE, counts_ok && shape_ok));
        let product_zero = classify_class_tensor(alg, m).map_or(true, |t| t != TensorTightness::Tight);
        out.push((EXCLUSIVE, x.is_zero() && product_zero));
        out.push((CROSSED, f.iter().all(|d| !d.is_crossingless())));
    }
    out.push((STANDARD, f.iter().all(|d| !in_ideal_f(alg, d))));
    if let HomologyClass::Nonzero(h) = x {
        let composite = HData::compose_all(m);
        out.push((X_STRUCTURE, others_tight && l == 0 && c + 2 == n && composite == Some(h)));
    }
    if n == 2 {
        let expected = l > 0 && others_tight;
        let odd_single = f.len() % 2 == 1
            && f.iter().all(|d| {
                let crossed: Vec<PairId> = d.crossed_pairs(alg.pair_count()).collect();
                crossed.len() == 1 && tags[crossed[0].0] == TensorTightness::Twisted
            });
        out.push((F2, !f.is_zero() == expected && (f.is_zero() || odd_single)));
    }
    if n == 3 {
        let expected = c == 1 && l == 0 && others_tight;
        out.push((X3, !x.is_zero() == expected));
    }
    Ok(out)
}

const STRUCTURE_CHECKS: [&str; 7] = [
    "f_n structure",
    "X_n structure",
    "f_n and X_n exclusive",
    "f_n crossed",
    "standard form",
    "f_2 description",
    "X_3 description",
];
const F_STRUCTURE: usize = 0;
const X_STRUCTURE: usize = 1;
const EXCLUSIVE: usize = 2;
const CROSSED: usize = 3;
const STANDARD: usize = 4;
const F2: usize = 5;
const X3: usize = 6;

/// Heisenberg relation `A*∂ + ∂A* = 1` for the chosen creation pair, on every
/// diagram of every twisted summand.
pub fn verify_heisenberg(alg: &Algebra, choices: &OrderingChoices) -> Report {
    let mut report = Report::new("creation heisenberg");
    for hd in alg.all_hdata() {
        let Some(pair) = choices.creation_pair(alg, &hd) else {
            continue;
        };
        debug_assert!(matches!(alg.local_class(&hd, pair), LocalClass::Once11(_)));
        for d in alg.enumerate_diagrams(&hd) {
            let x = Element::from_diagram(d);
            let lhs = creation(alg, pair, &alg.d(&x)).and_then(|a| Ok(&a + &alg.d(&creation(alg, pair, &x)?)));
            report.record(lhs.as_ref() == Ok(&x), || format!("{d:?}"));
        }
    }
    report
}
