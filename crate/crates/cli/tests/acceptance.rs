#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::panic;
use std::process::Command;
use std::time::{Duration, Instant};

use iwalambda::asymptotics::{fit_parameters, FitOutcome, LevelOrderTable};
use iwalambda::characters::{
    all_abs_chars, all_ladic_chars, induce_trivial, inner_product, mirror, parity_split, restrict,
    AbsChar, Parity, VirtualChar,
};
use iwalambda::cohomology::{
    ambiguous_valuation, herbrand_quotient, tate_h0, tate_h0_enumerated, tate_h1,
    tate_h1_enumerated, AmbiguousInput,
};
use iwalambda::defect::{
    defect_character, defect_oracle, imo_lambda, lambda_shift_real, reflection_check, CaseTag,
};
use iwalambda::groups::{GroupElement, Subgroup};
use iwalambda::splitting::{
    splitting_exponent, splitting_exponent_oracle, FieldSpec, ORACLE_MAX_LEVEL,
};
use iwalambda::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    title: &'static str,
    limit: Duration,
    run: fn() -> String,
}

fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion { title: "defect character equals the counting oracle", limit: secs(60), run: defect_vs_oracle },
        Criterion { title: "IMO example formula", limit: secs(10), run: imo_formula },
        Criterion { title: "reflection identity", limit: secs(30), run: reflection },
        Criterion { title: "parameter theorem on elementary modules", limit: secs(120), run: parameter_fit },
        Criterion { title: "character algebra laws", limit: secs(10), run: character_laws },
        Criterion { title: "splitting exponent closed form", limit: secs(5), run: splitting },
        Criterion { title: "cohomology engine and ambiguous class formula", limit: secs(30), run: cohomology },
        Criterion { title: "CLI determinism", limit: secs(10), run: cli_determinism },
    ]
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, c) in criteria().into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(c.run);
        let elapsed = start.elapsed();
        let timing = format!("{:.2}s, limit {}s", elapsed.as_secs_f64(), c.limit.as_secs());
        let (ok, detail) = match outcome {
            Ok(detail) if elapsed <= c.limit => (true, detail),
            Ok(detail) => (false, format!("{detail}; too slow")),
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                (false, msg)
            }
        };
        failures += usize::from(!ok);
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {} ({timing}): {detail}", i + 1, c.title);
    }
    if failures > 0 {
        std::process::exit(1);
    }
}

fn defect_vs_oracle() -> String {
    let fields = common::fields_with_conductors(3, &[3, 15, 21, 33, 39]);
    let sets = common::subsets(&common::PRIME_POOL, 3);
    let mut pairs = 0;
    for field in &fields {
        assert!(field.require_valid().is_ok());
        for s in &sets {
            let fast = defect_character(field, s).unwrap();
            let slow = defect_oracle(field, s).unwrap();
            assert!(
                fast == slow,
                "m = {}, H = {:?}, S = {s:?}: {fast:?} vs {slow:?}",
                field.conductor(),
                field.subgroup_gens()
            );
            pairs += 1;
        }
    }
    format!("{} fields, {pairs} (field, S) pairs", fields.len())
}

fn imo_formula() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut nontrivial = 0;
    let mut total = 0;
    for ell in [3u64, 5] {
        let k = FieldSpec::cyclotomic(ell, ell).unwrap();
        let one = VirtualChar::one(k.delta());
        let tame: Vec<u64> = common::primes_below(500).into_iter().filter(|&p| p != ell).collect();
        let split: Vec<u64> = tame.iter().copied().filter(|p| p % ell == 1).collect();
        for _ in 0..50 {
            let size = rng.gen_range(0..=4);
            let mut s = BTreeSet::new();
            while s.len() < size {
                let pool = if rng.gen_bool(0.5) { &split } else { &tame };
                s.insert(*pool.choose(&mut rng).unwrap());
            }
            let s: Vec<u64> = s.into_iter().collect();
            let got = imo_lambda(ell, &s).unwrap() as i64;
            let shift = lambda_shift_real(&k, &s).unwrap().shift;
            assert_eq!(got, inner_product(&shift, &one).unwrap(), "ℓ = {ell}, S = {s:?}");
            // Independent evaluation with place-counting exponents.
            let weights: Vec<i64> = s
                .iter()
                .filter(|&&p| p % ell == 1)
                .map(|&p| ell.pow(splitting_exponent_oracle(ell, p, ORACLE_MAX_LEVEL).unwrap()) as i64)
                .collect();
            let expected = match weights.iter().max() {
                Some(&top) if weights.len() >= 2 => weights.iter().sum::<i64>() - top,
                _ => 0,
            };
            assert_eq!(got, expected, "ℓ = {ell}, S = {s:?}");
            nontrivial += usize::from(weights.len() >= 2);
            total += 1;
        }
    }
    format!("{total} sets, {nontrivial} with |S_omega| >= 2")
}

/// Every way to place each tame prime in S, in T, or in neither.
fn disjoint_pairs(pool: &[u64]) -> Vec<(Vec<u64>, Vec<u64>)> {
    let mut out = vec![(vec![], vec![])];
    for &p in pool {
        let mut next = Vec::with_capacity(out.len() * 3);
        for (s, t) in out {
            let mut s2 = s.clone();
            s2.push(p);
            let mut t2 = t.clone();
            t2.push(p);
            next.push((s2, t.clone()));
            next.push((s.clone(), t2));
            next.push((s, t));
        }
        out = next;
    }
    out
}

fn reflection() -> String {
    let mut checks = 0;
    let mut special = 0;
    for field in common::test_fields() {
        let ell = field.ell();
        let one = VirtualChar::one(field.delta());
        let tame: Vec<u64> = common::PRIME_POOL.iter().copied().filter(|&p| p != ell).collect();
        for (s, t) in disjoint_pairs(&tame) {
            for wild_in_s in [true, false] {
                let (mut s, mut t) = (s.clone(), t.clone());
                if wild_in_s {
                    s.push(ell);
                } else {
                    t.push(ell);
                }
                let r = reflection_check(&field, &s, &t).unwrap();
                assert!(r.holds, "m = {}, S = {s:?}, T = {t:?}", field.conductor());
                if r.case == CaseTag::Special {
                    assert_eq!(r.kappa_st, -&one);
                    special += 1;
                }
                checks += 1;
            }
        }
    }
    assert!(special > 0);
    format!("{checks} (S, T) pairs, {special} special")
}

fn parameter_fit() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let mut levels = 0;
    for _ in 0..100 {
        let spec = common::random_module_spec(&mut rng);
        let table = LevelOrderTable::for_fit(&spec, 0).unwrap();
        assert!(table.is_nondecreasing(), "{spec:?}");
        let FitOutcome::Stable(fit) = fit_parameters(&table).unwrap() else {
            panic!("not yet stable: {spec:?}");
        };
        assert_eq!(
            (fit.rho, fit.mu, fit.lambda),
            (spec.rho() as u64, spec.mu(), spec.lambda()),
            "{spec:?}"
        );
        for (n, x) in table.levels().skip(table.values.len() - 5) {
            assert_eq!(fit.residual(spec.ell(), n, x), fit.nu as i128, "{spec:?}, n = {n}");
        }
        levels = levels.max(table.values.len());
    }
    format!("100 specs, up to {levels} levels each")
}

fn character_laws() -> String {
    let mut subgroups = 0;
    for field in common::test_fields() {
        let g = field.delta();
        let ell = field.ell();
        let chars = all_ladic_chars(g, ell, Some(field.tau_bar())).unwrap();
        let total: usize = chars.iter().map(|phi| phi.degree()).sum();
        assert_eq!(total as u64, g.order());
        for phi in &chars {
            let v = phi.as_virtual(g);
            let star = mirror(&v, &field).unwrap();
            assert_eq!(mirror(&star, &field).unwrap(), v);
            let (re, im) = parity_split(&star, field.tau_bar()).unwrap();
            match phi.parity.unwrap() {
                Parity::Real => assert!(re.is_zero() && im == star),
                Parity::Imaginary => assert!(im.is_zero() && re == star),
            }
        }
        for d in common::all_subgroups(g) {
            let ind = induce_trivial(g, &d).unwrap();
            assert_eq!(mirror(&mirror(&ind, &field).unwrap(), &field).unwrap(), ind);
            check_reciprocity(g, &d, &ind, &chars);
            subgroups += 1;
        }
    }
    format!("{} fields, {subgroups} subgroups", common::test_fields().len())
}

/// `⟨Ind 1, φ⟩_Δ = ⟨1, Res φ⟩_D`, with the left side also from values.
fn check_reciprocity(
    g: &iwalambda::FiniteAbelianGroup,
    d: &Subgroup,
    ind: &VirtualChar,
    chars: &[iwalambda::LadicChar],
) {
    let index = (g.order() / d.order()) as i64;
    let class_fn = |x: &GroupElement| if d.contains(x) { index } else { 0 };
    let small = d.structure().unwrap().source;
    for phi in chars {
        let v = phi.as_virtual(g);
        let lhs = inner_product(ind, &v).unwrap();
        let res = restrict(&v, d).unwrap();
        assert_eq!(lhs, res.multiplicity(&AbsChar::trivial(&small)));
        assert_eq!(lhs, common::class_inner_product(g, &class_fn, &v));
    }
    let trivial_on = all_abs_chars(g).filter(|c| c.is_trivial_on(g, d)).count() as i64;
    assert_eq!(ind.degree(), index);
    assert_eq!(trivial_on, index);
}

fn splitting() -> String {
    let mut count = 0;
    for ell in [3u64, 5, 7] {
        for p in common::primes_below(500).into_iter().filter(|&p| p != ell) {
            assert_eq!(
                splitting_exponent(ell, p).unwrap(),
                splitting_exponent_oracle(ell, p, ORACLE_MAX_LEVEL).unwrap(),
                "ℓ = {ell}, p = {p}"
            );
            count += 1;
        }
    }
    format!("{count} (ℓ, p) pairs")
}

fn cohomology() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let mut proper = 0;
    for _ in 0..200 {
        let m = common::random_gamma_module(&mut rng, 64);
        assert!(m.module().order() <= 64);
        assert_eq!(herbrand_quotient(&m).to_string(), "1", "{m}");
        let elems: Vec<GroupElement> = m.module().elements().collect();
        let x = elems.choose(&mut rng).unwrap().clone();
        let sub = m.stable_closure(&[x]).unwrap();
        let n = m.submodule(&sub).unwrap();
        let q = m.quotient_module(&sub).unwrap();
        assert_eq!(n.module().order() * q.module().order(), m.module().order());
        assert_eq!(herbrand_quotient(&m), herbrand_quotient(&n) * herbrand_quotient(&q), "{m}");
        for part in [&m, &n, &q] {
            assert_eq!(tate_h1(part), tate_h1_enumerated(part).unwrap(), "{part}");
            assert_eq!(tate_h0(part), tate_h0_enumerated(part).unwrap(), "{part}");
        }
        proper += usize::from(1 < sub.order() && sub.order() < m.module().order());
    }
    let case = |h, ram: &[u64], deg, unit_index| {
        ambiguous_valuation(&AmbiguousInput { h, ram: ram.to_vec(), deg, unit_index })
    };
    assert_eq!(case(0, &[1], 1, 0), Ok(0));
    assert_eq!(case(1, &[1, 1], 1, 1), Ok(1));
    assert_eq!(case(0, &[], 1, 0), Err(Error::InconsistentAmbiguousData(-1)));
    format!("200 modules, {proper} proper submodules, 3 formula cases")
}

const MATRIX: &[&[&str]] = &[
    &["chars", "--ell", "3", "--conductor", "15"],
    &["chars", "--ell", "5", "--conductor", "35", "--format", "table"],
    &["defect", "--ell", "3", "--conductor", "3", "--primes", "7,13", "--verify"],
    &["defect", "--ell", "3", "--conductor", "39", "--subgroup", "16", "--primes", "2,7,53", "--verify"],
    &["lambda", "--ell", "3", "--conductor", "3", "--primes", "7,13", "--parity", "real"],
    &["lambda", "--ell", "3", "--conductor", "15", "--primes", "2,7", "--parity", "imaginary"],
    &["lambda", "--ell", "3", "--conductor", "3", "--primes", "3,2", "--parity", "wild"],
    &["reflect", "--ell", "3", "--conductor", "15", "--S", "3", "--T", "7,13", "--verify"],
    &["reflect", "--ell", "3", "--conductor", "3", "--S", "3"],
    &["simulate", "--ell", "3", "--rho", "0", "--poly", "T", "--n", "3", "--verify"],
    &["simulate", "--ell", "5", "--rho", "1", "--poly", "T^2+5T+5", "--mu", "1,2", "--n", "2"],
    &["ambig", "--h", "1", "--ram", "1,1", "--deg", "1", "--unit-index", "1"],
    &["cohomology", "--orders", "4", "--sigma", "-1", "--order-n", "2", "--verify"],
];

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_iwalambda")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn cli_determinism() -> String {
    let mut commands = BTreeSet::new();
    for args in MATRIX {
        let first = run_cli(args);
        for _ in 0..2 {
            assert!(run_cli(args) == first, "{args:?} output differs between runs");
        }
        if !args.contains(&"table") {
            let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
            assert_eq!(v["schema"], "iwalambda/1");
            assert_eq!(v["oracle_checked"], args.contains(&"--verify"), "{args:?}");
        }
        commands.insert(args[0]);
    }
    assert_eq!(commands.len(), 7);
    format!("{} invocations x 3 runs, {} subcommands", MATRIX.len(), commands.len())
}
