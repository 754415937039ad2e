//! Property tests over seeded random instances: separation, saturation
//! and resolution invariants checked against the finite-model oracle.

mod common;

use guarded_core::classes::{is_lgq, membership};
use guarded_core::engine::Calculus;
use guarded_core::oracle::{closure, herbrand_entails, sat_enumerate};
use guarded_core::order::{Lpo, Precedence};
use guarded_core::qans::{answer, canonical_bound, Options, Saturation};
use guarded_core::qsep::{is_icq, q_sep, DefinerRegistry};
use guarded_core::syntax::{Formula, Problem};
use guarded_core::terms::{Clause, Literal, SymbolTable, Term};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{ground_instance, Signature};

fn random_query(sig: &Signature, table: &SymbolTable, rng: &mut impl Rng) -> Clause {
    loop {
        let n = rng.gen_range(2..=6u32);
        let vars: Vec<u32> = (0..n).collect();
        let lits: Vec<Literal> = (0..rng.gen_range(2..=5))
            .map(|_| {
                let p = *sig.preds.choose(rng).unwrap();
                let args = (0..table.arity(p)).map(|_| Term::Var(*vars.choose(rng).unwrap())).collect();
                Literal::new(false, p, args)
            })
            .collect();
        let c = Clause::new(lits);
        if !c.is_ground() {
            return c;
        }
    }
}

fn facts(sig: &Signature, table: &SymbolTable, rng: &mut impl Rng) -> Vec<Clause> {
    (0..rng.gen_range(0..=6))
        .map(|_| Clause::new(vec![sig.ground_atom(table, rng)]))
        .collect()
}

fn satisfiable(table: &SymbolTable, clauses: &[Clause], k: usize) -> bool {
    let items: Vec<Formula> = clauses.iter().map(closure).collect();
    sat_enumerate(table, &items, k).unwrap().is_some()
}

fn options(seed: u64) -> Options {
    Options {
        audit: true,
        seed,
        max_steps: 200_000,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn separation_yields_guarded_or_icq_clauses(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = SymbolTable::new();
        let sig = Signature::random(&mut table, &mut rng, 4, 2, false);
        let q = random_query(&sig, &table, &mut rng);
        let mut reg = DefinerRegistry::default();
        let (out, steps) = q_sep(&q, &mut table, &mut reg);
        for c in &out {
            prop_assert!(membership(c).lg || is_icq(c));
        }
        for s in &steps {
            for k in &s.conclusions {
                prop_assert!(k.is_ground() || k.width() < s.premise.width());
            }
        }
    }

    #[test]
    fn separation_preserves_entailment_from_data(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = SymbolTable::new();
        let sig = Signature::random(&mut table, &mut rng, 3, 2, false);
        let q = random_query(&sig, &table, &mut rng);
        let d = facts(&sig, &table, &mut rng);
        let mut reg = DefinerRegistry::default();
        let (out, _) = q_sep(&q, &mut table, &mut reg);
        let mut before = d.clone();
        before.push(q);
        let mut after = d;
        after.extend(out);
        prop_assert_eq!(satisfiable(&table, &before, 2), satisfiable(&table, &after, 2));
    }

    #[test]
    fn saturation_keeps_lgq_and_ignores_the_seed(seed in any::<u64>(), other in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = SymbolTable::new();
        let sig = Signature::random(&mut table, &mut rng, 4, 2, true);
        let mut input: Vec<Clause> = (0..rng.gen_range(2..=6)).map(|_| sig.lg_clause(&table, &mut rng)).collect();
        input.push(random_query(&sig, &table, &mut rng));
        let mut verdicts = Vec::new();
        for s in [seed, other] {
            let mut sat = Saturation::new(table.clone(), options(s));
            sat.add_input(input.clone());
            let v = sat.run().unwrap();
            prop_assert!(sat.audit.violations.is_empty(), "{:?}", sat.audit.violations);
            for c in sat.worked_off() {
                prop_assert!(is_lgq(c));
            }
            let bound = sat.definer_bound(sat.audit.max_width);
            prop_assert!(sat.registry.len() as u128 <= bound);
            verdicts.push(v);
        }
        prop_assert_eq!(verdicts[0], verdicts[1]);
    }

    #[test]
    fn function_free_answers_agree_with_models(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = SymbolTable::new();
        let consts = rng.gen_range(1..=2);
        let sig = Signature::random(&mut table, &mut rng, 4, consts, false);
        let clauses: Vec<Clause> = (0..rng.gen_range(1..=8)).map(|_| sig.lgq_clause(&table, &mut rng)).collect();
        let p = Problem { table: table.clone(), clauses: clauses.clone(), next_var: 64, ..Problem::default() };
        let a = answer(&p, options(seed)).unwrap();
        let yes = a.verdict == guarded_core::qans::Verdict::Yes;
        prop_assert_eq!(yes, !satisfiable(&table, &clauses, consts));
    }

    #[test]
    fn ground_resolvents_follow_from_premises(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = SymbolTable::new();
        let sig = Signature::random(&mut table, &mut rng, 3, 2, true);
        let prec = Precedence::new(&table);
        let calc = Calculus::new(Lpo::new(&table, &prec));
        let g = ground_instance(&sig, &calc.lpo, &table, &mut rng);
        let sides: Vec<(&Clause, usize)> = g
            .selected
            .iter()
            .zip(&g.sides)
            .map(|(&i, s)| {
                let a = g.main.lits()[i].negate();
                (s, s.lits().iter().position(|l| *l == a).unwrap())
            })
            .collect();
        let r = calc.s_res(&g.main, &g.selected, &sides).unwrap();
        let mut premises = g.sides.clone();
        premises.push(g.main.clone());
        prop_assert!(herbrand_entails(&premises, &r.conclusion));
        prop_assert!(calc.lpo.clause_gt(&g.main, &r.conclusion));
    }
}

#[test]
fn canonical_bound_grows_with_width() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut table = SymbolTable::new();
    let _ = Signature::random(&mut table, &mut rng, 2, 1, false);
    let b: Vec<u128> = (1..5).map(|w| canonical_bound(&table, w)).collect();
    assert!(b.windows(2).all(|w| w[0] <= w[1]));
}
