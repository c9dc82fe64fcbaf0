//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p toricodim-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toricodim::codim::{analyze, CodimReport};
use toricodim::random::{random_essential_family, random_family_where, random_hull, random_polytope};
use toricodim::toric::{critical_degree, family_fan};
use toricodim::{LatticePolytope, NormalFan, OracleRequest, PolytopeFamily, Result};

struct Criterion {
    id: u32,
    title: &'static str,
    checked: usize,
    failures: Vec<String>,
    notes: Vec<String>,
    started: Instant,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            checked: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn require_at_least(&mut self, count: usize, min: usize, what: &str) {
        self.notes.push(format!("{count} {what}"));
        if count < min {
            self.failures.push(format!("only {count} {what}, need {min}"));
        }
    }

    fn finish(self) -> bool {
        let pass = self.failures.is_empty();
        let mut line = format!(
            "criterion {} ({}): {} - {} checks, {:.1}s",
            self.id,
            self.title,
            if pass { "PASS" } else { "FAIL" },
            self.checked,
            self.started.elapsed().as_secs_f64()
        );
        if !self.notes.is_empty() {
            line.push_str(&format!("; {}", self.notes.join(", ")));
        }
        println!("{line}");
        for f in self.failures.iter().take(10) {
            println!("    {f}");
        }
        if self.failures.len() > 10 {
            println!("    ... and {} more", self.failures.len() - 10);
        }
        pass
    }
}

/// Rank cross-check outcomes of every oracle matrix built in suites 1-5.
#[derive(Default)]
struct RankLog {
    matrices: usize,
    disagreements: Vec<String>,
}

impl RankLog {
    fn record(&mut self, label: &str, report: &CodimReport) {
        for a in report.oracle.iter().flat_map(|r| &r.attempts) {
            self.matrices += 1;
            if !a.rank_check.agrees() {
                self.disagreements.push(format!(
                    "{label}: exact rank {} vs modular {:?}",
                    a.rank_check.exact, a.rank_check.modular
                ));
            }
        }
    }
}

/// Oracle value of the first generic draw, without reseeding.
fn first_draw(report: &CodimReport) -> Option<u64> {
    report.oracle.as_ref().map(|r| r.attempts[0].codim)
}

fn full_dimensional_member(rng: &mut ChaCha8Rng, n: usize, max: i64) -> Result<LatticePolytope> {
    loop {
        let p = random_polytope(rng, n, max)?;
        if p.is_full_dimensional() {
            return Ok(p);
        }
    }
}

fn full_dimensional_family(n: usize, max: i64, seed: u64) -> Result<PolytopeFamily> {
    random_family_where(n, seed, |rng, _| full_dimensional_member(rng, n, max), |_| Ok(true))
}

/// Surface families whose first member is a segment.
fn segment_family(max: i64, seed: u64) -> Result<PolytopeFamily> {
    random_family_where(
        2,
        seed,
        |rng, i| {
            if i > 0 {
                return random_polytope(rng, 2, max);
            }
            loop {
                let p = random_hull(rng, 2, max, 2)?;
                if p.affine_dim() == 1 {
                    return Ok(p);
                }
            }
        },
        |f| Ok(f.is_essential()?.essential()),
    )
}

/// Threefold families whose first two members are polygons in a common
/// coordinate plane, so that two-element subfamilies can have `dim = |J|`.
fn planar_pair_family(max: i64, seed: u64) -> Result<PolytopeFamily> {
    random_family_where(
        3,
        seed,
        |rng, i| {
            if i >= 2 {
                return random_polytope(rng, 3, max);
            }
            let count = rng.gen_range(3..=4);
            let z = rng.gen_range(0..=max);
            let points: Vec<Vec<i64>> = (0..count)
                .map(|_| vec![rng.gen_range(0..=max), rng.gen_range(0..=max), z])
                .collect();
            LatticePolytope::new(3, points)
        },
        |f| Ok(f.is_essential()?.essential()),
    )
}

fn oracle_report(f: &PolytopeFamily, seed: u64) -> Result<CodimReport> {
    analyze(f, &OracleRequest::Generic { seed })
}

fn criterion_1(ranks: &mut RankLog) -> Result<bool> {
    let mut c = Criterion::new(1, "all members full-dimensional: oracle = 1");
    for n in [2, 3] {
        for i in 0..25u64 {
            let seed = 1_000 * n as u64 + i;
            let f = full_dimensional_family(n, 3, seed)?;
            let r = oracle_report(&f, seed)?;
            ranks.record("criterion 1", &r);
            let v = first_draw(&r);
            c.check(v == Some(1), || format!("n={n} seed={seed}: oracle {v:?}"));
            c.check(r.formula_value == Some(1), || {
                format!("n={n} seed={seed}: formula {:?}", r.formula_value)
            });
        }
    }
    Ok(c.finish())
}

fn criterion_2(ranks: &mut RankLog) -> Result<bool> {
    let mut c = Criterion::new(2, "surfaces with a segment: oracle = 1 + sum of l* over segments");
    for i in 0..25u64 {
        let seed = 2_000 + i;
        let f = segment_family(3, seed)?;
        let expected = 1 + f
            .members()
            .iter()
            .filter(|m| m.affine_dim() == 1)
            .map(|m| m.lstar())
            .sum::<u64>();
        let r = oracle_report(&f, seed)?;
        ranks.record("criterion 2", &r);
        let v = first_draw(&r);
        c.check(v == Some(expected), || {
            format!("seed={seed}: oracle {v:?}, expected {expected}")
        });
        c.check(r.bignef.map(|(_, b)| b) == Some(expected), || {
            format!("seed={seed}: surface value {:?}", r.bignef)
        });
    }
    Ok(c.finish())
}

/// Random and planar-pair threefold families with their generic reports,
/// shared by criteria 3 to 5.
fn threefold_pool(ranks: &mut RankLog) -> Result<Vec<(String, CodimReport)>> {
    let mut pool = Vec::new();
    for i in 0..25u64 {
        let seed = 3_000 + i;
        let f = random_essential_family(3, 2, seed)?;
        let r = oracle_report(&f, seed)?;
        ranks.record("threefold pool", &r);
        pool.push((format!("random n=3 seed={seed}"), r));
    }
    for i in 0..10u64 {
        let seed = 3_500 + i;
        let f = planar_pair_family(2, seed)?;
        let r = oracle_report(&f, seed)?;
        ranks.record("threefold pool", &r);
        pool.push((format!("planar pair seed={seed}"), r));
    }
    Ok(pool)
}

fn criterion_3(pool: &[(String, CodimReport)], pool_secs: f64, ranks: &mut RankLog) -> Result<bool> {
    let mut c = Criterion::new(3, "lower <= oracle <= upper, at most 3 reseeds");
    c.notes.push(format!("shared threefold pool built in {pool_secs:.1}s"));
    let mut reseeded = 0;
    let mut check = |label: &str, r: &CodimReport| {
        let run = r.oracle.as_ref();
        let b = r.bounds;
        let within = match (run, b) {
            (Some(run), Some(b)) => run
                .attempts
                .iter()
                .any(|a| b.lower <= a.codim && a.codim <= b.upper),
            _ => false,
        };
        if run.is_some_and(|run| run.reseeds() > 0) {
            reseeded += 1;
        }
        c.check(within, || {
            format!("{label}: bounds {b:?}, oracle {:?}", run.map(|r| r.value()))
        });
    };
    for i in 0..25u64 {
        let seed = 4_000 + i;
        let f = random_essential_family(2, 3, seed)?;
        let r = oracle_report(&f, seed)?;
        ranks.record("criterion 3", &r);
        check(&format!("random n=2 seed={seed}"), &r);
    }
    for (label, r) in pool.iter().filter(|(l, _)| l.starts_with("random")) {
        check(label, r);
    }
    c.notes.push(format!("{reseeded} instances reseeded"));
    Ok(c.finish())
}

fn criterion_4(pool: &[(String, CodimReport)]) -> bool {
    let mut c = Criterion::new(4, "abc conditions hold: oracle = formula");
    let mut applicable = 0;
    for (label, r) in pool {
        let Some(formula) = r.formula_value else { continue };
        applicable += 1;
        let v = first_draw(r);
        c.check(v == Some(formula), || format!("{label}: oracle {v:?}, formula {formula}"));
    }
    c.require_at_least(applicable, 20, "families pass abc");
    let failing = pool.len() - applicable;
    c.notes.push(format!("{failing} fail abc"));
    c.finish()
}

fn criterion_5(pool: &[(String, CodimReport)]) -> bool {
    let mut c = Criterion::new(5, "generalized formula: oracle = genfor, genfor = formula");
    let mut applicable = 0;
    let mut nontrivial = 0;
    for (label, r) in pool {
        let Some(genfor) = r.genfor_value else { continue };
        applicable += 1;
        if genfor != 1 {
            nontrivial += 1;
        }
        let v = first_draw(r);
        c.check(v.map(|v| v as i64) == Some(genfor), || {
            format!("{label}: oracle {v:?}, genfor {genfor}")
        });
        if let Some(formula) = r.formula_value {
            c.check(formula as i64 == genfor, || {
                format!("{label}: formula {formula}, genfor {genfor}")
            });
        }
    }
    c.require_at_least(applicable, 20, "families satisfy the dimension hypothesis");
    c.notes.push(format!("{nontrivial} with genfor > 1"));
    c.finish()
}

fn criterion_6() -> Result<bool> {
    let mut c = Criterion::new(6, "essential families have an interior point in the sum");
    for i in 0..100u64 {
        let n = 2 + (i % 3) as usize;
        let seed = 6_000 + i;
        let f = random_essential_family(n, 2, seed)?;
        let l = f.total_sum()?.lstar();
        c.check(l >= 1, || format!("n={n} seed={seed}: lstar(sum) = {l}"));
    }
    let h = LatticePolytope::new(2, [vec![0, 0], vec![1, 0]])?;
    let v = LatticePolytope::new(2, [vec![0, 0], vec![0, 1]])?;
    let transverse = PolytopeFamily::new(2, vec![v, h.clone(), h])?;
    let essential = transverse.is_essential()?.essential();
    let l = transverse.total_sum()?.lstar();
    c.check(!essential && l == 0, || {
        format!("transverse segment family: essential {essential}, lstar(sum) = {l}")
    });
    Ok(c.finish())
}

fn criterion_7() -> Result<bool> {
    let mut c = Criterion::new(7, "first-page vanishing and E1^(n+1,0) = dim S_rho");
    for i in 0..50u64 {
        let n = 2 + (i % 3) as usize;
        let seed = 7_000 + i;
        let f = random_essential_family(n, 2, seed)?;
        let r = analyze(&f, &OracleRequest::None)?;
        let Some(e1) = r.e1 else {
            c.check(false, || format!("n={n} seed={seed}: no table"));
            continue;
        };
        for p in 0..=n {
            for q in 0..=n {
                if p + q > n {
                    let e = e1.get(p, q);
                    c.check(e == 0, || format!("n={n} seed={seed}: E1^({p},{q}) = {e}"));
                }
            }
        }
        let fan = family_fan(&f)?;
        let basis = critical_degree(&f, &fan)?.graded_basis()?.dim() as u64;
        let corner = e1.get(n + 1, 0);
        let l = r.lstar_total;
        c.check(corner == basis && basis == l, || {
            format!("n={n} seed={seed}: E1^(n+1,0) = {corner}, |basis| = {basis}, lstar = {l}")
        });
    }
    Ok(c.finish())
}

fn p1_h(k: i64) -> [u64; 2] {
    [(k + 1).max(0) as u64, (-k - 1).max(0) as u64]
}

fn binom2(m: i64) -> u64 {
    if m < 2 {
        0
    } else {
        (m * (m - 1) / 2) as u64
    }
}

fn p2_h(k: i64) -> [u64; 3] {
    [binom2(k + 2), 0, binom2(-k - 1)]
}

fn p1p1_h(a: i64, b: i64) -> [u64; 3] {
    let (x, y) = (p1_h(a), p1_h(b));
    [x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[1] * y[1]]
}

fn criterion_8() -> Result<bool> {
    let mut c = Criterion::new(8, "line bundle cohomology on P1, P2, P1xP1");
    let p1 = NormalFan::of_polytope(&LatticePolytope::new(1, [vec![0], vec![1]])?)?;
    let square = LatticePolytope::new(2, [vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]])?;
    let p1p1 = NormalFan::of_polytope(&square)?;
    let p2 = NormalFan::of_polytope(&LatticePolytope::new(2, [vec![0, 0], vec![1, 0], vec![0, 1]])?)?;

    // D = a * point; H^i(O(-D)) and H^i(O(D + K)) with K = O(-2)
    for a in 0..=6i64 {
        let h = p1.cohomology_dims(&LatticePolytope::new(1, [vec![0], vec![a]])?)?;
        c.check(h.h_minus == p1_h(-a) && h.h_plus_k == p1_h(a - 2), || {
            format!("P1 O({a}): got {h:?}")
        });
    }
    for (a, b) in (0..=4i64).flat_map(|a| (0..=4).map(move |b| (a, b))) {
        let rect = LatticePolytope::new(2, [vec![0, 0], vec![a, 0], vec![0, b], vec![a, b]])?;
        let h = p1p1.cohomology_dims(&rect)?;
        c.check(h.h_minus == p1p1_h(-a, -b) && h.h_plus_k == p1p1_h(a - 2, b - 2), || {
            format!("P1xP1 O({a},{b}): got {h:?}")
        });
    }
    for d in 0..=6i64 {
        let tri = LatticePolytope::new(2, [vec![0, 0], vec![d, 0], vec![0, d]])?;
        let h = p2.cohomology_dims(&tri)?;
        c.check(h.h_minus == p2_h(-d) && h.h_plus_k == p2_h(d - 3), || {
            format!("P2 O({d}): got {h:?}")
        });
    }
    // the two named cases
    let two = p1.cohomology_dims(&LatticePolytope::new(1, [vec![0], vec![2]])?)?;
    c.check(two.h_minus == [0, 1], || format!("h^1(P1, O(-2)): {:?}", two.h_minus));
    let unit = p1p1.cohomology_dims(&square)?;
    c.check(unit.h_minus.iter().all(|&x| x == 0), || {
        format!("O(-1,-1) on P1xP1: {:?}", unit.h_minus)
    });
    Ok(c.finish())
}

fn criterion_9(ranks: &RankLog) -> bool {
    let mut c = Criterion::new(9, "exact rank = max rank modulo 3 primes > 2^30");
    c.checked = ranks.matrices;
    c.failures = ranks.disagreements.clone();
    c.notes.push(format!("{} matrices from criteria 1-5", ranks.matrices));
    if ranks.matrices == 0 {
        c.failures.push("no matrices recorded".into());
    }
    c.finish()
}

fn run() -> Result<bool> {
    let mut ranks = RankLog::default();
    let mut ok = true;
    ok &= criterion_1(&mut ranks)?;
    ok &= criterion_2(&mut ranks)?;
    let pool_start = Instant::now();
    let pool = threefold_pool(&mut ranks)?;
    let pool_secs = pool_start.elapsed().as_secs_f64();
    ok &= criterion_3(&pool, pool_secs, &mut ranks)?;
    ok &= criterion_4(&pool);
    ok &= criterion_5(&pool);
    ok &= criterion_6()?;
    ok &= criterion_7()?;
    ok &= criterion_8()?;
    ok &= criterion_9(&ranks);
    Ok(ok)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let outcome = run();
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            println!("acceptance aborted: {e}");
            ExitCode::FAILURE
        }
    }
}
