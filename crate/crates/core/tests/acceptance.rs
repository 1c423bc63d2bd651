//! The ten acceptance criteria, run in sequence. Each prints one line;
//! the test fails if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{bind, hecke_preset, random_decorated, remainder};
use diamond_core::hecke::{
    check_all, derive_conditions, hecke_reduce, hecke_reduce_random, push_dots_left, CheckOptions,
    DotMode, Letter, Template,
};
use diamond_core::ms::{
    comm_canonical, commutation_class_bfs, evaluate, expression_graph, full_triples, leq,
    parabolic_embed, sink, Comparison, Expression, Move, Permutation, RelationKind,
};
use diamond_core::presentation::{preset, System};
use diamond_core::scalar::{Color, Scalar};
use diamond_core::word::{
    bergman_check, complete, count_irreducible, enumerate_irreducible,
    enumerate_minimal_ambiguities, normal_form, validate_system, Alphabet, BergmanOptions,
    CompletionStatus, LinComb, OrderSpec, RewriteSystem, Word,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn word_preset(name: &str) -> RewriteSystem {
    match preset(name).unwrap().system {
        System::WordRewrite(s) => s,
        System::Hecke(_) => unreachable!(),
    }
}

fn all_words(letters: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in 0..letters as u16 {
                let mut v = w.0.clone();
                v.push(l);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn contains_factor(w: &Word, f: &Word) -> bool {
    f.len() <= w.len() && (0..=w.len() - f.len()).any(|p| w.occurs_at(f, p))
}

fn xyz() -> Outcome {
    let s = word_preset("xyz");
    let nf = normal_form(&s, &s.lincomb("zyx").unwrap(), 1000, false)
        .unwrap()
        .result;
    ensure!(
        nf == s.lincomb("xyz + z + 2y + 3x").unwrap(),
        "normal form of zyx is {}",
        s.render_lincomb(&nf)
    );
    let rep = bergman_check(&s, &BergmanOptions::default()).unwrap();
    ensure!(rep.bergman, "not Bergman type");
    let irr: BTreeSet<Word> = enumerate_irreducible(&s, 4).into_iter().collect();
    // oracle: words with no left-hand side as a factor
    let scan: BTreeSet<Word> = all_words(3, 4)
        .into_iter()
        .filter(|w| s.rules.iter().all(|r| !contains_factor(w, &r.lhs)))
        .collect();
    ensure!(irr == scan, "irreducible sets differ");
    ensure!(irr.len() == 35, "{} irreducible words", irr.len());
    ensure!(
        irr.iter().all(|w| w.0.windows(2).all(|p| p[0] <= p[1])),
        "irreducible word not of the form x^a y^b z^c"
    );
    Ok(format!(
        "zyx -> {}; 35 irreducible words up to length 4",
        s.render_lincomb(&nf)
    ))
}

fn s3_coxeter() -> Outcome {
    let s = word_preset("coxeter-s3");
    let words: BTreeSet<String> = enumerate_minimal_ambiguities(&s)
        .iter()
        .map(|a| s.render(&a.word))
        .collect();
    let want: BTreeSet<String> = ["sss", "ttt", "ssts", "stss", "ststs"]
        .map(String::from)
        .into();
    ensure!(words == want, "ambiguities {words:?}");
    let rep = bergman_check(&s, &BergmanOptions::default()).unwrap();
    ensure!(
        rep.bergman && rep.reports.len() == 5,
        "not all five resolvable"
    );
    ensure!(
        rep.irreducible.total == Some(6),
        "irreducible total {:?}",
        rep.irreducible.total
    );
    let irr: Vec<String> = enumerate_irreducible(&s, 6)
        .iter()
        .map(|w| s.render(w))
        .collect();
    ensure!(
        irr == ["1", "s", "t", "st", "ts", "tst"],
        "irreducibles {irr:?}"
    );
    Ok("5 minimal ambiguities resolvable; irreducibles 1, s, t, st, ts, tst".into())
}

/// The S4 rules with the three non-quadratic relations oriented by `flip`,
/// under the first weighted deglex order compatible with them.
fn s4_oriented(flip: [bool; 3]) -> Option<RewriteSystem> {
    let pairs = [("sts", "tst"), ("tut", "utu"), ("su", "us")];
    let perms: [[u16; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for prec in perms {
        for w in 0..27u64 {
            let weights = vec![1 + w % 3, 1 + (w / 3) % 3, 1 + w / 9];
            let mut s = RewriteSystem::new(
                Alphabet::new(["s", "t", "u"]).unwrap(),
                OrderSpec::weighted(&prec, weights),
                vec![],
            );
            for q in ["ss", "tt", "uu"] {
                s.push_rule(q, q, "1").unwrap();
            }
            for (k, (a, b)) in pairs.iter().enumerate() {
                let (l, r) = if flip[k] { (b, a) } else { (a, b) };
                s.push_rule(l, l, r).unwrap();
            }
            if validate_system(&s).valid {
                return Some(s);
            }
        }
    }
    None
}

fn s4_failure() -> Outcome {
    for bits in 0..8u8 {
        let flip = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
        let s = s4_oriented(flip).ok_or(format!("no compatible order for orientation {flip:?}"))?;
        let rep = bergman_check(&s, &BergmanOptions::default()).unwrap();
        ensure!(!rep.bergman, "orientation {flip:?} is Bergman type");
        let long: Vec<Word> = enumerate_irreducible(&s, 6)
            .into_iter()
            .filter(|w| w.len() == 6 && evaluate(&to_expression(w, 4)) == Permutation::longest(4))
            .collect();
        ensure!(
            long.len() >= 2,
            "orientation {flip:?}: {} irreducible expressions of w0",
            long.len()
        );
    }
    let s = word_preset("coxeter-s4-naive");
    let rep = bergman_check(&s, &BergmanOptions::default()).unwrap();
    let witnesses: Vec<String> = rep
        .unresolvable()
        .map(|r| r.ambiguity.describe(&s))
        .collect();
    ensure!(
        witnesses.iter().any(|w| w == "(stsu, sts, su)"),
        "witnesses {witnesses:?}"
    );
    for w in ["utustu", "tustus", "ustust"] {
        ensure!(s.is_irreducible(&s.word(w).unwrap()), "{w} is reducible");
    }
    Ok(format!(
        "8 orientations not Bergman type; witness (stsu, sts, su) among {} unresolvable",
        witnesses.len()
    ))
}

fn to_expression(w: &Word, n: usize) -> Expression {
    Expression::new(n, w.0.iter().map(|&l| l as u8 + 1).collect()).unwrap()
}

fn gradings() -> Outcome {
    let mut perms = Permutation::all(4);
    perms.extend(
        ["24153", "53412", "54321"]
            .iter()
            .map(|s| Permutation::from_images(s.bytes().map(|b| b - b'0').collect()).unwrap()),
    );
    for w in &perms {
        let g = expression_graph(w, 0, 1_000_000).unwrap();
        let q = &g.quotient;
        let full = full_triples(&w.reduced_expression()).len();
        let (src, snk) = (q.sources(), q.sinks());
        ensure!(
            src.len() == 1 && q.heights[src[0]] == Some(0),
            "{w}: sources {src:?}"
        );
        ensure!(
            snk.len() == 1 && q.heights[snk[0]] == Some(full),
            "{w}: sinks {snk:?}"
        );
        for e in &q.edges {
            ensure!(e.kind == RelationKind::Braid, "{w}: non-braid edge");
            let (a, b) = (q.heights[e.from].unwrap(), q.heights[e.to].unwrap());
            ensure!(b == a + 1, "{w}: edge from height {a} to {b}");
        }
    }
    let w0 = Permutation::longest(4);
    let g = expression_graph(&w0, 0, 1_000_000).unwrap();
    let classes: BTreeSet<BTreeSet<Expression>> =
        g.vertices.iter().map(commutation_class_bfs).collect();
    ensure!(
        g.vertices.len() == 16,
        "{} reduced expressions of w0",
        g.vertices.len()
    );
    ensure!(
        g.quotient.classes.len() == 8 && classes.len() == 8,
        "{} / {} classes",
        g.quotient.classes.len(),
        classes.len()
    );
    Ok("all of S4 and three of S5 graded with unique source and sink; w0: 16 expressions, 8 classes".into())
}

/// Replays a sink trace, checking each move is a distant commutation, a
/// forward braid or a cancellation.
fn replay(e: &Expression, trace: &[Move]) -> Result<Expression, String> {
    let mut l = e.letters().to_vec();
    for m in trace {
        match *m {
            Move::Commute { position: p } => {
                ensure!(
                    p + 1 < l.len() && l[p].abs_diff(l[p + 1]) >= 2,
                    "bad commutation at {p}"
                );
                l.swap(p, p + 1);
            }
            Move::Braid { position: p } => {
                ensure!(
                    p + 2 < l.len() && l[p] == l[p + 2] && l[p] + 1 == l[p + 1],
                    "bad braid at {p}"
                );
                let i = l[p];
                l[p..p + 3].copy_from_slice(&[i + 1, i, i + 1]);
            }
            Move::Cancel { position: p } => {
                ensure!(
                    p + 1 < l.len() && l[p] == l[p + 1],
                    "bad cancellation at {p}"
                );
                l.drain(p..p + 2);
            }
        }
    }
    Ok(e.with_letters(l))
}

fn unique_sinks() -> Outcome {
    let mut checked = 0;
    for n in [3, 4] {
        for w in Permutation::all(n) {
            let g = expression_graph(&w, 4, 1_000_000).unwrap();
            let q = &g.quotient;
            let sinks = q.sinks();
            ensure!(sinks.len() == 1, "{w}: {} terminal classes", sinks.len());
            let target = &q.classes[sinks[0]];
            for v in &g.vertices {
                let r = sink(v, 100_000).map_err(|e| e.to_string())?;
                ensure!(&r.sink == target, "{w}: sink of {v} is {}", r.sink);
                ensure!(
                    comm_canonical(&replay(v, &r.trace)?) == *target,
                    "{w}: trace of {v} ends elsewhere"
                );
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} expressions over S3 and S4 reach their unique terminal class"
    ))
}

fn mutate(rng: &mut StdRng, e: &Expression) -> Expression {
    let mut l = e.letters().to_vec();
    for _ in 0..rng.gen_range(1..6) {
        let p = if l.is_empty() {
            0
        } else {
            rng.gen_range(0..l.len())
        };
        match rng.gen_range(0..3) {
            0 if p + 1 < l.len() && l[p].abs_diff(l[p + 1]) >= 2 => l.swap(p, p + 1),
            1 if p + 2 < l.len() && l[p] == l[p + 2] && l[p].abs_diff(l[p + 1]) == 1 => {
                let (a, b) = (l[p], l[p + 1]);
                l[p..p + 3].copy_from_slice(&[b, a, b]);
            }
            2 if l.len() < 9 => {
                let i = rng.gen_range(1..e.n() as u8);
                l.splice(p..p, [i, i]);
            }
            _ => {}
        }
    }
    e.with_letters(l)
}

fn check_pair(a: &Expression, b: &Expression, letters: &[u8]) -> Result<(), String> {
    let c = leq(a, b).map_err(|e| e.to_string())?;
    ensure!(
        leq(b, a).unwrap() == c.reverse(),
        "{a} vs {b}: not antisymmetric"
    );
    ensure!(
        (c == Comparison::Eq) == (comm_canonical(a) == comm_canonical(b)),
        "{a} vs {b}: Eq off classes"
    );
    let m = a.n() + 1;
    for k in 0..2 {
        let (ea, eb) = (
            parabolic_embed(a, m, k).unwrap(),
            parabolic_embed(b, m, k).unwrap(),
        );
        ensure!(
            leq(&ea, &eb).unwrap() == c,
            "{a} vs {b}: embedding changes the comparison"
        );
    }
    if c == Comparison::Lt {
        for &x in letters {
            let x = Expression::new(a.n(), vec![x]).unwrap();
            let (xa, xb) = (x.concat(a).unwrap(), x.concat(b).unwrap());
            let (ax, bx) = (a.concat(&x).unwrap(), b.concat(&x).unwrap());
            ensure!(
                leq(&xa, &xb).unwrap() == Comparison::Lt,
                "{a} < {b} but not after prefixing {x}"
            );
            ensure!(
                leq(&ax, &bx).unwrap() == Comparison::Lt,
                "{a} < {b} but not after appending {x}"
            );
        }
    }
    Ok(())
}

fn order_laws() -> Outcome {
    let mut pairs = 0usize;
    for n in 2..=4 {
        let letters: Vec<u8> = (1..n as u8).collect();
        let mut groups: BTreeMap<Permutation, Vec<Expression>> = BTreeMap::new();
        for len in 0..=6 {
            for e in Expression::all_of_length(n, len) {
                groups.entry(evaluate(&e)).or_default().push(e);
            }
        }
        for exprs in groups.values() {
            let classes: Vec<Expression> = exprs
                .iter()
                .map(comm_canonical)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            for a in exprs {
                for b in exprs {
                    check_pair(
                        a,
                        b,
                        if a.len().max(b.len()) <= 5 {
                            &letters
                        } else {
                            &[]
                        },
                    )?;
                    pairs += 1;
                }
            }
            // no infinite descent: the strict order on classes is acyclic
            let below: Vec<Vec<usize>> = classes
                .iter()
                .map(|a| {
                    (0..classes.len())
                        .filter(|&j| leq(&classes[j], a).unwrap() == Comparison::Lt)
                        .collect()
                })
                .collect();
            let mut state = vec![0u8; classes.len()];
            fn visit(v: usize, below: &[Vec<usize>], state: &mut [u8]) -> bool {
                match state[v] {
                    1 => return false,
                    2 => return true,
                    _ => {}
                }
                state[v] = 1;
                let ok = below[v].iter().all(|&u| visit(u, below, state));
                state[v] = 2;
                ok
            }
            ensure!(
                (0..classes.len()).all(|v| visit(v, &below, &mut state)),
                "descending cycle"
            );
        }
    }
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..1000 {
        let len = rng.gen_range(0..8);
        let a = Expression::new(5, (0..len).map(|_| rng.gen_range(1..5)).collect()).unwrap();
        let b = mutate(&mut rng, &a);
        check_pair(&a, &b, &[1, 2, 3, 4])?;
    }
    Ok(format!(
        "{pairs} exhaustive pairs (n <= 4, length <= 6) and 1000 random pairs in S5"
    ))
}

fn modified_symmetric() -> Outcome {
    let p = hecke_preset("modified-symmetric");
    let (cond, _) = derive_conditions(&p, CheckOptions::default()).unwrap();
    let s = |t: &str| t.parse::<Scalar>().unwrap();
    let gens: Vec<String> = cond.generators.iter().map(|g| g.to_string()).collect();
    let mut failures = Vec::new();
    if !cond.generators.contains(&s("2*a")) || !cond.generators.contains(&s("2*b")) {
        failures.push("2*a or 2*b missing from the generators".into());
    }
    let expected = [s("a"), s("b"), s("e"), s("c + d"), s("c*beta")];
    if let Some(g) = cond
        .generators
        .iter()
        .find(|g| !remainder(g, &expected).is_zero())
    {
        failures.push(format!("{g} is outside the expected ideal"));
    }
    let missing: Vec<String> = expected
        .iter()
        .filter(|f| !remainder(f, &cond.generators).is_zero())
        .map(|f| f.to_string())
        .collect();
    if !missing.is_empty() {
        failures.push(format!(
            "expected generators {missing:?} are not in the derived ideal"
        ));
    }
    // every solution of the expected conditions must resolve
    for (c, beta) in [(0, 1), (1, 0), (0, 0)] {
        let q = p
            .substitute(&bind(&[
                ("a", 0),
                ("b", 0),
                ("e", 0),
                ("c", c),
                ("d", -c),
                ("beta", beta),
            ]))
            .unwrap();
        let rep = check_all(&q, DotMode::Symbolic, CheckOptions::default()).unwrap();
        if !rep.bergman {
            failures.push(format!("c = {c}, beta = {beta} does not re-check"));
        }
    }
    // and so does c = beta = 1, which the derived ideal allows
    let q = p
        .substitute(&bind(&[
            ("a", 0),
            ("b", 0),
            ("e", 0),
            ("c", 1),
            ("d", -1),
            ("beta", 1),
        ]))
        .unwrap();
    let free = check_all(&q, DotMode::Symbolic, CheckOptions::default()).unwrap();
    let reduced: Vec<String> = cond.reduced.iter().map(|g| g.to_string()).collect();
    let summary = format!(
        "{} generators reducing to {reduced:?}; c = beta = 1 {}",
        gens.len(),
        if free.bergman {
            "resolves every instance"
        } else {
            "leaves residuals"
        }
    );
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn nil_hecke() -> Outcome {
    let p = hecke_preset("nilhecke");
    let rep = check_all(&p, DotMode::Generators, CheckOptions::default()).unwrap();
    ensure!(rep.bergman, "unresolvable instances");
    let sym = check_all(&p, DotMode::Symbolic, CheckOptions::default()).unwrap();
    ensure!(sym.bergman, "unresolvable symbolic instances");
    let templates: BTreeSet<Template> = rep.reports.iter().map(|r| r.instance.template).collect();
    ensure!(templates.len() == 8, "templates covered {templates:?}");
    let i = Color::new("i");
    for n in 1..=4 {
        let b = vec![i.clone(); n];
        let basis = p.certified_basis(&rep, &b, &b).map_err(|e| e.to_string())?;
        let fact: usize = (1..=n).product();
        ensure!(basis.len() == fact, "rank {} for n = {n}", basis.len());
    }
    // dots through a crossing against the divided difference
    // (f - swap f) / (x1 - x2), for monomials and for products
    let b = vec![i.clone(); 2];
    let resolve = |text: &str| match p
        .resolve(&b, vec![Letter::Dot(text.parse().unwrap())])
        .unwrap()
        .pop()
    {
        Some(Letter::Dot(f)) => f,
        _ => unreachable!(),
    };
    let swap = |text: &str| {
        text.replace("x[1]", "x[#]")
            .replace("x[2]", "x[1]")
            .replace("x[#]", "x[2]")
    };
    let mut cases = Vec::new();
    for d in 0..=4u32 {
        for k in 0..=d {
            cases.push((format!("x[1]^{k}*x[2]^{}", d - k), String::from("1")));
        }
    }
    cases.extend(
        [
            ("x[1]^2 + x[2]", "x[1]*x[2] - 3"),
            ("x[2]^3", "x[1] + 2*x[2]^2"),
            ("x[1]", "x[1]"),
        ]
        .map(|(f, g)| (f.into(), g.into())),
    );
    let x12 = &resolve("x[1]") - &resolve("x[2]");
    for (f, g) in &cases {
        let fg = format!("({f})*({g})");
        let t = push_dots_left(
            &p,
            &b,
            &p.parse_decorated(&b, &format!("s{{{f}}}{{{g}}}")).unwrap(),
        )
        .unwrap();
        let phi = t.coefficient(&[1]);
        let del = t.coefficient(&[]);
        ensure!(phi == resolve(&swap(&fg)), "phi({fg}) = {phi}");
        ensure!(
            &del * &x12 == &resolve(&fg) - &resolve(&swap(&fg)),
            "partial({fg}) = {del}"
        );
    }
    Ok(format!(
        "{} instances resolvable; ranks 1, 2, 6, 24; {} divided-difference checks",
        rep.reports.len(),
        cases.len()
    ))
}

fn cross_module() -> Outcome {
    let p = hecke_preset("coxeter");
    let i = Color::new("i");
    let mut compared = 0;
    for n in 2..=4usize {
        let names: Vec<&str> = ["s", "t", "u"][..n - 1].to_vec();
        let mut naive = RewriteSystem::new(
            Alphabet::new(&names).unwrap(),
            OrderSpec::deglex(&[2, 1, 0][3 - (n - 1)..]),
            vec![],
        );
        for (k, a) in names.iter().enumerate() {
            naive
                .push_rule(&format!("{a}{a}"), &format!("{a}{a}"), "1")
                .unwrap();
            if let Some(b) = names.get(k + 1) {
                naive
                    .push_rule(
                        &format!("{a}{b}{a}"),
                        &format!("{a}{b}{a}"),
                        &format!("{b}{a}{b}"),
                    )
                    .unwrap();
            }
            if let Some(c) = names.get(k + 2) {
                naive
                    .push_rule(&format!("{a}{c}"), &format!("{a}{c}"), &format!("{c}{a}"))
                    .unwrap();
            }
        }
        let done = complete(&naive, 20, 1_000_000).unwrap();
        ensure!(
            done.status == CompletionStatus::Confluent,
            "S{n} completion did not converge"
        );
        let sys = done.system;
        let bottom = vec![i.clone(); n];
        for w in all_words(n - 1, 6) {
            let e = to_expression(&w, n);
            let letters: Vec<Letter> = e.letters().iter().map(|&l| Letter::Cross(l)).collect();
            let h = hecke_reduce(&p, &bottom, &[(letters, Scalar::one())], 100_000, false)
                .unwrap()
                .result;
            let nf = normal_form(&sys, &LinComb::word(w.clone()), 100_000, false)
                .unwrap()
                .result;
            let expected: BTreeMap<Vec<u8>, Scalar> = nf
                .terms()
                .map(|(v, c)| {
                    (
                        comm_canonical(&sink(&to_expression(v, n), 100_000).unwrap().sink)
                            .letters()
                            .to_vec(),
                        c.clone(),
                    )
                })
                .collect();
            ensure!(
                h.terms == expected,
                "{e}: hecke {} vs words {}",
                h.render(),
                sys.render_lincomb(&nf)
            );
            compared += 1;
        }
    }
    let nh = hecke_preset("nilhecke");
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..500 {
        let n = rng.gen_range(1..=4);
        let bottom = vec![i.clone(); n];
        let len = rng.gen_range(0..=5);
        let w = random_decorated(&nh, &mut rng, &bottom, len);
        let input = [(w, Scalar::one())];
        let det = hecke_reduce(&nh, &bottom, &input, 1_000_000, false)
            .unwrap()
            .result;
        for _ in 0..2 {
            let r = hecke_reduce_random(&nh, &bottom, &input, 1_000_000, &mut rng)
                .unwrap()
                .result;
            ensure!(
                r == det,
                "random strategy disagrees on {}",
                diamond_core::hecke::render_letters(&input[0].0)
            );
        }
    }
    Ok(format!("{compared} Coxeter words agree with the completed word systems; 500 random nilHecke words confluent"))
}

fn completion_demo() -> Outcome {
    let s = word_preset("s3-bad");
    let c = complete(&s, 10, 100_000).map_err(|e| e.to_string())?;
    ensure!(
        c.status == CompletionStatus::Confluent,
        "completion stopped: {:?}",
        c.status
    );
    let count = count_irreducible(&c.system, 12);
    ensure!(
        count.total == Some(6),
        "irreducible total {:?}",
        count.total
    );
    Ok(format!(
        "{} rounds, {} rules added, 6 irreducible words",
        c.rounds,
        c.added.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("xyz normal form and basis", xyz, 1),
        ("S3 Coxeter ambiguities and basis", s3_coxeter, 1),
        (
            "S4 Coxeter presentation is not Bergman type",
            s4_failure,
            10,
        ),
        ("commutation class gradings", gradings, 30),
        ("unique sinks", unique_sinks, 120),
        ("order laws", order_laws, 60),
        ("modified symmetric conditions", modified_symmetric, 30),
        ("nilHecke certification", nil_hecke, 60),
        ("cross-module confluence", cross_module, 120),
        ("completion demo", completion_demo, 5),
    ];
    let mut failed = Vec::new();
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > Duration::from_secs(*limit) => {
                Err(format!("took {took:.1?}, limit {limit}s"))
            }
            o => o,
        };
        let line = match &outcome {
            Ok(detail) => format!(
                "criterion {:>2} PASS [{took:.2?}] {name}: {detail}\n",
                k + 1
            ),
            Err(detail) => format!(
                "criterion {:>2} FAIL [{took:.2?}] {name}: {detail}\n",
                k + 1
            ),
        };
        // bypass output capture so the summary is always visible
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if outcome.is_err() {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
