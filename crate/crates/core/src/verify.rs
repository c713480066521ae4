//! Invariant suites behind `stabplane verify`.
//!
//! Every suite draws from a fixed-seed generator, so reports are identical
//! between runs.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exceptional::{
    five_points, hom_data, left_mutation_class, make_triple, median, tree, DyadicLabel,
    TripleShape, check_bundle,
};
use crate::gldim::{
    gldim_algebraic, gldim_geometric, phase_left_mutation_character, phase_left_mutation_closed,
    phase_right_mutation_character, phase_right_mutation_closed, GldimCase,
};
use crate::lepotier::{classify, GeoClassification};
use crate::numk::{dual, euler_pairing, reduce, serre_twist, twist, CharVector};
use crate::plane::{
    delta_value, horizontal_distance_pair, intersect_line_parabola, line_through_char, on_segment,
    twist_point, Parabola, PlanePoint,
};
use crate::rat::{int, rat, Rat};
use crate::stability::{classify_theta, AlgebraicSC, GeometricSC};
use crate::surd::Surd;
use crate::walls::{bayer_bracket, chord, chord_phase};

pub const SUITES: [&str; 7] = [
    "numk",
    "plane",
    "exceptional",
    "lepotier",
    "stability",
    "gldim",
    "walls",
];

const SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAILED" };
        write!(
            f,
            "{:<12} {status:<6} checks={} failures={}",
            self.name,
            self.checks,
            self.failures.len()
        )
    }
}

/// Runs one named suite, or every suite for `"all"`.
pub fn run(suite: &str) -> Result<Vec<SuiteReport>> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::Parse(format!("unknown suite {suite:?}")));
    };
    Ok(names.into_iter().map(run_one).collect())
}

fn run_one(name: &str) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut r = SuiteReport::new(name);
    match name {
        "numk" => numk_suite(&mut r, &mut rng),
        "plane" => plane_suite(&mut r, &mut rng),
        "exceptional" => exceptional_suite(&mut r),
        "lepotier" => lepotier_suite(&mut r, &mut rng),
        "stability" => stability_suite(&mut r, &mut rng),
        "gldim" => gldim_suite(&mut r, &mut rng),
        "walls" => walls_suite(&mut r, &mut rng),
        _ => unreachable!("suite names are checked by run"),
    }
    r
}

/// A rational `n/d` with `|n| ≤ num_bound`, `1 ≤ d ≤ den_bound`.
pub fn random_rat(rng: &mut impl Rng, num_bound: i64, den_bound: i64) -> Rat {
    rat(rng.gen_range(-num_bound..=num_bound), rng.gen_range(1..=den_bound))
}

/// A lattice character with small entries.
pub fn random_lattice(rng: &mut impl Rng) -> CharVector {
    let r = rng.gen_range(-6..=6);
    let c = rng.gen_range(-12..=12);
    let twice_e = rng.gen_range(-40..=40);
    let v = CharVector::from_ints(r, c, twice_e);
    if v.is_lattice() {
        v
    } else {
        // χ(O, v) is a half-integer off; shift ch2 by 1/2.
        CharVector::new(v.ch0, v.ch1, v.ch2 + rat(1, 2))
    }
}

pub fn random_char(rng: &mut impl Rng) -> CharVector {
    CharVector::new(
        random_rat(rng, 20, 7),
        random_rat(rng, 20, 7),
        random_rat(rng, 20, 7),
    )
}

/// A rational point strictly inside `Δ_0`, with `|s| ≤ 3`.
pub fn random_interior_point(rng: &mut impl Rng) -> (Rat, Rat) {
    let s = random_rat(rng, 300, 100);
    let lift = rat(rng.gen_range(1..=400), rng.gen_range(1..=100));
    let q = &s * &s / int(2) + lift;
    (s, q)
}

/// A rational point strictly inside the triangle `O, O^+, O^r`.
pub fn random_right_leg_point(rng: &mut impl Rng) -> (Rat, Rat) {
    let a = int(rng.gen_range(1..=997));
    let b = int(rng.gen_range(1..=997));
    let c = int(rng.gen_range(1..=997));
    let total = &a + &b + &c;
    // O = (0, 0), O^+ = (0, −1), O^r = (1/3, −1/2)
    let s = &c * rat(1, 3) / &total;
    let q = (-&b - &c * rat(1, 2)) / &total;
    (s, q)
}

fn numk_suite(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    let o = CharVector::structure_sheaf();
    let oracle = [
        (o.clone(), o.clone(), 1),
        (o.clone(), CharVector::line_bundle(1), 3),
        (CharVector::line_bundle(1), o.clone(), 0),
        (o.clone(), CharVector::line_bundle(3), 10),
    ];
    for (a, b, want) in oracle {
        r.check(euler_pairing(&a, &b) == int(want), || format!("χ({a}, {b}) ≠ {want}"));
    }
    for _ in 0..100 {
        let (a, b, c) = (random_char(rng), random_char(rng), random_char(rng));
        let (x, y) = (random_rat(rng, 9, 5), random_rat(rng, 9, 5));
        let combo = &a.scale(&x) + &b.scale(&y);
        r.check(
            euler_pairing(&combo, &c) == &x * euler_pairing(&a, &c) + &y * euler_pairing(&b, &c),
            || "χ not linear in the first slot".into(),
        );
        r.check(
            euler_pairing(&c, &combo) == &x * euler_pairing(&c, &a) + &y * euler_pairing(&c, &b),
            || "χ not linear in the second slot".into(),
        );
        if !a.ch0.is_zero() {
            let p = reduce(&a).expect("nonzero rank");
            let expected = &a.ch0 * &a.ch0 * (int(1) - &p.s * &p.s + int(2) * &p.q);
            r.check(euler_pairing(&a, &a) == expected, || format!("self pairing of {a}"));
        }
        let (m, n) = (rng.gen_range(-9..=9), rng.gen_range(-9..=9));
        r.check(twist(&a, m + n) == twist(&twist(&a, m), n), || "twist is not an action".into());
        r.check(twist(&twist(&a, m), -m) == a, || "twist not invertible".into());
    }
    for _ in 0..100 {
        let (a, b) = (random_lattice(rng), random_lattice(rng));
        r.check(
            euler_pairing(&a, &b) == euler_pairing(&b, &serre_twist(&a)),
            || format!("Serre duality fails for {a}, {b}"),
        );
        r.check(
            euler_pairing(&dual(&b), &dual(&a)) == euler_pairing(&a, &b),
            || format!("dual is not contravariant on {a}, {b}"),
        );
        r.check(a.is_lattice(), || format!("{a} should be a lattice class"));
    }
}

fn plane_suite(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    for _ in 0..200 {
        let p = PlanePoint::rational(random_rat(rng, 50, 9), random_rat(rng, 50, 9));
        r.check(delta_value(&twist_point(&p)) == delta_value(&p), || {
            format!("twist moves {p} off its parabola")
        });
    }
    let mut met = 0;
    while met < 50 {
        let (s, q) = random_interior_point(rng);
        let v = random_lattice(rng);
        let sigma = PlanePoint::rational(s, q);
        let Ok(line) = line_through_char(&sigma, &v) else {
            continue;
        };
        for a in [Rat::zero(), rat(1, 2), rat(-3, 7)] {
            for x in intersect_line_parabola(&line, &Parabola::new(a.clone())) {
                r.check(line.contains(&x) && delta_value(&x) == Surd::rational(a.clone()), || {
                    format!("intersection {x} misses {line} or Δ_{a}")
                });
            }
        }
        if let Ok((u, w)) = horizontal_distance_pair(&sigma, &v) {
            met += 1;
            r.check(u == w, || format!("horizontal distance differs for {sigma}, {v}"));
        }
    }
}

fn exceptional_suite(r: &mut SuiteReport) {
    let bundles = tree().generate_window(&int(-1), &int(2), 6);
    for e in &bundles {
        r.check(check_bundle(e), || format!("{e} fails the bundle invariants"));
    }
    for w in bundles.windows(2) {
        r.check(w[0].slope() < w[1].slope(), || format!("slopes not increasing at {}", w[1]));
    }
    for k in 0..=6u32 {
        for p in -(1i64 << k)..=(2i64 << k) {
            let c = DyadicLabel::new(p, k);
            if c.m() != k {
                continue;
            }
            let t = make_triple(c, TripleShape::Consecutive);
            r.check(t.is_ok(), || format!("triple at {c} violates Markov"));
            let Ok(t) = t else { continue };
            let h = hom_data(&t);
            let [e1, e2, e3] = t.members().map(|e| &e.ch);
            r.check(
                euler_pairing(e2, e1).is_zero()
                    && euler_pairing(e3, e2).is_zero()
                    && euler_pairing(e3, e1).is_zero(),
                || format!("triple at {c} is not exceptional"),
            );
            r.check(
                euler_pairing(e1, e2) == Rat::from_integer(h.hom12.clone())
                    && euler_pairing(e2, e3) == Rat::from_integer(h.hom23.clone())
                    && euler_pairing(e1, e3) == Rat::from_integer(h.hom13.clone()),
                || format!("hom formulas fail at {c}"),
            );
            let l = left_mutation_class(e3, &twist(e3, 3));
            let combo = &e2.scale(&Rat::from_integer(h.r.clone()))
                - &e1.scale(&Rat::from_integer(h.hom13.clone()));
            r.check(combo == -&l, || format!("resolution fails at {c}"));
        }
    }
    for e in bundles.iter().filter(|e| e.label.m() > 0).take(40) {
        let (lo, hi) = e.label.parents().expect("fractional");
        let (a, b) = (tree().bundle(lo), tree().bundle(hi));
        for n in [-2, 3] {
            let twisted = median(&a.twisted(n), &b.twisted(n)).map(|m| m.ch);
            r.check(twisted.as_ref() == Ok(&twist(&e.ch, n)), || {
                format!("median not twist-equivariant at {e}")
            });
        }
        let f = five_points(e);
        let rk = e.rank();
        let target = rat(1, 2) + Rat::one() / (int(18) * rk * rk * rk * rk);
        r.check(
            delta_value(&f.e_l).as_rational() == Some(&target)
                && delta_value(&f.e_r).as_rational() == Some(&target),
            || format!("E^l/E^r of {e} off their parabola"),
        );
        r.check(on_segment(&f.e_plus, &f.el_curve, &f.e_l), || {
            format!("E^l of {e} not on its segment")
        });
    }
}

fn random_band_point(rng: &mut impl Rng) -> PlanePoint {
    let s = random_rat(rng, 150, 100);
    let delta = rat(rng.gen_range(-100..=1100), 1000);
    let q = &s * &s / int(2) - delta;
    PlanePoint::rational(s, q)
}

fn lepotier_suite(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    for _ in 0..200 {
        let p = random_band_point(rng);
        let shallow = classify(&p, 1);
        let deep = classify(&p, 3);
        if shallow.is_above() {
            r.check(deep.is_above(), || format!("{p} lost AboveCurve with depth"));
        }
        if matches!(shallow, GeoClassification::BelowCurve) {
            r.check(!deep.is_above(), || format!("{p} flipped Below→Above"));
        }
    }
}

fn random_phases(rng: &mut impl Rng) -> ([f64; 3], [f64; 3]) {
    let m = [
        rng.gen_range(0.1..4.0),
        rng.gen_range(0.1..4.0),
        rng.gen_range(0.1..4.0),
    ];
    let p1: f64 = rng.gen_range(-2.0..2.0);
    let p2 = p1 + rng.gen_range(0.05..1.6);
    let p3 = (p2 + rng.gen_range(0.05..1.6)).max(p1 + 1.05);
    (m, [p1, p2, p3])
}

/// A handful of triples of different shapes and depths.
pub fn sample_triples() -> Vec<crate::exceptional::ExceptionalTriple> {
    [
        (DyadicLabel::integer(0), TripleShape::Consecutive),
        (DyadicLabel::new(1, 1), TripleShape::Consecutive),
        (DyadicLabel::new(3, 2), TripleShape::Consecutive),
        (DyadicLabel::new(5, 3), TripleShape::RightTwisted),
        (DyadicLabel::new(-1, 1), TripleShape::LeftTwisted),
    ]
    .into_iter()
    .map(|(c, s)| make_triple(c, s).expect("valid triple"))
    .collect()
}

fn stability_suite(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    let triples = sample_triples();
    for i in 0..300 {
        let t = &triples[i % triples.len()];
        let (m, phi) = random_phases(rng);
        let Ok(sigma) = AlgebraicSC::new(t.clone(), m, phi) else {
            continue;
        };
        let Ok(tag) = classify_theta(&sigma) else {
            r.check(false, || format!("classify_theta failed at {m:?} {phi:?}"));
            continue;
        };
        let c = rng.gen_range(-3.0..3.0);
        let lambda = rng.gen_range(0.2..5.0);
        let moved = AlgebraicSC::new(
            t.clone(),
            m.map(|x| x * lambda),
            phi.map(|x| x + c),
        )
        .and_then(|s| classify_theta(&s));
        // Exact ties can move across a rounding boundary; compare away from them.
        let gl = phi[2] - phase_left_mutation_closed(t, m[0], m[1], phi[0], phi[1]);
        let gr = phase_right_mutation_closed(t, m[1], m[2], phi[1], phi[2]) - phi[0];
        if gl.abs() > 1e-6 && gr.abs() > 1e-6 {
            r.check(moved.as_ref() == Ok(&tag), || {
                format!("C-action changes the tag at {m:?} {phi:?}")
            });
        }
    }
}

fn gldim_suite(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    for _ in 0..1000 {
        let (s, q) = random_interior_point(rng);
        let res = gldim_geometric(&GeometricSC::unchecked(s, q), 2);
        r.check(
            matches!(&res, Ok(g) if g.value == 2.0 && g.case == GldimCase::ParabolaInterior),
            || "Δ<0 point not of value 2".into(),
        );
    }
    for t in sample_triples() {
        for _ in 0..200 {
            let (m, phi) = random_phases(rng);
            let a = phase_left_mutation_closed(&t, m[0], m[1], phi[0], phi[1]);
            let b = phase_left_mutation_character(&t, m[0], m[1], phi[0], phi[1]);
            r.check((a - b).abs() < 1e-12, || format!("left routes differ by {}", a - b));
            let a = phase_right_mutation_closed(&t, m[1], m[2], phi[1], phi[2]);
            let b = phase_right_mutation_character(&t, m[1], m[2], phi[1], phi[2]);
            r.check((a - b).abs() < 1e-12, || format!("right routes differ by {}", a - b));
        }
    }
    let t = make_triple(DyadicLabel::integer(0), TripleShape::Consecutive).expect("standard");
    for _ in 0..100 {
        let p1 = rng.gen_range(-5.0..5.0);
        let p2 = p1 + rng.gen_range(1.0..6.0);
        let p3 = p2 + rng.gen_range(1.0..6.0);
        let res = AlgebraicSC::new(t.clone(), [1.0, 2.0, 0.5], [p1, p2, p3])
            .and_then(|s| gldim_algebraic(&s));
        r.check(
            matches!(&res, Ok(g) if g.case == GldimCase::AlgebraicPure && g.value == p3 - p1),
            || format!("pure value wrong at {p1}, {p2}, {p3}"),
        );
    }
    for _ in 0..100 {
        let (s, q) = random_right_leg_point(rng);
        let right = gldim_geometric(&GeometricSC::unchecked(s.clone(), q.clone()), 2);
        let left = gldim_geometric(&GeometricSC::unchecked(-s, q), 2);
        match (right, left) {
            (Ok(a), Ok(b)) => {
                r.check(
                    a.case == GldimCase::GeometricRightLeg && a.value > 2.0 && a.value < 3.0,
                    || format!("right leg value {a}"),
                );
                r.check((a.value - b.value).abs() < 1e-12, || {
                    format!("dual symmetry broken: {} vs {}", a.value, b.value)
                });
            }
            _ => r.check(false, || "leg point rejected".into()),
        }
    }
}

fn walls_suite(r: &mut SuiteReport, rng: &mut ChaCha8Rng) {
    let mut done = 0;
    while done < 60 {
        let (ps, pq) = random_interior_point(rng);
        let (qs, qq) = random_interior_point(rng);
        let v = random_lattice(rng);
        let p = GeometricSC::unchecked(ps, pq);
        let q = GeometricSC::unchecked(qs, qq);
        let Ok((lo, hi)) = bayer_bracket(&p, &q, &v) else {
            continue;
        };
        let Ok((c, d)) = chord(&p, &v) else { continue };
        if !c.s.same_field(&d.s) {
            continue;
        }
        done += 1;
        for k in 1..6 {
            let t = rat(k, 6);
            let x = PlanePoint::new(
                &(&c.s * &(int(1) - &t)) + &(&d.s * &t),
                &(&c.q * &(int(1) - &t)) + &(&d.q * &t),
            );
            let phi = chord_phase(&q, &c, &x);
            r.check(lo - 1e-12 <= phi && phi <= hi + 1e-12, || {
                format!("chord phase {phi} outside [{lo}, {hi}]")
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for report in run("all").unwrap() {
            assert!(report.passed(), "{report}: {:?}", report.failures);
            assert!(report.checks > 0);
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run("nope").is_err());
    }
}
