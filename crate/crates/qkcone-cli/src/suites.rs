//! Verification suites. Each suite sweeps a fixed family of cases built from
//! the target and reports every failing case.

use serde::Serialize;

use qkcone::equivariant::{nonequivariant_limit, recursion_check, recursion_transfer_check, GkmEdge, GkmGraph};
use qkcone::json::Target;
use qkcone::kring::{BundleSpec, KClass, KRing};
use qkcone::loopspace::{reduce_coefficients, LoopElement, LoopSpaceProfile, ReductionMap, Side};
use qkcone::qrational::{classify, polarize, symplectic_pair, taylor_embed, Membership};
use qkcone::twists::{
    euler_twist, level_identity_check, level_twist, pfd_multiplier_closed, pfd_multiplier_series, qsd_extra_factor,
    qsd_transform, rab_twist, with_ring_characters, PfdSpec, QsdForm,
};
use qkcone::{Error, Result, Scalar, Sym};

use crate::seeds;

pub const SUITES: &[&str] =
    &["split", "omega", "pfd", "level-identity", "qsd-forms", "pipeline-4-10", "recursion", "transfer", "limits"];

const MAX_LISTED: usize = 25;

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub case: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub cases: usize,
    pub failed: usize,
    pub counterexamples: Vec<Counterexample>,
    pub warnings: Vec<String>,
}

pub struct SuiteContext<'a> {
    pub target: &'a Target,
    pub input: Option<&'a LoopElement>,
    pub dmax: u32,
    pub series_order: Option<u32>,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failed: usize,
    counterexamples: Vec<Counterexample>,
    warnings: Vec<String>,
}

impl Tally {
    fn record(&mut self, case: impl FnOnce() -> String, outcome: Result<Option<String>>) {
        self.cases += 1;
        let detail = match outcome {
            Ok(None) => return,
            Ok(Some(d)) => d,
            Err(e) => format!("error: {}", e),
        };
        self.failed += 1;
        if self.counterexamples.len() < MAX_LISTED {
            self.counterexamples.push(Counterexample { case: case(), detail });
        }
    }

    fn check(&mut self, case: impl FnOnce() -> String, outcome: Result<bool>, detail: &str) {
        self.record(case, outcome.map(|ok| (!ok).then(|| detail.to_string())));
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            pass: self.failed == 0,
            cases: self.cases,
            failed: self.failed,
            counterexamples: self.counterexamples,
            warnings: self.warnings,
        }
    }
}

fn unit(n: usize, i: usize, k: i32) -> Vec<i32> {
    (0..n).map(|j| if j == i { k } else { 0 }).collect()
}

fn spec_label(s: &BundleSpec) -> String {
    let parts: Vec<String> = s.summands.iter().map(|x| format!("{:+}*P^{:?}", x.sign, x.exps)).collect();
    format!("E^v = {} (l = {})", parts.join(" "), s.level)
}

fn need_graph(ctx: &SuiteContext) -> Result<GkmGraph> {
    ctx.target.graph.clone().ok_or_else(|| Error::Config("suite needs a gkm-projective target".into()))
}

/// The suite input: the supplied element, else the hypergeometric seed.
fn element(ctx: &SuiteContext, t: &mut Tally) -> Result<LoopElement> {
    match ctx.input {
        Some(j) => Ok(j.clone()),
        None => {
            t.warnings.push("no input given; using the hypergeometric seed".into());
            seeds::seed("hypergeometric", ctx.target, ctx.dmax)
        }
    }
}

pub fn run_suite(name: &str, ctx: &SuiteContext) -> Result<SuiteReport> {
    let mut t = Tally::default();
    match name {
        "split" => split(ctx, &mut t),
        "omega" => omega(ctx, &mut t),
        "pfd" => pfd(ctx, &mut t),
        "level-identity" => level_identity(ctx, &mut t),
        "qsd-forms" => qsd_forms(ctx, &mut t)?,
        "pipeline-4-10" => pipeline(ctx, &mut t)?,
        "recursion" => recursion(ctx, &mut t)?,
        "transfer" => transfer(ctx, &mut t)?,
        "limits" => limits(ctx, &mut t)?,
        other => return Err(Error::Config(format!("unknown suite {:?}; expected one of {}", other, SUITES.join(", ")))),
    }
    if t.cases == 0 {
        t.warnings.push("0 cases checked".into());
    }
    Ok(t.finish(name))
}

fn split_profile(ctx: &SuiteContext) -> LoopSpaceProfile {
    with_ring_characters(LoopSpaceProfile::mu_adic(), &ctx.target.ring)
}

fn split(ctx: &SuiteContext, t: &mut Tally) {
    let Some(j) = ctx.input else { return };
    let prof = split_profile(ctx);
    for (d, f) in &j.entries {
        t.record(
            || format!("degree {:?}", d),
            (|| {
                let s = polarize(f, &prof)?;
                if s.plus.add(&s.minus)? != *f {
                    return Ok(Some("plus + minus differs from the entry".into()));
                }
                if !s.plus.is_zero() && classify(&s.plus, &prof).membership != Membership::PlusMember {
                    return Ok(Some(format!("plus part {} is not in K_+", s.plus)));
                }
                if !s.minus.is_zero() && classify(&s.minus, &prof).membership != Membership::MinusMember {
                    return Ok(Some(format!("minus part {} is not in K_-", s.minus)));
                }
                let again = polarize(&s.plus, &prof)?;
                Ok((!again.minus.is_zero()).then(|| "splitting is not idempotent".into()))
            })(),
        );
    }
}

fn omega(ctx: &SuiteContext, t: &mut Tally) {
    let Some(j) = ctx.input else { return };
    let prof = split_profile(ctx);
    let tw = KClass::one(&ctx.target.ring);
    let splits: Vec<_> = j.entries.iter().map(|(d, f)| (d.clone(), polarize(f, &prof))).collect();
    for (a, (da, sa)) in splits.iter().enumerate() {
        for (db, sb) in &splits[a..] {
            t.record(
                || format!("degrees {:?}, {:?}", da, db),
                (|| {
                    let (sa, sb) = (sa.clone()?, sb.clone()?);
                    let pp = symplectic_pair(&sa.plus, &sb.plus, &tw, &prof)?;
                    let mm = symplectic_pair(&sa.minus, &sb.minus, &tw, &prof)?;
                    Ok(match (pp.is_zero(), mm.is_zero()) {
                        (true, true) => None,
                        (false, _) => Some(format!("omega on plus parts = {}", pp)),
                        (_, false) => Some(format!("omega on minus parts = {}", mm)),
                    })
                })(),
            );
        }
    }
}

fn pfd(ctx: &SuiteContext, t: &mut Tally) {
    let ring = &ctx.target.ring;
    let n = ring.n_generators();
    let order = ctx.series_order.unwrap_or(4);
    for i in 0..n {
        for summands in [vec![(1, unit(n, i, 1))], vec![(1, unit(n, i, 2))], vec![(1, unit(n, i, 1)), (1, unit(n, i, 2))]] {
            let spec = BundleSpec::new(summands, 0);
            let p = PfdSpec::euler(&spec);
            for d in LoopElement::all_degrees(n, ctx.dmax) {
                t.check(
                    || format!("{} d = {:?} order {}", spec_label(&spec), d, order),
                    (|| {
                        let series = pfd_multiplier_series(ring, &p, &d, &[Sym::MU], order)?;
                        let closed = taylor_embed(&pfd_multiplier_closed(ring, &p, &d)?, &[Sym::MU], order)?;
                        Ok(series == closed)
                    })(),
                    "series and closed forms differ",
                );
            }
        }
    }
}

fn level_families(n: usize) -> Vec<Vec<(i32, Vec<i32>)>> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(vec![(1, unit(n, i, 1))]);
        out.push(vec![(-1, unit(n, i, 1))]);
        out.push(vec![(1, unit(n, i, -1))]);
        out.push(vec![(1, unit(n, i, 1)), (-1, unit(n, i, 2))]);
    }
    out
}

fn level_identity(ctx: &SuiteContext, t: &mut Tally) {
    let ring = &ctx.target.ring;
    let n = ring.n_generators();
    for summands in level_families(n) {
        for l in 0..=3 {
            let spec = BundleSpec::new(summands.clone(), l);
            for d in LoopElement::all_degrees(n, ctx.dmax) {
                t.check(
                    || format!("{} d = {:?}", spec_label(&spec), d),
                    level_identity_check(ring, &spec, &d).map(|r| r.pass()),
                    "level multiplier differs from the telescoped product",
                );
            }
        }
    }
}

fn compare_elements(t: &mut Tally, label: &str, a: &LoopElement, b: &LoopElement, what: &str) {
    let degrees: std::collections::BTreeSet<_> = a.entries.keys().chain(b.entries.keys()).cloned().collect();
    for d in degrees {
        let same = a.get(&d) == b.get(&d);
        t.check(|| format!("{} d = {:?}", label, d), Ok(same), what);
    }
}

fn qsd_forms(ctx: &SuiteContext, t: &mut Tally) -> Result<()> {
    let j = element(ctx, t)?;
    let ring = &ctx.target.ring;
    let n = ring.n_generators();
    for i in 0..n {
        for summands in [vec![(1, unit(n, i, 1))], vec![(1, unit(n, i, 1)), (1, unit(n, i, 1))]] {
            for l in 0..=2 {
                let spec = BundleSpec::new(summands.clone(), l);
                let label = spec_label(&spec);
                let (a, b) = match (qsd_transform(&j, &spec, QsdForm::Mu), qsd_transform(&j, &spec, QsdForm::MuInv)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(e), _) | (_, Err(e)) => {
                        t.record(|| label.clone(), Err(e));
                        continue;
                    }
                };
                compare_elements(t, &format!("{} mu vs muinv", label), &a, &b, "forms mu and muinv differ");
                for (two, base) in [(QsdForm::TwoA, &a), (QsdForm::TwoB, &b)] {
                    let x = qsd_transform(&j, &spec, two);
                    for d in j.entries.keys() {
                        t.check(
                            || format!("{} form {} d = {:?}", label, two.name(), d),
                            (|| Ok(x.clone()?.get(d) == base.get(d).mul(&qsd_extra_factor(ring, &spec, d, two)?)?))(),
                            "form differs from its base form by more than the stated factor",
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn pipeline(ctx: &SuiteContext, t: &mut Tally) -> Result<()> {
    let j = element(ctx, t)?;
    let n = ctx.target.n_vars();
    for i in 0..n {
        for summands in [vec![(1, unit(n, i, 1))], vec![(-1, unit(n, i, 1))]] {
            for l in 0..=2 {
                let spec = BundleSpec::new(summands.clone(), l);
                let label = spec_label(&spec);
                let got = (|| {
                    let r = rab_twist(&j, &spec)?;
                    let r = reduce_coefficients(&r, &ReductionMap::ab_to_mu())?;
                    reduce_coefficients(&r, &ReductionMap::mu_to_one())
                })();
                match (got, level_twist(&j, &spec, false)) {
                    (Ok(a), Ok(b)) => compare_elements(t, &label, &a, &b, "reduced R(a,b) twist differs from the level twist"),
                    (Err(e), _) | (_, Err(e)) => t.record(|| label.clone(), Err(e)),
                }
            }
        }
    }
    Ok(())
}

/// f_α at degree 1 is Σ_{edges α→β} C (1 − λ)/(1 − qλ⁻¹) with λ the edge character;
/// degree 0 is 1 − q everywhere.
fn recursion_probe(g: &GkmGraph, c: &Scalar) -> Result<LoopElement> {
    let ring = &g.ring;
    let one = Scalar::one();
    let q = Scalar::q();
    let mut j = LoopElement::new(ring, 1, 1);
    j.insert(vec![0], KClass::constant(ring, one.sub(&q)))?;
    let mut coords = vec![Scalar::zero(); g.n_points()];
    for e in &g.edges {
        let lam = Scalar::mono(qkcone::Cyclo::one(), e.character.clone());
        let term = c.mul(&one.sub(&lam)).div(&one.sub(&q.mul(&lam.inv()?)))?;
        coords[e.from] = coords[e.from].add(&term);
    }
    j.insert(vec![1], KClass::new(ring, coords)?)?;
    Ok(j)
}

fn recursion(ctx: &SuiteContext, t: &mut Tally) -> Result<()> {
    let g = need_graph(ctx)?;
    let problems = g.consistency_problems();
    t.check(|| "graph consistency".into(), Ok(problems.is_empty()), &problems.join("; "));
    let c = Scalar::int(3);
    let coeff = |_: usize, _: usize, _: u32, _: &GkmEdge| Ok(Scalar::int(3));
    let m_max = 3;
    t.record(
        || "calibration element with C = 3".into(),
        recursion_check(&recursion_probe(&g, &c)?, &g, &coeff, m_max)
            .map(|r| r.failures().first().map(|f| format!("{} at {}: {}", f.m, f.point, f.detail))),
    );
    for delta in [Scalar::frac(1, 2), Scalar::int(-1)] {
        let j = recursion_probe(&g, &c.add(&delta))?;
        t.check(
            || format!("perturbed coefficient C = 3 + {}", delta),
            recursion_check(&j, &g, &coeff, m_max).map(|r| !r.pass()),
            "perturbed element passes the recursion check",
        );
    }
    let mut j = recursion_probe(&g, &c)?;
    let bad = Scalar::one().sub(&Scalar::q().mul(&Scalar::var(qkcone::equivariant::character(0)))).inv()?;
    let mut coords = j.get(&[1]).coords().to_vec();
    coords[0] = coords[0].add(&bad);
    j.insert(vec![1], KClass::new(&g.ring, coords)?)?;
    t.check(
        || "pole at a non-tangent character".into(),
        recursion_check(&j, &g, &coeff, m_max).map(|r| !r.pass()),
        "non-tangent pole passes the recursion check",
    );
    Ok(())
}

fn transfer(ctx: &SuiteContext, t: &mut Tally) -> Result<()> {
    let g = need_graph(ctx)?;
    for summands in [vec![(1, vec![1])], vec![(1, vec![1]), (1, vec![1])], vec![(1, vec![2]), (-1, vec![1])]] {
        for l in 0..=2 {
            let spec = BundleSpec::new(summands.clone(), l);
            for form in [QsdForm::Mu, QsdForm::MuInv, QsdForm::TwoA, QsdForm::TwoB] {
                match recursion_transfer_check(&spec, &g, form, 3, ctx.dmax) {
                    Ok(rep) => {
                        for e in rep.entries {
                            t.check(
                                || format!("{} form {} edge {} m = {} d = {:?}", spec_label(&spec), form.name(), e.edge, e.m, e.degree),
                                Ok(e.ok),
                                &format!("{} != {}", e.lhs, e.rhs),
                            );
                        }
                    }
                    Err(err) => t.record(|| format!("{} form {}", spec_label(&spec), form.name()), Err(err)),
                }
            }
        }
    }
    Ok(())
}

fn limits(ctx: &SuiteContext, t: &mut Tally) -> Result<()> {
    let g = need_graph(ctx)?;
    let plain = KRing::projective(g.n_points() - 1);
    let std = LoopSpaceProfile::standard();
    let lam = Scalar::var(qkcone::equivariant::character(1)).div(&Scalar::var(qkcone::equivariant::character(0)))?;
    let single = |f: Scalar| -> Result<LoopElement> {
        let mut j = LoopElement::new(&g.ring, 1, 1);
        j.insert(vec![1], KClass::constant(&g.ring, f))?;
        Ok(j)
    };
    let leak = single(Scalar::one().sub(&lam.mul(&Scalar::q().pow(2)?)).inv()?)?;
    t.check(
        || "1/(1 - lambda q^2) on the plus side".into(),
        Ok(matches!(nonequivariant_limit(&leak, &plain, &std, Side::Plus), Err(Error::PlusMinusLeak(_)))),
        "accepted",
    );
    let sing = single(
        Scalar::var(qkcone::equivariant::character(0)).sub(&Scalar::var(qkcone::equivariant::character(1))).inv()?,
    )?;
    t.check(
        || "1/(t0 - t1)".into(),
        Ok(matches!(nonequivariant_limit(&sing, &plain, &std, Side::Full), Err(Error::LimitSingular(_)))),
        "accepted",
    );
    let prof = LoopSpaceProfile::mu_field();
    let p = KClass::generator(&g.ring, 0);
    for a in 0..3i64 {
        for b in 1..=2i64 {
            for s in [1, -1] {
                let spec = BundleSpec::new(vec![(s, vec![b as i32])], 0);
                let mut j = LoopElement::new(&g.ring, 1, ctx.dmax);
                for d in 0..=ctx.dmax as i64 {
                    let c = Scalar::q().pow(a - d)?.div(&Scalar::one().sub(&Scalar::q().pow(b + d)?))?;
                    j.insert(vec![d], p.pow(d + a)?.scale(&c).add(&KClass::constant(&g.ring, Scalar::int(d + 1)))?)?;
                }
                t.check(
                    || format!("limit vs euler twist, a = {}, b = {}, sign = {}", a, b, s),
                    (|| {
                        let x = nonequivariant_limit(&euler_twist(&j, &spec)?, &plain, &prof, Side::Full)?;
                        let y = euler_twist(&nonequivariant_limit(&j, &plain, &prof, Side::Full)?, &spec)?;
                        Ok(x == y)
                    })(),
                    "limit does not commute with the Euler twist",
                );
            }
        }
    }
    Ok(())
}
