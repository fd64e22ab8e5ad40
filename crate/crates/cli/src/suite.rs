use std::time::Instant;

use anyhow::{bail, Result};
use qseries_core::builders::SeriesBank;
use qseries_core::character::{
    appendix_c_helpers, ch_instances, check_ch, check_chain, check_char_b, check_fg1, check_fg2,
    series_vs_char, weyl_denominator, ChVariant, Chain, CharError, CharVerdict, Mode,
};
use qseries_core::determinant::{casorati, delta_closed_form, delta_series, newrep_det};
use qseries_core::identities::{
    c2_remark, conj_b, conj_spin, increasing_tuples, plucker, sample, spin_tuples, verdict,
    wronskian, Engine, IdentityError, Verdict,
};
use qseries_core::root_data::format_tuple;
use qseries_core::{AlgebraContext, AlgebraType, BoxIndex, GradedSeries};

use crate::report::{Record, Status};

const SPIN_NOTE: &str = "rests on the node-swapped spin series";
const CHAR_NOTE: &str = "conditional on the spin character product formula";

/// What one report line checks.
#[derive(Clone, Debug)]
enum Job {
    Wronskian,
    Delta(usize),
    Newrep(Vec<BoxIndex>),
    Plucker(Vec<BoxIndex>, Vec<BoxIndex>),
    ConjB(Vec<BoxIndex>, Vec<BoxIndex>),
    Spin {
        variant: u8,
        j: Vec<BoxIndex>,
        varsigma: u8,
    },
    Remark(u8),
    CharB(Vec<BoxIndex>, Vec<BoxIndex>),
    Helpers,
    Fg1(usize),
    Fg2(usize, i8),
    Ch(ChVariant, Vec<usize>, Vec<usize>, Option<u8>),
    Chain(Chain, Vec<usize>, Vec<usize>, Option<u8>),
    Weyl(i8),
    Bridge(Vec<BoxIndex>),
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub parameters: String,
    job: Job,
}

pub struct Selection {
    pub ctx: AlgebraContext,
    pub identity: String,
    pub degree: u32,
    pub mode: Mode,
    /// `None` runs every pair.
    pub sample: Option<usize>,
    pub seed: u64,
}

fn ids_for(ty: AlgebraType) -> &'static [&'static str] {
    match ty {
        AlgebraType::A => &["wronskian", "delta", "newrep", "plucker", "char-bridge"],
        AlgebraType::B => &[
            "plucker",
            "bn-conj",
            "char-b",
            "char-b-helpers",
            "char-bridge",
        ],
        AlgebraType::C => &[
            "plucker",
            "cn-conj-1",
            "cn-conj-2",
            "cn-conj-3",
            "cn-conj-4",
            "cn-remark-1",
            "cn-remark-2",
            "ch-c1",
            "ch-c2",
            "ch-c3",
            "ch-c4",
            "chain-c3-c1",
            "chain-c4-c2",
            "chain-c3-c4",
            "fg1",
            "weyl",
            "char-bridge",
        ],
        AlgebraType::D => &[
            "plucker",
            "dn-conj-1",
            "dn-conj-2",
            "ch-d1",
            "ch-d2",
            "chain-d2-d1",
            "fg2",
            "weyl",
            "char-bridge",
        ],
    }
}

/// Identity ids selected by `name`: an id, a family prefix such as
/// `cn-conj`, `ch` or `chain`, or `all`.
pub fn expand_selector(ty: AlgebraType, name: &str) -> Result<Vec<&'static str>> {
    let known = ids_for(ty);
    let picked: Vec<&'static str> = known
        .iter()
        .copied()
        .filter(|id| {
            name == "all"
                || *id == name
                || id
                    .strip_prefix(name)
                    .is_some_and(|rest| rest.starts_with('-'))
        })
        .collect();
    if picked.is_empty() {
        bail!(
            "identity {name:?} is not defined for type {ty}; known: {}",
            known.join(", ")
        );
    }
    Ok(picked)
}

fn pairs(ts: &[Vec<BoxIndex>]) -> Vec<(Vec<BoxIndex>, Vec<BoxIndex>)> {
    ts.iter()
        .flat_map(|a| ts.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

fn tuple_pair(j1: &[BoxIndex], j2: &[BoxIndex]) -> String {
    format!("J1={} J2={}", format_tuple(j1), format_tuple(j2))
}

fn set_string(s: &[usize]) -> String {
    let inner: Vec<String> = s.iter().map(|k| k.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn ch_params(n: usize, s: &[usize], e: &[usize], p: Option<u8>) -> String {
    let mut out = format!("n={n} sigma={} eta={}", set_string(s), set_string(e));
    if let Some(p) = p {
        out.push_str(&format!(" parity={p}"));
    }
    out
}

fn variant_of(id: &str) -> ChVariant {
    *ChVariant::ALL
        .iter()
        .find(|v| v.id() == id)
        .expect("listed variant")
}

fn chain_of(id: &str) -> Chain {
    *Chain::ALL
        .iter()
        .find(|c| c.id() == id)
        .expect("listed chain")
}

fn instances_for(sel: &Selection, id: &'static str) -> Result<Vec<Instance>> {
    let ctx = &sel.ctx;
    let n = ctx.rank;
    let mk = |parameters: String, job: Job| Instance {
        id: id.to_string(),
        parameters,
        job,
    };
    let pick = |all: Vec<(Vec<BoxIndex>, Vec<BoxIndex>)>| match sel.sample {
        Some(k) => sample(&all, k, sel.seed),
        None => all,
    };
    let out = match id {
        "wronskian" => vec![mk(format!("n={n}"), Job::Wronskian)],
        "delta" => (1..=n + 1)
            .map(|i| mk(format!("i={i}"), Job::Delta(i)))
            .collect(),
        "newrep" => (1..=n + 1)
            .flat_map(|a| increasing_tuples(ctx, a))
            .map(|j| mk(format!("J={}", format_tuple(&j)), Job::Newrep(j)))
            .collect(),
        "plucker" => {
            let amax = if ctx.ty == AlgebraType::D { n - 2 } else { n };
            let all: Vec<_> = (1..=amax)
                .flat_map(|a| pairs(&increasing_tuples(ctx, a)))
                .collect();
            pick(all)
                .into_iter()
                .map(|(a, b)| mk(tuple_pair(&a, &b), Job::Plucker(a, b)))
                .collect()
        }
        "bn-conj" | "char-b" => pick(pairs(&increasing_tuples(ctx, n)))
            .into_iter()
            .map(|(a, b)| {
                let p = tuple_pair(&a, &b);
                mk(
                    p,
                    if id == "bn-conj" {
                        Job::ConjB(a, b)
                    } else {
                        Job::CharB(a, b)
                    },
                )
            })
            .collect(),
        "char-b-helpers" => vec![mk(format!("n={n}"), Job::Helpers)],
        "cn-conj-1" | "cn-conj-2" | "cn-conj-3" | "cn-conj-4" | "dn-conj-1" | "dn-conj-2" => {
            let variant = id.as_bytes()[id.len() - 1] - b'0';
            let varsigmas: &[u8] = if id == "dn-conj-1" { &[0, 1] } else { &[0] };
            let tuples = spin_tuples(ctx, variant)?;
            let mut v = Vec::new();
            for &varsigma in varsigmas {
                for j in &tuples {
                    let mut p = format!("J={}", format_tuple(j));
                    if ctx.ty == AlgebraType::D && variant == 1 {
                        p.push_str(&format!(" varsigma={varsigma}"));
                    }
                    v.push(mk(
                        p,
                        Job::Spin {
                            variant,
                            j: j.clone(),
                            varsigma,
                        },
                    ));
                }
            }
            v
        }
        "cn-remark-1" | "cn-remark-2" => {
            if n != 2 {
                bail!("{id} is a rank-two identity");
            }
            let which = if id.ends_with('1') { 1 } else { 2 };
            vec![mk(String::new(), Job::Remark(which))]
        }
        "ch-c1" | "ch-c2" | "ch-c3" | "ch-c4" | "ch-d1" | "ch-d2" => {
            let variant = variant_of(id);
            ch_instances(variant, n)
                .into_iter()
                .map(|(s, e, p)| mk(ch_params(n, &s, &e, p), Job::Ch(variant, s, e, p)))
                .collect()
        }
        "chain-c3-c1" | "chain-c4-c2" | "chain-c3-c4" | "chain-d2-d1" => {
            let chain = chain_of(id);
            ch_instances(chain.endpoints().0, n)
                .into_iter()
                .filter(|(s, _, _)| !s.is_empty())
                .map(|(s, e, p)| mk(ch_params(n, &s, &e, p), Job::Chain(chain, s, e, p)))
                .collect()
        }
        "fg1" => (0..=n)
            .filter(|m| (n - m).is_multiple_of(2))
            .map(|m| mk(format!("m={m} n={n}"), Job::Fg1(m)))
            .collect(),
        "fg2" => (0..n)
            .flat_map(|m| [1i8, -1].map(|eps| (m, eps)))
            .map(|(m, eps)| mk(format!("m={m} n={n} eps={eps}"), Job::Fg2(m, eps)))
            .collect(),
        "weyl" => {
            let signs: &[i8] = if ctx.ty == AlgebraType::D {
                &[1, -1]
            } else {
                &[1]
            };
            signs
                .iter()
                .map(|&eps| mk(format!("n={n} eps={eps}"), Job::Weyl(eps)))
                .collect()
        }
        "char-bridge" => (1..=n.min(2))
            .flat_map(|a| increasing_tuples(ctx, a))
            .map(|j| mk(format!("J={}", format_tuple(&j)), Job::Bridge(j)))
            .collect(),
        other => bail!("identity {other:?} has no instance enumeration"),
    };
    Ok(out)
}

/// All instances selected, in report order.
pub fn enumerate(sel: &Selection) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for id in expand_selector(sel.ctx.ty, &sel.identity)? {
        if id.starts_with("cn-remark") && sel.ctx.rank != 2 && sel.identity != id {
            continue;
        }
        out.extend(instances_for(sel, id)?);
    }
    Ok(out)
}

/// A check that finished, was skipped, or could not be evaluated.
enum Outcome {
    Series(Verdict),
    Char(CharVerdict),
    Skipped(String),
    Error(String),
}

fn from_identity(r: Result<Verdict, IdentityError>) -> Outcome {
    match r {
        Ok(v) => Outcome::Series(v),
        Err(IdentityError::NoProvider(ctx)) => {
            Outcome::Skipped(format!("no R-series provider for {ctx}"))
        }
        Err(e) => Outcome::Error(e.to_string()),
    }
}

fn from_char(r: Result<CharVerdict, CharError>) -> Outcome {
    match r {
        Ok(v) => Outcome::Char(v),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

/// Folds several character verdicts into the first unequal one.
fn first_unequal(vs: Vec<CharVerdict>) -> CharVerdict {
    let fallback = vs[0].clone();
    vs.into_iter().find(|v| !v.equal).unwrap_or(fallback)
}

fn series_job(
    sel: &Selection,
    inst: &Instance,
    conditional: bool,
    residual: impl FnOnce() -> Result<GradedSeries, IdentityError>,
) -> Outcome {
    from_identity(residual().map(|r| {
        verdict(
            &inst.id,
            &sel.ctx,
            inst.parameters.clone(),
            sel.degree,
            &r,
            conditional,
        )
    }))
}

fn run_job(sel: &Selection, engine: &Engine, inst: &Instance) -> Outcome {
    let ctx = &sel.ctx;
    let d = sel.degree;
    let n = ctx.rank;
    let bank = engine.bank();
    match &inst.job {
        Job::Wronskian => series_job(sel, inst, false, || wronskian(engine, n, d)),
        Job::Delta(i) => series_job(sel, inst, false, || {
            let ds = delta_series(ctx, *i, n, d)?;
            let mut acc = GradedSeries::zero(*ctx, &ctx.x_one(), d);
            for (a, s) in ds.into_iter().enumerate() {
                acc = acc.add(&s.sub(&delta_closed_form(ctx, *i, a, d)?));
            }
            Ok(acc)
        }),
        Job::Newrep(j) => series_job(sel, inst, false, || {
            Ok(casorati(ctx, j, d, 0, bank)?.sub(&newrep_det(ctx, j, d)?))
        }),
        Job::Plucker(a, b) => series_job(sel, inst, false, || plucker(engine, ctx, a, b, d, false)),
        Job::ConjB(a, b) => series_job(sel, inst, false, || conj_b(engine, ctx, a, b, d)),
        Job::Spin {
            variant,
            j,
            varsigma,
        } => series_job(sel, inst, true, || {
            conj_spin(engine, ctx, *variant, j, *varsigma, d)
        }),
        Job::Remark(which) => series_job(sel, inst, true, || c2_remark(engine, *which, d)),
        Job::CharB(a, b) => from_char(check_char_b(ctx, a, b, sel.mode)),
        Job::Helpers => from_char(appendix_c_helpers(ctx, sel.mode).map(first_unequal)),
        Job::Fg1(m) => from_char(check_fg1(*m, n, sel.mode)),
        Job::Fg2(m, eps) => from_char(check_fg2(*m, n, *eps, sel.mode)),
        Job::Ch(v, s, e, p) => from_char(check_ch(*v, n, s, e, *p, sel.mode)),
        Job::Chain(c, s, e, p) => from_char(check_chain(*c, n, s, e, *p, sel.mode)),
        Job::Weyl(eps) => from_char(weyl_denominator(ctx.ty, n, *eps, sel.mode)),
        Job::Bridge(j) => from_char(series_vs_char(&SeriesBank::new(), ctx, j, d)),
    }
}

pub fn run(sel: &Selection, engine: &Engine, inst: &Instance) -> Record {
    let t0 = Instant::now();
    let outcome = run_job(sel, engine, inst);
    let wall_time_ms = t0.elapsed().as_millis() as u64;
    let exact_label = Mode::Exact.label();
    let mut rec = Record {
        identity_id: inst.id.clone(),
        algebra: sel.ctx.to_string(),
        parameters: inst.parameters.clone(),
        mode: exact_label,
        degree_checked: None,
        status: Status::Skipped,
        witness: None,
        note: None,
        wall_time_ms,
    };
    match outcome {
        Outcome::Series(v) => {
            rec.degree_checked = Some(v.degree);
            rec.status = match (v.holds, v.conditional) {
                (false, _) => Status::Fail,
                (true, true) => Status::ConditionalPass,
                (true, false) => Status::Pass,
            };
            if v.conditional {
                rec.note = Some(SPIN_NOTE.into());
            }
            if !v.holds {
                rec.witness = Some(match &v.witness {
                    Some(w) => format!("{} * {} at height {}", w.coefficient, w.monomial, w.height),
                    None => format!("residual certified only to height {}", v.certified),
                });
            }
        }
        Outcome::Char(v) => {
            rec.mode = v.mode;
            rec.status = match (v.equal, v.conditional) {
                (false, _) => Status::Fail,
                (true, true) => Status::ConditionalPass,
                (true, false) => Status::Pass,
            };
            if v.conditional {
                rec.note = Some(CHAR_NOTE.into());
            }
            if !v.equal {
                rec.witness = Some(v.witness.unwrap_or_else(|| "sides differ".into()));
            }
        }
        Outcome::Skipped(reason) => rec.note = Some(reason),
        Outcome::Error(e) => {
            rec.status = Status::Fail;
            rec.witness = Some(format!("error: {e}"));
        }
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(ctx: AlgebraContext, identity: &str) -> Selection {
        Selection {
            ctx,
            identity: identity.into(),
            degree: 2,
            mode: Mode::Exact,
            sample: None,
            seed: 1,
        }
    }

    #[test]
    fn family_prefixes_expand() {
        assert_eq!(expand_selector(AlgebraType::C, "cn-conj").unwrap().len(), 4);
        assert_eq!(
            expand_selector(AlgebraType::D, "ch").unwrap(),
            vec!["ch-d1", "ch-d2"]
        );
        assert_eq!(
            expand_selector(AlgebraType::B, "char-b").unwrap(),
            vec!["char-b", "char-b-helpers"]
        );
        assert!(expand_selector(AlgebraType::A, "bn-conj").is_err());
    }

    #[test]
    fn pair_counts() {
        let all = enumerate(&sel(AlgebraContext::b(2), "bn-conj")).unwrap();
        assert_eq!(all.len(), 36);
        let mut s = sel(AlgebraContext::b(2), "bn-conj");
        s.sample = Some(5);
        assert_eq!(enumerate(&s).unwrap().len(), 5);
    }

    #[test]
    fn missing_provider_is_skipped() {
        let s = sel(AlgebraContext::c(3), "cn-conj-3");
        let e = Engine::new();
        let inst = enumerate(&s).unwrap();
        let rec = run(&s, &e, &inst[0]);
        assert_eq!(rec.status, Status::Skipped);
        assert_eq!(rec.note.as_deref(), Some("no R-series provider for C3"));
    }

    #[test]
    fn failures_carry_witnesses() {
        let s = sel(AlgebraContext::a(2), "wronskian");
        let e = Engine::new();
        let inst = Instance {
            id: "plucker".into(),
            parameters: "mutated".into(),
            job: Job::Plucker(
                qseries_core::root_data::parse_tuple("1,2").unwrap(),
                qseries_core::root_data::parse_tuple("1,3").unwrap(),
            ),
        };
        assert_eq!(run(&s, &e, &inst).status, Status::Pass);
        // m and n of different parity
        let bad = run(
            &s,
            &e,
            &Instance {
                job: Job::Fg1(1),
                ..inst
            },
        );
        assert_eq!(bad.status, Status::Fail);
        assert!(bad.witness.unwrap().starts_with("error:"));
    }
}
