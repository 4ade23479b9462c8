use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use twistlab_core::ci::{self, DegreeVector};
use twistlab_core::local_model::verify::{verify_flow, verify_fragility, verify_twist, VerificationReport};
use twistlab_core::local_model::TwistProfile;
use twistlab_core::monodromy::{self, find_cycle_configuration, Direction, Mode, VanishingTuple};
use twistlab_core::quantum::{general_type_obstruction, Alpha2, DelPezzoQH};
use twistlab_core::weyl::{reflection_orbit, weyl_closure};
use twistlab_core::{BlowupLattice, ClassSet, Error, HomologyClass, Result};

use crate::config::RunConfig;
use crate::output::Report;
use crate::{CiCommand, Command, HurwitzCommand, LocalCommand, QhCommand};

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn parse_class(s: &str) -> Result<HomologyClass> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad coordinate {t:?} in {s:?}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(HomologyClass::new)
}

fn class_set_report(set: &ClassSet) -> Report {
    let k = set.lattice().k();
    let mut header = vec!["L".to_string()];
    header.extend((1..=k).map(|i| format!("E{i}")));
    let csv = format!("{}\n{}", header.join(","), set.to_csv());
    Report::new(set.to_json(), true).with_csv(csv)
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        Command::Exceptional(a) => Ok(class_set_report(&BlowupLattice::new(a.k)?.enumerate_exceptional())),
        Command::Roots(a) => Ok(class_set_report(&BlowupLattice::new(a.k)?.enumerate_roots())),
        Command::Weyl { k, cap } => weyl(*k, cap.unwrap_or(cfg.closure_cap)),
        Command::Qh(q) => qh(q),
        Command::Hurwitz(h) => hurwitz(h, cfg),
        Command::Pentagon { k, n } => pentagon(*k, *n),
        Command::Local(l) => local(l, cfg),
        Command::Ci(c) => ci_cmd(c),
    }
}

fn weyl(k: usize, cap: usize) -> Result<Report> {
    let lat = BlowupLattice::new(k)?;
    let gens = lat.simple_roots();
    let closure = weyl_closure(&lat, &gens, cap)?;
    let mut out = json!({
        "k": k,
        "generators": gens,
        "closure": closure,
    });
    if closure.size().is_none() && k >= 2 {
        let start = &lat.exceptional_divisor(1) - &lat.exceptional_divisor(2);
        let (orbit, _) = reflection_orbit(&lat, &gens, &start, cap)?;
        out["root_orbit"] = to_value(&orbit);
    }
    Ok(Report::new(out, true))
}

fn qh(cmd: &QhCommand) -> Result<Report> {
    match cmd {
        QhCommand::Star1 { k, x, y, raw } => {
            let qh = if *raw { DelPezzoQH::raw(*k)? } else { DelPezzoQH::new(*k)? };
            let (x, y) = (parse_class(x)?, parse_class(y)?);
            let product = qh.star1(&x, &y)?;
            Ok(Report::new(
                json!({
                    "k": k,
                    "valid_range": qh.is_valid(),
                    "x": x,
                    "y": y,
                    "product": product,
                }),
                true,
            ))
        }
        QhCommand::Proportionality { k, raw } => {
            let qh = if *raw { DelPezzoQH::raw(*k)? } else { DelPezzoQH::new(*k)? };
            match qh.kperp_proportionality() {
                Ok(c) => Ok(Report::new(json!({ "k": k, "proportional": true, "c_k": c }), true)),
                Err(Error::NotProportional { x, y, product }) => Ok(Report::new(
                    json!({
                        "k": k,
                        "proportional": false,
                        "witness": { "x": x, "y": y, "product": product },
                    }),
                    false,
                )),
                Err(e) => Err(e),
            }
        }
        QhCommand::Obstruct { k, l, w, alpha2 } => {
            let qh = DelPezzoQH::new(*k)?;
            let l = parse_class(l)?;
            let alpha2 = match alpha2.as_str() {
                "formal" => Alpha2::Formal,
                v => Alpha2::Value(
                    v.parse()
                        .map_err(|_| Error::Parse(format!("alpha2 must be 'formal' or an integer, got {v:?}")))?,
                ),
            };
            let report = match w {
                Some(w) => qh.frobenius_obstruction_with(&l, &parse_class(w)?, alpha2)?,
                None => qh.frobenius_obstruction(&l, alpha2)?,
            };
            let pass = report.module_identities.pass;
            Ok(Report::new(to_value(&report), pass))
        }
        QhCommand::GeneralType { b2 } => Ok(Report::new(to_value(&general_type_obstruction(*b2)?), true)),
    }
}

fn load_batch(mode: &str, file: &std::path::Path) -> Result<Vec<VanishingTuple>> {
    let mode: Mode = mode.parse()?;
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
    monodromy::parse_batch(&text, mode)
}

fn hurwitz(cmd: &HurwitzCommand, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        HurwitzCommand::Move { batch, index, dir } => {
            let dir = match dir.as_str() {
                "left" => Direction::Left,
                "right" => Direction::Right,
                other => return Err(Error::Parse(format!("direction must be left or right, got {other:?}"))),
            };
            let tuples = load_batch(&batch.mode, &batch.file)?;
            let mut rows = Vec::new();
            let mut lines = String::new();
            let mut pass = true;
            for t in &tuples {
                let moved = t.hurwitz_move(*index, dir)?;
                let same = moved.verify_relation(&t.total_monodromy()?)?;
                pass &= same;
                lines.push_str(&moved.to_batch_line());
                lines.push('\n');
                rows.push(json!({ "tuple": moved.to_json(), "homologically_consistent": same }));
            }
            Ok(Report::new(Value::Array(rows), pass).with_csv(lines))
        }
        HurwitzCommand::Orbit { batch, cap } => {
            let tuples = load_batch(&batch.mode, &batch.file)?;
            let cap = cap.unwrap_or(cfg.orbit_cap);
            let rows = tuples
                .iter()
                .map(|t| Ok(json!({ "tuple": t.to_batch_line(), "orbit": t.hurwitz_orbit(cap)? })))
                .collect::<Result<Vec<_>>>()?;
            Ok(Report::new(Value::Array(rows), true))
        }
        HurwitzCommand::Verify { batch, moves } => {
            let tuples = load_batch(&batch.mode, &batch.file)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut failures = Vec::new();
            for (n, t) in tuples.iter().enumerate() {
                if t.len() < 2 {
                    continue;
                }
                let target = t.total_monodromy()?;
                let mut cur = t.clone();
                for _ in 0..*moves {
                    let dir = if rng.gen_bool(0.5) { Direction::Left } else { Direction::Right };
                    cur = cur.hurwitz_move(rng.gen_range(0..t.len() - 1), dir)?;
                }
                if !cur.verify_relation(&target)? {
                    failures.push(n);
                }
            }
            let pass = failures.is_empty();
            Ok(Report::new(
                json!({
                    "tuples": tuples.len(),
                    "moves_per_tuple": moves,
                    "seed": cfg.seed,
                    "failures": failures,
                    "homologically_consistent": pass,
                }),
                pass,
            ))
        }
    }
}

fn pentagon(k: usize, n: usize) -> Result<Report> {
    let lat = BlowupLattice::new(k)?;
    match find_cycle_configuration(&lat, n) {
        Ok(roots) => Ok(Report::new(json!({ "k": k, "n": n, "found": true, "roots": roots }), true)),
        Err(Error::NotFound(reason)) => Ok(Report::new(
            json!({ "k": k, "n": n, "found": false, "reason": reason }),
            false,
        )),
        Err(e) => Err(e),
    }
}

fn verification_csv(rows: &[VerificationReport]) -> String {
    let mut s = String::from("check,samples,max_residual,tolerance,pass\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{:e},{:e},{}\n",
            r.check, r.samples, r.max_residual, r.tolerance, r.pass
        ));
    }
    s
}

fn local(cmd: &LocalCommand, cfg: &RunConfig) -> Result<Report> {
    let LocalCommand::Verify { check, s, samples, lambda, plateau } = cmd;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tol = &cfg.tolerances;
    let rows = match check.as_str() {
        "twist" => {
            let prof = TwistProfile::with_plateau(*lambda, plateau.unwrap_or(0.0))?;
            verify_twist(&prof, *samples, &mut rng, tol)?
        }
        "flow" => verify_flow(*s, *samples, &mut rng, tol)?,
        "fragility" => {
            let prof = TwistProfile::with_plateau(*lambda, plateau.unwrap_or(lambda / 5.0))?;
            verify_fragility(*s, &prof, *samples, &mut rng, tol)?
        }
        other => {
            return Err(Error::Parse(format!(
                "check must be twist, flow or fragility, got {other:?}"
            )))
        }
    };
    let pass = rows.iter().all(|r| r.pass);
    Ok(Report::new(to_value(&rows), pass).with_csv(verification_csv(&rows)))
}

fn ci_cmd(cmd: &CiCommand) -> Result<Report> {
    match cmd {
        CiCommand::Classify { degrees } => {
            let d = DegreeVector::parse(degrees)?;
            let v = ci::classify(&d)?;
            let csv = format!("{}\n{}\n", ci::CSV_HEADER, v.to_csv_row());
            Ok(Report::new(to_value(&v), true).with_csv(csv))
        }
        CiCommand::Sweep { max_product } => {
            let rows = ci::sweep(*max_product)?;
            Ok(Report::new(to_value(&rows), true).with_csv(ci::to_csv(&rows)))
        }
    }
}
