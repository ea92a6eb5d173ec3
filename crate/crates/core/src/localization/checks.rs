//! Checks of the localization pair and of the localized norm.

use crate::error::Result;
use crate::localization::{LocalizationSystem, UrAtlas};
use crate::par;
use crate::report::{CheckResult, Row};
use crate::tolerance::Tolerances;
use crate::weighted::checks::{ratio_stats, RatioStats, Setting};
use crate::weighted::norms::{hat_from_pointwise, pointwise_jets, Exponent};
use crate::weighted::Corpus;

/// `max |ℛ ℛ^c u − u|` over the corpus, together with the partition-of-unity
/// and cutoff identities of each atlas.
pub fn right_inverse(setting: &Setting, overlaps: &[f64], corpus: &Corpus, tol: &Tolerances) -> Result<CheckResult> {
    const ID: &str = "localization.right_inverse";
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut pou = 0.0f64;
    for level in 0..setting.levels.len() {
        let wm = setting.manifold(level)?;
        for &r in overlaps {
            let atlas = UrAtlas::cylinder(setting.levels[level].s_max, setting.cusp.base(), r)?;
            let loc = LocalizationSystem::new(&atlas, wm.grid())?;
            let defect = loc.partition_defect().max(loc.cutoff_defect());
            pou = pou.max(defect);
            rows.push(Row::new(ID, format!("{}/r={r}/partition", setting.label), defect).level(level));
            let errs: Vec<f64> = par::map_slice(corpus.functions(), |f| {
                let u = f.sample(&wm);
                let back = loc.retract(&loc.coretract(&u)?)?;
                Ok(back.sub(&u)?.max_abs())
            })
            .into_iter()
            .collect::<Result<_>>()?;
            for (f, e) in corpus.functions().iter().zip(&errs) {
                rows.push(Row::new(ID, format!("{}/r={r}/{}", setting.label, f.id), *e).level(level));
                worst = worst.max(*e);
            }
        }
    }
    let a = CheckResult::at_most(ID, worst, tol.retraction_identity, Vec::new());
    let b = CheckResult::at_most(ID, pou, tol.partition_of_unity, Vec::new());
    let mut out = CheckResult::merge(ID, vec![a, b]).note(format!("max error {worst:.3e}, partition defect {pou:.3e}"));
    out.rows = rows;
    Ok(out)
}

/// Ratios localized / global `W_q^k` norm on the regularized cylinder, per
/// atlas, indexed `[atlas][(k, q)] → per-level ratios`.
#[allow(clippy::type_complexity)]
fn bracket_table(
    setting: &Setting,
    overlaps: &[f64],
    corpus: &Corpus,
    ks: &[usize],
    qs: &[f64],
    id: &str,
    rows: &mut Vec<Row>,
) -> Result<Vec<Vec<((usize, f64), RatioStats)>>> {
    let mut table = vec![Vec::new(); overlaps.len()];
    let mut ratios = vec![vec![vec![Vec::new(); setting.levels.len()]; ks.len() * qs.len()]; overlaps.len()];
    for level in 0..setting.levels.len() {
        let wm = setting.manifold(level)?;
        for (ai, &r) in overlaps.iter().enumerate() {
            let atlas = UrAtlas::cylinder(setting.levels[level].s_max, setting.cusp.base(), r)?;
            let loc = LocalizationSystem::new(&atlas, wm.grid())?;
            for (ki, &k) in ks.iter().enumerate() {
                for (qi, &q) in qs.iter().enumerate() {
                    let rs: Vec<f64> = par::map_slice(corpus.functions(), |f| {
                        let u = f.sample(&wm);
                        let (loc_norm, _) = loc.localized_norm(&u, k, q)?;
                        let pw = pointwise_jets(&u, wm.conn_hat(), k)?;
                        Ok(loc_norm / hat_from_pointwise(&pw, &wm, Exponent::finite(q)?)?)
                    })
                    .into_iter()
                    .collect::<Result<_>>()?;
                    for (f, v) in corpus.functions().iter().zip(&rs) {
                        rows.push(
                            Row::new(id, format!("{}/r={r}/{}", setting.label, f.id), *v)
                                .k(k)
                                .q(q)
                                .ratio(*v)
                                .level(level),
                        );
                    }
                    ratios[ai][ki * qs.len() + qi][level] = rs;
                }
            }
        }
    }
    for (ai, per_atlas) in ratios.iter().enumerate() {
        for (ki, &k) in ks.iter().enumerate() {
            for (qi, &q) in qs.iter().enumerate() {
                table[ai].push(((k, q), ratio_stats(&per_atlas[ki * qs.len() + qi])));
            }
        }
    }
    Ok(table)
}

/// Bracket `C` of localized / global norms (`k ≤ 2`) for each atlas, with
/// refinement drift; and the relative agreement of the brackets between the
/// atlases.
pub fn norm_bracket(
    setting: &Setting,
    overlaps: &[f64],
    corpus: &Corpus,
    ks: &[usize],
    qs: &[f64],
    tol: &Tolerances,
) -> Result<(CheckResult, CheckResult)> {
    const ID: &str = "localization.norm_bracket";
    const AGREE: &str = "localization.atlas_agreement";
    let mut rows = Vec::new();
    let table = bracket_table(setting, overlaps, corpus, ks, qs, ID, &mut rows)?;
    let mut parts = Vec::new();
    for (ai, per) in table.iter().enumerate() {
        for ((k, q), st) in per {
            let b = CheckResult::at_most(ID, st.bracket, tol.localization_bracket, Vec::new());
            let d = CheckResult::at_most(ID, st.drift, tol.ratio_drift, Vec::new());
            parts.push(CheckResult::merge(ID, vec![b, d]).note(format!(
                "r={} k={k} q={q}: ratios [{:.4}, {:.4}], C = {:.4}, drift {:.2}%",
                overlaps[ai],
                st.min,
                st.max,
                st.bracket,
                100.0 * st.drift
            )));
        }
    }
    let mut bracket = CheckResult::merge(ID, parts);
    bracket.rows = rows;

    let mut agree_rows = Vec::new();
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    if table.len() >= 2 {
        for (i, ((k, q), a)) in table[0].iter().enumerate() {
            let b = &table[1][i].1;
            let rel = (a.bracket - b.bracket).abs() / a.bracket.max(b.bracket);
            agree_rows.push(Row::new(AGREE, format!("{}/C", setting.label), rel).k(*k).q(*q).ratio(a.bracket / b.bracket));
            notes.push(format!("k={k} q={q}: C {:.4} vs {:.4}", a.bracket, b.bracket));
            worst = worst.max(rel);
        }
    }
    let agreement = CheckResult::at_most(AGREE, worst, tol.atlas_agreement, agree_rows).note(notes.join("; "));
    Ok((bracket, agreement))
}
