//! Test-only reference implementations. Nothing here calls into the crate's
//! election math; these are literal transcriptions kept deliberately naive.

#![allow(dead_code)]

/// Relative energy factor, one member at a time.
pub fn oracle_q_rel(energies: &[f64]) -> Vec<f64> {
    let n = energies.len() as f64;
    let mut e_total = 0.0;
    for e in energies {
        e_total += e;
    }
    let mut out = Vec::new();
    for e in energies {
        out.push(e / e_total * n);
    }
    out
}

fn f_gt1(q: f64) -> f64 {
    if q >= 1.0 {
        1.0
    } else {
        0.0
    }
}

fn f_lt1(q: f64) -> f64 {
    if q < 1.0 {
        1.0
    } else {
        0.0
    }
}

/// Polarized energy factor: each term written out exactly as the indicator
/// formula reads, recomputing both cluster sums for every member.
pub fn oracle_q_pol(energies: &[f64]) -> Vec<f64> {
    let q_rel = oracle_q_rel(energies);
    let mut out = Vec::new();
    for i in 0..q_rel.len() {
        let mut below = 0.0;
        let mut above = 0.0;
        for j in 0..q_rel.len() {
            below += q_rel[j] * f_lt1(q_rel[j]);
            above += q_rel[j] * f_gt1(q_rel[j]);
        }
        out.push(f_gt1(q_rel[i]) * (q_rel[i] + q_rel[i] * below / above));
    }
    out
}

/// Relative error helper used by the unit-audit checks.
pub fn rel_err(actual: f64, expected: f64) -> f64 {
    ((actual - expected) / expected).abs()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for i in 0..rx.len() {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx).powi(2);
        dy += (ry[i] - my).powi(2);
    }
    num / (dx.sqrt() * dy.sqrt())
}
