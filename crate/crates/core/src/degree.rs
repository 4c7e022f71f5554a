//! Brouwer degree of `Phi|_S`: the closed-form sums over bands and a numeric
//! degree obtained by counting preimages of a regular value with the signs
//! of the tangential Jacobian.

use serde::Serialize;

use crate::catalog::Family;
use crate::error::{Error, Result};
use crate::gradient_map::{jacobian_sign, preimages, sample_regular_value};

/// Rejection draws allowed per trial when looking for a regular value.
pub const MAX_REGULAR_DRAWS: u64 = 1000;

fn parity(e: usize) -> i32 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Orientation sign of `Phi_*` at the preimage lying in band `k >= 1`.
pub fn sign_formula(k: usize, m1: usize, m2: usize) -> i32 {
    assert!(k >= 1, "bands are numbered from 1");
    if k % 2 == 1 {
        parity(k.div_ceil(2) * m1 + (k - 1) / 2 * m2 + 1)
    } else {
        parity(k / 2 * m1 + k / 2 * m2 + 1)
    }
}

/// Closed-form Brouwer degree of the gradient map for degree `g`.
pub fn degree_closed_form(g: usize, m1: usize, m2: usize) -> Result<i32> {
    let a = parity(m1 + 1);
    let b = parity(m1 + m2 + 1);
    let c = parity(m2 + 1);
    match g {
        1 => Ok(0),
        2 => Ok(a),
        3 => Ok(a + b),
        4 => Ok(a + b + c),
        6 => Ok(2 * a + b + c - 1),
        _ => Err(Error::Config(format!("no isoparametric polynomial of degree {g}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedPreimage {
    pub point: Vec<f64>,
    pub band: usize,
    pub tau: f64,
    pub residual: f64,
    pub sign_numeric: i32,
    pub sign_closed_form: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeTrial {
    pub regular_value: Vec<f64>,
    pub draw_index: u64,
    pub preimages: Vec<SignedPreimage>,
    pub degree: i32,
}

impl DegreeTrial {
    pub fn signs_agree(&self) -> bool {
        self.preimages.iter().all(|q| q.sign_numeric == q.sign_closed_form)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub family: String,
    pub g: usize,
    pub m1: usize,
    pub m2: usize,
    pub seed: u64,
    pub trials: Vec<DegreeTrial>,
    pub degree_numeric: i32,
    pub degree_closed_form: i32,
    pub signs_agree: bool,
    pub agree: bool,
}

/// Signed preimage count at one regular value.
pub fn degree_at(fam: &Family, p: &[f64]) -> Result<Vec<SignedPreimage>> {
    preimages(fam, p)?
        .into_iter()
        .map(|q| {
            Ok(SignedPreimage {
                sign_numeric: jacobian_sign(fam, &q.point)?,
                sign_closed_form: sign_formula(q.level.band, fam.m1, fam.m2),
                band: q.level.band,
                tau: q.level.tau,
                residual: q.residual,
                point: q.point,
            })
        })
        .collect()
}

/// Numeric degree over `trials` independent regular values; all trials must agree.
pub fn degree_numeric(fam: &Family, seed: u64, trials: usize) -> Result<DegreeReport> {
    let closed = degree_closed_form(fam.g, fam.m1, fam.m2)?;
    let mut records = Vec::with_capacity(trials);
    for t in 0..trials.max(1) as u64 {
        let (p, draw_index) =
            sample_regular_value(fam, seed, t * MAX_REGULAR_DRAWS, MAX_REGULAR_DRAWS)?;
        let signed = degree_at(fam, &p)?;
        let degree = signed.iter().map(|q| q.sign_numeric).sum();
        records.push(DegreeTrial {
            regular_value: p,
            draw_index,
            preimages: signed,
            degree,
        });
    }
    let first = records[0].degree;
    if let Some(bad) = records.iter().find(|r| r.degree != first) {
        return Err(Error::Inconsistency(format!(
            "{}: trial degrees {first} and {} differ",
            fam.label(),
            bad.degree
        )));
    }
    Ok(DegreeReport {
        family: fam.label(),
        g: fam.g,
        m1: fam.m1,
        m2: fam.m2,
        seed,
        signs_agree: records.iter().all(DegreeTrial::signs_agree),
        trials: records,
        degree_numeric: first,
        degree_closed_form: closed,
        agree: first == closed,
    })
}

/// One row of the table of harmonic isoparametric families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    /// Catalog identifier when a closed-form polynomial is implemented.
    pub family: Option<String>,
    pub g: usize,
    pub m: usize,
    pub degree: i32,
}

/// `(g, m)` pairs of harmonic isoparametric polynomials, with `g = 1, 2`
/// represented by `m = 1, 2`.
pub fn harmonic_table() -> Vec<TableRow> {
    let pairs = [
        (1, 1, None),
        (1, 2, None),
        (2, 1, Some("g2:1")),
        (2, 2, Some("g2:2")),
        (3, 1, Some("g3m1")),
        (3, 2, None),
        (3, 4, None),
        (3, 8, None),
        (4, 1, Some("g4m1")),
        (4, 2, None),
        (6, 1, Some("g6m1")),
        (6, 2, None),
    ];
    pairs
        .into_iter()
        .map(|(g, m, family)| TableRow {
            family: family.map(str::to_string),
            g,
            m,
            degree: degree_closed_form(g, m, m).expect("valid g"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_family, FamilyId};

    #[test]
    fn sign_formula_examples() {
        assert_eq!(sign_formula(1, 1, 1), 1);
        assert_eq!(sign_formula(2, 1, 1), -1);
        assert_eq!(sign_formula(3, 1, 1), 1);
        let sextic: Vec<i32> = (1..=5).map(|k| sign_formula(k, 1, 1)).collect();
        assert_eq!(sextic, vec![1, -1, 1, -1, 1]);
    }

    #[test]
    fn closed_form_is_the_sum_of_band_signs() {
        for g in [2usize, 3, 4, 6] {
            for m1 in 1..6 {
                for m2 in 1..6 {
                    let sum: i32 = (1..g).map(|k| sign_formula(k, m1, m2)).sum();
                    assert_eq!(degree_closed_form(g, m1, m2).unwrap(), sum, "g={g} {m1} {m2}");
                }
            }
        }
    }

    #[test]
    fn closed_form_table_values() {
        assert_eq!(degree_closed_form(4, 1, 1).unwrap(), 1);
        assert_eq!(degree_closed_form(6, 1, 1).unwrap(), 1);
        assert_eq!(degree_closed_form(6, 2, 2).unwrap(), -5);
        assert_eq!(degree_closed_form(3, 1, 1).unwrap(), 0);
        assert_eq!(degree_closed_form(3, 2, 2).unwrap(), -2);
        assert_eq!(degree_closed_form(4, 2, 2).unwrap(), -3);
        assert_eq!(degree_closed_form(1, 3, 3).unwrap(), 0);
        assert_eq!(degree_closed_form(2, 2, 2).unwrap(), -1);
        assert!(matches!(degree_closed_form(5, 1, 1), Err(Error::Config(_))));
    }

    #[test]
    fn unit_degree_selects_quadrics_and_two_exceptional_families() {
        for row in harmonic_table() {
            let unit = row.degree.abs() == 1;
            let expected = row.g == 2 || (row.g, row.m) == (4, 1) || (row.g, row.m) == (6, 1);
            assert_eq!(unit, expected, "{row:?}");
        }
    }

    #[test]
    fn numeric_degree_of_quartic_and_quadric() {
        let rep = degree_numeric(&make_family(FamilyId::G4M1), 7, 3).unwrap();
        assert_eq!(rep.degree_numeric, 1);
        assert!(rep.agree && rep.signs_agree);
        let rep = degree_numeric(&make_family(FamilyId::G2(2)), 7, 3).unwrap();
        assert_eq!(rep.degree_numeric, -1);
        assert!(rep.agree);
    }

    #[test]
    fn sextic_signs_alternate() {
        let rep = degree_numeric(&make_family(FamilyId::G6M1), 3, 1).unwrap();
        let mut signs: Vec<(usize, i32)> =
            rep.trials[0].preimages.iter().map(|q| (q.band, q.sign_numeric)).collect();
        signs.sort_unstable();
        assert_eq!(signs, vec![(1, 1), (2, -1), (3, 1), (4, -1), (5, 1)]);
        assert_eq!(rep.degree_numeric, 1);
    }
}
