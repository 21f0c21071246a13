//! The rank-one case table as data, the scattering scalars mu_X, the
//! GL_2-torus variant, and the worked gamma-product identities.

use crate::field::{AdditiveCharacter, MultiplicativeCharacter};
use crate::gamma::{GammaAtom, GammaProduct, GammaValue};
use crate::{C64, Error, Rat, Result};
use rand::Rng;

/// Dual-group type of a rank-one case with its L-value points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualType {
    /// L_X = L(Std, s1) L(Std, s2) with s1 >= s2.
    Sl2 { s1: Rat, s2: Rat },
    /// L_X = L(Ad, s0).
    Pgl2 { s0: Rat },
}

/// Coordinate convention on the quotient line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Xi,
    Zeta,
}

/// One row of the case table.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneCase {
    pub label: String,
    pub dual: DualType,
    pub dim_x: u32,
    pub coordinate: Coordinate,
    /// Documentation strings only; the groups are never constructed.
    pub space: String,
    pub l_value: String,
}

impl RankOneCase {
    /// psi-covariance exponent s = (dim X - 1)/2; aborts when the table data
    /// is inconsistent with the L-value points.
    pub fn psi_covariance_exponent(&self) -> Result<Rat> {
        let s = Rat::new(self.dim_x as i64 - 1, 2);
        let from_l = match self.dual {
            DualType::Sl2 { s1, s2 } => s1 + s2 - Rat::new(1, 2),
            DualType::Pgl2 { s0 } => s0,
        };
        if s != from_l {
            return Err(Error::data(format!(
                "case {}: 2s = dim X - 1 fails ({} vs {})",
                self.label, from_l, s
            )));
        }
        Ok(s)
    }
}

fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| Error::data(format!("bad rational {s}")))?;
        let d: i64 = d.trim().parse().map_err(|_| Error::data(format!("bad rational {s}")))?;
        if d == 0 {
            return Err(Error::data(format!("bad rational {s}")));
        }
        Ok(Rat::new(n, d))
    } else {
        let n: i64 = s.parse().map_err(|_| Error::data(format!("bad rational {s}")))?;
        Ok(Rat::from_integer(n))
    }
}

/// Parse the case table from its textual form.
pub fn parse_case_table(text: &str) -> Result<Vec<RankOneCase>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(|c| c.trim()).collect();
        if cols.len() != 8 {
            return Err(Error::data(format!("case table line {}: expected 8 columns", lineno + 1)));
        }
        let dual = match cols[1] {
            "SL2" => {
                let s1 = parse_rat(cols[2])?;
                let s2 = parse_rat(cols[3])?;
                if s1 < s2 {
                    return Err(Error::data(format!("case {}: requires s1 >= s2", cols[0])));
                }
                DualType::Sl2 { s1, s2 }
            }
            "PGL2" => DualType::Pgl2 { s0: parse_rat(cols[2])? },
            other => return Err(Error::data(format!("unknown dual type {other}"))),
        };
        let coordinate = match cols[5] {
            "xi" => Coordinate::Xi,
            "zeta" => Coordinate::Zeta,
            other => return Err(Error::data(format!("unknown coordinate {other}"))),
        };
        let case = RankOneCase {
            label: cols[0].to_string(),
            dual,
            dim_x: cols[4].parse().map_err(|_| Error::data("bad dim_x"))?,
            coordinate,
            space: cols[6].to_string(),
            l_value: cols[7].to_string(),
        };
        // data-integrity check happens eagerly
        case.psi_covariance_exponent()?;
        out.push(case);
    }
    if out.is_empty() {
        return Err(Error::data("empty case table"));
    }
    Ok(out)
}

/// The table shipped with the crate.
pub fn builtin_case_table() -> Vec<RankOneCase> {
    parse_case_table(include_str!("../data/rank_one_cases.tsv")).expect("builtin case table parses")
}

pub fn find_case<'a>(table: &'a [RankOneCase], label: &str) -> Result<&'a RankOneCase> {
    table
        .iter()
        .find(|c| c.label.eq_ignore_ascii_case(label))
        .ok_or_else(|| Error::config(format!("unknown case label {label}")))
}

fn rat_c64(r: Rat) -> C64 {
    C64::new(*r.numer() as f64 / *r.denom() as f64, 0.0)
}

/// The scattering scalar mu_X as a formal gamma product in the spectral
/// parameter of A_X.
pub fn mu_x(case: &RankOneCase) -> GammaProduct {
    let one = C64::new(1.0, 0.0);
    match case.dual {
        DualType::Sl2 { s1, s2 } => GammaProduct::from_atoms(vec![
            GammaAtom::new(Rat::new(1, 2), one - rat_c64(s1), -1),
            GammaAtom::new(Rat::new(1, 2), one - rat_c64(s2), 1),
            GammaAtom::new(Rat::new(-1, 1), C64::new(0.0, 0.0), 1),
        ]),
        DualType::Pgl2 { s0 } => GammaProduct::from_atoms(vec![
            GammaAtom::new(Rat::new(1, 1), one - rat_c64(s0), 1),
            GammaAtom::new(Rat::new(-1, 1), C64::new(0.0, 0.0), 1),
        ]),
    }
}

/// The GL_2-torus scattering scalar: atoms along the two standard coweights,
/// evaluated at a pair of spectral characters.
pub fn mu_basic_ext() -> GammaProduct {
    let half = C64::new(0.5, 0.0);
    GammaProduct::from_atoms(vec![
        // epsilon-check_1 at s = 1/2, psi^{-1}
        GammaAtom::new2(Rat::new(1, 1), Rat::new(0, 1), half, -1),
        // -epsilon-check_2 at s = 1/2, psi
        GammaAtom::new2(Rat::new(0, 1), Rat::new(-1, 1), half, 1),
        // -alpha-check at s = 0, psi
        GammaAtom::new2(Rat::new(-1, 1), Rat::new(1, 1), C64::new(0.0, 0.0), 1),
    ])
}

/// One worked identity: a left product (the step-by-step composition) and a
/// right product (the stated final formula).
#[derive(Debug, Clone)]
pub struct ExampleIdentity {
    pub id: String,
    pub lhs: GammaProduct,
    pub rhs: GammaProduct,
}

/// Parse the identity data file.
pub fn parse_example_identities(text: &str) -> Result<Vec<ExampleIdentity>> {
    use std::collections::BTreeMap;
    let mut sides: BTreeMap<String, (Vec<GammaAtom>, Vec<GammaAtom>)> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(|c| c.trim()).collect();
        if cols.len() != 5 {
            return Err(Error::data(format!("identity file line {}: expected 5 columns", lineno + 1)));
        }
        let id = cols[0].to_string();
        if !sides.contains_key(&id) {
            order.push(id.clone());
        }
        let entry = sides.entry(id).or_insert_with(|| (Vec::new(), Vec::new()));
        let coeff = parse_rat(cols[2])?;
        let shift = rat_c64(parse_rat(cols[3])?);
        let psi_sign: i8 = cols[4]
            .parse()
            .map_err(|_| Error::data(format!("bad psi sign {}", cols[4])))?;
        let atom = GammaAtom::new(coeff, shift, psi_sign);
        match cols[1] {
            "lhs" => entry.0.push(atom),
            "rhs" => entry.1.push(atom),
            other => return Err(Error::data(format!("unknown side {other}"))),
        }
    }
    let mut out = Vec::new();
    for id in order {
        let (lhs, rhs) = sides.remove(&id).unwrap();
        if lhs.is_empty() || rhs.is_empty() {
            return Err(Error::data(format!("identity {id} is missing a side")));
        }
        out.push(ExampleIdentity {
            id,
            lhs: GammaProduct::from_atoms(lhs),
            rhs: GammaProduct::from_atoms(rhs),
        });
    }
    Ok(out)
}

pub fn builtin_example_identities() -> Vec<ExampleIdentity> {
    parse_example_identities(include_str!("../data/example_identities.tsv"))
        .expect("builtin identities parse")
}

/// Outcome of a gamma-product identity verification.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub id: String,
    pub samples: usize,
    pub pole_collisions: usize,
    pub max_rel_discrepancy: f64,
    pub conclusive: bool,
}

/// Evaluate both sides at `trials` random even unitary-line spectral points
/// (|t| in [0.05, 3], avoiding the pole at the origin) and report the
/// maximal relative discrepancy.
pub fn verify_example(
    identity: &ExampleIdentity,
    trials: usize,
    psi: &AdditiveCharacter,
    rng: &mut impl Rng,
) -> Result<IdentityReport> {
    let mut max_rel: f64 = 0.0;
    let mut poles = 0usize;
    let mut used = 0usize;
    for _ in 0..trials {
        let mut t: f64 = rng.gen_range(-3.0..3.0);
        if t.abs() < 0.05 {
            t += 0.1_f64.copysign(t + 1e-300);
        }
        let chi = [MultiplicativeCharacter::unitary(t)];
        let l = identity.lhs.eval(&chi, psi)?;
        let r = identity.rhs.eval(&chi, psi)?;
        match (l, r) {
            (GammaValue::Value(lv), GammaValue::Value(rv)) => {
                let denom = rv.norm().max(1e-300);
                max_rel = max_rel.max((lv - rv).norm() / denom);
                used += 1;
            }
            _ => poles += 1,
        }
    }
    Ok(IdentityReport {
        id: identity.id.clone(),
        samples: used,
        pole_collisions: poles,
        max_rel_discrepancy: max_rel,
        conclusive: used > 0,
    })
}
