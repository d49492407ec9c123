//! Extended Butcher tableaus: explicit Runge-Kutta coefficients together with
//! a space tag (full degree k or reduced degree k-1) for every divergence
//! evaluation.
//!
//! A scheme is "class A" when every terminal combination weight uses the full
//! space, and "class B" otherwise; class B schemes trade a half order of
//! accuracy near sonic points for a larger stable CFL range.

use crate::dg::SpaceLevel;
use crate::error::{Result, SolverError};

/// Shu-Osher rewrite of the same scheme: stage i is a convex combination of
/// earlier stage values plus forward-Euler pieces, which is where a limiter
/// hook attaches.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ShuOsherForm {
    /// alpha[i][j]: weight of stage value j in stage i+1 (i from 0).
    pub alpha: Vec<Vec<f64>>,
    /// beta[i][j]: dt multiple of the divergence of stage j in stage i+1.
    pub beta: Vec<Vec<f64>>,
    /// Space tag for each beta entry.
    pub tag: Vec<Vec<SpaceLevel>>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ExtendedTableau {
    pub name: String,
    /// Strictly lower triangular stage coefficients.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// Space tag for each a[i][j] (meaningful where a[i][j] != 0).
    pub d: Vec<Vec<SpaceLevel>>,
    /// Space tag for each b_i (meaningful where b_i != 0).
    pub e: Vec<SpaceLevel>,
    /// Classical order of the underlying Runge-Kutta method.
    pub order: usize,
    pub shu_osher: Option<ShuOsherForm>,
}

impl ExtendedTableau {
    pub fn n_stages(&self) -> usize {
        self.b.len()
    }

    /// True when some terminal weight uses the reduced space.
    pub fn is_class_b(&self) -> bool {
        self.b
            .iter()
            .zip(&self.e)
            .any(|(&bi, &ei)| bi != 0.0 && ei == SpaceLevel::Low)
    }

    /// True when any divergence evaluation uses the reduced space.
    pub fn uses_reduced_space(&self) -> bool {
        let in_a = self
            .a
            .iter()
            .zip(&self.d)
            .any(|(ar, dr)| ar.iter().zip(dr).any(|(&v, &t)| v != 0.0 && t == SpaceLevel::Low));
        in_a || self.is_class_b()
    }

    /// Structural checks plus the order conditions up to the claimed order.
    pub fn validate(&self) -> Result<()> {
        let s = self.n_stages();
        let fail = |msg: String| Err(SolverError::TableauValidation(msg));
        if self.a.len() != s || self.c.len() != s || self.d.len() != s || self.e.len() != s {
            return fail(format!("{}: inconsistent stage counts", self.name));
        }
        for i in 0..s {
            if self.a[i].len() != s || self.d[i].len() != s {
                return fail(format!("{}: row {i} has wrong length", self.name));
            }
            for j in i..s {
                if self.a[i][j] != 0.0 {
                    return fail(format!("{}: a[{i}][{j}] breaks explicitness", self.name));
                }
            }
            let row: f64 = self.a[i].iter().sum();
            if (row - self.c[i]).abs() > 1e-12 {
                return fail(format!("{}: row {i} sum {} != c {}", self.name, row, self.c[i]));
            }
        }
        if self.e[s - 1] != SpaceLevel::High {
            return fail(format!("{}: terminal stage must use the full space", self.name));
        }

        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        let b_sum: f64 = self.b.iter().sum();
        if (b_sum - 1.0).abs() > 1e-12 {
            return fail(format!("{}: weights sum to {b_sum}", self.name));
        }
        if self.order >= 2 {
            let bc = dot(&self.b, &self.c);
            if (bc - 0.5).abs() > 1e-12 {
                return fail(format!("{}: sum b_i c_i = {bc} != 1/2", self.name));
            }
        }
        if self.order >= 3 {
            let c2: Vec<f64> = self.c.iter().map(|c| c * c).collect();
            let bc2 = dot(&self.b, &c2);
            if (bc2 - 1.0 / 3.0).abs() > 1e-12 {
                return fail(format!("{}: sum b_i c_i^2 = {bc2} != 1/3", self.name));
            }
            let mut bac = 0.0;
            for i in 0..s {
                bac += self.b[i] * dot(&self.a[i], &self.c);
            }
            if (bac - 1.0 / 6.0).abs() > 1e-12 {
                return fail(format!("{}: sum b_i a_ij c_j = {bac} != 1/6", self.name));
            }
        }
        if self.order >= 4 {
            let c3: Vec<f64> = self.c.iter().map(|c| c * c * c).collect();
            if (dot(&self.b, &c3) - 0.25).abs() > 1e-12 {
                return fail(format!("{}: fourth-order condition b.c^3 fails", self.name));
            }
            let mut bcac = 0.0;
            let mut bac2 = 0.0;
            let mut baac = 0.0;
            for i in 0..s {
                let ac_i = dot(&self.a[i], &self.c);
                bcac += self.b[i] * self.c[i] * ac_i;
                let c2: Vec<f64> = self.c.iter().map(|c| c * c).collect();
                bac2 += self.b[i] * dot(&self.a[i], &c2);
                let mut aac = 0.0;
                for j in 0..s {
                    aac += self.a[i][j] * dot(&self.a[j], &self.c);
                }
                baac += self.b[i] * aac;
            }
            if (bcac - 0.125).abs() > 1e-12
                || (bac2 - 1.0 / 12.0).abs() > 1e-12
                || (baac - 1.0 / 24.0).abs() > 1e-12
            {
                return fail(format!("{}: fourth-order tree conditions fail", self.name));
            }
        }

        if let Some(so) = &self.shu_osher {
            self.check_shu_osher(so)?;
        }
        Ok(())
    }

    /// Expand the Shu-Osher form into Butcher coefficients and compare.
    fn check_shu_osher(&self, so: &ShuOsherForm) -> Result<()> {
        let s = self.n_stages();
        if so.alpha.len() != s || so.beta.len() != s || so.tag.len() != s {
            return Err(SolverError::TableauValidation(format!(
                "{}: Shu-Osher form has wrong stage count",
                self.name
            )));
        }
        // coeff[i][j]: accumulated dt-weight of divergence j in stage value i,
        // stage value 0 being u^n; row s corresponds to u^{n+1}
        let mut coeff: Vec<Vec<f64>> = vec![vec![0.0; s]];
        let mut tags: Vec<Vec<Option<SpaceLevel>>> = vec![vec![None; s]];
        for i in 0..s {
            if so.alpha[i].len() != i + 1 || so.beta[i].len() != i + 1 || so.tag[i].len() != i + 1 {
                return Err(SolverError::TableauValidation(format!(
                    "{}: Shu-Osher row {i} has wrong length",
                    self.name
                )));
            }
            let asum: f64 = so.alpha[i].iter().sum();
            if (asum - 1.0).abs() > 1e-12 {
                return Err(SolverError::TableauValidation(format!(
                    "{}: Shu-Osher row {i} weights sum to {asum}",
                    self.name
                )));
            }
            let mut row = vec![0.0; s];
            let mut row_tags = vec![None; s];
            for j in 0..=i {
                for m in 0..s {
                    row[m] += so.alpha[i][j] * coeff[j][m];
                    if coeff[j][m] != 0.0 && so.alpha[i][j] != 0.0 {
                        row_tags[m] = tags[j][m];
                    }
                }
                if so.beta[i][j] != 0.0 {
                    row[j] += so.beta[i][j];
                    row_tags[j] = Some(so.tag[i][j]);
                }
            }
            coeff.push(row);
            tags.push(row_tags);
        }
        for i in 0..s {
            let (expect, expect_tags): (&[f64], &[SpaceLevel]) = if i + 1 < s {
                (&self.a[i + 1], &self.d[i + 1])
            } else {
                (&self.b, &self.e)
            };
            for j in 0..s {
                if (coeff[i + 1][j] - expect[j]).abs() > 1e-12 {
                    return Err(SolverError::TableauValidation(format!(
                        "{}: Shu-Osher expansion mismatch at stage {} weight {}",
                        self.name,
                        i + 1,
                        j
                    )));
                }
                if expect[j] != 0.0 && tags[i + 1][j] != Some(expect_tags[j]) {
                    return Err(SolverError::TableauValidation(format!(
                        "{}: Shu-Osher tag mismatch at stage {} weight {}",
                        self.name,
                        i + 1,
                        j
                    )));
                }
            }
        }
        Ok(())
    }
}

use SpaceLevel::{High, Low};

fn tableau(
    name: &str,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<Vec<SpaceLevel>>,
    e: Vec<SpaceLevel>,
    order: usize,
    shu_osher: Option<ShuOsherForm>,
) -> ExtendedTableau {
    ExtendedTableau { name: name.to_string(), a, b, c, d, e, order, shu_osher }
}

pub const BUILTIN_NAMES: [&str; 9] = [
    "rkdg2",
    "rkdg3_heun",
    "rkdg3_ssp",
    "rkdg4",
    "midpoint_sd",
    "heun_sd",
    "ssprk2_sd",
    "ssprk3_sd",
    "rk4_sd",
];

/// Look up a built-in scheme by name.
pub fn builtin_tableau(name: &str) -> Result<ExtendedTableau> {
    let t = match name {
        "rkdg2" => tableau(
            name,
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            vec![0.5, 0.5],
            vec![0.0, 1.0],
            vec![vec![High; 2]; 2],
            vec![High, High],
            2,
            Some(ShuOsherForm {
                alpha: vec![vec![1.0], vec![0.5, 0.5]],
                beta: vec![vec![1.0], vec![0.0, 0.5]],
                tag: vec![vec![High], vec![High, High]],
            }),
        ),
        "ssprk2_sd" => tableau(
            name,
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            vec![0.5, 0.5],
            vec![0.0, 1.0],
            vec![vec![High, High], vec![Low, High]],
            vec![Low, High],
            2,
            Some(ShuOsherForm {
                alpha: vec![vec![1.0], vec![0.5, 0.5]],
                beta: vec![vec![1.0], vec![0.0, 0.5]],
                tag: vec![vec![Low], vec![High, High]],
            }),
        ),
        "midpoint_sd" => tableau(
            name,
            vec![vec![0.0, 0.0], vec![0.5, 0.0]],
            vec![0.0, 1.0],
            vec![0.0, 0.5],
            vec![vec![High, High], vec![Low, High]],
            vec![High, High],
            2,
            None,
        ),
        "rkdg3_heun" => tableau(
            name,
            vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0 / 3.0, 0.0, 0.0],
                vec![0.0, 2.0 / 3.0, 0.0],
            ],
            vec![0.25, 0.0, 0.75],
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
            vec![vec![High; 3]; 3],
            vec![High, High, High],
            3,
            None,
        ),
        "heun_sd" => tableau(
            name,
            vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0 / 3.0, 0.0, 0.0],
                vec![0.0, 2.0 / 3.0, 0.0],
            ],
            vec![0.25, 0.0, 0.75],
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
            vec![
                vec![High, High, High],
                vec![Low, High, High],
                vec![High, Low, High],
            ],
            vec![High, High, High],
            3,
            None,
        ),
        "rkdg3_ssp" => tableau(
            name,
            vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.25, 0.25, 0.0],
            ],
            vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
            vec![0.0, 1.0, 0.5],
            vec![vec![High; 3]; 3],
            vec![High, High, High],
            3,
            Some(ShuOsherForm {
                alpha: vec![vec![1.0], vec![0.75, 0.25], vec![1.0 / 3.0, 0.0, 2.0 / 3.0]],
                beta: vec![vec![1.0], vec![0.0, 0.25], vec![0.0, 0.0, 2.0 / 3.0]],
                tag: vec![vec![High], vec![High, High], vec![High, High, High]],
            }),
        ),
        "ssprk3_sd" => tableau(
            name,
            vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.25, 0.25, 0.0],
            ],
            vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
            vec![0.0, 1.0, 0.5],
            vec![
                vec![High, High, High],
                vec![Low, High, High],
                vec![Low, High, High],
            ],
            vec![Low, High, High],
            3,
            Some(ShuOsherForm {
                alpha: vec![vec![1.0], vec![0.75, 0.25], vec![1.0 / 3.0, 0.0, 2.0 / 3.0]],
                beta: vec![vec![1.0], vec![0.0, 0.25], vec![0.0, 0.0, 2.0 / 3.0]],
                tag: vec![vec![Low], vec![High, High], vec![High, High, High]],
            }),
        ),
        "rkdg4" => tableau(
            name,
            rk4_a(),
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            vec![0.0, 0.5, 0.5, 1.0],
            vec![vec![High; 4]; 4],
            vec![High; 4],
            4,
            None,
        ),
        "rk4_sd" => tableau(
            name,
            rk4_a(),
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            vec![0.0, 0.5, 0.5, 1.0],
            vec![
                vec![High, High, High, High],
                vec![Low, High, High, High],
                vec![High, Low, High, High],
                vec![High, High, Low, High],
            ],
            vec![Low, Low, Low, High],
            4,
            None,
        ),
        _ => {
            return Err(SolverError::Lookup {
                name: name.to_string(),
                valid: BUILTIN_NAMES.join(", "),
            })
        }
    };
    t.validate()?;
    Ok(t)
}

fn rk4_a() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 0.0, 0.0, 0.0],
        vec![0.5, 0.0, 0.0, 0.0],
        vec![0.0, 0.5, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ]
}

/// Variant selector for the parametric two- and three-stage families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericVariant {
    V1,
    V2,
    V3,
    V4,
}

/// Two-stage second-order family with free stage abscissa alpha.
pub fn generic2(alpha: f64, variant: GenericVariant) -> Result<ExtendedTableau> {
    if alpha == 0.0 {
        return Err(SolverError::InvalidArgument(
            "two-stage family is singular at alpha = 0".into(),
        ));
    }
    let (d21, e1) = match variant {
        GenericVariant::V1 => (Low, Low),
        GenericVariant::V2 => (Low, High),
        GenericVariant::V3 => (High, Low),
        GenericVariant::V4 => (High, High),
    };
    let t = tableau(
        &format!("generic2_{variant:?}(alpha={alpha})").to_lowercase(),
        vec![vec![0.0, 0.0], vec![alpha, 0.0]],
        vec![1.0 - 0.5 / alpha, 0.5 / alpha],
        vec![0.0, alpha],
        vec![vec![High, High], vec![d21, High]],
        vec![e1, High],
        2,
        None,
    );
    t.validate()?;
    Ok(t)
}

/// Three-stage third-order family with free stage abscissa alpha; the third
/// abscissa is pinned at 1. Variants v1 (class A) and v2 (class B) only.
pub fn generic3(alpha: f64, variant: GenericVariant) -> Result<ExtendedTableau> {
    for bad in [0.0, 2.0 / 3.0, 1.0] {
        if (alpha - bad).abs() < 1e-12 {
            return Err(SolverError::InvalidArgument(format!(
                "three-stage family is singular at alpha = {bad}"
            )));
        }
    }
    let a31 = 1.0 + (1.0 - alpha) / (alpha * (3.0 * alpha - 2.0));
    let a32 = -(1.0 - alpha) / (alpha * (3.0 * alpha - 2.0));
    let b = vec![
        0.5 - 1.0 / (6.0 * alpha),
        1.0 / (6.0 * alpha * (1.0 - alpha)),
        (2.0 - 3.0 * alpha) / (6.0 * (1.0 - alpha)),
    ];
    let (d, e) = match variant {
        GenericVariant::V1 => (
            vec![
                vec![High, High, High],
                vec![High, High, High],
                vec![Low, Low, High],
            ],
            vec![High, High, High],
        ),
        GenericVariant::V2 => (
            vec![
                vec![High, High, High],
                vec![Low, High, High],
                vec![Low, Low, High],
            ],
            vec![Low, Low, High],
        ),
        _ => {
            return Err(SolverError::InvalidArgument(
                "three-stage family defines variants v1 and v2 only".into(),
            ))
        }
    };
    let t = tableau(
        &format!("generic3_{variant:?}(alpha={alpha})").to_lowercase(),
        vec![
            vec![0.0, 0.0, 0.0],
            vec![alpha, 0.0, 0.0],
            vec![a31, a32, 0.0],
        ],
        b,
        vec![0.0, alpha, 1.0],
        d,
        e,
        3,
        None,
    );
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_validate() {
        for name in BUILTIN_NAMES {
            let t = builtin_tableau(name).unwrap();
            assert_eq!(t.name, name);
        }
    }

    #[test]
    fn class_assignment() {
        for (name, class_b) in [
            ("rkdg2", false),
            ("rkdg3_heun", false),
            ("rkdg3_ssp", false),
            ("rkdg4", false),
            ("midpoint_sd", false),
            ("heun_sd", false),
            ("ssprk2_sd", true),
            ("ssprk3_sd", true),
            ("rk4_sd", true),
        ] {
            let t = builtin_tableau(name).unwrap();
            assert_eq!(t.is_class_b(), class_b, "{name}");
        }
        assert!(!builtin_tableau("rkdg2").unwrap().uses_reduced_space());
        assert!(builtin_tableau("midpoint_sd").unwrap().uses_reduced_space());
    }

    #[test]
    fn unknown_name_lists_valid_schemes() {
        let err = builtin_tableau("nope").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("rkdg2") && msg.contains("rk4_sd"), "{msg}");
    }

    #[test]
    fn generic2_alpha_one_matches_ssprk2() {
        let g = generic2(1.0, GenericVariant::V1).unwrap();
        let s = builtin_tableau("ssprk2_sd").unwrap();
        assert_eq!(g.a, s.a);
        assert_eq!(g.b, s.b);
        assert_eq!(g.d, s.d);
        assert_eq!(g.e, s.e);
    }

    #[test]
    fn generic_families_validate_over_alpha() {
        for i in 1..=20 {
            let alpha = 0.05 * i as f64;
            for v in [GenericVariant::V1, GenericVariant::V2, GenericVariant::V3, GenericVariant::V4]
            {
                generic2(alpha, v).unwrap();
            }
            if (alpha - 2.0 / 3.0).abs() > 1e-9 && (alpha - 1.0).abs() > 1e-9 {
                generic3(alpha, GenericVariant::V1).unwrap();
                generic3(alpha, GenericVariant::V2).unwrap();
            }
        }
        // negative abscissae are allowed too
        generic3(-0.5, GenericVariant::V2).unwrap();
        assert!(generic2(0.0, GenericVariant::V1).is_err());
        assert!(generic3(2.0 / 3.0, GenericVariant::V1).is_err());
        assert!(generic3(0.4, GenericVariant::V3).is_err());
    }

    #[test]
    fn broken_tableaus_rejected() {
        let mut t = builtin_tableau("rkdg2").unwrap();
        t.b[0] = 0.6;
        assert!(t.validate().is_err());

        let mut t = builtin_tableau("ssprk3_sd").unwrap();
        t.e[2] = SpaceLevel::Low;
        assert!(t.validate().is_err());

        let mut t = builtin_tableau("rkdg3_ssp").unwrap();
        t.shu_osher.as_mut().unwrap().beta[1][1] = 0.3;
        assert!(t.validate().is_err());
    }
}
