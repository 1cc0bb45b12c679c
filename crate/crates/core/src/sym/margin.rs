use serde::{Deserialize, Serialize};

use crate::channel::{induce_u_channel, AVChannel, AuxLaw, Kernel, StateChannel};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram};

/// Default threshold on the max-violation scale.
pub const DEFAULT_SYM_TOL: f64 = 1e-7;

/// Which symmetrizability condition to test. The tag fixes the shape of the
/// symmetrizing kernel `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymVariant {
    /// `T(j|x,s)`, exchanging the pair `(x,s)`.
    XS,
    /// `T(j|x)`, exchanging `x` at every fixed `s`.
    X,
    /// `T(j|s)`, exchanging `s` at every fixed `x`.
    S,
    /// `T(j|x,s)`, exchanging `x` at every fixed `s`.
    XGivenS,
    /// `T(j|x,s)`, exchanging `s` at every fixed `x`.
    SGivenX,
    /// `T(j|x)` on a stateless AVC.
    P2pX,
    /// `T(j|u,x)` on a composite `(x,u)` AVC, exchanging `u` at every `x`.
    UGivenX,
}

impl SymVariant {
    pub const STATE_VARIANTS: [SymVariant; 5] = [
        SymVariant::XS,
        SymVariant::X,
        SymVariant::S,
        SymVariant::XGivenS,
        SymVariant::SGivenX,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SymVariant::XS => "XS",
            SymVariant::X => "X",
            SymVariant::S => "S",
            SymVariant::XGivenS => "X|S",
            SymVariant::SGivenX => "S|X",
            SymVariant::P2pX => "P2P_X",
            SymVariant::UGivenX => "U|X",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "XS" | "X*S" | "XXS" => SymVariant::XS,
            "X" => SymVariant::X,
            "S" => SymVariant::S,
            "X|S" | "X_GIVEN_S" => SymVariant::XGivenS,
            "S|X" | "S_GIVEN_X" => SymVariant::SGivenX,
            "P2P_X" | "P2PX" => SymVariant::P2pX,
            "U|X" | "U_GIVEN_X" => SymVariant::UGivenX,
            _ => return None,
        })
    }
}

/// How inputs with zero mass in an induced channel enter the `U|X` test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum UndefinedRowPolicy {
    /// Undefined rows take part as all-zero output vectors.
    #[default]
    Zero,
    /// Pairs touching an undefined row are dropped.
    Skip,
}

/// Channel handed to [`sym_margin`].
#[derive(Debug, Clone, Copy)]
pub enum SymTarget<'a> {
    State(&'a StateChannel),
    Stateless(&'a AVChannel),
}

impl<'a> From<&'a StateChannel> for SymTarget<'a> {
    fn from(c: &'a StateChannel) -> Self {
        SymTarget::State(c)
    }
}

impl<'a> From<&'a AVChannel> for SymTarget<'a> {
    fn from(c: &'a AVChannel) -> Self {
        SymTarget::Stateless(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymReport {
    pub variant: SymVariant,
    /// Max absolute violation of the defining equality under `certificate`;
    /// `+inf` when the variant has no pair of distinct arguments to exchange.
    #[serde(with = "crate::numfmt")]
    pub margin: f64,
    /// Optimal `T`, one row per conditioning symbol.
    pub certificate: Kernel,
    pub tol: f64,
    pub symmetrizable: bool,
    /// Number of exchanged pairs that entered the program.
    pub pairs: usize,
}

/// One exchanged pair: the equality reads
/// `sum_j a[j][y] T(j|tb) = sum_j b[j][y] T(j|ta)` for all `y`.
struct Pair<'a> {
    a: Vec<&'a [f64]>,
    b: Vec<&'a [f64]>,
    ta: usize,
    tb: usize,
}

struct Problem<'a> {
    n_t: usize,
    nj: usize,
    ny: usize,
    pairs: Vec<Pair<'a>>,
}

fn state_problem(ch: &StateChannel, variant: SymVariant) -> Result<Problem<'_>> {
    let (nx, ns, nj, ny) = (ch.nx(), ch.ns(), ch.nj(), ch.ny());
    let rows = |x: usize, s: usize| (0..nj).map(|j| ch.row(x, s, j)).collect::<Vec<_>>();
    let mut pairs = Vec::new();
    let n_t = match variant {
        SymVariant::XS => {
            let n = nx * ns;
            for a in 0..n {
                for b in a + 1..n {
                    pairs.push(Pair {
                        a: rows(a / ns, a % ns),
                        b: rows(b / ns, b % ns),
                        ta: a,
                        tb: b,
                    });
                }
            }
            n
        }
        SymVariant::X => {
            for s in 0..ns {
                for x in 0..nx {
                    for x2 in x + 1..nx {
                        pairs.push(Pair {
                            a: rows(x, s),
                            b: rows(x2, s),
                            ta: x,
                            tb: x2,
                        });
                    }
                }
            }
            nx
        }
        SymVariant::S => {
            for x in 0..nx {
                for s in 0..ns {
                    for s2 in s + 1..ns {
                        pairs.push(Pair {
                            a: rows(x, s),
                            b: rows(x, s2),
                            ta: s,
                            tb: s2,
                        });
                    }
                }
            }
            ns
        }
        SymVariant::XGivenS => {
            for s in 0..ns {
                for x in 0..nx {
                    for x2 in x + 1..nx {
                        pairs.push(Pair {
                            a: rows(x, s),
                            b: rows(x2, s),
                            ta: x * ns + s,
                            tb: x2 * ns + s,
                        });
                    }
                }
            }
            nx * ns
        }
        SymVariant::SGivenX => {
            for x in 0..nx {
                for s in 0..ns {
                    for s2 in s + 1..ns {
                        pairs.push(Pair {
                            a: rows(x, s),
                            b: rows(x, s2),
                            ta: x * ns + s,
                            tb: x * ns + s2,
                        });
                    }
                }
            }
            nx * ns
        }
        SymVariant::P2pX | SymVariant::UGivenX => {
            return Err(Error::ShapeMismatch(format!(
                "{} needs a stateless channel",
                variant.name()
            )))
        }
    };
    Ok(Problem { n_t, nj, ny, pairs })
}

fn avc_problem(
    avc: &AVChannel,
    variant: SymVariant,
    policy: UndefinedRowPolicy,
) -> Result<Problem<'_>> {
    let (nj, ny) = (avc.nj(), avc.ny());
    let rows = |i: usize| (0..nj).map(|j| avc.row(i, j)).collect::<Vec<_>>();
    let usable = |i: usize| policy == UndefinedRowPolicy::Zero || avc.is_defined(i);
    let mut pairs = Vec::new();
    match variant {
        SymVariant::P2pX => {
            for a in 0..avc.n_in() {
                for b in a + 1..avc.n_in() {
                    if usable(a) && usable(b) {
                        pairs.push(Pair {
                            a: rows(a),
                            b: rows(b),
                            ta: a,
                            tb: b,
                        });
                    }
                }
            }
        }
        SymVariant::UGivenX => {
            let comp = avc.composite().ok_or_else(|| {
                Error::ShapeMismatch("U|X needs a composite (x,u) input alphabet".into())
            })?;
            for x in 0..comp.nx {
                for u in 0..comp.nu {
                    for u2 in u + 1..comp.nu {
                        let (a, b) = (comp.index(x, u), comp.index(x, u2));
                        if usable(a) && usable(b) {
                            pairs.push(Pair {
                                a: rows(a),
                                b: rows(b),
                                ta: a,
                                tb: b,
                            });
                        }
                    }
                }
            }
        }
        v => {
            return Err(Error::ShapeMismatch(format!(
                "{} needs a state channel",
                v.name()
            )))
        }
    }
    Ok(Problem {
        n_t: avc.n_in(),
        nj,
        ny,
        pairs,
    })
}

/// Max absolute violation of the exchanged equalities under `t`.
fn violation(p: &Problem<'_>, t: &Kernel) -> f64 {
    let mut worst: f64 = 0.0;
    for pair in &p.pairs {
        for y in 0..p.ny {
            let mut d = 0.0;
            for j in 0..p.nj {
                d += pair.a[j][y] * t.get(pair.tb, j) - pair.b[j][y] * t.get(pair.ta, j);
            }
            worst = worst.max(d.abs());
        }
    }
    worst
}

fn solve(p: &Problem<'_>) -> Result<(f64, Kernel)> {
    let (n_t, nj) = (p.n_t, p.nj);
    if p.pairs.is_empty() {
        let t = Kernel::constant(n_t, &vec![1.0 / nj as f64; nj]);
        return Ok((f64::INFINITY, t));
    }
    let tv = n_t * nj;
    let mut lp = LinearProgram::new(tv + 1);
    lp.set_objective(tv, 1.0);
    for r in 0..n_t {
        lp.add((0..nj).map(|j| (r * nj + j, 1.0)).collect(), Cmp::Eq, 1.0);
    }
    for pair in &p.pairs {
        for y in 0..p.ny {
            let mut terms: Vec<(usize, f64)> = Vec::with_capacity(2 * nj + 1);
            for j in 0..nj {
                let (ca, cb) = (pair.a[j][y], pair.b[j][y]);
                if ca != 0.0 {
                    terms.push((pair.tb * nj + j, ca));
                }
                if cb != 0.0 {
                    terms.push((pair.ta * nj + j, -cb));
                }
            }
            if terms.is_empty() {
                continue;
            }
            let mut le = terms.clone();
            le.push((tv, -1.0));
            lp.add(le, Cmp::Le, 0.0);
            let mut ge = terms;
            ge.push((tv, 1.0));
            lp.add(ge, Cmp::Ge, 0.0);
        }
    }
    let sol = lp.solve()?;
    let mut flat = sol.x[..tv].to_vec();
    for r in 0..n_t {
        let row = &mut flat[r * nj..(r + 1) * nj];
        row.iter_mut().for_each(|v| *v = v.max(0.0));
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|v| *v /= s);
        } else {
            row.iter_mut().for_each(|v| *v = 1.0 / nj as f64);
        }
    }
    let t = Kernel::from_flat_unchecked(n_t, nj, flat);
    Ok((violation(p, &t), t))
}

/// Decides one symmetrizability variant by linear programming.
///
/// The returned margin is `min_T max |lhs - rhs|` over row-stochastic `T`;
/// the channel is reported symmetrizable iff the margin is at most `tol`.
pub fn sym_margin<'a>(
    target: impl Into<SymTarget<'a>>,
    variant: SymVariant,
    tol: f64,
) -> Result<SymReport> {
    sym_margin_with(target, variant, tol, UndefinedRowPolicy::Zero)
}

/// [`sym_margin`] with an explicit policy for undefined induced rows.
pub fn sym_margin_with<'a>(
    target: impl Into<SymTarget<'a>>,
    variant: SymVariant,
    tol: f64,
    policy: UndefinedRowPolicy,
) -> Result<SymReport> {
    let problem = match target.into() {
        SymTarget::State(ch) => state_problem(ch, variant)?,
        SymTarget::Stateless(avc) => avc_problem(avc, variant, policy)?,
    };
    let (margin, certificate) = solve(&problem)?;
    Ok(SymReport {
        variant,
        margin,
        certificate,
        tol,
        symmetrizable: margin <= tol,
        pairs: problem.pairs.len(),
    })
}

/// Max violation of a given kernel `t` for the variant, for re-checking
/// certificates independently of the solver.
pub fn violation_under<'a>(
    target: impl Into<SymTarget<'a>>,
    variant: SymVariant,
    t: &Kernel,
    policy: UndefinedRowPolicy,
) -> Result<f64> {
    let problem = match target.into() {
        SymTarget::State(ch) => state_problem(ch, variant)?,
        SymTarget::Stateless(avc) => avc_problem(avc, variant, policy)?,
    };
    if t.rows() != problem.n_t || t.cols() != problem.nj {
        return Err(Error::DimensionMismatch(format!(
            "kernel is {}x{}, variant needs {}x{}",
            t.rows(),
            t.cols(),
            problem.n_t,
            problem.nj
        )));
    }
    if problem.pairs.is_empty() {
        return Ok(f64::INFINITY);
    }
    Ok(violation(&problem, t))
}

/// Returns 1 iff the induced `Q_{Y|UXJ}` is nonsymmetrizable-`U|X`.
pub fn indicator_u_given_x(
    ch: &StateChannel,
    q_x: &[f64],
    q_u_xs: &Kernel,
    tol: f64,
) -> Result<u8> {
    indicator_u_given_x_with(ch, q_x, q_u_xs, tol, UndefinedRowPolicy::Zero)
}

pub fn indicator_u_given_x_with(
    ch: &StateChannel,
    q_x: &[f64],
    q_u_xs: &Kernel,
    tol: f64,
    policy: UndefinedRowPolicy,
) -> Result<u8> {
    let aux = AuxLaw::StrictlyCausal {
        q_x: q_x.to_vec(),
        q_u_xs: q_u_xs.clone(),
    };
    let ind = induce_u_channel(ch, &aux)?;
    let rep = sym_margin_with(&ind.avc, SymVariant::UGivenX, tol, policy)?;
    Ok(u8::from(!rep.symmetrizable))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{average_out_state, uniform};

    /// `Y = X + S + J` with `X in {0,1,2}`, `S, J in {0,1}`.
    fn example1() -> StateChannel {
        let mut w = vec![vec![vec![vec![0.0; 5]; 2]; 2]; 3];
        for (x, wx) in w.iter_mut().enumerate() {
            for (s, ws) in wx.iter_mut().enumerate() {
                for (j, row) in ws.iter_mut().enumerate() {
                    row[x + s + j] = 1.0;
                }
            }
        }
        StateChannel::from_nested(&w, uniform(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn example1_state_verdicts() {
        let ch = example1();
        let xs = sym_margin(&ch, SymVariant::XS, DEFAULT_SYM_TOL).unwrap();
        let x = sym_margin(&ch, SymVariant::X, DEFAULT_SYM_TOL).unwrap();
        let s = sym_margin(&ch, SymVariant::S, DEFAULT_SYM_TOL).unwrap();
        assert!(!xs.symmetrizable && xs.margin > 1e-3);
        assert!(!x.symmetrizable && x.margin > 1e-3);
        assert!(s.symmetrizable, "margin {}", s.margin);
        let id = Kernel::deterministic(2, 2, |s| s);
        let v = violation_under(&ch, SymVariant::S, &id, UndefinedRowPolicy::Zero).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn example1_u_given_x() {
        let ch = example1();
        let u_of = Kernel::deterministic(6, 4, |r| r / 2 + r % 2);
        assert_eq!(
            indicator_u_given_x(&ch, &uniform(3), &u_of, 1e-7).unwrap(),
            1
        );
        let skip =
            indicator_u_given_x_with(&ch, &uniform(3), &u_of, 1e-7, UndefinedRowPolicy::Skip)
                .unwrap();
        assert_eq!(skip, 0);
    }

    #[test]
    fn constant_u_is_vacuously_nonsymmetrizable() {
        let ch = example1();
        let k = Kernel::constant(6, &[1.0]);
        assert_eq!(indicator_u_given_x(&ch, &uniform(3), &k, 1e-7).unwrap(), 1);
    }

    #[test]
    fn state_blind_u_is_symmetrizable() {
        // Y depends on (x, j) only, and U is independent of S.
        let mut w = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2];
        for x in 0..2 {
            for s in 0..2 {
                for j in 0..2 {
                    w[x][s][j] = vec![
                        0.7 - 0.4 * ((x + j) % 2) as f64,
                        0.3 + 0.4 * ((x + j) % 2) as f64,
                    ];
                }
            }
        }
        let ch = StateChannel::from_nested(&w, vec![0.5, 0.5], vec![vec![0.0; 2]; 2]).unwrap();
        let k = Kernel::constant(4, &[0.5, 0.5]);
        assert_eq!(indicator_u_given_x(&ch, &uniform(2), &k, 1e-7).unwrap(), 0);
    }

    #[test]
    fn shape_mismatches() {
        let ch = example1();
        assert!(matches!(
            sym_margin(&ch, SymVariant::P2pX, 1e-7),
            Err(Error::ShapeMismatch(_))
        ));
        let avc = average_out_state(&ch);
        assert!(matches!(
            sym_margin(&avc, SymVariant::UGivenX, 1e-7),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            sym_margin(&avc, SymVariant::XS, 1e-7),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn jammer_controls_output() {
        let avc = AVChannel::from_nested(&[
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ])
        .unwrap();
        let rep = sym_margin(&avc, SymVariant::P2pX, 1e-7).unwrap();
        assert!(rep.symmetrizable);
    }
}
