//! The Fourier catalogs are derived by substitution; compare them with the
//! closed forms written out case by case.

use cohomlab::models::catalog::{variables, DUAL_VAR};
use cohomlab::models::{realize, GeneratorId, ModelSpec};
use cohomlab::weyl::scalar::{q_frac, Scalar};
use cohomlab::weyl::{OperatorPoly, VarSet};

struct Ops {
    vars: VarSet,
    n: usize,
    a: usize,
}

impl Ops {
    fn x(&self, k: usize) -> OperatorPoly {
        if k == 0 {
            OperatorPoly::one(&self.vars)
        } else {
            OperatorPoly::var(&self.vars, &format!("x{k}"))
        }
    }
    fn d(&self, k: usize) -> OperatorPoly {
        OperatorPoly::deriv(&self.vars, &format!("x{k}"))
    }
    fn w(&self) -> OperatorPoly {
        OperatorPoly::var(&self.vars, DUAL_VAR)
    }
    fn dw(&self) -> OperatorPoly {
        OperatorPoly::deriv(&self.vars, DUAL_VAR)
    }
    fn c(&self, shift: i64) -> OperatorPoly {
        let s = &(&Scalar::rational(q_frac(self.n as i64, 2)) + &Scalar::nu()) + &Scalar::int(shift);
        OperatorPoly::scalar(&self.vars, s)
    }
    fn one(&self) -> OperatorPoly {
        OperatorPoly::one(&self.vars)
    }
    fn euler(&self, k: usize) -> OperatorPoly {
        &self.x(k) * &self.d(k)
    }
    fn weuler(&self) -> OperatorPoly {
        &self.w() * &self.dw()
    }
    fn others(&self, from: usize) -> OperatorPoly {
        let mut s = OperatorPoly::zero(&self.vars);
        for k in from..self.n {
            if k != self.a {
                s = &s + &self.euler(k);
            }
        }
        s
    }
    fn i(&self, op: OperatorPoly) -> OperatorPoly {
        op.scale(&Scalar::i())
    }

    fn x_hat(&self, l: usize) -> OperatorPoly {
        let a = self.a;
        if l == 1 && a == 1 {
            &(&self.c(-2) - &self.weuler().scale(&Scalar::int(2))) + &self.others(2)
        } else if l == 1 {
            &(&(&self.c(-1) + &self.euler(1).scale(&Scalar::int(2))) - &self.weuler()) + &self.others(2)
        } else if a == l - 1 {
            &(&self.one() + &self.weuler()) + &self.euler(l)
        } else if a == l {
            -(&(&self.one() + &self.euler(l - 1)) + &self.weuler())
        } else {
            &self.euler(l) - &self.euler(l - 1)
        }
    }

    fn u_hat(&self, l: usize, m: usize) -> OperatorPoly {
        let a = self.a;
        if l == 1 {
            if a == m - 1 {
                let v0 = &self.dw().scale(&{
                    let c = self.c(-2);
                    c.as_scalar().unwrap()
                }) - &(&self.w() * &OperatorPoly::deriv_pow(&self.vars, DUAL_VAR, 2));
                self.i(&v0 + &(&self.dw() * &self.others(1)))
            } else {
                &(&(&self.c(-1) - &self.weuler()) * &self.x(m - 1)) + &(&self.x(m - 1) * &self.others(1))
            }
        } else if a == m - 1 {
            self.i(-(&self.dw() * &self.d(l - 1)))
        } else if a == l - 1 {
            self.i(-(&self.w() * &self.x(m - 1)))
        } else {
            -(&self.x(m - 1) * &self.d(l - 1))
        }
    }
}

#[test]
fn fourier_catalog_matches_closed_forms() {
    for n in 2..=4 {
        for a in 1..n {
            let spec = ModelSpec::ind_p_fourier(n, a);
            let ops = Ops {
                vars: variables(&spec).unwrap(),
                n,
                a,
            };
            for l in 1..n {
                assert_eq!(
                    realize(&spec, GeneratorId::Diag(l)).unwrap(),
                    ops.x_hat(l),
                    "X{l} n={n} a={a}"
                );
            }
            for l in 1..=n {
                for m in 1..=n {
                    if l == m {
                        continue;
                    }
                    assert_eq!(
                        realize(&spec, GeneratorId::Unip(l, m)).unwrap(),
                        ops.u_hat(l, m),
                        "u{l},{m} n={n} a={a}"
                    );
                }
            }
        }
    }
}

#[test]
fn printed_u1m_factor_would_break_brackets() {
    // With the extra factor i on û_{1,m} (a ≠ m−1), [û_{1,m}, û_{m,1}] is no
    // longer the diagonal field the matrix bracket demands.
    let spec = ModelSpec::ind_p_fourier(3, 1);
    let u13 = realize(&spec, GeneratorId::Unip(1, 3)).unwrap();
    let u31 = realize(&spec, GeneratorId::Unip(3, 1)).unwrap();
    let h = &realize(&spec, GeneratorId::Diag(1)).unwrap() + &realize(&spec, GeneratorId::Diag(2)).unwrap();
    assert_eq!(u13.commutator(&u31), h);
    let wrong = u13.scale(&Scalar::i());
    assert_ne!(wrong.commutator(&u31), h);
}
