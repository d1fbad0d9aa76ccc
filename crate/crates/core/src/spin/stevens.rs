//! Operator-equivalent Stevens operators `O_k^q` for the C₄-symmetric
//! ligand field: `O₂⁰, O₄⁰, O₄⁴, O₆⁰, O₆⁴`.

use super::angular::{angular_momentum_ops, SpinQuantum};
use super::operator::OperatorMatrix;
use crate::error::{Error, Result};

pub const SUPPORTED: [(u32, u32); 5] = [(2, 0), (4, 0), (4, 4), (6, 0), (6, 4)];

pub fn stevens_operator(k: u32, q: u32, j: SpinQuantum) -> Result<OperatorMatrix> {
    let ops = angular_momentum_ops(j);
    let n = j.dim();
    let x = j.casimir();
    let id = OperatorMatrix::identity(n);
    let jz2 = &ops.jz * &ops.jz;
    let jz4 = &jz2 * &jz2;
    let jz6 = &jz4 * &jz2;

    let poly = |terms: &[(f64, &OperatorMatrix)]| {
        terms
            .iter()
            .fold(OperatorMatrix::zeros(n), |acc, (c, m)| &acc + &m.scale(*c))
    };

    let out = match (k, q) {
        (2, 0) => poly(&[(3.0, &jz2), (-x, &id)]),
        (4, 0) => poly(&[
            (35.0, &jz4),
            (-(30.0 * x - 25.0), &jz2),
            (3.0 * x * x - 6.0 * x, &id),
        ]),
        (4, 4) => (&ops.jplus.pow(4) + &ops.jminus.pow(4)).scale(0.5),
        (6, 0) => poly(&[
            (231.0, &jz6),
            (-(315.0 * x - 735.0), &jz4),
            (105.0 * x * x - 525.0 * x + 294.0, &jz2),
            (-5.0 * x * x * x + 40.0 * x * x - 60.0 * x, &id),
        ]),
        (6, 4) => {
            let ladder = &ops.jplus.pow(4) + &ops.jminus.pow(4);
            let axial = poly(&[(11.0, &jz2), (-x - 38.0, &id)]);
            let half = &ladder * &axial;
            (&half + &half.adjoint()).scale(0.25)
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "unsupported Stevens operator O_{k}^{q}; expected one of {SUPPORTED:?}"
            )))
        }
    };
    Ok(out)
}

/// Stevens multiplicative factors α, β, γ of the ⁷F₆ ground multiplet of Tb³⁺.
pub mod tb3 {
    pub const ALPHA: f64 = -1.0 / 99.0;
    pub const BETA: f64 = 2.0 / 16335.0;
    pub const GAMMA: f64 = -1.0 / 891891.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn spin(j: f64) -> SpinQuantum {
        SpinQuantum::new(j).unwrap()
    }

    #[test]
    fn o20_vanishes_for_spin_half() {
        let o = stevens_operator(2, 0, spin(0.5)).unwrap();
        assert!(o.max_abs() < 1e-15);
    }

    #[test]
    fn o20_for_spin_one_matches_direct_evaluation() {
        let j = spin(1.0);
        let o = stevens_operator(2, 0, j).unwrap();
        for (i, m) in j.projections().into_iter().enumerate() {
            let expect = 3.0 * m * m - j.casimir();
            assert!((o.get(i, i).re - expect).abs() < 1e-14);
        }
        assert!((o.get(0, 0).re - 1.0).abs() < 1e-14);
        assert!((o.get(1, 1).re + 2.0).abs() < 1e-14);
    }

    #[test]
    fn axial_operators_match_closed_form_polynomials() {
        let j = spin(6.0);
        let x = j.casimir();
        let o40 = stevens_operator(4, 0, j).unwrap();
        let o60 = stevens_operator(6, 0, j).unwrap();
        for (i, m) in j.projections().into_iter().enumerate() {
            let m2 = m * m;
            let e40 = 35.0 * m2 * m2 - (30.0 * x - 25.0) * m2 + 3.0 * x * x - 6.0 * x;
            let e60 = 231.0 * m2 * m2 * m2 - (315.0 * x - 735.0) * m2 * m2
                + (105.0 * x * x - 525.0 * x + 294.0) * m2
                - 5.0 * x * x * x
                + 40.0 * x * x
                - 60.0 * x;
            assert!((o40.get(i, i).re - e40).abs() < 1e-9 * e40.abs().max(1.0));
            assert!((o60.get(i, i).re - e60).abs() < 1e-9 * e60.abs().max(1.0));
        }
    }

    #[test]
    fn o44_couples_only_delta_m_four_and_is_real_symmetric() {
        let j = spin(6.0);
        let o = stevens_operator(4, 4, j).unwrap();
        for r in 0..13 {
            for c in 0..13 {
                let z = o.get(r, c);
                assert!(z.im.abs() < 1e-12);
                assert!((z - o.get(c, r)).norm() < 1e-9);
                if (r as i64 - c as i64).abs() != 4 {
                    assert!(z.norm() < 1e-12, "({r},{c}) = {z}");
                }
            }
        }
        assert!(o.get(0, 4).norm() > 1.0);
    }

    #[test]
    fn all_supported_are_hermitian_and_c4_invariant() {
        for twice in [2u32, 3, 8, 12] {
            let j = SpinQuantum::from_twice(twice);
            let jz = super::super::angular::angular_momentum_ops(j).jz;
            let rot = jz.scale_c(C64::new(0.0, -std::f64::consts::FRAC_PI_2));
            // exp of a diagonal operator
            let r = OperatorMatrix::from_matrix(nalgebra::DMatrix::from_fn(j.dim(), j.dim(), |a, b| {
                if a == b {
                    rot.get(a, a).exp()
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
            for (k, q) in SUPPORTED {
                let o = stevens_operator(k, q, j).unwrap();
                assert!(o.hermitian_error() <= 1e-12 * o.max_abs().max(1.0));
                assert!(o.commutator(&r).max_abs() < 1e-10 * o.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn unsupported_pair_is_rejected() {
        assert!(stevens_operator(4, 2, spin(6.0)).is_err());
        assert!(stevens_operator(3, 0, spin(6.0)).is_err());
    }
}
