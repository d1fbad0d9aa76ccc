use super::angular::{angular_momentum_ops, SpinQuantum};
use super::operator::{BasisLabel, OperatorMatrix};
use super::params::SpinSystemParams;
use super::stevens::stevens_operator;
use crate::error::{Error, Result};
use crate::units::{GHZ, MU_B_GHZ_PER_T};

/// Ligand-field part `α B₂⁰O₂⁰ + β(B₄⁰O₄⁰ + B₄⁴O₄⁴) + γ(B₆⁰O₆⁰ + B₆⁴O₆⁴)`, GHz.
pub fn ligand_field_hamiltonian(params: &SpinSystemParams) -> OperatorMatrix {
    let lf = &params.ligand;
    let j = params.j;
    let op = |k, q| stevens_operator(k, q, j).expect("supported Stevens operator");
    let terms = [
        (lf.alpha * lf.b20, op(2, 0)),
        (lf.beta * lf.b40, op(4, 0)),
        (lf.beta * lf.b44, op(4, 4)),
        (lf.gamma * lf.b60, op(6, 0)),
        (lf.gamma * lf.b64, op(6, 4)),
    ];
    terms
        .iter()
        .fold(OperatorMatrix::zeros(j.dim()), |acc, (c, o)| &acc + &o.scale(*c))
}

/// Electronic Hamiltonian (GHz) with the field `b_t` along the easy axis.
///
/// The tunnel splitting enters as a direct `|+J⟩ ↔ |−J⟩` coupling of
/// strength Δ/2, so each nuclear-spin-conserving crossing opens by Δ.
pub fn electronic_hamiltonian(params: &SpinSystemParams, b_t: f64) -> OperatorMatrix {
    let j = params.j;
    let n = j.dim();
    let ops = angular_momentum_ops(j);
    let zeeman = ops.jz.scale(params.hyperfine.g_j * MU_B_GHZ_PER_T * b_t);
    let half_gap = 0.5 * params.hyperfine.tunnel_splitting_hz / GHZ;
    let tunnel = OperatorMatrix::from_real_fn(n, |r, c| {
        if (r == 0 && c == n - 1) || (r == n - 1 && c == 0) {
            half_gap
        } else {
            0.0
        }
    });
    &(&ligand_field_hamiltonian(params) + &zeeman) + &tunnel
}

/// Product-basis labels for `J ⊗ I`, index `= i_J · dim(I) + i_I`.
pub fn product_basis(j: SpinQuantum, i: SpinQuantum) -> Vec<BasisLabel> {
    j.projections()
        .into_iter()
        .flat_map(|jz| i.projections().into_iter().map(move |m_i| BasisLabel { jz, m_i }))
        .collect()
}

/// Full spin Hamiltonian in GHz: electronic only (`2J+1`) or `⊗` nuclear.
pub fn build_hamiltonian(
    params: &SpinSystemParams,
    b_t: f64,
    include_nuclear: bool,
) -> Result<OperatorMatrix> {
    params.validate()?;
    if !b_t.is_finite() {
        return Err(Error::InvalidInput(format!("field must be finite, got {b_t}")));
    }
    let he = electronic_hamiltonian(params, b_t);
    if !include_nuclear {
        return Ok(he);
    }
    let hf = &params.hyperfine;
    let i = hf.nuclear_spin;
    let jo = angular_momentum_ops(params.j);
    let io = angular_momentum_ops(i);
    let id_j = OperatorMatrix::identity(params.j.dim());
    let id_i = OperatorMatrix::identity(i.dim());

    let hyperfine = &(&jo.jx.kron(&io.jx) + &jo.jy.kron(&io.jy)) + &jo.jz.kron(&io.jz);
    let iz2 = &io.jz * &io.jz;
    let quad = (&iz2 - &id_i.scale(i.casimir() / 3.0)).scale(hf.p_quad);

    let h = &(&he.kron(&id_i) + &hyperfine.scale(hf.a_hf)) + &id_j.kron(&quad);
    Ok(h.with_basis(product_basis(params.j, i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::params::{HyperfineParams, LigandFieldParams};
    use crate::units::K_B_GHZ_PER_K;

    fn axial_params() -> SpinSystemParams {
        SpinSystemParams {
            ligand: LigandFieldParams::default().axial(),
            hyperfine: HyperfineParams { tunnel_splitting_hz: 0.0, ..Default::default() },
            ..Default::default()
        }
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let p = SpinSystemParams::default();
        for b in [-0.05, 0.0, 0.0123, 1.0] {
            for nuc in [false, true] {
                let h = build_hamiltonian(&p, b, nuc).unwrap();
                assert!(h.hermitian_error() <= 1e-12 * h.max_abs());
                assert_eq!(h.dim(), if nuc { 52 } else { 13 });
            }
        }
    }

    #[test]
    fn axial_zero_field_eigenvectors_are_pure_jz() {
        let h = build_hamiltonian(&axial_params(), 0.0, false).unwrap();
        let (vals, vecs) = h.eigh();
        for k in 0..13 {
            let col = vecs.column(k);
            let max_w = col.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
            assert!(max_w > 1.0 - 1e-12, "eigenvector {k} is mixed");
        }
        // ground doublet |±6⟩ is degenerate
        assert!((vals[1] - vals[0]).abs() < 1e-9);
        let w_plus = vecs[(0, 0)].norm_sqr() + vecs[(0, 1)].norm_sqr();
        assert!(w_plus > 1.0 - 1e-12);
    }

    #[test]
    fn decoupled_nuclear_spectrum_is_fourfold() {
        let mut p = SpinSystemParams::default();
        p.hyperfine.a_hf = 0.0;
        p.hyperfine.p_quad = 0.0;
        let b = 0.02;
        let e13 = build_hamiltonian(&p, b, false).unwrap().eigenvalues();
        let e52 = build_hamiltonian(&p, b, true).unwrap().eigenvalues();
        let mut expect: Vec<f64> = e13.iter().flat_map(|e| [*e; 4]).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in e52.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-8 * b.abs().max(1.0));
        }
    }

    #[test]
    fn default_ligand_field_ground_gap_is_600_kelvin() {
        let p = axial_params();
        let h = build_hamiltonian(&p, 0.0, false).unwrap();
        let e = h.eigenvalues();
        let gap_k = (e[2] - e[0]) / K_B_GHZ_PER_K;
        assert!((gap_k - 600.0).abs() < 6.0, "gap = {gap_k} K");
    }

    #[test]
    fn energy_offset_shifts_spectrum_uniformly() {
        let h = build_hamiltonian(&SpinSystemParams::default(), 0.01, true).unwrap();
        let c = 123.456;
        let shifted = &h + &OperatorMatrix::identity(h.dim()).scale(c);
        for (a, b) in h.eigenvalues().iter().zip(shifted.eigenvalues()) {
            assert!((b - a - c).abs() < 1e-8);
        }
    }

    #[test]
    fn non_finite_field_rejected() {
        assert!(build_hamiltonian(&SpinSystemParams::default(), f64::NAN, false).is_err());
    }
}
