//! Side-by-side Frobenius structures from the Dolbeault and de Rham dGBV
//! algebras of one Kähler-type model.

use crate::frobenius::{triple_intersection, FrobeniusData};
use crate::hodge::HodgeData;
use crate::mc::{simultaneous_solve, solve, MCSolution, SimultaneousSolution, SolveOptions};

use super::kahler::BigradedModel;
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub order: u32,
    pub simultaneous: SimultaneousSolution,
    /// Independent solve of `dΓ + ½[Γ•Γ] = 0` with the `d`-Green operator.
    pub de_rham_solution: MCSolution,
    pub dolbeault_frobenius: FrobeniusData,
    pub de_rham_frobenius: FrobeniusData,
    pub gamma_equal: bool,
    pub metric_equal: bool,
    /// First `(i, j, k)` where the two `c_ijk` differ.
    pub tensor_discrepancy: Option<(usize, usize, usize)>,
    /// `c_ijk(0) = ∫ e_i∧e_j∧e_k` for both structures.
    pub origin_is_cup_product: bool,
    /// `c_ijk(0)` is real.
    pub real_at_origin: bool,
}

impl ComparisonReport {
    pub fn identical(&self) -> bool {
        self.gamma_equal && self.metric_equal && self.tensor_discrepancy.is_none()
    }
}

pub fn compare_structures(model: &BigradedModel, order: u32) -> Result<ComparisonReport, ModelError> {
    let simultaneous = simultaneous_solve(model, order)?;
    let sol = &simultaneous.solution;
    let dolbeault = model.dolbeault_dgbv()?;
    let de_rham = model.derham_dgbv()?;
    let hodge_d = HodgeData::new(model.basis(), de_rham.delta(), model.inner_product())?;
    let de_rham_solution = solve(&de_rham, &hodge_d, sol.classes(), &SolveOptions::with_order(order))?;
    let fd = FrobeniusData::new(&dolbeault, sol)?;
    let fr = FrobeniusData::new(&de_rham, &de_rham_solution)?;
    let n = fd.dim();
    let mut tensor_discrepancy = None;
    let mut origin_is_cup_product = true;
    let mut real_at_origin = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if tensor_discrepancy.is_none() && fd.c(i, j, k) != fr.c(i, j, k) {
                    tensor_discrepancy = Some((i, j, k));
                }
                let cup = triple_intersection(&dolbeault, sol, i, j, k);
                let cup_r = triple_intersection(&de_rham, &de_rham_solution, i, j, k);
                origin_is_cup_product &= fd.at_origin(i, j, k) == cup && fr.at_origin(i, j, k) == cup_r;
                real_at_origin &= fd.at_origin(i, j, k).is_real() && fr.at_origin(i, j, k).is_real();
            }
        }
    }
    Ok(ComparisonReport {
        order,
        gamma_equal: sol.gamma() == de_rham_solution.gamma(),
        metric_equal: fd.metric() == fr.metric(),
        tensor_discrepancy,
        origin_is_cup_product,
        real_at_origin,
        dolbeault_frobenius: fd,
        de_rham_frobenius: fr,
        de_rham_solution,
        simultaneous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_structures_agree() {
        let r = compare_structures(&BigradedModel::complex_torus(1), 3).unwrap();
        assert!(r.identical());
        assert!(r.origin_is_cup_product);
        assert!(r.real_at_origin);
        assert!(r.simultaneous.all_hold());
    }
}
