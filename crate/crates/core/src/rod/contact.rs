use super::{bending_couple, BoundaryConditions, EndKind, Loads, MaterialParams, RodState};
use crate::error::{Error, Result};
use crate::grid::{adiag, diff_first, Block, BlockTridiagonal, Vec2};

/// Assembles the linear boundary-value problem for the contact force.
///
/// Differentiating the compatibility condition `d_s upsilon = adiag omega`
/// in time and substituting both balance laws gives, per node,
///
/// `n_ss / rhoA + n / rhoI = adiag(m_s + l) / rhoI - f_s / rhoA`.
///
/// A free end imposes `n = 0`. A clamped end imposes
/// `n_s = -f + rhoA * dv/dt` with the prescribed end velocity `v`; its
/// one-sided stencil reaches two nodes inward, so the neighbouring interior
/// row is folded into it to keep the system block-tridiagonal.
pub fn assemble_contact_system(
    state: &RodState,
    params: &MaterialParams,
    loads: &Loads,
    bc: &BoundaryConditions,
    t: f64,
) -> Result<(BlockTridiagonal, Vec<Vec2>)> {
    let grid = state.grid;
    let n = grid.nodes();
    let h = grid.spacing();
    let (ra, ri) = (params.linear_density(), params.rotary_inertia());

    let m = bending_couple(state, params);
    let dm = diff_first(&m, h)?;
    let f = loads.force_field(&grid, t);
    let df = diff_first(&f, h)?;
    let l = loads.couple_field(&grid, t);

    let id = Block::identity();
    let off = id * (1.0 / (ra * h * h));
    let centre = id * (-2.0 / (ra * h * h) + 1.0 / ri);
    let mut system = BlockTridiagonal::zeros(n);
    let mut rhs = vec![Vec2::zeros(); n];
    for i in 1..n - 1 {
        system.set_row(i, off, centre, off);
        rhs[i] = adiag(dm[i] + l[i]) / ri - df[i] / ra;
    }

    let fold = 0.5 * h * ra;
    match &bc.base {
        EndKind::Free => system.set_row(0, Block::zeros(), id, Block::zeros()),
        EndKind::Clamped(motion) => {
            let target = motion.acceleration(t) * ra - f[0];
            system.set_row(0, Block::zeros(), -id / h, id * (1.0 / h + fold / ri));
            rhs[0] = target + rhs[1] * fold;
        }
    }
    match &bc.tip {
        EndKind::Free => system.set_row(n - 1, Block::zeros(), id, Block::zeros()),
        EndKind::Clamped(motion) => {
            let target = motion.acceleration(t) * ra - f[n - 1];
            system.set_row(n - 1, -id * (1.0 / h + fold / ri), id / h, Block::zeros());
            rhs[n - 1] = target - rhs[n - 2] * fold;
        }
    }
    Ok((system, rhs))
}

/// Contact force `n` at every node, see [`assemble_contact_system`].
pub fn solve_contact_force(
    state: &RodState,
    params: &MaterialParams,
    loads: &Loads,
    bc: &BoundaryConditions,
    t: f64,
) -> Result<Vec<Vec2>> {
    let (system, rhs) = assemble_contact_system(state, params, loads, bc, t)?;
    system.solve(&rhs).map_err(|e| match e {
        Error::Singular { row } => Error::Configuration(format!(
            "contact-force system is singular at node {row}; the rotary-to-linear inertia \
             ratio hits a resonance of the end conditions, or loads are incompatible \
             with two free ends"
        )),
        other => other,
    })
}
