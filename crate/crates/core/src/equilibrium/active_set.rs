use super::{rsg_flow, wcc_gap, EquilibriumResult};
use crate::error::{Error, Result};
use crate::game::{GameSpec, LoadState, Path};

/// Exact WCC equilibrium of an affine resource selection game with common
/// uncertainty `r`, by water-filling.
///
/// Used links satisfy `r a_e s_e + b_e = level`; links with `b_e >= level`
/// stay empty. Constant links (`a_e = 0`) cap the level at their intercept
/// and absorb whatever mass the rising links do not take; the lowest-index
/// constant link among ties gets it.
pub fn solve_rsg_wcc_active_set(spec: &GameSpec, r: f64) -> Result<EquilibriumResult> {
    if !spec.is_rsg() {
        return Err(Error::NotAnRsg);
    }
    if !(r >= 1.0) {
        return Err(Error::OutOfRange { what: "r", value: r });
    }
    let ab = spec.require_affine()?;
    let n = spec.total_mass();

    let cap = ab
        .iter()
        .enumerate()
        .filter(|(_, &(a, _))| a == 0.0)
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1));

    let mut rising: Vec<usize> = (0..ab.len()).filter(|&e| ab[e].0 > 0.0).collect();
    rising.sort_by(|&x, &y| ab[x].1.total_cmp(&ab[y].1).then(x.cmp(&y)));

    // Level reached when all mass goes to the rising links.
    let mut level = f64::INFINITY;
    let (mut inv, mut weighted) = (0.0, 0.0);
    for (k, &e) in rising.iter().enumerate() {
        let (a, b) = ab[e];
        inv += 1.0 / (r * a);
        weighted += b / (r * a);
        let candidate = (n + weighted) / inv;
        let next_b = rising.get(k + 1).map_or(f64::INFINITY, |&f| ab[f].1);
        if candidate <= next_b {
            level = candidate;
            break;
        }
    }

    let mut loads = vec![0.0; ab.len()];
    match cap {
        Some((c, &(_, b_cap))) if b_cap < level => {
            let mut used = 0.0;
            for &e in &rising {
                let (a, b) = ab[e];
                if b < b_cap {
                    loads[e] = (b_cap - b) / (r * a);
                    used += loads[e];
                }
            }
            loads[c] = (n - used).max(0.0);
        }
        _ => {
            for &e in &rising {
                let (a, b) = ab[e];
                if b < level {
                    loads[e] = (level - b) / (r * a);
                }
            }
            // Remove rounding drift so the flow conserves mass exactly.
            let total: f64 = loads.iter().sum();
            if total > 0.0 {
                for l in &mut loads {
                    *l *= n / total;
                }
            }
        }
    }

    let load = LoadState::new(loads)?;
    let flow = rsg_flow(spec, &load);
    let paths: Vec<Vec<Path>> = spec.commodities().iter().map(|_| (0..ab.len()).map(|e| Path(vec![e])).collect()).collect();
    let rvec = vec![r; paths.len()];
    let gap = wcc_gap(spec, &rvec, &paths, &flow, &load);
    let phi = spec.potential_r(&load, r)?;
    Ok(EquilibriumResult { flow, load, gap, iterations: 1, converged: true, history: vec![phi] })
}
