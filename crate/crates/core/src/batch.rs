//! Data-parallel evaluation with an order-preserving merge.
//!
//! With the `parallel` feature, [`Execution::Parallel`] maps over rayon's
//! global pool; without it every execution is sequential. Results are
//! returned in input order either way, so output never depends on scheduling.

use crate::error::Result;
use crate::singularity::{scan_ray_with, ConjugateRecord, StructureAdapter, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether work actually runs on several threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map_ordered<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// [`scan_ray_with`] over many directions; entry `i` belongs to `directions[i]`.
pub fn scan_rays<A: StructureAdapter + ?Sized>(
    adapter: &A,
    directions: &[Vec<f64>],
    s_max: f64,
    tol: &Tolerances,
    exec: Execution,
) -> Vec<Result<Vec<ConjugateRecord>>> {
    map_ordered(directions, exec, |d| scan_ray_with(adapter, d, s_max, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularity::Su2Adapter;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map_ordered(&xs, Execution::Parallel, |x| x * x);
        let b = map_ordered(&xs, Execution::Sequential, |x| x * x);
        assert_eq!(a, b);
    }

    #[test]
    fn parallel_scan_matches_sequential() {
        let dirs: Vec<Vec<f64>> = (0..16)
            .map(|i| {
                let t = i as f64 * 0.4;
                vec![t.cos(), t.sin(), 0.3 * t - 1.0]
            })
            .collect();
        let tol = Tolerances::default();
        let a = scan_rays(&Su2Adapter, &dirs, 20.0, &tol, Execution::Parallel);
        let b = scan_rays(&Su2Adapter, &dirs, 20.0, &tol, Execution::Sequential);
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.as_ref().unwrap().len() == 5));
    }
}
