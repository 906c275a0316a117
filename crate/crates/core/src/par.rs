//! Feature-selected map over work items: rayon when the `parallel`
//! feature is enabled, a plain sequential loop otherwise. Output order
//! matches input order in both builds.

#[cfg(feature = "parallel")]
pub(crate) fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
