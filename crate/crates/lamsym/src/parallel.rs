//! Batch evaluation. Checks on distinct claims are independent, so a batch
//! maps over its items in parallel when the `parallel` feature is on (the
//! default) and falls back to a plain sequential map otherwise. Result
//! order always matches input order.

/// Run `op` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn run_batch<I, O, F>(items: Vec<I>, op: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(op).collect()
}

/// Run `op` over `items`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn run_batch<I, O, F>(items: Vec<I>, op: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Sync + Send,
{
    run_batch_seq(items, op)
}

/// Sequential variant, kept unconditionally so the two strategies can be
/// compared on the same build.
pub fn run_batch_seq<I, O, F>(items: Vec<I>, op: F) -> Vec<O>
where
    F: Fn(I) -> O,
{
    items.into_iter().map(op).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let squares = run_batch((0..100).collect(), |i: i64| i * i);
        assert_eq!(squares, (0..100).map(|i| i * i).collect::<Vec<_>>());
        let seq = run_batch_seq((0..100).collect(), |i: i64| i * i);
        assert_eq!(squares, seq);
    }
}
