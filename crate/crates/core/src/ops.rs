/// Minimal multiplication context shared by finite groups, integer matrix
/// groups and automorphism groups.
pub trait GroupOps {
    type Elem: Clone + Ord + std::hash::Hash + std::fmt::Debug;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Elem;
}
