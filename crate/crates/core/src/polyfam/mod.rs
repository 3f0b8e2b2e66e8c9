//! Integer polynomials, primitive families, composition with tuples and the
//! shift/degeneracy machinery used to detect imprimitive compositions.

mod degeneracy;
mod family;
mod poly;
mod resultant;

pub use degeneracy::{
    composed_is_primitive, degeneracy_graph, shift_relations, DegeneracyEdge, DegeneracyGraph,
    ShiftRelation,
};
pub use family::{FamilyNu, PolyFamily, Primitivity, Violation};
pub use poly::IntPolynomial;
pub use resultant::{composed_resultant_product, resultant};
