//! Scalars, tensors and the q-deformed geometry of tensor powers.

mod scalar;
mod space;
mod tensor;

pub use scalar::{parse_rational, GaussRat, QPoly, Scalar};
pub use space::{conjugate_i, conjugate_j, GramCache, QSpace, DEFAULT_CEILING};
pub use tensor::{digits, flat_index, pow, LinMap, Residual, Tensor};
