//! The tensor of value domains: `A ⊙ B = A + B + A×B`.

/// A value of the tensor domain `A ⊙ B`: an event on the left wire, on the
/// right wire, or simultaneously on both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorValue<A, B> {
    Left(A),
    Right(B),
    Both(A, B),
}

impl<A, B> TensorValue<A, B> {
    pub fn left(&self) -> Option<&A> {
        match self {
            TensorValue::Left(a) | TensorValue::Both(a, _) => Some(a),
            TensorValue::Right(_) => None,
        }
    }

    pub fn right(&self) -> Option<&B> {
        match self {
            TensorValue::Right(b) | TensorValue::Both(_, b) => Some(b),
            TensorValue::Left(_) => None,
        }
    }
}
