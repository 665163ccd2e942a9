//! Independent naive oracle: direct double loops, Euler-criterion symbols,
//! trial-division factorization. Deliberately shares no code with the
//! library beyond the num rational types used to state expected values.

pub mod naive;
