use num_complex::Complex64;

/// Errors surfaced by the numerical routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A series acceleration or consistency check failed to reach tolerance.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// A closed-form transform was requested at one of its poles.
    #[error("pole at E = {0}")]
    Pole(Complex64),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A principal-value evaluation point is too close to the window edge,
    /// or the window itself is malformed.
    #[error("window error: {0}")]
    Window(String),

    /// The first two rows of the amplitude system are collinear; the
    /// amplitude vector is not determined by their cross product.
    #[error("collinear amplitude rows: |v1 x v2| = {ratio:.3e} of |v1||v2|")]
    Collinear { ratio: f64 },

    /// Phase tracking along a scan or contour could not be resolved.
    #[error("phase scan failure: {0}")]
    PhaseScan(String),

    /// The Jost function vanishes on a contour edge; perturb the rectangle.
    #[error("zero on contour boundary near E = {0}")]
    BoundaryZero(Complex64),

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenSweeps(usize),

    /// A quantity that must be a norm came out negative.
    #[error("negative norm: {0}")]
    NegativeNorm(f64),

    /// A term or size budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("bracketing failed: {0}")]
    Bracket(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
