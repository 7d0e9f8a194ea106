use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model or command parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A dense representation would exceed the configured size cap.
    #[error("resource cap exceeded: {what} needs dimension {dim}, cap is {cap}")]
    Resource {
        what: &'static str,
        dim: usize,
        cap: usize,
    },

    #[error("eigensolver failed on a {dim}x{dim} matrix: {detail}")]
    Solver { dim: usize, detail: String },

    /// A manifold's bounding gap closed somewhere on the twist (or k) grid.
    #[error(
        "topology undefined: gap {gap:.3e} below threshold {threshold:.3e} at theta = ({theta_x:.6}, {theta_y:.6})"
    )]
    GapClosed {
        theta_x: f64,
        theta_y: f64,
        gap: f64,
        threshold: f64,
    },

    /// A link overlap is too close to singular to be unitarized.
    #[error(
        "grid too coarse: overlap singular value {sigma_min:.3e} between grid points ({ix}, {iy}) and its neighbour"
    )]
    GridTooCoarse {
        ix: usize,
        iy: usize,
        sigma_min: f64,
    },

    #[error("winding not converged: raw {raw:.6} vs integer {rounded} ({detail})")]
    Refinement {
        raw: f64,
        rounded: i64,
        detail: String,
    },

    #[error("steady state is not unique: {count} eigenvalues with |Re λ| <= {tol:.3e}")]
    NotUnique { count: usize, tol: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for command-line front ends.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Empty(_) => 2,
            Error::GapClosed { .. }
            | Error::GridTooCoarse { .. }
            | Error::Refinement { .. }
            | Error::NotUnique { .. }
            | Error::Solver { .. } => 3,
            Error::Resource { .. } => 4,
            Error::Io(_) => 1,
        }
    }
}
