use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register of {0} qubits exceeds the configured maximum of {1}")]
    TooManyQubits(usize, usize),
    #[error("a register needs at least one qubit")]
    EmptyRegister,
    #[error("basis index {index} does not fit in {n} qubits")]
    BasisIndex { index: usize, n: usize },
    #[error("invalid bitstring {0:?}")]
    InvalidBitstring(String),
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix dimension {got} does not match the expected {expected}")]
    MatrixDimension { expected: usize, got: usize },
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("gate arity {gate} does not match {targets} target qubits")]
    ArityMismatch { gate: usize, targets: usize },
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("forced outcome {outcome} on qubit {qubit} has probability {probability:.3e}")]
    ImpossibleOutcome {
        qubit: usize,
        outcome: u8,
        probability: f64,
    },
    #[error("forced outcome list has {got} bits, expected {expected}")]
    ForcedLength { expected: usize, got: usize },
    #[error("subsystem must be a nonempty proper subset of the register")]
    InvalidBipartition,
    #[error("qubits {0:?} are entangled with the rest of the register")]
    NotProduct(Vec<usize>),
    #[error("gate is not Clifford")]
    NotClifford,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid coupling model: {0}")]
    InvalidModel(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("module index {0} out of range")]
    ModuleOutOfRange(usize),
    #[error("edge ({0}, {1}) has zero effective coupling")]
    ZeroCoupling(usize, usize),
    #[error("state leaves the logical code space (leaked weight {0:.3e})")]
    OutsideCodeSpace(f64),
    #[error("memory qubit {0} is not in |0>")]
    MemoryNotReset(usize),
    #[error("invalid register map: {0}")]
    InvalidRegisterMap(String),
    #[error("resource precondition violated: {0}")]
    Resource(String),
    #[error("rotation mask must have weight >= 2, got {0}")]
    MaskWeight(usize),
    #[error("no induction strategy for {0}")]
    NoStrategy(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
