"""Central constants for prodnorm messages, defaults and exit codes."""

# Seesaw defaults
DEFAULT_RESTARTS: int = 16
DEFAULT_MAX_ITERS: int = 500
DEFAULT_TOL: float = 1e-9
DEFAULT_SEED: int = 0

# Resource limits
DEFAULT_DIM_CAP: int = 256
DEFAULT_STATE_CAP: int = 131072
DEFAULT_DENSE_BYTES_CAP: int = 256 * 1024 * 1024
DEFAULT_ENUMERATION_BUDGET: int = 1 << 20
ENV_DIM_CAP: str = "PRODNORM_DIM_CAP"

# Numerical tolerances
UNITARY_ATOL: float = 1e-10
SCHMIDT_CUTOFF: float = 1e-12
TIE_TOL: float = 1e-12
PROBABILITY_SLACK: float = 1e-10
CONSISTENCY_TOL: float = 1e-9
CONSISTENCY_ROUNDS: int = 8

# Output formatting
SIGNIFICANT_DIGITS: int = 10

# CLI exit codes
EXIT_OK: int = 0
EXIT_VALIDATION: int = 1
EXIT_RESOURCE: int = 2
EXIT_REPRO_FAILED: int = 3

# Packaged assets
SAMPLE_PACKAGE: str = "prodnorm.assets"
SAMPLE_YAML_FILENAME: str = "prodnorm.sample.yaml"
TEMPLATES_PACKAGE: str = "prodnorm.templates"
TPL_REPRO_REPORT: str = "repro_report.md.j2"

# CLI messages
MSG_HEALTH_OK: str = "prodnorm: ok"
MSG_HEALTH_ERR: str = "prodnorm: error - {err}"
MSG_CONFIG_CREATED: str = "Created {path}"
MSG_CONFIG_EXISTS: str = "Config already exists: {path} (use --force to overwrite)"
MSG_REPORT_WRITTEN: str = "Wrote report to {path}"
MSG_USAGE: str = "Usage: prodnorm [OPTIONS] COMMAND [ARGS]... (try --help)"
PANEL_REPRO: str = "repro: {passed}/{total} passed"

# Linear algebra errors
ERR_NON_FINITE: str = "matrix has non-finite entries"
ERR_NOT_SQUARE: str = "expected a square matrix, got shape {shape}"
ERR_FACTOR_MISMATCH: str = "factors {factors} do not multiply to dimension {dim}"
ERR_TRACED_INDEX: str = "traced index {index} out of range for {count} factors"
ERR_VECTOR_LENGTH: str = "vector of length {length} does not match {d1}x{d2}"
ERR_KRON_OVERFLOW: str = "kron result {rows}x{cols} exceeds platform limits"
ERR_SHAPE_MISMATCH: str = "shape mismatch: {left} vs {right}"
ERR_POSITIVE: str = "{name} must be a positive integer, got {value}"

# Superoperator errors
ERR_ACTION_SHAPE: str = "action must hold {count} images of size {dim}x{dim}, got {shape}"
ERR_DIM_CAP: str = "{what} of {value} exceeds cap {cap} (set {env} to raise it)"
ERR_STATE_CAP: str = "{what} of {value} exceeds state cap {cap}"
ERR_DENSE_CAP: str = "a dense {rows}x{cols} matrix needs {size} bytes, above cap {cap}"
ERR_SQUARE_PART: str = "swap witness needs a square partition, got ({d1}, {d2})"
ERR_EMBED: str = "cannot embed ancilla {n_from} into smaller ancilla {n_to}"
ERR_NS_ORDER: str = "ancilla sizes must be ascending, got {ns}"

# Game errors
ERR_SPEC_DIMS: str = "{name} has shape {shape}, expected {dim}x{dim}"
ERR_SPEC_UNITARY: str = "{name} is not unitary within {atol}"
ERR_SPEC_PROJECTOR: str = "{name} is not a Hermitian projector within {atol}"
ERR_STRATEGY_UNITARY: str = "strategy {name} is not unitary within {atol}"
ERR_STRATEGY_NORM: str = "strategy psi has norm {norm}, expected 1"
ERR_DISTRIBUTION: str = "question distribution sums to {total}, expected 1"
ERR_PREDICATE_SHAPE: str = "predicate has shape {shape}, expected {expected}"
ERR_ENUMERATION: str = "brute force needs {count} strategies, above budget {budget}"
ERR_RANDOM_SPEC: str = "random specs need d_v >= 2 for an accept register, got {d_v}"

# Config / IO errors
ERR_CONFIG_NOT_FOUND: str = "config not found: {path}"
ERR_INVALID_CONFIGURATION: str = "invalid configuration: {err}"
ERR_INVALID_ENV: str = "{env} must be a positive integer, got {value!r}"
ERR_INPUT_NOT_FOUND: str = "input file not found: {path}"
ERR_INVALID_JSON: str = "invalid {kind} JSON in {path}: {err}"
ERR_MATRIX_DATA: str = "matrix data has {length} entries, expected {rows}x{cols}"
ERR_UNKNOWN_CASE: str = "unknown repro case: {case}. Known: {known}"
ERR_INVALID_NS: str = "--ns must be comma-separated integers, got {ns!r}"
ERR_UNKNOWN_ANCHOR: str = "unknown repro anchor: {anchor}"
ERR_UNKNOWN_BUILTIN: str = "unknown builtin game: {name}. Known: chsh, magicsquare"
ERR_REPRO_FAILED: str = "{failed} repro check(s) failed"
