"""Rank-r completion of a masked lifted matrix by alternating lp minimization.

Given lifted data Z and its observation mask, the solver minimizes

    f_p(U, V) = sum over observed (ii, jj) of |Z[ii, jj] - u_ii @ v_jj|**p

over U in C^{(M*n1) x r} and V in C^{r x n2}, alternating a sweep over the
columns of V with a sweep over the rows of U.  Each sweep splits into
independent small subproblems: column jj of V sees only the observed rows
I_jj, row ii of U only the observed columns J_ii.  For p = 2 each subproblem
is a least-squares solve; for p = 1 it is solved by iteratively reweighted
least squares (IRLS) with weights 1 / max(|residual|, eps), residuals taken
in complex modulus.

The p = 1 sweeps keep the previous row/column whenever the IRLS candidate
would increase that subproblem's l1 objective, so the objective trace is
nonincreasing by construction even though IRLS is inexact.

Channel-failure masks make whole M-row blocks of the lifted mask identical,
so row subproblems are grouped by identical observed-column sets and solved
as one batch of tiny normal-equation systems; this is the same minimizer as
the real-embedded weighted least squares, just computed in complex form.
"""

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralMaskError, ValidationError
from .hankel import LiftedMask, LiftedMatrix, default_n1, lift, lift_mask, unlift
from .simulate import MeasurementMatrix

__all__ = [
    "PNorm",
    "SolverOptions",
    "FactorPair",
    "ResidualReport",
    "embed_real",
    "solve_ls_subproblem",
    "solve_l1_subproblem",
    "update_V",
    "update_U",
    "alternate_minimize",
    "complete",
    "sap_baseline",
    "sap_iterates",
]

_SV_CUTOFF = 1e-10  # relative singular-value cutoff for rank-deficient solves


class PNorm(enum.Enum):
    L1 = "L1"
    L2 = "L2"


@dataclass(frozen=True)
class SolverOptions:
    """Completion-solver settings; defaults follow the ten-iteration regime."""

    p: PNorm = PNorm.L1
    rank: int = 2
    outer_iters: int = 10
    irls_iters: int = 20
    irls_epsilon: float = 1e-6
    rel_tol: float = 1e-6
    rng_seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise ValidationError(f"rank={self.rank} must be >= 1")
        if self.outer_iters < 1 or self.irls_iters < 1:
            raise ValidationError("iteration counts must be >= 1")
        if self.irls_epsilon <= 0 or self.rel_tol <= 0:
            raise ValidationError("tolerances must be positive")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValidationError("rng_seed must fit in an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {
            "p": self.p.value,
            "rank": self.rank,
            "outer_iters": self.outer_iters,
            "irls_iters": self.irls_iters,
            "irls_epsilon": self.irls_epsilon,
            "rel_tol": self.rel_tol,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolverOptions":
        known = {"p", "rank", "outer_iters", "irls_iters", "irls_epsilon",
                 "rel_tol", "rng_seed"}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown solver keys: {sorted(unknown)}")
        kwargs = dict(d)
        if "p" in kwargs:
            try:
                kwargs["p"] = PNorm(kwargs["p"])
            except ValueError:
                raise ValidationError(
                    f"p must be 'L1' or 'L2', got {d['p']!r}") from None
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SolverOptions":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class FactorPair:
    u: np.ndarray  # (m*n1, r)
    v: np.ndarray  # (r, n2)

    @property
    def product(self) -> np.ndarray:
        return self.u @ self.v


@dataclass
class ResidualReport:
    """Objective/error traces of one alternating-minimization run.

    ``objective_after_v[k]`` and ``objective_after_u[k]`` hold the masked
    lp objective after the V-sweep and U-sweep of outer iteration k; the
    interleaved sequence is nonincreasing.  ``nrmse`` is filled only when a
    ground-truth matrix was supplied.
    """

    p: PNorm
    objective_after_v: list = field(default_factory=list)
    objective_after_u: list = field(default_factory=list)
    nrmse: list = field(default_factory=list)
    n_degenerate: int = 0

    @property
    def n_iters(self) -> int:
        return len(self.objective_after_u)

    def objective_sequence(self) -> list:
        out = []
        for fv, fu in zip(self.objective_after_v, self.objective_after_u):
            out.extend((fv, fu))
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("iter,objective,nrmse\n")
            for k in range(self.n_iters):
                nr = self.nrmse[k] if k < len(self.nrmse) else float("nan")
                fh.write(f"{k + 1},{self.objective_after_u[k]:.17g},{nr:.17g}\n")


# ------------------------------------------------------------ subproblems

def embed_real(b: np.ndarray, g: np.ndarray):
    """Real embedding of a complex linear system.

    Stacks b as [Re(b); Im(b)] and G as [[Re(G), -Im(G)], [Im(G), Re(G)]];
    solving the embedded system and recombining x[:r] + 1j*x[r:] gives
    exactly the complex solution, and the embedding preserves 2-norms.
    """
    b = np.asarray(b, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if b.ndim != 1 or g.ndim != 2 or g.shape[0] != b.shape[0]:
        raise ValidationError(f"inconsistent shapes b{b.shape}, G{g.shape}")
    b_r = np.concatenate([b.real, b.imag])
    g_r = np.block([[g.real, -g.imag], [g.imag, g.real]])
    return b_r, g_r


def _lstsq_minnorm(g: np.ndarray, b: np.ndarray):
    """Minimum-norm least-squares solution(s) with a fixed rank cutoff."""
    sol, _, rank, _ = np.linalg.lstsq(g, b, rcond=_SV_CUTOFF)
    return sol, rank


def solve_ls_subproblem(b: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Minimize ||b - G v||_2; returns the pseudoinverse (min-norm) solution.

    Rank-deficient G falls back to the SVD pseudoinverse with singular values
    below 1e-10 * sigma_max discarded.
    """
    b = np.asarray(b, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if g.shape[0] != b.shape[0]:
        raise ValidationError(f"inconsistent shapes b{b.shape}, G{g.shape}")
    sol, _ = _lstsq_minnorm(g, b)
    return sol


def solve_l1_subproblem(b: np.ndarray, g: np.ndarray, n_irls: int = 20,
                        epsilon: float = 1e-6, rel_tol: float = 1e-6) -> np.ndarray:
    """Approximately minimize sum_i |b_i - g_i @ v| (complex moduli) by IRLS.

    Starts from the least-squares solution, then repeats weighted least
    squares with weight 1 / max(|residual_i|, epsilon) per complex residual,
    solved in the real embedding with both embedded rows of a residual
    sharing its weight.  Stops after n_irls iterations or when the relative
    change of v drops below rel_tol.
    """
    b = np.asarray(b, dtype=complex)
    g = np.asarray(g, dtype=complex)
    v = solve_ls_subproblem(b, g)
    b_r, g_r = embed_real(b, g)
    q = b.shape[0]
    for _ in range(n_irls):
        resid = np.abs(b - g @ v)
        w = 1.0 / np.maximum(resid, epsilon)
        sw = np.sqrt(np.concatenate([w, w]))
        sol, _ = _lstsq_minnorm(g_r * sw[:, None], b_r * sw)
        v_new = sol[: g.shape[1]] + 1j * sol[g.shape[1]:]
        done = np.linalg.norm(v_new - v) <= rel_tol * max(np.linalg.norm(v_new), 1e-300)
        v = v_new
        if done:
            break
    return v


def _irls_l1_batch(g: np.ndarray, b: np.ndarray, n_irls: int, epsilon: float,
                   rel_tol: float):
    """IRLS over a batch of l1 subproblems sharing the design matrix G.

    ``b`` has one subproblem per column.  Solves the weighted normal
    equations G^H diag(w) G v = G^H diag(w) b per column (identical minimizer
    to the real-embedded weighted least squares), freezing columns whose
    iterate has converged.  Returns (solutions, n_degenerate).
    """
    x, rank = _lstsq_minnorm(g, b)  # least-squares init, (r, ncols)
    ndeg = g.shape[1] - rank
    active = np.ones(x.shape[1], dtype=bool)
    gc = g.conj()
    gct = gc.T.copy()
    gpair = gc[:, :, None] * g[:, None, :]  # (q, r, r) row outer products
    for _ in range(n_irls):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[:, idx]
        ba = b[:, idx]
        w = 1.0 / np.maximum(np.abs(ba - g @ xa), epsilon)
        a = np.tensordot(w.T, gpair, axes=(1, 0))  # (nact, r, r) normal matrices
        rhs = (gct @ (w * ba)).T                   # (nact, r)
        try:
            x_new = np.linalg.solve(a, rhs[..., None])[..., 0].T  # (r, nact)
        except np.linalg.LinAlgError:
            x_new = np.empty_like(xa)
            for c, col in enumerate(idx):
                sw = np.sqrt(w[:, c])
                x_new[:, c], _ = _lstsq_minnorm(g * sw[:, None], b[:, col] * sw)
        step = np.linalg.norm(x_new - xa, axis=0)
        scale = np.maximum(np.linalg.norm(x_new, axis=0), 1e-300)
        x[:, idx] = x_new
        active[idx[step <= rel_tol * scale]] = False
    return x, ndeg


def _l1_col_objectives(g: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.abs(b - g @ x).sum(axis=0)


def _keep_better_l1(g, b, x_new, x_prev):
    """Per-column safeguard: keep the previous iterate when IRLS lost ground."""
    worse = _l1_col_objectives(g, b, x_new) > _l1_col_objectives(g, b, x_prev)
    if np.any(worse):
        x_new = x_new.copy()
        x_new[:, worse] = x_prev[:, worse]
    return x_new


# ------------------------------------------------------------ sweeps

def _row_groups(mask: LiftedMask):
    """Group lifted rows that observe the same column set."""
    patterns, inverse = np.unique(mask.omega, axis=0, return_inverse=True)
    return [(np.flatnonzero(inverse == gi), np.flatnonzero(patterns[gi]))
            for gi in range(patterns.shape[0])]


def update_V(z_obs: np.ndarray, mask: LiftedMask, u: np.ndarray,
             options: SolverOptions, prev: np.ndarray = None):
    """Solve every column subproblem of V given fixed U.

    Column jj minimizes ||b_I - U_I v||_p over its observed rows I = I_jj.
    Returns (V, n_degenerate); degenerate columns are those whose design
    matrix U_I was rank-deficient.
    """
    r = options.rank
    n2 = mask.omega.shape[1]
    v = np.empty((r, n2), dtype=complex)
    ndeg = 0
    for jj, rows in enumerate(mask.col_sets):
        g = u[rows, :]
        b = z_obs[rows, jj]
        if options.p is PNorm.L2:
            sol, rank = _lstsq_minnorm(g, b)
            ndeg += int(rank < r)
        else:
            sol, nd = _irls_l1_batch(g, b[:, None], options.irls_iters,
                                     options.irls_epsilon, options.rel_tol)
            ndeg += nd
            if prev is not None:
                sol = _keep_better_l1(g, b[:, None], sol, prev[:, jj][:, None])
            sol = sol[:, 0]
        v[:, jj] = sol
    return v, ndeg


def update_U(z_obs: np.ndarray, mask: LiftedMask, v: np.ndarray,
             options: SolverOptions, prev: np.ndarray = None):
    """Solve every row subproblem of U given fixed V (mirror of update_V).

    Row ii minimizes ||b_J - V_J^T u||_p over its observed columns J = J_ii.
    Rows sharing an observed-column set are solved as one batch.
    """
    r = options.rank
    mn1 = mask.omega.shape[0]
    u = np.empty((mn1, r), dtype=complex)
    ndeg = 0
    for rows, cols in _row_groups(mask):
        g = v[:, cols].T                      # (|J|, r)
        b = z_obs[np.ix_(rows, cols)].T       # (|J|, n_rows)
        if options.p is PNorm.L2:
            sol, rank = _lstsq_minnorm(g, b)
            ndeg += int(rank < r) * rows.size
        else:
            sol, nd = _irls_l1_batch(g, b, options.irls_iters,
                                     options.irls_epsilon, options.rel_tol)
            ndeg += nd
            if prev is not None:
                sol = _keep_better_l1(g, b, sol, prev[rows, :].T)
        u[rows, :] = sol.T
    return u, ndeg


def masked_objective(z_obs: np.ndarray, omega: np.ndarray, u: np.ndarray,
                     v: np.ndarray, p: PNorm) -> float:
    """lp objective over observed entries: sum |Z - UV|^p restricted to omega."""
    resid = np.abs((z_obs - u @ v)[omega])
    return float((resid ** 2).sum() if p is PNorm.L2 else resid.sum())


def _check_mask_solvable(mask: LiftedMask, rank: int) -> None:
    bad_cols = [jj for jj, s in enumerate(mask.col_sets) if s.size <= rank]
    bad_rows = [ii for ii, s in enumerate(mask.row_sets) if s.size <= rank]
    if bad_cols or bad_rows:
        raise StructuralMaskError(
            f"mask leaves {len(bad_cols)} lifted columns and {len(bad_rows)} "
            f"lifted rows with <= rank={rank} observations")


def alternate_minimize(z_obs: np.ndarray, mask: LiftedMask,
                       options: SolverOptions, m_true: np.ndarray = None,
                       early_stop: bool = True):
    """Alternate V- and U-sweeps from a random real init of U.

    Runs ``options.outer_iters`` iterations, stopping early once the relative
    change of the end-of-iteration objective falls below ``options.rel_tol``
    (disable for fixed-length traces).  When ``m_true`` (clean N x M matrix)
    is given, the report also records the per-iteration normalized RMSE of
    the unlifted estimate.

    Returns (FactorPair, ResidualReport).
    """
    z_obs = np.asarray(z_obs, dtype=complex)
    if z_obs.shape != mask.omega.shape:
        raise ValidationError(
            f"data shape {z_obs.shape} != mask shape {mask.omega.shape}")
    _check_mask_solvable(mask, options.rank)
    rng = np.random.default_rng(np.random.PCG64(options.rng_seed))
    mn1 = mask.omega.shape[0]
    u = (rng.standard_normal((mn1, options.rank)) / np.sqrt(options.rank)
         ).astype(complex)
    v = None
    report = ResidualReport(p=options.p)
    truth_norm = np.linalg.norm(m_true) if m_true is not None else None
    f_prev = None
    for _ in range(options.outer_iters):
        v, nd1 = update_V(z_obs, mask, u, options, prev=v)
        report.objective_after_v.append(
            masked_objective(z_obs, mask.omega, u, v, options.p))
        u, nd2 = update_U(z_obs, mask, v, options, prev=u)
        f_iter = masked_objective(z_obs, mask.omega, u, v, options.p)
        report.objective_after_u.append(f_iter)
        report.n_degenerate += nd1 + nd2
        if m_true is not None:
            est = unlift(LiftedMatrix(u @ v, mask.shape)).T
            report.nrmse.append(float(np.linalg.norm(est - m_true) / truth_norm))
        if early_stop and f_prev is not None:
            if abs(f_prev - f_iter) <= options.rel_tol * max(f_prev, 1e-300):
                break
        if early_stop and f_iter == 0.0:
            break
        f_prev = f_iter
    return FactorPair(u, v), report


# ------------------------------------------------------------ pipelines

def complete(measurement: MeasurementMatrix, options: SolverOptions,
             n1: int = None) -> np.ndarray:
    """Full completion pipeline: lift, mask analysis, alternate, unlift.

    Returns the recovered N x M matrix.  Only observed entries of the
    measurement influence the result; values stored at masked positions are
    ignored.  Raises StructuralMaskError when the mask is too thin for the
    requested rank.
    """
    x = np.asarray(measurement.x) * measurement.mask
    if n1 is None:
        n1 = default_n1(x.shape[1])
    lifted = lift(x, n1)
    mask = lift_mask(measurement.mask, n1)
    factors, _ = alternate_minimize(lifted.z, mask, options)
    est = unlift(LiftedMatrix(factors.product, mask.shape)).T
    if not np.all(np.isfinite(est)):
        raise StructuralMaskError("completion produced non-finite entries")
    return est


def sap_iterates(measurement: MeasurementMatrix, rank: int, n1: int = None):
    """Structured alternating projections, one completed N x M matrix per round.

    Each round applies (i) rank-r truncation by SVD, (ii) observed-data
    consistency, (iii) block-Hankel structure projection (unlift then lift),
    and yields the round's completion: the unlift of the rank-r truncation
    (yielding the post-reset iterate instead would re-inject raw noise at
    observed positions).  Deterministic given its inputs.
    """
    x = np.asarray(measurement.x) * measurement.mask
    if n1 is None:
        n1 = default_n1(x.shape[1])
    lifted = lift(x.astype(complex), n1)
    mask = lift_mask(measurement.mask, n1)
    omega = mask.omega
    z_data = lifted.z
    z = np.where(omega, z_data, 0.0)
    while True:
        su, sv, svh = np.linalg.svd(z, full_matrices=False)
        z_lr = (su[:, :rank] * sv[:rank]) @ svh[:rank, :]
        est = unlift(LiftedMatrix(z_lr, mask.shape))
        z = z_lr
        z[omega] = z_data[omega]
        z = lift(unlift(LiftedMatrix(z, mask.shape)), n1).z
        yield est.T


def sap_baseline(measurement: MeasurementMatrix, rank: int, iters: int = 10,
                 n1: int = None) -> np.ndarray:
    """Recovered N x M matrix after ``iters`` structured-projection rounds."""
    if iters < 1:
        raise ValidationError(f"iters={iters} must be >= 1")
    it = sap_iterates(measurement, rank, n1)
    for _ in range(iters):
        est = next(it)
    return est
