"""Single-layer LSTM with a dense head and exact backpropagation.

Cell equations, with act the configured activation (the same activation
is applied at both nonlinear sites, so the stochastic BrownianReLU can
replace tanh everywhere it appears):

    f_t = sigmoid(W_f x_t + U_f h_{t-1} + b_f)
    i_t = sigmoid(W_i x_t + U_i h_{t-1} + b_i)
    o_t = sigmoid(W_o x_t + U_o h_{t-1} + b_o)
    c~_t = act(W_c x_t + U_c h_{t-1} + b_c)
    C_t = f_t * C_{t-1} + i_t * c~_t
    h_t = o_t * act(C_t)

The head is pred = W_y h_T + b_y, optionally through a sigmoid for
binary classification.  backward_bptt runs full backpropagation through
time on a recorded trace, differentiating the sampled function exactly:
stochastic activations are differentiated at the noise stored in their
forward caches, and dL/dalpha accumulates through backward_alpha at
both activation sites of every timestep.

Shapes follow the column convention: x_t is (d, B), h_t and C_t are
(n, B), predictions are (out, B).  B is the number of sequences pushed
through together and is 1 for single-sequence use.  Internally the four
gate blocks are stacked into single (4n, .) matrices so each timestep
costs two matrix products; parameters stay per-gate in LstmParams.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .activations import (ActivationCache, ActivationKind, backward_alpha,
                          backward_input, forward)
from .numerics import RngStream

PARAM_KEYS = ("w_f", "u_f", "b_f", "w_i", "u_i", "b_i",
              "w_c", "u_c", "b_c", "w_o", "u_o", "b_o",
              "w_y", "b_y")
_INIT_STREAM = 101
CHECKPOINT_VERSION = 1


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Stable in both tails.
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LstmParams:
    """All learnable state: per-gate weights, head weights, and alpha."""

    w_f: np.ndarray
    u_f: np.ndarray
    b_f: np.ndarray
    w_i: np.ndarray
    u_i: np.ndarray
    b_i: np.ndarray
    w_c: np.ndarray
    u_c: np.ndarray
    b_c: np.ndarray
    w_o: np.ndarray
    u_o: np.ndarray
    b_o: np.ndarray
    w_y: np.ndarray
    b_y: np.ndarray
    alpha: float = 0.25

    @property
    def input_dim(self) -> int:
        return self.w_f.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w_f.shape[0]

    @property
    def output_dim(self) -> int:
        return self.w_y.shape[0]

    def arrays(self) -> dict[str, np.ndarray]:
        """Array-valued parameters in fixed PARAM_KEYS order."""
        return {key: getattr(self, key) for key in PARAM_KEYS}

    def copy(self) -> "LstmParams":
        kw = {key: getattr(self, key).copy() for key in PARAM_KEYS}
        return LstmParams(alpha=self.alpha, **kw)


def init_params(input_dim: int, hidden_dim: int, output_dim: int,
                seed: int, alpha: float = 0.25) -> LstmParams:
    """Xavier-uniform weights, zero biases, forget bias 1.

    Weight matrices draw from U(-a, a) with a = sqrt(6 / (fan_in +
    fan_out)); the draw order is fixed (w then u per gate f, i, c, o,
    then the head) so a seed pins every entry.
    """
    if input_dim < 1 or hidden_dim < 1 or output_dim < 1:
        raise ValueError(
            f"dimensions must be positive, got ({input_dim}, {hidden_dim}, "
            f"{output_dim})"
        )
    stream = RngStream(seed, _INIT_STREAM)

    def xavier(rows: int, cols: int, fan_in: int, fan_out: int) -> np.ndarray:
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        return stream.uniform(-limit, limit, size=(rows, cols))

    d, n, out = input_dim, hidden_dim, output_dim
    kw: dict[str, np.ndarray] = {}
    for gate in ("f", "i", "c", "o"):
        kw[f"w_{gate}"] = xavier(n, d, d, n)
        kw[f"u_{gate}"] = xavier(n, n, n, n)
        kw[f"b_{gate}"] = np.zeros((n, 1))
    kw["b_f"] = np.ones((n, 1))
    kw["w_y"] = xavier(out, n, n, out)
    kw["b_y"] = np.zeros((out, 1))
    return LstmParams(alpha=float(alpha), **kw)


@dataclass
class _Stacked:
    # Gate rows: [f; i; o] (sigmoid block), then candidate c.
    w: np.ndarray
    u: np.ndarray
    b: np.ndarray


def _stack(params: LstmParams) -> _Stacked:
    return _Stacked(
        w=np.concatenate([params.w_f, params.w_i, params.w_o, params.w_c]),
        u=np.concatenate([params.u_f, params.u_i, params.u_o, params.u_c]),
        b=np.concatenate([params.b_f, params.b_i, params.b_o, params.b_c]),
    )


@dataclass
class StepTrace:
    """Everything one timestep's backward pass needs."""

    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    f: np.ndarray
    i: np.ndarray
    o: np.ndarray
    c_tilde: np.ndarray
    cand_cache: ActivationCache
    c: np.ndarray
    a: np.ndarray
    cell_cache: ActivationCache
    h: np.ndarray


@dataclass
class ForwardTrace:
    """Recorded forward pass over a whole sequence."""

    kind: ActivationKind
    head: str
    steps: list[StepTrace] = field(default_factory=list)
    prediction: np.ndarray | None = None

    def noise_plan(self) -> list[tuple[np.ndarray | None, np.ndarray | None]]:
        """Per-step (candidate, cell) noise, replayable via sequence_forward."""
        return [(s.cand_cache.zbar, s.cell_cache.zbar) for s in self.steps]


def _step(stacked: _Stacked, n: int, kind: ActivationKind, alpha: float,
          x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray,
          rng: RngStream | None, frozen: tuple | None,
          noise_mode: str) -> StepTrace:
    z = stacked.w @ x + stacked.u @ h_prev + stacked.b
    g = _sigmoid(z[:3 * n])
    f, i, o = g[:n], g[n:2 * n], g[2 * n:]
    zc_frozen = frozen[0] if frozen is not None else None
    c_frozen = frozen[1] if frozen is not None else None
    c_tilde, cand_cache = forward(kind, z[3 * n:], alpha, rng,
                                  frozen_zbar=zc_frozen,
                                  noise_mode=noise_mode)
    c = f * c_prev + i * c_tilde
    a, cell_cache = forward(kind, c, alpha, rng, frozen_zbar=c_frozen,
                            noise_mode=noise_mode)
    h = o * a
    return StepTrace(x=x, h_prev=h_prev, c_prev=c_prev, f=f, i=i, o=o,
                     c_tilde=c_tilde, cand_cache=cand_cache, c=c, a=a,
                     cell_cache=cell_cache, h=h)


def _as_column_batch(arr, rows: int, name: str = "timestep input") -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] != rows:
        raise ValueError(
            f"{name} shape {arr.shape} does not match expected row count "
            f"{rows}"
        )
    return arr


def cell_forward(params: LstmParams, x_t, h_prev, c_prev,
                 kind: ActivationKind, rng: RngStream | None = None,
                 noise_mode: str = "sample"):
    """One LSTM step.

    Arguments:
        x_t     input column(s), shape (d, B)
        h_prev  previous hidden state, shape (n, B)
        c_prev  previous cell state, shape (n, B)

    Returns:
        (h_t, c_t, step_trace)
    """
    x_t = _as_column_batch(x_t, params.input_dim)
    n = params.hidden_dim
    h_prev = _as_column_batch(h_prev, n, "hidden state")
    c_prev = _as_column_batch(c_prev, n, "cell state")
    if not (x_t.shape[1] == h_prev.shape[1] == c_prev.shape[1]):
        raise ValueError(
            f"batch sizes disagree: x {x_t.shape[1]}, h {h_prev.shape[1]}, "
            f"C {c_prev.shape[1]}"
        )
    trace = _step(_stack(params), n, kind, params.alpha, x_t, h_prev,
                  c_prev, rng, None, noise_mode)
    return trace.h, trace.c, trace


def sequence_forward(params: LstmParams, inputs, kind: ActivationKind,
                     rng: RngStream | None = None, head: str = "linear",
                     noise: list | None = None, noise_mode: str = "sample"):
    """Run a full sequence from zero initial state through the head.

    Arguments:
        inputs  (T, d) for one sequence or (T, d, B) for a batch
        head    'linear' for regression, 'sigmoid' for classification
        noise   optional per-step noise plan from ForwardTrace.noise_plan,
                replayed instead of drawing (frozen-noise evaluation)

    Returns:
        (prediction, trace) with prediction of shape (out, B).
    """
    if head not in ("linear", "sigmoid"):
        raise ValueError(f"unknown head '{head}'")
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim == 2:
        inputs = inputs[:, :, np.newaxis]
    if inputs.ndim != 3:
        raise ValueError(
            f"inputs must be (T, d) or (T, d, B), got shape {inputs.shape}"
        )
    t_len, d, batch = inputs.shape
    if t_len < 1:
        raise ValueError("sequence length must be at least 1")
    if d != params.input_dim:
        raise ValueError(
            f"input feature dim {d} does not match params input_dim "
            f"{params.input_dim}"
        )
    if noise is not None and len(noise) != t_len:
        raise ValueError(
            f"noise plan has {len(noise)} steps, sequence has {t_len}"
        )

    n = params.hidden_dim
    stacked = _stack(params)
    h = np.zeros((n, batch))
    c = np.zeros((n, batch))
    trace = ForwardTrace(kind=kind, head=head)
    for t in range(t_len):
        frozen = noise[t] if noise is not None else None
        step = _step(stacked, n, kind, params.alpha, inputs[t], h, c,
                     rng, frozen, noise_mode)
        trace.steps.append(step)
        h, c = step.h, step.c
    logit = params.w_y @ h + params.b_y
    prediction = _sigmoid(logit) if head == "sigmoid" else logit
    trace.prediction = prediction
    return prediction, trace


def backward_bptt(params: LstmParams, trace: ForwardTrace,
                  d_pred) -> dict[str, np.ndarray | float]:
    """Exact gradients of the traced forward pass.

    Arguments:
        d_pred  dL/dprediction, shape (out, B), matching trace.prediction

    Returns:
        dict with one entry per PARAM_KEYS name plus 'alpha'.  For a
        sigmoid head d_pred is taken with respect to the probability and
        chained through the sigmoid here.  Stochastic activations are
        differentiated at their cached noise, so these gradients match
        finite differences of the frozen-noise forward exactly.
    """
    if trace.prediction is None or not trace.steps:
        raise ValueError("trace does not contain a completed forward pass")
    d_pred = np.asarray(d_pred, dtype=np.float64)
    if d_pred.shape != trace.prediction.shape:
        raise ValueError(
            f"d_pred shape {d_pred.shape} does not match prediction shape "
            f"{trace.prediction.shape}"
        )
    kind = trace.kind
    n = params.hidden_dim
    stacked = _stack(params)

    if trace.head == "sigmoid":
        p = trace.prediction
        dlogit = d_pred * p * (1.0 - p)
    else:
        dlogit = d_pred
    h_last = trace.steps[-1].h
    grads: dict[str, np.ndarray | float] = {
        "w_y": dlogit @ h_last.T,
        "b_y": dlogit.sum(axis=1, keepdims=True),
    }
    dh = params.w_y.T @ dlogit
    dc = np.zeros_like(h_last)
    dw = np.zeros_like(stacked.w)
    du = np.zeros_like(stacked.u)
    db = np.zeros_like(stacked.b)
    dalpha = 0.0

    for step in reversed(trace.steps):
        do = dh * step.a
        da = dh * step.o
        dc = dc + backward_input(kind, step.cell_cache, da)
        if kind.has_alpha:
            dalpha += backward_alpha(kind, step.cell_cache, da)
        df = dc * step.c_prev
        di = dc * step.c_tilde
        dct = dc * step.i
        dzc = backward_input(kind, step.cand_cache, dct)
        if kind.has_alpha:
            dalpha += backward_alpha(kind, step.cand_cache, dct)
        dz = np.concatenate([
            df * step.f * (1.0 - step.f),
            di * step.i * (1.0 - step.i),
            do * step.o * (1.0 - step.o),
            dzc,
        ])
        dw += dz @ step.x.T
        du += dz @ step.h_prev.T
        db += dz.sum(axis=1, keepdims=True)
        dh = stacked.u.T @ dz
        dc = dc * step.f

    for row, gate in enumerate(("f", "i", "o", "c")):
        grads[f"w_{gate}"] = dw[row * n:(row + 1) * n]
        grads[f"u_{gate}"] = du[row * n:(row + 1) * n]
        grads[f"b_{gate}"] = db[row * n:(row + 1) * n]
    grads["alpha"] = dalpha
    return grads


def save_checkpoint(path: str, params: LstmParams,
                    kind: ActivationKind) -> None:
    """Write parameters and activation config to JSON.

    Floats serialize via repr (shortest round-trip), so load followed by
    save reproduces the file and the arrays bit for bit.
    """
    doc = {
        "format_version": CHECKPOINT_VERSION,
        "dims": {
            "input": params.input_dim,
            "hidden": params.hidden_dim,
            "output": params.output_dim,
        },
        "activation": {
            "name": kind.name,
            "slope": kind.slope,
            "m": kind.m,
            "epsilon": kind.epsilon,
            "sampling": kind.sampling,
            "input_grad": kind.input_grad,
        },
        "alpha": params.alpha,
        "arrays": {key: getattr(params, key).tolist()
                   for key in PARAM_KEYS},
    }
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_checkpoint(path: str) -> tuple[LstmParams, ActivationKind]:
    """Read a checkpoint written by save_checkpoint."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise ValueError(
            f"unsupported checkpoint format_version {version!r}"
        )
    act = doc["activation"]
    kind = ActivationKind(act["name"], slope=act["slope"], m=act["m"],
                          epsilon=act["epsilon"], sampling=act["sampling"],
                          input_grad=act["input_grad"])
    kw = {key: np.asarray(doc["arrays"][key], dtype=np.float64)
          for key in PARAM_KEYS}
    params = LstmParams(alpha=float(doc["alpha"]), **kw)
    dims = doc["dims"]
    if (params.input_dim, params.hidden_dim, params.output_dim) != (
            dims["input"], dims["hidden"], dims["output"]):
        raise ValueError("checkpoint dims do not match stored arrays")
    return params, kind
