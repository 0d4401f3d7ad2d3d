"""Feed-forward neural plausibility scorer, trained from scratch with numpy.

Architecture: each position (subject, verb, object) has its own embedding
table with a shared out-of-vocabulary row at index 0.  The three looked-up
embeddings are concatenated and passed through one tanh hidden layer to a
single output logit:

    z = w2 . tanh(W1 . [e_s; e_v; e_o] + b1) + b2

Training minimizes, over contrastive pairs (e, e'),

    L = -log f(e) - log(1 - f(e'))    with   f = sigmoid(z)

which is softplus(-z_pos) + softplus(z_neg), averaged over the batch.
Optimization is Adam with a linear learning-rate warmup.

A pair side may expand to a *group* of surface events (used by the
max-over-abstractions wrapper, which trains through a LogSumExp over the
group's logits).  The plain scorer is the one-event-per-group special case.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass
from typing import BinaryIO, Iterable, Optional, Protocol, Sequence

import numpy as np

from ..abstraction import Event
from ..corpus import TrainingPair, TripleCorpus
from ..mathutil import sigmoid

MODEL_MAGIC = b"ABXN1"
MODEL_VERSION = 1
MODEL_KIND_FEEDFORWARD = 1

POSITIONS = ("subject", "verb", "object")
PARAM_ORDER = ("emb_s", "emb_v", "emb_o", "w1", "b1", "w2", "b2")
OOV_INDEX = 0


class TrainingDivergedError(RuntimeError):
    """Raised when a batch produces a non-finite loss."""

    def __init__(self, epoch: int, batch_index: int, loss: float):
        super().__init__(
            f"non-finite loss {loss!r} at epoch {epoch}, batch {batch_index}"
        )
        self.epoch = epoch
        self.batch_index = batch_index


class TrainingExpander(Protocol):
    """Expands one event into the group of events trained jointly."""

    def training_cells(self, event: Event) -> Sequence[Event]: ...


@dataclass(frozen=True)
class TrainConfig:
    embedding_dim: int = 64
    hidden_dim: int = 128
    learning_rate: float = 1e-3
    batch_size: int = 128
    epochs: int = 2
    warmup_steps: int = 1000
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.embedding_dim < 1:
            raise ValueError(f"embedding_dim must be >= 1, got {self.embedding_dim}")
        if self.hidden_dim < 1:
            raise ValueError(f"hidden_dim must be >= 1, got {self.hidden_dim}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.warmup_steps < 0:
            raise ValueError(f"warmup_steps must be >= 0, got {self.warmup_steps}")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ValueError("Adam betas must lie in [0, 1)")


def build_vocabs(corpus: TripleCorpus) -> dict[str, dict[str, int]]:
    """Per-position word -> embedding row, with row 0 reserved for OOV."""
    vocabs = {}
    for pos in POSITIONS:
        words = sorted(corpus.positional_counts[pos])
        vocabs[pos] = {w: i + 1 for i, w in enumerate(words)}
    return vocabs


def _init_params(
    vocab_sizes: dict[str, int], cfg: TrainConfig, rng: np.random.Generator
) -> dict[str, np.ndarray]:
    d, h = cfg.embedding_dim, cfg.hidden_dim

    def uniform(shape, fan_in):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    return {
        "emb_s": uniform((vocab_sizes["subject"] + 1, d), d),
        "emb_v": uniform((vocab_sizes["verb"] + 1, d), d),
        "emb_o": uniform((vocab_sizes["object"] + 1, d), d),
        "w1": uniform((3 * d, h), 3 * d),
        "b1": np.zeros(h),
        "w2": uniform((h,), h),
        "b2": np.zeros(()),
    }


def _forward(
    params: dict[str, np.ndarray],
    idx_s: np.ndarray,
    idx_v: np.ndarray,
    idx_o: np.ndarray,
):
    """Batch forward pass; returns (logits, cache for backprop)."""
    x = np.concatenate(
        [params["emb_s"][idx_s], params["emb_v"][idx_v], params["emb_o"][idx_o]],
        axis=1,
    )
    hidden = np.tanh(x @ params["w1"] + params["b1"])
    logits = hidden @ params["w2"] + params["b2"]
    return logits, (x, hidden, idx_s, idx_v, idx_o)


def _backward(
    params: dict[str, np.ndarray], cache, dlogits: np.ndarray
) -> dict[str, np.ndarray]:
    """Gradients of sum(dlogits * logits) w.r.t. every parameter."""
    x, hidden, idx_s, idx_v, idx_o = cache
    d = params["emb_s"].shape[1]
    dhidden = np.outer(dlogits, params["w2"])
    dpre = dhidden * (1.0 - hidden * hidden)
    dx = dpre @ params["w1"].T
    grads = {
        "w1": x.T @ dpre,
        "b1": dpre.sum(axis=0),
        "w2": hidden.T @ dlogits,
        "b2": np.asarray(dlogits.sum()),
        "emb_s": np.zeros_like(params["emb_s"]),
        "emb_v": np.zeros_like(params["emb_v"]),
        "emb_o": np.zeros_like(params["emb_o"]),
    }
    np.add.at(grads["emb_s"], idx_s, dx[:, :d])
    np.add.at(grads["emb_v"], idx_v, dx[:, d : 2 * d])
    np.add.at(grads["emb_o"], idx_o, dx[:, 2 * d :])
    return grads


class MlpScorer:
    """Trained feed-forward scorer.  Read-only once constructed."""

    name = "mlp"
    deterministic = True
    concurrent_safe = True

    def __init__(
        self,
        vocabs: dict[str, dict[str, int]],
        params: dict[str, np.ndarray],
        config: TrainConfig,
    ):
        for pos in POSITIONS:
            if pos not in vocabs:
                raise ValueError(f"missing vocabulary for position {pos!r}")
        d, h = config.embedding_dim, config.hidden_dim
        expected = {
            "emb_s": (len(vocabs["subject"]) + 1, d),
            "emb_v": (len(vocabs["verb"]) + 1, d),
            "emb_o": (len(vocabs["object"]) + 1, d),
            "w1": (3 * d, h),
            "b1": (h,),
            "w2": (h,),
            "b2": (),
        }
        for key, shape in expected.items():
            if params[key].shape != shape:
                raise ValueError(
                    f"parameter {key!r} has shape {params[key].shape}, expected {shape}"
                )
        self.vocabs = vocabs
        self.params = params
        self.config = config

    @classmethod
    def initialized(cls, corpus: TripleCorpus, cfg: TrainConfig) -> "MlpScorer":
        vocabs = build_vocabs(corpus)
        rng = np.random.default_rng([cfg.seed, 2])
        params = _init_params({p: len(v) for p, v in vocabs.items()}, cfg, rng)
        return cls(vocabs, params, cfg)

    def indices(self, events: Sequence[Event]):
        vs, vv, vo = (self.vocabs[p] for p in POSITIONS)
        idx_s = np.array([vs.get(e.subject, OOV_INDEX) for e in events], dtype=np.intp)
        idx_v = np.array([vv.get(e.verb, OOV_INDEX) for e in events], dtype=np.intp)
        idx_o = np.array([vo.get(e.object, OOV_INDEX) for e in events], dtype=np.intp)
        return idx_s, idx_v, idx_o

    def logit_batch(self, events: Sequence[Event]) -> np.ndarray:
        if not events:
            return np.zeros(0)
        logits, _ = _forward(self.params, *self.indices(events))
        return logits

    def logit(self, event: Event) -> float:
        return float(self.logit_batch([event])[0])


def _group_logsumexp(logits: np.ndarray, starts: np.ndarray, sizes: np.ndarray):
    """Per-group LSE and within-group softmax weights (grouping by reduceat)."""
    gmax = np.maximum.reduceat(logits, starts)
    shifted = np.exp(logits - np.repeat(gmax, sizes))
    sums = np.add.reduceat(shifted, starts)
    lse = gmax + np.log(sums)
    weights = shifted / np.repeat(sums, sizes)
    return lse, weights


def _batch_arrays(
    scorer: MlpScorer,
    pairs: Sequence[TrainingPair],
    wrapper: Optional[TrainingExpander],
):
    """Flatten a batch of pairs into index arrays plus group bookkeeping.

    Groups alternate positive/negative per pair; with no wrapper each group
    is the single surface event.
    """
    events: list[Event] = []
    sizes: list[int] = []
    for pair in pairs:
        for side in (pair.positive, pair.negative):
            cells = wrapper.training_cells(side) if wrapper is not None else [side]
            events.extend(cells)
            sizes.append(len(cells))
    size_arr = np.asarray(sizes, dtype=np.intp)
    starts = np.concatenate([[0], np.cumsum(size_arr)[:-1]])
    return scorer.indices(events), starts, size_arr


def _batch_loss_and_grads(
    scorer: MlpScorer,
    pairs: Sequence[TrainingPair],
    wrapper: Optional[TrainingExpander],
    want_grads: bool = True,
):
    """Mean contrastive loss over ``pairs`` and (optionally) its gradients."""
    (idx_s, idx_v, idx_o), starts, sizes = _batch_arrays(scorer, pairs, wrapper)
    logits, cache = _forward(scorer.params, idx_s, idx_v, idx_o)
    group_logits, weights = _group_logsumexp(logits, starts, sizes)
    z_pos, z_neg = group_logits[0::2], group_logits[1::2]
    n = len(pairs)
    # softplus(-z_pos) + softplus(z_neg), computed stably
    loss = float(
        (np.logaddexp(0.0, -z_pos).sum() + np.logaddexp(0.0, z_neg).sum()) / n
    )
    if not want_grads:
        return loss, None
    dgroup = np.empty_like(group_logits)
    dgroup[0::2] = (sigmoid(z_pos) - 1.0) / n
    dgroup[1::2] = sigmoid(z_neg) / n
    dlogits = np.repeat(dgroup, sizes) * weights
    return loss, _backward(scorer.params, cache, dlogits)


@dataclass(frozen=True)
class TrainResult:
    scorer: MlpScorer
    epoch_losses: tuple[float, ...]


def train(
    pairs: Iterable[TrainingPair],
    cfg: TrainConfig,
    corpus: TripleCorpus,
    wrapper: Optional[TrainingExpander] = None,
) -> TrainResult:
    """Train a fresh scorer on contrastive pairs.

    ``corpus`` supplies the vocabulary.  ``wrapper``, when given, expands
    each pair side into its training group (see module docstring).  Bitwise
    reproducible for a fixed (pairs, cfg, wrapper).
    """
    pair_list = list(pairs)
    if not pair_list:
        raise ValueError("cannot train on an empty pair stream")
    scorer = MlpScorer.initialized(corpus, cfg)
    params = scorer.params
    adam_m = {k: np.zeros_like(v) for k, v in params.items()}
    adam_v = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    epoch_losses = []
    for epoch in range(cfg.epochs):
        order = np.random.default_rng([cfg.seed, 3, epoch]).permutation(len(pair_list))
        running = 0.0
        batches = 0
        for batch_start in range(0, len(pair_list), cfg.batch_size):
            batch = [pair_list[i] for i in order[batch_start : batch_start + cfg.batch_size]]
            loss, grads = _batch_loss_and_grads(scorer, batch, wrapper)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch, batches, loss)
            step += 1
            if cfg.warmup_steps > 0:
                lr = cfg.learning_rate * min(1.0, step / cfg.warmup_steps)
            else:
                lr = cfg.learning_rate
            for key, p in params.items():
                g = grads[key]
                adam_m[key] = cfg.beta1 * adam_m[key] + (1.0 - cfg.beta1) * g
                adam_v[key] = cfg.beta2 * adam_v[key] + (1.0 - cfg.beta2) * g * g
                m_hat = adam_m[key] / (1.0 - cfg.beta1**step)
                v_hat = adam_v[key] / (1.0 - cfg.beta2**step)
                p -= lr * m_hat / (np.sqrt(v_hat) + cfg.adam_epsilon)
            running += loss
            batches += 1
        epoch_losses.append(running / batches)
    return TrainResult(scorer, tuple(epoch_losses))


def gradient_check(
    scorer: MlpScorer,
    pair: TrainingPair,
    wrapper: Optional[TrainingExpander] = None,
    step: float = 1e-5,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    Elements where both gradients are below 1e-8 in magnitude are treated
    as agreeing exactly (the relative error of two zeros is noise).
    """
    _, grads = _batch_loss_and_grads(scorer, [pair], wrapper)
    worst = 0.0
    for key in PARAM_ORDER:
        param = scorer.params[key]
        flat = param.reshape(-1)
        numeric = np.zeros_like(flat)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + step
            hi, _ = _batch_loss_and_grads(scorer, [pair], wrapper, want_grads=False)
            flat[i] = saved - step
            lo, _ = _batch_loss_and_grads(scorer, [pair], wrapper, want_grads=False)
            flat[i] = saved
            numeric[i] = (hi - lo) / (2.0 * step)
        analytic = grads[key].reshape(-1)
        scale = np.maximum(np.abs(analytic), np.abs(numeric))
        mask = scale > 1e-8
        if mask.any():
            rel = np.abs(analytic[mask] - numeric[mask]) / scale[mask]
            worst = max(worst, float(rel.max()))
    return worst


# --- model container ------------------------------------------------------
#
# Binary layout (little-endian throughout) is documented in
# docs/model_format.md; writer and reader below are the reference
# implementation.


def _read_exact(fh: BinaryIO, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ValueError(f"truncated model file while reading {what}")
    return data


def save_model(path, scorer: MlpScorer) -> None:
    cfg_json = json.dumps(asdict(scorer.config), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<HB", MODEL_VERSION, MODEL_KIND_FEEDFORWARD))
        fh.write(struct.pack("<I", len(cfg_json)))
        fh.write(cfg_json)
        for pos in POSITIONS:
            vocab = scorer.vocabs[pos]
            words = sorted(vocab, key=vocab.__getitem__)
            fh.write(struct.pack("<I", len(words)))
            for word in words:
                raw = word.encode("utf-8")
                if len(raw) > 0xFFFF:
                    raise ValueError(f"vocabulary word too long to serialize: {word!r}")
                fh.write(struct.pack("<H", len(raw)))
                fh.write(raw)
        for key in PARAM_ORDER:
            # np.asarray, not ascontiguousarray: the latter promotes the 0-d
            # bias to 1-d and would corrupt its recorded rank
            arr = np.asarray(scorer.params[key], dtype="<f8")
            fh.write(struct.pack("<B", arr.ndim))
            for dim in arr.shape:
                fh.write(struct.pack("<I", dim))
            fh.write(arr.tobytes())


def load_model(path) -> MlpScorer:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, len(MODEL_MAGIC), "magic")
        if magic != MODEL_MAGIC:
            raise ValueError(f"not a model file (bad magic {magic!r})")
        version, kind = struct.unpack("<HB", _read_exact(fh, 3, "header"))
        if version != MODEL_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        if kind != MODEL_KIND_FEEDFORWARD:
            raise ValueError(f"unsupported model kind {kind}")
        (cfg_len,) = struct.unpack("<I", _read_exact(fh, 4, "config length"))
        cfg = TrainConfig(**json.loads(_read_exact(fh, cfg_len, "config")))
        vocabs = {}
        for pos in POSITIONS:
            (count,) = struct.unpack("<I", _read_exact(fh, 4, f"{pos} vocab size"))
            vocab = {}
            for i in range(count):
                (wlen,) = struct.unpack("<H", _read_exact(fh, 2, "word length"))
                word = _read_exact(fh, wlen, "word").decode("utf-8")
                vocab[word] = i + 1
            vocabs[pos] = vocab
        params = {}
        for key in PARAM_ORDER:
            (ndim,) = struct.unpack("<B", _read_exact(fh, 1, f"{key} rank"))
            shape = tuple(
                struct.unpack("<I", _read_exact(fh, 4, f"{key} dim"))[0]
                for _ in range(ndim)
            )
            n_bytes = 8 * int(np.prod(shape, dtype=np.int64)) if shape else 8
            data = _read_exact(fh, n_bytes, f"{key} data")
            params[key] = np.frombuffer(data, dtype="<f8").reshape(shape).copy()
        trailing = fh.read(1)
        if trailing:
            raise ValueError("trailing bytes after model payload")
    return MlpScorer(vocabs, params, cfg)
