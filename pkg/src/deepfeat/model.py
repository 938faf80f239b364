"""Model assembly for every training variant.

Variants select which branches exist and how they fuse:

    full    learned global + local, randomized, language-model; per-branch
            dense transformation; head input 256
    rf      randomized features only, through their dense block; head 64
    pf      language-model features only, through their dense block; head 64
    rf_pf   both non-learned branches; head 128
    dc      all four branches, raw concatenation, no transformation; head 21152

Learned-branch parameters are only allocated when the variant uses them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import branches as br
from . import fusion
from . import rng as rngmod
from .nn.tensor import Parameter, Tensor, parameters_of

MODES = ("full", "rf", "pf", "rf_pf", "dc")
MODE_BRANCHES = {
    "full": ("g", "c", "r", "l"),
    "rf": ("r",),
    "pf": ("l",),
    "rf_pf": ("r", "l"),
    "dc": ("g", "c", "r", "l"),
}


@dataclass
class DeepFeatModel:
    mode: str
    n_classes: int
    global_params: br.GlobalBranchParams | None
    local_params: br.LocalBranchParams | None
    dft_params: fusion.DftParams | None
    head: fusion.HeadParams

    @property
    def uses_learned(self) -> bool:
        return self.global_params is not None

    @property
    def active_branches(self) -> tuple[str, ...]:
        return MODE_BRANCHES[self.mode]

    def parameters(self) -> list[Parameter]:
        return list(parameters_of(self))

    def tensors(self) -> dict[str, np.ndarray]:
        out = {}
        for p in self.parameters():
            if p.name in out:
                raise ValueError(f"duplicate parameter name {p.name!r}")
            out[p.name] = p.data
        return out

    def load_tensors(self, tensors: dict[str, np.ndarray]) -> None:
        params = {p.name: p for p in self.parameters()}
        missing = set(params) - set(tensors)
        if missing:
            raise ValueError(f"checkpoint missing parameters: {sorted(missing)[:5]}")
        for name, p in params.items():
            arr = np.asarray(tensors[name], dtype=p.data.dtype)
            if arr.shape != p.data.shape:
                raise ValueError(f"parameter {name!r}: shape {arr.shape} != {p.data.shape}")
            p.data = arr.copy()

    def forward(
        self,
        series: Tensor | None,
        fr: Tensor | None,
        fl: Tensor | None,
        training: bool = False,
        dropout_rng: np.random.Generator | None = None,
    ) -> Tensor:
        feats: dict[str, Tensor] = {}
        active = self.active_branches
        if "g" in active:
            if series is None:
                raise ValueError(f"mode {self.mode!r} needs raw series input")
            feats["g"] = br.global_branch(series, self.global_params)
            feats["c"] = br.local_branch(series, self.local_params)
        if "r" in active:
            if fr is None:
                raise ValueError(f"mode {self.mode!r} needs randomized features")
            feats["r"] = fr
        if "l" in active:
            if fl is None:
                raise ValueError(f"mode {self.mode!r} needs language-model features")
            feats["l"] = fl
        if self.mode == "dc":
            fused = fusion.direct_concat(feats)
        else:
            fused = fusion.dft(feats, self.dft_params)
        return fusion.mlp_head(fused, self.head, training=training, rng=dropout_rng)


def build_model(mode: str, n_classes: int, seed: int, dtype=np.float32) -> DeepFeatModel:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    init = rngmod.stream(seed, "init")
    active = MODE_BRANCHES[mode]
    global_params = local_params = None
    if "g" in active:
        global_params = br.global_branch_params(init, dtype=dtype)
        local_params = br.local_branch_params(init, dtype=dtype)
    if mode == "dc":
        dft_params = None
        head_in = fusion.DC_WIDTH
    else:
        dft_params = fusion.dft_params(init, branches=active, dtype=dtype)
        head_in = dft_params.output_width
    head = fusion.head_params(head_in, n_classes, init, dtype=dtype)
    return DeepFeatModel(
        mode=mode,
        n_classes=n_classes,
        global_params=global_params,
        local_params=local_params,
        dft_params=dft_params,
        head=head,
    )
