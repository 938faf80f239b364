"""deepfeat: multi-branch time-series classification.

Four feature branches (bidirectional GRU, multi-scale convolutions,
10,000 fixed random convolution kernels, frozen GPT-2 embeddings) fused
through per-branch dense transformations and trained with focal loss.
"""

__version__ = "0.1.0"
