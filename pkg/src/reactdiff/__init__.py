"""Dyadic facial reaction generation at desk scale.

Synthetic multimodal feature sequences, a cross-attention transformer
encoder/decoder, a conditional latent DDIM, and the seven-score reaction
evaluation suite with its naive baselines, all on a small numpy-backed
autodiff core.
"""

__version__ = "0.1.0"
