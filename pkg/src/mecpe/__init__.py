"""Multimodal emotion-cause pair extraction in conversations.

Two-stage pipeline: an attention-fusion emotion recognizer over pluggable
per-modality features, followed by prompt-driven generative cause extraction
with similarity matching, plus the weighted-F1 pair evaluation harness.
"""

__version__ = "0.1.0"
