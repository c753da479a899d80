"""sft_adapter: reference consumer of the masked SFT dataset export.

Reads the upstream pipeline's JSONL contract ({source, text, mask_spans,
origin_hash, iteration}), converts character-span masks into token-level
supervision via offset mapping, fine-tunes a small causal language model
with the cosine learning-rate schedule, and can serve the result over the
chat-completions wire protocol so the pipeline can plug it back in as a
remote actor. The JSONL export is the sole boundary with the pipeline:
nothing here re-reads trajectories or imports pipeline code.
"""

__version__ = "0.1.0"
