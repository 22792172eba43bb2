"""LLM-assisted video editing backend.

A footage gallery augmented with generated titles and summaries, a
plan-and-execute editing agent, semantic retrieval over narration embeddings,
a timeline with trims/undo/preview, and a session API that drives the web UI.
"""

__version__ = "0.1.0"
