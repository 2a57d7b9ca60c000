"""retta: requirements elicitation for traffic-management services.

Turns crowd text (tweets, historical logs, manual notes) into classified
functional and non-functional requirements: ingestion and context
filtering, preprocessing and stemming, pooled LDA topic modeling, boosted
Naive Bayes classification, and association-rule keyword expansion,
driven through a persisted project workflow with CLI and HTTP surfaces.
"""

from .engine import active_engine

__version__ = "0.1.0"

__all__ = ["active_engine", "__version__"]
