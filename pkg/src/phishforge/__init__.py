"""phishforge: adversarial phishing webpage generation for
detector-robustness research.

Transforms legitimate webpages by embedding content-based (C1-C12) and
visual-based (V1-V5) phishing features, produces lookalike URLs, emits
reproducible corpora with provenance manifests, and scores detector
verdicts. Research tooling only: credential capture is strictly
bundle-local and the preview service binds to loopback by default.
"""

__version__ = "0.1.0"
