"""birdbox: edge bird monitoring pipelines.

Subpackages:
    audio    - feature front-ends for the species classifier and activity gate
    dataset  - manifest curation, class balancing, weak-label box rules
    engine   - gated inference pipelines and the model-backend contract
    metrics  - classification and detection evaluation metrics
    service  - detection buffer, persistence, and the local HTTP API
"""

__version__ = "0.1.0"
