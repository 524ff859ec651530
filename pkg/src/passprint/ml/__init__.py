"""Multi-label classifiers over circuit feature vectors."""
