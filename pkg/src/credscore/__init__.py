"""Credit-scoring toolkit: MDLP discretization, filter ranking, six classifiers,
threshold and cost handling, ROC/AUC evaluation and WOE scorecards."""

__version__ = "0.1.0"
