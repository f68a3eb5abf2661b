import numpy as np
import pytest

from boostlab.model import ClassifierModel


@pytest.fixture
def toy_model():
    """Fixed 1-feature, 1-hidden, 2-class net with hand-checkable weights."""
    return ClassifierModel(
        weights_hidden=np.array([[2.0]]),
        bias_hidden=np.array([0.5]),
        weights_out=np.array([[1.5], [-0.5]]),
        bias_out=np.array([0.1, -0.2]),
    )


@pytest.fixture
def zero_model():
    """All parameters zero: constant logits regardless of input."""
    return ClassifierModel(
        weights_hidden=np.zeros((3, 2)),
        bias_hidden=np.zeros(3),
        weights_out=np.zeros((2, 3)),
        bias_out=np.zeros(2),
    )
