import numpy as np


def mse_loss(predictions, targets):
    '''
    Given predictions and targets of the same shape, return a tuple of (mean squared error as a
    float, gradient with respect to the predictions).

    Raise ValueError if the shapes differ.
    '''
    if predictions.shape != targets.shape:
        raise ValueError(
            f'Prediction shape {predictions.shape} does not match target shape {targets.shape}'
        )

    residual = predictions - targets
    loss = float(np.mean(np.square(residual, dtype=np.float64)))

    return loss, (2.0 / residual.size * residual).astype(predictions.dtype)


def log_softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)

    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def cross_entropy_loss(logits, labels):
    '''
    Given a batch of logits shaped (N, K) and integer labels shaped (N,), return a tuple of (mean
    cross-entropy as a float, gradient with respect to the logits).

    Raise ValueError if any label is outside [0, K).
    '''
    labels = np.asarray(labels, dtype=np.int64)
    count, classes = logits.shape

    if labels.shape != (count,):
        raise ValueError(f'Expected {count} labels, got shape {labels.shape}')

    if np.any(labels < 0) or np.any(labels >= classes):
        raise ValueError(f'Labels must lie in [0, {classes})')

    log_probabilities = log_softmax(logits.astype(np.float64))
    loss = float(-log_probabilities[np.arange(count), labels].mean())

    grad = np.exp(log_probabilities)
    grad[np.arange(count), labels] -= 1

    return loss, (grad / count).astype(logits.dtype)
