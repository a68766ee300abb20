import dataclasses

import numpy as np


class Divergence_error(ArithmeticError):
    '''
    Raised when training produces a non-finite gradient or loss. The epoch attribute is set once the
    training loop knows which epoch it happened in.
    '''

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch

    def __str__(self):
        message = super().__str__()

        if self.epoch is None:
            return message

        return f'Epoch {self.epoch}: {message}'


@dataclasses.dataclass
class Adam_state:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def make_adam_state(count, learning_rate=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8):
    return Adam_state(
        first_moment=np.zeros(count, dtype=np.float64),
        second_moment=np.zeros(count, dtype=np.float64),
        learning_rate=learning_rate,
        beta1=beta1,
        beta2=beta2,
        epsilon=epsilon,
    )


def adam_step(state, params, grads):
    '''
    Given an Adam_state, a flat parameter vector, and a gradient of the same length, apply one
    bias-corrected Adam update to the parameters in place and advance the state.

    Raise Divergence_error if the gradient holds a NaN or infinity. Raise ValueError if the lengths
    differ.
    '''
    if params.shape != grads.shape or params.shape != state.first_moment.shape:
        raise ValueError(
            f'Adam parameter shape {params.shape} does not match gradient shape {grads.shape}'
        )

    if not np.all(np.isfinite(grads)):
        raise Divergence_error('Non-finite gradient')

    state.step += 1
    state.first_moment *= state.beta1
    state.first_moment += (1 - state.beta1) * grads
    state.second_moment *= state.beta2
    state.second_moment += (1 - state.beta2) * np.square(grads, dtype=np.float64)

    corrected_first = state.first_moment / (1 - state.beta1**state.step)
    corrected_second = state.second_moment / (1 - state.beta2**state.step)

    params -= (
        state.learning_rate * corrected_first / (np.sqrt(corrected_second) + state.epsilon)
    ).astype(params.dtype)
