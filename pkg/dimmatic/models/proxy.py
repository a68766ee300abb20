PROXY_ALPHAS = (10, 15, 20, 50, 100)


def sigmoid_proxy(model, alpha):
    '''
    Given a Classifier with hard binarization and a positive steepness, return a differentiable copy
    where every binarization is replaced by 1 / (1 + exp(-alpha * (x - threshold))).

    Raise ValueError if alpha isn't positive or the model doesn't binarize anything.
    '''
    if alpha <= 0:
        raise ValueError(f'{model.name}: Sigmoid proxy steepness must be positive, got {alpha}')

    if not model.binarizes:
        raise ValueError(f'{model.name}: Model has no binarization to replace with a proxy')

    return model.with_proxy(alpha)
