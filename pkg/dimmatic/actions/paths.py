import os

from dimmatic.models import bundle

MODELS_DIRECTORY = 'models'
ATTACKS_DIRECTORY = 'attacks'
REPORTS_DIRECTORY = 'reports'
TSNE_DIRECTORY = 'tsne'


def output_directory(config):
    return os.path.expanduser(config['output']['directory'])


def weights_kind(kind):
    '''
    Return the model kind whose trained weights the given kind uses. Kinds that differ from another
    only in inference-time binarization share its bundle: "bidim" loads the "dim" bundle.
    '''
    return 'dim' if kind in bundle.SHARED_WEIGHT_KINDS else kind


def model_directory(config, kind):
    return os.path.join(output_directory(config), MODELS_DIRECTORY, weights_kind(kind))


def attack_directory(config, kind):
    return os.path.join(output_directory(config), ATTACKS_DIRECTORY, kind)


def report_directory(config):
    return os.path.join(output_directory(config), REPORTS_DIRECTORY)


def tsne_directory(config, kind):
    return os.path.join(output_directory(config), TSNE_DIRECTORY, kind)
