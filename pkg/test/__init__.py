'''Unittests for vertexspectra.'''

import json
import logging
import os

import numpy as np

import vertexspectra
from vertexspectra import model

TEST_CONFIG_FILE = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), 'test.json')
TEST_CONFIG = json.load(open(TEST_CONFIG_FILE, 'r'))
TEST_LOG = TEST_CONFIG['vertexspectra']['logging']['handlers']['file'][
    'filename']

BOX = [[-1.0, 1.0], [-0.5, 0.5]]
GAMMA_BOX = [[0.2, 1.2], [-0.5, 0.5]]


def core(**options):
    '''Core loaded from the test config, with verify options overridden.'''
    test_core = vertexspectra.Core(TEST_CONFIG_FILE)
    test_core.force_log_level = logging.DEBUG
    for (option, value) in options.items():
        test_core.set_config('vertexspectra.verify', option, value)
    return test_core


def draw(rng, box, size):
    '''size complex values uniform in box.'''
    ((re_min, re_max), (im_min, im_max)) = box
    return [complex(re, im) for (re, im) in zip(
        rng.uniform(re_min, re_max, size), rng.uniform(im_min, im_max, size))]


def random_model(L, seed, homogeneous=False):
    '''Seeded (params, points) in the default sampling boxes.'''
    rng = np.random.default_rng([seed, L])
    gamma = draw(rng, GAMMA_BOX, 1)[0]
    if homogeneous:
        params = model.ModelParams(L, gamma, [0] * L, strict=False)
    else:
        params = model.ModelParams(L, gamma, draw(rng, BOX, L))
    return (params, model.SpectralPoints(params, draw(rng, BOX, L)))


def relative(value, reference):
    return abs(value - reference) / abs(reference)
