#!/usr/bin/python

import setuptools
import vertexspectra

setuptools.setup(
    name='vertexspectra',
    version=vertexspectra.__version__,
    description='Six-vertex domain wall partition functions from transfer '
        'matrix spectra',
    license='Public Domain',
    packages=['vertexspectra'],
    package_data={'vertexspectra': ['schema/*.json']},
    include_package_data=True,
    scripts=['bin/vertex-spectra'],
    test_suite='test',
    install_requires=['gevent', 'numpy', 'scipy', 'jsonschema'],
    tests_require=['hypothesis', 'pytest'],
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'License :: Public Domain',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Physics'])
