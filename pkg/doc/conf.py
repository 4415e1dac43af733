# -*- coding: utf-8 -*-
#
# vertexspectra documentation build configuration file.

import sys, os

sys.path.insert(0, os.path.abspath('..'))

extensions = ['sphinx.ext.autodoc']

source_suffix = '.rst'

master_doc = 'index'

project = u'vertexspectra'
copyright = u'Public Domain'

import vertexspectra
version = vertexspectra.__version__
release = vertexspectra.__version__

exclude_patterns = ['_build']

pygments_style = 'sphinx'

modindex_common_prefix = ['vertexspectra.']

html_theme = 'default'

html_title = '%s v%s Documentation' % (project, version)

html_show_copyright = False

htmlhelp_basename = 'vertexspectradoc'

latex_documents = [
  ('index', 'vertexspectra.tex', u'vertexspectra Documentation',
   u'vertexspectra developers', 'manual'),
]

man_pages = [
    ('index', 'vertex-spectra', u'vertexspectra Documentation',
     [u'vertexspectra developers'], 1)
]
