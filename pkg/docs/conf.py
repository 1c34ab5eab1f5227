# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.

import sphinx_rtd_theme
import os
import sys
sys.path.insert(0, os.path.abspath('..'))

# -- Project information -----------------------------------------------------

project = 'blowuplab'
copyright = u'2026, blowuplab developers'
author = u'blowuplab developers'

version = ''
release = ''

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.imgmath',
    'sphinx.ext.napoleon'
]

napoleon_google_docstring = True

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = ['_static']
htmlhelp_basename = 'blowuplabdoc'

# -- Options for LaTeX output ------------------------------------------------

latex_documents = [
    (master_doc, 'blowuplab.tex', 'blowuplab Documentation',
     u'blowuplab developers', 'manual'),
]

man_pages = [
    (master_doc, 'blowuplab', 'blowuplab Documentation',
     [author], 1)
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None),
                       'numpy': ('https://numpy.org/doc/stable/', None),
                       'scipy': ('https://docs.scipy.org/doc/scipy/', None)}
