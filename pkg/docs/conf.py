# -*- coding: utf-8 -*-
#
# rowsparse documentation build configuration file.

import os
import sys

import alabaster

sys.path.insert(0, os.path.abspath('../src'))

# -- General configuration ------------------------------------------------

extensions = [
    'alabaster',
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
    'sphinx.ext.githubpages',
]

templates_path = ['_templates']
source_suffix = ['.rst']
master_doc = 'index'

project = u'rowsparse'
copyright = u'2016, rowsparse developers'
author = u'rowsparse developers'

# The short X.Y version and the full version, read from VERSION.
MAJOR, MINOR, RELEASE = None, None, None
with open("../VERSION") as f:
    line = f.read().strip()
    if line.count('.') == 1:
        MAJOR, MINOR = line.split(".")
        RELEASE = '0'
    elif line.count('.') == 2:
        MAJOR, MINOR, RELEASE = line.split(".")
version = u'.'.join([MAJOR, MINOR])
release = u'.'.join([MAJOR, MINOR, RELEASE])

language = 'en'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = False
autodoc_member_order = 'bysource'

# -- Options for HTML output ----------------------------------------------

html_theme_path = [alabaster.get_path()]
html_theme = 'alabaster'
html_theme_options = {
    'description': 'Row-sparse matrix estimation experiments',
    'sidebar_includehidden': True,
    'show_related': True,
    'fixed_sidebar': True,
    'font_size': '14px',
}
html_static_path = []
htmlhelp_basename = 'rowsparsedoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}
latex_documents = [
    (master_doc, 'rowsparse.tex', u'rowsparse Documentation',
     u'rowsparse developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'rowsparse', u'rowsparse Documentation',
     [author], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
    (master_doc, 'rowsparse', u'rowsparse Documentation',
     author, 'rowsparse', 'Penalized least squares for row-sparse matrices.',
     'Miscellaneous'),
]
