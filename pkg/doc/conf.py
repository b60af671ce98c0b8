# -*- coding: utf-8 -*-
#
# python-lifespan documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

from __future__ import absolute_import
import os
import re
import sys

sys.path.insert(0, os.path.abspath("../"))

with open(os.path.join(os.path.dirname(__file__), "..", "lifespan",
                       "__init__.py")) as handle:
    release = re.search(r'__version__ = "([^"]+)"', handle.read()).group(1)
version = ".".join(release.split(".")[:2])

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
]

# Runtime dependencies are mocked so the API pages build without them.
autodoc_mock_imports = ["numpy", "scipy", "jsonschema"]
napoleon_google_docstring = True

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = u"python-lifespan"
copyright = u"2026, python-lifespan developers"
author = u"python-lifespan developers"

language = "en"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

# -- Options for HTML output ----------------------------------------------

html_theme = "alabaster"
html_static_path = []
htmlhelp_basename = "python-lifespandoc"

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "python-lifespan",
              u"python-lifespan Documentation", [author], 1)]
