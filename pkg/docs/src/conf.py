# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.

import os
import sys

sys.path.insert(0, os.path.abspath("../../src"))

# -- Project information -----------------------------------------------------

project = "SKA SDP Double Bubble"
copyright = "2026, SKA SDP Developers"
author = "SKA SDP Developers"

version = "0.1.0"
release = "0.1.0"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.autosectionlabel",
    "sphinx_copybutton",
    "sphinx_new_tab_link",
    "ska_ser_sphinx_theme",
]

templates_path = []
source_suffix = ".rst"
master_doc = "index"
language = "En-en"
exclude_patterns = []
pygments_style = "sphinx"
autodoc_mock_imports = ["ska_ser_logging"]

# -- Options for HTML output -------------------------------------------------

html_theme = "ska_ser_sphinx_theme"
html_context = {
    "display_github": True,
    "favicon": "img/favicon.ico",
    "logo": "img/logo.svg",
    "theme_logo_only": True,
    "github_user": "",
    "github_repo": "",
    "github_version": "master",
    "conf_py_path": "/src/",
}
html_static_path = []
htmlhelp_basename = "ska-sdp-double-bubble"
