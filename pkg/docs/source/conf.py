# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Path setup --------------------------------------------------------------

import os
import sys

sys.path.insert(0, os.path.abspath("../.."))

from flatkahler import __version__  # noqa: E402


# -- Project information -----------------------------------------------------

project = "flatkahler"
copyright = "2026, the flatkahler developers"
author = "the flatkahler developers"

release = __version__


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx_copybutton",
    "myst_parser",
    "sphinx_inline_tabs",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]


# -- Options for HTML output -------------------------------------------------

html_title = "FLATKAHLER"
html_theme = "furo"

myst_enable_extensions = ["dollarmath", "amsmath"]
