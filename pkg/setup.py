#!/usr/bin/env python
# Copyright (C) 2026 python-lifespan developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

from __future__ import absolute_import
from __future__ import print_function
import os
import re
from setuptools import setup, find_packages


def read(name):
    with open(os.path.join(os.path.dirname(__file__), name), "r") as handle:
        return handle.read()


# Importing the package would require numpy at install time.
__version__ = re.search(r'__version__ = "([^"]+)"',
                        read("lifespan/__init__.py")).group(1)

setup(name='python-lifespan',
      version=__version__,
      packages=find_packages(exclude=['tests', 'tests.*']),
      description='Numerical lab for blow-up lifespans of the heat '
                  'equation with a nonlinear radiation boundary condition.',
      long_description=read('README.md'),
      long_description_content_type='text/markdown',
      license='GPLv3',
      python_requires='>=3.7',
      install_requires=['numpy>=1.17', 'scipy>=1.4', 'jsonschema>=4.0'],
      extras_require={
          'reST': [
              "Sphinx>=3.1.2", "docutils>=0.16"]
      },
      setup_requires=['pytest-runner'],
      tests_require=[
          'pytest', 'coverage', 'hypothesis'
      ],
      entry_points={
          'console_scripts': ['lifespan=lifespan.cli:main'],
      },
      classifiers=[
          'Development Status :: 4 - Beta',
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Mathematics',
          'License :: OSI Approved :: GNU General Public License v3 (GPLv3)']
      )
