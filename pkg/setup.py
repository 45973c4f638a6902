#!/usr/bin/env python3
"""
Setup script for roughforge

Mirrors pyproject.toml for environments that still install through setup.py.
"""

from setuptools import setup, find_packages
import os

this_directory = os.path.abspath(os.path.dirname(__file__))
readme_path = os.path.join(this_directory, 'README.md')
long_description = ""
if os.path.exists(readme_path):
    with open(readme_path, encoding='utf-8') as f:
        long_description = f.read()

setup(
    name="roughforge",
    version="0.1.0",
    description="Constructive branched, geometric and anisotropic rough paths on dyadic grids",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where=".", include=["roughforge*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "jsonschema>=4.0",
        "numba>=0.56.0",
        "numpy>=1.21.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0",
            "pytest-cov",
            "hypothesis>=6.0",
            "black",
            "isort",
            "flake8",
            "mypy",
        ],
    },
    entry_points={
        "console_scripts": [
            "roughforge=roughforge.cli:main",
        ],
    },
    include_package_data=True,
    zip_safe=False,
)
