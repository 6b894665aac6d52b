"""
setup.py
--------
Project configuration file for packaging and installation of the
**coin-toss π** Python package.

This script uses `setuptools` to define the package metadata,
dependencies, the `coin-pi` console script and build configuration.

Usage
-----
Standard installation (from project root):
    pip install .

Editable (development) installation:
    pip install -e .

Notes
-----
- Runtime and test dependencies are read from `requirements.txt`.
- `find_packages()` picks up `src`, `config`, `utils` and `pipeline`.
"""

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
from setuptools import setup, find_packages

# -------------------------------------------------------------------
# Dependency Loading
# -------------------------------------------------------------------
with open("requirements.txt", encoding="utf-8") as f:
    requirements = [line.strip() for line in f if line.strip()]

# -------------------------------------------------------------------
# Package Configuration
# -------------------------------------------------------------------
setup(
    name="coin-toss-pi",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    package_data={"config": ["config.yaml"]},
    install_requires=requirements,
    python_requires=">=3.9",
    entry_points={"console_scripts": ["coin-pi=src.cli:main"]},
)
