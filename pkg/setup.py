from setuptools import setup, find_packages

setup(
    name="gte-lm",
    version="0.1.0",
    description="Nonmonotone Levenberg-Marquardt solver for generalized tensor equations",
    author="GTE-LM Team",
    packages=find_packages(include=["gte_lm", "gte_lm.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pydantic>=2.0.0",
        "click>=8.0.0",
        "pyyaml>=6.0.0",
        "python-dotenv>=1.0.0",
        "pandas>=2.1.0"
    ],
    extras_require={
        "test": ["pytest>=7.0.0", "hypothesis>=6.0.0"],
    },
    entry_points={
        "console_scripts": [
            "gte-lm=gte_lm.cli:run",
        ],
    },
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
