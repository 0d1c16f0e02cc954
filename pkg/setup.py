from setuptools import find_packages, setup


setup(
    name="nilmanifold-astheno",
    version="0.1.0",
    description="Exact invariant complex geometry on nilmanifolds: astheno-Kaehler metrics, Bott-Chern cohomology and deformation obstructions",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.10",
    install_requires=[
        "sympy>=1.12",
        "numpy>=1.24.0",
        "python-dotenv>=1.0.0",
        "pyyaml>=6.0",
        "tqdm>=4.66.0",
    ],
    include_package_data=True,
    package_data={
        "nilastheno.data": ["*.json"],
    },
    entry_points={
        "console_scripts": [
            "nilastheno = nilastheno.main:main",
        ],
    },
)
