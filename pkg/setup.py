from setuptools import setup, find_packages

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name="tubular_tools",
    version="0.1.0",
    description="Equitable sets, immersed walls and virtual specialness certificates for tubular groups.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=open("requirements.txt").read().splitlines(),
    packages=find_packages(include=['tubular_tools', 'tubular_tools.*']),
    package_data={'tubular_tools': ['data/*.json']},
    entry_points={"console_scripts": ["tubular-tools=tubular_tools.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires='>=3.10',
)
