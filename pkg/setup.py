from setuptools import setup

with open("requirements.txt") as requirements:
    install_requires = [line.strip() for line in requirements if line.strip()]

setup(
    name="mixedgraph",
    version="0.1.0",
    packages=["mixedgraph"],
    install_requires=install_requires,
    extras_require={"test": ["pytest"]},
)
