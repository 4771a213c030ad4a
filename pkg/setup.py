from setuptools import setup, find_packages

with open("./README.rst") as f:
    LONG_DESCRIPTION = f.read()

with open("./VERSION") as f:
    VERSION = f.read().strip()

setup(
    name='rowsparse',
    description='Penalized least squares and minimax rate experiments for row-sparse matrices',
    long_description=LONG_DESCRIPTION,
    version=VERSION,
    license='MIT',
    packages=find_packages('src'),
    package_dir={'': 'src'},
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.20',
        'scipy>=1.6',
        'matplotlib>=3.3',
        'colorlog>=4.0',
    ],
    entry_points={
        'console_scripts': [
            'rowsparse = rowsparse.cli:main',
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License"]
)
